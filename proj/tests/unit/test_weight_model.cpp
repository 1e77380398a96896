#include <random>

#include "test_support.hpp"

using namespace pv5;
using namespace pv5::test;

TEST_CASE("validate accepts and rejects") {
  const ModelParams p = params("1", "0.25", "0.5");
  CHECK(p.ladder_eligible());
  CHECK(p.has_gap());
  CHECK(error_code_of([] { params("1", "1.5", "0.5"); }) ==
        ErrorCode::K2OutOfRange);
  CHECK(error_code_of([] { params("1", "1", "0.5"); }) ==
        ErrorCode::K2OutOfRange);
  CHECK(error_code_of([] { params("1", "0.25", "-0.1"); }) ==
        ErrorCode::NegativeT);
  CHECK(error_code_of([] { params("-1", "0.25", "0.5"); }) ==
        ErrorCode::AlphaOutOfRange);

  const ModelParams zero_alpha = params("0", "0.25", "0.5");
  CHECK_FALSE(zero_alpha.ladder_eligible());
  CHECK(error_code_of([&] { require_ladder_eligible(zero_alpha); }) ==
        ErrorCode::AlphaOutOfRange);
  CHECK(error_code_of([] { params("1", "0.25", "0.5", 12, 32); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { params("1", "0.25", "0.5", 0); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("support") {
  PrecisionScope scope(256);
  const Support gap = support(params("1", "0.25", "0.5"));
  REQUIRE(gap.intervals.size() == 2);
  CHECK(gap.intervals[0].lo == -1);
  CHECK(gap.intervals[0].hi == -0.5);
  CHECK(gap.intervals[1].lo == 0.5);
  CHECK(gap.intervals[1].hi == 1);
  for (const char* k2 : {"-0.5", "0", "0.25"}) {
    const char* t = std::string_view(k2) == "0.25" ? "0" : "0.5";
    const Support s = support(params("1", k2, t));
    REQUIRE(s.intervals.size() == 1);
    CHECK(s.intervals[0].lo == -1);
    CHECK(s.intervals[0].hi == 1);
  }
}

TEST_CASE("weight values") {
  PrecisionScope scope(256);
  CHECK(close(weight(0.6_r, params("1", "-1", "0")), 0.64_r, 1e-70_r));
  CHECK(iszero(weight(0.3_r, params("1", "0.25", "0.5"))));
  CHECK(iszero(weight(0.5_r, params("1", "0.25", "0.5"))));
  const Big oracle = Big("0.36") * boost::multiprecision::exp(
                                       Big("-0.5") / Big("0.39"));
  const Real w = weight(0.8_r, params("1", "0.25", "0.5"));
  CHECK(close(w, from_big(oracle), 1e-70_r));
  CHECK(abs(w - 0.0998883_r) < 1e-7);
  CHECK(error_code_of([] { weight(1.01_r, params("1", "0.25", "0.5")); }) ==
        ErrorCode::DomainError);
}

TEST_CASE("v_prime values and poles") {
  PrecisionScope scope(256);
  const ModelParams gap = params("1", "0.25", "0.5");
  CHECK(iszero(v_prime(Real(0), params("1", "-1", "0.5"))));
  CHECK(close(v_prime(0.5_r, params("1", "-1", "0")), Real(4) / 3, 1e-70_r));
  const Big z("0.8");
  const Big oracle =
      2 * z / (1 - z * z) - 2 * Big("0.5") * z / ((z * z - Big("0.25")) *
                                                   (z * z - Big("0.25")));
  CHECK(close(v_prime(0.8_r, gap), from_big(oracle), 1e-70_r));
  CHECK(abs(v_prime(0.8_r, gap) + 0.815253_r) < 1e-6);
  for (const Real& pole : {Real(1), Real(-1), 0.5_r, -0.5_r}) {
    CHECK(error_code_of([&] { v_prime(pole, gap); }) ==
          ErrorCode::PoleError);
  }
}

TEST_CASE("dd_quotient") {
  PrecisionScope scope(256);
  const ModelParams jac = params("1", "-1", "0");
  CHECK(close(dd_quotient(0.5_r, -0.5_r, jac), Real(8) / 3, 1e-70_r));
  const ModelParams gap = params("1", "0.25", "0.5");
  for (const Real& z : {0.8_r, 0.6_r, -0.7_r, 1.5_r}) {
    CHECK(close(dd_quotient(z, z, gap), v_double_prime(z, gap), 1e-70_r));
  }
  // Two-point evaluation straddling y = 0.6.
  const Real d = 1e-20_r;
  const Real lo = dd_quotient(0.8_r, 0.6_r - d, gap);
  const Real mid = dd_quotient(0.8_r, 0.6_r, gap);
  const Real hi = dd_quotient(0.8_r, 0.6_r + d, gap);
  CHECK(isfinite(mid));
  CHECK(abs((lo + hi) / 2 - mid) < 1e-35);
  const Real direct =
      (v_prime(0.8_r, gap) - v_prime(0.6_r, gap)) / (0.8_r - 0.6_r);
  CHECK(close(mid, direct, 1e-70_r));
}

TEST_CASE("property: evenness and positivity") {
  PrecisionScope scope(256);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  for (const char* k2 : {"0.25", "-0.5", "0.01"}) {
    const ModelParams p = params("1.5", k2, "0.5");
    for (int i = 0; i < 200; ++i) {
      const Real z(u(rng));
      const Real w = weight(z, p);
      CHECK(w == weight(-z, p));
      CHECK(sign(w) >= 0);
      const bool interior = !p.has_gap() || square(z) > p.k2;
      if (interior) CHECK(sign(w) > 0);
      if (interior && !iszero(z)) {
        CHECK(v_prime(-z, p) == -v_prime(z, p));
      }
    }
  }
}

TEST_CASE("property: v_prime matches -d/dz ln w to second order") {
  PrecisionScope scope(256);
  const ModelParams p = params("1", "0.25", "0.5");
  for (const Real& z : {0.6_r, 0.75_r, -0.9_r}) {
    auto fd = [&](const Real& h) {
      return -(log(weight(z + h, p)) - log(weight(z - h, p))) / (2 * h);
    };
    const Real e1 = abs(fd(1e-4_r) - v_prime(z, p));
    const Real e2 = abs(fd(5e-5_r) - v_prime(z, p));
    CHECK(e1 < 1e-3);
    const double ratio = (e1 / e2).to_double();
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("property: gap convention") {
  PrecisionScope scope(256);
  const ModelParams p = params("1", "0.25", "0.5");
  for (int i = -50; i <= 50; ++i) {
    CHECK(iszero(weight(Real(i) / 100, p)));
  }
  // Continuous at the gap edge: flat to all orders from outside.
  CHECK(weight(0.5_r + 1e-3_r, p) < 1e-100);
  CHECK(weight(0.5_r + 1e-2_r, p) < 1e-10);
}
