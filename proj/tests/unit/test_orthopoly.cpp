#include "pv5/orthopoly.hpp"

#include <map>
#include <string>

#include "test_support.hpp"

using namespace pv5;
using namespace pv5::test;

namespace {

const OrthoState& classical(const char* alpha) {
  static std::map<std::string, OrthoState> cache;
  auto it = cache.find(alpha);
  if (it == cache.end()) {
    PrecisionScope scope(256);
    it = cache
             .emplace(alpha, build_ortho(params(alpha, "-1", "0", 10),
                                         make_context()))
             .first;
  }
  return it->second;
}

const OrthoState& gapped() {
  static const OrthoState s = [] {
    PrecisionScope scope(256);
    return build_ortho(params("1", "0.25", "0.5"), make_context());
  }();
  return s;
}

}  // namespace

TEST_CASE("classical recurrence coefficients") {
  PrecisionScope scope(256);
  for (const char* a : {"0", "0.5", "1", "2"}) {
    const OrthoState& s = classical(a);
    CHECK(iszero(s.beta[0]));
    for (int n = 1; n <= 10; ++n) {
      CHECK(abs(s.beta[static_cast<std::size_t>(n)] -
                classical_beta(n, Real(a))) < 1e-30);
    }
  }
  CHECK(abs(classical("0").beta[1] - Real(1) / 3) < 1e-60);
  CHECK(abs(classical("0").beta[2] - Real(4) / 15) < 1e-60);
  CHECK(abs(classical("1").beta[1] - Real(1) / 5) < 1e-60);
  CHECK(abs(classical("1").beta[2] - Real(8) / 35) < 1e-60);
}

TEST_CASE("h_0 is the mass") {
  PrecisionScope scope(256);
  CHECK(close(gapped().h[0],
              moment(0, params("1", "0.25", "0.5"), make_context()),
              1e-60_r));
}

TEST_CASE("monic evaluation") {
  PrecisionScope scope(256);
  const OrthoState& s = classical("1");
  CHECK(eval_monic(s, 0, 0.3_r) == 1);
  CHECK(close(eval_monic(s, 2, 0.5_r), 0.05_r, 1e-60_r));
  CHECK(eval_monic_derivative(s, 1, 0.9_r) == 1);
  CHECK(close(eval_monic_derivative(s, 2, 0.7_r), 1.4_r, 1e-60_r));
  const OrthoState& g = gapped();
  for (int n = 0; n <= 12; ++n) {
    for (const Real& z : {0.3_r, 0.77_r, 1.2_r}) {
      const Real p = eval_monic(g, n, z);
      const Real q = eval_monic(g, n, -z);
      CHECK(q == (n % 2 ? -p : p));
      const Real h = 1e-12_r;
      const Real fd =
          (eval_monic(g, n, z + h) - eval_monic(g, n, z - h)) / (2 * h);
      CHECK(close(fd, eval_monic_derivative(g, n, z), 1e-20_r));
    }
    const auto c = monomial_coefficients(g, n);
    CHECK(c.back() == 1);
  }
  CHECK(error_code_of([&] { eval_monic(g, 13, 0.1_r); }) ==
        ErrorCode::IndexError);
}

TEST_CASE("orthogonality") {
  PrecisionScope scope(256);
  CHECK(iszero(orthogonality_residual(gapped(), 0, 1)));
  CHECK(orthogonality_residual(classical("1"), 0, 2) < 100 * 1e-40_r);
  CHECK(orthogonality_residual(gapped(), 3, 5) < 1e-25);
  CHECK(iszero(orthogonality_residual(gapped(), 4, 7)));
  CHECK(orthogonality_residual(gapped(), 2, 6) < 1e-25);
}

TEST_CASE("property: recurrence invariants") {
  PrecisionScope scope(256);
  const OrthoState smooth =
      build_ortho(params("2", "-0.5", "0.8"), make_context());
  for (const OrthoState* s : {&gapped(), &classical("0.5"), &smooth}) {
    const Real tol = 10 * 1e-40_r;
    Real sum(0);
    for (int n = 0; n <= s->n_max(); ++n) {
      const auto un = static_cast<std::size_t>(n);
      CHECK(sign(s->h[un]) > 0);
      if (n >= 1) {
        CHECK(abs(s->beta[un] - s->h[un] / s->h[un - 1]) <=
              tol * s->beta[un]);
        CHECK(abs(s->beta[un] - (s->p_sub[un] - s->p_sub[un + 1])) <=
              tol * s->beta[un]);
      }
      CHECK(abs(sum + s->p_sub[un]) <= tol * (1 + sum));
      sum += s->beta[un];
      // p(n) through its defining integral.
      CHECK(close(p_sub_by_quadrature(*s, n), s->p_sub[un], 1e-30_r));
    }
    CHECK(s->symmetry_defect < 1e-60);
    for (int m = 0; m <= s->n_max(); ++m) {
      for (int n = m + 1; n <= s->n_max(); ++n) {
        CHECK(orthogonality_residual(*s, m, n) < 1e-25);
      }
    }
  }
}
