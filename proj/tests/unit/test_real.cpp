#include "test_support.hpp"

using namespace pv5;
using namespace pv5::test;

TEST_CASE("decimal literals parse at working precision") {
  PrecisionScope scope(256);
  const Real x("0.04");
  CHECK(x.precision() == 256);
  CHECK(abs(x * 25 - 1) < epsilon_for(256) * 4);
  CHECK(0.04_r == x);
  CHECK(Real("-1e-40") < 0);
  CHECK_FALSE(isfinite(Real("inf")));
  CHECK_THROWS_AS(Real("0.0x4"), std::invalid_argument);
  CHECK_THROWS_AS(Real(""), std::invalid_argument);
}

TEST_CASE("to_string round-trips") {
  PrecisionScope scope(256);
  const Real third = Real(1) / 3;
  CHECK(Real(std::string_view(third.to_string())) == third);
  CHECK(Real(std::string_view(pi().to_string())) == pi());
  CHECK(third.to_string(5) == "3.3333e-1");
}

TEST_CASE("precision scope restores the previous precision") {
  const auto before = working_precision();
  {
    PrecisionScope scope(512);
    CHECK(working_precision() == 512);
    CHECK(Real(1).precision() == 512);
  }
  CHECK(working_precision() == before);
}

TEST_CASE("elementary functions against cpp_bin_float") {
  PrecisionScope scope(320);
  const Real tol = 1e-95_r;
  CHECK(close(sqrt(Real(2)), from_big(boost::multiprecision::sqrt(Big(2))),
              tol));
  CHECK(close(exp(Real(-50) / 39),
              from_big(boost::multiprecision::exp(Big(-50) / 39)), tol));
  const Real x = 1e-30_r;
  CHECK(close(log1p(x), x - square(x) / 2 + x * square(x) / 3, tol));
  CHECK(close(pi(), from_big(boost::math::constants::pi<Big>()), tol));
}

TEST_CASE("mixed integer arithmetic") {
  PrecisionScope scope(128);
  const Real a(3);
  CHECK(a + 2 == 5);
  CHECK(2 - a == -1);
  CHECK(pi() / 2 * 2 == pi());
  CHECK(Real(7) / 2 == 3.5);
  CHECK(ldexp(Real(1), -3) == 0.125);
  CHECK(sign(Real(-2)) == -1);
  CHECK(iszero(Real(0)));
}
