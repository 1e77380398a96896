#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <string>

#include "pv5/errors.hpp"
#include "pv5/quadrature.hpp"
#include "pv5/real.hpp"
#include "pv5/weight_model.hpp"

namespace pv5::test {

// 100 decimal digits, independent of MPFR.
using Big = boost::multiprecision::cpp_bin_float_100;

inline Big to_big(const Real& x) { return Big(x.to_string()); }
inline Real from_big(const Big& x) {
  return Real(std::string_view(x.str(110, std::ios_base::scientific)));
}

inline ModelParams params(const char* alpha, const char* k2, const char* t,
                          int n_max = 12, int bits = 256) {
  return validate(alpha, k2, t, bits, n_max);
}

// Classical Gegenbauer recurrence coefficient for (1 - z^2)^alpha.
inline Real classical_beta(int n, const Real& alpha) {
  const Real two_a = 2 * alpha;
  return n * (n + two_a) / ((2 * n + two_a + 1) * (2 * n + two_a - 1));
}

// Adaptive Gauss-Kronrod on [a, b] in cpp_bin_float_100.
template <class F>
Big gauss_kronrod(F f, const Big& a, const Big& b) {
  return boost::math::quadrature::gauss_kronrod<Big, 61>::integrate(
      f, a, b, 30, Big("1e-60"));
}

inline bool close(const Real& a, const Real& b, const Real& tol) {
  return abs(a - b) <= tol * (1 + max(abs(a), abs(b)));
}

template <class F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected pv5::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace pv5::test
