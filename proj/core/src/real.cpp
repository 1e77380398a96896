#include "pv5/real.hpp"

#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pv5 {

namespace {
thread_local mpfr_prec_t t_working_precision = kDefaultPrecisionBits;

template <class F>
Real apply(F f, const Real& x) {
  Real r;
  f(r.get(), x.get(), MPFR_RNDN);
  return r;
}
}  // namespace

mpfr_prec_t working_precision() noexcept { return t_working_precision; }

void set_working_precision(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX) {
    throw std::invalid_argument("precision out of MPFR range: " +
                                std::to_string(bits));
  }
  t_working_precision = bits;
}

Real::Real(std::string_view text) {
  mpfr_init2(v_, working_precision());
  const std::string s(text);
  if (s.empty() || mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    mpfr_clear(v_);
    throw std::invalid_argument("not a decimal number: '" + s + "'");
  }
}

Real& Real::operator=(const Real& other) {
  if (this == &other) return *this;
  if (v_[0]._mpfr_d == nullptr) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
  } else if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
  }
  mpfr_set(v_, other.v_, MPFR_RNDN);
  return *this;
}

std::string Real::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_signbit(v_) ? "-inf" : "inf";
  if (mpfr_zero_p(v_)) return mpfr_signbit(v_) ? "-0" : "0";

  const size_t n = digits > 0 ? static_cast<size_t>(digits)
                              : mpfr_get_str_ndigits(10, mpfr_get_prec(v_));
  mpfr_exp_t exp10 = 0;
  char* raw = mpfr_get_str(nullptr, &exp10, 10, n, v_, MPFR_RNDN);
  std::string mant(raw);
  mpfr_free_str(raw);

  std::string out;
  if (mant.front() == '-') {
    out.push_back('-');
    mant.erase(0, 1);
  }
  // Drop trailing zeros of the mantissa but keep at least one digit.
  while (mant.size() > 1 && mant.back() == '0') mant.pop_back();
  out.push_back(mant.front());
  if (mant.size() > 1) {
    out.push_back('.');
    out.append(mant, 1, std::string::npos);
  }
  const long e = static_cast<long>(exp10) - 1;
  if (e != 0) {
    out.push_back('e');
    out += std::to_string(e);
  }
  return out;
}

Real operator""_r(const char* literal) { return Real(std::string_view(literal)); }

Real abs(const Real& x) { return apply(mpfr_abs, x); }
Real sqrt(const Real& x) { return apply(mpfr_sqrt, x); }
Real square(const Real& x) { return apply(mpfr_sqr, x); }
Real exp(const Real& x) { return apply(mpfr_exp, x); }
Real expm1(const Real& x) { return apply(mpfr_expm1, x); }
Real log(const Real& x) { return apply(mpfr_log, x); }
Real log1p(const Real& x) { return apply(mpfr_log1p, x); }
Real sin(const Real& x) { return apply(mpfr_sin, x); }
Real cos(const Real& x) { return apply(mpfr_cos, x); }
Real sinh(const Real& x) { return apply(mpfr_sinh, x); }
Real cosh(const Real& x) { return apply(mpfr_cosh, x); }
Real tanh(const Real& x) { return apply(mpfr_tanh, x); }
Real asinh(const Real& x) { return apply(mpfr_asinh, x); }

Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, long y) {
  Real r;
  mpfr_pow_si(r.get(), x.get(), y, MPFR_RNDN);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN);
  return r;
}

Real pi() {
  Real r;
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }

bool isfinite(const Real& x) noexcept { return mpfr_number_p(x.get()) != 0; }
bool isnan(const Real& x) noexcept { return mpfr_nan_p(x.get()) != 0; }
bool iszero(const Real& x) noexcept { return mpfr_zero_p(x.get()) != 0; }
int sign(const Real& x) noexcept { return mpfr_sgn(x.get()); }

Real with_precision(const Real& x, mpfr_prec_t bits) {
  PrecisionScope scope(bits);
  Real r;
  mpfr_set(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real epsilon_for(mpfr_prec_t bits) {
  Real one(1);
  return ldexp(one, -static_cast<long>(bits));
}

std::ostream& operator<<(std::ostream& os, const Real& x) {
  const auto p = os.precision();
  return os << x.to_string(p > 0 ? static_cast<int>(p) : 0);
}

}  // namespace pv5
