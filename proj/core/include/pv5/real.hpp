#pragma once

// Thin value-semantic wrapper around an MPFR number.
//
// Every freshly created Real (default-constructed, converted from a native
// number, or produced by arithmetic) takes the calling thread's working
// precision. Copies keep the precision of their source. Use PrecisionScope
// to change the working precision for a block of code; worker threads start
// at the library default of 256 bits and must open their own scope.

#include <mpfr.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>

namespace pv5 {

inline constexpr int kDefaultPrecisionBits = 256;

mpfr_prec_t working_precision() noexcept;
void set_working_precision(mpfr_prec_t bits);

class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits) : saved_(working_precision()) {
    set_working_precision(bits);
  }
  ~PrecisionScope() { set_working_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

class Real {
 public:
  Real() {
    mpfr_init2(v_, working_precision());
    mpfr_set_zero(v_, 1);
  }
  template <std::signed_integral I>
  Real(I x) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, working_precision());
    mpfr_set_si(v_, static_cast<long>(x), MPFR_RNDN);
  }
  template <std::unsigned_integral I>
  Real(I x) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, working_precision());
    mpfr_set_ui(v_, static_cast<unsigned long>(x), MPFR_RNDN);
  }
  Real(double x) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, working_precision());
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  // Parses a decimal literal ("0.04", "-1e-40", "inf"). Throws
  // std::invalid_argument on malformed input.
  explicit Real(std::string_view text);

  Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  Real(Real&& other) noexcept {
    v_[0] = other.v_[0];
    other.v_[0]._mpfr_d = nullptr;
  }
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept {
    std::swap(v_[0], other.v_[0]);
    return *this;
  }
  ~Real() {
    if (v_[0]._mpfr_d != nullptr) mpfr_clear(v_);
  }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const noexcept { return mpfr_get_si(v_, MPFR_RNDN); }

  // Scientific decimal representation. digits == 0 selects enough digits to
  // round-trip the value exactly at its own precision.
  std::string to_string(int digits = 0) const;

  Real& operator+=(const Real& b) {
    mpfr_add(v_, v_, b.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator-=(const Real& b) {
    mpfr_sub(v_, v_, b.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator*=(const Real& b) {
    mpfr_mul(v_, v_, b.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator/=(const Real& b) {
    mpfr_div(v_, v_, b.v_, MPFR_RNDN);
    return *this;
  }
  template <std::integral I>
  Real& operator*=(I b) {
    mpfr_mul_si(v_, v_, static_cast<long>(b), MPFR_RNDN);
    return *this;
  }
  template <std::integral I>
  Real& operator/=(I b) {
    mpfr_div_si(v_, v_, static_cast<long>(b), MPFR_RNDN);
    return *this;
  }

  Real operator-() const {
    Real r;
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

  friend Real operator+(const Real& a, const Real& b) {
    Real r;
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator-(const Real& a, const Real& b) {
    Real r;
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator*(const Real& a, const Real& b) {
    Real r;
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator/(const Real& a, const Real& b) {
    Real r;
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator+(Real&& a, const Real& b) {
    mpfr_add(a.v_, a.v_, b.v_, MPFR_RNDN);
    return std::move(a);
  }
  friend Real operator-(Real&& a, const Real& b) {
    mpfr_sub(a.v_, a.v_, b.v_, MPFR_RNDN);
    return std::move(a);
  }
  friend Real operator*(Real&& a, const Real& b) {
    mpfr_mul(a.v_, a.v_, b.v_, MPFR_RNDN);
    return std::move(a);
  }
  friend Real operator/(Real&& a, const Real& b) {
    mpfr_div(a.v_, a.v_, b.v_, MPFR_RNDN);
    return std::move(a);
  }

  template <std::integral I>
  friend Real operator+(Real&& a, I b) {
    mpfr_add_si(a.v_, a.v_, static_cast<long>(b), MPFR_RNDN);
    return std::move(a);
  }
  template <std::integral I>
  friend Real operator-(Real&& a, I b) {
    mpfr_sub_si(a.v_, a.v_, static_cast<long>(b), MPFR_RNDN);
    return std::move(a);
  }
  template <std::integral I>
  friend Real operator*(Real&& a, I b) {
    mpfr_mul_si(a.v_, a.v_, static_cast<long>(b), MPFR_RNDN);
    return std::move(a);
  }
  template <std::integral I>
  friend Real operator/(Real&& a, I b) {
    mpfr_div_si(a.v_, a.v_, static_cast<long>(b), MPFR_RNDN);
    return std::move(a);
  }
  template <std::integral I>
  friend Real operator+(const Real& a, I b) {
    Real r;
    mpfr_add_si(r.v_, a.v_, static_cast<long>(b), MPFR_RNDN);
    return r;
  }
  template <std::integral I>
  friend Real operator+(I a, const Real& b) {
    return b + a;
  }
  template <std::integral I>
  friend Real operator-(const Real& a, I b) {
    Real r;
    mpfr_sub_si(r.v_, a.v_, static_cast<long>(b), MPFR_RNDN);
    return r;
  }
  template <std::integral I>
  friend Real operator-(I a, const Real& b) {
    Real r;
    mpfr_si_sub(r.v_, static_cast<long>(a), b.v_, MPFR_RNDN);
    return r;
  }
  template <std::integral I>
  friend Real operator*(const Real& a, I b) {
    Real r;
    mpfr_mul_si(r.v_, a.v_, static_cast<long>(b), MPFR_RNDN);
    return r;
  }
  template <std::integral I>
  friend Real operator*(I a, const Real& b) {
    return b * a;
  }
  template <std::integral I>
  friend Real operator/(const Real& a, I b) {
    Real r;
    mpfr_div_si(r.v_, a.v_, static_cast<long>(b), MPFR_RNDN);
    return r;
  }
  template <std::integral I>
  friend Real operator/(I a, const Real& b) {
    Real r;
    mpfr_si_div(r.v_, static_cast<long>(a), b.v_, MPFR_RNDN);
    return r;
  }

  friend bool operator==(const Real& a, const Real& b) noexcept {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend std::partial_ordering operator<=>(const Real& a,
                                           const Real& b) noexcept {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp(a.v_, b.v_);
    return c < 0   ? std::partial_ordering::less
           : c > 0 ? std::partial_ordering::greater
                   : std::partial_ordering::equivalent;
  }
  template <std::integral I>
  friend bool operator==(const Real& a, I b) noexcept {
    return !mpfr_nan_p(a.v_) && mpfr_cmp_si(a.v_, static_cast<long>(b)) == 0;
  }
  template <std::integral I>
  friend std::partial_ordering operator<=>(const Real& a, I b) noexcept {
    if (mpfr_nan_p(a.v_)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp_si(a.v_, static_cast<long>(b));
    return c < 0   ? std::partial_ordering::less
           : c > 0 ? std::partial_ordering::greater
                   : std::partial_ordering::equivalent;
  }

 private:
  mpfr_t v_;
};

Real operator""_r(const char* literal);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real square(const Real& x);
Real exp(const Real& x);
Real expm1(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long y);
Real sin(const Real& x);
Real cos(const Real& x);
Real sinh(const Real& x);
Real cosh(const Real& x);
Real tanh(const Real& x);
Real asinh(const Real& x);
Real ldexp(const Real& x, long e);  // x * 2^e
Real pi();
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

bool isfinite(const Real& x) noexcept;
bool isnan(const Real& x) noexcept;
bool iszero(const Real& x) noexcept;
int sign(const Real& x) noexcept;

// Value rounded to `bits` of precision (independent of the working precision).
Real with_precision(const Real& x, mpfr_prec_t bits);

// 2^(-bits), the unit roundoff scale of a given precision.
Real epsilon_for(mpfr_prec_t bits);

std::ostream& operator<<(std::ostream& os, const Real& x);

}  // namespace pv5
