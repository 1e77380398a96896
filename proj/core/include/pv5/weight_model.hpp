#pragma once

// The singularly perturbed Jacobi weight
//
//     w(z) = (1 - z^2)^alpha * exp(-t / (z^2 - k^2)),   z in [-1, 1],
//
// its support, and the potential derivative v'(z) = -(ln w)'(z).
//
// For k^2 > 0 and t > 0 the exponential factor blows up on (-k, k). We take
// w = 0 on [-k, k]: approaching +-k from outside, the factor vanishes together
// with all its derivatives, so the support becomes [-1, -k] U [k, 1] and every
// boundary term produced by integrating by parts still vanishes. k^2 may be
// negative (k purely imaginary), which gives a smooth weight on [-1, 1]. At
// t = 0 the weight is the plain Jacobi weight regardless of k^2.

#include <string_view>
#include <vector>

#include "pv5/real.hpp"

namespace pv5 {

struct ModelParams {
  Real alpha;
  Real k2;
  Real t;
  int precision_bits = kDefaultPrecisionBits;
  int n_max = 12;

  // alpha > 0 makes w vanish at +-1, which the ladder relations need.
  bool ladder_eligible() const { return sign(alpha) > 0; }
  bool has_gap() const { return sign(k2) > 0 && sign(t) > 0; }
};

// Rejects invalid input with pv5::Error; never clamps. alpha == 0 is accepted
// (moments only) and reported through ladder_eligible().
ModelParams validate(const Real& alpha, const Real& k2, const Real& t,
                     int precision_bits, int n_max);
// Parses decimal strings at `precision_bits` so that inputs such as 0.04 are
// represented to full working precision.
ModelParams validate(std::string_view alpha, std::string_view k2,
                     std::string_view t, int precision_bits, int n_max);

// Throws AlphaOutOfRange unless alpha > 0.
void require_ladder_eligible(const ModelParams& params);

// Same weight at a different deformation time.
ModelParams with_t(const ModelParams& params, const Real& t);

struct Interval {
  Real lo;
  Real hi;
};

struct Support {
  std::vector<Interval> intervals;  // disjoint, ascending
};

Support support(const ModelParams& params);

// An evaluation point together with the factors whose cancellation would
// otherwise destroy relative accuracy near the poles of v'.
struct WeightPoint {
  Real z;
  Real one_minus_z;
  Real one_plus_z;
  Real z2_minus_k2;
};

WeightPoint make_point(const Real& z, const ModelParams& params);
// Builds a point from its distances to the ends of a support interval
// (d_lo = z - lo, d_hi = hi - z), both known to full relative precision.
WeightPoint make_point(const Interval& interval, const Real& z,
                       const Real& d_lo, const Real& d_hi,
                       const ModelParams& params);

// Relative radius inside which v' and friends report PoleError.
Real pole_guard(const ModelParams& params);

Real weight(const Real& z, const ModelParams& params);
Real weight_at(const WeightPoint& p, const ModelParams& params);

Real v_prime(const Real& z, const ModelParams& params);
Real v_prime_at(const WeightPoint& p, const ModelParams& params);
Real v_double_prime(const Real& z, const ModelParams& params);

// (v'(z) - v'(y)) / (z - y), evaluated in a factored form that has no
// cancellation as y -> z and equals v''(z) at y == z.
Real dd_quotient(const Real& z, const Real& y, const ModelParams& params);
Real dd_quotient_at(const WeightPoint& z, const WeightPoint& y,
                    const ModelParams& params);

}  // namespace pv5
