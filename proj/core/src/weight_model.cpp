#include "pv5/weight_model.hpp"

#include <string>

#include "pv5/errors.hpp"

namespace pv5 {

namespace {

std::string show(const Real& x) { return x.to_string(12); }

void check_pole_free(const Real& z, const ModelParams& params) {
  const Real guard = pole_guard(params);
  if (sign(params.alpha) != 0) {
    if (abs(1 - z) < guard || abs(1 + z) < guard) {
      throw Error(ErrorCode::PoleError, "z = " + show(z) + " is at +-1");
    }
  }
  if (sign(params.t) > 0 && sign(params.k2) >= 0) {
    const Real k = sqrt(params.k2);
    if (abs(z - k) < guard || abs(z + k) < guard) {
      throw Error(ErrorCode::PoleError,
                  "z = " + show(z) + " is at +-sqrt(k2) = " + show(k));
    }
  }
}

}  // namespace

ModelParams validate(const Real& alpha, const Real& k2, const Real& t,
                     int precision_bits, int n_max) {
  if (precision_bits < 64) {
    throw Error(ErrorCode::InvalidArgument,
                "precision_bits must be >= 64, got " +
                    std::to_string(precision_bits));
  }
  if (n_max < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "n_max must be >= 1, got " + std::to_string(n_max));
  }
  if (!isfinite(alpha) || sign(alpha) < 0) {
    throw Error(ErrorCode::AlphaOutOfRange,
                "alpha must be >= 0, got " + show(alpha));
  }
  if (!isfinite(k2) || k2 >= 1) {
    throw Error(ErrorCode::K2OutOfRange, "k2 must be < 1, got " + show(k2));
  }
  if (!isfinite(t) || sign(t) < 0) {
    throw Error(ErrorCode::NegativeT, "t must be >= 0, got " + show(t));
  }
  PrecisionScope scope(precision_bits);
  return ModelParams{with_precision(alpha, precision_bits),
                     with_precision(k2, precision_bits),
                     with_precision(t, precision_bits), precision_bits, n_max};
}

ModelParams validate(std::string_view alpha, std::string_view k2,
                     std::string_view t, int precision_bits, int n_max) {
  if (precision_bits < 64) {
    throw Error(ErrorCode::InvalidArgument,
                "precision_bits must be >= 64, got " +
                    std::to_string(precision_bits));
  }
  PrecisionScope scope(precision_bits);
  auto parse = [](std::string_view name, std::string_view text) {
    try {
      return Real(text);
    } catch (const std::invalid_argument&) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(name) + " is not a number: '" +
                      std::string(text) + "'");
    }
  };
  return validate(parse("alpha", alpha), parse("k2", k2), parse("t", t),
                  precision_bits, n_max);
}

void require_ladder_eligible(const ModelParams& params) {
  if (!params.ladder_eligible()) {
    throw Error(ErrorCode::AlphaOutOfRange,
                "ladder quantities need alpha > 0, got " + show(params.alpha));
  }
}

ModelParams with_t(const ModelParams& params, const Real& t) {
  return validate(params.alpha, params.k2, t, params.precision_bits,
                  params.n_max);
}

Support support(const ModelParams& params) {
  PrecisionScope scope(params.precision_bits);
  if (params.has_gap()) {
    const Real k = sqrt(params.k2);
    return Support{{Interval{Real(-1), -k}, Interval{k, Real(1)}}};
  }
  return Support{{Interval{Real(-1), Real(1)}}};
}

Real pole_guard(const ModelParams& params) {
  PrecisionScope scope(params.precision_bits);
  return pow(Real(10), -static_cast<long>(params.precision_bits / 8));
}

WeightPoint make_point(const Real& z, const ModelParams& params) {
  return WeightPoint{z, 1 - z, 1 + z, square(z) - params.k2};
}

WeightPoint make_point(const Interval& interval, const Real& z,
                       const Real& d_lo, const Real& d_hi,
                       const ModelParams& params) {
  WeightPoint p{z, interval.hi == 1 ? d_hi : 1 - z,
                interval.lo == -1 ? d_lo : 1 + z, Real()};
  if (params.has_gap()) {
    // The gap edge is an interval end: [k, 1] or [-1, -k].
    if (sign(interval.lo) > 0) {
      p.z2_minus_k2 = d_lo * (z + interval.lo);
    } else {
      p.z2_minus_k2 = -d_hi * (z + interval.hi);
    }
  } else {
    p.z2_minus_k2 = square(z) - params.k2;
  }
  return p;
}

Real weight_at(const WeightPoint& p, const ModelParams& params) {
  if (params.has_gap() && sign(p.z2_minus_k2) <= 0) return Real(0);
  Real w(1);
  if (sign(params.alpha) != 0) {
    const Real base = p.one_minus_z * p.one_plus_z;
    if (sign(base) <= 0) return Real(0);
    w = pow(base, params.alpha);
  }
  if (sign(params.t) > 0) {
    if (iszero(p.z2_minus_k2)) return Real(0);
    w *= exp(-params.t / p.z2_minus_k2);
  }
  return w;
}

Real weight(const Real& z, const ModelParams& params) {
  if (abs(z) > 1) {
    throw Error(ErrorCode::DomainError, "|z| > 1: z = " + show(z));
  }
  PrecisionScope scope(params.precision_bits);
  return weight_at(make_point(z, params), params);
}

Real v_prime_at(const WeightPoint& p, const ModelParams& params) {
  Real v(0);
  if (sign(params.alpha) != 0) {
    v = 2 * params.alpha * p.z / (p.one_minus_z * p.one_plus_z);
  }
  if (sign(params.t) > 0) {
    v -= 2 * params.t * p.z / square(p.z2_minus_k2);
  }
  return v;
}

Real v_prime(const Real& z, const ModelParams& params) {
  PrecisionScope scope(params.precision_bits);
  check_pole_free(z, params);
  return v_prime_at(make_point(z, params), params);
}

Real v_double_prime(const Real& z, const ModelParams& params) {
  PrecisionScope scope(params.precision_bits);
  check_pole_free(z, params);
  const WeightPoint p = make_point(z, params);
  Real v(0);
  const Real z2 = square(z);
  if (sign(params.alpha) != 0) {
    v = 2 * params.alpha * (1 + z2) / square(p.one_minus_z * p.one_plus_z);
  }
  if (sign(params.t) > 0) {
    v += 2 * params.t * (3 * z2 + params.k2) / pow(p.z2_minus_k2, 3);
  }
  return v;
}

Real dd_quotient_at(const WeightPoint& z, const WeightPoint& y,
                    const ModelParams& params) {
  Real q(0);
  if (sign(params.alpha) != 0) {
    // 2az/(1-z^2) = a[1/(1-z) - 1/(1+z)]
    q = params.alpha * (1 / (z.one_minus_z * y.one_minus_z) +
                        1 / (z.one_plus_z * y.one_plus_z));
  }
  if (sign(params.t) > 0) {
    // z D_y^2 - y D_z^2 = (z - y) [D_z^2 - z (z + y)(D_y + D_z)]
    const Real& dz = z.z2_minus_k2;
    const Real& dy = y.z2_minus_k2;
    const Real num = square(dz) - z.z * (z.z + y.z) * (dy + dz);
    q -= 2 * params.t * num / square(dz * dy);
  }
  return q;
}

Real dd_quotient(const Real& z, const Real& y, const ModelParams& params) {
  PrecisionScope scope(params.precision_bits);
  check_pole_free(z, params);
  check_pole_free(y, params);
  return dd_quotient_at(make_point(z, params), make_point(y, params), params);
}

}  // namespace pv5
