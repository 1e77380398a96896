#include "pv5/ladder.hpp"

#include <string>

#include "pv5/errors.hpp"

namespace pv5 {

namespace {

void check_index(const OrthoState& s, int n) {
  if (n < 0 || n > s.n_max()) {
    throw Error(ErrorCode::IndexError,
                "index " + std::to_string(n) + " outside [0, " +
                    std::to_string(s.n_max()) + "]");
  }
}

}  // namespace

LadderState compute_ladder(const OrthoState& s) {
  require_ladder_eligible(s.params);
  const ModelParams& params = s.params;
  PrecisionScope scope(params.precision_bits);
  const auto nodes = s.rule->nodes();
  const auto count = static_cast<std::size_t>(s.n_max()) + 1;
  const bool with_t = sign(params.t) > 0;

  LadderState lad;
  lad.R.assign(count, Real(0));
  lad.r.assign(count, Real(0));
  lad.a.assign(count, Real(0));
  lad.b.assign(count, Real(0));

  // Kernels shared by every n.
  std::vector<Real> jac(nodes.size()), gap;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const WeightPoint& p = nodes[i].point;
    jac[i] = 1 / (p.one_minus_z * p.one_plus_z);
  }
  if (with_t) {
    gap.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      gap[i] = 1 / nodes[i].point.z2_minus_k2;
    }
  }

  const Real two_alpha = 2 * params.alpha;
  const Real two_t = 2 * params.t;
  for (std::size_t n = 0; n < count; ++n) {
    const auto& pn = s.values[n];
    lad.a[n] = two_alpha / s.h[n] *
               s.rule->integrate([&](std::size_t i) {
                 return square(pn[i]) * jac[i];
               }).value;
    if (with_t) {
      lad.R[n] = two_t / s.h[n] *
                 s.rule->integrate([&](std::size_t i) {
                   return square(pn[i]) * gap[i];
                 }).value;
    }
    if (n == 0) continue;
    const auto& pm = s.values[n - 1];
    lad.b[n] = two_alpha / s.h[n - 1] *
               s.rule->integrate([&](std::size_t i) {
                 return nodes[i].point.z * pn[i] * pm[i] * jac[i];
               }).value;
    if (with_t) {
      lad.r[n] = two_t / s.h[n - 1] *
                 s.rule->integrate([&](std::size_t i) {
                   return nodes[i].point.z * pn[i] * pm[i] * gap[i];
                 }).value;
    }
  }
  return lad;
}

Real A_rational(int n, const Real& z, const OrthoState& s,
                const LadderState& lad) {
  check_index(s, n);
  const ModelParams& params = s.params;
  PrecisionScope scope(params.precision_bits);
  const WeightPoint p = make_point(z, params);
  const Real base = p.one_minus_z * p.one_plus_z;
  const Real& d = p.z2_minus_k2;
  if (iszero(base) || iszero(d)) {
    throw Error(ErrorCode::PoleError, "A_n(z) has a pole at z = " +
                                          z.to_string(12));
  }
  const auto un = static_cast<std::size_t>(n);
  const Real m = 2 * n + 2 * params.alpha + 1;
  return lad.a[un] / base + (lad.a[un] - m) / d +
         params.k2 * lad.R[un] / square(d);
}

Real B_rational(int n, const Real& z, const OrthoState& s,
                const LadderState& lad) {
  check_index(s, n);
  const ModelParams& params = s.params;
  PrecisionScope scope(params.precision_bits);
  const WeightPoint p = make_point(z, params);
  const Real base = p.one_minus_z * p.one_plus_z;
  const Real& d = p.z2_minus_k2;
  if (iszero(base) || iszero(d)) {
    throw Error(ErrorCode::PoleError, "B_n(z) has a pole at z = " +
                                          z.to_string(12));
  }
  const auto un = static_cast<std::size_t>(n);
  return z * (lad.b[un] / base + (lad.b[un] - n) / d +
              lad.r[un] / square(d));
}

LadderFunctions ladder_functions(const OrthoState& s, const Real& z) {
  const ModelParams& params = s.params;
  PrecisionScope scope(params.precision_bits);
  // v_prime performs the pole check.
  (void)v_prime(z, params);
  const WeightPoint zp = make_point(z, params);
  const auto nodes = s.rule->nodes();
  std::vector<Real> q(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    q[i] = dd_quotient_at(zp, nodes[i].point, params);
  }
  const auto count = static_cast<std::size_t>(s.n_max()) + 1;
  LadderFunctions f;
  f.A.resize(count);
  f.B.assign(count, Real(0));
  for (std::size_t n = 0; n < count; ++n) {
    const auto& pn = s.values[n];
    f.A[n] = s.rule->integrate([&](std::size_t i) {
                   return q[i] * square(pn[i]);
                 }).value /
             s.h[n];
    if (n == 0) continue;
    const auto& pm = s.values[n - 1];
    f.B[n] = s.rule->integrate([&](std::size_t i) {
                   return q[i] * pn[i] * pm[i];
                 }).value /
             s.h[n - 1];
  }
  return f;
}

Real A_integral(int n, const Real& z, const OrthoState& s) {
  check_index(s, n);
  return ladder_functions(s, z).A[static_cast<std::size_t>(n)];
}

Real B_integral(int n, const Real& z, const OrthoState& s) {
  check_index(s, n);
  return ladder_functions(s, z).B[static_cast<std::size_t>(n)];
}

}  // namespace pv5
