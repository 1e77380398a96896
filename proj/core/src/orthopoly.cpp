#include "pv5/orthopoly.hpp"

#include <string>

#include "pv5/errors.hpp"

namespace pv5 {

namespace {

void check_degree(const OrthoState& s, int n) {
  if (n < 0 || n > s.n_max()) {
    throw Error(ErrorCode::IndexError,
                "degree " + std::to_string(n) + " outside [0, " +
                    std::to_string(s.n_max()) + "]");
  }
}

}  // namespace

OrthoState build_ortho(const ModelParams& params, const PrecisionContext& ctx) {
  return build_ortho(std::make_shared<const WeightedRule>(params, ctx));
}

OrthoState build_ortho(std::shared_ptr<const WeightedRule> rule) {
  const ModelParams& params = rule->params();
  const PrecisionContext& ctx = rule->context();
  if (!rule->probes_converged()) {
    throw Error(ErrorCode::NoConvergence,
                "weighted rule did not settle by level " +
                    std::to_string(ctx.max_level));
  }
  PrecisionScope scope(ctx.bits);
  const int n_max = params.n_max;
  const auto nodes = rule->nodes();
  const std::size_t size = nodes.size();

  OrthoState s;
  s.params = params;
  s.rule = rule;
  s.h.resize(static_cast<std::size_t>(n_max) + 1);
  s.beta.assign(static_cast<std::size_t>(n_max) + 1, Real(0));
  s.values.resize(static_cast<std::size_t>(n_max) + 1);
  s.symmetry_defect = Real(0);

  auto& v = s.values;
  v[0].assign(size, Real(1));
  for (int n = 0; n <= n_max; ++n) {
    const auto un = static_cast<std::size_t>(n);
    if (n >= 1) {
      v[un].resize(size);
      const auto& p1 = v[un - 1];
      for (std::size_t i = 0; i < size; ++i) {
        Real next = nodes[i].point.z * p1[i];
        if (n >= 2) next -= s.beta[un - 1] * v[un - 2][i];
        v[un][i] = std::move(next);
      }
    }
    const auto& pn = v[un];
    const IntegralResult hn =
        rule->integrate([&](std::size_t i) { return square(pn[i]); });
    if (!(sign(hn.value) > 0) || !(hn.error_estimate < hn.value)) {
      throw Error(ErrorCode::PrecisionExhausted,
                  "h_" + std::to_string(n) + " = " + hn.value.to_string(6) +
                      " has no significant digits left at " +
                      std::to_string(ctx.bits) + " bits");
    }
    s.h[un] = hn.value;
    if (n >= 1) s.beta[un] = s.h[un] / s.h[un - 1];
    const IntegralResult odd = rule->integrate(
        [&](std::size_t i) { return nodes[i].point.z * square(pn[i]); });
    s.symmetry_defect = max(s.symmetry_defect, abs(odd.value) / s.h[un]);
  }

  s.p_sub.assign(static_cast<std::size_t>(n_max) + 2, Real(0));
  for (int n = 1; n <= n_max; ++n) {
    const auto un = static_cast<std::size_t>(n);
    s.p_sub[un + 1] = s.p_sub[un] - s.beta[un];
  }
  // The recursion is exact; guard the indexing against the coefficients the
  // recurrence itself produces.
  for (int n = 2; n <= std::min(4, n_max); ++n) {
    const Real c = monomial_coefficients(s, n)[static_cast<std::size_t>(n - 2)];
    const Real& p = s.p_sub[static_cast<std::size_t>(n)];
    if (abs(c - p) > ldexp(abs(p) + 1, 8 - ctx.bits)) {
      throw Error(ErrorCode::PrecisionExhausted,
                  "p(" + std::to_string(n) + ") recursion " + p.to_string(20) +
                      " disagrees with coefficient " + c.to_string(20));
    }
  }
  return s;
}

void eval_monic_all(const OrthoState& s, int n, const Real& z,
                    std::vector<Real>& p, std::vector<Real>* dp) {
  check_degree(s, n);
  PrecisionScope scope(s.params.precision_bits);
  const auto count = static_cast<std::size_t>(n) + 1;
  p.assign(count, Real(1));
  if (dp) dp->assign(count, Real(0));
  if (n == 0) return;
  p[1] = z;
  if (dp) (*dp)[1] = Real(1);
  for (std::size_t k = 1; k + 1 < count; ++k) {
    p[k + 1] = z * p[k] - s.beta[k] * p[k - 1];
    if (dp) {
      auto& d = *dp;
      d[k + 1] = p[k] + z * d[k] - s.beta[k] * d[k - 1];
    }
  }
}

Real eval_monic(const OrthoState& s, int n, const Real& z) {
  std::vector<Real> p;
  eval_monic_all(s, n, z, p);
  return p.back();
}

Real eval_monic_derivative(const OrthoState& s, int n, const Real& z) {
  std::vector<Real> p, dp;
  eval_monic_all(s, n, z, p, &dp);
  return dp.back();
}

Real orthogonality_residual(const OrthoState& s, int m, int n) {
  check_degree(s, m);
  check_degree(s, n);
  PrecisionScope scope(s.params.precision_bits);
  if ((m + n) % 2 == 1) return Real(0);
  const auto& pm = s.values[static_cast<std::size_t>(m)];
  const auto& pn = s.values[static_cast<std::size_t>(n)];
  const IntegralResult r =
      s.rule->integrate([&](std::size_t i) { return pm[i] * pn[i]; });
  return abs(r.value) / sqrt(s.h[static_cast<std::size_t>(m)] *
                             s.h[static_cast<std::size_t>(n)]);
}

Real p_sub_by_quadrature(const OrthoState& s, int n) {
  if (n < 0 || n > s.n_max() + 1) {
    throw Error(ErrorCode::IndexError,
                "p(n) needs 0 <= n <= n_max + 1, got " + std::to_string(n));
  }
  PrecisionScope scope(s.params.precision_bits);
  if (n < 2) return Real(0);
  const auto nodes = s.rule->nodes();
  const auto& q = s.values[static_cast<std::size_t>(n - 2)];
  const IntegralResult r = s.rule->integrate([&](std::size_t i) {
    return pow(nodes[i].point.z, static_cast<long>(n)) * q[i];
  });
  return -r.value / s.h[static_cast<std::size_t>(n - 2)];
}

std::vector<Real> monomial_coefficients(const OrthoState& s, int n) {
  check_degree(s, n);
  PrecisionScope scope(s.params.precision_bits);
  std::vector<Real> prev, cur{Real(1)};
  for (int k = 0; k < n; ++k) {
    std::vector<Real> next(cur.size() + 1, Real(0));
    for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] = cur[j];
    const Real& b = s.beta[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= b * prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace pv5
