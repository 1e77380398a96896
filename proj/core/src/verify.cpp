#include "pv5/verify.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <random>
#include <string>

#include "pv5/errors.hpp"
#include "pv5/parallel.hpp"

namespace pv5 {

namespace {

using enum IdentityId;

struct Measurement {
  Real residual;
  Real scale;
  std::string message;
};

// |L - R| / (1 + max(|L|, |R|))
Measurement equation(const Real& lhs, const Real& rhs) {
  Real scale = max(abs(lhs), abs(rhs));
  Real residual = abs(lhs - rhs) / (1 + scale);
  return {std::move(residual), std::move(scale), {}};
}

// |sum| / (1 + max |term|)
Measurement zero_form(std::initializer_list<Real> terms) {
  Real sum(0), scale(0);
  for (const Real& term : terms) {
    sum += term;
    scale = max(scale, abs(term));
  }
  Real residual = abs(sum) / (1 + scale);
  return {std::move(residual), std::move(scale), {}};
}

// |sum| / max |term|, for identities whose terms may all be tiny.
Measurement relative_zero(std::initializer_list<Real> terms) {
  Real sum(0), scale(0);
  for (const Real& term : terms) {
    sum += term;
    scale = max(scale, abs(term));
  }
  Real residual = iszero(scale) ? Real(0) : abs(sum) / scale;
  return {std::move(residual), std::move(scale), {}};
}

Measurement relative(const Real& lhs, const Real& rhs, const Real& scale) {
  Real s = abs(scale);
  Real residual = iszero(s) ? abs(lhs - rhs) : abs(lhs - rhs) / s;
  return {std::move(residual), std::move(s), {}};
}

// Indexed access to the arrays at one t.
struct View {
  const TimePoint& p;
  const ModelParams& params;
  int n;
  Real K, t, alpha, m;

  View(const TimePoint& point, int index)
      : p(point),
        params(point.ortho.params),
        n(index),
        K(params.k2),
        t(params.t),
        alpha(params.alpha),
        m(2 * index + 2 * params.alpha + 1) {}

  static std::size_t at(int j, std::size_t size) {
    if (j < 0 || static_cast<std::size_t>(j) >= size) {
      throw Error(ErrorCode::IndexError,
                  "index " + std::to_string(j) + " outside the computed range");
    }
    return static_cast<std::size_t>(j);
  }
  const Real& R(int j) const { return p.ladder.R[at(j, p.ladder.R.size())]; }
  const Real& r(int j) const { return p.ladder.r[at(j, p.ladder.r.size())]; }
  const Real& a(int j) const { return p.ladder.a[at(j, p.ladder.a.size())]; }
  const Real& b(int j) const { return p.ladder.b[at(j, p.ladder.b.size())]; }
  const Real& beta(int j) const {
    return p.ortho.beta[at(j, p.ortho.beta.size())];
  }
  const Real& h(int j) const { return p.ortho.h[at(j, p.ortho.h.size())]; }
  const Real& p_rec(int j) const {
    return p.ortho.p_sub[at(j, p.ortho.p_sub.size())];
  }
  const Real& p_quad(int j) const { return p.p_quad[at(j, p.p_quad.size())]; }
  Real sum_a() const {
    Real s(0);
    for (int j = 0; j < n; ++j) s += a(j);
    return s;
  }
  Real sum_R() const {
    Real s(0);
    for (int j = 0; j < n; ++j) s += R(j);
    return s;
  }
};

Measurement coefficient_identity(IdentityId id, const View& v) {
  const int n = v.n;
  const Real& K = v.K;
  const Real& t = v.t;
  const Real& al = v.alpha;
  const Real& m = v.m;
  switch (id) {
    case BETA_ROUTES:
      return relative(v.beta(n), v.p_quad(n) - v.p_quad(n + 1), v.beta(n));
    case P_TELESCOPE: {
      Real sum(0);
      for (int j = 0; j < n; ++j) sum += v.beta(j);
      return relative(sum, -v.p_quad(n), sum);
    }
    case C_S1_B:
      return equation(v.b(n + 1) + v.b(n), v.a(n) - 2 * al);
    case C_S1_R:
      return equation(v.r(n + 1) + v.r(n), K * v.R(n) + 2 * t);
    case C_S2_B:
      return equation(v.b(n + 1) - v.b(n),
                      v.beta(n + 1) * v.a(n + 1) - v.beta(n) * v.a(n - 1));
    case C_S2_R:
      return equation(v.r(n + 1) - v.r(n),
                      v.beta(n + 1) * v.R(n + 1) - v.beta(n) * v.R(n - 1));
    case C_S2_MIX:
      return equation(
          v.r(n + 1) - v.r(n) + (K - 1) * (v.b(n + 1) - v.b(n)) - K,
          v.beta(n) * (2 * n + 2 * al - 1) -
              v.beta(n + 1) * (2 * n + 2 * al + 3));
    case YJ3:
      return equation(
          v.b(n + 1) - v.b(n),
          v.beta(n) * (v.R(n - 1) + 2 * n + 2 * al - 1) -
              v.beta(n + 1) * (v.R(n + 1) + 2 * n + 2 * al + 3));
    case YJ4:
      return equation(v.a(n), v.R(n) + m);
    case TELE_SUM:
      return equation(v.r(n) + (K - 1) * v.b(n) - n * K,
                      -v.beta(n) * m + 2 * v.p_rec(n));
    default:
      break;
  }

  const Real& b = v.b(n);
  const Real& r = v.r(n);
  const Real& Rn = v.R(n);
  const Real& Rm = v.R(n - 1);
  const Real& an = v.a(n);
  const Real& am = v.a(n - 1);
  const Real& be = v.beta(n);
  const Real bn = b - n;
  switch (id) {
    case Q1:
    case QP1:
      return equation(square(b) + 2 * al * b, be * an * am);
    case Q2:
    case QP2:
      return equation(square(r) - 2 * t * r, K * be * Rn * Rm);
    case Q3:
      return zero_form({square(b), -2 * n * (b + al), v.sum_a()});
    case Q4:
      return equation(2 * b * (r - t) + 2 * al * r,
                      be * (an * Rm + am * Rn));
    case Q5:
      return equation(K * square(bn) - 2 * t * bn + 2 * r * bn + K * v.sum_R(),
                      be * Rn * Rm);
    case Q6:
      return equation(2 * K * bn * (b + al) + 2 * b * (r - t) + 2 * al * r,
                      be * (am * Rn + an * Rm));
    case Q7:
    case QP7:
      return equation(square(r) - 2 * t * r + 2 * K * bn * (r - t),
                      2 * K * be * Rn * Rm);
    case QP3:
      return equation(square(b) + 2 * al * b, v.sum_a());
    case QP4:
      return equation(2 * b * r + 2 * al * r - 2 * al * t * b,
                      K * be * (an * Rm + am * Rn));
    case QP5:
      return equation(K * square(bn) - 2 * t * bn - 2 * r * (n + al) +
                          2 * al * t * b + K * v.sum_R(),
                      be * Rn * Rm);
    case QP6:
      return equation(2 * (b + al) * bn, be * (am * Rn + an * Rm));
    case Q3_QP3_WITNESS: {
      const Real w = (b + al) * bn;
      return {abs(w), abs(w), "(b_n + alpha)(b_n - n) = " + w.to_string(20)};
    }
    case ZHU232:
      return zero_form({square(r), -2 * K * (n + al) * r, 2 * K * t * n,
                        -2 * t * r, be * K * Rn * (2 * n + 2 * al - 1),
                        be * K * Rm * (2 * n + 2 * al + 1)});
    case BETA_EXPR: {
      const Real c = 2 * n + 2 * al - 1;
      const Real rhs =
          (2 * K * (n + al) * r - 2 * K * t * n + 2 * t * r - square(r)) /
              (K * Rn * c) -
          m * (square(r) - 2 * t * r) / (K * square(Rn) * c);
      return equation(be, rhs);
    }
    default:
      break;
  }
  throw Error(ErrorCode::InvalidArgument,
              "not a coefficient identity: " + std::string(to_string(id)));
}

// First and second central differences on one of the two stencil widths.
struct Differences {
  const Stencil& s;
  int lo, hi;  // indices into s.points
  Real step;

  const TimePoint& center() const { return *s.points[2]; }
  template <class Q>
  Real d1(Q&& q) const {
    return (q(*s.points[static_cast<std::size_t>(hi)]) -
            q(*s.points[static_cast<std::size_t>(lo)])) /
           (2 * step);
  }
  template <class Q>
  Real d2(Q&& q) const {
    return (q(*s.points[static_cast<std::size_t>(hi)]) - 2 * q(center()) +
            q(*s.points[static_cast<std::size_t>(lo)])) /
           square(step);
  }
};

struct RiccatiTerms {
  Real f_r;  // rhs of 2 k^2 t r' = ...
  Real f_R;  // rhs of 2 k^2 t R' = ...
};

RiccatiTerms riccati_rhs(const Real& K, const Real& t, const Real& al, int n,
                         const Real& R, const Real& r) {
  const Real m = 2 * n + 2 * al + 1;
  const Real c = 2 * (K * (n + al + 1) + t);
  return {c * r - 2 * m * (square(r) - 2 * t * r) / R - square(r) -
              2 * K * n * t,
          c * R - 2 * r * (m + R) + K * square(R) + 2 * m * t};
}

Measurement derivative_identity(IdentityId id, int n, const Differences& d) {
  const TimePoint& c = d.center();
  const View v(c, n);
  const Real& K = v.K;
  const Real& t = v.t;
  const Real& al = v.alpha;
  const Real& m = v.m;
  const auto j = static_cast<std::size_t>(n);
  auto R_of = [j](const TimePoint& p) { return p.ladder.R[j]; };
  auto r_of = [j](const TimePoint& p) { return p.ladder.r[j]; };
  switch (id) {
    case DLNH:
      return equation(2 * t * d.d1([j](const TimePoint& p) {
                        return log(p.ortho.h[j]);
                      }),
                      -v.R(n));
    case DBETA:
      return equation(
          2 * t * d.d1([j](const TimePoint& p) { return p.ortho.beta[j]; }),
          v.beta(n) * (v.R(n - 1) - v.R(n)));
    case DP:
      return equation(
          2 * t * d.d1([j](const TimePoint& p) { return p.ortho.p_sub[j]; }),
          v.r(n) - v.beta(n) * v.R(n));
    default:
      break;
  }

  const Real& R = v.R(n);
  const Real& r = v.r(n);
  const Real dR = d.d1(R_of);
  switch (id) {
    case RIC_R: {
      const RiccatiTerms f = riccati_rhs(K, t, al, n, R, r);
      return equation(2 * K * t * d.d1(r_of), f.f_r);
    }
    case RIC_BIGR: {
      const RiccatiTerms f = riccati_rhs(K, t, al, n, R, r);
      return equation(2 * K * t * dR, f.f_R);
    }
    case FACTOR_PROD: {
      const std::initializer_list<Real> first = {
          2 * t * R, 2 * K * (n + al + 1) * R, K * square(R),
          -2 * r * (m + R), 2 * t * m, -2 * K * t * dR};
      const std::initializer_list<Real> second = {
          2 * m * (2 * t - r) * r,
          (2 * t * r + 2 * K * n * r + 2 * K * al * r - square(r) -
           2 * K * n * t) *
              R};
      Real f1(0), s1(0), f2(0), s2(0);
      for (const Real& x : first) {
        f1 += x;
        s1 = max(s1, abs(x));
      }
      for (const Real& x : second) {
        f2 += x;
        s2 = max(s2, abs(x));
      }
      Real scale = s1 * s2;
      Real residual = abs(f1 * f2) / (1 + scale);
      return {std::move(residual), std::move(scale),
              "riccati factor " + f1.to_string(12) + ", algebraic factor " +
                  f2.to_string(12)};
    }
    case ODE_RN: {
      const Real d2R = d.d2(R_of);
      const Real K2 = square(K);
      const Real t2 = square(t);
      return zero_form(
          {8 * K2 * t2 * R * (m + R) * d2R,
           -4 * K2 * t2 * (2 * m + 3 * R) * square(dR),
           8 * K2 * t * R * (m + R) * dR, -K2 * pow(R, 5),
           -2 * K2 * m * pow(R, 4),
           -4 * (K2 * (n + al) * (n + al + 1) - t2 - 2 * K * al * t) *
               pow(R, 3),
           16 * t * m * (t + K * al) * square(R),
           4 * t * square(m) * (5 * t + 2 * K * al) * R,
           8 * t2 * pow(m, 3)});
    }
    case PV_PHI: {
      const Real phi = (R + m) / m;
      const Real dphi = dR / m;
      const Real d2phi = d.d2(R_of) / m;
      const Real gamma = square(m) / 8;
      const Real delta = Real(-1) / 8;
      const Real eps = -al / K;
      const Real eta = Real(-1) / (2 * square(K));
      const Real rhs =
          (3 * phi - 1) * square(dphi) / (2 * phi * (phi - 1)) - dphi / t +
          square(phi - 1) / square(t) * (gamma * phi + delta / phi) +
          eps * phi / t + eta * phi * (phi + 1) / (phi - 1);
      return equation(d2phi, rhs);
    }
    default:
      break;
  }
  throw Error(ErrorCode::InvalidArgument,
              "not a derivative identity: " + std::string(to_string(id)));
}

Measurement functional_identity(IdentityId id, int n, const Real& z,
                                const TimePoint& point,
                                const LadderFunctions& f) {
  const OrthoState& s = point.ortho;
  const ModelParams& params = s.params;
  const auto j = static_cast<std::size_t>(n);
  if (n + (info(id).needs_next ? 1 : 0) > s.n_max()) {
    throw Error(ErrorCode::IndexError,
                "n = " + std::to_string(n) + " needs index n + 1 <= " +
                    std::to_string(s.n_max()));
  }
  const Real vp = v_prime(z, params);
  switch (id) {
    case S1_FUNC:
      return equation(f.B[j + 1] + f.B[j], z * f.A[j] - vp);
    case S2_FUNC: {
      Real rhs = s.beta[j + 1] * f.A[j + 1];
      if (n >= 1) rhs -= s.beta[j] * f.A[j - 1];
      return equation(1 + z * (f.B[j + 1] - f.B[j]), rhs);
    }
    case S2P_FUNC: {
      Real sum(0);
      for (std::size_t i = 0; i < j; ++i) sum += f.A[i];
      return equation(square(f.B[j]) + vp * f.B[j] + sum,
                      s.beta[j] * f.A[j] * f.A[j - 1]);
    }
    case LOWER_FUNC:
    case RAISE_FUNC: {
      std::vector<Real> p, dp;
      eval_monic_all(s, n, z, p, &dp);
      if (id == LOWER_FUNC) {
        return relative_zero({dp[j], f.B[j] * p[j],
                              -s.beta[j] * f.A[j] * p[j - 1]});
      }
      return relative_zero({dp[j - 1], -(f.B[j] + vp) * p[j - 1],
                            f.A[j - 1] * p[j]});
    }
    case A_FORM: {
      const Real ar = A_rational(n, z, s, point.ladder);
      Real scale = abs(ar);
      Real residual = abs(ar - f.A[j]) / (1 + scale);
      return {std::move(residual), std::move(scale), {}};
    }
    case B_FORM: {
      const Real br = B_rational(n, z, s, point.ladder);
      Real scale = abs(br);
      Real residual = abs(br - f.B[j]) / (1 + scale);
      return {std::move(residual), std::move(scale), {}};
    }
    default:
      break;
  }
  throw Error(ErrorCode::InvalidArgument,
              "not a functional identity: " + std::string(to_string(id)));
}

// Below this the step-halving ratio is rounding noise, not truncation error.
constexpr double kDerivativeNoiseFloor = 1e-30;

bool derivative_pass(const Real& res_h, const Real& res_h2, double threshold) {
  if (!(res_h <= threshold)) return false;
  if (res_h < kDerivativeNoiseFloor) return true;
  if (iszero(res_h2)) return false;
  const Real ratio = res_h / res_h2;
  return ratio >= 3 && ratio <= 5;
}

std::string key_of(const Real& x) { return x.to_string(); }

}  // namespace

Real derivative_step(const Real& t) {
  return 1e-6_r * max(t, Real(1));
}

Workspace::Workspace(const ModelParams& params, const PrecisionContext& ctx)
    : params_(params), ctx_(ctx) {}

template <class V, class F>
std::shared_ptr<const V> Workspace::cached(
    std::map<std::string, std::shared_ptr<Slot<V>>>& table,
    const std::string& key, F&& make) {
  std::shared_ptr<Slot<V>> slot;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& entry = table[key];
    if (!entry) entry = std::make_shared<Slot<V>>();
    slot = entry;
  }
  std::call_once(slot->once, [&] {
    try {
      slot->value = make();
    } catch (...) {
      slot->error = std::current_exception();
    }
  });
  if (slot->error) std::rethrow_exception(slot->error);
  return slot->value;
}

std::shared_ptr<const TimePoint> Workspace::at(const Real& t) {
  return cached(points_, key_of(t), [&] {
    PrecisionScope scope(ctx_.bits);
    const ModelParams p = with_t(params_, t);
    auto point = std::make_shared<TimePoint>();
    point->ortho = build_ortho(p, ctx_);
    point->ladder = compute_ladder(point->ortho);
    point->p_quad.resize(static_cast<std::size_t>(p.n_max) + 2);
    for (int j = 0; j <= p.n_max + 1; ++j) {
      point->p_quad[static_cast<std::size_t>(j)] =
          p_sub_by_quadrature(point->ortho, j);
    }
    return std::shared_ptr<const TimePoint>(std::move(point));
  });
}

Stencil Workspace::stencil(const Real& t) {
  PrecisionScope scope(ctx_.bits);
  Stencil s{with_precision(t, ctx_.bits), derivative_step(t), {}};
  if (!(s.t - s.h > 0)) {
    throw Error(ErrorCode::InvalidArgument,
                "t = " + t.to_string(12) + " is too close to 0 for a step of " +
                    s.h.to_string(6));
  }
  const Real half = s.h / 2;
  s.points = {at(s.t - s.h), at(s.t - half), at(s.t), at(s.t + half),
              at(s.t + s.h)};
  return s;
}

std::shared_ptr<const LadderFunctions> Workspace::functions(const Real& t,
                                                            const Real& z) {
  return cached(functions_, key_of(t) + "|" + key_of(z), [&] {
    auto point = at(t);
    return std::make_shared<const LadderFunctions>(
        ladder_functions(point->ortho, z));
  });
}

IdentityReport check(IdentityId id, Workspace& ws, int n, const Real& t,
                     const std::optional<Real>& z) {
  const IdentityInfo& meta = info(id);
  PrecisionScope scope(ws.context().bits);
  IdentityReport rep;
  rep.id = id;
  rep.tier = meta.tier;
  rep.n = n;
  rep.t = t;
  if (meta.needs_z) rep.z = z;
  rep.lhs_scale = Real(0);
  rep.residual = Real(0);
  const double threshold =
      meta.threshold > 0
          ? meta.threshold
          : 10 * ws.context().rel_tol.to_double();
  try {
    if (n < meta.min_n) {
      throw Error(ErrorCode::IndexError,
                  std::string(meta.name) + " needs n >= " +
                      std::to_string(meta.min_n) + ", got " +
                      std::to_string(n));
    }
    if (meta.needs_next && n + 1 > ws.params().n_max) {
      throw Error(ErrorCode::IndexError,
                  std::string(meta.name) + " references n + 1 = " +
                      std::to_string(n + 1) + " > n_max = " +
                      std::to_string(ws.params().n_max));
    }
    if (meta.needs_k2 && iszero(ws.params().k2)) {
      throw Error(ErrorCode::SingularParams,
                  std::string(meta.name) + " divides by k^2; k2 = 0");
    }
    if (meta.needs_z && !z) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(meta.name) + " needs a sample point z");
    }
    if (meta.needs_derivative) {
      Stencil s;
      try {
        s = ws.stencil(t);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InvalidArgument) throw;
        rep.status = CheckStatus::Skipped;
        rep.message = e.what();
        return rep;
      }
      const Measurement wide =
          derivative_identity(id, n, Differences{s, 0, 4, s.h});
      const Measurement narrow =
          derivative_identity(id, n, Differences{s, 1, 3, s.h / 2});
      rep.residual = wide.residual;
      rep.lhs_scale = wide.scale;
      rep.residual_half_step = narrow.residual;
      rep.message = wide.message;
      if (meta.tier == Tier::Required) {
        rep.pass = derivative_pass(wide.residual, narrow.residual, threshold);
      }
      return rep;
    }
    Measurement result;
    if (meta.needs_z) {
      auto point = ws.at(t);
      auto f = ws.functions(t, *z);
      result = functional_identity(id, n, *z, *point, *f);
    } else {
      auto point = ws.at(t);
      result = coefficient_identity(id, View(*point, n));
    }
    rep.residual = std::move(result.residual);
    rep.lhs_scale = std::move(result.scale);
    rep.message = std::move(result.message);
    if (meta.tier == Tier::Required) rep.pass = rep.residual <= threshold;
  } catch (const Error& e) {
    rep.status = CheckStatus::Error;
    rep.error = e.code();
    rep.message = e.what();
    if (meta.tier == Tier::Required) rep.pass = false;
  } catch (const std::exception& e) {
    rep.status = CheckStatus::Error;
    rep.message = e.what();
    if (meta.tier == Tier::Required) rep.pass = false;
  }
  return rep;
}

IdentityReport check(IdentityId id, const ModelParams& params,
                     const PrecisionContext& ctx, int n, const Real& t,
                     const std::optional<Real>& z) {
  ModelParams p = params;
  if (info(id).needs_next) p.n_max = std::max(p.n_max, n + 1);
  Workspace ws(p, ctx);
  return check(id, ws, n, t, z);
}

std::vector<IdentityReport> check_suite(const ModelParams& params,
                                        const PrecisionContext& ctx,
                                        const SuiteSpec& spec) {
  if (spec.n_set.empty() || spec.ids.empty() || spec.t_grid.empty()) {
    return {};
  }
  std::vector<int> ns = spec.n_set;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::vector<IdentityId> ids = spec.ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  ModelParams p = params;
  p.n_max = std::max(1, ns.back() + 1);
  Workspace ws(p, ctx);
  const bool single_t = spec.t_grid.size() == 1;

  bool any_z = false, any_derivative = false;
  for (IdentityId id : ids) {
    any_z = any_z || info(id).needs_z;
    any_derivative = any_derivative || info(id).needs_derivative;
  }

  // Warm the caches; failures resurface per check.
  std::vector<Real> times = spec.t_grid;
  if (any_derivative && !single_t) {
    PrecisionScope scope(ctx.bits);
    for (const Real& t : spec.t_grid) {
      const Real h = derivative_step(t);
      if (!(t - h > 0)) continue;
      for (const Real& off : {-h, -h / 2, h / 2, h}) times.push_back(t + off);
    }
  }
  parallel_for(times.size(), [&](std::size_t i) {
    try {
      ws.at(times[i]);
    } catch (const std::exception&) {
    }
  });
  if (any_z) {
    const std::size_t nz = spec.z_samples.size();
    parallel_for(spec.t_grid.size() * nz, [&](std::size_t i) {
      try {
        ws.functions(spec.t_grid[i / nz], spec.z_samples[i % nz]);
      } catch (const std::exception&) {
      }
    });
  }

  struct Task {
    IdentityId id;
    int n;
    std::size_t t_index;
    std::optional<std::size_t> z_index;
  };
  std::vector<Task> tasks;
  for (IdentityId id : ids) {
    const IdentityInfo& meta = info(id);
    for (int n : ns) {
      if (n < meta.min_n) continue;
      for (std::size_t ti = 0; ti < spec.t_grid.size(); ++ti) {
        if (meta.needs_z) {
          for (std::size_t zi = 0; zi < spec.z_samples.size(); ++zi) {
            tasks.push_back({id, n, ti, zi});
          }
        } else {
          tasks.push_back({id, n, ti, std::nullopt});
        }
      }
    }
  }
  std::vector<IdentityReport> out(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) {
    const Task& task = tasks[i];
    const Real& t = spec.t_grid[task.t_index];
    if (info(task.id).needs_derivative && single_t) {
      IdentityReport rep;
      rep.id = task.id;
      rep.tier = info(task.id).tier;
      rep.n = task.n;
      rep.t = t;
      rep.lhs_scale = Real(0);
      rep.residual = Real(0);
      rep.status = CheckStatus::Skipped;
      rep.message = "derivative stencil needs more than one t in the grid";
      out[i] = std::move(rep);
      return;
    }
    std::optional<Real> z;
    if (task.z_index) z = spec.z_samples[*task.z_index];
    out[i] = check(task.id, ws, task.n, t, z);
  });
  return out;
}

std::vector<Real> sample_z(const ModelParams& params, std::uint64_t seed,
                           int count) {
  PrecisionScope scope(params.precision_bits);
  std::mt19937_64 gen(seed);
  const bool avoid_k = sign(params.k2) >= 0;
  const double k = avoid_k ? std::sqrt(params.k2.to_double()) : 0.0;
  std::vector<Real> out;
  for (int attempts = 0;
       static_cast<int>(out.size()) < count && attempts < 100000;
       ++attempts) {
    // 53 random bits -> [0, 1), independent of the library's distributions.
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const double z = -0.95 + 1.9 * u;
    if (avoid_k && (std::abs(z - k) < 0.05 || std::abs(z + k) < 0.05)) {
      continue;
    }
    out.emplace_back(z);
  }
  if (static_cast<int>(out.size()) < count) {
    throw Error(ErrorCode::InvalidArgument,
                "could not place " + std::to_string(count) + " z samples");
  }
  return out;
}

FactorSplit factor_split(Workspace& ws, int n, const Real& t) {
  if (iszero(ws.params().k2)) {
    throw Error(ErrorCode::SingularParams, "factor split needs k2 != 0");
  }
  if (n < 1) {
    throw Error(ErrorCode::IndexError, "factor split needs n >= 1");
  }
  PrecisionScope scope(ws.context().bits);
  const Stencil s = ws.stencil(t);
  const Differences d{s, 0, 4, s.h};
  const View v(d.center(), n);
  const Real& K = v.K;
  const Real& al = v.alpha;
  const Real& m = v.m;
  const Real& R = v.R(n);
  const Real& r = v.r(n);
  if (!isfinite(R) || !isfinite(r)) {
    throw Error(ErrorCode::NoConvergence, "R_n or r_n is not finite");
  }
  const auto j = static_cast<std::size_t>(n);
  const Real dR = d.d1([j](const TimePoint& p) { return p.ladder.R[j]; });
  FactorSplit out;
  out.riccati = 2 * v.t * R + 2 * K * (n + al + 1) * R + K * square(R) -
                2 * r * (m + R) + 2 * v.t * m - 2 * K * v.t * dR;
  out.algebraic = 2 * m * (2 * v.t - r) * r +
                  (2 * v.t * r + 2 * K * n * r + 2 * K * al * r - square(r) -
                   2 * K * n * v.t) *
                      R;
  // Regrouped: the Riccati factor as 2k^2 t (F_R/(2k^2 t) - R'), the
  // algebraic one collected by powers of r.
  const RiccatiTerms f = riccati_rhs(K, v.t, al, n, R, r);
  const Real first = f.f_R - 2 * K * v.t * dR;
  const Real second = -(2 * m + R) * square(r) +
                      (4 * m * v.t + 2 * v.t * R + 2 * K * (n + al) * R) * r -
                      2 * K * n * v.t * R;
  out.product_lhs = first * second;
  return out;
}

FactorSplit factor_split(const ModelParams& params, const PrecisionContext& ctx,
                         int n, const Real& t) {
  Workspace ws(params, ctx);
  return factor_split(ws, n, t);
}

EliminationCheck riccati_elimination(Workspace& ws, int n, const Real& t) {
  if (iszero(ws.params().k2)) {
    throw Error(ErrorCode::SingularParams, "elimination needs k2 != 0");
  }
  PrecisionScope scope(ws.context().bits);
  const Stencil s = ws.stencil(t);
  const Differences d{s, 0, 4, s.h};
  const View v(d.center(), n);
  const Real& K = v.K;
  const Real& tt = v.t;
  const Real& al = v.alpha;
  const Real& m = v.m;
  const Real& R = v.R(n);
  const auto j = static_cast<std::size_t>(n);
  auto R_of = [j](const TimePoint& p) { return p.ladder.R[j]; };
  const Real dR = d.d1(R_of);
  const Real d2R = d.d2(R_of);
  // r from the R' equation: N / (2(m + R)).
  const Real c = 2 * (K * (n + al + 1) + tt);
  const Real N = c * R + K * square(R) + 2 * m * tt - 2 * K * tt * dR;
  const Real D = 2 * (m + R);
  const Real r = N / D;
  const Real dN = 2 * R + c * dR + 2 * K * R * dR + 2 * m -
                  2 * K * dR - 2 * K * tt * d2R;
  const Real dD = 2 * dR;
  const Real dr = (dN * D - N * dD) / square(D);
  const RiccatiTerms f = riccati_rhs(K, tt, al, n, R, r);
  const Measurement elim = equation(2 * K * tt * dr, f.f_r);
  const IdentityReport ode = check(ODE_RN, ws, n, t);
  return {elim.residual, ode.residual};
}

}  // namespace pv5
