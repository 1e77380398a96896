#include "pv5/ode.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "pv5/errors.hpp"
#include "pv5/verify.hpp"

namespace pv5 {

namespace {

constexpr long kMaxSteps = 2000000;
constexpr double kGrowthLimit = 1e40;
constexpr double kPoleDistance = 1e-8;

// Dormand-Prince 5(4) tableau.
struct Tableau {
  std::array<Real, 7> c;
  std::array<std::array<Real, 6>, 7> a;
  std::array<Real, 7> b;  // fifth order, equal to the last row of a
  std::array<Real, 7> e;  // fifth minus fourth order weights
};

Real q(long num, long den) { return Real(num) / den; }

Tableau make_tableau() {
  Tableau t;
  t.c = {Real(0), q(1, 5), q(3, 10), q(4, 5), q(8, 9), Real(1), Real(1)};
  for (auto& row : t.a) row.fill(Real(0));
  t.a[1][0] = q(1, 5);
  t.a[2] = {q(3, 40), q(9, 40), Real(0), Real(0), Real(0), Real(0)};
  t.a[3] = {q(44, 45), q(-56, 15), q(32, 9), Real(0), Real(0), Real(0)};
  t.a[4] = {q(19372, 6561), q(-25360, 2187), q(64448, 6561), q(-212, 729),
            Real(0), Real(0)};
  t.a[5] = {q(9017, 3168), q(-355, 33), q(46732, 5247), q(49, 176),
            q(-5103, 18656), Real(0)};
  t.a[6] = {q(35, 384), Real(0), q(500, 1113), q(125, 192), q(-2187, 6784),
            q(11, 84)};
  t.b = {q(35, 384), Real(0), q(500, 1113), q(125, 192), q(-2187, 6784),
         q(11, 84), Real(0)};
  const std::array<Real, 7> b4 = {q(5179, 57600), Real(0), q(7571, 16695),
                                  q(393, 640),    q(-92097, 339200),
                                  q(187, 2100),   q(1, 40)};
  for (std::size_t i = 0; i < 7; ++i) t.e[i] = t.b[i] - b4[i];
  return t;
}

bool finite_state(const State2& y) {
  return isfinite(y[0]) && isfinite(y[1]);
}

void check_state(const Real& t, const State2& y) {
  if (!finite_state(y) || abs(y[0]) > kGrowthLimit ||
      abs(y[1]) > kGrowthLimit) {
    throw Error(ErrorCode::PoleHit,
                "solution blows up near t = " + t.to_string(17));
  }
}

Real riccati_den(const ModelParams& p, const Real& t) {
  return 2 * p.k2 * t;
}

void require_ode_params(const ModelParams& params, int n, const Real& t0,
                        const Real& t1) {
  require_ladder_eligible(params);
  if (iszero(params.k2)) {
    throw Error(ErrorCode::SingularParams, "the equations divide by k^2");
  }
  if (n < 0) {
    throw Error(ErrorCode::IndexError, "n must be >= 0");
  }
  if (!(sign(t0) > 0) || !(sign(t1) > 0)) {
    throw Error(ErrorCode::InvalidArgument,
                "the integration interval must lie in t > 0");
  }
}

}  // namespace

State2 Trajectory::at(const Real& t) const {
  PrecisionScope scope(params.precision_bits);
  if (t_points.empty() || t < t_points.front() || t > t_points.back()) {
    throw Error(ErrorCode::InvalidArgument,
                "t = " + t.to_string(12) + " outside the trajectory");
  }
  auto it = std::lower_bound(t_points.begin(), t_points.end(), t);
  auto k = static_cast<std::size_t>(it - t_points.begin());
  if (t_points[k] == t) return values[k];
  const std::size_t j = k - 1;
  const Real h = t_points[k] - t_points[j];
  const Real s = (t - t_points[j]) / h;
  const Real s2 = square(s);
  const Real s3 = s2 * s;
  const Real h00 = 2 * s3 - 3 * s2 + 1;
  const Real h10 = s3 - 2 * s2 + s;
  const Real h01 = -2 * s3 + 3 * s2;
  const Real h11 = s3 - s2;
  State2 y;
  for (std::size_t i = 0; i < 2; ++i) {
    y[i] = h00 * values[j][i] + h10 * h * slopes[j][i] +
           h01 * values[k][i] + h11 * h * slopes[k][i];
  }
  return y;
}

Trajectory integrate_system(const Rhs2& f, const Real& t0, const Real& t1,
                            const State2& y0, const Real& tol,
                            const Guard2& guard) {
  if (!(sign(tol) > 0)) {
    throw Error(ErrorCode::InvalidArgument, "tol must be > 0");
  }
  if (!finite_state(y0)) {
    throw Error(ErrorCode::InvalidArgument, "initial state is not finite");
  }
  static thread_local std::map<mpfr_prec_t, Tableau> tableaus;
  const mpfr_prec_t bits = working_precision();
  auto found = tableaus.find(bits);
  if (found == tableaus.end()) {
    found = tableaus.emplace(bits, make_tableau()).first;
  }
  const Tableau& tb = found->second;

  Trajectory traj;
  traj.params.precision_bits = static_cast<int>(bits);
  traj.tol = tol;
  traj.t_points.push_back(t0);
  traj.values.push_back(y0);
  traj.slopes.push_back(f(t0, y0));
  traj.stats.min_step = abs(t1 - t0);
  if (t0 == t1) return traj;

  const int dir = t1 > t0 ? 1 : -1;
  const Real span = abs(t1 - t0);
  const Real floor_step = 1e-30_r * max(Real(1), max(abs(t0), abs(t1)));

  // Starting step from the scale of y and y'.
  Real d0(0), d1(0);
  for (std::size_t i = 0; i < 2; ++i) {
    const Real sc = tol + tol * abs(y0[i]);
    d0 = max(d0, abs(y0[i]) / sc);
    d1 = max(d1, abs(traj.slopes[0][i]) / sc);
  }
  Real h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6_r * span : 0.01_r * d0 / d1;
  h = min(h, span);

  Real t = t0;
  State2 y = y0;
  State2 dy = traj.slopes[0];
  std::array<State2, 7> k;
  bool last_rejected = false;
  auto finish = [&] {
    if (dir < 0) {
      std::reverse(traj.t_points.begin(), traj.t_points.end());
      std::reverse(traj.values.begin(), traj.values.end());
      std::reverse(traj.slopes.begin(), traj.slopes.end());
    }
  };
  try {
    while (dir * (t1 - t) > 0) {
      if (traj.stats.steps + traj.stats.rejected > kMaxSteps) {
        throw Error(ErrorCode::StepUnderflow,
                    "step budget exhausted at t = " + t.to_string(17));
      }
      bool final_step = false;
      if (h >= abs(t1 - t)) {
        h = abs(t1 - t);
        final_step = true;
      }
      if (h < floor_step) {
        throw Error(ErrorCode::StepUnderflow,
                    "step " + h.to_string(6) + " underflows at t = " +
                        t.to_string(17));
      }
      const Real hs = dir * h;
      k[0] = dy;
      bool stages_finite = true;
      State2 y_new;
      for (std::size_t s = 1; s < 7 && stages_finite; ++s) {
        State2 ys;
        for (std::size_t i = 0; i < 2; ++i) {
          Real acc(0);
          for (std::size_t j = 0; j < s; ++j) {
            if (!iszero(tb.a[s][j])) acc += tb.a[s][j] * k[j][i];
          }
          ys[i] = y[i] + hs * acc;
        }
        if (s == 6) y_new = ys;
        if (!finite_state(ys)) {
          stages_finite = false;
          break;
        }
        k[s] = f(t + tb.c[s] * hs, ys);
        stages_finite = finite_state(k[s]);
      }
      double err = HUGE_VAL;
      if (stages_finite) {
        Real worst(0);
        for (std::size_t i = 0; i < 2; ++i) {
          Real e(0);
          for (std::size_t j = 0; j < 7; ++j) {
            if (!iszero(tb.e[j])) e += tb.e[j] * k[j][i];
          }
          const Real sc = tol + tol * max(abs(y[i]), abs(y_new[i]));
          worst = max(worst, abs(hs * e) / sc);
        }
        err = worst.to_double();
      }
      if (!(err <= 1.0)) {
        ++traj.stats.rejected;
        const double fac =
            std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
        h *= Real(std::min(fac, 1.0));
        last_rejected = true;
        continue;
      }
      t = final_step ? t1 : t + hs;
      y = y_new;
      dy = k[6];
      ++traj.stats.steps;
      traj.stats.min_step = min(traj.stats.min_step, h);
      check_state(t, y);
      if (guard) guard(t, y);
      traj.t_points.push_back(t);
      traj.values.push_back(y);
      traj.slopes.push_back(dy);
      double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      h *= Real(fac);
      last_rejected = false;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PoleHit &&
        e.code() != ErrorCode::StepUnderflow) {
      throw;
    }
    finish();
    throw IntegrationHalted(e, std::move(traj));
  }
  finish();
  return traj;
}

State2 riccati_rhs(const ModelParams& params, int n, const Real& t,
                   const State2& y) {
  const Real& K = params.k2;
  const Real& al = params.alpha;
  const Real& R = y[0];
  const Real& r = y[1];
  const Real m = 2 * n + 2 * al + 1;
  const Real c = 2 * (K * (n + al + 1) + t);
  const Real den = riccati_den(params, t);
  const Real f_R = c * R - 2 * r * (m + R) + K * square(R) + 2 * m * t;
  const Real f_r = c * r - 2 * m * (square(r) - 2 * t * r) / R - square(r) -
                   2 * K * n * t;
  return {f_R / den, f_r / den};
}

State2 pv_rhs(const ModelParams& params, int n, const Real& t,
              const State2& y) {
  const Real& K = params.k2;
  const Real& phi = y[0];
  const Real& dphi = y[1];
  const Real m = 2 * n + 2 * params.alpha + 1;
  const Real gamma = square(m) / 8;
  const Real delta = Real(-1) / 8;
  const Real eps = -params.alpha / K;
  const Real eta = Real(-1) / (2 * square(K));
  const Real d2 =
      (3 * phi - 1) * square(dphi) / (2 * phi * (phi - 1)) - dphi / t +
      square(phi - 1) / square(t) * (gamma * phi + delta / phi) +
      eps * phi / t + eta * phi * (phi + 1) / (phi - 1);
  return {dphi, d2};
}

Trajectory integrate_riccati(const ModelParams& params, int n, const Real& t0,
                             const Real& t1, const State2& init,
                             const Real& tol) {
  require_ode_params(params, n, t0, t1);
  PrecisionScope scope(params.precision_bits);
  if (abs(init[0]) < kPoleDistance) {
    throw Error(ErrorCode::PoleHit, "R_n(t0) is at the pole R = 0");
  }
  auto label = [&](Trajectory& traj) {
    traj.system = OdeSystem::Riccati;
    traj.n = n;
    traj.params = params;
  };
  try {
    Trajectory traj = integrate_system(
        [&](const Real& t, const State2& y) {
          return riccati_rhs(params, n, t, y);
        },
        t0, t1, init, tol, [](const Real& t, const State2& y) {
          if (abs(y[0]) < kPoleDistance) {
            throw Error(ErrorCode::PoleHit,
                        "R_n reaches 0 near t = " + t.to_string(17));
          }
        });
    label(traj);
    return traj;
  } catch (IntegrationHalted& e) {
    label(e.partial());
    throw;
  }
}

Trajectory integrate_pv(const ModelParams& params, int n, const Real& t0,
                        const Real& t1, const State2& init, const Real& tol) {
  require_ode_params(params, n, t0, t1);
  PrecisionScope scope(params.precision_bits);
  auto near_pole = [](const Real& phi) {
    return abs(phi) < kPoleDistance || abs(phi - 1) < kPoleDistance;
  };
  if (near_pole(init[0])) {
    throw Error(ErrorCode::PoleHit, "Phi(t0) is at a pole of the equation");
  }
  auto label = [&](Trajectory& traj) {
    traj.system = OdeSystem::PainleveV;
    traj.n = n;
    traj.params = params;
  };
  try {
    Trajectory traj = integrate_system(
        [&](const Real& t, const State2& y) { return pv_rhs(params, n, t, y); },
        t0, t1, init, tol, [&](const Real& t, const State2& y) {
          if (near_pole(y[0])) {
            throw Error(ErrorCode::PoleHit,
                        "Phi_n reaches 0 or 1 near t = " + t.to_string(17));
          }
        });
    label(traj);
    return traj;
  } catch (IntegrationHalted& e) {
    label(e.partial());
    throw;
  }
}

State2 riccati_initial(const ModelParams& params, const PrecisionContext& ctx,
                       int n, const Real& t0) {
  ModelParams p = params;
  p.n_max = std::max({1, n, p.n_max});
  Workspace ws(p, ctx);
  const auto point = ws.at(t0);
  const auto j = static_cast<std::size_t>(n);
  return {point->ladder.R[j], point->ladder.r[j]};
}

State2 pv_initial(const ModelParams& params, const PrecisionContext& ctx,
                  int n, const Real& t0) {
  ModelParams p = params;
  p.n_max = std::max({1, n, p.n_max});
  Workspace ws(p, ctx);
  PrecisionScope scope(ctx.bits);
  const Stencil s = ws.stencil(t0);
  const auto j = static_cast<std::size_t>(n);
  const Real m = 2 * n + 2 * p.alpha + 1;
  const Real& R = s.points[2]->ladder.R[j];
  const Real dR = (s.points[4]->ladder.R[j] - s.points[0]->ladder.R[j]) /
                  (2 * s.h);
  return {(R + m) / m, dR / m};
}

Real crosscheck(const Trajectory& traj, const PrecisionContext& ctx,
                const std::vector<Real>& sample_ts) {
  if (traj.system == OdeSystem::Generic) {
    throw Error(ErrorCode::InvalidArgument,
                "crosscheck needs a Riccati or Painleve V trajectory");
  }
  ModelParams p = traj.params;
  p.n_max = std::max({1, traj.n, p.n_max});
  Workspace ws(p, ctx);
  PrecisionScope scope(ctx.bits);
  const auto j = static_cast<std::size_t>(traj.n);
  const Real m = 2 * traj.n + 2 * p.alpha + 1;
  Real worst(0);
  for (const Real& t : sample_ts) {
    const State2 y = traj.at(t);
    const auto point = ws.at(t);
    const Real& R = point->ladder.R[j];
    if (traj.system == OdeSystem::Riccati) {
      const Real& r = point->ladder.r[j];
      worst = max(worst, abs(y[0] - R) / (1 + abs(R)));
      worst = max(worst, abs(y[1] - r) / (1 + abs(r)));
    } else {
      const Real phi = (R + m) / m;
      worst = max(worst, abs(y[0] - phi) / (1 + abs(phi)));
    }
  }
  return worst;
}

}  // namespace pv5
