#pragma once

// Initial value problems in t for the coupled Riccati system
//
//   2k^2 t r' = 2[k^2(n+a+1) + t] r - 2(2n+2a+1)(r^2 - 2tr)/R - r^2 - 2k^2 n t
//   2k^2 t R' = 2[k^2(n+a+1) + t] R - 2r(2n+2a+1+R) + k^2 R^2 + 2(2n+2a+1) t
//
// and for the Painleve V equation satisfied by Phi_n. Dormand-Prince 5(4)
// with local extrapolation, in working precision, cubic Hermite dense output.

#include <array>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "pv5/errors.hpp"
#include "pv5/quadrature.hpp"
#include "pv5/real.hpp"
#include "pv5/weight_model.hpp"

namespace pv5 {

using State2 = std::array<Real, 2>;
using Rhs2 = std::function<State2(const Real& t, const State2& y)>;
// Throws PoleHit (or anything else) to stop the integration at a state.
using Guard2 = std::function<void(const Real& t, const State2& y)>;

enum class OdeSystem { Generic, Riccati, PainleveV };

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  Real min_step;
};

struct Trajectory {
  OdeSystem system = OdeSystem::Generic;
  int n = 0;
  ModelParams params;
  Real tol;
  std::vector<Real> t_points;   // strictly increasing
  std::vector<State2> values;   // (R, r) or (Phi, Phi')
  std::vector<State2> slopes;   // y' at t_points, for the dense output
  IntegratorStats stats;

  const Real& t_begin() const { return t_points.front(); }
  const Real& t_end() const { return t_points.back(); }
  // Cubic Hermite interpolation; InvalidArgument outside the span.
  State2 at(const Real& t) const;
};

// PoleHit or StepUnderflow, together with the steps accepted before the halt.
class IntegrationHalted : public Error {
 public:
  IntegrationHalted(const Error& cause, Trajectory partial)
      : Error(cause), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }
  Trajectory& partial() noexcept { return partial_; }

 private:
  Trajectory partial_;
};

// Absolute and relative local tolerance `tol`. Halts with PoleHit when the
// state is non-finite or exceeds 1e40, StepUnderflow when the step collapses,
// both as IntegrationHalted.
Trajectory integrate_system(const Rhs2& f, const Real& t0, const Real& t1,
                            const State2& y0, const Real& tol,
                            const Guard2& guard = {});

// Needs t0 > 0 and k2 != 0 (SingularParams). PoleHit when |R_n| < 1e-8.
Trajectory integrate_riccati(const ModelParams& params, int n, const Real& t0,
                             const Real& t1, const State2& init,
                             const Real& tol);
// PoleHit when Phi comes within 1e-8 of 0 or 1.
Trajectory integrate_pv(const ModelParams& params, int n, const Real& t0,
                        const Real& t1, const State2& init, const Real& tol);

State2 riccati_rhs(const ModelParams& params, int n, const Real& t,
                   const State2& y);
State2 pv_rhs(const ModelParams& params, int n, const Real& t,
              const State2& y);

// Initial data from quadrature: (R_n, r_n) at t0, and (Phi_n, Phi_n') with
// Phi_n' by central difference of R_n.
State2 riccati_initial(const ModelParams& params, const PrecisionContext& ctx,
                       int n, const Real& t0);
State2 pv_initial(const ModelParams& params, const PrecisionContext& ctx,
                  int n, const Real& t0);

// Max over sample_ts of |y - y_quad| / (1 + |y_quad|) per component, the
// quadrature side rebuilt at every sample.
Real crosscheck(const Trajectory& traj, const PrecisionContext& ctx,
                const std::vector<Real>& sample_ts);

}  // namespace pv5
