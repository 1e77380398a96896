#pragma once

// Residual checks for the ladder-operator identities and everything derived
// from them, down to the Painleve V equation for Phi_n(t).
//
// REQUIRED checks hold for any smooth weight vanishing at the ends of its
// support and must pass. DIAGNOSTIC checks are steps that were obtained by
// comparing coefficients or by letting k -> 0; their residuals are recorded
// and only trends are asserted.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pv5/errors.hpp"
#include "pv5/ladder.hpp"
#include "pv5/orthopoly.hpp"
#include "pv5/quadrature.hpp"
#include "pv5/real.hpp"

namespace pv5 {

enum class IdentityId {
  // Functional identities at sampled z.
  S1_FUNC,
  S2_FUNC,
  S2P_FUNC,
  LOWER_FUNC,
  RAISE_FUNC,
  A_FORM,
  B_FORM,
  // t-derivatives.
  DLNH,
  DBETA,
  DP,
  // Sum rules of the recurrence.
  BETA_ROUTES,
  P_TELESCOPE,
  // Coefficient identities.
  C_S1_B,
  C_S1_R,
  C_S2_B,
  C_S2_R,
  C_S2_MIX,
  YJ3,
  YJ4,
  TELE_SUM,
  Q1,
  Q2,
  Q3,
  Q4,
  Q5,
  Q6,
  Q7,
  QP1,
  QP2,
  QP3,
  QP4,
  QP5,
  QP6,
  QP7,
  Q3_QP3_WITNESS,
  ZHU232,
  BETA_EXPR,
  RIC_R,
  RIC_BIGR,
  FACTOR_PROD,
  ODE_RN,
  PV_PHI,
};

enum class Tier { Required, Diagnostic };
enum class CheckStatus { Ok, Skipped, Error };

struct IdentityInfo {
  IdentityId id;
  std::string_view name;
  Tier tier;
  bool needs_z;           // evaluated at sampled z
  bool needs_derivative;  // uses the t stencil
  bool needs_k2;          // carries 1/k^2; SingularParams at k2 = 0
  int min_n;              // smallest admissible n
  bool needs_next;        // references index n + 1
  double threshold;       // REQUIRED only; 0 means "10 rel_tol"
};

const std::vector<IdentityInfo>& identity_registry();
const IdentityInfo& info(IdentityId id);
std::string_view to_string(IdentityId id);
std::optional<IdentityId> parse_identity(std::string_view name);
std::string_view to_string(Tier tier);
std::string_view to_string(CheckStatus status);

struct IdentityReport {
  IdentityId id;
  Tier tier;
  int n = 0;
  Real t;
  std::optional<Real> z;
  Real lhs_scale;
  Real residual;
  std::optional<Real> residual_half_step;  // derivative checks only
  std::optional<bool> pass;                // REQUIRED and evaluated only
  CheckStatus status = CheckStatus::Ok;
  std::optional<ErrorCode> error;  // set when status is Error
  std::string message;
};

// Everything computed at one t: polynomials, ladder arrays, and p(n) by the
// quadrature route.
struct TimePoint {
  OrthoState ortho;
  LadderState ladder;
  std::vector<Real> p_quad;  // p(n) for 0 <= n <= n_max + 1
};

// Central-difference stencil t - h, t - h/2, t, t + h/2, t + h.
struct Stencil {
  Real t;
  Real h;
  std::array<std::shared_ptr<const TimePoint>, 5> points;
};

// h = 1e-6 max(t, 1).
Real derivative_step(const Real& t);

// Caches TimePoints by t and ladder functions by (t, z). Thread-safe; every
// entry is computed once.
class Workspace {
 public:
  // `params.n_max` is the largest index that checks may reference.
  Workspace(const ModelParams& params, const PrecisionContext& ctx);

  const ModelParams& params() const noexcept { return params_; }
  const PrecisionContext& context() const noexcept { return ctx_; }

  std::shared_ptr<const TimePoint> at(const Real& t);
  // Throws InvalidArgument when t - h <= 0.
  Stencil stencil(const Real& t);
  std::shared_ptr<const LadderFunctions> functions(const Real& t,
                                                   const Real& z);

 private:
  template <class V>
  struct Slot {
    std::once_flag once;
    std::shared_ptr<const V> value;
    std::exception_ptr error;
  };
  template <class V, class F>
  std::shared_ptr<const V> cached(
      std::map<std::string, std::shared_ptr<Slot<V>>>& table,
      const std::string& key, F&& make);

  ModelParams params_;
  PrecisionContext ctx_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot<TimePoint>>> points_;
  std::map<std::string, std::shared_ptr<Slot<LadderFunctions>>> functions_;
};

// One check. z is required for the *_FUNC ids and ignored otherwise. Errors
// are reported through status/message, never thrown.
IdentityReport check(IdentityId id, Workspace& ws, int n, const Real& t,
                     const std::optional<Real>& z = std::nullopt);
IdentityReport check(IdentityId id, const ModelParams& params,
                     const PrecisionContext& ctx, int n, const Real& t,
                     const std::optional<Real>& z = std::nullopt);

struct SuiteSpec {
  std::vector<IdentityId> ids;
  std::vector<int> n_set;
  std::vector<Real> t_grid;
  std::vector<Real> z_samples;
};

std::vector<IdentityId> ids_for_tier(std::optional<Tier> tier);

// Cartesian product of applicable checks ordered by (id, n, t, z). The
// workspace is built with n_max = max(n_set) + 1 so that checks referencing
// n + 1 are available for every requested n. With a single t the derivative
// checks are reported as SKIPPED.
std::vector<IdentityReport> check_suite(const ModelParams& params,
                                        const PrecisionContext& ctx,
                                        const SuiteSpec& spec);

// Deterministic interior samples in [-0.95, 0.95], at least 0.05 away from
// +-1 and from +-sqrt(k2) when k2 >= 0.
std::vector<Real> sample_z(const ModelParams& params, std::uint64_t seed,
                           int count = 20);

// The two bracketed factors of the product equation that precedes the
// Riccati equation for R_n'. The first is the Riccati factor.
struct FactorSplit {
  Real riccati;
  Real algebraic;
  Real product_lhs;  // the product re-evaluated by expanding both brackets
};
FactorSplit factor_split(const ModelParams& params, const PrecisionContext& ctx,
                         int n, const Real& t);
FactorSplit factor_split(Workspace& ws, int n, const Real& t);

// Eliminates r_n between the two Riccati equations: r_n from the R_n'
// equation, then the r_n' equation's residual, set beside the ODE_RN residual.
struct EliminationCheck {
  Real eliminated_residual;
  Real ode_rn_residual;
};
EliminationCheck riccati_elimination(Workspace& ws, int n, const Real& t);

}  // namespace pv5
