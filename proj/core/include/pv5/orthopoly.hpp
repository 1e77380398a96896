#pragma once

// Monic orthogonal polynomials for the weight, built by the Stieltjes
// procedure on the discretised weight.
//
// For an even weight the recurrence is zP_n = P_{n+1} + beta_n P_{n-1}; the
// polynomials are evaluated once on every quadrature node and kept, so later
// inner products (ladder quantities, identity checks) are plain weighted sums.

#include <memory>
#include <vector>

#include "pv5/quadrature.hpp"
#include "pv5/real.hpp"
#include "pv5/weight_model.hpp"

namespace pv5 {

struct OrthoState {
  ModelParams params;
  std::vector<Real> h;      // h[n], 0 <= n <= n_max
  std::vector<Real> beta;   // beta[n], beta[0] = 0
  std::vector<Real> p_sub;  // p(n, t), 0 <= n <= n_max + 1
  // max_n |int z P_n^2 w| / h_n; zero for an exactly even weight.
  Real symmetry_defect;
  std::shared_ptr<const WeightedRule> rule;
  // values[n][i] = P_n(y_i) on the rule nodes.
  std::vector<std::vector<Real>> values;

  int n_max() const noexcept { return params.n_max; }
};

// Throws NoConvergence when the rule cannot resolve the probe integrands and
// PrecisionExhausted when some h_n carries no significant digits.
OrthoState build_ortho(const ModelParams& params, const PrecisionContext& ctx);
// Reuses an existing rule (same params and context).
OrthoState build_ortho(std::shared_ptr<const WeightedRule> rule);

Real eval_monic(const OrthoState& s, int n, const Real& z);
Real eval_monic_derivative(const OrthoState& s, int n, const Real& z);
// P_0..P_n and P'_0..P'_n at z in one pass.
void eval_monic_all(const OrthoState& s, int n, const Real& z,
                    std::vector<Real>& p, std::vector<Real>* dp = nullptr);

// |int P_m P_n w| / sqrt(h_m h_n). Exactly 0 when m + n is odd.
Real orthogonality_residual(const OrthoState& s, int m, int n);

// p(n, t) = -(1/h_{n-2}) int z^n P_{n-2} w, a route independent of the
// recurrence; 0 for n < 2.
Real p_sub_by_quadrature(const OrthoState& s, int n);

// Coefficients of P_n, lowest degree first, from the recurrence.
std::vector<Real> monomial_coefficients(const OrthoState& s, int n);

}  // namespace pv5
