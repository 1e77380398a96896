#pragma once

// Double-exponential (tanh-sinh) quadrature at configurable precision.
//
// Abscissae are x_k = tanh(pi/2 sinh(k h)) with h = 2^-level; every level
// reuses the nodes of the previous one, so successive refinements cost one
// new batch of function values each. Nodes carry 1 - |x| separately so that
// integrands with endpoint singularities or endpoint zeros keep full
// relative accuracy.

#include <array>
#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "pv5/real.hpp"
#include "pv5/weight_model.hpp"

namespace pv5 {

struct PrecisionContext {
  int bits = kDefaultPrecisionBits;
  Real rel_tol;
  int max_level = 12;
};

inline constexpr int kMaxQuadratureLevel = 16;

// max(1e-40, 2^(16 - bits)).
Real default_rel_tol(int bits);
PrecisionContext make_context(int bits = kDefaultPrecisionBits,
                              int max_level = 12);
// Throws InvalidArgument when rel_tol < 2^(16 - bits) or max_level > 16.
PrecisionContext make_context(int bits, const Real& rel_tol, int max_level);

struct IntegralResult {
  Real value;
  Real error_estimate;  // |S_L - S_{L-1}| at the final level L
  Real l1_norm;         // integral of |f|, the scale rel_tol applies to
  int level = 0;
  bool converged = false;
};

// Reference nodes on [0, 1) for the s >= 0 half of the tanh-sinh rule.
struct TanhSinhNode {
  Real x;
  Real complement;  // 1 - x
  Real weight;      // pi/2 cosh(s) / cosh^2(pi/2 sinh s)
};

class TanhSinhTable {
 public:
  // Shared, lazily refined table for one precision.
  static std::shared_ptr<TanhSinhTable> instance(int bits);

  explicit TanhSinhTable(int bits);

  int bits() const noexcept { return bits_; }
  // Nodes first used at `level`. Level 0 includes s = 0 (listed first).
  std::span<const TanhSinhNode> level_nodes(int level) const;
  Real step(int level) const;  // 2^-level

 private:
  void ensure_level(int level) const;

  int bits_;
  Real s_max_;
  mutable std::mutex mutex_;
  mutable std::atomic<int> built_{-1};
  mutable std::array<std::vector<TanhSinhNode>, kMaxQuadratureLevel + 1>
      levels_;
};

// A point handed to a generic integrand.
struct Abscissa {
  const Interval* interval;
  Real z;
  Real d_lo;  // z - interval->lo
  Real d_hi;  // interval->hi - z
};

using Integrand = std::function<Real(const Abscissa&)>;

// Sum of per-interval integrals. Never throws on non-convergence: the result
// carries the flag and callers decide.
IntegralResult integrate(const Integrand& f, const Support& support,
                         const PrecisionContext& ctx);
IntegralResult integrate(const std::function<Real(const Real&)>& f,
                         const Support& support, const PrecisionContext& ctx);

// Support intervals split where the weight has an interior essential zero
// (k^2 = 0, t > 0 vanishes to all orders at z = 0).
Support integration_intervals(const ModelParams& params);

// mu_j = integral of z^j w(z). Odd j returns exactly 0. Throws NoConvergence.
Real moment(int j, const ModelParams& params, const PrecisionContext& ctx);

// The weight discretised once on the tanh-sinh grid. Integrals of g(y) w(y)
// become weighted sums over cached nodes; the refinement level is chosen when
// the rule is built, from a set of probe integrands representative of the
// quantities computed downstream (polynomials up to degree 2 n_max + 2 and
// the 1/(1-y^2), 1/(y^2-k^2), 1/(y^2-k^2)^2 kernels).
class WeightedRule {
 public:
  struct Node {
    WeightPoint point;
    Real mass;  // tanh-sinh weight * half-width * w(y); the step h is applied
                // per level
  };

  WeightedRule(const ModelParams& params, const PrecisionContext& ctx);

  const ModelParams& params() const noexcept { return params_; }
  const PrecisionContext& context() const noexcept { return ctx_; }
  int top_level() const noexcept { return top_level_; }
  bool probes_converged() const noexcept { return probes_converged_; }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  // g(node_index) -> Real, the non-weight factor of the integrand.
  template <class G>
  IntegralResult integrate(G&& g) const {
    PrecisionScope scope(ctx_.bits);
    IntegralResult result;
    Real sum(0), sum_abs(0), prev(0);
    std::size_t i = 0;
    for (int level = 0; level <= top_level_; ++level) {
      for (; i < level_end_[static_cast<std::size_t>(level)]; ++i) {
        const Real v = nodes_[i].mass * g(i);
        sum_abs += abs(v);
        sum += v;
      }
      const Real h = steps_[static_cast<std::size_t>(level)];
      const Real current = sum * h;
      if (level == top_level_) {
        result.error_estimate = abs(current - prev);
        result.value = current;
        result.l1_norm = sum_abs * h;
        result.level = level;
      }
      prev = current;
    }
    result.converged = result.error_estimate <= ctx_.rel_tol * result.l1_norm;
    return result;
  }

 private:
  void add_level(int level, const Support& intervals);
  bool probes_settled(int level);

  ModelParams params_;
  PrecisionContext ctx_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> level_end_;
  std::vector<Real> steps_;
  int top_level_ = 0;
  bool probes_converged_ = false;
};

}  // namespace pv5
