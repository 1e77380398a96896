#include "pv5/quadrature.hpp"

#include <map>
#include <string>

#include "pv5/errors.hpp"

namespace pv5 {

namespace {

constexpr int kMinLevel = 3;

template <class Visit>
void for_each_abscissa(const Interval& iv, const TanhSinhNode& node,
                       Visit&& visit) {
  const Real c = (iv.hi - iv.lo) / 2;
  const Real scaled = c * node.weight;
  if (iszero(node.x)) {
    visit(Abscissa{&iv, (iv.hi + iv.lo) / 2, c, c}, scaled);
    return;
  }
  const Real near = c * node.complement;
  const Real far = 2 * c - near;
  visit(Abscissa{&iv, iv.hi - near, far, near}, scaled);
  visit(Abscissa{&iv, iv.lo + near, near, far}, scaled);
}

}  // namespace

Real default_rel_tol(int bits) {
  PrecisionScope scope(bits);
  const Real floor = ldexp(Real(1), 16 - bits);
  return max(1e-40_r, floor);
}

PrecisionContext make_context(int bits, int max_level) {
  PrecisionScope scope(bits);
  return make_context(bits, default_rel_tol(bits), max_level);
}

PrecisionContext make_context(int bits, const Real& rel_tol, int max_level) {
  if (bits < 64) {
    throw Error(ErrorCode::InvalidArgument,
                "bits must be >= 64, got " + std::to_string(bits));
  }
  if (max_level < kMinLevel || max_level > kMaxQuadratureLevel) {
    throw Error(ErrorCode::InvalidArgument,
                "max_level must be in [3, 16], got " +
                    std::to_string(max_level));
  }
  PrecisionScope scope(bits);
  const Real floor = ldexp(Real(1), 16 - bits);
  if (!(rel_tol >= floor)) {
    throw Error(ErrorCode::InvalidArgument,
                "rel_tol " + rel_tol.to_string(6) + " is below 2^(16-bits) = " +
                    floor.to_string(6));
  }
  return PrecisionContext{bits, with_precision(rel_tol, bits), max_level};
}

std::shared_ptr<TanhSinhTable> TanhSinhTable::instance(int bits) {
  static std::mutex registry_mutex;
  static std::map<int, std::shared_ptr<TanhSinhTable>> registry;
  std::lock_guard<std::mutex> lock(registry_mutex);
  auto& slot = registry[bits];
  if (!slot) slot = std::make_shared<TanhSinhTable>(bits);
  return slot;
}

TanhSinhTable::TanhSinhTable(int bits) : bits_(bits) {
  PrecisionScope scope(bits);
  // Beyond s_max the complement 1 - x drops below 2^-(bits + 2), far past
  // anything that can contribute at this precision.
  const Real u_max = (bits + 2) * log(Real(2));
  s_max_ = asinh(2 * u_max / pi());
}

Real TanhSinhTable::step(int level) const {
  PrecisionScope scope(bits_);
  return ldexp(Real(1), -level);
}

std::span<const TanhSinhNode> TanhSinhTable::level_nodes(int level) const {
  if (level < 0 || level > kMaxQuadratureLevel) {
    throw Error(ErrorCode::InvalidArgument,
                "quadrature level out of range: " + std::to_string(level));
  }
  ensure_level(level);
  return levels_[static_cast<std::size_t>(level)];
}

void TanhSinhTable::ensure_level(int level) const {
  if (built_.load(std::memory_order_acquire) >= level) return;
  std::lock_guard<std::mutex> lock(mutex_);
  PrecisionScope scope(bits_);
  const Real half_pi = pi() / 2;
  for (int l = built_.load(std::memory_order_relaxed) + 1; l <= level; ++l) {
    auto& out = levels_[static_cast<std::size_t>(l)];
    const Real h = ldexp(Real(1), -l);
    // Level 0 takes every integer multiple of h, later levels the odd ones.
    const long stride = l == 0 ? 1 : 2;
    for (long k = l == 0 ? 0 : 1;; k += stride) {
      const Real s = h * k;
      if (s > s_max_) break;
      const Real u = half_pi * sinh(s);
      const Real e = exp(-2 * u);
      const Real ch = cosh(u);
      TanhSinhNode node{tanh(u), 2 * e / (1 + e),
                        half_pi * cosh(s) / square(ch)};
      if (k == 0) {
        node.x = Real(0);
        node.complement = Real(1);
      }
      out.push_back(std::move(node));
    }
    built_.store(l, std::memory_order_release);
  }
}

IntegralResult integrate(const Integrand& f, const Support& support,
                         const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.bits);
  auto table = TanhSinhTable::instance(ctx.bits);
  IntegralResult result;
  Real sum(0), sum_abs(0), prev(0);
  for (int level = 0; level <= ctx.max_level; ++level) {
    for (const Interval& iv : support.intervals) {
      for (const TanhSinhNode& node : table->level_nodes(level)) {
        for_each_abscissa(iv, node, [&](const Abscissa& a, const Real& w) {
          const Real v = w * f(a);
          sum_abs += abs(v);
          sum += v;
        });
      }
    }
    const Real h = table->step(level);
    const Real current = sum * h;
    result.value = current;
    result.l1_norm = sum_abs * h;
    result.level = level;
    if (level > 0) {
      result.error_estimate = abs(current - prev);
      if (level >= kMinLevel &&
          result.error_estimate <= ctx.rel_tol * result.l1_norm) {
        result.converged = true;
        return result;
      }
    }
    prev = current;
  }
  return result;
}

IntegralResult integrate(const std::function<Real(const Real&)>& f,
                         const Support& support, const PrecisionContext& ctx) {
  return integrate([&f](const Abscissa& a) { return f(a.z); }, support, ctx);
}

Support integration_intervals(const ModelParams& params) {
  Support s = support(params);
  if (iszero(params.k2) && sign(params.t) > 0) {
    PrecisionScope scope(params.precision_bits);
    return Support{{Interval{Real(-1), Real(0)}, Interval{Real(0), Real(1)}}};
  }
  return s;
}

Real moment(int j, const ModelParams& params, const PrecisionContext& ctx) {
  if (j < 0) {
    throw Error(ErrorCode::InvalidArgument,
                "moment order must be >= 0, got " + std::to_string(j));
  }
  PrecisionScope scope(ctx.bits);
  if (j % 2 == 1) return Real(0);
  const Support intervals = integration_intervals(params);
  const IntegralResult r = integrate(
      [&](const Abscissa& a) {
        const WeightPoint p = make_point(*a.interval, a.z, a.d_lo, a.d_hi,
                                         params);
        return pow(a.z, static_cast<long>(j)) * weight_at(p, params);
      },
      intervals, ctx);
  if (!r.converged) {
    throw Error(ErrorCode::NoConvergence,
                "moment " + std::to_string(j) + " estimate " +
                    r.error_estimate.to_string(6) + " at level " +
                    std::to_string(r.level));
  }
  return r.value;
}

WeightedRule::WeightedRule(const ModelParams& params,
                           const PrecisionContext& ctx)
    : params_(params), ctx_(ctx) {
  PrecisionScope scope(ctx.bits);
  const Support intervals = integration_intervals(params_);
  for (int level = 0; level <= ctx_.max_level; ++level) {
    add_level(level, intervals);
    if (level >= kMinLevel && probes_settled(level)) {
      probes_converged_ = true;
      if (level < ctx_.max_level) add_level(level + 1, intervals);
      break;
    }
  }
  top_level_ = static_cast<int>(level_end_.size()) - 1;
}

void WeightedRule::add_level(int level, const Support& intervals) {
  auto table = TanhSinhTable::instance(ctx_.bits);
  for (const Interval& iv : intervals.intervals) {
    for (const TanhSinhNode& node : table->level_nodes(level)) {
      for_each_abscissa(iv, node, [&](const Abscissa& a, const Real& w) {
        WeightPoint p = make_point(iv, a.z, a.d_lo, a.d_hi, params_);
        Real mass = w * weight_at(p, params_);
        nodes_.push_back(Node{std::move(p), std::move(mass)});
      });
    }
  }
  level_end_.push_back(nodes_.size());
  steps_.push_back(table->step(level));
}

bool WeightedRule::probes_settled(int level) {
  const int saved = top_level_;
  top_level_ = level;
  const long degree = 2L * (params_.n_max + 2);
  bool ok = integrate([](std::size_t) { return Real(1); }).converged &&
            integrate([&](std::size_t i) {
              return pow(nodes_[i].point.z, degree);
            }).converged;
  if (ok && sign(params_.alpha) > 0) {
    ok = integrate([&](std::size_t i) {
           const auto& p = nodes_[i].point;
           return 1 / (p.one_minus_z * p.one_plus_z);
         }).converged;
  }
  if (ok && sign(params_.t) > 0) {
    ok = integrate([&](std::size_t i) {
           return 1 / nodes_[i].point.z2_minus_k2;
         }).converged &&
         integrate([&](std::size_t i) {
           return 1 / square(nodes_[i].point.z2_minus_k2);
         }).converged;
  }
  top_level_ = saved;
  return ok;
}

}  // namespace pv5
