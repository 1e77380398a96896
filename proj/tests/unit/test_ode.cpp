#include "pv5/ode.hpp"

#include <cmath>

#include "pv5/verify.hpp"
#include "test_support.hpp"

using namespace pv5;
using namespace pv5::test;

namespace {

Trajectory oscillator(const Real& tol, const Real& t1 = Real(1)) {
  return integrate_system(
      [](const Real&, const State2& y) { return State2{y[1], -y[0]}; },
      Real(0), t1, State2{Real(1), Real(0)}, tol);
}

}  // namespace

TEST_CASE("zero-length interval keeps the initial state") {
  PrecisionScope scope(256);
  const Trajectory tr = oscillator(1e-10_r, Real(0));
  REQUIRE(tr.t_points.size() == 1);
  CHECK(tr.values[0][0] == 1);
  const ModelParams p = params("1", "0.04", "0.5", 3);
  const State2 init = riccati_initial(p, make_context(), 2, 0.5_r);
  const Trajectory r = integrate_riccati(p, 2, 0.5_r, 0.5_r, init, 1e-12_r);
  CHECK(r.values.front() == init);
}

TEST_CASE("cosine to tolerance with first-order tolerance slope") {
  PrecisionScope scope(256);
  std::vector<double> errs;
  for (const Real& tol : {1e-10_r, 1e-12_r, 1e-14_r}) {
    const Trajectory tr = oscillator(tol);
    const Real err = abs(tr.values.back()[0] - cos(Real(1)));
    CHECK(err <= tol);
    errs.push_back(err.to_double());
    CHECK(tr.stats.steps > 0);
    CHECK(tr.t_end() == 1);
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double slope = std::log10(errs[i - 1] / errs[i]) / 2;
    CHECK(slope > 0.7);
    CHECK(slope < 1.3);
  }
}

TEST_CASE("dense output") {
  PrecisionScope scope(256);
  // Cubic Hermite between accepted steps is fourth order in the step, so
  // it is looser than the step-end values.
  const Trajectory tr = oscillator(1e-14_r);
  for (const Real& t : {0.123_r, 0.5_r, 0.999_r}) {
    const State2 y = tr.at(t);
    CHECK(abs(y[0] - cos(t)) < 1e-10);
    CHECK(abs(y[1] + sin(t)) < 1e-10);
  }
  CHECK(error_code_of([&] { tr.at(1.5_r); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("determinism") {
  PrecisionScope scope(256);
  const Trajectory a = oscillator(1e-12_r);
  const Trajectory b = oscillator(1e-12_r);
  CHECK(a.t_points == b.t_points);
  CHECK(a.values == b.values);
}

TEST_CASE("Riccati initial data and round trip") {
  PrecisionScope scope(256);
  const PrecisionContext ctx = make_context();
  const ModelParams p = params("1", "0.04", "0.5", 3);
  const int n = 2;
  const State2 init = riccati_initial(p, ctx, n, 0.5_r);
  Workspace ws(p, ctx);
  CHECK(init[0] == ws.at(0.5_r)->ladder.R[2]);
  CHECK(init[1] == ws.at(0.5_r)->ladder.r[2]);

  const Real tol = 1e-12_r;
  const Trajectory fwd = integrate_riccati(p, n, 0.5_r, 0.51_r, init, tol);
  const Trajectory back =
      integrate_riccati(p, n, 0.51_r, 0.5_r, fwd.values.back(), tol);
  CHECK(back.t_begin() == 0.5_r);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(abs(back.values.front()[i] - init[i]) <=
          10 * tol * (1 + abs(init[i])));
  }
  CHECK(crosscheck(fwd, ctx, {0.5_r}) < 1e-30);
}

TEST_CASE("Painleve V initial data") {
  PrecisionScope scope(256);
  const PrecisionContext ctx = make_context();
  const ModelParams p = params("1", "0.09", "0.5", 3);
  const State2 phi = pv_initial(p, ctx, 1, 0.5_r);
  Workspace ws(p, ctx);
  const Real m = 2 + 2 * p.alpha + 1;
  CHECK(close(phi[0], (ws.at(0.5_r)->ladder.R[1] + m) / m, 1e-60_r));
  CHECK(isfinite(phi[1]));
}

TEST_CASE("halts and guards") {
  PrecisionScope scope(256);
  const ModelParams p = params("1", "0.04", "0.5", 3);
  const State2 init{Real(1), Real(1)};
  CHECK(error_code_of([&] {
          integrate_riccati(params("1", "0", "0.5"), 1, 0.5_r, 0.6_r, init,
                            1e-10_r);
        }) == ErrorCode::SingularParams);
  CHECK(error_code_of([&] {
          integrate_riccati(p, 1, Real(0), 0.6_r, init, 1e-10_r);
        }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([&] {
          integrate_riccati(p, 1, 0.5_r, 0.6_r, State2{Real(0), Real(1)},
                            1e-10_r);
        }) == ErrorCode::PoleHit);
  CHECK(error_code_of([&] {
          integrate_pv(p, 1, 0.5_r, 0.6_r, State2{Real(1), Real(0)},
                       1e-10_r);
        }) == ErrorCode::PoleHit);

  // y' = y^2 from y(0) = 1 blows up at t = 1.
  try {
    integrate_system(
        [](const Real&, const State2& y) {
          return State2{square(y[0]), Real(0)};
        },
        Real(0), Real(2), State2{Real(1), Real(0)}, 1e-10_r);
    FAIL("expected a halt");
  } catch (const IntegrationHalted& e) {
    CHECK((e.code() == ErrorCode::PoleHit ||
           e.code() == ErrorCode::StepUnderflow));
    const Trajectory& part = e.partial();
    REQUIRE(part.t_points.size() > 1);
    CHECK(part.t_end() < 1);
    CHECK(part.t_end() > 0.99);
    for (std::size_t i = 1; i < part.t_points.size(); ++i) {
      CHECK(part.t_points[i - 1] < part.t_points[i]);
    }
  }
}

TEST_CASE("smaller tolerance tightens the endpoint") {
  PrecisionScope scope(256);
  Real prev(1);
  for (const Real& tol : {1e-8_r, 1e-10_r, 1e-12_r, 1e-14_r}) {
    const Real err = abs(oscillator(tol).values.back()[0] - cos(Real(1)));
    CHECK(err < prev);
    prev = err;
  }
}
