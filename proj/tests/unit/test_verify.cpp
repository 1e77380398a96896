#include "pv5/verify.hpp"

#include <set>

#include "test_support.hpp"

using namespace pv5;
using namespace pv5::test;
using enum IdentityId;

TEST_CASE("registry follows the enum") {
  const auto& reg = identity_registry();
  REQUIRE(reg.size() == static_cast<std::size_t>(PV_PHI) + 1);
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    CHECK(static_cast<std::size_t>(reg[i].id) == i);
    CHECK(names.insert(reg[i].name).second);
    CHECK(parse_identity(reg[i].name) == reg[i].id);
    if (reg[i].tier == Tier::Required) {
      CHECK(reg[i].threshold >= 0);
      CHECK_FALSE(reg[i].needs_k2);
    }
  }
  CHECK_FALSE(parse_identity("S3_FUNC"));
  const std::set<IdentityId> required = {
      S1_FUNC, S2_FUNC, S2P_FUNC, LOWER_FUNC, RAISE_FUNC, A_FORM,
      B_FORM,  DLNH,    DBETA,    DP,         BETA_ROUTES, P_TELESCOPE};
  for (const auto& entry : reg) {
    CHECK((entry.tier == Tier::Required) == required.count(entry.id));
  }
  CHECK(ids_for_tier(Tier::Required).size() == required.size());
  CHECK(ids_for_tier(std::nullopt).size() == reg.size());
  for (IdentityId id : {BETA_EXPR, RIC_R, RIC_BIGR, FACTOR_PROD, ODE_RN,
                        PV_PHI, Q2, QP2}) {
    CHECK(info(id).needs_k2);
  }
}

TEST_CASE("functional identities at a fixed point") {
  PrecisionScope scope(256);
  const PrecisionContext ctx = make_context();
  const ModelParams p = params("1", "0.25", "0.5", 4);
  Workspace ws(p, ctx);
  for (IdentityId id : {S1_FUNC, S2_FUNC, S2P_FUNC, LOWER_FUNC, RAISE_FUNC,
                        A_FORM, B_FORM}) {
    const IdentityReport r = check(id, ws, 3, 0.5_r, 0.8_r);
    CAPTURE(to_string(id));
    CHECK(r.status == CheckStatus::Ok);
    CHECK(r.residual < 1e-20);
    CHECK(r.pass == true);
    REQUIRE(r.z);
    CHECK(*r.z == 0.8_r);
  }
}

TEST_CASE("coefficient identities") {
  PrecisionScope scope(256);
  const PrecisionContext ctx = make_context();
  // At t = 0, a_1 = 5 and R_1 = 0, so a_n = R_n + 2n + 2 alpha + 1 holds.
  const IdentityReport yj4 = check(YJ4, params("1", "-1", "0", 2), ctx, 1,
                                   Real(0));
  CHECK(yj4.status == CheckStatus::Ok);
  CHECK(yj4.residual < 1e-60);
  CHECK_FALSE(yj4.pass);

  Workspace ws(params("1", "0.25", "0.5", 3), ctx);
  for (IdentityId id : {C_S1_B, C_S1_R, C_S2_B, C_S2_R, C_S2_MIX, TELE_SUM}) {
    const IdentityReport r = check(id, ws, 1, 0.5_r);
    CAPTURE(to_string(id));
    CHECK(r.status == CheckStatus::Ok);
    CHECK(isfinite(r.residual));
    CHECK(sign(r.residual) >= 0);
  }
  // These follow from the same integration by parts as S1 and hold exactly.
  CHECK(check(C_S1_B, ws, 1, 0.5_r).residual < 1e-60);
  CHECK(check(C_S1_R, ws, 1, 0.5_r).residual < 1e-60);
  CHECK(check(TELE_SUM, ws, 2, 0.5_r).residual < 1e-60);

  const IdentityReport witness = check(Q3_QP3_WITNESS, ws, 2, 0.5_r);
  CHECK(witness.status == CheckStatus::Ok);
  CHECK(isfinite(witness.residual));
}

TEST_CASE("error statuses") {
  PrecisionScope scope(256);
  const PrecisionContext ctx = make_context();
  Workspace ws(params("1", "0.25", "0.5", 3), ctx);
  const IdentityReport low = check(S2P_FUNC, ws, 0, 0.5_r, 0.7_r);
  CHECK(low.status == CheckStatus::Error);
  CHECK(low.error == ErrorCode::IndexError);
  CHECK(low.pass == false);

  const IdentityReport high = check(S1_FUNC, ws, 3, 0.5_r, 0.7_r);
  CHECK(high.error == ErrorCode::IndexError);

  Workspace flat(params("1", "0", "0.5", 3), ctx);
  const IdentityReport singular = check(BETA_EXPR, flat, 1, 0.5_r);
  CHECK(singular.status == CheckStatus::Error);
  CHECK(singular.error == ErrorCode::SingularParams);
  CHECK_FALSE(singular.pass);

  const IdentityReport pole = check(S1_FUNC, ws, 1, 0.5_r, 0.5_r);
  CHECK(pole.error == ErrorCode::PoleError);

  const IdentityReport edge = check(DLNH, ws, 1, 1e-7_r);
  CHECK(edge.status == CheckStatus::Skipped);
}

TEST_CASE("derivative identities shrink fourfold under step halving") {
  PrecisionScope scope(256);
  const PrecisionContext ctx = make_context();
  Workspace ws(params("1", "0.25", "0.5", 4), ctx);
  for (IdentityId id : {DLNH, DBETA, DP}) {
    for (int n = info(id).min_n; n <= 4; ++n) {
      const IdentityReport r = check(id, ws, n, 0.3_r);
      CAPTURE(to_string(id));
      CAPTURE(n);
      REQUIRE(r.status == CheckStatus::Ok);
      REQUIRE(r.residual_half_step);
      CHECK(r.residual < 1e-10);
      const double ratio = (r.residual / *r.residual_half_step).to_double();
      CHECK(ratio >= 3);
      CHECK(ratio <= 5);
      CHECK(r.pass == true);
    }
  }
}

TEST_CASE("suite") {
  PrecisionScope scope(256);
  const PrecisionContext ctx = make_context();
  const ModelParams p = params("1", "0.25", "0.5");
  SuiteSpec spec;
  spec.ids = ids_for_tier(std::nullopt);
  spec.t_grid = {0.5_r};
  spec.z_samples = sample_z(p, 1, 3);
  CHECK(check_suite(p, ctx, spec).empty());

  spec.n_set = {2, 1};
  const auto reports = check_suite(p, ctx, spec);
  REQUIRE_FALSE(reports.empty());
  std::set<IdentityId> seen;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const IdentityReport& r = reports[i];
    seen.insert(r.id);
    if (i > 0) {
      const IdentityReport& q = reports[i - 1];
      CHECK(std::tie(q.id, q.n) <= std::tie(r.id, r.n));
    }
    if (info(r.id).needs_derivative) {
      CHECK(r.status == CheckStatus::Skipped);
    } else {
      CHECK(r.status == CheckStatus::Ok);
      CHECK(isfinite(r.residual));
    }
    CHECK(r.pass.has_value() ==
          (r.tier == Tier::Required && r.status != CheckStatus::Skipped));
    if (r.pass) CHECK(*r.pass);
  }
  CHECK(seen.size() == identity_registry().size());
}

TEST_CASE("z samples") {
  PrecisionScope scope(256);
  const ModelParams p = params("1", "0.25", "0.5");
  const auto a = sample_z(p, 42);
  const auto b = sample_z(p, 42);
  const auto c = sample_z(p, 43);
  REQUIRE(a.size() == 20);
  CHECK(a == b);
  CHECK(a != c);
  for (const Real& z : a) {
    CHECK(abs(z) <= 0.95);
    CHECK(abs(abs(z) - 0.5_r) >= 0.05);
  }
}

TEST_CASE("factor split") {
  PrecisionScope scope(256);
  const PrecisionContext ctx = make_context();
  const ModelParams p = params("1", "0.04", "0.5", 3);
  const FactorSplit f = factor_split(p, ctx, 2, 0.5_r);
  CHECK(isfinite(f.riccati));
  CHECK(isfinite(f.algebraic));
  CHECK(close(f.riccati * f.algebraic, f.product_lhs, 1e-60_r));
  CHECK(error_code_of([&] {
          factor_split(params("1", "0", "0.5", 3), ctx, 2, 0.5_r);
        }) == ErrorCode::SingularParams);
}

TEST_CASE("Riccati elimination matches the ODE_RN residual in magnitude") {
  PrecisionScope scope(256);
  const PrecisionContext ctx = make_context();
  Workspace ws(params("1", "0.09", "0.5", 3), ctx);
  for (int n = 1; n <= 2; ++n) {
    const EliminationCheck e = riccati_elimination(ws, n, 0.5_r);
    const Real lo = min(e.eliminated_residual, e.ode_rn_residual);
    const Real hi = max(e.eliminated_residual, e.ode_rn_residual);
    CHECK(hi <= 100 * lo);
  }
}
