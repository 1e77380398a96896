#include <algorithm>
#include <string>

#include "pv5/errors.hpp"
#include "pv5/verify.hpp"

namespace pv5 {

namespace {

using enum IdentityId;
constexpr Tier kReq = Tier::Required;
constexpr Tier kDiag = Tier::Diagnostic;

// id, name, tier, z, derivative, k2, min_n, next, threshold
const std::vector<IdentityInfo> kRegistry = {
    {S1_FUNC, "S1_FUNC", kReq, true, false, false, 0, true, 1e-15},
    {S2_FUNC, "S2_FUNC", kReq, true, false, false, 0, true, 1e-15},
    {S2P_FUNC, "S2P_FUNC", kReq, true, false, false, 1, false, 1e-15},
    {LOWER_FUNC, "LOWER_FUNC", kReq, true, false, false, 1, false, 1e-20},
    {RAISE_FUNC, "RAISE_FUNC", kReq, true, false, false, 1, false, 1e-20},
    {A_FORM, "A_FORM", kReq, true, false, false, 0, false, 1e-20},
    {B_FORM, "B_FORM", kReq, true, false, false, 1, false, 1e-20},
    {DLNH, "DLNH", kReq, false, true, false, 0, false, 1e-10},
    {DBETA, "DBETA", kReq, false, true, false, 1, false, 1e-10},
    {DP, "DP", kReq, false, true, false, 2, false, 1e-10},
    {BETA_ROUTES, "BETA_ROUTES", kReq, false, false, false, 1, false, 0},
    {P_TELESCOPE, "P_TELESCOPE", kReq, false, false, false, 2, false, 0},
    {C_S1_B, "C_S1_B", kDiag, false, false, false, 0, true, 0},
    {C_S1_R, "C_S1_R", kDiag, false, false, false, 0, true, 0},
    {C_S2_B, "C_S2_B", kDiag, false, false, false, 1, true, 0},
    {C_S2_R, "C_S2_R", kDiag, false, false, false, 1, true, 0},
    {C_S2_MIX, "C_S2_MIX", kDiag, false, false, false, 1, true, 0},
    {YJ3, "YJ3", kDiag, false, false, false, 1, true, 0},
    {YJ4, "YJ4", kDiag, false, false, false, 0, false, 0},
    {TELE_SUM, "TELE_SUM", kDiag, false, false, false, 1, false, 0},
    {Q1, "Q1", kDiag, false, false, false, 1, false, 0},
    {Q2, "Q2", kDiag, false, false, true, 1, false, 0},
    {Q3, "Q3", kDiag, false, false, false, 1, false, 0},
    {Q4, "Q4", kDiag, false, false, false, 1, false, 0},
    {Q5, "Q5", kDiag, false, false, false, 1, false, 0},
    {Q6, "Q6", kDiag, false, false, false, 1, false, 0},
    {Q7, "Q7", kDiag, false, false, false, 1, false, 0},
    {QP1, "QP1", kDiag, false, false, false, 1, false, 0},
    {QP2, "QP2", kDiag, false, false, true, 1, false, 0},
    {QP3, "QP3", kDiag, false, false, false, 1, false, 0},
    {QP4, "QP4", kDiag, false, false, false, 1, false, 0},
    {QP5, "QP5", kDiag, false, false, false, 1, false, 0},
    {QP6, "QP6", kDiag, false, false, false, 1, false, 0},
    {QP7, "QP7", kDiag, false, false, false, 1, false, 0},
    {Q3_QP3_WITNESS, "Q3_QP3_WITNESS", kDiag, false, false, false, 1, false,
     0},
    {ZHU232, "ZHU232", kDiag, false, false, false, 1, false, 0},
    {BETA_EXPR, "BETA_EXPR", kDiag, false, false, true, 1, false, 0},
    {RIC_R, "RIC_R", kDiag, false, true, true, 1, false, 0},
    {RIC_BIGR, "RIC_BIGR", kDiag, false, true, true, 1, false, 0},
    {FACTOR_PROD, "FACTOR_PROD", kDiag, false, true, true, 1, false, 0},
    {ODE_RN, "ODE_RN", kDiag, false, true, true, 1, false, 0},
    {PV_PHI, "PV_PHI", kDiag, false, true, true, 1, false, 0},
};

}  // namespace

const std::vector<IdentityInfo>& identity_registry() { return kRegistry; }

const IdentityInfo& info(IdentityId id) {
  return kRegistry[static_cast<std::size_t>(id)];
}

std::string_view to_string(IdentityId id) { return info(id).name; }

std::optional<IdentityId> parse_identity(std::string_view name) {
  for (const auto& entry : kRegistry) {
    if (entry.name == name) return entry.id;
  }
  return std::nullopt;
}

std::string_view to_string(Tier tier) {
  return tier == Tier::Required ? "REQUIRED" : "DIAGNOSTIC";
}

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Ok: return "OK";
    case CheckStatus::Skipped: return "SKIPPED";
    case CheckStatus::Error: return "ERROR";
  }
  return "ERROR";
}

std::vector<IdentityId> ids_for_tier(std::optional<Tier> tier) {
  std::vector<IdentityId> out;
  for (const auto& entry : kRegistry) {
    if (!tier || entry.tier == *tier) out.push_back(entry.id);
  }
  return out;
}

}  // namespace pv5
