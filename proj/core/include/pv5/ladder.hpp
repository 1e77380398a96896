#pragma once

// Auxiliary quantities R_n, r_n, a_n, b_n and the ladder coefficients
// A_n(z), B_n(z), from their integral definitions and in rational form
//
//   A_n(z) = a_n/(1-z^2) + (a_n - 2n - 2a - 1)/(z^2-k^2) + k^2 R_n/(z^2-k^2)^2
//   B_n(z) = z b_n/(1-z^2) + z(b_n - n)/(z^2-k^2) + z r_n/(z^2-k^2)^2

#include <vector>

#include "pv5/orthopoly.hpp"
#include "pv5/real.hpp"

namespace pv5 {

struct LadderState {
  std::vector<Real> R;  // (2t/h_n) int P_n^2 w / (y^2-k^2)
  std::vector<Real> r;  // (2t/h_{n-1}) int y P_n P_{n-1} w / (y^2-k^2), r_0 = 0
  std::vector<Real> a;  // (2a/h_n) int P_n^2 w / (1-y^2)
  std::vector<Real> b;  // (2a/h_{n-1}) int y P_n P_{n-1} w / (1-y^2), b_0 = 0
};

// Requires alpha > 0 (AlphaOutOfRange). At t = 0 R and r vanish identically.
LadderState compute_ladder(const OrthoState& s);

Real A_rational(int n, const Real& z, const OrthoState& s,
                const LadderState& lad);
Real B_rational(int n, const Real& z, const OrthoState& s,
                const LadderState& lad);

// A_j(z) and B_j(z) for 0 <= j <= n_max from the defining integrals, sharing
// one evaluation of the divided difference per node. z may lie outside
// [-1, 1]; PoleError at the poles of v'.
struct LadderFunctions {
  std::vector<Real> A;
  std::vector<Real> B;
};
LadderFunctions ladder_functions(const OrthoState& s, const Real& z);

Real A_integral(int n, const Real& z, const OrthoState& s);
Real B_integral(int n, const Real& z, const OrthoState& s);

}  // namespace pv5
