#pragma once

#include <vector>

#include "lambert_dde/types.hpp"

namespace lambert_dde {

/// Branch k of the Lambert W function, the solution w of w*exp(w) = z.
///
/// Branch cuts follow the Corless et al. convention: the principal log cut
/// on (-inf, 0], with each branch range closed on its upper boundary, so a
/// z on the negative real axis takes the limit from Im(z) > 0. Negative
/// zero imaginary parts are treated as +0.
///
/// Throws Error(DivergentBranchAtZero) for z == 0 with k != 0, and
/// Error(NoConvergence) if Halley polishing fails its residual check.
[[nodiscard]] Complex lambert_w(BranchIndex k, Complex z);

/// dW_k/dz. W_0'(0) = 1. Throws UndefinedDerivativeAtBranchPoint when
/// W_k(z) = -1, i.e. z = -1/e on a branch that attains the branch point.
[[nodiscard]] Complex lambert_w_prime(BranchIndex k, Complex z);

/// The branch whose range contains w, read off the boundary curves
/// x = -y cot(y) directly. No evaluation of W.
[[nodiscard]] int branch_range_of(Complex w);

/// Inverse branch lookup: k such that lambert_w(k, w*e^w) recovers w.
/// Candidates are round(Im(w)/2pi), its neighbours and the range
/// classification, each verified by a round trip.
[[nodiscard]] BranchIndex branch_of(Complex w);

struct RealBranchValue {
  int branch;
  double value;
};

/// All real w with w*e^w = x, labelled with their branch (0 first).
/// Throws NoRealSolution for x < -1/e.
[[nodiscard]] std::vector<RealBranchValue> real_branch_select(double x);

}  // namespace lambert_dde
