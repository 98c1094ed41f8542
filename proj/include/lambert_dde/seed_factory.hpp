#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lambert_dde/branch_solver.hpp"
#include "lambert_dde/dde_core.hpp"

namespace lambert_dde {

enum class SeedCase { ConjugatePair, RealPair, DegenerateTrace, GeneralPair, ComplexRelaxed };

[[nodiscard]] const char* to_string(SeedCase c) noexcept;

/// Result of running the algorithm backwards from a chosen root pair:
/// S_target has eigenvalues {pair}, W_target = tau (S_target - A), and M
/// satisfies structured_lambert_w(branch, M) = W_target.
struct SeedRecipe {
  int branch = 0;
  /// Branch the caller may select; differs from `branch` only in the
  /// degenerate-trace case, where the hybrid rule computes on branch 0.
  int requested_branch = 0;
  CMatrix s_target;
  CMatrix w_target;
  CMatrix m;
  std::pair<Complex, Complex> pair;
  SeedCase case_tag = SeedCase::GeneralPair;
  /// ||residual_branch(branch, M)|| / max(1, ||tau B||).
  double residual = 0.0;
  /// residual <= 1e-9: the pair really are characteristic roots.
  bool certified = false;
  SeedProvenance provenance = SeedProvenance::GeneralPair;
  std::string diagnostic;
};

/// Real recipe for {lambda, conj(lambda)}. Branch 0 if
/// tau (2 Re lambda - a22) >= -1, else -1; the degenerate trace
/// 2 Re lambda = a22 gives the nilpotent M with branch 0.
[[nodiscard]] SeedRecipe seed_conjugate_pair(const CompanionDde& sys, Complex lambda);

/// Real recipe for two distinct real roots.
[[nodiscard]] SeedRecipe seed_real_pair(const CompanionDde& sys, double lambda1, double lambda2);

/// Complex recipe for an arbitrary pair; the branch is wherever
/// w22 = tau (lambda1 + lambda2 - a22) falls.
[[nodiscard]] SeedRecipe seed_general_pair(const CompanionDde& sys, Complex lambda1, Complex lambda2);

/// Picks the conjugate, real or general construction from the pair's shape.
[[nodiscard]] SeedRecipe seed_for_pair(const CompanionDde& sys, Complex lambda1, Complex lambda2, double tol = 1e-9);

struct Pairing {
  std::vector<SeedRecipe> recipes;
  std::size_t real_root_count = 0;
  /// The real-root count differs from one, so branches 0 and -1 cover all.
  bool two_branch_hypothesis = true;
  /// Roots no recipe covers (a lone real root with no complex partner).
  std::vector<Complex> uncovered;
};

/// Pairs a conjugation-closed root list: conjugate pairs together, real
/// roots ascending and adjacent. An odd real root is paired again with its
/// real neighbour when there is one, otherwise with the nearest complex
/// root through the general construction.
[[nodiscard]] Pairing pair_all_roots(const CompanionDde& sys, std::span<const Complex> roots, double tol = 1e-6);

/// Result of trying to reach a single real root `r` with a real companion S
/// = [[0, 1], [s21, s22]]: eigenvalue r forces s21 = r^2 - s22 r, and the
/// residual S - A - B exp(-S tau) then vanishes only if the other eigenvalue
/// s22 - r is a real characteristic root too.
struct RealSObstruction {
  double min_residual = 0.0;
  double argmin_s22 = 0.0;
  /// A real sign change of the characteristic function other than at r.
  bool other_real_root_found = false;
  bool contradiction_holds = false;
};

[[nodiscard]] RealSObstruction real_s_obstruction(const CompanionDde& sys, double real_root, double s22_min,
                                                  double s22_max, int samples = 4001);

}  // namespace lambert_dde
