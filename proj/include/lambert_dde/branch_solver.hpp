#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lambert_dde/dde_core.hpp"

namespace lambert_dde {

enum class SeedProvenance { Default, Prop1, Prop2, GeneralPair, User };

[[nodiscard]] const char* to_string(SeedProvenance p) noexcept;

struct SolveOptions {
  int max_iters = 200;
  /// Frobenius residual tolerance relative to max(1, ||tau B||).
  double tol = 1e-10;
  /// Backtracking factor of the line search.
  double damping = 0.5;
  /// Unknowns (m21, m22) only. Unset: chosen when B's first row is zero.
  std::optional<bool> structured;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  CMatrix m;
  CMatrix s;
  std::vector<Complex> roots;
  /// |char_function(root)| / char_scale(root), one per root.
  std::vector<double> root_residuals;
  int branch = 0;
  SeedProvenance seed_provenance = SeedProvenance::User;
  std::string diagnostic;
};

/// M_init = tau B exp(-A tau), i.e. Q = exp(-A tau).
[[nodiscard]] CMatrix default_seed(const DdeSystem& sys);

/// Minimum-norm Q with tau B Q = M.
[[nodiscard]] CMatrix q_from_m(const DdeSystem& sys, const CMatrix& m);

/// Solves W_k(M) exp(W_k(M) + A tau) = tau B for M by damped Newton from
/// m_init, then returns S_k = W_k(M)/tau + A and its eigenvalues.
///
/// Non-convergence is reported, not thrown: the best iterate comes back with
/// converged = false. Throws ShapeUnsupported for an unusable seed shape and
/// propagates matrix-function errors raised at the seed itself.
[[nodiscard]] SolveReport solve_branch(const DdeSystem& sys, BranchIndex k, const CMatrix& m_init,
                                       const SolveOptions& opts = {},
                                       SeedProvenance provenance = SeedProvenance::User);

struct BranchSeed {
  CMatrix m;
  SeedProvenance provenance = SeedProvenance::User;
};

/// A root set produced by at least one converged cell of the sweep.
struct DistinctRootSet {
  std::vector<Complex> roots;
  std::vector<int> branches;
  std::vector<std::size_t> report_indices;
};

struct SweepResult {
  /// One report per (branch, seed) cell, branch-major.
  std::vector<SolveReport> reports;
  std::vector<DistinctRootSet> distinct;
};

/// Runs solve_branch over every (k, seed) cell. Cell failures are recorded
/// in the cell's report. Root sets matching within 1e-6 are merged.
[[nodiscard]] SweepResult sweep_branches(const DdeSystem& sys, std::span<const int> branches,
                                         std::span<const BranchSeed> seeds, const SolveOptions& opts = {});

/// True when every root of `a` has a partner in `b` within tol (and sizes match).
[[nodiscard]] bool same_root_set(std::span<const Complex> a, std::span<const Complex> b, double tol);

}  // namespace lambert_dde
