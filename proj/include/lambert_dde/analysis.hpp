#pragma once

#include <string>
#include <vector>

#include "lambert_dde/json_io.hpp"

namespace lambert_dde {

struct PairOutcome {
  SeedRecipe recipe;
  SolveReport report;
  /// Converged and returned exactly the recipe's pair (within 1e-6).
  bool recovered = false;
};

struct PipelineResult {
  Region region;
  RootReport oracle;
  /// Oracle roots completed under conjugation.
  std::vector<Complex> closed_roots;
  std::vector<double> closed_residuals;
  Pairing pairing;
  std::vector<PairOutcome> outcomes;
  int branch_zero_pairs = 0;
  int branch_minus_one_pairs = 0;
  bool two_branches_sufficed = false;
  std::vector<std::string> warnings;
};

/// Oracle map, conjugate completion, pairing, one seeded solve per pair.
/// Throws ShapeUnsupported for non-companion systems and propagates
/// CountMismatch / BoundaryRootSuspected from the oracle.
[[nodiscard]] PipelineResult run_pipeline(const DdeSystem& sys, const Region& region, const SolveOptions& opts = {});

[[nodiscard]] Json to_json(const PipelineResult& result);
/// One row per closed root, labelled with the branch of the pair that covers it.
[[nodiscard]] std::vector<CsvRoot> csv_rows(const PipelineResult& result, const std::string& source);

/// Built-in systems: 1 is A = [[0,1],[-5,-1]], B = [[0,0],[-3,-0.6]],
/// tau = 5; 2 is A = [[0,1],[-1,0]], B = [[0,0],[1,0]], tau = 1.
[[nodiscard]] CompanionDde builtin_system(int example);
/// The plotting window of each built-in system.
[[nodiscard]] Region builtin_window(int example);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ReproBundle {
  int example = 0;
  Json doc;
  std::vector<CsvRoot> csv;
  std::vector<Check> checks;

  [[nodiscard]] bool all_passed() const;
};

/// Runs the case study for a built-in system. InvalidArgument for an
/// unknown example number.
[[nodiscard]] ReproBundle build_repro(int example);

}  // namespace lambert_dde
