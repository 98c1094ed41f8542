#pragma once

#include <optional>
#include <vector>

#include "lambert_dde/dde_core.hpp"

namespace lambert_dde {

/// Axis-aligned rectangle of the complex plane plus the sampling step.
struct Region {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;
  double grid_step = 0.0;

  /// Builds a validated region. Without a step the coarsest admissible
  /// step is used; an explicit step must not exceed it.
  static Region make(const DdeSystem& sys, double re_min, double re_max, double im_min, double im_max,
                     std::optional<double> grid_step = std::nullopt);

  [[nodiscard]] bool contains(Complex z) const noexcept {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

/// pi / (4 tau max(1, |im|)) with |im| the largest imaginary extent.
[[nodiscard]] double max_grid_step(const DdeSystem& sys, double im_min, double im_max);

/// Throws InvalidArgument for an empty region or a step above the guard.
void validate_region(const DdeSystem& sys, const Region& region);

struct RootReport {
  std::vector<Complex> roots;
  std::vector<int> multiplicities;
  /// |f(root)|, one per root.
  std::vector<double> residuals;
  /// Winding number of f around the region boundary.
  int argument_count = 0;
  /// Refined roots counted with multiplicity.
  int refined_count = 0;
  /// Grid cells where both Re f and Im f change sign.
  int grid_candidates = 0;
  /// max |f| over the region corners.
  double scale = 1.0;
  bool validated = false;
};

/// d/dlambda det Delta(lambda) = trace(adj(Delta) Delta').
[[nodiscard]] Complex char_derivative(const DdeSystem& sys, Complex lambda);

/// Winding number of f along the boundary of `region`, by phase tracking
/// with adaptive subdivision. Throws BoundaryRootSuspected when f vanishes
/// on the boundary to working precision.
[[nodiscard]] int winding_number(const DdeSystem& sys, const Region& region, double scale);

struct Refinement {
  Complex root;
  double residual = 0.0;
  bool converged = false;
  /// |f| after each accepted step, starting with the initial point.
  std::vector<double> history;
};

/// Damped Newton on f from `start`; |f| decreases at every accepted step.
[[nodiscard]] Refinement refine_root(const DdeSystem& sys, Complex start, double scale, int max_iters = 100);

/// Grid scan, refinement and counting without the final check:
/// RootReport::validated tells whether the counts agree.
[[nodiscard]] RootReport scan_roots(const DdeSystem& sys, const Region& region);

/// scan_roots that throws CountMismatch when refined and winding counts
/// differ, and BoundaryRootSuspected for a root on the boundary.
[[nodiscard]] RootReport map_roots(const DdeSystem& sys, const Region& region);

}  // namespace lambert_dde
