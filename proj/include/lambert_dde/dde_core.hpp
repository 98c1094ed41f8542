#pragma once

#include "lambert_dde/matrix_fun.hpp"
#include "lambert_dde/types.hpp"

namespace lambert_dde {

/// x'(t) = A x(t) + B x(t - tau), A and B real n x n, tau > 0.
class DdeSystem {
 public:
  DdeSystem(RMatrix a, RMatrix b, double tau);

  [[nodiscard]] const RMatrix& a() const noexcept { return a_; }
  [[nodiscard]] const RMatrix& b() const noexcept { return b_; }
  [[nodiscard]] double tau() const noexcept { return tau_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return a_.rows(); }

  /// max(1, ||tau B||_F), the reference scale for branch-equation residuals.
  [[nodiscard]] double residual_scale() const;
  /// B has an exactly zero first row, so every M = tau B Q shares it.
  [[nodiscard]] bool b_first_row_zero() const;

 private:
  RMatrix a_;
  RMatrix b_;
  double tau_;
};

/// Validated view of a system with A = [[0, 1], [a21, a22]] and
/// B = [[0, 0], [b21, b22]].
class CompanionDde {
 public:
  /// Throws ShapeUnsupported when `sys` lacks the companion structure.
  explicit CompanionDde(DdeSystem sys);
  static CompanionDde from_coefficients(double a21, double a22, double b21, double b22, double tau);

  [[nodiscard]] static bool is_companion(const DdeSystem& sys);

  [[nodiscard]] const DdeSystem& system() const noexcept { return sys_; }
  [[nodiscard]] double a21() const noexcept { return sys_.a()(1, 0); }
  [[nodiscard]] double a22() const noexcept { return sys_.a()(1, 1); }
  [[nodiscard]] double b21() const noexcept { return sys_.b()(1, 0); }
  [[nodiscard]] double b22() const noexcept { return sys_.b()(1, 1); }
  [[nodiscard]] double tau() const noexcept { return sys_.tau(); }

 private:
  DdeSystem sys_;
};

/// Delta(lambda) = lambda I - A - B exp(-lambda tau).
[[nodiscard]] CMatrix char_matrix(const DdeSystem& sys, Complex lambda);
/// det Delta(lambda).
[[nodiscard]] Complex char_function(const DdeSystem& sys, Complex lambda);
/// Magnitude scale of det Delta near lambda:
/// max(1, (|lambda| + ||A||_F + ||B||_F |exp(-lambda tau)|)^n).
[[nodiscard]] double char_scale(const DdeSystem& sys, Complex lambda);

/// S - A - B exp(-S tau).
[[nodiscard]] CMatrix residual_solution(const DdeSystem& sys, const CMatrix& s);
/// W_k(M) exp(W_k(M) + A tau) - tau B.
[[nodiscard]] CMatrix residual_branch(const DdeSystem& sys, BranchIndex k, const CMatrix& m);
/// W_k(M), using the structured closed form when M has a zero first row.
[[nodiscard]] CMatrix branch_w(BranchIndex k, const CMatrix& m);
/// S_k = W_k(M) / tau + A.
[[nodiscard]] CMatrix s_from_m(const DdeSystem& sys, BranchIndex k, const CMatrix& m);

}  // namespace lambert_dde
