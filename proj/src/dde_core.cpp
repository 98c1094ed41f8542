#include "lambert_dde/dde_core.hpp"

#include <Eigen/LU>

namespace lambert_dde {

DdeSystem::DdeSystem(RMatrix a, RMatrix b, double tau) : a_(std::move(a)), b_(std::move(b)), tau_(tau) {
  if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw Error(ErrorCode::InvalidArgument, "tau must be finite and > 0");
  if (a_.rows() == 0 || a_.rows() != a_.cols()) throw Error(ErrorCode::InvalidArgument, "A must be square");
  if (b_.rows() != a_.rows() || b_.cols() != a_.cols()) {
    throw Error(ErrorCode::InvalidArgument, "A and B must have the same dimension");
  }
  if (!all_finite(a_) || !all_finite(b_)) throw Error(ErrorCode::InvalidArgument, "A and B must be finite");
}

double DdeSystem::residual_scale() const { return std::max(1.0, tau_ * b_.norm()); }

bool DdeSystem::b_first_row_zero() const { return (b_.row(0).array() == 0.0).all(); }

CompanionDde::CompanionDde(DdeSystem sys) : sys_(std::move(sys)) {
  if (!is_companion(sys_)) {
    throw Error(ErrorCode::ShapeUnsupported, "expected A = [[0,1],[a21,a22]] and B = [[0,0],[b21,b22]]");
  }
}

CompanionDde CompanionDde::from_coefficients(double a21, double a22, double b21, double b22, double tau) {
  RMatrix a(2, 2), b(2, 2);
  a << 0.0, 1.0, a21, a22;
  b << 0.0, 0.0, b21, b22;
  return CompanionDde(DdeSystem(a, b, tau));
}

bool CompanionDde::is_companion(const DdeSystem& sys) {
  if (sys.dim() != 2) return false;
  const RMatrix& a = sys.a();
  return a(0, 0) == 0.0 && a(0, 1) == 1.0 && sys.b_first_row_zero();
}

CMatrix char_matrix(const DdeSystem& sys, Complex lambda) {
  require_finite(lambda, "lambda");
  const Complex delay = std::exp(-lambda * sys.tau());
  CMatrix delta = -sys.a().cast<Complex>() - delay * sys.b().cast<Complex>();
  delta.diagonal().array() += lambda;
  return delta;
}

Complex char_function(const DdeSystem& sys, Complex lambda) {
  const CMatrix delta = char_matrix(sys, lambda);
  if (sys.dim() == 1) return delta(0, 0);
  if (sys.dim() == 2) return delta(0, 0) * delta(1, 1) - delta(0, 1) * delta(1, 0);
  return delta.partialPivLu().determinant();
}

double char_scale(const DdeSystem& sys, Complex lambda) {
  const double delay = std::exp(-lambda.real() * sys.tau());
  const double base = std::abs(lambda) + sys.a().norm() + sys.b().norm() * delay;
  return std::max(1.0, std::pow(base, static_cast<double>(sys.dim())));
}

CMatrix residual_solution(const DdeSystem& sys, const CMatrix& s) {
  if (s.rows() != sys.dim() || s.cols() != sys.dim()) {
    throw Error(ErrorCode::InvalidArgument, "S must match the system dimension");
  }
  return s - sys.a().cast<Complex>() - sys.b().cast<Complex>() * mat_exp(-sys.tau() * s);
}

CMatrix branch_w(BranchIndex k, const CMatrix& m) {
  if (const auto structured = StructuredM::from_matrix(m)) return structured_lambert_w(k, *structured);
  return matrix_lambert_w(k, m);
}

CMatrix residual_branch(const DdeSystem& sys, BranchIndex k, const CMatrix& m) {
  if (m.rows() != sys.dim() || m.cols() != sys.dim()) {
    throw Error(ErrorCode::InvalidArgument, "M must match the system dimension");
  }
  const CMatrix w = branch_w(k, m);
  const CMatrix a_tau = sys.tau() * sys.a().cast<Complex>();
  return w * mat_exp(w + a_tau) - sys.tau() * sys.b().cast<Complex>();
}

CMatrix s_from_m(const DdeSystem& sys, BranchIndex k, const CMatrix& m) {
  if (m.rows() != sys.dim() || m.cols() != sys.dim()) {
    throw Error(ErrorCode::InvalidArgument, "M must match the system dimension");
  }
  return branch_w(k, m) / sys.tau() + sys.a().cast<Complex>();
}

}  // namespace lambert_dde
