#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace lambert_dde {

using Complex = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kE = 2.71828182845904523536;
/// Nearest double to 1/e; kInvELo carries the rounding remainder.
inline constexpr double kInvE = 0.36787944117144233;
inline constexpr double kInvELo = -1.2428753672788363e-17;

enum class ErrorCode {
  InvalidArgument,
  DivergentBranchAtZero,
  NoConvergence,
  UndefinedDerivativeAtBranchPoint,
  NoRealSolution,
  DefectiveUnsupported,
  BranchPointJordanBlock,
  ShapeUnsupported,
  BoundaryRootSuspected,
  CountMismatch,
  ConjugationClosureViolated,
};

[[nodiscard]] constexpr const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DivergentBranchAtZero: return "DivergentBranchAtZero";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UndefinedDerivativeAtBranchPoint: return "UndefinedDerivativeAtBranchPoint";
    case ErrorCode::NoRealSolution: return "NoRealSolution";
    case ErrorCode::DefectiveUnsupported: return "DefectiveUnsupported";
    case ErrorCode::BranchPointJordanBlock: return "BranchPointJordanBlock";
    case ErrorCode::ShapeUnsupported: return "ShapeUnsupported";
    case ErrorCode::BoundaryRootSuspected: return "BoundaryRootSuspected";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::ConjugationClosureViolated: return "ConjugationClosureViolated";
  }
  return "Unknown";
}

/// Single exception type for the library; the code says what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  /// Oracle validation failures, as opposed to math-domain failures.
  [[nodiscard]] bool is_validation_failure() const noexcept {
    return code_ == ErrorCode::BoundaryRootSuspected || code_ == ErrorCode::CountMismatch;
  }

 private:
  ErrorCode code_;
};

/// Branch index of the Lambert W function. Any integer with |k| <= 10^6.
class BranchIndex {
 public:
  static constexpr std::int64_t kMaxMagnitude = 1'000'000;

  constexpr BranchIndex(int k) : k_(k) {  // NOLINT(google-explicit-constructor)
    if (k > kMaxMagnitude || k < -kMaxMagnitude) {
      throw Error(ErrorCode::InvalidArgument, "branch index out of range: " + std::to_string(k));
    }
  }

  [[nodiscard]] constexpr int value() const noexcept { return k_; }
  constexpr operator int() const noexcept { return k_; }  // NOLINT(google-explicit-constructor)

 private:
  int k_;
};

[[nodiscard]] inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <typename Derived>
[[nodiscard]] bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(std::abs(m(i, j)))) return false;
    }
  }
  return true;
}

inline void require_finite(Complex z, const char* what) {
  if (!is_finite(z)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is not finite");
}

}  // namespace lambert_dde
