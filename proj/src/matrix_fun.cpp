#include "lambert_dde/matrix_fun.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "lambert_dde/lambert_w.hpp"

namespace lambert_dde {

namespace {

constexpr double kHybridZeroTolerance = 1e-12;
constexpr double kMaxEigenvectorCondition = 1e8;
// Below this relative eigenvalue separation the midpoint derivative form is
// more accurate than the divided difference.
constexpr double kCoincidentSeparation = 1e-5;

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a non-empty square matrix");
  }
  if (!all_finite(m)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

Eigen::Vector2cd unit(Complex a, Complex b) {
  Eigen::Vector2cd v(a, b);
  return v / v.norm();
}

}  // namespace

CMatrix StructuredM::matrix() const {
  CMatrix m = CMatrix::Zero(2, 2);
  m(1, 0) = m21;
  m(1, 1) = m22;
  return m;
}

std::optional<StructuredM> StructuredM::from_matrix(const CMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) return std::nullopt;
  if (m(0, 0) != 0.0 || m(0, 1) != 0.0) return std::nullopt;
  return StructuredM{m(1, 0), m(1, 1)};
}

CMatrix mat_exp(const CMatrix& x) {
  require_square(x, "mat_exp argument");
  if (x.rows() == 1) return CMatrix::Constant(1, 1, std::exp(x(0, 0)));
  return x.exp();
}

EigenDecomposition eigen_2x2(const CMatrix& h) {
  if (h.rows() != 2 || h.cols() != 2) throw Error(ErrorCode::InvalidArgument, "eigen_2x2 needs a 2x2 matrix");
  const Complex a = h(0, 0), b = h(0, 1), c = h(1, 0), d = h(1, 1);
  const Complex mid = 0.5 * (a + d);
  const Complex half_gap = 0.5 * (a - d);
  const Complex disc = std::sqrt(half_gap * half_gap + b * c);
  const std::array<Complex, 2> lambda{mid + disc, mid - disc};

  EigenDecomposition out{CVector(2), CMatrix(2, 2)};
  const bool diagonal = b == 0.0 && c == 0.0;
  for (int i = 0; i < 2; ++i) {
    out.values(i) = lambda[i];
    Eigen::Vector2cd v;
    if (diagonal) {
      // Pick the coordinate axis of the matching diagonal entry.
      const bool first = i == 0 ? std::abs(lambda[0] - a) <= std::abs(lambda[0] - d)
                                : !(std::abs(lambda[0] - a) <= std::abs(lambda[0] - d));
      v = first ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
    } else if (std::abs(b) >= std::abs(c)) {
      v = unit(b, lambda[i] - a);
    } else {
      v = unit(lambda[i] - d, c);
    }
    out.vectors.col(i) = v;
  }
  return out;
}

EigenDecomposition eigen_n(const CMatrix& h) {
  require_square(h, "eigen_n argument");
  Eigen::ComplexEigenSolver<CMatrix> solver(h, true);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "complex eigen solver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenDecomposition eigen(const CMatrix& h) {
  if (h.rows() == 2 && h.cols() == 2) return eigen_2x2(h);
  return eigen_n(h);
}

std::vector<Complex> sorted_eigenvalues(const CMatrix& h) {
  const CVector values = eigen(h).values;
  std::vector<Complex> out(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
    if (x.imag() != y.imag()) return x.imag() > y.imag();
    return x.real() < y.real();
  });
  return out;
}

CMatrix structured_lambert_w(BranchIndex k, const StructuredM& m) {
  require_finite(m.m21, "m21");
  require_finite(m.m22, "m22");
  const double norm = std::hypot(std::abs(m.m21), std::abs(m.m22));
  if (std::abs(m.m22) <= kHybridZeroTolerance * norm) {
    // Nilpotent: W_0(N) = W_0(0) I + W_0'(0) N = N.
    return StructuredM{m.m21, 0.0}.matrix();
  }
  const Complex w = lambert_w(k, m.m22);
  return StructuredM{m.m21 / m.m22 * w, w}.matrix();
}

CMatrix matrix_lambert_w(BranchIndex k, const CMatrix& h) {
  require_square(h, "matrix_lambert_w argument");
  const Eigen::Index n = h.rows();
  const double norm = h.norm();
  if (norm == 0.0) return CMatrix::Zero(n, n);

  const double zero_tol = kHybridZeroTolerance * norm;
  const auto is_zero = [&](Complex lambda) { return std::abs(lambda) <= zero_tol; };
  const auto w_of = [&](Complex lambda) { return is_zero(lambda) ? Complex(0.0) : lambert_w(k, lambda); };

  if (n == 1) return CMatrix::Constant(1, 1, w_of(h(0, 0)));

  if (n == 2) {
    const CVector lambda = eigen_2x2(h).values;
    const Complex l1 = lambda(0), l2 = lambda(1);
    const CMatrix id = CMatrix::Identity(2, 2);
    if (is_zero(l1) && is_zero(l2)) return h;  // nilpotent, W_0'(0) = 1

    const bool hybrid_split = is_zero(l1) != is_zero(l2);
    const double separation = std::abs(l1 - l2);
    if (!hybrid_split && separation <= kCoincidentSeparation * std::max(1.0, std::abs(l1))) {
      const Complex mid = 0.5 * (l1 + l2);
      const CMatrix nilpotent_part = h - mid * id;
      const Complex w_mid = w_of(mid);
      if (nilpotent_part.norm() <= 1e-14 * norm) return w_mid * id;
      if (std::abs(w_mid + 1.0) < 1e-6 || (k.value() == 0 && std::abs(mid - kInvE) < 1e-12)) {
        throw Error(ErrorCode::BranchPointJordanBlock,
                    "2x2 Jordan block at an eigenvalue where W' is not available");
      }
      return w_mid * id + lambert_w_prime(k, mid) * nilpotent_part;
    }
    const Complex w1 = w_of(l1);
    const Complex w2 = w_of(l2);
    return w1 * id + (w2 - w1) / (l2 - l1) * (h - l1 * id);
  }

  const EigenDecomposition eig = eigen_n(h);
  const Eigen::JacobiSVD<CMatrix> svd(eig.vectors);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxEigenvectorCondition)) {
    throw Error(ErrorCode::DefectiveUnsupported,
                "matrix Lambert W of a non-diagonalisable " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  CVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = w_of(eig.values(i));
  const CMatrix scaled = eig.vectors * w.asDiagonal();
  // W V = V diag(w)  =>  W = (V diag(w)) V^-1
  return eig.vectors.transpose().partialPivLu().solve(scaled.transpose()).transpose();
}

}  // namespace lambert_dde
