#pragma once

#include <optional>

#include "lambert_dde/types.hpp"

namespace lambert_dde {

/// The two free entries of M = [[0, 0], [m21, m22]], the shape M takes when
/// B has a zero first row.
struct StructuredM {
  Complex m21;
  Complex m22;

  [[nodiscard]] CMatrix matrix() const;
  /// Some(M) iff `m` is 2x2 with an exactly zero first row.
  [[nodiscard]] static std::optional<StructuredM> from_matrix(const CMatrix& m);
};

/// exp(X) by scaling and squaring with a Pade approximant.
[[nodiscard]] CMatrix mat_exp(const CMatrix& x);

/// Matrix Lambert W with the hybrid-branch rule: eigenvalues with
/// |lambda| <= 1e-12 ||H|| are evaluated on branch 0, all others on branch k.
///
/// 2x2 inputs use the exact two-point interpolation form, so both the
/// structured M and 2x2 Jordan blocks are covered. Larger inputs must be
/// diagonalisable with an eigenvector condition number <= 1e8.
[[nodiscard]] CMatrix matrix_lambert_w(BranchIndex k, const CMatrix& h);

/// Closed form [[0, 0], [(m21/m22) W_k(m22), W_k(m22)]]; for m22 = 0 the
/// nilpotent matrix itself (effective branch 0).
[[nodiscard]] CMatrix structured_lambert_w(BranchIndex k, const StructuredM& m);

struct EigenDecomposition {
  CVector values;
  CMatrix vectors;  // unit columns
};

/// Closed-form quadratic eigenpairs of a 2x2 matrix.
[[nodiscard]] EigenDecomposition eigen_2x2(const CMatrix& h);
/// General square matrix (complex Schur based).
[[nodiscard]] EigenDecomposition eigen_n(const CMatrix& h);
/// Dispatches to eigen_2x2 for n == 2.
[[nodiscard]] EigenDecomposition eigen(const CMatrix& h);

/// Eigenvalues sorted by descending imaginary part, then ascending real part.
[[nodiscard]] std::vector<Complex> sorted_eigenvalues(const CMatrix& h);

}  // namespace lambert_dde
