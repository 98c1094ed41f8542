#include <gtest/gtest.h>

#include <random>

#include <Eigen/LU>

#include "lambert_dde/lambert_w.hpp"
#include "lambert_dde/matrix_fun.hpp"

using namespace lambert_dde;

namespace {

CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

double defining_residual(const CMatrix& w, const CMatrix& h) {
  return (w * mat_exp(w) - h).norm() / std::max(1.0, h.norm());
}

CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

TEST(MatExp, ClosedForms) {
  EXPECT_LT((mat_exp(CMatrix::Zero(3, 3)) - CMatrix::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LT((mat_exp(mat2(1, 0, 0, 2)) - mat2(kE, 0, 0, kE * kE)).norm(), 1e-13);
  EXPECT_LT((mat_exp(mat2(0, 1, 0, 0)) - mat2(1, 1, 0, 1)).norm(), 1e-15);
  const double t = 0.7;
  EXPECT_LT((mat_exp(mat2(0, -t, t, 0)) - mat2(std::cos(t), -std::sin(t), std::sin(t), std::cos(t))).norm(), 1e-15);
  EXPECT_LT(std::abs(mat_exp(CMatrix::Constant(1, 1, Complex(0.0, kPi)))(0, 0) + 1.0), 1e-15);
}

TEST(MatExp, CommutingProduct) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    CVector x(4), y(4);
    for (int j = 0; j < 4; ++j) {
      x(j) = Complex(g(rng), g(rng));
      y(j) = Complex(g(rng), g(rng));
    }
    const CMatrix xm = x.asDiagonal(), ym = y.asDiagonal();
    EXPECT_LT((mat_exp(xm + ym) - mat_exp(xm) * mat_exp(ym)).norm(), 1e-12 * mat_exp(xm + ym).norm());
  }
}

TEST(MatExp, MatchesEigendecomposition) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    const CMatrix x = random_matrix(rng, 3, 1.0);
    const EigenDecomposition e = eigen_n(x);
    const CVector ev = e.values.array().exp();
    const CMatrix oracle = e.vectors * ev.asDiagonal() * e.vectors.inverse();
    EXPECT_LT((mat_exp(x) - oracle).norm(), 1e-10 * oracle.norm());
  }
}

TEST(MatExp, RejectsBadShapes) {
  EXPECT_THROW((void)mat_exp(CMatrix(2, 3)), Error);
  EXPECT_THROW((void)mat_exp(CMatrix(0, 0)), Error);
}

TEST(MatrixLambertW, ZeroAndNilpotent) {
  EXPECT_EQ(matrix_lambert_w(0, CMatrix::Zero(2, 2)), CMatrix::Zero(2, 2));
  const CMatrix n = mat2(0, 0, 7.5, 0);
  EXPECT_EQ(matrix_lambert_w(0, n), n);
  EXPECT_EQ(matrix_lambert_w(-1, n), n);
}

TEST(MatrixLambertW, DominantStructuredExample) {
  const double c = 1162.8 / 5.3766;
  const CMatrix w = matrix_lambert_w(0, mat2(0, 0, 8.9521 * c, 1162.8));
  EXPECT_LT((w - mat2(0, 0, 8.9521, 5.3766)).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(MatrixLambertW, DiagonalIsScalarwise) {
  const CMatrix w = matrix_lambert_w(2, mat2(1.0, 0, 0, Complex(-3.0, 1.0)));
  EXPECT_LT(std::abs(w(0, 0) - lambert_w(2, 1.0)), 1e-14);
  EXPECT_LT(std::abs(w(1, 1) - lambert_w(2, Complex(-3.0, 1.0))), 1e-14);
  EXPECT_EQ(w(0, 1), Complex(0.0));
}

TEST(MatrixLambertW, JordanBlockUsesDerivative) {
  const Complex a(2.0, 0.5);
  const CMatrix w = matrix_lambert_w(0, mat2(a, 1.0, 0, a));
  EXPECT_LT(std::abs(w(0, 0) - lambert_w(0, a)), 1e-13);
  EXPECT_LT(std::abs(w(0, 1) - lambert_w_prime(0, a)), 1e-12);
  EXPECT_LT(defining_residual(w, mat2(a, 1.0, 0, a)), 1e-12);
}

TEST(MatrixLambertW, NearlyCoincidentEigenvalues) {
  const CMatrix h = mat2(3.0, 1.0, 1e-13, 3.0);
  EXPECT_LT(defining_residual(matrix_lambert_w(1, h), h), 1e-10);
}

TEST(MatrixLambertW, HybridRuleOnZeroEigenvalue) {
  const CMatrix h = mat2(0, 0, 1.0, 2.0);
  for (const int k : {-3, -1, 1, 4}) {
    const CMatrix w = matrix_lambert_w(k, h);
    EXPECT_LT(defining_residual(w, h), 1e-12) << "k=" << k;
    const auto ev = sorted_eigenvalues(w);
    EXPECT_TRUE(std::abs(ev[0]) < 1e-12 || std::abs(ev[1]) < 1e-12);
  }
}

TEST(MatrixLambertW, DefiningEquationRandom) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Index n = 2 + i % 3;
    const CMatrix h = random_matrix(rng, n, 3.0);
    for (const int k : {0, -1, 1, 3}) {
      EXPECT_LT(defining_residual(matrix_lambert_w(k, h), h), 1e-9) << "n=" << n << " k=" << k;
    }
  }
}

TEST(MatrixLambertW, BranchPointJordanBlock) {
  for (const int k : {0, -1}) {
    try {
      (void)matrix_lambert_w(k, mat2(-kInvE, 1.0, 0, -kInvE));
      FAIL() << "k=" << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BranchPointJordanBlock);
    }
  }
  try {
    (void)matrix_lambert_w(0, mat2(kInvE, 1.0, 0, kInvE));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BranchPointJordanBlock);
  }
}

TEST(MatrixLambertW, DefectiveLargerMatrix) {
  CMatrix j = CMatrix::Zero(3, 3);
  j << 2, 1, 0, 0, 2, 1, 0, 0, 2;
  try {
    (void)matrix_lambert_w(0, j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DefectiveUnsupported);
  }
}

TEST(MatrixLambertW, RejectsNonSquare) { EXPECT_THROW((void)matrix_lambert_w(0, CMatrix::Zero(2, 3)), Error); }

TEST(StructuredLambertW, ClosedForms) {
  EXPECT_EQ(structured_lambert_w(0, {7.0, 0.0}), mat2(0, 0, 7.0, 0));
  EXPECT_LT((structured_lambert_w(0, {0.0, kE}) - mat2(0, 0, 0, 1)).norm(), 1e-15);

  const double w22 = -1.1692;
  const double m22 = w22 * std::exp(w22);
  const double m21 = -967.2027 / w22 * m22;
  const CMatrix w = structured_lambert_w(-1, {m21, m22});
  EXPECT_LT((w - mat2(0, 0, -967.2027, -1.1692)).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(StructuredLambertW, AgreesWithGeneralForm) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const StructuredM m{Complex(g(rng), g(rng)), Complex(g(rng), g(rng))};
    for (const int k : {0, -1, 2, -5}) {
      const CMatrix s = structured_lambert_w(k, m);
      const CMatrix h = matrix_lambert_w(k, m.matrix());
      EXPECT_LT((s - h).norm(), 1e-8 * std::max(1.0, s.norm()));
    }
  }
}

TEST(StructuredM, FromMatrix) {
  EXPECT_TRUE(StructuredM::from_matrix(mat2(0, 0, 1, 2)).has_value());
  EXPECT_FALSE(StructuredM::from_matrix(mat2(1e-300, 0, 1, 2)).has_value());
  EXPECT_FALSE(StructuredM::from_matrix(CMatrix::Zero(3, 3)).has_value());
  const auto m = StructuredM::from_matrix(mat2(0, 0, 3, 4));
  EXPECT_EQ(m->m21, Complex(3.0));
  EXPECT_EQ(m->m22, Complex(4.0));
}

TEST(Eigen, TwoByTwoExamples) {
  const auto dominant = sorted_eigenvalues(mat2(0, 1, -3.2096, 0.0753));
  EXPECT_NEAR(dominant[0].real(), 0.0377, 1e-3);
  EXPECT_NEAR(dominant[0].imag(), 1.7911, 1e-3);
  EXPECT_NEAR(dominant[1].imag(), -1.7911, 1e-3);

  const auto id = sorted_eigenvalues(CMatrix::Identity(2, 2));
  EXPECT_EQ(id[0], Complex(1.0));
  EXPECT_EQ(id[1], Complex(1.0));

  const auto companion = sorted_eigenvalues(mat2(0, 1, -6, 5));
  EXPECT_NEAR(companion[0].real(), 2.0, 1e-14);
  EXPECT_NEAR(companion[1].real(), 3.0, 1e-14);
}

TEST(Eigen, PairResiduals) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const CMatrix h = random_matrix(rng, 2 + i % 4, 5.0);
    const EigenDecomposition e = eigen(h);
    for (Eigen::Index j = 0; j < h.rows(); ++j) {
      EXPECT_LT((h * e.vectors.col(j) - e.values(j) * e.vectors.col(j)).norm(), 1e-10 * h.norm());
      EXPECT_NEAR(e.vectors.col(j).norm(), 1.0, 1e-12);
    }
  }
}

TEST(Eigen, DiagonalTwoByTwoVectors) {
  const EigenDecomposition e = eigen_2x2(mat2(1, 0, 0, 5));
  for (int j = 0; j < 2; ++j) {
    EXPECT_LT((mat2(1, 0, 0, 5) * e.vectors.col(j) - e.values(j) * e.vectors.col(j)).norm(), 1e-15);
  }
}
