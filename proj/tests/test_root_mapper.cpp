#include <gtest/gtest.h>

#include <random>

#include "lambert_dde/root_mapper.hpp"

using namespace lambert_dde;

namespace {

RMatrix rmat2(double a, double b, double c, double d) {
  RMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

DdeSystem delay_five() { return DdeSystem(rmat2(0, 1, -5, -1), rmat2(0, 0, -3, -0.6), 5.0); }
DdeSystem origin_system() { return DdeSystem(rmat2(0, 1, -1, 0), rmat2(0, 0, 1, 0), 1.0); }

double distance_to(const std::vector<Complex>& roots, Complex z) {
  double best = INFINITY;
  for (const Complex r : roots) best = std::min(best, std::abs(r - z));
  return best;
}

ErrorCode code_of(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Region, GridGuard) {
  const DdeSystem sys = delay_five();
  EXPECT_DOUBLE_EQ(max_grid_step(sys, 0.0, 0.5), kPi / 20.0);
  EXPECT_DOUBLE_EQ(max_grid_step(sys, -40.0, 10.0), kPi / (20.0 * 40.0));
  const Region r = Region::make(sys, -1, 0.5, 0, 27.3);
  EXPECT_DOUBLE_EQ(r.grid_step, max_grid_step(sys, 0, 27.3));
  EXPECT_EQ(Region::make(sys, -1, 0.5, 0, 27.3, 1e-3).grid_step, 1e-3);
  EXPECT_TRUE(r.contains({-1.0, 0.0}));
  EXPECT_FALSE(r.contains({0.6, 1.0}));
}

TEST(Region, Errors) {
  const DdeSystem sys = delay_five();
  EXPECT_EQ(code_of([&] { (void)Region::make(sys, 1, 0, 0, 1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { (void)Region::make(sys, 0, 1, 2, 2); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { (void)Region::make(sys, 0, 1, 0, 10, 1.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { (void)Region::make(sys, 0, 1, 0, 10, -1e-3); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { (void)Region::make(sys, NAN, 1, 0, 10); }), ErrorCode::InvalidArgument);
  Region bad{0, 1, 0, 1, 0.0};
  EXPECT_EQ(code_of([&] { validate_region(sys, bad); }), ErrorCode::InvalidArgument);
}

TEST(CharDerivative, MatchesFiniteDifference) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  RMatrix a3(3, 3), b3(3, 3);
  for (int i = 0; i < 9; ++i) {
    a3(i / 3, i % 3) = u(rng);
    b3(i / 3, i % 3) = u(rng);
  }
  const DdeSystem systems[] = {delay_five(), origin_system(), DdeSystem(a3, b3, 0.8)};
  for (const DdeSystem& sys : systems) {
    for (int i = 0; i < 20; ++i) {
      const Complex z(u(rng), 3.0 * u(rng));
      const double h = 1e-6;
      const Complex fd = (char_function(sys, z + h) - char_function(sys, z - h)) / (2.0 * h);
      const Complex d = char_derivative(sys, z);
      EXPECT_LT(std::abs(d - fd), 1e-6 * std::max(1.0, std::abs(d))) << z;
    }
  }
}

TEST(CharDerivative, SingularDelta) {
  // Delta(0) is singular for the origin system; adj keeps the formula valid.
  const Complex fd = (char_function(origin_system(), 1e-6) - char_function(origin_system(), -1e-6)) / 2e-6;
  EXPECT_LT(std::abs(char_derivative(origin_system(), 0.0) - fd), 1e-6);
}

TEST(RefineRoot, MonotoneHistory) {
  const DdeSystem sys = delay_five();
  const Complex start(0.1, 1.6);
  const Refinement r = refine_root(sys, start, char_scale(sys, start));
  ASSERT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.root - Complex(0.0377, 1.7911)), 1e-3);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LT(r.history[i], r.history[i - 1]);
  EXPECT_LT(r.residual, 1e-10 * char_scale(sys, r.root));
}

TEST(MapRoots, DelayFiveWindow) {
  const DdeSystem sys = delay_five();
  const RootReport r = map_roots(sys, Region::make(sys, -1, 0.5, 0, 27.3));
  EXPECT_TRUE(r.validated);
  EXPECT_EQ(r.roots.size(), 22u);
  EXPECT_EQ(r.argument_count, 22);
  EXPECT_EQ(r.refined_count, 22);
  EXPECT_GE(r.grid_candidates, 22);
  for (const Complex z : {Complex(0.0377, 1.7911), Complex(-0.0204, 2.7705), Complex(-0.4113, 6.4803),
                          Complex(-0.4658, 7.7500), Complex(-0.6169, 14.0734)}) {
    EXPECT_LT(distance_to(r.roots, z), 1e-3) << z;
  }
  for (std::size_t i = 0; i < r.roots.size(); ++i) {
    EXPECT_EQ(r.multiplicities[i], 1);
    EXPECT_LE(r.residuals[i], 1e-10 * r.scale);
  }
  for (std::size_t i = 1; i < r.roots.size(); ++i) EXPECT_LE(r.roots[i - 1].imag(), r.roots[i].imag());
}

TEST(MapRoots, OriginSystemUnitSquare) {
  const DdeSystem sys = origin_system();
  const RootReport r = map_roots(sys, Region::make(sys, -1, 1, -1, 1));
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_LT(std::abs(r.roots[0]), 1e-12);
  EXPECT_EQ(r.argument_count, 1);
}

TEST(MapRoots, ZeroDelayMatchesEigenvalues) {
  const DdeSystem sys(rmat2(-1, 0, 0, -2), RMatrix::Zero(2, 2), 1.0);
  const RootReport r = map_roots(sys, Region::make(sys, -3, 0.5, -1, 1));
  ASSERT_EQ(r.roots.size(), 2u);
  EXPECT_LT(distance_to(r.roots, -1.0), 1e-12);
  EXPECT_LT(distance_to(r.roots, -2.0), 1e-12);
}

TEST(MapRoots, DoubleRootCountsTwice) {
  const DdeSystem sys(rmat2(-1, 0, 0, -1), RMatrix::Zero(2, 2), 1.0);
  const RootReport r = map_roots(sys, Region::make(sys, -2.1, 0.3, -0.7, 0.9));
  EXPECT_EQ(r.argument_count, 2);
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_EQ(r.multiplicities[0], 2);
  EXPECT_EQ(r.refined_count, 2);
}

TEST(MapRoots, EmptyRegion) {
  const DdeSystem sys = delay_five();
  const RootReport r = map_roots(sys, Region::make(sys, 1, 2, 0.1, 1));
  EXPECT_TRUE(r.roots.empty());
  EXPECT_EQ(r.argument_count, 0);
  EXPECT_TRUE(r.validated);
}

TEST(MapRoots, BoundaryRootSuspected) {
  const DdeSystem sys = origin_system();
  EXPECT_EQ(code_of([&] { (void)map_roots(sys, Region::make(sys, 0, 1, -1, 1)); }), ErrorCode::BoundaryRootSuspected);
  EXPECT_EQ(code_of([&] { (void)winding_number(sys, Region::make(sys, -1, 1, 0, 1), 1.0); }),
            ErrorCode::BoundaryRootSuspected);
}

TEST(WindingNumber, ConjugateHalves) {
  const DdeSystem sys = delay_five();
  const Region upper = Region::make(sys, -1, 0.5, 0.1, 15);
  const Region lower = Region::make(sys, -1, 0.5, -15, -0.1);
  const int up = winding_number(sys, upper, 1.0);
  EXPECT_EQ(up, winding_number(sys, lower, 1.0));
  EXPECT_GT(up, 0);
}

TEST(ScanRoots, WideDelayFiveRegion) {
  const DdeSystem sys = delay_five();
  const RootReport r = scan_roots(sys, Region::make(sys, -1, 0.5, 0, 90));
  EXPECT_TRUE(r.validated);
  EXPECT_EQ(r.argument_count, 71);
  EXPECT_EQ(r.refined_count, 71);
}

TEST(ScanRoots, LargerSystemAgreesWithWinding) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RMatrix a3(3, 3), b3(3, 3);
  for (int i = 0; i < 9; ++i) {
    a3(i / 3, i % 3) = u(rng);
    b3(i / 3, i % 3) = u(rng);
  }
  const DdeSystem sys(a3, b3, 1.0);
  const RootReport r = scan_roots(sys, Region::make(sys, -3.03, 2.01, -10.07, 10.03));
  EXPECT_TRUE(r.validated) << r.refined_count << " vs " << r.argument_count;
  for (const Complex z : r.roots) EXPECT_LT(distance_to(r.roots, std::conj(z)), 1e-7);
}
