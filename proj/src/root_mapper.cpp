#include "lambert_dde/root_mapper.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "lambert_dde/parallel.hpp"

namespace lambert_dde {

namespace {

constexpr double kMergeDistance = 1e-7;
constexpr double kAcceptResidual = 1e-10;
constexpr double kBoundaryZero = 1e-13;
constexpr int kMaxPhaseDepth = 48;
constexpr Eigen::Index kBandRows = 64;

// Grid evaluation of det Delta with exp(-x tau) per column and
// exp(-i y tau) per row precomputed; closed forms for n = 1, 2.
class GridEvaluator {
 public:
  explicit GridEvaluator(const DdeSystem& sys) : sys_(sys) {}

  [[nodiscard]] Complex operator()(double x, double y, double decay, Complex phase) const {
    const Complex lambda(x, y);
    const Complex e = decay * phase;
    const RMatrix& a = sys_.a();
    const RMatrix& b = sys_.b();
    switch (sys_.dim()) {
      case 1: return lambda - a(0, 0) - b(0, 0) * e;
      case 2: {
        const Complex d00 = lambda - a(0, 0) - b(0, 0) * e;
        const Complex d11 = lambda - a(1, 1) - b(1, 1) * e;
        const Complex d01 = a(0, 1) + b(0, 1) * e;
        const Complex d10 = a(1, 0) + b(1, 0) * e;
        return d00 * d11 - d01 * d10;
      }
      default: return char_function(sys_, lambda);
    }
  }

 private:
  const DdeSystem& sys_;
};

double wrapped_arg(Complex ratio) { return std::arg(ratio); }

// Phase increment of f along the segment z0 -> z1, bisected until every
// piece turns by less than pi/4 and agrees with its halves.
double phase_increment(const DdeSystem& sys, Complex z0, Complex z1, Complex f0, Complex f1, double zero_level,
                       int depth) {
  const Complex zm = 0.5 * (z0 + z1);
  const Complex fm = char_function(sys, zm);
  if (std::abs(fm) <= zero_level) {
    throw Error(ErrorCode::BoundaryRootSuspected, "f vanishes on the contour near " + std::to_string(zm.real()) +
                                                      (zm.imag() < 0 ? "" : "+") + std::to_string(zm.imag()) + "i");
  }
  const double d1 = wrapped_arg(fm / f0);
  const double d2 = wrapped_arg(f1 / fm);
  const double whole = wrapped_arg(f1 / f0);
  if (std::abs(d1) < kPi / 4 && std::abs(d2) < kPi / 4 && std::abs(d1 + d2 - whole) < 1e-9) return d1 + d2;
  if (depth >= kMaxPhaseDepth) {
    throw Error(ErrorCode::BoundaryRootSuspected, "phase of f unresolved on the contour");
  }
  return phase_increment(sys, z0, zm, f0, fm, zero_level, depth + 1) +
         phase_increment(sys, zm, z1, fm, f1, zero_level, depth + 1);
}

// Winding number along a closed polygon sampled at `points`.
int polygon_winding(const DdeSystem& sys, const std::vector<Complex>& points, double zero_level) {
  std::vector<Complex> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    values[i] = char_function(sys, points[i]);
    if (std::abs(values[i]) <= zero_level) {
      throw Error(ErrorCode::BoundaryRootSuspected, "f vanishes at a contour sample");
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t j = (i + 1) % points.size();
    total += phase_increment(sys, points[i], points[j], values[i], values[j], zero_level, 0);
  }
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-3) {
    throw Error(ErrorCode::BoundaryRootSuspected, "contour phase is not a whole number of turns");
  }
  return static_cast<int>(rounded);
}

void append_edge(std::vector<Complex>& points, Complex from, Complex to, double step) {
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(to - from) / step)));
  for (int i = 0; i < pieces; ++i) points.push_back(from + (to - from) * (static_cast<double>(i) / pieces));
}

int local_multiplicity(const DdeSystem& sys, Complex center, double radius) {
  std::vector<Complex> points;
  constexpr int kSamples = 32;
  for (int i = 0; i < kSamples; ++i) points.push_back(center + std::polar(radius, kTwoPi * i / kSamples));
  try {
    return std::max(1, polygon_winding(sys, points, 0.0));
  } catch (const Error&) {
    return 1;
  }
}

CMatrix adjugate(const CMatrix& m) {
  const Eigen::Index n = m.rows();
  if (n == 1) return CMatrix::Ones(1, 1);
  if (n == 2) {
    CMatrix adj(2, 2);
    adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return adj;
  }
  CMatrix adj(n, n);
  CMatrix minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = m(r, c);
        }
        ++mr;
      }
      const double sign = (i + j) % 2 == 0 ? 1.0 : -1.0;
      adj(j, i) = sign * minor.partialPivLu().determinant();
    }
  }
  return adj;
}

double corner_scale(const DdeSystem& sys, const Region& region) {
  double scale = 0.0;
  for (const double x : {region.re_min, region.re_max}) {
    for (const double y : {region.im_min, region.im_max}) {
      scale = std::max(scale, std::abs(char_function(sys, Complex(x, y))));
    }
  }
  return scale > 0.0 ? scale : 1.0;
}

// Cells of the sampling grid where the zero sets of Re f and Im f meet.
std::vector<Complex> grid_candidates(const DdeSystem& sys, const Region& region) {
  const double width = region.re_max - region.re_min;
  const double height = region.im_max - region.im_min;
  const auto nx = static_cast<Eigen::Index>(std::max(1.0, std::ceil(width / region.grid_step)));
  const auto ny = static_cast<Eigen::Index>(std::max(1.0, std::ceil(height / region.grid_step)));
  const double hx = width / static_cast<double>(nx);
  const double hy = height / static_cast<double>(ny);
  const double tau = sys.tau();

  std::vector<double> xs(nx + 1), decay(nx + 1);
  for (Eigen::Index i = 0; i <= nx; ++i) {
    xs[i] = i == nx ? region.re_max : region.re_min + static_cast<double>(i) * hx;
    decay[i] = std::exp(-xs[i] * tau);
  }

  const GridEvaluator f(sys);
  const std::size_t bands = static_cast<std::size_t>((ny + kBandRows - 1) / kBandRows);
  std::vector<std::vector<Complex>> found(bands);
  parallel_for(bands, [&](std::size_t band) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(band) * kBandRows;
    const Eigen::Index r1 = std::min(ny, r0 + kBandRows);
    std::vector<Complex> below(nx + 1), above(nx + 1);
    const auto fill_row = [&](Eigen::Index r, std::vector<Complex>& row) {
      const double y = r == ny ? region.im_max : region.im_min + static_cast<double>(r) * hy;
      const Complex phase = std::polar(1.0, -y * tau);
      for (Eigen::Index i = 0; i <= nx; ++i) row[i] = f(xs[i], y, decay[i], phase);
      return y;
    };
    double y_below = fill_row(r0, below);
    for (Eigen::Index r = r0; r < r1; ++r) {
      const double y_above = fill_row(r + 1, above);
      for (Eigen::Index i = 0; i < nx; ++i) {
        const Complex c[4] = {below[i], below[i + 1], above[i], above[i + 1]};
        bool re_pos = false, re_neg = false, im_pos = false, im_neg = false;
        for (const Complex v : c) {
          (v.real() >= 0.0 ? re_pos : re_neg) = true;
          (v.imag() >= 0.0 ? im_pos : im_neg) = true;
        }
        if (re_pos && re_neg && im_pos && im_neg) {
          found[band].emplace_back(0.5 * (xs[i] + xs[i + 1]), 0.5 * (y_below + y_above));
        }
      }
      std::swap(below, above);
      y_below = y_above;
    }
  });

  std::vector<Complex> out;
  for (auto& v : found) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace

double max_grid_step(const DdeSystem& sys, double im_min, double im_max) {
  const double extent = std::max({1.0, std::abs(im_min), std::abs(im_max)});
  return kPi / (4.0 * sys.tau() * extent);
}

void validate_region(const DdeSystem& sys, const Region& region) {
  for (const double v : {region.re_min, region.re_max, region.im_min, region.im_max, region.grid_step}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "region values must be finite");
  }
  if (!(region.re_min < region.re_max) || !(region.im_min < region.im_max)) {
    throw Error(ErrorCode::InvalidArgument, "region needs re_min < re_max and im_min < im_max");
  }
  if (!(region.grid_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid step must be > 0");
  const double limit = max_grid_step(sys, region.im_min, region.im_max);
  if (region.grid_step > limit * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidArgument,
                "grid step " + std::to_string(region.grid_step) + " exceeds the limit " + std::to_string(limit));
  }
}

Region Region::make(const DdeSystem& sys, double re_min, double re_max, double im_min, double im_max,
                    std::optional<double> grid_step) {
  Region r{re_min, re_max, im_min, im_max, 0.0};
  if (std::isfinite(im_min) && std::isfinite(im_max)) {
    r.grid_step = grid_step.value_or(max_grid_step(sys, im_min, im_max));
  } else {
    r.grid_step = grid_step.value_or(1.0);
  }
  validate_region(sys, r);
  return r;
}

Complex char_derivative(const DdeSystem& sys, Complex lambda) {
  const CMatrix delta = char_matrix(sys, lambda);
  CMatrix delta_prime = sys.tau() * std::exp(-lambda * sys.tau()) * sys.b().cast<Complex>();
  delta_prime.diagonal().array() += 1.0;
  return (adjugate(delta) * delta_prime).trace();
}

int winding_number(const DdeSystem& sys, const Region& region, double scale) {
  validate_region(sys, region);
  const Complex c00(region.re_min, region.im_min), c10(region.re_max, region.im_min);
  const Complex c11(region.re_max, region.im_max), c01(region.re_min, region.im_max);
  std::vector<Complex> points;
  append_edge(points, c00, c10, region.grid_step);
  append_edge(points, c10, c11, region.grid_step);
  append_edge(points, c11, c01, region.grid_step);
  append_edge(points, c01, c00, region.grid_step);
  return polygon_winding(sys, points, kBoundaryZero * scale);
}

Refinement refine_root(const DdeSystem& sys, Complex start, double scale, int max_iters) {
  Refinement out;
  Complex lambda = start;
  Complex f = char_function(sys, lambda);
  out.history.push_back(std::abs(f));
  for (int it = 0; it < max_iters && f != 0.0; ++it) {
    const Complex d = char_derivative(sys, lambda);
    if (d == 0.0 || !is_finite(d)) break;
    const Complex step = f / d;
    bool accepted = false;
    for (double alpha = 1.0; alpha >= 1e-10; alpha *= 0.5) {
      const Complex trial = lambda - alpha * step;
      if (!is_finite(trial)) continue;
      const Complex ft = char_function(sys, trial);
      if (std::abs(ft) < std::abs(f)) {
        lambda = trial;
        f = ft;
        out.history.push_back(std::abs(f));
        accepted = alpha * std::abs(step) > 4.0 * 2.2e-16 * (1.0 + std::abs(lambda));
        break;
      }
    }
    if (!accepted) break;
  }
  out.root = lambda;
  out.residual = std::abs(f);
  out.converged = out.residual <= kAcceptResidual * scale;
  return out;
}

RootReport scan_roots(const DdeSystem& sys, const Region& region) {
  validate_region(sys, region);
  RootReport report;
  report.scale = corner_scale(sys, region);

  const std::vector<Complex> candidates = grid_candidates(sys, region);
  report.grid_candidates = static_cast<int>(candidates.size());

  std::vector<Refinement> refined(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) { refined[i] = refine_root(sys, candidates[i], report.scale); });

  std::vector<Complex> roots;
  std::vector<double> residuals;
  for (const Refinement& r : refined) {
    if (!r.converged || !region.contains(r.root)) continue;
    const auto same = std::find_if(roots.begin(), roots.end(), [&](Complex z) {
      return std::abs(z - r.root) <= kMergeDistance * std::max(1.0, std::abs(z));
    });
    if (same == roots.end()) {
      roots.push_back(r.root);
      residuals.push_back(r.residual);
    } else if (r.residual < residuals[same - roots.begin()]) {
      *same = r.root;
      residuals[same - roots.begin()] = r.residual;
    }
  }

  std::vector<std::size_t> order(roots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return roots[x].imag() != roots[y].imag() ? roots[x].imag() < roots[y].imag() : roots[x].real() < roots[y].real();
  });
  for (const std::size_t i : order) {
    double nearest = region.grid_step;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (j != i) nearest = std::min(nearest, 0.4 * std::abs(roots[i] - roots[j]));
    }
    report.roots.push_back(roots[i]);
    report.residuals.push_back(residuals[i]);
    report.multiplicities.push_back(local_multiplicity(sys, roots[i], std::max(nearest, 1e-6)));
    report.refined_count += report.multiplicities.back();
  }

  report.argument_count = winding_number(sys, region, report.scale);
  report.validated = report.argument_count == report.refined_count;
  return report;
}

RootReport map_roots(const DdeSystem& sys, const Region& region) {
  RootReport report = scan_roots(sys, region);
  const double slack = 1e-9;
  for (const Complex z : report.roots) {
    const double gap = std::min({z.real() - region.re_min, region.re_max - z.real(), z.imag() - region.im_min,
                                 region.im_max - z.imag()});
    if (gap <= slack * std::max(1.0, std::abs(z))) {
      throw Error(ErrorCode::BoundaryRootSuspected, "root on the region boundary at " + std::to_string(z.real()) +
                                                        (z.imag() < 0 ? "" : "+") + std::to_string(z.imag()) + "i");
    }
  }
  if (!report.validated) {
    throw Error(ErrorCode::CountMismatch, "refined count " + std::to_string(report.refined_count) +
                                              " differs from the winding number " +
                                              std::to_string(report.argument_count));
  }
  return report;
}

}  // namespace lambert_dde
