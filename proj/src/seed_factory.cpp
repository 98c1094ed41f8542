#include "lambert_dde/seed_factory.hpp"

#include <algorithm>
#include <limits>

#include "lambert_dde/lambert_w.hpp"

namespace lambert_dde {

const char* to_string(SeedCase c) noexcept {
  switch (c) {
    case SeedCase::ConjugatePair: return "conjugate-pair";
    case SeedCase::RealPair: return "real-pair";
    case SeedCase::DegenerateTrace: return "degenerate-trace";
    case SeedCase::GeneralPair: return "general-pair";
    case SeedCase::ComplexRelaxed: return "complex-relaxed";
  }
  return "general-pair";
}

namespace {

constexpr double kCertifyTolerance = 1e-9;
constexpr double kDegenerateTolerance = 1e-13;

enum class BranchRule { RealRanges, BranchOf };

// The reverse pass shared by every construction: S from the pair's
// symmetric functions, W = tau (S - A), M = W exp(W) in structured form.
SeedRecipe reverse_engineer(const CompanionDde& sys, Complex lambda1, Complex lambda2, Complex product, Complex sum,
                            BranchRule rule, SeedCase tag, SeedProvenance provenance) {
  const double tau = sys.tau();
  SeedRecipe recipe;
  recipe.pair = {lambda1, lambda2};
  recipe.provenance = provenance;

  recipe.s_target = CMatrix::Zero(2, 2);
  recipe.s_target(0, 1) = 1.0;
  recipe.s_target(1, 0) = -product;
  recipe.s_target(1, 1) = sum;
  recipe.w_target = tau * (recipe.s_target - sys.system().a().cast<Complex>());

  const Complex w21 = recipe.w_target(1, 0);
  const Complex w22 = recipe.w_target(1, 1);
  const double degenerate_scale = std::max({1.0, tau * std::abs(sys.a22()), tau * std::abs(sum)});
  if (std::abs(w22) <= kDegenerateTolerance * degenerate_scale) {
    recipe.w_target(1, 1) = 0.0;
    recipe.m = StructuredM{w21, 0.0}.matrix();
    recipe.branch = 0;
    recipe.requested_branch = 0;
    recipe.case_tag = SeedCase::DegenerateTrace;
  } else {
    const Complex m22 = w22 * std::exp(w22);
    recipe.m = StructuredM{w21 / w22 * m22, m22}.matrix();
    if (rule == BranchRule::RealRanges) {
      recipe.branch = w22.real() >= -1.0 ? 0 : -1;
    } else {
      recipe.branch = branch_of(w22).value();
    }
    recipe.requested_branch = recipe.branch;
    recipe.case_tag = tag;
  }

  try {
    recipe.residual = residual_branch(sys.system(), recipe.branch, recipe.m).norm() / sys.system().residual_scale();
  } catch (const Error& e) {
    recipe.residual = std::numeric_limits<double>::infinity();
    recipe.diagnostic = e.what();
  }
  recipe.certified = recipe.residual <= kCertifyTolerance;
  if (!recipe.certified && recipe.diagnostic.empty()) {
    recipe.diagnostic = "NotACharacteristicRoot: branch residual " + std::to_string(recipe.residual);
  }
  return recipe;
}

bool is_real(Complex z, double tol) { return std::abs(z.imag()) <= tol * std::max(1.0, std::abs(z)); }

}  // namespace

SeedRecipe seed_conjugate_pair(const CompanionDde& sys, Complex lambda) {
  require_finite(lambda, "lambda");
  if (lambda.imag() == 0.0) throw Error(ErrorCode::InvalidArgument, "conjugate-pair seed needs Im(lambda) != 0");
  const double modulus_sq = std::norm(lambda);
  const double trace = 2.0 * lambda.real();
  return reverse_engineer(sys, lambda, std::conj(lambda), modulus_sq, trace, BranchRule::RealRanges,
                          SeedCase::ConjugatePair, SeedProvenance::Prop1);
}

SeedRecipe seed_real_pair(const CompanionDde& sys, double lambda1, double lambda2) {
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2)) {
    throw Error(ErrorCode::InvalidArgument, "real-pair seed needs finite roots");
  }
  if (lambda1 == lambda2) throw Error(ErrorCode::InvalidArgument, "real-pair seed needs distinct roots");
  return reverse_engineer(sys, lambda1, lambda2, lambda1 * lambda2, lambda1 + lambda2, BranchRule::RealRanges,
                          SeedCase::RealPair, SeedProvenance::Prop2);
}

SeedRecipe seed_general_pair(const CompanionDde& sys, Complex lambda1, Complex lambda2) {
  require_finite(lambda1, "lambda1");
  require_finite(lambda2, "lambda2");
  if (lambda1 == lambda2) throw Error(ErrorCode::InvalidArgument, "general-pair seed needs distinct roots");
  const bool relaxed = is_real(lambda1, 1e-12) != is_real(lambda2, 1e-12);
  return reverse_engineer(sys, lambda1, lambda2, lambda1 * lambda2, lambda1 + lambda2, BranchRule::BranchOf,
                          relaxed ? SeedCase::ComplexRelaxed : SeedCase::GeneralPair, SeedProvenance::GeneralPair);
}

SeedRecipe seed_for_pair(const CompanionDde& sys, Complex lambda1, Complex lambda2, double tol) {
  const double scale = tol * std::max({1.0, std::abs(lambda1), std::abs(lambda2)});
  if (is_real(lambda1, tol) && is_real(lambda2, tol)) return seed_real_pair(sys, lambda1.real(), lambda2.real());
  if (!is_real(lambda1, tol) && std::abs(lambda1 - std::conj(lambda2)) <= scale) {
    return seed_conjugate_pair(sys, lambda1);
  }
  return seed_general_pair(sys, lambda1, lambda2);
}

Pairing pair_all_roots(const CompanionDde& sys, std::span<const Complex> roots, double tol) {
  std::vector<double> reals;
  std::vector<Complex> upper, lower;
  for (const Complex r : roots) {
    require_finite(r, "root");
    if (is_real(r, tol)) {
      reals.push_back(r.real());
    } else if (r.imag() > 0.0) {
      upper.push_back(r);
    } else {
      lower.push_back(r);
    }
  }

  std::sort(upper.begin(), upper.end(), [](Complex x, Complex y) {
    return x.imag() != y.imag() ? x.imag() < y.imag() : x.real() < y.real();
  });
  std::vector<bool> lower_used(lower.size(), false);
  for (const Complex u : upper) {
    std::size_t best = lower.size();
    double best_distance = tol * std::max(1.0, std::abs(u));
    for (std::size_t j = 0; j < lower.size(); ++j) {
      const double d = std::abs(std::conj(u) - lower[j]);
      if (!lower_used[j] && d <= best_distance) {
        best = j;
        best_distance = d;
      }
    }
    if (best == lower.size()) {
      throw Error(ErrorCode::ConjugationClosureViolated, "no conjugate partner for a root with Im = " +
                                                             std::to_string(u.imag()));
    }
    lower_used[best] = true;
  }
  if (std::find(lower_used.begin(), lower_used.end(), false) != lower_used.end()) {
    throw Error(ErrorCode::ConjugationClosureViolated, "a root in the lower half-plane has no conjugate partner");
  }

  Pairing out;
  out.real_root_count = reals.size();
  out.two_branch_hypothesis = reals.size() != 1;

  for (const Complex u : upper) out.recipes.push_back(seed_conjugate_pair(sys, u));

  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) out.recipes.push_back(seed_real_pair(sys, reals[i], reals[i + 1]));
  if (reals.size() % 2 == 1) {
    const double leftover = reals.back();
    if (reals.size() >= 3) {
      out.recipes.push_back(seed_real_pair(sys, reals[reals.size() - 2], leftover));
    } else if (!upper.empty()) {
      const auto nearest = std::min_element(upper.begin(), upper.end(), [&](Complex x, Complex y) {
        return std::abs(x - leftover) < std::abs(y - leftover);
      });
      out.recipes.push_back(seed_general_pair(sys, leftover, *nearest));
    } else {
      out.uncovered.emplace_back(leftover, 0.0);
    }
  }
  return out;
}

RealSObstruction real_s_obstruction(const CompanionDde& sys, double real_root, double s22_min, double s22_max,
                                    int samples) {
  if (!(s22_min < s22_max) || samples < 3) {
    throw Error(ErrorCode::InvalidArgument, "real_s_obstruction needs s22_min < s22_max and >= 3 samples");
  }
  const auto residual_at = [&](double s22) {
    CMatrix s = CMatrix::Zero(2, 2);
    s(0, 1) = 1.0;
    s(1, 0) = real_root * real_root - s22 * real_root;
    s(1, 1) = s22;
    return residual_solution(sys.system(), s).norm();
  };

  RealSObstruction out;
  out.min_residual = std::numeric_limits<double>::infinity();
  const double step = (s22_max - s22_min) / (samples - 1);
  int best = 0;
  for (int i = 0; i < samples; ++i) {
    const double r = residual_at(s22_min + i * step);
    if (r < out.min_residual) {
      out.min_residual = r;
      best = i;
    }
  }

  // Golden-section polish inside the bracketing cells.
  double lo = s22_min + std::max(0, best - 1) * step;
  double hi = s22_min + std::min(samples - 1, best + 1) * step;
  const double golden = 0.6180339887498949;
  double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
  double f1 = residual_at(x1), f2 = residual_at(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = residual_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = residual_at(x2);
    }
  }
  out.argmin_s22 = s22_min + best * step;
  if (std::min(f1, f2) < out.min_residual) {
    out.min_residual = std::min(f1, f2);
    out.argmin_s22 = f1 < f2 ? x1 : x2;
  }

  // The second eigenvalue is s22 - r; scan the characteristic function there.
  const auto f_real = [&](double mu) { return char_function(sys.system(), mu).real(); };
  double prev_mu = s22_min - real_root;
  double prev_f = f_real(prev_mu);
  for (int i = 1; i < samples; ++i) {
    const double mu = s22_min - real_root + i * step;
    const double f = f_real(mu);
    const bool brackets_r = prev_mu - step <= real_root && real_root <= mu + step;
    if (!brackets_r && ((prev_f < 0.0) != (f < 0.0) || f == 0.0)) out.other_real_root_found = true;
    prev_mu = mu;
    prev_f = f;
  }
  out.contradiction_holds = !out.other_real_root_found && out.min_residual > 1e-6;
  return out;
}

}  // namespace lambert_dde
