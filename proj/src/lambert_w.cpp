#include "lambert_dde/lambert_w.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>

namespace lambert_dde {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kStopTolerance = 1e-14;
constexpr double kAcceptTolerance = 1e-12;

Complex without_negative_zero(Complex z) {
  if (z.imag() == 0.0) return {z.real(), 0.0};
  return z;
}

// p = sqrt(2(e z + 1)), with z + 1/e formed in two parts to survive the
// cancellation at the branch point.
Complex branch_point_distance(Complex z) {
  const Complex shifted = (z + kInvE) + kInvELo;
  return std::sqrt(2.0 * kE * shifted);
}

Complex branch_point_series(Complex p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))));
}

Complex asymptotic_guess(int k, Complex z) {
  const Complex l1 = std::log(z) + Complex(0.0, kTwoPi * k);
  const Complex l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

struct Guess {
  Complex w;
  bool from_branch_point = false;
};

std::vector<Guess> initial_guesses(int k, Complex z) {
  std::vector<Guess> guesses;
  const bool near_branch_point = std::abs(z + kInvE) < 0.3;
  const bool real_negative_slot = z.imag() == 0.0 && z.real() < 0.0 && z.real() > -kInvE;

  if (k == 0) {
    if (near_branch_point) guesses.push_back({branch_point_series(branch_point_distance(z)), true});
    if (std::abs(z) < 0.3) guesses.push_back({z * (1.0 + z * (-1.0 + z * (1.5 - z * (8.0 / 3.0))))});
    if (std::abs(z) <= 3.0 && z.real() >= -1.0) {
      const Complex l = std::log(1.0 + z);
      guesses.push_back({l * (1.0 - std::log(1.0 + l) / (2.0 + l))});
    }
    guesses.push_back({asymptotic_guess(0, z)});
  } else if (k == -1) {
    if (near_branch_point && z.imag() >= 0.0) guesses.push_back({branch_point_series(-branch_point_distance(z)), true});
    if (real_negative_slot) {
      const double l1 = std::log(-z.real());
      const double l2 = std::log(-l1);
      guesses.push_back({Complex(l1 - l2 + l2 / l1, 0.0)});
    }
    guesses.push_back({asymptotic_guess(k, z)});
  } else if (k == 1) {
    if (near_branch_point && z.imag() < 0.0) guesses.push_back({branch_point_series(-branch_point_distance(z)), true});
    guesses.push_back({asymptotic_guess(k, z)});
  } else {
    guesses.push_back({asymptotic_guess(k, z)});
  }
  return guesses;
}

struct Polished {
  Complex w;
  double residual;
};

std::optional<Polished> halley(Complex w, Complex z) {
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxIterations; ++it) {
    const Complex ew = std::exp(w);
    const Complex f = w * ew - z;
    residual = std::abs(f);
    if (!std::isfinite(residual)) return std::nullopt;
    if (residual <= kStopTolerance * std::abs(z)) break;
    const Complex wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const Complex step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    if (!is_finite(step)) break;
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(w), 1e-300)) {
      residual = std::abs(w * std::exp(w) - z);
      break;
    }
  }
  if (!is_finite(w)) return std::nullopt;
  return Polished{w, residual};
}

bool on_branch(int k, Complex w) {
  if (branch_range_of(w) == k) return true;
  // Values on a cut image are ambiguous to the last bit.
  const double nudge = 1e-12 * (1.0 + std::abs(w));
  return branch_range_of(w - Complex(0.0, nudge)) == k || branch_range_of(w + Complex(0.0, nudge)) == k;
}

}  // namespace

Complex lambert_w(BranchIndex branch, Complex z) {
  require_finite(z, "lambert_w argument");
  const int k = branch.value();
  z = without_negative_zero(z);
  if (z == 0.0) {
    if (k == 0) return 0.0;
    throw Error(ErrorCode::DivergentBranchAtZero, "W_k(0) is infinite for k = " + std::to_string(k));
  }

  // Evaluating w e^w alone costs about eps (1 + |w|) |z|, which dominates
  // for very large branch indices.
  const auto accept_for = [&](Complex w) {
    return std::max(kAcceptTolerance * std::max(1.0, std::abs(z)),
                    8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w)) * std::abs(z));
  };
  std::optional<Polished> fallback;
  for (const Guess& guess : initial_guesses(k, z)) {
    const auto polished = halley(guess.w, z);
    if (!polished) continue;
    if (polished->residual > accept_for(polished->w)) continue;
    // The branch-point series is branch-correct by construction; right at
    // w = -1 the range test cannot separate the three adjacent branches.
    if (guess.from_branch_point && std::abs(polished->w + 1.0) < 1e-4) return polished->w;
    if (on_branch(k, polished->w)) return polished->w;
    if (!fallback || polished->residual < fallback->residual) fallback = polished;
  }
  // Branch-range disagreement but a sound residual only happens for |k|
  // large enough that the range test loses resolution.
  if (fallback && std::abs(k) > 1000) return fallback->w;
  throw Error(ErrorCode::NoConvergence,
              "Halley iteration failed for k = " + std::to_string(k) + ", z = (" + std::to_string(z.real()) +
                  ", " + std::to_string(z.imag()) + ")");
}

Complex lambert_w_prime(BranchIndex k, Complex z) {
  require_finite(z, "lambert_w_prime argument");
  z = without_negative_zero(z);
  if (z == 0.0) {
    if (k.value() == 0) return 1.0;
    throw Error(ErrorCode::DivergentBranchAtZero, "W_k'(0) is undefined for k != 0");
  }
  const Complex w = lambert_w(k, z);
  if (std::abs(1.0 + w) < 1e-6) {
    throw Error(ErrorCode::UndefinedDerivativeAtBranchPoint, "W'(-1/e) is not defined");
  }
  return w / (z * (1.0 + w));
}

int branch_range_of(Complex w) {
  const double x = w.real();
  const double y = w.imag();
  if (y == 0.0) return x >= -1.0 ? 0 : -1;

  const double ya = std::abs(y);
  const double turns = std::floor(ya / kPi);
  const auto n = static_cast<long long>(turns);
  const double r = ya - turns * kPi;
  if (n % 2 == 1) {
    // Strip between two boundary curves, away from the curves themselves.
    const int j = static_cast<int>((n - 1) / 2);
    return y > 0.0 ? j + 1 : -(j + 1);
  }
  const int j = static_cast<int>(n / 2);
  const double boundary = r == 0.0 ? -std::numeric_limits<double>::infinity() : -ya * std::cos(r) / std::sin(r);
  if (y > 0.0) return x >= boundary ? j : j + 1;
  return x > boundary ? -j : -(j + 1);
}

BranchIndex branch_of(Complex w) {
  require_finite(w, "branch_of argument");
  if (w == 0.0) return 0;
  const int classified = branch_range_of(w);
  const auto nearest = static_cast<int>(std::lround(w.imag() / kTwoPi));
  const std::array<int, 6> candidates{classified, nearest, nearest - 1, nearest + 1, classified - 1, classified + 1};

  const Complex z = w * std::exp(w);
  const double tol = 1e-9 * std::max(1.0, std::abs(w));
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int k = candidates[i];
    if (std::find(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(i), k) !=
        candidates.begin() + static_cast<std::ptrdiff_t>(i)) {
      continue;
    }
    try {
      if (std::abs(lambert_w(k, z) - w) <= tol) return k;
    } catch (const Error&) {
    }
  }
  return classified;
}

std::vector<RealBranchValue> real_branch_select(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "real_branch_select argument is not finite");
  if (x < -kInvE) throw Error(ErrorCode::NoRealSolution, "no real W for x < -1/e");
  if (x == -kInvE) return {{0, -1.0}, {-1, -1.0}};
  if (x == 0.0) return {{0, 0.0}};

  std::vector<RealBranchValue> out;
  out.push_back({0, lambert_w(0, x).real()});
  if (x < 0.0) out.push_back({-1, lambert_w(-1, x).real()});
  return out;
}

}  // namespace lambert_dde
