#include "lambert_dde/branch_solver.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/QR>

#include "lambert_dde/parallel.hpp"

namespace lambert_dde {

const char* to_string(SeedProvenance p) noexcept {
  switch (p) {
    case SeedProvenance::Default: return "default";
    case SeedProvenance::Prop1: return "prop1";
    case SeedProvenance::Prop2: return "prop2";
    case SeedProvenance::GeneralPair: return "general-pair";
    case SeedProvenance::User: return "user";
  }
  return "user";
}

namespace {

constexpr double kMinStepFraction = 1e-10;
constexpr double kStepCollapse = 1e-16;
constexpr double kArmijo = 1e-4;

// Unknown vector layout: (m21, m22) in structured mode, vec(M) otherwise.
struct Layout {
  bool structured;
  Eigen::Index n;

  [[nodiscard]] CVector pack(const CMatrix& m) const {
    if (structured) return CVector{{m(1, 0), m(1, 1)}};
    return m.reshaped();
  }

  [[nodiscard]] CMatrix unpack(const CVector& u) const {
    if (structured) return StructuredM{u(0), u(1)}.matrix();
    return u.reshaped(n, n);
  }

  // The first row of the residual vanishes identically in structured mode.
  [[nodiscard]] CVector equations(const CMatrix& r) const {
    if (structured) return r.row(1).transpose();
    return r.reshaped();
  }
};

struct Evaluation {
  CVector r;
  double norm;
};

class BranchEquation {
 public:
  BranchEquation(const DdeSystem& sys, BranchIndex k, Layout layout) : sys_(sys), k_(k), layout_(layout) {}

  [[nodiscard]] Evaluation evaluate_or_throw(const CVector& u) const {
    CVector r = layout_.equations(residual_branch(sys_, k_, layout_.unpack(u)));
    const double norm = r.norm();
    return {std::move(r), norm};
  }

  [[nodiscard]] std::optional<Evaluation> evaluate(const CVector& u) const {
    try {
      Evaluation e = evaluate_or_throw(u);
      if (!std::isfinite(e.norm)) return std::nullopt;
      return e;
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  // Central differences along the real axis of each unknown. The residual is
  // holomorphic in the unknowns, so a real step yields the complex
  // derivative and stays on one side of any branch cut met along the real
  // line. One-sided differences cover steps that leave the domain.
  [[nodiscard]] std::optional<CMatrix> jacobian(const CVector& u, const Evaluation& at) const {
    CMatrix jac(at.r.size(), u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(u(j)));
      CVector up = u, down = u;
      up(j) += h;
      down(j) -= h;
      const auto fp = evaluate(up);
      const auto fm = evaluate(down);
      if (fp && fm) {
        jac.col(j) = (fp->r - fm->r) / (2.0 * h);
      } else if (fp) {
        jac.col(j) = (fp->r - at.r) / h;
      } else if (fm) {
        jac.col(j) = (at.r - fm->r) / h;
      } else {
        return std::nullopt;
      }
    }
    return jac;
  }

 private:
  const DdeSystem& sys_;
  BranchIndex k_;
  Layout layout_;
};

}  // namespace

CMatrix default_seed(const DdeSystem& sys) {
  const CMatrix q = mat_exp(-sys.tau() * sys.a().cast<Complex>());
  return sys.tau() * sys.b().cast<Complex>() * q;
}

CMatrix q_from_m(const DdeSystem& sys, const CMatrix& m) {
  const CMatrix tau_b = sys.tau() * sys.b().cast<Complex>();
  return tau_b.completeOrthogonalDecomposition().solve(m);
}

SolveReport solve_branch(const DdeSystem& sys, BranchIndex k, const CMatrix& m_init, const SolveOptions& opts,
                         SeedProvenance provenance) {
  if (!(opts.tol > 0.0) || opts.max_iters < 1 || !(opts.damping > 0.0 && opts.damping < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "solve options need tol > 0, max_iters >= 1, 0 < damping < 1");
  }
  if (m_init.rows() != sys.dim() || m_init.cols() != sys.dim() || !all_finite(m_init)) {
    throw Error(ErrorCode::ShapeUnsupported, "seed M must be a finite matrix of the system dimension");
  }
  const bool can_structure = sys.dim() == 2 && sys.b_first_row_zero();
  const bool structured = opts.structured.value_or(can_structure);
  if (structured) {
    if (!can_structure) throw Error(ErrorCode::ShapeUnsupported, "structured mode needs a 2x2 B with zero first row");
    if (!StructuredM::from_matrix(m_init)) {
      throw Error(ErrorCode::ShapeUnsupported, "structured mode needs a seed M with zero first row");
    }
  }

  const Layout layout{structured, sys.dim()};
  const BranchEquation equation(sys, k, layout);
  const double target = opts.tol * sys.residual_scale();

  CVector u = layout.pack(m_init);
  Evaluation current = equation.evaluate_or_throw(u);

  SolveReport report;
  report.branch = k.value();
  report.seed_provenance = provenance;

  int iterations = 0;
  while (current.norm > target && iterations < opts.max_iters) {
    const auto jac = equation.jacobian(u, current);
    if (!jac) {
      report.diagnostic = "jacobian unavailable";
      break;
    }
    const CVector step = jac->completeOrthogonalDecomposition().solve(-current.r);
    if (!all_finite(step) || step.norm() <= kStepCollapse * std::max(1.0, u.norm())) {
      report.diagnostic = "newton step collapsed";
      break;
    }
    bool accepted = false;
    for (double alpha = 1.0; alpha >= kMinStepFraction; alpha *= opts.damping) {
      const CVector trial = u + alpha * step;
      const auto next = equation.evaluate(trial);
      if (next && next->norm < (1.0 - kArmijo * alpha) * current.norm) {
        u = trial;
        current = *next;
        accepted = true;
        break;
      }
    }
    ++iterations;
    if (!accepted) {
      report.diagnostic = "line search stalled";
      break;
    }
  }
  if (current.norm > target && report.diagnostic.empty()) report.diagnostic = "iteration cap reached";

  report.iterations = iterations;
  report.m = layout.unpack(u);
  report.final_residual = residual_branch(sys, k, report.m).norm();
  report.converged = report.final_residual <= target;
  if (report.converged) report.diagnostic.clear();
  report.s = s_from_m(sys, k, report.m);
  report.roots = sorted_eigenvalues(report.s);
  for (const Complex root : report.roots) {
    report.root_residuals.push_back(std::abs(char_function(sys, root)) / char_scale(sys, root));
  }
  return report;
}

bool same_root_set(std::span<const Complex> a, std::span<const Complex> b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const Complex x : a) {
    bool matched = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && std::abs(x - b[j]) <= tol) {
        used[j] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

SweepResult sweep_branches(const DdeSystem& sys, std::span<const int> branches, std::span<const BranchSeed> seeds,
                           const SolveOptions& opts) {
  SweepResult result;
  const std::size_t cells = branches.size() * seeds.size();
  result.reports.resize(cells);
  parallel_for(cells, [&](std::size_t cell) {
    const int k = branches[cell / seeds.size()];
    const BranchSeed& seed = seeds[cell % seeds.size()];
    SolveReport& out = result.reports[cell];
    try {
      out = solve_branch(sys, k, seed.m, opts, seed.provenance);
    } catch (const Error& e) {
      out = SolveReport{};
      out.branch = k;
      out.seed_provenance = seed.provenance;
      out.m = seed.m;
      out.final_residual = std::numeric_limits<double>::infinity();
      out.diagnostic = e.what();
    }
  });

  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const SolveReport& rep = result.reports[i];
    if (!rep.converged) continue;
    auto it = std::find_if(result.distinct.begin(), result.distinct.end(), [&](const DistinctRootSet& set) {
      return same_root_set(set.roots, rep.roots, 1e-6);
    });
    if (it == result.distinct.end()) {
      result.distinct.push_back({rep.roots, {}, {}});
      it = result.distinct.end() - 1;
    }
    if (std::find(it->branches.begin(), it->branches.end(), rep.branch) == it->branches.end()) {
      it->branches.push_back(rep.branch);
    }
    it->report_indices.push_back(i);
  }
  return result;
}

}  // namespace lambert_dde
