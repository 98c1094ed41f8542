// lambert-dde: characteristic roots of x' = A x + B x(t - tau) through the
// matrix Lambert W function, with an independent root-mapping oracle.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lambert_dde/analysis.hpp"
#include "lambert_dde/lambert_w.hpp"

using namespace lambert_dde;

namespace {

enum Exit { kOk = 0, kUsage = 1, kDomain = 2, kValidation = 3 };

struct Common {
  std::string system_path;
  std::vector<double> region;
  double grid_step = 0.0;
  std::string out_path;
  std::string format = "json";
};

void emit(const Common& c, const std::string& text) {
  if (c.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.out_path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + c.out_path);
  out << text;
}

std::string csv_text(const std::vector<CsvRoot>& rows) {
  std::ostringstream out;
  write_roots_csv(out, rows);
  return out.str();
}

Region region_of(const Common& c, const DdeSystem& sys) {
  if (c.region.size() != 4) throw Error(ErrorCode::InvalidArgument, "--region needs re_min re_max im_min im_max");
  return Region::make(sys, c.region[0], c.region[1], c.region[2], c.region[3],
                      c.grid_step > 0.0 ? std::optional<double>(c.grid_step) : std::nullopt);
}

std::string complex_text(Complex z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag() == 0.0 ? 0.0 : z.imag());
  return buf;
}

int run_w(const Common& c, int k, double re, double im) {
  const Complex z(re, im);
  const Complex w = lambert_w(k, z);
  const double residual = std::abs(w * std::exp(w) - z);
  if (c.format == "json") {
    Json doc;
    doc["branch"] = k;
    doc["z"] = to_json(z);
    doc["w"] = to_json(w);
    doc["residual"] = residual;
    emit(c, dump(doc) + "\n");
  } else {
    emit(c, "W_" + std::to_string(k) + "(" + complex_text(z) + ") = " + complex_text(w) + "\nresidual " +
                format_double(residual) + "\n");
  }
  return kOk;
}

int run_roots(const Common& c) {
  const DdeSystem sys = load_system(c.system_path);
  const RootReport report = map_roots(sys, region_of(c, sys));
  if (c.format == "csv") {
    std::vector<CsvRoot> rows;
    for (std::size_t i = 0; i < report.roots.size(); ++i) rows.push_back({report.roots[i], report.residuals[i], {}, "oracle"});
    emit(c, csv_text(rows));
  } else {
    emit(c, dump(to_json(report)) + "\n");
  }
  return kOk;
}

std::pair<Complex, Complex> pair_of(const std::vector<double>& p) {
  if (p.size() != 4) throw Error(ErrorCode::InvalidArgument, "--pair needs re1 im1 re2 im2");
  return {Complex(p[0], p[1]), Complex(p[2], p[3])};
}

int run_seed(const Common& c, const std::vector<double>& pair) {
  const CompanionDde sys(load_system(c.system_path));
  const auto [l1, l2] = pair_of(pair);
  emit(c, dump(to_json(seed_for_pair(sys, l1, l2))) + "\n");
  return kOk;
}

int run_solve(const Common& c, std::optional<int> branch, const std::vector<double>& pair,
              const std::vector<double>& seed_q, const SolveOptions& opts) {
  const DdeSystem sys = load_system(c.system_path);
  CMatrix m = default_seed(sys);
  SeedProvenance provenance = SeedProvenance::Default;
  int k = branch.value_or(0);
  if (!pair.empty()) {
    const auto [l1, l2] = pair_of(pair);
    const SeedRecipe recipe = seed_for_pair(CompanionDde(sys), l1, l2);
    m = recipe.m;
    provenance = recipe.provenance;
    if (!branch) k = recipe.branch;
  } else if (!seed_q.empty()) {
    const auto n = static_cast<std::size_t>(sys.dim());
    if (seed_q.size() != n * n) throw Error(ErrorCode::InvalidArgument, "--seed-q needs n*n row-major entries");
    CMatrix q(sys.dim(), sys.dim());
    for (std::size_t i = 0; i < seed_q.size(); ++i) q(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) = seed_q[i];
    m = sys.tau() * sys.b().cast<Complex>() * q;
    provenance = SeedProvenance::User;
  }
  const SolveReport report = solve_branch(sys, k, m, opts, provenance);
  if (c.format == "csv") {
    std::vector<CsvRoot> rows;
    for (std::size_t i = 0; i < report.roots.size(); ++i) {
      rows.push_back({report.roots[i], report.root_residuals[i], report.branch, to_string(report.seed_provenance)});
    }
    emit(c, csv_text(rows));
  } else {
    emit(c, dump(to_json(report)) + "\n");
  }
  return kOk;
}

int run_pipeline_cmd(const Common& c, const SolveOptions& opts) {
  const DdeSystem sys = load_system(c.system_path);
  const PipelineResult result = run_pipeline(sys, region_of(c, sys), opts);
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (c.format == "csv") {
    emit(c, csv_text(csv_rows(result, "pipeline")));
  } else {
    emit(c, dump(to_json(result)) + "\n");
  }
  return kOk;
}

int run_repro(const Common& c, int example) {
  const ReproBundle bundle = build_repro(example);
  if (c.format == "csv") {
    emit(c, csv_text(bundle.csv));
  } else {
    emit(c, dump(bundle.doc) + "\n");
  }
  for (const Check& check : bundle.checks) {
    if (!check.passed) std::cerr << "check failed: " << check.name << " (" << check.detail << ")\n";
  }
  return bundle.all_passed() ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristic roots of linear time-delay systems via the matrix Lambert W function"};
  app.require_subcommand(1, 1);

  Common common;
  const auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", common.out_path, "Write output to this file instead of stdout");
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };
  const auto add_system = [&](CLI::App* sub) {
    sub->add_option("--system", common.system_path, "System JSON file with keys A, B, tau")->required();
  };
  const auto add_region = [&](CLI::App* sub) {
    sub->add_option("--region", common.region, "re_min re_max im_min im_max")->expected(4)->required();
    sub->add_option("--grid-step", common.grid_step, "Grid step (default: the coarsest admissible)");
  };

  SolveOptions opts;
  const auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--max-iters", opts.max_iters, "Newton iteration cap");
    sub->add_option("--tol", opts.tol, "Residual tolerance relative to max(1, ||tau B||)");
  };

  int w_branch = 0;
  double w_re = 0.0, w_im = 0.0;
  CLI::App* w = app.add_subcommand("w", "Evaluate W_k(re + i im)");
  w->add_option("-k,--branch", w_branch, "Branch index");
  w->add_option("re", w_re, "Real part")->required();
  w->add_option("im", w_im, "Imaginary part");
  w->add_option("--out", common.out_path, "Write output to this file instead of stdout");
  std::string w_format = "text";
  w->add_option("--format", w_format, "Output format")->check(CLI::IsMember({"text", "json"}));

  CLI::App* roots = app.add_subcommand("roots", "Map characteristic roots in a rectangle");
  add_system(roots);
  add_region(roots);
  add_output(roots);

  std::optional<int> solve_branch_k;
  std::vector<double> pair, seed_q;
  CLI::App* solve = app.add_subcommand("solve", "Solve the branch equation for one branch");
  add_system(solve);
  solve->add_option("--branch", solve_branch_k, "Branch index (default 0, or the pair recipe's branch)");
  auto* pair_opt = solve->add_option("--pair", pair, "Seed from a root pair: re1 im1 re2 im2")->expected(4);
  solve->add_option("--seed-q", seed_q, "Seed M = tau B Q from Q given row-major")->excludes(pair_opt);
  add_solver(solve);
  add_output(solve);

  CLI::App* seed = app.add_subcommand("seed", "Build the seed recipe for a root pair");
  add_system(seed);
  seed->add_option("--pair", pair, "re1 im1 re2 im2")->expected(4)->required();
  add_output(seed);

  CLI::App* pipeline = app.add_subcommand("pipeline", "Map roots, pair them and solve every pair");
  add_system(pipeline);
  add_region(pipeline);
  add_solver(pipeline);
  add_output(pipeline);

  int example = 1;
  CLI::App* repro = app.add_subcommand("repro", "Reproduce a built-in case study (1 or 2)");
  repro->add_option("example", example, "Case study number")->required()->check(CLI::IsMember({1, 2}));
  add_output(repro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*w) {
      common.format = w_format;
      return run_w(common, w_branch, w_re, w_im);
    }
    if (*roots) return run_roots(common);
    if (*solve) return run_solve(common, solve_branch_k, pair, seed_q, opts);
    if (*seed) return run_seed(common, pair);
    if (*pipeline) return run_pipeline_cmd(common, opts);
    if (*repro) return run_repro(common, example);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.is_validation_failure()) return kValidation;
    return e.code() == ErrorCode::InvalidArgument ? kUsage : kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
