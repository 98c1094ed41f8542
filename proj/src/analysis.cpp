#include "lambert_dde/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <set>

namespace lambert_dde {

namespace {

constexpr double kRealSnap = 1e-9;
constexpr double kRecoverTol = 1e-6;

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

std::vector<Complex> conjugate_closure(const std::vector<Complex>& roots) {
  std::vector<Complex> out;
  const auto present = [&](Complex z) {
    return std::any_of(out.begin(), out.end(), [&](Complex w) { return std::abs(w - z) <= kRecoverTol * std::max(1.0, std::abs(z)); });
  };
  for (Complex z : roots) {
    if (std::abs(z.imag()) <= kRealSnap * std::max(1.0, std::abs(z))) z = Complex(z.real(), 0.0);
    if (!present(z)) out.push_back(z);
    if (z.imag() != 0.0 && !present(std::conj(z))) out.push_back(std::conj(z));
  }
  return out;
}

bool recovered_pair(const SolveReport& report, const SeedRecipe& recipe) {
  if (!report.converged) return false;
  const std::vector<Complex> pair{recipe.pair.first, recipe.pair.second};
  const double tol = kRecoverTol * std::max({1.0, std::abs(pair[0]), std::abs(pair[1])});
  return same_root_set(report.roots, pair, tol);
}

PairOutcome solve_recipe(const DdeSystem& sys, const SeedRecipe& recipe, const SolveOptions& opts) {
  PairOutcome outcome{recipe, {}, false};
  try {
    outcome.report = solve_branch(sys, recipe.branch, recipe.m, opts, recipe.provenance);
  } catch (const Error& e) {
    outcome.report.branch = recipe.branch;
    outcome.report.seed_provenance = recipe.provenance;
    outcome.report.m = recipe.m;
    outcome.report.final_residual = std::numeric_limits<double>::infinity();
    outcome.report.diagnostic = e.what();
  }
  outcome.recovered = recovered_pair(outcome.report, recipe);
  return outcome;
}

const Complex* nearest(const std::vector<Complex>& roots, Complex target) {
  const Complex* best = nullptr;
  for (const Complex& z : roots) {
    if (!best || std::abs(z - target) < std::abs(*best - target)) best = &z;
  }
  return best;
}

Json checks_json(const std::vector<Check>& checks) {
  Json out = Json::array();
  for (const Check& c : checks) {
    Json item;
    item["name"] = c.name;
    item["passed"] = c.passed;
    item["detail"] = c.detail;
    out.push_back(std::move(item));
  }
  return out;
}

Json outcome_json(const PairOutcome& o) {
  Json item;
  item["recipe"] = to_json(o.recipe);
  item["solve"] = to_json(o.report);
  item["recovered"] = o.recovered;
  return item;
}

CMatrix seed_from_q(const DdeSystem& sys, double q21, double q22) {
  CMatrix q(2, 2);
  q << 1.0, 1.0, q21, q22;
  return sys.tau() * sys.b().cast<Complex>() * q;
}

double max_entry_gap(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

PipelineResult run_pipeline(const DdeSystem& sys, const Region& region, const SolveOptions& opts) {
  const CompanionDde companion(sys);
  PipelineResult result;
  result.region = region;
  result.oracle = map_roots(sys, region);
  result.closed_roots = conjugate_closure(result.oracle.roots);
  for (const Complex z : result.closed_roots) result.closed_residuals.push_back(std::abs(char_function(sys, z)));
  result.pairing = pair_all_roots(companion, result.closed_roots);

  if (sys.b().isZero(0.0)) result.warnings.emplace_back("B = 0: the roots are the eigenvalues of A");
  if (!result.pairing.two_branch_hypothesis) {
    result.warnings.emplace_back("odd real-root count; complex-relaxed seeds used");
  }
  for (const Complex z : result.pairing.uncovered) {
    result.warnings.push_back(fmt("root %.6g%+.6gi has no partner and is not covered", z.real(), z.imag()));
  }

  result.outcomes.resize(result.pairing.recipes.size());
  for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
    result.outcomes[i] = solve_recipe(sys, result.pairing.recipes[i], opts);
  }

  bool all_two = result.pairing.uncovered.empty();
  for (const PairOutcome& o : result.outcomes) {
    if (o.report.branch == 0) ++result.branch_zero_pairs;
    if (o.report.branch == -1) ++result.branch_minus_one_pairs;
    if (!o.recovered || (o.report.branch != 0 && o.report.branch != -1)) all_two = false;
    if (!o.recovered) {
      result.warnings.push_back(fmt("pair at %.6g%+.6gi was not recovered", o.recipe.pair.first.real(),
                                    o.recipe.pair.first.imag()));
    }
  }
  result.two_branches_sufficed = all_two;
  return result;
}

Json to_json(const PipelineResult& result) {
  Json doc;
  doc["region"] = to_json(result.region);
  doc["oracle"] = to_json(result.oracle);
  doc["closed_roots"] = to_json(result.closed_roots);
  doc["real_root_count"] = result.pairing.real_root_count;
  Json pairs = Json::array();
  for (const PairOutcome& o : result.outcomes) pairs.push_back(outcome_json(o));
  doc["pairs"] = std::move(pairs);
  doc["branch_counts"] = {{"0", result.branch_zero_pairs}, {"-1", result.branch_minus_one_pairs}};
  doc["verdict"] = std::string("two branches sufficed: ") + (result.two_branches_sufficed ? "yes" : "no");
  doc["warnings"] = result.warnings;
  return doc;
}

std::vector<CsvRoot> csv_rows(const PipelineResult& result, const std::string& source) {
  std::vector<CsvRoot> rows;
  for (std::size_t i = 0; i < result.closed_roots.size(); ++i) {
    const Complex z = result.closed_roots[i];
    CsvRoot row{z, result.closed_residuals[i], std::nullopt, source};
    for (const PairOutcome& o : result.outcomes) {
      const double tol = kRecoverTol * std::max(1.0, std::abs(z));
      if (std::abs(o.recipe.pair.first - z) <= tol || std::abs(o.recipe.pair.second - z) <= tol) {
        row.branch = o.recipe.branch;
        break;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

CompanionDde builtin_system(int example) {
  switch (example) {
    case 1: return CompanionDde::from_coefficients(-5.0, -1.0, -3.0, -0.6, 5.0);
    case 2: return CompanionDde::from_coefficients(-1.0, 0.0, 1.0, 0.0, 1.0);
    default: throw Error(ErrorCode::InvalidArgument, "unknown example " + std::to_string(example));
  }
}

Region builtin_window(int example) {
  const CompanionDde sys = builtin_system(example);
  if (example == 1) return Region::make(sys.system(), -1.0, 0.5, 0.0, 27.3);
  return Region::make(sys.system(), -3.0, 0.5, -40.0, 40.0);
}

namespace {

void add_check(std::vector<Check>& checks, std::string name, bool passed, std::string detail) {
  checks.push_back({std::move(name), passed, std::move(detail)});
}

Json root_table(const PipelineResult& pipe) {
  Json table = Json::array();
  for (const CsvRoot& row : csv_rows(pipe, "oracle")) {
    Json item;
    item["root"] = to_json(row.root);
    item["residual"] = row.residual;
    item["branch"] = row.branch ? Json(*row.branch) : Json(nullptr);
    table.push_back(std::move(item));
  }
  return table;
}

ReproBundle repro_delay_five() {
  const CompanionDde c = builtin_system(1);
  const DdeSystem& sys = c.system();
  ReproBundle bundle;
  bundle.example = 1;
  auto& checks = bundle.checks;

  const PipelineResult pipe = run_pipeline(sys, builtin_window(1));
  const std::vector<Complex>& oracle = pipe.oracle.roots;
  add_check(checks, "window holds 22 upper-half roots", oracle.size() == 22 && pipe.oracle.validated,
            std::to_string(oracle.size()) + " roots, winding " + std::to_string(pipe.oracle.argument_count));
  add_check(checks, "branch split 11 / 11", pipe.branch_zero_pairs == 11 && pipe.branch_minus_one_pairs == 11,
            std::to_string(pipe.branch_zero_pairs) + " on 0, " + std::to_string(pipe.branch_minus_one_pairs) + " on -1");
  add_check(checks, "two branches sufficed", pipe.two_branches_sufficed, pipe.two_branches_sufficed ? "yes" : "no");

  // Dominant pair.
  const Complex dominant = *nearest(oracle, Complex(0.0377, 1.7911));
  const SeedRecipe dom_recipe = seed_conjugate_pair(c, dominant);
  CMatrix w_expected = CMatrix::Zero(2, 2), m_expected = CMatrix::Zero(2, 2);
  w_expected << 0.0, 0.0, 8.9521, 5.3766;
  m_expected << 0.0, 0.0, 1936.1, 1162.8;
  const PairOutcome dom = solve_recipe(sys, dom_recipe, {});
  add_check(checks, "dominant root on branch 0", std::abs(dominant - Complex(0.0377, 1.7911)) <= 1e-3 && dom_recipe.branch == 0,
            fmt("root %.6f%+.6fi", dominant.real(), dominant.imag()) + " branch " + std::to_string(dom_recipe.branch));
  add_check(checks, "dominant W target", max_entry_gap(dom_recipe.w_target, w_expected) <= 1e-3,
            fmt("max entry gap %.3g", max_entry_gap(dom_recipe.w_target, w_expected)));
  add_check(checks, "dominant seed M", max_entry_gap(dom_recipe.m, m_expected) <= 0.5,
            fmt("max entry gap %.3g", max_entry_gap(dom_recipe.m, m_expected)));
  add_check(checks, "dominant solve converges in <= 3 iterations", dom.recovered && dom.report.iterations <= 3,
            std::to_string(dom.report.iterations) + " iterations");

  // Principal branch reaches more than one pair.
  struct QSeed {
    const char* label;
    int branch;
    double q21, q22;
    Complex expected;
  };
  const QSeed q_seeds[] = {
      {"Q0", 0, -650.3812, -392.6121, Complex(0.0377, 1.7911)},
      {"Q", 0, 145.3412, -5.7175, Complex(-0.4113, 6.4803)},
      {"Q-1", -1, 95.1384, -4.8789, Complex(-0.6169, 14.0734)},
  };
  Json q_runs = Json::array();
  std::vector<std::vector<Complex>> principal_sets;
  for (const QSeed& q : q_seeds) {
    const SolveReport rep = solve_branch(sys, q.branch, seed_from_q(sys, q.q21, q.q22), {}, SeedProvenance::User);
    const bool hit = rep.converged && !rep.roots.empty() && std::abs(*nearest(rep.roots, q.expected) - q.expected) <= 1e-3;
    if (hit && q.branch == 0 &&
        std::none_of(principal_sets.begin(), principal_sets.end(),
                     [&](const std::vector<Complex>& s) { return same_root_set(s, rep.roots, 1e-6); })) {
      principal_sets.push_back(rep.roots);
    }
    add_check(checks, std::string("seed ") + q.label + " on branch " + std::to_string(q.branch),
              hit, fmt("expected %.4f%+.4fi", q.expected.real(), q.expected.imag()));
    Json run;
    run["label"] = q.label;
    run["q21"] = q.q21;
    run["q22"] = q.q22;
    run["solve"] = to_json(rep);
    q_runs.push_back(std::move(run));
  }
  add_check(checks, "branch 0 yields at least two distinct pairs", principal_sets.size() >= 2,
            std::to_string(principal_sets.size()) + " distinct pairs");

  // Non-conjugate pairs on higher branches.
  const Complex first = *nearest(oracle, Complex(-0.0204, 2.7705));
  const Complex second = *nearest(oracle, Complex(-0.4658, 7.7500));
  Json non_conjugate = Json::array();
  const struct {
    Complex l1;
    int expected_branch;
  } demos[] = {{first, 9}, {std::conj(first), 4}};
  for (const auto& demo : demos) {
    const SeedRecipe recipe = seed_general_pair(c, demo.l1, second);
    const PairOutcome o = solve_recipe(sys, recipe, {});
    add_check(checks, "non-conjugate pair on branch " + std::to_string(demo.expected_branch),
              recipe.branch == demo.expected_branch && o.recovered,
              "branch " + std::to_string(recipe.branch) + (o.recovered ? ", recovered" : ", not recovered"));
    non_conjugate.push_back(outcome_json(o));
  }
  const Complex w9 = seed_general_pair(c, first, second).w_target(1, 1);
  add_check(checks, "branch 9 w22", std::abs(w9 - Complex(2.5693, 52.6026)) <= 1e-2,
            fmt("w22 = %.4f%+.4fi", w9.real(), w9.imag()));

  // The unseeded default is reported as observed.
  Json defaults = Json::array();
  for (const int k : {0, -1}) {
    Json run;
    run["branch"] = k;
    run["solve"] = to_json(solve_branch(sys, k, default_seed(sys), {}, SeedProvenance::Default));
    defaults.push_back(std::move(run));
  }

  Json& doc = bundle.doc;
  doc["example"] = 1;
  doc["system"] = to_json(sys);
  doc["window"] = to_json(pipe.region);
  doc["roots"] = root_table(pipe);
  doc["pipeline"] = to_json(pipe);
  doc["dominant_pair"] = outcome_json(dom);
  doc["q_seeds"] = std::move(q_runs);
  doc["non_conjugate"] = std::move(non_conjugate);
  doc["default_seed"] = std::move(defaults);
  doc["checks"] = checks_json(checks);
  bundle.csv = csv_rows(pipe, "oracle");
  return bundle;
}

ReproBundle repro_origin_root() {
  const CompanionDde c = builtin_system(2);
  const DdeSystem& sys = c.system();
  ReproBundle bundle;
  bundle.example = 2;
  auto& checks = bundle.checks;

  const PipelineResult pipe = run_pipeline(sys, builtin_window(2));
  const Complex f0 = char_function(sys, 0.0);
  add_check(checks, "char_function(0) is exactly 0", f0 == 0.0, fmt("f(0) = %.17g%+.17gi", f0.real(), f0.imag()));

  Complex rightmost = pipe.closed_roots.front();
  for (const Complex z : pipe.closed_roots) {
    if (z.real() > rightmost.real()) rightmost = z;
  }
  add_check(checks, "origin is the rightmost root", std::abs(rightmost) <= 1e-9,
            fmt("rightmost %.3g%+.3gi", rightmost.real(), rightmost.imag()));

  const RealSObstruction obstruction = real_s_obstruction(c, 0.0, -10.0, 10.0);
  add_check(checks, "no real companion S has eigenvalue 0", obstruction.contradiction_holds,
            fmt("min residual %.3g at s22 = %.3g", obstruction.min_residual, obstruction.argmin_s22));

  // Complex partners from a wider strip.
  const Region wide = Region::make(sys, -8.0, 0.5, -40.0, 40.0);
  const RootReport wide_roots = map_roots(sys, wide);
  std::set<int> origin_branches;
  Json relaxed = Json::array();
  bool relaxed_form = true;
  for (const Complex mu : wide_roots.roots) {
    if (std::abs(mu.imag()) <= kRealSnap) continue;
    const SeedRecipe recipe = seed_general_pair(c, 0.0, mu);
    CMatrix w_expected = CMatrix::Zero(2, 2);
    w_expected(1, 0) = sys.tau();
    w_expected(1, 1) = sys.tau() * mu;
    relaxed_form = relaxed_form && recipe.case_tag == SeedCase::ComplexRelaxed &&
                   max_entry_gap(recipe.w_target, w_expected) <= 1e-12;
    const PairOutcome o = solve_recipe(sys, recipe, {});
    if (o.recovered) origin_branches.insert(recipe.branch);
    relaxed.push_back(outcome_json(o));
  }
  std::string branch_list;
  for (const int k : origin_branches) branch_list += (branch_list.empty() ? "" : " ") + std::to_string(k);
  add_check(checks, "complex-relaxed W has the form [[0,0],[tau, tau mu]]", relaxed_form, "");
  add_check(checks, "origin reached on at least 3 branches", origin_branches.size() >= 3, "branches " + branch_list);

  // Every conjugate pair from branch -1 seeds.
  Json sweep = Json::array();
  int pairs = 0, reached = 0;
  for (const Complex z : wide_roots.roots) {
    if (z.imag() <= kRealSnap) continue;
    ++pairs;
    const SeedRecipe recipe = seed_conjugate_pair(c, z);
    PairOutcome o{recipe, solve_branch(sys, -1, recipe.m, {}, recipe.provenance), false};
    o.recovered = recipe.branch == -1 && recovered_pair(o.report, recipe);
    if (o.recovered) ++reached;
    sweep.push_back(outcome_json(o));
  }
  add_check(checks, "conjugate pairs all reached on branch -1", pairs > 0 && reached == pairs,
            std::to_string(reached) + " of " + std::to_string(pairs));

  Json origin;
  origin["root"] = to_json(Complex(0.0, 0.0));
  origin["char_function"] = to_json(f0);
  origin["rightmost_oracle_root"] = to_json(rightmost);
  origin["real_s_min_residual"] = obstruction.min_residual;
  origin["real_s_argmin_s22"] = obstruction.argmin_s22;
  origin["other_real_root_found"] = obstruction.other_real_root_found;
  origin["flag"] = "not reachable with real principal-branch S";

  Json& doc = bundle.doc;
  doc["example"] = 2;
  doc["system"] = to_json(sys);
  doc["window"] = to_json(pipe.region);
  doc["roots"] = root_table(pipe);
  doc["origin"] = std::move(origin);
  doc["pipeline"] = to_json(pipe);
  doc["relaxation_region"] = to_json(wide);
  doc["complex_relaxed"] = std::move(relaxed);
  doc["branch_minus_one_sweep"] = std::move(sweep);
  doc["checks"] = checks_json(checks);
  bundle.csv = csv_rows(pipe, "oracle");
  return bundle;
}

}  // namespace

ReproBundle build_repro(int example) {
  switch (example) {
    case 1: return repro_delay_five();
    case 2: return repro_origin_root();
    default: throw Error(ErrorCode::InvalidArgument, "unknown example " + std::to_string(example));
  }
}

bool ReproBundle::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

}  // namespace lambert_dde
