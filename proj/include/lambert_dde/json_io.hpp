#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lambert_dde/branch_solver.hpp"
#include "lambert_dde/dde_core.hpp"
#include "lambert_dde/root_mapper.hpp"
#include "lambert_dde/seed_factory.hpp"

namespace lambert_dde {

using Json = nlohmann::ordered_json;

[[nodiscard]] Json to_json(Complex z);
[[nodiscard]] Json to_json(const CMatrix& m);
[[nodiscard]] Json to_json(const std::vector<Complex>& zs);
[[nodiscard]] Json to_json(const DdeSystem& sys);
[[nodiscard]] Json to_json(const SolveReport& report);
[[nodiscard]] Json to_json(const SeedRecipe& recipe);
[[nodiscard]] Json to_json(const RootReport& report);
[[nodiscard]] Json to_json(const Region& region);

/// Object with "A", "B" (row-major arrays of arrays) and "tau".
/// Throws InvalidArgument on a malformed document.
[[nodiscard]] DdeSystem system_from_json(const Json& doc);
[[nodiscard]] DdeSystem load_system(const std::string& path);
void save_system(const DdeSystem& sys, const std::string& path);

/// Deterministic text: keys in insertion order, two-space indent, floats
/// as %.17g, non-finite floats as null.
[[nodiscard]] std::string dump(const Json& doc);

struct CsvRoot {
  Complex root;
  double residual = 0.0;
  std::optional<int> branch;
  std::string source;
};

/// Columns re, im, residual, branch, source; an empty branch cell when unknown.
void write_roots_csv(std::ostream& out, const std::vector<CsvRoot>& rows);

/// %.17g formatting of a single double.
[[nodiscard]] std::string format_double(double v);

}  // namespace lambert_dde
