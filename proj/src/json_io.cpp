#include "lambert_dde/json_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lambert_dde {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const std::vector<Complex>& zs) {
  Json out = Json::array();
  for (const Complex z : zs) out.push_back(to_json(z));
  return out;
}

namespace {

Json real_matrix(const RMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

RMatrix parse_matrix(const Json& node, const char* name) {
  if (!node.is_array() || node.empty()) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be a non-empty array of rows");
  }
  const std::size_t rows = node.size();
  const std::size_t cols = node.front().is_array() ? node.front().size() : 0;
  RMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const Json& row = node[i];
    if (!row.is_array() || row.size() != cols || cols == 0) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " rows must be equal-length arrays");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!row[j].is_number()) throw Error(ErrorCode::InvalidArgument, std::string(name) + " entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return m;
}

void emit(std::ostream& out, const Json& node, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (node.type()) {
    case Json::value_t::object: {
      if (node.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = node.begin(); it != node.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << inner << Json(it.key()).dump() << ": ";
        emit(out, it.value(), indent + 1);
      }
      out << "\n" << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (node.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(node.begin(), node.end(), [](const Json& v) { return v.is_primitive(); });
      if (flat) {
        out << "[";
        for (std::size_t i = 0; i < node.size(); ++i) {
          if (i) out << ", ";
          emit(out, node[i], indent + 1);
        }
        out << "]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < node.size(); ++i) {
        if (i) out << ",\n";
        out << inner;
        emit(out, node[i], indent + 1);
      }
      out << "\n" << pad << "]";
      return;
    }
    case Json::value_t::number_float: out << format_double(node.get<double>()); return;
    default: out << node.dump(); return;
  }
}

}  // namespace

Json to_json(const DdeSystem& sys) {
  Json doc;
  doc["A"] = real_matrix(sys.a());
  doc["B"] = real_matrix(sys.b());
  doc["tau"] = sys.tau();
  return doc;
}

Json to_json(const SolveReport& report) {
  Json doc;
  doc["converged"] = report.converged;
  doc["iterations"] = report.iterations;
  doc["residual"] = report.final_residual;
  doc["branch"] = report.branch;
  doc["seed_provenance"] = to_string(report.seed_provenance);
  doc["M"] = to_json(report.m);
  doc["S"] = to_json(report.s);
  doc["roots"] = to_json(report.roots);
  doc["root_residuals"] = report.root_residuals;
  if (!report.diagnostic.empty()) doc["diagnostic"] = report.diagnostic;
  return doc;
}

Json to_json(const SeedRecipe& recipe) {
  Json doc;
  doc["branch"] = recipe.branch;
  doc["requested_branch"] = recipe.requested_branch;
  doc["pair"] = Json::array({to_json(recipe.pair.first), to_json(recipe.pair.second)});
  doc["case_tag"] = to_string(recipe.case_tag);
  doc["provenance"] = to_string(recipe.provenance);
  doc["S_target"] = to_json(recipe.s_target);
  doc["W_target"] = to_json(recipe.w_target);
  doc["M"] = to_json(recipe.m);
  doc["residual"] = recipe.residual;
  doc["certified"] = recipe.certified;
  if (!recipe.diagnostic.empty()) doc["diagnostic"] = recipe.diagnostic;
  return doc;
}

Json to_json(const Region& region) {
  Json doc;
  doc["re_min"] = region.re_min;
  doc["re_max"] = region.re_max;
  doc["im_min"] = region.im_min;
  doc["im_max"] = region.im_max;
  doc["grid_step"] = region.grid_step;
  return doc;
}

Json to_json(const RootReport& report) {
  Json doc;
  doc["roots"] = to_json(report.roots);
  doc["multiplicities"] = report.multiplicities;
  doc["residuals"] = report.residuals;
  doc["argument_count"] = report.argument_count;
  doc["refined_count"] = report.refined_count;
  doc["grid_candidates"] = report.grid_candidates;
  doc["scale"] = report.scale;
  doc["validated"] = report.validated;
  return doc;
}

DdeSystem system_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidArgument, "system document must be an object");
  for (const char* key : {"A", "B", "tau"}) {
    if (!doc.contains(key)) throw Error(ErrorCode::InvalidArgument, std::string("system document lacks \"") + key + "\"");
  }
  if (!doc["tau"].is_number()) throw Error(ErrorCode::InvalidArgument, "tau must be a number");
  return DdeSystem(parse_matrix(doc["A"], "A"), parse_matrix(doc["B"], "B"), doc["tau"].get<double>());
}

DdeSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open system file " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "system file " + path + " is not valid JSON: " + e.what());
  }
  return system_from_json(doc);
}

void save_system(const DdeSystem& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << dump(to_json(sys)) << "\n";
}

std::string dump(const Json& doc) {
  std::ostringstream out;
  emit(out, doc, 0);
  return out.str();
}

void write_roots_csv(std::ostream& out, const std::vector<CsvRoot>& rows) {
  out << "re,im,residual,branch,source\n";
  for (const CsvRoot& r : rows) {
    out << format_double(r.root.real()) << ',' << format_double(r.root.imag()) << ',' << format_double(r.residual)
        << ',';
    if (r.branch) out << *r.branch;
    out << ',' << r.source << '\n';
  }
}

}  // namespace lambert_dde
