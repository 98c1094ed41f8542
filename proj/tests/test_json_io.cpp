#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lambert_dde/json_io.hpp"

using namespace lambert_dde;

namespace {

RMatrix rmat2(double a, double b, double c, double d) {
  RMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

DdeSystem delay_five() { return DdeSystem(rmat2(0, 1, -5, -1), rmat2(0, 0, -3, -0.6), 5.0); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lambert_dde_test_" + name)).string();
}

ErrorCode code_of(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::ShapeUnsupported;
}

}  // namespace

TEST(JsonIo, SystemRoundTripIsBitExact) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index n = 1 + i % 4;
    RMatrix a(n, n), b(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        a(r, c) = u(rng) * std::pow(10.0, i % 7 - 3);
        b(r, c) = u(rng);
      }
    }
    const DdeSystem sys(a, b, 0.1 + std::abs(u(rng)));
    const DdeSystem back = system_from_json(Json::parse(dump(to_json(sys))));
    EXPECT_EQ(back.a(), sys.a());
    EXPECT_EQ(back.b(), sys.b());
    EXPECT_EQ(back.tau(), sys.tau());
  }
}

TEST(JsonIo, SaveAndLoad) {
  const std::string path = temp_path("system.json");
  save_system(delay_five(), path);
  const DdeSystem back = load_system(path);
  EXPECT_EQ(back.a(), delay_five().a());
  EXPECT_EQ(back.b(), delay_five().b());
  EXPECT_EQ(back.tau(), 5.0);
  std::filesystem::remove(path);
}

TEST(JsonIo, LoadErrors) {
  EXPECT_EQ(code_of([] { (void)load_system("/nonexistent/system.json"); }), ErrorCode::InvalidArgument);
  const std::string path = temp_path("broken.json");
  std::ofstream(path) << "{\"A\": [[0, 1], [2";
  EXPECT_EQ(code_of([&] { (void)load_system(path); }), ErrorCode::InvalidArgument);
  std::filesystem::remove(path);
}

TEST(JsonIo, MalformedDocuments) {
  const char* docs[] = {
      R"([1, 2])",
      R"({"B": [[0]], "tau": 1})",
      R"({"A": [[0]], "tau": 1})",
      R"({"A": [[0]], "B": [[0]]})",
      R"({"A": [[0]], "B": [[0]], "tau": "1"})",
      R"({"A": [], "B": [[0]], "tau": 1})",
      R"({"A": [[0, 1], [2]], "B": [[0, 0], [0, 0]], "tau": 1})",
      R"({"A": [[0, "x"], [2, 3]], "B": [[0, 0], [0, 0]], "tau": 1})",
      R"({"A": [[0, 1]], "B": [[0, 0]], "tau": 1})",
      R"({"A": [[0]], "B": [[0, 0], [0, 0]], "tau": 1})",
      R"({"A": [[0]], "B": [[0]], "tau": -1})",
      R"({"A": [[0]], "B": [[0]], "tau": 0})",
  };
  for (const char* text : docs) {
    EXPECT_EQ(code_of([&] { (void)system_from_json(Json::parse(text)); }), ErrorCode::InvalidArgument) << text;
  }
}

TEST(JsonIo, DumpIsDeterministic) {
  const DdeSystem sys = delay_five();
  const SolveReport r = solve_branch(sys, -1, default_seed(sys));
  EXPECT_EQ(dump(to_json(r)), dump(to_json(solve_branch(sys, -1, default_seed(sys)))));
}

TEST(JsonIo, DumpFormatting) {
  Json doc;
  doc["x"] = 0.1;
  doc["v"] = Json::array({1, 2.5});
  doc["nan"] = std::nan("");
  doc["inf"] = INFINITY;
  doc["s"] = "a\"b";
  doc["empty"] = Json::array();
  doc["flag"] = true;
  const std::string text = dump(doc);
  EXPECT_NE(text.find("\"x\": 0.10000000000000001"), std::string::npos) << text;
  EXPECT_NE(text.find("\"v\": [1, 2.5]"), std::string::npos) << text;
  EXPECT_NE(text.find("\"nan\": null"), std::string::npos);
  EXPECT_NE(text.find("\"inf\": null"), std::string::npos);
  EXPECT_NE(text.find(R"("s": "a\"b")"), std::string::npos);
  EXPECT_NE(text.find("\"empty\": []"), std::string::npos);
  EXPECT_NE(text.find("\"flag\": true"), std::string::npos);
  EXPECT_LT(text.find("\"x\""), text.find("\"v\""));
  EXPECT_NO_THROW((void)Json::parse(text));
}

TEST(JsonIo, ComplexAndMatrixLayout) {
  EXPECT_EQ(to_json(Complex(1.5, -2.0)), Json::parse("[1.5, -2.0]"));
  CMatrix m(2, 2);
  m << 1.0, Complex(0, 1), 2.0, 3.0;
  const Json j = to_json(m);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0][1], Json::parse("[0.0, 1.0]"));
  EXPECT_EQ(j[1][0], Json::parse("[2.0, 0.0]"));
}

TEST(JsonIo, ReportKeys) {
  const DdeSystem sys = delay_five();
  const Json solve = to_json(solve_branch(sys, 0, default_seed(sys)));
  for (const char* key : {"converged", "iterations", "residual", "branch", "seed_provenance", "M", "S", "roots",
                          "root_residuals", "diagnostic"}) {
    EXPECT_TRUE(solve.contains(key)) << key;
  }
  const Json seed = to_json(seed_conjugate_pair(CompanionDde(sys), {0.0377, 1.7911}));
  for (const char* key : {"branch", "requested_branch", "pair", "case_tag", "provenance", "S_target", "W_target", "M",
                          "residual", "certified"}) {
    EXPECT_TRUE(seed.contains(key)) << key;
  }
  EXPECT_EQ(seed["case_tag"], "conjugate-pair");
  const Region region = Region::make(sys, -1, 0.5, 0, 5);
  const Json roots = to_json(map_roots(sys, region));
  EXPECT_EQ(roots["argument_count"], roots["roots"].size());
  EXPECT_EQ(to_json(region)["im_max"], 5.0);
}

TEST(Csv, Layout) {
  std::ostringstream out;
  write_roots_csv(out, {{Complex(0.5, -0.25), 1e-12, 0, "oracle"}, {Complex(-1, 0), 0.0, std::nullopt, "x"}});
  EXPECT_EQ(out.str(),
            "re,im,residual,branch,source\n"
            "0.5,-0.25,9.9999999999999998e-13,0,oracle\n"
            "-1,0,0,,x\n");
}

TEST(Csv, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(-3.0), "-3");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}
