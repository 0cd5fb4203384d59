#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "pwls/runner.hpp"

using namespace pwls;

namespace {

json minimal() {
  return json::parse(R"({
    "domain": {"min": [-0.5, -0.5, -0.5], "max": [0.5, 0.5, 0.5]},
    "subdivisions": [4],
    "omega_over_pi": 4,
    "epsilon": [1, 1],
    "q": [3],
    "exact": {"type": "dipole"}
  })");
}

std::string message_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalIsValid) {
  const auto c = parse_config(minimal());
  EXPECT_NEAR(c.omega, 4 * pi, 1e-15);
  EXPECT_EQ(c.mu, 1.0);
  EXPECT_EQ(c.q_list, std::vector<int>{3});
  EXPECT_EQ(c.subdivisions, std::vector<int>{4});
  EXPECT_EQ(c.exact.kind, ExactKind::dipole);
  EXPECT_EQ(c.variants.size(), 1u);
  EXPECT_EQ(c.solver.method, SolveMethod::direct);
  EXPECT_FALSE(c.quadrature_override);
}

TEST(Config, RejectsQZero) {
  auto d = minimal();
  d["q"] = json::array({0});
  EXPECT_NE(message_of(d).find("q must be >= 1"), std::string::npos);
}

TEST(Config, MissingField) {
  auto d = minimal();
  d.erase("omega_over_pi");
  EXPECT_NE(message_of(d).find("'omega'"), std::string::npos);
  d = minimal();
  d.erase("exact");
  EXPECT_NE(message_of(d).find("'exact'"), std::string::npos);
}

TEST(Config, UnknownExactType) {
  auto d = minimal();
  d["exact"] = {{"type", "gaussian"}};
  EXPECT_NE(message_of(d).find("unknown exact field type 'gaussian'"), std::string::npos);
  d["exact"] = {{"type", "custom_g"}, {"name", "spiral"}};
  EXPECT_NE(message_of(d).find("spiral"), std::string::npos);
}

TEST(Config, MalformedBoxes) {
  auto d = minimal();
  d["epsilon"] = json::parse(R"({"regions": [{"min": [0, 0], "max": [1, 1, 1], "value": [1, 1]}]})");
  EXPECT_NE(message_of(d).find("epsilon region 0"), std::string::npos) << message_of(d);
  d["epsilon"] = json::parse(R"({"regions": [{"min": [0, 0, 0], "max": [1, -1, 1], "value": [1, 1]}]})");
  EXPECT_NE(message_of(d).find("strictly below"), std::string::npos) << message_of(d);
  d["epsilon"] = json::parse(R"({"regions": [{"min": [0, 0, 0], "max": [1, 1, 1]}]})");
  EXPECT_NE(message_of(d).find("value"), std::string::npos) << message_of(d);
}

TEST(Config, UncoveredElementNamed) {
  auto d = minimal();
  d["epsilon"] = json::parse(R"({"regions": [{"min": [-0.5, -0.5, 0], "max": [0.5, 0.5, 0.5], "value": [1, 1]}]})");
  const std::string msg = message_of(d);
  EXPECT_NE(msg.find("element 0"), std::string::npos) << msg;
}

TEST(Config, OtherValidation) {
  auto d = minimal();
  d["domain"]["max"] = {0.5, 0.5, 1.5};
  EXPECT_NE(message_of(d).find("cube"), std::string::npos);
  d = minimal();
  d["omega_over_pi"] = -1;
  EXPECT_NE(message_of(d).find("omega"), std::string::npos);
  d = minimal();
  d["variants"] = {"newest"};
  EXPECT_NE(message_of(d).find("newest"), std::string::npos);
  d = minimal();
  d["solver"] = {{"method", "lu"}};
  EXPECT_NE(message_of(d).find("lu"), std::string::npos);
  d = minimal();
  d["subdivisions"] = "four";
  EXPECT_FALSE(message_of(d).empty());
  EXPECT_THROW(parse_config_text("{not json"), Error);
  EXPECT_THROW(load_config("/nonexistent/config.json"), Error);
}

TEST(Config, TrigNeedsConstantEpsilon) {
  auto d = minimal();
  d["exact"] = {{"type", "trig"}};
  d["epsilon"] = json::parse(R"({"regions": [{"min": [-0.5, -0.5, -0.5], "max": [0.5, 0.5, 0.5], "value": [1, 1]}]})");
  EXPECT_NE(message_of(d).find("constant epsilon"), std::string::npos);
}

TEST(Config, ReferenceFileEntry) {
  auto d = minimal();
  d["exact"] = json::parse(R"({"type": "reference_file", "path": "ref.sol", "boundary": {"type": "dipole"}})");
  const auto c = parse_config(d);
  EXPECT_EQ(c.exact.kind, ExactKind::reference_file);
  EXPECT_EQ(c.exact.reference_path, "ref.sol");
  EXPECT_EQ(c.exact.boundary.kind, ExactKind::dipole);
  d["exact"].erase("boundary");
  EXPECT_NE(message_of(d).find("boundary"), std::string::npos);
}

TEST(Runner, ManufacturedPlaneWave) {
  auto d = minimal();
  d["exact"] = {{"type", "plane_wave"}, {"q", 3}, {"index", 7}};
  const auto rows = run_experiment(parse_config(d));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].status, "ok");
  EXPECT_LE(rows[0].error, 1e-8);
  EXPECT_EQ(rows[0].p, 16);
  EXPECT_EQ(rows[0].dofs, 2 * 16 * 64);
}

TEST(Runner, SweepOrderAndFailureMarker) {
  // block-Jacobi is exact on a single element; one PCG step cannot solve n=2
  auto d = minimal();
  d["subdivisions"] = {1, 2, 1};
  d["q"] = {1};
  d["variants"] = {"new", "old"};
  d["solver"] = {{"method", "pcg"}, {"pcg_max_iter", 1}, {"pcg_tol", 1e-12}};
  const auto rows = run_experiment(parse_config(d));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].variant, "new");
  EXPECT_EQ(rows[3].variant, "old");
  EXPECT_EQ(rows[1].n_elements, 8);
  for (int i : {0, 2, 3, 5}) EXPECT_EQ(rows[i].status, "ok") << rows[i].status;
  for (int i : {1, 4}) {
    EXPECT_TRUE(rows[i].failed());
    EXPECT_TRUE(std::isnan(rows[i].error));
  }
}

TEST(Runner, ThreadsKeepOrderAndResults) {
  auto d = minimal();
  d["subdivisions"] = {1, 2, 3};
  d["q"] = {1, 2};
  auto c = parse_config(d);
  const auto serial = run_experiment(c);
  c.threads = 3;
  const auto parallel = run_experiment(c);
  ASSERT_EQ(serial.size(), parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].q, parallel[i].q);
    EXPECT_EQ(serial[i].n_elements, parallel[i].n_elements);
    EXPECT_EQ(serial[i].error, parallel[i].error);
  }
}

TEST(Runner, DeterministicCsvApartFromTimings) {
  auto d = minimal();
  d["subdivisions"] = {2, 3};
  d["variants"] = {"new", "old"};
  const auto c = parse_config(d);
  auto strip = [](const std::vector<ResultRow>& rows) {
    std::vector<std::string> out;
    for (auto r : rows) {
      r.assembly_seconds = r.solve_seconds = 0.0;
      out.push_back(csv_line(r));
    }
    return out;
  };
  EXPECT_EQ(strip(run_experiment(c)), strip(run_experiment(c)));
}

TEST(Runner, CustomDataHasNoReference) {
  auto d = minimal();
  d["subdivisions"] = {2};
  d["exact"] = {{"type", "custom_g"}, {"name", "linear"}};
  const auto rows = run_experiment(parse_config(d));
  EXPECT_FALSE(rows[0].failed());
  EXPECT_TRUE(std::isnan(rows[0].error));
  EXPECT_LT(rows[0].residual, 1e-10);
}

TEST(Runner, LayeredDipoleIsBoundaryDataOnly) {
  auto d = minimal();
  d["subdivisions"] = {2};
  d["epsilon"] = json::parse(R"({"regions": [
    {"min": [-0.5, -0.5, 0], "max": [0.5, 0.5, 0.5], "value": [1, 1]},
    {"min": [-0.5, -0.5, -0.5], "max": [0.5, 0.5, 0], "value": [2, 2]}]})");
  const auto rows = run_experiment(parse_config(d));
  EXPECT_FALSE(rows[0].failed());
  EXPECT_TRUE(std::isnan(rows[0].error));
  EXPECT_NE(rows[0].status.find("boundary data only"), std::string::npos);
}

TEST(Runner, SaveAndReuseReference) {
  const auto dir = std::filesystem::temp_directory_path() / "pwls_test_refdir";
  std::filesystem::remove_all(dir);
  auto d = minimal();
  d["subdivisions"] = {4};
  d["q"] = {2};
  d["save_solutions"] = dir.string();
  run_experiment(parse_config(d));
  const auto file = dir / solution_file_name(Variant::new_pwls, 2, 4);
  ASSERT_TRUE(std::filesystem::exists(file));

  auto r = minimal();
  r["subdivisions"] = {4, 2};
  r["q"] = {2};
  r["exact"] = {{"type", "reference_file"}, {"path", file.string()}, {"boundary", {{"type", "dipole"}}}};
  const auto rows = run_experiment(parse_config(r));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LT(rows[0].error, 1e-12);  // same discretization as the reference
  EXPECT_GT(rows[1].error, 1e-3);

  r["omega_over_pi"] = 5;
  EXPECT_THROW(run_experiment(parse_config(r)), Error);
  std::filesystem::remove_all(dir);
}

TEST(Verify, PassesOnSmallConfig) {
  auto d = minimal();
  d["subdivisions"] = {2, 4};
  d["q"] = {2, 3};
  d["variants"] = {"new", "old"};
  const auto checks = verify_experiment(parse_config(d));
  ASSERT_FALSE(checks.empty());
  for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.name << " " << c.detail;
}
