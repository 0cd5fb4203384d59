#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pwls/runner.hpp"
#include "pwls/solution_io.hpp"

using namespace pwls;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pwls_test_" + name)).string();
}

SolutionMeta layered_meta(int n, int q) {
  SolutionMeta m;
  m.domain = Box{Vec3::Constant(-0.5), Vec3::Constant(0.5)};
  m.n = n;
  m.q = q;
  m.omega = 4 * pi;
  m.epsilon = EpsilonSpec::regions({{Box{Vec3(-0.5, -0.5, 0.0), Vec3(0.5, 0.5, 0.5)}, {1.0, 1.0}},
                                    {Box{Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.0)}, {2.0, 2.0}}});
  return m;
}

CVector random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVector v(n);
  for (auto& z : v) z = {nd(rng), nd(rng)};
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

TEST(SolutionFile, RoundTrip) {
  const auto meta = layered_meta(2, 2);
  const CVector X = random_vector(2 * 9 * 8, 41);
  const std::string path = temp_path("roundtrip.sol");
  save_solution(path, meta, X);
  const auto rec = load_solution(path);
  EXPECT_TRUE(rec.X == X);
  EXPECT_EQ(rec.meta.n, 2);
  EXPECT_EQ(rec.meta.q, 2);
  EXPECT_EQ(rec.meta.omega, meta.omega);
  EXPECT_EQ(rec.meta.version, solution_format_version);
  EXPECT_FALSE(rec.meta.epsilon.is_constant());
  std::filesystem::remove(path);
}

TEST(SolutionFile, RejectsMismatch) {
  const auto meta = layered_meta(2, 1);
  const std::string path = temp_path("mismatch.sol");
  save_solution(path, meta, random_vector(2 * 4 * 8, 42));
  SolutionExpectations ex;
  ex.omega = 8 * pi;
  ex.q = 3;
  try {
    load_solution(path, ex);
    FAIL() << "expected mismatch";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("omega"), std::string::npos) << msg;
    EXPECT_NE(msg.find("q ("), std::string::npos) << msg;
  }
  SolutionExpectations eps_only;
  eps_only.epsilon = EpsilonSpec::constant({1, 1});
  EXPECT_THROW(load_solution(path, eps_only), Error);
  SolutionExpectations ok;
  ok.omega = 4 * pi;
  ok.epsilon = meta.epsilon;
  ok.domain = meta.domain;
  EXPECT_NO_THROW(load_solution(path, ok));
  std::filesystem::remove(path);
}

TEST(SolutionFile, RejectsWrongLengthAndGarbage) {
  const auto meta = layered_meta(2, 1);
  EXPECT_THROW(save_solution(temp_path("short.sol"), meta, CVector::Zero(3)), Error);
  const std::string path = temp_path("garbage.sol");
  std::ofstream(path) << "hello\n";
  EXPECT_THROW(load_solution(path), Error);
  EXPECT_THROW(load_solution(temp_path("does_not_exist.sol")), Error);
  std::filesystem::remove(path);
}

TEST(SolutionFile, EvaluatesAsExactField) {
  const auto meta = layered_meta(2, 2);
  const CVector X = random_vector(2 * 9 * 8, 43);
  const std::string path = temp_path("exact.sol");
  save_solution(path, meta, X);
  const ExactField f = as_exact_field(load_solution(path));

  Mesh mesh(meta.domain, 2);
  MaterialField field = MaterialField::from_spec(mesh, meta.epsilon);
  const auto bases = build_bases(field, 2, meta.omega);
  const DiscreteField E(mesh, bases, X);
  for (const auto& el : mesh.elements()) {
    const Vec3 x = el.center + Vec3(0.01, -0.02, 0.03);
    EXPECT_TRUE(f.eval(x) == E.eval_on(el.index, x));
    EXPECT_TRUE(f.eval_curl(x) == E.curl_on(el.index, x));
  }
  // against itself the error vanishes
  EXPECT_EQ(relative_l2_error(mesh, X, bases, f, 3), 0.0);
  std::filesystem::remove(path);
}

TEST(Csv, OneRowTwoLines) {
  ResultRow r;
  r.variant = "new";
  r.omega = 4 * pi;
  r.q = 3;
  r.p = 16;
  r.h = 0.25;
  r.n_elements = 64;
  r.dofs = 2048;
  r.error = 0.123456789;
  r.residual = 3.2e-16;
  const std::string path = temp_path("one.csv");
  emit_csv({r}, path);
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 2u);
  const auto head = split(lines[0], ',');
  const std::vector<std::string> expected{"variant",  "omega",       "q",   "p",  "h", "n_elements", "dofs", "rel_l2_error",
                                          "residual", "assembly_seconds", "solve_seconds", "regularization_used", "status"};
  EXPECT_EQ(head, expected);
  const auto cols = split(lines[1], ',');
  ASSERT_EQ(cols.size(), expected.size());
  EXPECT_EQ(cols[0], "new");
  EXPECT_NEAR(std::stod(cols[1]), 4 * pi, 1e-5 * 4 * pi);
  EXPECT_EQ(std::stoi(cols[2]), 3);
  EXPECT_EQ(std::stoi(cols[3]), 16);
  EXPECT_NEAR(std::stod(cols[4]), 0.25, 1e-12);
  EXPECT_EQ(std::stoi(cols[5]), 64);
  EXPECT_EQ(std::stoll(cols[6]), 2048);
  EXPECT_NE(cols[7].find('e'), std::string::npos);
  EXPECT_NEAR(std::stod(cols[7]), 0.123456789, 5e-6 * 0.123456789);  // %.5e
  EXPECT_NEAR(std::stod(cols[8]), 3.2e-16, 1e-21);
  EXPECT_EQ(cols[12], "ok");
  std::filesystem::remove(path);
}

TEST(Csv, ErrorStatusHasNoCommas) {
  ResultRow r;
  r.variant = "old";
  r.status = "error: a, b, c";
  const auto cols = split(csv_line(r), ',');
  EXPECT_EQ(cols.size(), 13u);
  EXPECT_EQ(cols[7], "nan");
}

TEST(Csv, RejectsEmptyAndUnwritable) {
  EXPECT_THROW(emit_csv({}, temp_path("empty.csv")), Error);
  EXPECT_THROW(emit_csv({ResultRow{}}, "/nonexistent_dir/x.csv"), Error);
}
