#pragma once

#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "pwls/json_io.hpp"
#include "pwls/mesh.hpp"
#include "pwls/planewave.hpp"
#include "pwls/reference.hpp"

namespace pwls {

inline constexpr int solution_format_version = 1;
inline constexpr const char* solution_magic = "PWLS-SOLUTION";

struct SolutionMeta {
  Box domain;
  int n = 1;
  int q = 1;
  double omega = 1.0;
  double mu = 1.0;
  EpsilonSpec epsilon;
  std::string variant = "new";
  int version = solution_format_version;

  json to_json_meta() const {
    return {{"format_version", version}, {"domain", to_json(domain)}, {"n", n},           {"q", q},
            {"omega", omega},            {"mu", mu},                  {"epsilon", to_json(epsilon)},
            {"variant", variant}};
  }
};

struct SolutionRecord {
  SolutionMeta meta;
  CVector X;
};

// Fields a loader insists on; unset entries are not checked.
struct SolutionExpectations {
  std::optional<Box> domain;
  std::optional<int> n;
  std::optional<int> q;
  std::optional<double> omega;
  std::optional<double> mu;
  std::optional<EpsilonSpec> epsilon;
};

// Text format: "PWLS-SOLUTION <version>", one line of JSON metadata, the
// number of coefficients, then "re im" per line.
inline void save_solution(const std::string& path, const SolutionMeta& meta, const CVector& X) {
  const Eigen::Index expected = static_cast<Eigen::Index>(2) * (meta.q + 1) * (meta.q + 1) * meta.n * meta.n * meta.n;
  if (X.size() != expected)
    throw Error("save_solution: " + std::to_string(X.size()) + " coefficients, metadata implies " +
                std::to_string(expected));
  std::ofstream out(path);
  if (!out) throw Error("save_solution: cannot write " + path);
  out << solution_magic << ' ' << meta.version << '\n' << meta.to_json_meta().dump() << '\n' << X.size() << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < X.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", X[i].real(), X[i].imag());
    out << buf;
  }
  if (!out) throw Error("save_solution: write failed for " + path);
}

inline SolutionRecord load_solution(const std::string& path, const SolutionExpectations& expect = {}) {
  std::ifstream in(path);
  if (!in) throw Error("load_solution: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != solution_magic) throw Error("load_solution: " + path + " is not a solution file");
  if (version != solution_format_version)
    throw Error("load_solution: format version " + std::to_string(version) + " unsupported (expected " +
                std::to_string(solution_format_version) + ")");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error("load_solution: bad metadata line in " + path + ": " + e.what());
  }

  SolutionRecord rec;
  SolutionMeta& m = rec.meta;
  try {
    m.version = j.at("format_version").get<int>();
    m.domain = detail::box_from(j.at("domain"), "domain");
    m.n = j.at("n").get<int>();
    m.q = j.at("q").get<int>();
    m.omega = j.at("omega").get<double>();
    m.mu = j.at("mu").get<double>();
    m.epsilon = epsilon_spec_from(j.at("epsilon"));
    m.variant = j.at("variant").get<std::string>();
  } catch (const json::exception& e) {
    throw Error("load_solution: incomplete metadata in " + path + ": " + e.what());
  }

  std::vector<std::string> diffs;
  auto note = [&](const std::string& name, const json& want, const json& got) {
    if (!detail::json_close(want, got)) diffs.push_back(name + " (expected " + want.dump() + ", file has " + got.dump() + ")");
  };
  if (expect.domain) note("domain", to_json(*expect.domain), to_json(m.domain));
  if (expect.n) note("n", *expect.n, m.n);
  if (expect.q) note("q", *expect.q, m.q);
  if (expect.omega) note("omega", *expect.omega, m.omega);
  if (expect.mu) note("mu", *expect.mu, m.mu);
  if (expect.epsilon) note("epsilon", to_json(*expect.epsilon), to_json(m.epsilon));
  if (!diffs.empty()) {
    std::string msg = "load_solution: metadata mismatch in " + path + ":";
    for (const auto& d : diffs) msg += " " + d + ";";
    throw Error(msg);
  }

  Eigen::Index count = 0;
  in >> count;
  const Eigen::Index expected = static_cast<Eigen::Index>(2) * (m.q + 1) * (m.q + 1) * m.n * m.n * m.n;
  if (!in || count != expected)
    throw Error("load_solution: coefficient count " + std::to_string(count) + " does not match metadata (" +
                std::to_string(expected) + ")");
  rec.X.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) throw Error("load_solution: truncated file " + path + " at coefficient " + std::to_string(i));
    rec.X[i] = {re, im};
  }
  return rec;
}

/// Turns a stored solution into an ExactField evaluating the piecewise
/// plane-wave field (points are assigned to elements by Mesh::locate).
inline ExactField as_exact_field(const SolutionRecord& rec) {
  struct State {
    Mesh mesh;
    MaterialField field;
    std::vector<PWBasis> bases;
    CVector X;
    std::unique_ptr<DiscreteField> E;
  };
  const SolutionMeta& m = rec.meta;
  Mesh mesh(m.domain, m.n);
  MaterialField field = MaterialField::from_spec(mesh, m.epsilon, m.mu);
  auto st = std::make_shared<State>(State{std::move(mesh), field, {}, rec.X, nullptr});
  st->bases = build_bases(st->field, m.q, m.omega);
  st->E = std::make_unique<DiscreteField>(st->mesh, st->bases, st->X);
  ExactField f;
  f.kind = FieldKind::custom;
  f.eval = [st](const Vec3& x) { return st->E->eval(x); };
  f.eval_curl = [st](const Vec3& x) { return st->E->curl_on(st->mesh.locate(x), x); };
  return f;
}

}  // namespace pwls
