#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pwls/json_io.hpp"
#include "pwls/mesh.hpp"
#include "pwls/reference.hpp"
#include "pwls/solver.hpp"

namespace pwls {

enum class ExactKind { dipole, trig, plane_wave, custom_g, reference_file };
enum class ErrorMetric { l2, vertex };

// What supplies the boundary data g (and, for analytic kinds, the exact
// field used for the error).
struct BoundarySource {
  ExactKind kind = ExactKind::dipole;
  DipoleParams dipole;        // kind == dipole; omega and mu come from the config
  bool dipole_epsilon_given = false;  // otherwise a constant config epsilon is used
  int wave_q = 3;             // kind == plane_wave
  int wave_index = 0;
  std::string custom_name;    // kind == custom_g
};

struct ExactSpec {
  ExactKind kind = ExactKind::dipole;
  BoundarySource boundary;         // for reference_file this is the nested "boundary" entry
  std::string reference_path;      // kind == reference_file
};

struct ExperimentConfig {
  Box domain{Vec3::Constant(-0.5), Vec3::Constant(0.5)};
  std::vector<int> subdivisions;
  double omega = 0.0;
  double mu = 1.0;
  EpsilonSpec epsilon;
  std::vector<int> q_list;
  std::vector<Variant> variants{Variant::new_pwls};
  ExactSpec exact;
  ErrorMetric metric = ErrorMetric::l2;
  std::optional<int> quadrature_override;
  SolveOptions solver;
  std::string output_path = "results.csv";
  std::string save_solutions;  // directory; empty disables
  int threads = 1;
};

inline const char* to_string(ExactKind k) {
  switch (k) {
    case ExactKind::dipole: return "dipole";
    case ExactKind::trig: return "trig";
    case ExactKind::plane_wave: return "plane_wave";
    case ExactKind::custom_g: return "custom_g";
    case ExactKind::reference_file: return "reference_file";
  }
  return "?";
}

// Built-in named boundary data for custom_g.
inline bool is_known_custom_g(const std::string& name) { return name == "linear" || name == "zero"; }

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& where = "config") {
  if (!j.is_object() || !j.contains(key)) throw Error(where + ": missing required field '" + key + "'");
  return j.at(key);
}

inline std::vector<int> int_list(const json& j, const std::string& what) {
  std::vector<int> out;
  if (j.is_number_integer()) {
    out.push_back(j.get<int>());
  } else if (j.is_array() && !j.empty()) {
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw Error("config: " + what + " must contain integers");
      out.push_back(v.get<int>());
    }
  } else {
    throw Error("config: " + what + " must be an integer or a non-empty list of integers");
  }
  return out;
}

inline BoundarySource boundary_source_from(const json& j, const std::string& where) {
  BoundarySource b;
  const std::string type = require(j, "type", where).get<std::string>();
  if (type == "dipole") {
    b.kind = ExactKind::dipole;
    if (j.contains("x0")) b.dipole.x0 = vec3_from(j["x0"], where + ".x0");
    if (j.contains("a")) {
      const Vec3 a = vec3_from(j["a"], where + ".a");
      if (!(a.norm() > 0.0)) throw Error(where + ".a must be non-zero");
      b.dipole.a = a.normalized();
    }
    if (j.contains("current")) b.dipole.current = j["current"].get<double>();
    if (j.contains("epsilon")) {
      b.dipole.epsilon = complex_from(j["epsilon"], where + ".epsilon");
      b.dipole_epsilon_given = true;
    }
  } else if (type == "trig") {
    b.kind = ExactKind::trig;
  } else if (type == "plane_wave") {
    b.kind = ExactKind::plane_wave;
    if (j.contains("q")) b.wave_q = j["q"].get<int>();
    if (j.contains("index")) b.wave_index = j["index"].get<int>();
    if (b.wave_q < 1) throw Error(where + ".q must be >= 1");
    if (b.wave_index < 0 || b.wave_index >= 2 * (b.wave_q + 1) * (b.wave_q + 1))
      throw Error(where + ".index out of range for q = " + std::to_string(b.wave_q));
  } else if (type == "custom_g") {
    b.kind = ExactKind::custom_g;
    b.custom_name = require(j, "name", where).get<std::string>();
    if (!is_known_custom_g(b.custom_name))
      throw Error(where + ": unknown custom boundary data '" + b.custom_name + "' (known: linear, zero)");
  } else {
    throw Error(where + ": unknown exact field type '" + type +
                "' (expected dipole, trig, plane_wave, custom_g or reference_file)");
  }
  return b;
}

inline SolveOptions solver_from(const json& j) {
  SolveOptions o;
  if (!j.is_object()) throw Error("config: 'solver' must be an object");
  if (j.contains("method")) {
    const std::string m = j["method"].get<std::string>();
    if (m == "direct") o.method = SolveMethod::direct;
    else if (m == "pcg") o.method = SolveMethod::pcg;
    else throw Error("config: solver.method must be 'direct' or 'pcg', got '" + m + "'");
  }
  if (j.contains("pcg_tol")) o.pcg_tol = j["pcg_tol"].get<double>();
  if (j.contains("pcg_max_iter")) o.pcg_max_iter = j["pcg_max_iter"].get<int>();
  if (j.contains("reg_initial")) o.reg_initial = j["reg_initial"].get<double>();
  if (j.contains("reg_max")) o.reg_max = j["reg_max"].get<double>();
  if (!(o.pcg_tol > 0.0) || o.pcg_max_iter < 1 || !(o.reg_initial > 0.0) || o.reg_initial > o.reg_max)
    throw Error("config: solver options out of range");
  return o;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw Error("config: top level must be an object");
  ExperimentConfig c;
  try {
    c.domain = detail::box_from(detail::require(doc, "domain"), "config: domain");
    const Vec3 ext = c.domain.extent();
    if (std::abs(ext.x() - ext.y()) > 1e-12 * ext.maxCoeff() || std::abs(ext.x() - ext.z()) > 1e-12 * ext.maxCoeff())
      throw Error("config: domain must be a cube");

    c.subdivisions = detail::int_list(detail::require(doc, "subdivisions"), "subdivisions");
    for (int n : c.subdivisions)
      if (n < 1) throw Error("config: subdivisions must be >= 1 (got " + std::to_string(n) + ")");

    if (doc.contains("omega_over_pi")) {
      c.omega = doc["omega_over_pi"].get<double>() * pi;
    } else {
      c.omega = detail::require(doc, "omega").get<double>();
    }
    if (!(c.omega > 0.0)) throw Error("config: omega must be positive");
    if (doc.contains("mu")) c.mu = doc["mu"].get<double>();
    if (!(c.mu > 0.0)) throw Error("config: mu must be positive");

    try {
      c.epsilon = epsilon_spec_from(detail::require(doc, "epsilon"));
    } catch (const json::exception& e) {
      throw Error(std::string("config: epsilon: ") + e.what());
    }

    c.q_list = detail::int_list(detail::require(doc, "q"), "q");
    for (int q : c.q_list)
      if (q < 1) throw Error("config: q must be >= 1 (got " + std::to_string(q) + ")");

    if (doc.contains("variants")) {
      c.variants.clear();
      for (const auto& v : doc["variants"]) {
        const std::string s = v.get<std::string>();
        if (s == "new") c.variants.push_back(Variant::new_pwls);
        else if (s == "old") c.variants.push_back(Variant::old_pwls);
        else throw Error("config: unknown variant '" + s + "' (expected new or old)");
      }
      if (c.variants.empty()) throw Error("config: variants must be non-empty");
    }

    const json& ex = detail::require(doc, "exact");
    if (detail::require(ex, "type", "config: exact").get<std::string>() == "reference_file") {
      c.exact.kind = ExactKind::reference_file;
      c.exact.reference_path = detail::require(ex, "path", "config: exact").get<std::string>();
      c.exact.boundary = detail::boundary_source_from(detail::require(ex, "boundary", "config: exact"),
                                                      "config: exact.boundary");
    } else {
      c.exact.boundary = detail::boundary_source_from(ex, "config: exact");
      c.exact.kind = c.exact.boundary.kind;
    }
    const ExactKind bk = c.exact.boundary.kind;
    if ((bk == ExactKind::trig || bk == ExactKind::plane_wave) && !c.epsilon.is_constant())
      throw Error(std::string("config: exact type '") + to_string(bk) + "' needs a constant epsilon");

    if (doc.contains("error_metric")) {
      const std::string m = doc["error_metric"].get<std::string>();
      if (m == "l2") c.metric = ErrorMetric::l2;
      else if (m == "vertex") c.metric = ErrorMetric::vertex;
      else throw Error("config: error_metric must be 'l2' or 'vertex'");
    }
    if (doc.contains("quadrature_order") && !doc["quadrature_order"].is_null()) {
      c.quadrature_override = doc["quadrature_order"].get<int>();
      if (*c.quadrature_override < 1) throw Error("config: quadrature_order must be >= 1");
    }
    if (doc.contains("solver")) c.solver = detail::solver_from(doc["solver"]);
    if (doc.contains("output")) c.output_path = doc["output"].get<std::string>();
    if (doc.contains("save_solutions")) c.save_solutions = doc["save_solutions"].get<std::string>();
    if (doc.contains("threads")) c.threads = std::max(1, doc["threads"].get<int>());
  } catch (const json::exception& e) {
    throw Error(std::string("config: wrong value type: ") + e.what());
  }

  // every element center must get a permittivity
  if (!c.epsilon.is_constant())
    for (int n : c.subdivisions) {
      try {
        MaterialField::from_spec(Mesh(c.domain, n), c.epsilon, c.mu);
      } catch (const Error& e) {
        throw Error("config: n = " + std::to_string(n) + ": " + e.what());
      }
    }
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw Error(std::string("config: not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

// Relative paths inside the config (output, save_solutions, reference
// files) are left relative to the working directory.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace pwls
