#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "pwls/geometry.hpp"
#include "pwls/material.hpp"

namespace pwls {

using json = nlohmann::json;

namespace detail {

inline Vec3 vec3_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3 || !std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_number(); }))
    throw Error(what + " must be an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

// complex numbers are [re, im]; a bare number is read as real
inline cplx complex_from(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw Error(what + " must be a number or [re, im]");
}

inline Box box_from(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("min") || !j.contains("max"))
    throw Error(what + " must be an object with 'min' and 'max'");
  Box b{vec3_from(j["min"], what + ".min"), vec3_from(j["max"], what + ".max")};
  if (!b.non_degenerate()) throw Error(what + ": min must be strictly below max in every coordinate");
  return b;
}

// loose equality for metadata checks: numbers compared to relative 1e-12
inline bool json_close(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
  }
  if (a.type() != b.type()) return false;
  if (a.is_array()) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
      if (!json_close(a[i], b[i])) return false;
    return true;
  }
  if (a.is_object()) {
    if (a.size() != b.size()) return false;
    for (auto it = a.begin(); it != a.end(); ++it)
      if (!b.contains(it.key()) || !json_close(it.value(), b[it.key()])) return false;
    return true;
  }
  return a == b;
}

}  // namespace detail

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }
inline json to_json(const Box& b) { return {{"min", to_json(b.min_corner)}, {"max", to_json(b.max_corner)}}; }

inline json to_json(const EpsilonSpec& spec) {
  if (spec.is_constant()) return to_json(std::get<cplx>(spec.data));
  json regions = json::array();
  for (const auto& r : std::get<std::vector<EpsilonRegion>>(spec.data))
    regions.push_back({{"min", to_json(r.box.min_corner)}, {"max", to_json(r.box.max_corner)}, {"value", to_json(r.value)}});
  return {{"regions", regions}};
}

inline EpsilonSpec epsilon_spec_from(const json& j) {
  if (j.is_object()) {
    if (!j.contains("regions") || !j["regions"].is_array() || j["regions"].empty())
      throw Error("epsilon: expected a non-empty 'regions' array");
    std::vector<EpsilonRegion> regions;
    for (size_t i = 0; i < j["regions"].size(); ++i) {
      const json& r = j["regions"][i];
      const std::string what = "epsilon region " + std::to_string(i);
      if (!r.is_object() || !r.contains("value")) throw Error(what + ": missing 'value'");
      regions.push_back({detail::box_from(r, what), detail::complex_from(r["value"], what + ".value")});
    }
    return EpsilonSpec::regions(std::move(regions));
  }
  return EpsilonSpec::constant(detail::complex_from(j, "epsilon"));
}

}  // namespace pwls
