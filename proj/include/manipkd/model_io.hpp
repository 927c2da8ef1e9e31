// Copyright 2026 The manipkd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef MANIPKD_MODEL_IO_HPP_
#define MANIPKD_MODEL_IO_HPP_

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "manipkd/model.hpp"

namespace manipkd {

// Model file schema (JSON): top-level `name`, `joints`, `inertias`.
// Joints: name, kind ("revolute"|"prismatic"), d, theta_offset, a, alpha,
// limit_lo, limit_hi. Inertias: mass, com [x,y,z], inertia
// [Ixx,Iyy,Izz,Ixy,Ixz,Iyz]. Angles in radians, lengths in meters, arrays
// chain-ordered base to tip and of equal length. The tool transform is
// not part of the file; loaded models get an identity tool.

namespace detail {

inline double get_number(const nlohmann::json& j, const char* key,
                         const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(ctx + ": missing or non-numeric field '" + key + "'");
  return j[key].get<double>();
}

}  // namespace detail

inline RobotModel parse_model(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("model document: not a JSON object");
  if (!doc.contains("name") || !doc["name"].is_string())
    throw ParseError("model document: missing string field 'name'");
  if (!doc.contains("joints") || !doc["joints"].is_array() ||
      !doc.contains("inertias") || !doc["inertias"].is_array())
    throw ParseError("model document: missing 'joints'/'inertias' arrays");

  RobotModel m;
  m.name = doc["name"].get<std::string>();

  for (const auto& jj : doc["joints"]) {
    JointSpec js;
    if (!jj.contains("name") || !jj["name"].is_string())
      throw ParseError("joint entry: missing string field 'name'");
    js.name = jj["name"].get<std::string>();
    const std::string ctx = "joint '" + js.name + "'";
    if (!jj.contains("kind") || !jj["kind"].is_string())
      throw ParseError(ctx + ": missing string field 'kind'");
    const std::string kind = jj["kind"].get<std::string>();
    if (kind == "revolute")
      js.kind = JointKind::kRevolute;
    else if (kind == "prismatic")
      js.kind = JointKind::kPrismatic;
    else
      throw ParseError(ctx + ": unknown joint kind '" + kind + "'");
    js.dh.d = detail::get_number(jj, "d", ctx);
    js.dh.theta_offset = detail::get_number(jj, "theta_offset", ctx);
    js.dh.a = detail::get_number(jj, "a", ctx);
    js.dh.alpha = wrap_angle(detail::get_number(jj, "alpha", ctx));
    js.limit_lo = detail::get_number(jj, "limit_lo", ctx);
    js.limit_hi = detail::get_number(jj, "limit_hi", ctx);
    m.joints.push_back(std::move(js));
  }

  for (const auto& ij : doc["inertias"]) {
    const std::string ctx =
        "inertia entry " + std::to_string(m.inertias.size());
    LinkInertia li;
    li.mass = detail::get_number(ij, "mass", ctx);
    if (!ij.contains("com") || !ij["com"].is_array() || ij["com"].size() != 3)
      throw ParseError(ctx + ": 'com' must be an array [x,y,z]");
    for (int k = 0; k < 3; ++k) {
      if (!ij["com"][k].is_number())
        throw ParseError(ctx + ": non-numeric 'com' component");
      li.com[k] = ij["com"][k].get<double>();
    }
    if (!ij.contains("inertia") || !ij["inertia"].is_array() ||
        ij["inertia"].size() != 6)
      throw ParseError(ctx +
                       ": 'inertia' must be [Ixx,Iyy,Izz,Ixy,Ixz,Iyz]");
    double v[6];
    for (int k = 0; k < 6; ++k) {
      if (!ij["inertia"][k].is_number())
        throw ParseError(ctx + ": non-numeric 'inertia' component");
      v[k] = ij["inertia"][k].get<double>();
    }
    li.inertia << v[0], v[3], v[4], v[3], v[1], v[5], v[4], v[5], v[2];
    m.inertias.push_back(std::move(li));
  }

  m.validate();
  return m;
}

/// Parse and validate a model from JSON text.
inline RobotModel load_model(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model document: ") + e.what());
  }
  return parse_model(doc);
}

inline RobotModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

/// Serialize to the model-file schema. Numbers are emitted in shortest
/// round-trip form, so load_model(serialize_model(m)) reproduces every
/// numeric field bit-identically.
inline std::string serialize_model(const RobotModel& m) {
  nlohmann::json doc;
  doc["name"] = m.name;
  doc["joints"] = nlohmann::json::array();
  for (const auto& j : m.joints) {
    nlohmann::json jj;
    jj["name"] = j.name;
    jj["kind"] = joint_kind_name(j.kind);
    jj["d"] = j.dh.d;
    jj["theta_offset"] = j.dh.theta_offset;
    jj["a"] = j.dh.a;
    jj["alpha"] = j.dh.alpha;
    jj["limit_lo"] = j.limit_lo;
    jj["limit_hi"] = j.limit_hi;
    doc["joints"].push_back(std::move(jj));
  }
  doc["inertias"] = nlohmann::json::array();
  for (const auto& li : m.inertias) {
    nlohmann::json ij;
    ij["mass"] = li.mass;
    ij["com"] = {li.com.x(), li.com.y(), li.com.z()};
    ij["inertia"] = {li.inertia(0, 0), li.inertia(1, 1), li.inertia(2, 2),
                     li.inertia(0, 1), li.inertia(0, 2), li.inertia(1, 2)};
    doc["inertias"].push_back(std::move(ij));
  }
  return doc.dump(2) + "\n";
}

}  // namespace manipkd

#endif  // MANIPKD_MODEL_IO_HPP_
