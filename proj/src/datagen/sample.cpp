// Copyright 2026 The factorscan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "factorscan/datagen/sample.hpp"

#include "factorscan/error.hpp"

namespace factorscan::datagen {

using nlohmann::json;
using minisol::AnchorKind;

DepRule dep_rule(DepId id, Direction dir) {
  DepRule r;
  r.dep_id = id;
  r.direction = dir;
  switch (id) {
    case DepId::A_DIRECT:
      r.forbidden_patterns = {"arithmetic transformation", "logical transformation", "hash transformation",
                              "void return used as source"};
      break;
    case DepId::B_INDIRECT:
      r.requires_transformation = true;
      r.forbidden_patterns = {"identity passing"};
      break;
    case DepId::C_CTRL:
      r.forbidden_patterns = {"return value in write value", "return value in write index"};
      break;
    case DepId::Z_NONE:
      r.forbidden_patterns = {"shared input", "return value use", "control by return value"};
      break;
  }
  return r;
}

CeiPattern cei_pattern(CeiType t) {
  CeiPattern p;
  p.type_id = t;
  p.good = t == CeiType::CEI_OK;
  switch (t) {
    case CeiType::CEI_OK:
      p.anchor_sequence = {AnchorKind::Check, AnchorKind::Effect, AnchorKind::Interaction};
      break;
    case CeiType::SIMPLE_INT_BEFORE_EFFECT:
    case CeiType::PATH_SENSITIVE_I_BEFORE_E:
      p.anchor_sequence = {AnchorKind::Check, AnchorKind::Interaction, AnchorKind::Effect};
      break;
    case CeiType::POST_INTERACTION_EFFECTS:
      p.anchor_sequence = {AnchorKind::Check, AnchorKind::Effect, AnchorKind::Interaction, AnchorKind::Effect};
      break;
  }
  return p;
}

const char* to_string(Task t) {
  switch (t) {
    case Task::E: return "E";
    case Task::D: return "D";
    case Task::O: return "O";
    case Task::Full: return "FULL";
  }
  return "?";
}

const char* to_string(DepId d) {
  switch (d) {
    case DepId::A_DIRECT: return "A_DIRECT";
    case DepId::B_INDIRECT: return "B_INDIRECT";
    case DepId::C_CTRL: return "C_CTRL";
    case DepId::Z_NONE: return "Z_NONE";
  }
  return "?";
}

const char* to_string(Direction d) { return d == Direction::E_TO_S ? "E_TO_S" : "S_TO_E"; }

const char* to_string(CeiType t) {
  switch (t) {
    case CeiType::CEI_OK: return "CEI_OK";
    case CeiType::SIMPLE_INT_BEFORE_EFFECT: return "SIMPLE_INT_BEFORE_EFFECT";
    case CeiType::POST_INTERACTION_EFFECTS: return "POST_INTERACTION_EFFECTS";
    case CeiType::PATH_SENSITIVE_I_BEFORE_E: return "PATH_SENSITIVE_I_BEFORE_E";
  }
  return "?";
}

Task parse_task(const std::string& s) {
  if (s == "E" || s == "e") return Task::E;
  if (s == "D" || s == "d") return Task::D;
  if (s == "O" || s == "o") return Task::O;
  if (s == "FULL" || s == "full") return Task::Full;
  throw Error("InvalidTask", "unknown task '" + s + "'");
}

DepId parse_dep_id(const std::string& s) {
  for (DepId d : {DepId::A_DIRECT, DepId::B_INDIRECT, DepId::C_CTRL, DepId::Z_NONE})
    if (s == to_string(d)) return d;
  throw Error("InvalidLabel", "unknown dependency id '" + s + "'");
}

Direction parse_direction(const std::string& s) {
  if (s == "E_TO_S") return Direction::E_TO_S;
  if (s == "S_TO_E") return Direction::S_TO_E;
  throw Error("InvalidLabel", "unknown direction '" + s + "'");
}

CeiType parse_cei_type(const std::string& s) {
  for (CeiType t : {CeiType::CEI_OK, CeiType::SIMPLE_INT_BEFORE_EFFECT, CeiType::POST_INTERACTION_EFFECTS,
                    CeiType::PATH_SENSITIVE_I_BEFORE_E})
    if (s == to_string(t)) return t;
  throw Error("InvalidLabel", "unknown CEI type '" + s + "'");
}

namespace {

DepKind parse_dep_kind(const std::string& s) {
  for (DepKind k : {DepKind::None, DepKind::Direct, DepKind::Indirect, DepKind::Ctrl})
    if (s == to_string(k)) return k;
  throw Error("InvalidLabel", "unknown dependency kind '" + s + "'");
}

}  // namespace

std::string LabeledSample::structural_signature() const {
  std::string s = provenance.interface_id;
  for (const auto& [k, v] : provenance.axes) {
    if (k == "naming") continue;
    s += "|" + k + "=" + v;
  }
  return s;
}

json to_json(const LabeledSample& s) {
  json l = json::object();
  l["label"] = s.labels.label;
  l["call_lines"] = s.labels.call_lines;
  l["update_lines"] = s.labels.update_lines;
  if (s.labels.check_line) l["check_line"] = *s.labels.check_line;
  if (s.labels.dep_id) l["dep_id"] = to_string(*s.labels.dep_id);
  if (s.labels.direction) l["direction"] = to_string(*s.labels.direction);
  if (s.labels.dep_kind) l["dep_kind"] = to_string(*s.labels.dep_kind);
  if (s.labels.cei_type) l["cei_type"] = to_string(*s.labels.cei_type);
  if (s.labels.vulnerable) l["vulnerable"] = *s.labels.vulnerable;
  if (s.labels.factor_bits) l["factor_bits"] = *s.labels.factor_bits;

  json p;
  p["seed"] = s.provenance.seed;
  p["template_id"] = s.provenance.template_id;
  p["axes"] = s.provenance.axes;
  p["axes_hit"] = s.provenance.axes_hit;
  p["interface"] = s.provenance.interface_id;
  p["with_cfg_context"] = s.provenance.with_cfg_context;

  return json{{"source", s.source}, {"task", to_string(s.task)}, {"labels", l}, {"provenance", p}};
}

LabeledSample sample_from_json(const json& j) {
  try {
    LabeledSample s;
    s.source = j.at("source").get<std::string>();
    s.task = parse_task(j.at("task").get<std::string>());
    const auto& l = j.at("labels");
    s.labels.label = l.value("label", 0);
    s.labels.call_lines = l.value("call_lines", std::vector<int>{});
    s.labels.update_lines = l.value("update_lines", std::vector<int>{});
    if (l.contains("check_line")) s.labels.check_line = l["check_line"].get<int>();
    if (l.contains("dep_id")) s.labels.dep_id = parse_dep_id(l["dep_id"].get<std::string>());
    if (l.contains("direction")) s.labels.direction = parse_direction(l["direction"].get<std::string>());
    if (l.contains("dep_kind")) s.labels.dep_kind = parse_dep_kind(l["dep_kind"].get<std::string>());
    if (l.contains("cei_type")) s.labels.cei_type = parse_cei_type(l["cei_type"].get<std::string>());
    if (l.contains("vulnerable")) s.labels.vulnerable = l["vulnerable"].get<bool>();
    if (l.contains("factor_bits")) s.labels.factor_bits = l["factor_bits"].get<FactorBits>();
    if (j.contains("provenance")) {
      const auto& p = j["provenance"];
      s.provenance.seed = p.value("seed", std::uint64_t{0});
      s.provenance.template_id = p.value("template_id", std::string{});
      s.provenance.axes = p.value("axes", std::map<std::string, std::string>{});
      s.provenance.axes_hit = p.value("axes_hit", std::vector<std::string>{});
      s.provenance.interface_id = p.value("interface", std::string{});
      s.provenance.with_cfg_context = p.value("with_cfg_context", false);
    }
    return s;
  } catch (const json::exception& e) {
    throw Error("InvalidSample", e.what());
  }
}

}  // namespace factorscan::datagen
