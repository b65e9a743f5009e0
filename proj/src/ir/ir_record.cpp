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


#include "factorscan/ir/ir_record.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "factorscan/error.hpp"

namespace factorscan::ir {

using nlohmann::json;
using minisol::CallKind;

std::optional<CallKind> parse_opcode(std::string_view name) {
  if (name == "HIGH_LEVEL_CALL") return CallKind::HighLevel;
  if (name == "CALL") return CallKind::Call;
  if (name == "LOW_LEVEL_CALL") return CallKind::LowLevel;
  if (name == "DELEGATECALL") return CallKind::DelegateCall;
  if (name == "STATICCALL") return CallKind::StaticCall;
  return std::nullopt;
}

const char* to_string(BlockTag t) {
  switch (t) {
    case BlockTag::Effect: return "EFFECT";
    case BlockTag::Interaction: return "INTERACTION";
    case BlockTag::Check: return "CHECK";
    case BlockTag::Other: return "OTHER";
  }
  return "OTHER";
}

const char* to_string(OpType t) {
  switch (t) {
    case OpType::StateWrite: return "STATE_WRITE";
    case OpType::Call: return "CALL";
    case OpType::Read: return "READ";
    case OpType::Guard: return "GUARD";
    case OpType::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

bool IrBlock::has_call() const {
  return std::any_of(operations.begin(), operations.end(),
                     [](const IrOp& o) { return o.type == OpType::Call; });
}

bool IrBlock::has_state_write() const {
  return std::any_of(operations.begin(), operations.end(),
                     [](const IrOp& o) { return o.type == OpType::StateWrite; });
}

namespace {

struct Reader {
  const IngestOptions& opt;
  IrRecord& rec;

  void warn(std::string msg) { rec.warnings.push_back(std::move(msg)); }

  void unknown_fields(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (std::find_if(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }) ==
          known.end())
        warn("ignored unknown field '" + it.key() + "' in " + where);
    }
  }

  static std::optional<std::string> opt_string(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (j[key].is_string()) return j[key].get<std::string>();
    return j[key].dump();
  }

  static std::vector<std::string> strings(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || j[key].is_null()) return {};
    if (!j[key].is_array()) throw Error("InvalidRecord", std::string(key) + " must be a list in " + where);
    std::vector<std::string> out;
    for (const auto& s : j[key]) {
      if (!s.is_string()) throw Error("InvalidRecord", std::string(key) + " must hold strings in " + where);
      out.push_back(s.get<std::string>());
    }
    return out;
  }

  std::optional<CallKind> opcode(const std::string& text, const std::string& where) {
    auto k = parse_opcode(text);
    if (!k) {
      if (opt.strict) throw Error("UnknownOpcode", "unknown opcode '" + text + "' in " + where);
      warn("unknown opcode '" + text + "' in " + where);
    }
    return k;
  }

  BytecodeCallEntry call_entry(const json& j, std::size_t i) {
    const std::string where = "bytecode_calls[" + std::to_string(i) + "]";
    if (!j.is_object()) throw Error("InvalidRecord", where + " must be an object");
    unknown_fields(j, {"opcode", "to_source", "value", "likely_src_fn", "source_hint"}, where);
    BytecodeCallEntry e;
    if (!j.contains("opcode") || !j["opcode"].is_string())
      throw Error("InvalidRecord", where + " needs a string opcode");
    e.opcode_text = j["opcode"].get<std::string>();
    e.opcode = opcode(e.opcode_text, where);
    e.to_source = opt_string(j, "to_source").value_or("");
    if (e.to_source.empty()) throw Error("InvalidRecord", where + " needs a non-empty to_source");
    e.value = opt_string(j, "value");
    e.likely_src_fn = opt_string(j, "likely_src_fn");
    e.source_hint = opt_string(j, "source_hint");
    return e;
  }

  IrOp op(const json& j, const std::string& where) {
    if (!j.is_object()) throw Error("InvalidRecord", where + " must be an object");
    unknown_fields(j, {"id", "type", "opcode", "to_source", "reads", "writes", "source_hint"}, where);
    IrOp o;
    o.id = opt_string(j, "id").value_or("");
    const std::string type = opt_string(j, "type").value_or("");
    if (type == "STATE_WRITE") o.type = OpType::StateWrite;
    else if (type == "CALL") o.type = OpType::Call;
    else if (type == "READ") o.type = OpType::Read;
    else if (type == "GUARD") o.type = OpType::Guard;
    else warn("unknown operation type '" + type + "' in " + where + " ignored");
    o.to_source = opt_string(j, "to_source");
    o.reads = strings(j, "reads", where);
    o.writes = strings(j, "writes", where);
    o.source_hint = opt_string(j, "source_hint");
    if (auto text = opt_string(j, "opcode")) o.opcode = opcode(*text, where);
    if (o.type == OpType::Call && !j.contains("opcode")) {
      if (opt.strict) throw Error("InvalidRecord", where + ": CALL operation without opcode");
      warn(where + ": CALL operation without opcode");
    }
    if (o.type == OpType::StateWrite && o.writes.empty()) {
      if (opt.strict) throw Error("InvalidRecord", where + ": STATE_WRITE without writes");
      warn(where + ": STATE_WRITE without writes");
    }
    return o;
  }

  IrBlock block(const json& j, std::size_t i) {
    const std::string where = "blocks[" + std::to_string(i) + "]";
    if (!j.is_object()) throw Error("InvalidRecord", where + " must be an object");
    unknown_fields(j, {"block_id", "tag", "block_depends_on", "statements", "operations"}, where);
    IrBlock b;
    if (!j.contains("block_id") || !j["block_id"].is_number_integer())
      throw Error("InvalidRecord", where + " needs an integer block_id");
    b.block_id = j["block_id"].get<int>();
    const std::string tag = opt_string(j, "tag").value_or("OTHER");
    if (tag == "EFFECT") b.tag = BlockTag::Effect;
    else if (tag == "INTERACTION") b.tag = BlockTag::Interaction;
    else if (tag == "CHECK") b.tag = BlockTag::Check;
    else {
      if (tag != "OTHER") warn("unknown tag '" + tag + "' in " + where + " treated as OTHER");
      b.tag = BlockTag::Other;
    }
    if (j.contains("block_depends_on") && !j["block_depends_on"].is_null()) {
      if (!j["block_depends_on"].is_array()) throw Error("InvalidRecord", where + ": block_depends_on must be a list");
      for (const auto& d : j["block_depends_on"]) {
        if (!d.is_number_integer()) throw Error("InvalidRecord", where + ": block ids must be integers");
        b.block_depends_on.push_back(d.get<int>());
      }
    }
    b.statements = strings(j, "statements", where);
    if (j.contains("operations") && !j["operations"].is_null()) {
      if (!j["operations"].is_array()) throw Error("InvalidRecord", where + ": operations must be a list");
      std::size_t k = 0;
      for (const auto& o : j["operations"])
        b.operations.push_back(op(o, where + ".operations[" + std::to_string(k++) + "]"));
    }
    return b;
  }

  void blocks(const json& list) {
    if (list.is_null()) return;
    if (!list.is_array()) throw Error("InvalidRecord", "blocks must be a list");
    std::size_t i = 0;
    for (const auto& b : list) rec.blocks.push_back(block(b, i++));
  }

  void read(const json& j) {
    if (!j.is_object()) throw Error("InvalidRecord", "a record must be a JSON object");
    unknown_fields(j, {"id", "sol_name", "sol_path", "bytecode_calls", "IR-DFG", "blocks"}, "record");
    if (j.contains("id") && !j["id"].is_null()) {
      if (!j["id"].is_number_integer()) throw Error("InvalidRecord", "id must be an integer");
      rec.id = j["id"].get<long long>();
    }
    rec.sol_name = opt_string(j, "sol_name");
    rec.sol_path = opt_string(j, "sol_path");
    if (j.contains("bytecode_calls") && !j["bytecode_calls"].is_null()) {
      if (!j["bytecode_calls"].is_array()) throw Error("InvalidRecord", "bytecode_calls must be a list");
      std::size_t i = 0;
      for (const auto& e : j["bytecode_calls"]) rec.bytecode_calls.push_back(call_entry(e, i++));
    }
    if (j.contains("IR-DFG") && !j["IR-DFG"].is_null()) {
      const auto& dfg = j["IR-DFG"];
      if (!dfg.is_object()) throw Error("InvalidRecord", "IR-DFG must be an object");
      unknown_fields(dfg, {"blocks"}, "IR-DFG");
      if (dfg.contains("blocks")) blocks(dfg["blocks"]);
    }
    if (j.contains("blocks")) blocks(j["blocks"]);

    std::set<int> ids;
    for (const auto& b : rec.blocks)
      if (!ids.insert(b.block_id).second)
        throw Error("InvalidRecord", "duplicate block_id " + std::to_string(b.block_id));
    for (const auto& b : rec.blocks)
      for (int d : b.block_depends_on)
        if (!ids.count(d))
          throw Error("InvalidRecord", "block " + std::to_string(b.block_id) + " depends on unknown block " +
                                           std::to_string(d));
  }
};

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error("MalformedJson", e.what());
  }
}

IrRecord record_from(const json& j, const IngestOptions& opt) {
  IrRecord rec;
  Reader{opt, rec}.read(j);
  return rec;
}

// Paths alias iff their normalised strings are equal.
bool paths_overlap(const std::string& a, const std::string& b) { return a == b; }

bool opcode_counts(std::optional<CallKind> k, const IngestOptions& opt) {
  if (!k) return true;
  auto it = opt.opcode_weight.find(*k);
  return it == opt.opcode_weight.end() || it->second > 0.0;
}

}  // namespace

IrRecord parse_ir_record(std::string_view json_text, const IngestOptions& opt) {
  return record_from(parse_json(json_text), opt);
}

std::vector<IrRecord> parse_ir_stream(std::string_view text, const IngestOptions& opt) {
  std::vector<IrRecord> out;
  json whole;
  bool single = true;
  try {
    whole = json::parse(text.begin(), text.end());
  } catch (const json::parse_error&) {
    single = false;
  }
  if (single) {
    if (whole.is_array()) {
      for (const auto& r : whole) out.push_back(record_from(r, opt));
    } else {
      out.push_back(record_from(whole, opt));
    }
    return out;
  }
  std::size_t start = 0;
  int lineno = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    std::string_view line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(parse_ir_record(line, opt));
      } catch (const Error& e) {
        throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    start = end + 1;
  }
  return out;
}

std::vector<int> topological_block_order(const IrRecord& rec) {
  const int n = int(rec.blocks.size());
  std::unordered_map<int, int> index;
  for (int i = 0; i < n; ++i) index[rec.blocks[i].block_id] = i;
  std::vector<std::vector<int>> out(n);
  std::vector<int> indeg(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int d : rec.blocks[i].block_depends_on) {
      auto it = index.find(d);
      if (it == index.end()) throw Error("InvalidRecord", "depends on unknown block " + std::to_string(d));
      out[it->second].push_back(i);
      ++indeg[i];
    }
  }
  using Item = std::pair<int, int>;  // (block_id, index)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push({rec.blocks[i].block_id, i});
  std::vector<int> order;
  while (!ready.empty()) {
    const int i = ready.top().second;
    ready.pop();
    order.push_back(rec.blocks[i].block_id);
    for (int j : out[i])
      if (--indeg[j] == 0) ready.push({rec.blocks[j].block_id, j});
  }
  if (int(order.size()) != n) throw Error("CyclicDependsOn", "block_depends_on contains a cycle");
  return order;
}

IrFactors record_to_factors(const IrRecord& rec, const IngestOptions& opt) {
  IrFactors res;
  if (rec.blocks.empty()) {
    const int n = int(rec.bytecode_calls.size());
    res.factors = FactorSet::zeros(n, UnitKind::Block);
    for (int i = 0; i < n; ++i) {
      res.unit_ids.push_back(i);
      const auto& e = rec.bytecode_calls[i];
      res.factors.call_kind[i] = e.opcode;
      if (opcode_counts(e.opcode, opt)) res.factors.phi_E(i) = 1;
    }
    return res;
  }

  res.from_blocks = true;
  res.unit_ids = topological_block_order(rec);
  const int n = int(res.unit_ids.size());
  std::unordered_map<int, int> unit_of;
  for (int i = 0; i < n; ++i) unit_of[res.unit_ids[i]] = i;
  std::vector<const IrBlock*> blk(n);
  for (const auto& b : rec.blocks) blk[unit_of[b.block_id]] = &b;

  FactorSet& fs = res.factors;
  fs = FactorSet::zeros(n, UnitKind::Block);

  // Reachability over depends_on, indexed by unit. Edges run from a block to
  // the blocks that depend on it, so they always point to larger units.
  std::vector<std::vector<char>> edge(n, std::vector<char>(n, 0)), reach = edge;
  bool any_edge = false;
  for (int i = 0; i < n; ++i)
    for (int d : blk[i]->block_depends_on) {
      edge[unit_of[d]][i] = reach[unit_of[d]][i] = 1;
      any_edge = true;
    }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (reach[i][k])
        for (int j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;

  // Call inputs and update footprints for the VarPath fallback.
  std::vector<std::vector<std::string>> call_paths(n), upd_paths(n);
  for (int i = 0; i < n; ++i) {
    const IrBlock& b = *blk[i];
    bool call = b.tag == BlockTag::Interaction;
    for (const auto& o : b.operations) {
      if (o.type == OpType::Call) {
        if (!opcode_counts(o.opcode, opt)) continue;
        call = true;
        if (!fs.call_kind[i]) fs.call_kind[i] = o.opcode;
        call_paths[i].insert(call_paths[i].end(), o.reads.begin(), o.reads.end());
        if (o.to_source) call_paths[i].push_back(*o.to_source);
      } else if (o.type == OpType::StateWrite) {
        upd_paths[i].insert(upd_paths[i].end(), o.reads.begin(), o.reads.end());
        upd_paths[i].insert(upd_paths[i].end(), o.writes.begin(), o.writes.end());
      }
    }
    fs.phi_E(i) = call ? 1 : 0;
    fs.phi_S(i) = (b.tag == BlockTag::Effect || b.has_state_write()) ? 1 : 0;
  }

  auto shared_path = [&](int c, int u) -> std::optional<std::string> {
    for (const auto& a : call_paths[c])
      for (const auto& b : upd_paths[u])
        if (paths_overlap(a, b)) return a;
    return std::nullopt;
  };

  // Inside one block the listed operation order decides; tag-only units
  // carry no order.
  auto same_block_order = [&](int i) -> int {
    int first_call = -1, last_write = -1, k = 0;
    for (const auto& o : blk[i]->operations) {
      if (o.type == OpType::Call && first_call < 0 && opcode_counts(o.opcode, opt)) first_call = k;
      if (o.type == OpType::StateWrite) last_write = k;
      ++k;
    }
    if (first_call < 0 || last_write < 0) return 0;
    return first_call < last_write ? -1 : +1;
  };

  for (int c = 0; c < n; ++c) {
    if (!fs.phi_E(c)) continue;
    for (int u = 0; u < n; ++u) {
      if (!fs.phi_S(u)) continue;
      DepKind kind = DepKind::None;
      std::string why;
      int order = 0;
      if (c == u) {
        kind = DepKind::Direct;
        why = "same block";
        order = same_block_order(c);
      } else if (any_edge) {
        if (edge[c][u] || edge[u][c]) kind = DepKind::Direct;
        else if (reach[c][u] || reach[u][c]) kind = DepKind::Indirect;
        if (kind != DepKind::None) {
          why = "block_depends_on";
          order = reach[c][u] ? -1 : +1;
        }
      } else if (auto p = shared_path(c, u)) {
        kind = DepKind::Direct;
        why = "shared path " + *p;
        order = c < u ? -1 : +1;
      }
      if (kind == DepKind::None) continue;
      fs.phi_D(c, u) = 1;
      fs.dep_kind(c, u) = static_cast<std::int8_t>(kind);
      fs.phi_O(c, u) = static_cast<std::int8_t>(order);
      fs.witnesses.push_back({c, u, why});
    }
  }
  return res;
}

}  // namespace factorscan::ir
