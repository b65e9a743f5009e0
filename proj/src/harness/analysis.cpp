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


#include "factorscan/harness/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "factorscan/error.hpp"
#include "factorscan/factors/analyzer.hpp"

namespace factorscan::harness {

namespace fs = std::filesystem;

std::vector<std::string> collect_sources(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    if (!fs::exists(p)) throw Error("MissingPath", "no such file or directory: " + p);
    if (!fs::is_directory(p)) {
      out.push_back(p);
      continue;
    }
    std::vector<std::string> found;
    for (const auto& e : fs::recursive_directory_iterator(p))
      if (e.is_regular_file() && e.path().extension() == ".sol") found.push_back(e.path().string());
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

FileReport analyze_source(const std::string& path, const std::string& text, const ScoreParams& params) {
  FileReport r;
  r.path = path;
  try {
    auto parsed = minisol::parse(text);
    if (!parsed.ok()) {
      r.error_code = parsed.errors.front().code;
      r.error = "line " + std::to_string(parsed.errors.front().line) + ": " + parsed.errors.front().msg;
      return r;
    }
    r.warnings = parsed.warnings;
    const ProgramUnit p = build_program(std::move(parsed));
    r.factors = analyze(p);
    r.verdict = boolean_rule(r.factors);
    r.score = soft_score(r.factors, params);
    r.probability = predict(r.score, params);
    r.ok = true;
  } catch (const Error& e) {
    r.error_code = e.code();
    r.error = e.what();
  }
  return r;
}

std::vector<FileReport> analyze_files(const std::vector<std::string>& files, const ScoreParams& params,
                                      unsigned workers) {
  std::vector<FileReport> out(files.size());
  auto run_one = [&](std::size_t i) {
    std::ifstream in(files[i], std::ios::binary);
    if (!in) {
      out[i].path = files[i];
      out[i].error_code = "MissingPath";
      out[i].error = "cannot read " + files[i];
      return;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    out[i] = analyze_source(files[i], ss.str(), params);
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(files.size(), 1)));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < files.size();) run_one(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

nlohmann::json to_json(const FileReport& r) {
  nlohmann::json j;
  j["path"] = r.path;
  j["ok"] = r.ok;
  if (!r.ok) {
    j["error"] = {{"code", r.error_code}, {"msg", r.error}};
    return j;
  }
  j["factors"] = nlohmann::json::parse(factorscan::to_json(r.factors));
  nlohmann::json w = nlohmann::json::array();
  for (const auto& [c, u] : r.verdict.witnesses) w.push_back({{"c", r.factors.label(c)}, {"u", r.factors.label(u)}});
  j["verdict"] = {{"vulnerable", r.verdict.vulnerable}, {"witnesses", w}};
  j["score"] = {{"raw_f", r.score.raw_f},
                {"centered_f", r.score.centered_f},
                {"candidates", r.score.candidates},
                {"probability", r.probability}};
  nlohmann::json ws = nlohmann::json::array();
  for (const auto& d : r.warnings) ws.push_back(nlohmann::json::parse(minisol::to_json(d)));
  j["warnings"] = ws;
  return j;
}

}  // namespace factorscan::harness
