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


#include "factorscan/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "factorscan/error.hpp"

namespace factorscan::harness {

MetricsReport metrics_from_confusion(long long tp, long long fp, long long fn, long long tn, ReportMode mode) {
  if (tp < 0 || fp < 0 || fn < 0 || tn < 0) throw Error("InvalidParams", "confusion counts must be non-negative");
  MetricsReport m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  m.recall_only = mode == ReportMode::RecallOnly || (mode == ReportMode::Auto && fp + tn == 0);
  if (tp + fn > 0) m.recall = double(tp) / double(tp + fn);
  if (!m.recall_only) {
    if (tp + fp > 0) m.precision = double(tp) / double(tp + fp);
    if (m.precision && m.recall && *m.precision + *m.recall > 0)
      m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  const long long n = m.total();
  m.accuracy = n > 0 ? double(tp + tn) / double(n) : 0.0;
  return m;
}

namespace {

void check_inputs(const std::vector<Prediction>& preds) {
  for (const auto& p : preds) {
    if (p.label != 0 && p.label != 1) throw Error("InvalidLabel", "labels must be 0 or 1");
    if (!std::isfinite(p.score)) throw Error("NonFiniteScore", "scores must be finite");
  }
}

}  // namespace

double auroc(const std::vector<Prediction>& preds) {
  check_inputs(preds);
  const auto n = preds.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return preds[a].score < preds[b].score; });
  // Average ranks over tie groups, then the rank-sum form of the U statistic.
  double rank_sum_pos = 0.0;
  long long n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && preds[idx[j]].score == preds[idx[i]].score) ++j;
    const double avg = 0.5 * double(i + 1 + j);  // mean of ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k)
      if (preds[idx[k]].label == 1) {
        rank_sum_pos += avg;
        ++n_pos;
      }
    i = j;
  }
  const long long n_neg = static_cast<long long>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error("SingleClass", "AUROC needs both classes");
  const double u = rank_sum_pos - double(n_pos) * double(n_pos + 1) / 2.0;
  return u / (double(n_pos) * double(n_neg));
}

MetricsReport compute_metrics(const std::vector<Prediction>& preds, double threshold, ReportMode mode) {
  check_inputs(preds);
  long long tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& p : preds) {
    const bool hit = p.score >= threshold;
    if (p.label == 1) (hit ? tp : fn)++;
    else (hit ? fp : tn)++;
  }
  MetricsReport m = metrics_from_confusion(tp, fp, fn, tn, mode);
  if (tp + fn > 0 && fp + tn > 0) m.auroc = auroc(preds);
  return m;
}

nlohmann::json to_json(const MetricsReport& m) {
  nlohmann::json j;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  j["tn"] = m.tn;
  auto opt = [&](const char* k, const std::optional<double>& v) { j[k] = v ? nlohmann::json(*v) : nlohmann::json(); };
  opt("precision", m.precision);
  opt("recall", m.recall);
  opt("f1", m.f1);
  j["accuracy"] = m.accuracy;
  opt("auroc", m.auroc);
  j["recall_only"] = m.recall_only;
  return j;
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
  try {
    MetricsReport m;
    m.tp = j.at("tp").get<long long>();
    m.fp = j.at("fp").get<long long>();
    m.fn = j.at("fn").get<long long>();
    m.tn = j.at("tn").get<long long>();
    auto opt = [&](const char* k) -> std::optional<double> {
      if (!j.contains(k) || j.at(k).is_null()) return std::nullopt;
      return j.at(k).get<double>();
    };
    m.precision = opt("precision");
    m.recall = opt("recall");
    m.f1 = opt("f1");
    m.accuracy = j.at("accuracy").get<double>();
    m.auroc = opt("auroc");
    m.recall_only = j.value("recall_only", false);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error("InvalidReport", e.what());
  }
}

std::string csv_header() { return "tp,fp,fn,tn,precision,recall,f1,accuracy,auroc"; }

std::string to_csv_row(const MetricsReport& m) {
  std::ostringstream os;
  os.precision(6);
  auto cell = [&](const std::optional<double>& v) {
    if (v) os << *v;
  };
  os << m.tp << ',' << m.fp << ',' << m.fn << ',' << m.tn << ',';
  cell(m.precision);
  os << ',';
  cell(m.recall);
  os << ',';
  cell(m.f1);
  os << ',' << m.accuracy << ',';
  cell(m.auroc);
  return os.str();
}

}  // namespace factorscan::harness
