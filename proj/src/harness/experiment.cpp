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


#include "factorscan/harness/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "factorscan/datagen/corpus.hpp"
#include "factorscan/error.hpp"
#include "factorscan/factors/analyzer.hpp"
#include "factorscan/fusion/features.hpp"

namespace factorscan::harness {

std::vector<fusion::Sample<double>> featurize(const std::vector<datagen::LabeledSample>& samples) {
  std::vector<fusion::Sample<double>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const FactorSet fs = analyze(build_program(s.source));
    out.push_back({fusion::extract_branch_features(fs), s.labels.label});
  }
  return out;
}

std::vector<Prediction> predict_all(const fusion::Model<double>& model,
                                    const std::vector<fusion::Sample<double>>& data) {
  std::vector<Prediction> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back({model.predict(s.x), s.label});
  return out;
}

std::vector<int> checkpoint_steps(int total_steps, double fraction) {
  if (total_steps < 1) throw Error("InvalidParams", "total_steps must be positive");
  const int every = std::max(1, static_cast<int>(std::ceil(fraction * total_steps - 1e-12)));
  std::vector<int> steps;
  for (int t = every; t <= total_steps; t += every) steps.push_back(t);
  if (steps.empty() || steps.back() != total_steps) steps.push_back(total_steps);
  return steps;
}

namespace {

void require_both_classes(const std::vector<fusion::Sample<double>>& d, const char* what) {
  bool pos = false, neg = false;
  for (const auto& s : d) (s.label ? pos : neg) = true;
  if (!pos || !neg) throw Error("SingleClass", std::string(what) + " set contains a single class");
}

}  // namespace

Trajectory train_with_checkpoints(const std::vector<fusion::Sample<double>>& train_set,
                                  const std::vector<fusion::Sample<double>>& eval_set, const RunConfig& cfg,
                                  std::uint64_t seed) {
  require_both_classes(train_set, "training");
  require_both_classes(eval_set, "evaluation");
  Trajectory tr;
  tr.seed = seed;
  tr.steps = checkpoint_steps(cfg.train.total_steps, cfg.prior_shift.checkpoint_fraction);
  fusion::TrainConfig tc = cfg.train;
  tc.seed = seed;
  auto model = fusion::initialize(cfg.gate, cfg.hidden, seed);
  std::size_t next = 0;
  fusion::train<double>(train_set, std::move(model), tc,
                fusion::StepCallback<double>([&](int step, const fusion::Model<double>& m, const fusion::LossBreakdown<double>&) {
                  if (next < tr.steps.size() && step + 1 == tr.steps[next]) {
                    tr.auroc.push_back(auroc(predict_all(m, eval_set)));
                    ++next;
                  }
                }));
  return tr;
}

PriorShiftReport run_prior_shift(const RunConfig& cfg) {
  const auto& ps = cfg.prior_shift;
  if (ps.ratios.empty() || cfg.seeds.empty()) throw Error("InvalidParams", "need at least one ratio and one seed");
  datagen::CorpusConfig ec;
  ec.task = datagen::Task::Full;
  ec.count = ps.eval_count;
  ec.seed = ps.eval_seed;
  const auto eval_set = featurize(datagen::gen_corpus(ec).samples);

  PriorShiftReport rep;
  for (const auto& [pos, neg] : ps.ratios) {
    std::vector<double> mean;
    for (std::uint64_t seed : cfg.seeds) {
      datagen::CorpusConfig tc;
      tc.task = datagen::Task::Full;
      tc.count = ps.train_count;
      tc.pos_ratio = pos;
      tc.neg_ratio = neg;
      tc.seed = seed;
      Trajectory t = train_with_checkpoints(featurize(datagen::gen_corpus(tc).samples), eval_set, cfg, seed);
      t.pos_ratio = pos;
      t.neg_ratio = neg;
      if (mean.empty()) mean.assign(t.auroc.size(), 0.0);
      for (std::size_t i = 0; i < t.auroc.size(); ++i) mean[i] += t.auroc[i] / double(cfg.seeds.size());
      rep.runs.push_back(std::move(t));
    }
    rep.ratio_means.push_back(std::move(mean));
  }

  double sum = 0.0;
  long count = 0;
  for (std::size_t a = 0; a < rep.ratio_means.size(); ++a)
    for (std::size_t b = a + 1; b < rep.ratio_means.size(); ++b)
      for (std::size_t i = 0; i < rep.ratio_means[a].size(); ++i) {
        sum += std::abs(rep.ratio_means[a][i] - rep.ratio_means[b][i]);
        ++count;
      }
  rep.mean_deviation = count ? sum / double(count) : 0.0;
  rep.min_final_auroc = 1.0;
  for (std::size_t a = 0; a < rep.runs.size(); ++a) {
    rep.min_final_auroc = std::min(rep.min_final_auroc, rep.runs[a].auroc.back());
    for (std::size_t b = a + 1; b < rep.runs.size(); ++b)
      for (std::size_t i = 0; i < rep.runs[a].auroc.size(); ++i)
        rep.max_pairwise_deviation =
            std::max(rep.max_pairwise_deviation, std::abs(rep.runs[a].auroc[i] - rep.runs[b].auroc[i]));
  }
  return rep;
}

nlohmann::json to_json(const PriorShiftReport& r) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& t : r.runs)
    runs.push_back({{"ratio", {t.pos_ratio, t.neg_ratio}}, {"seed", t.seed}, {"steps", t.steps}, {"auroc", t.auroc}});
  return {{"runs", runs},
          {"ratio_means", r.ratio_means},
          {"mean_deviation", r.mean_deviation},
          {"max_pairwise_deviation", r.max_pairwise_deviation},
          {"min_final_auroc", r.min_final_auroc}};
}

}  // namespace factorscan::harness
