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

#include "factorscan/scoring/scoring.hpp"

#include <cmath>
#include <limits>

#include "factorscan/error.hpp"

namespace factorscan {
namespace {

bool candidate(const FactorSet& fs, int c, int u) { return fs.phi_E(c) == 1 && fs.phi_S(u) == 1; }

double entry(const FactorSet& fs, const Eigen::MatrixXd& phi_O, int c, int u, double alpha) {
  if (!candidate(fs, c, u) || fs.phi_D(c, u) != 1) return 0.0;
  return soft_order(phi_O(c, u), alpha);
}

// Log-sum-exp over the active pairs, with softmax weights on request.
double lse(const FactorSet& fs, const Eigen::MatrixXd& phi_O, const ScoreParams& p,
           std::size_t* count, Eigen::MatrixXd* weights) {
  const int n = fs.n_units;
  bool full = p.sum_mode == SumMode::FullGrid;
  double m = -std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (int c = 0; c < n; ++c)
    for (int u = 0; u < n; ++u) {
      if (!full && !candidate(fs, c, u)) continue;
      m = std::max(m, entry(fs, phi_O, c, u, p.alpha));
      ++k;
    }
  if (count) *count = k;
  if (k == 0) return 0.0;
  double acc = 0.0;
  for (int c = 0; c < n; ++c)
    for (int u = 0; u < n; ++u) {
      if (!full && !candidate(fs, c, u)) continue;
      acc += std::exp(entry(fs, phi_O, c, u, p.alpha) - m);
    }
  double out = m + std::log(acc);
  if (weights) {
    *weights = Eigen::MatrixXd::Zero(n, n);
    for (int c = 0; c < n; ++c)
      for (int u = 0; u < n; ++u) {
        if (!full && !candidate(fs, c, u)) continue;
        (*weights)(c, u) = std::exp(entry(fs, phi_O, c, u, p.alpha) - out);
      }
  }
  return out;
}

}  // namespace

void ScoreParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !std::isfinite(tau))
    throw Error("InvalidParams", "alpha must be positive and finite");
}

Verdict boolean_rule(const FactorSet& fs) {
  Verdict v;
  for (int c = 0; c < fs.n_units; ++c)
    for (int u = 0; u < fs.n_units; ++u)
      if (fs.phi_E(c) == 1 && fs.phi_S(u) == 1 && fs.phi_D(c, u) == 1 && fs.phi_O(c, u) == -1)
        v.witnesses.emplace_back(c, u);
  v.vulnerable = !v.witnesses.empty();
  return v;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double soft_order(double phi_O, double alpha) { return sigmoid(-alpha * phi_O); }

double raw_score(const FactorSet& fs, const Eigen::MatrixXd& phi_O, const ScoreParams& params) {
  return lse(fs, phi_O, params, nullptr, nullptr);
}

Eigen::MatrixXd raw_score_gradient(const FactorSet& fs, const Eigen::MatrixXd& phi_O,
                                   const ScoreParams& params) {
  Eigen::MatrixXd w;
  std::size_t k = 0;
  lse(fs, phi_O, params, &k, &w);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(fs.n_units, fs.n_units);
  if (k == 0) return g;
  for (int c = 0; c < fs.n_units; ++c)
    for (int u = 0; u < fs.n_units; ++u) {
      if (!candidate(fs, c, u) || fs.phi_D(c, u) != 1) continue;
      double s = soft_order(phi_O(c, u), params.alpha);
      g(c, u) = w(c, u) * (-params.alpha * s * (1.0 - s));
    }
  return g;
}

SoftScore soft_score(const FactorSet& fs, const ScoreParams& params) {
  params.validate();
  SoftScore s;
  s.mode = params.sum_mode;
  Eigen::MatrixXd phi = fs.phi_O.cast<double>();
  s.raw_f = lse(fs, phi, params, &s.candidates, nullptr);
  if (s.candidates == 0) {
    s.raw_f = 0.0;
    s.centered_f = 0.0;
  } else {
    s.centered_f = s.raw_f - std::log(static_cast<double>(s.candidates));
  }
  s.probability = predict(s, params);
  return s;
}

double predict(const SoftScore& score, const ScoreParams& params) {
  return sigmoid(params.alpha * score.f_used() - params.tau);
}

}  // namespace factorscan
