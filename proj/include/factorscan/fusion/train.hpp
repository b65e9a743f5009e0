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


#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "factorscan/error.hpp"
#include "factorscan/fusion/model.hpp"

namespace factorscan::fusion {

struct TrainConfig {
  double learning_rate = 0.05;
  int total_steps = 300;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.0;  // decoupled; applied to U and w only
  JacoOptions jaco;

  void validate() const {
    if (total_steps < 1) throw Error("InvalidParams", "total_steps must be >= 1");
    if (batch_size < 1) throw Error("InvalidParams", "batch_size must be >= 1");
    if (!(learning_rate > 0)) throw Error("InvalidParams", "learning_rate must be positive");
    if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1))
      throw Error("InvalidParams", "moment decays must lie in [0, 1)");
    if (!(weight_decay >= 0)) throw Error("InvalidParams", "weight_decay must be >= 0");
  }
};

template <typename Scalar>
struct Sample {
  BranchFeatures<Scalar> x;
  int label = 0;
};

template <typename Scalar>
struct Model {
  GateParams<Scalar> gate;
  HeadParams<Scalar> head;

  Eigen::Index dim() const { return head.w.size(); }

  Scalar predict(const BranchFeatures<Scalar>& x) const {
    return fuse_and_predict(x, fusion::gate(x, gate), head).prob;
  }
};

/// Steps during which only the gate scores move.
inline int warmup_steps(double rho, int total_steps) {
  return static_cast<int>(std::ceil(rho * total_steps - 1e-12));
}

/// Uniform(-0.1, 0.1) gate weights from the seed, zero head.
template <typename Scalar>
Model<Scalar> initialize(const GateParams<Scalar>& config, Eigen::Index H, std::uint64_t seed) {
  Model<Scalar> m;
  m.gate = config;
  m.gate.U = BranchMatrix<Scalar>::Zero(H, kBranches);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int k = 0; k < kBranches; ++k)
    for (Eigen::Index i = 0; i < H; ++i) m.gate.U(i, k) = Scalar(u(rng));
  m.gate.c.setZero();
  m.head.w = Vector<Scalar>::Zero(H);
  m.head.b = Scalar(0);
  return m;
}

namespace detail {

/// Adaptive moments for one parameter group with its own step counter.
template <typename Scalar>
struct AdamSlot {
  Matrix<Scalar> m, v;
  long t = 0;

  template <typename Derived, typename GradDerived>
  void step(Eigen::MatrixBase<Derived>& theta, const Eigen::MatrixBase<GradDerived>& grad,
            const TrainConfig& cfg, bool decay) {
    if (m.size() == 0) {
      m = Matrix<Scalar>::Zero(theta.rows(), theta.cols());
      v = Matrix<Scalar>::Zero(theta.rows(), theta.cols());
    }
    ++t;
    const Scalar b1(cfg.beta1), b2(cfg.beta2), lr(cfg.learning_rate);
    m = b1 * m + (Scalar(1) - b1) * grad;
    v = b2 * v + (Scalar(1) - b2) * grad.cwiseAbs2();
    const Scalar c1 = Scalar(1) - Scalar(std::pow(cfg.beta1, double(t)));
    const Scalar c2 = Scalar(1) - Scalar(std::pow(cfg.beta2, double(t)));
    Matrix<Scalar> upd =
        (m / c1).array() / ((v / c2).array().sqrt() + Scalar(cfg.adam_eps));
    if (decay) upd += Scalar(cfg.weight_decay) * theta;
    theta -= lr * upd;
  }
};

}  // namespace detail

template <typename Scalar>
struct TrainResult {
  Model<Scalar> model;
  std::vector<LossBreakdown<Scalar>> history;  // batch means, one per step
  int warmup_steps = 0;
};

/// Called after the update of every step with the 0-based step index.
template <typename Scalar>
using StepCallback = std::function<void(int, const Model<Scalar>&, const LossBreakdown<Scalar>&)>;

/// Mini-batch training. The first ceil(rho T) steps update only (U, c).
template <typename Scalar>
TrainResult<Scalar> train(const std::vector<Sample<Scalar>>& data, Model<Scalar> model,
                          const TrainConfig& cfg, const StepCallback<Scalar>& on_step = {}) {
  cfg.validate();
  model.gate.validate();
  if (data.empty()) throw Error("EmptyDataset", "training set is empty");
  for (const auto& s : data) {
    if (s.label != 0 && s.label != 1) throw Error("InvalidLabel", "labels must be 0 or 1");
    if (s.x.dim() != model.dim()) throw Error("DimensionMismatch", "feature width differs from model");
  }

  TrainResult<Scalar> res;
  res.warmup_steps = warmup_steps(double(model.gate.warmup_ratio), cfg.total_steps);
  res.history.reserve(cfg.total_steps);

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();

  detail::AdamSlot<Scalar> slot_U, slot_c, slot_w, slot_b;
  const Eigen::Index H = model.dim();

  for (int step = 0; step < cfg.total_steps; ++step) {
    Gradients<Scalar> grad(H);
    LossBreakdown<Scalar> mean;
    const std::size_t bs = std::min<std::size_t>(cfg.batch_size, data.size());
    for (std::size_t i = 0; i < bs; ++i) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const auto& s = data[order[cursor++]];
      const auto r = sample_loss(s.x, s.label, model.gate, model.head, cfg.jaco);
      grad += r.grad;
      mean.ce += r.loss.ce;
      mean.jaco += r.loss.jaco;
      mean.total += r.loss.total;
    }
    const Scalar inv = Scalar(1) / Scalar(bs);
    grad *= inv;
    mean.ce *= inv;
    mean.jaco *= inv;
    mean.total *= inv;
    using std::isfinite;
    if (!isfinite(mean.total) || !grad.finite())
      throw Error("NonFiniteLoss", "non-finite loss at step " + std::to_string(step));

    if (!model.gate.fixed_alpha) {
      slot_U.step(model.gate.U, grad.dU, cfg, true);
      slot_c.step(model.gate.c, grad.dc, cfg, false);
    }
    if (step >= res.warmup_steps) {
      slot_w.step(model.head.w, grad.dw, cfg, true);
      Eigen::Matrix<Scalar, 1, 1> b(model.head.b), db(grad.db);
      slot_b.step(b, db, cfg, false);
      model.head.b = b(0);
    }
    res.history.push_back(mean);
    if (on_step) on_step(step, model, mean);
  }
  res.model = std::move(model);
  return res;
}

}  // namespace factorscan::fusion
