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

// Finite-difference checks for the fusion gradients, shared by the unit
// tests and the acceptance binary.

#include <cmath>
#include <random>
#include <string>

#include "factorscan/fusion/model.hpp"

namespace factorscan::test {

using namespace factorscan::fusion;

using LD = long double;

struct Draw {
  BranchFeatures<double> x;
  GateParams<double> gp;
  HeadParams<double> hp;
  int y = 0;
};

// Generic random parameters. Every third draw masks a branch and every
// fifth mixes a prior into it.
inline Draw random_draw(std::uint64_t seed, Eigen::Index H = kDefaultHidden) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Draw d{BranchFeatures<double>(H), GateParams<double>(H), {}, int(seed % 2)};
  for (Eigen::Index i = 0; i < d.x.Z.size(); ++i) d.x.Z.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < d.gp.U.size(); ++i) d.gp.U.data()[i] = 0.5 * g(rng);
  for (int k = 0; k < kBranches; ++k) d.gp.c[k] = 0.3 * g(rng);
  d.gp.tau_gate = u(rng);
  d.hp.w = Vector<double>(H);
  for (Eigen::Index i = 0; i < H; ++i) d.hp.w[i] = g(rng);
  d.hp.b = g(rng);
  if (seed % 3 == 0) d.gp.mask[int(seed % kBranches)] = 0;
  if (seed % 5 == 0) {
    d.gp.prior = Simplex<double>(0.1, 0.2, 0.3, 0.4);
    d.gp.prior_mixing = true;
  }
  return d;
}

template <typename T>
GateParams<T> cast_gate(const GateParams<double>& g) {
  GateParams<T> o(g.U.rows());
  o.U = g.U.cast<T>();
  o.c = g.c.cast<T>();
  o.tau_gate = T(g.tau_gate);
  o.mask = g.mask;
  if (g.prior) o.prior = g.prior->cast<T>();
  o.prior_mixing = g.prior_mixing;
  if (g.fixed_alpha) o.fixed_alpha = g.fixed_alpha->cast<T>();
  o.lambda_jaco = T(g.lambda_jaco);
  return o;
}

template <typename T>
HeadParams<T> cast_head(const HeadParams<double>& h) {
  HeadParams<T> o;
  o.w = h.w.cast<T>();
  o.b = T(h.b);
  return o;
}

enum class Quantity { Logit, Ce, Kl };

// Evaluated in long double so the difference quotient is far below the tolerance.
inline LD value(Quantity q, const BranchFeatures<LD>& x, const GateParams<LD>& gp, const HeadParams<LD>& hp, int y,
         const JacoOptions& opt) {
  const auto f = evaluate(x, gp, hp);
  switch (q) {
    case Quantity::Logit: return f.logit;
    case Quantity::Ce: return bce_with_logit(f.logit, y);
    case Quantity::Kl: {
      const auto t = sensitivity_target(f, gp, hp, y, opt.sensitivity);
      return jacobian_alignment_loss(t.q, f.omega, gp.mask);
    }
  }
  return 0;
}

inline Gradients<double> analytic(Quantity q, const Draw& d, const JacoOptions& opt) {
  const auto f = evaluate(d.x, d.gp, d.hp);
  switch (q) {
    case Quantity::Logit: return logit_gradient(d.x, f);
    case Quantity::Ce: return ce_gradient(d.x, f, d.y);
    case Quantity::Kl: return kl_gradient(d.x, d.gp, d.hp, f, sensitivity_target(f, d.gp, d.hp, d.y, opt.sensitivity), opt);
  }
  return Gradients<double>();
}

struct FdResult {
  double worst = 0.0;
  std::string where;
};

inline void check(FdResult& r, double a, LD n, const std::string& where) {
  const LD h_floor = 1e-7L;  // both sides ~0: compare absolutely
  const LD denom = std::max(std::max(std::fabs(LD(a)), std::fabs(n)), h_floor);
  const double rel = double(std::fabs(LD(a) - n) / denom);
  if (rel > r.worst) {
    r.worst = rel;
    r.where = where;
  }
}

inline FdResult finite_difference(Quantity q, const Draw& d, const JacoOptions& opt) {
  const auto g = analytic(q, d, opt);
  const LD h = 1e-6L;
  const auto x0 = d.x.cast<LD>();
  const auto gp0 = cast_gate<LD>(d.gp);
  const auto hp0 = cast_head<LD>(d.hp);
  auto central = [&](auto&& bump) {
    auto x = x0;
    auto gp = gp0;
    auto hp = hp0;
    bump(x, gp, hp, h);
    const LD plus = value(q, x, gp, hp, d.y, opt);
    x = x0;
    gp = gp0;
    hp = hp0;
    bump(x, gp, hp, -h);
    return (plus - value(q, x, gp, hp, d.y, opt)) / (2 * h);
  };
  FdResult r;
  const Eigen::Index H = d.x.dim();
  for (int k = 0; k < kBranches; ++k) {
    for (Eigen::Index i = 0; i < H; ++i) {
      check(r, g.dZ(i, k), central([&](auto& x, auto&, auto&, LD e) { x.Z(i, k) += e; }), "z");
      if (d.gp.mask[k]) check(r, g.dU(i, k), central([&](auto&, auto& gp, auto&, LD e) { gp.U(i, k) += e; }), "U");
    }
    if (d.gp.mask[k]) check(r, g.dc[k], central([&](auto&, auto& gp, auto&, LD e) { gp.c[k] += e; }), "c");
  }
  for (Eigen::Index i = 0; i < H; ++i)
    check(r, g.dw[i], central([&](auto&, auto&, auto& hp, LD e) { hp.w[i] += e; }), "w");
  check(r, g.db, central([&](auto&, auto&, auto& hp, LD e) { hp.b += e; }), "b");
  return r;
}

}  // namespace factorscan::test
