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

// Gated fusion over four factor branches. Everything here is templated on the
// scalar type so the finite-difference tests can run in long double.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "factorscan/error.hpp"

namespace factorscan::fusion {

inline constexpr int kBranches = 4;
inline constexpr int kDefaultHidden = 8;
inline constexpr std::array<const char*, kBranches> kBranchNames = {"E", "S", "D", "O"};

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using BranchMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, kBranches>;
template <typename Scalar>
using Simplex = Eigen::Matrix<Scalar, kBranches, 1>;
using Mask = Eigen::Matrix<int, kBranches, 1>;

/// Per-branch feature vectors, stored as the columns of one H x 4 matrix.
template <typename Scalar>
struct BranchFeatures {
  BranchMatrix<Scalar> Z;

  BranchFeatures() : Z(BranchMatrix<Scalar>::Zero(kDefaultHidden, kBranches)) {}
  explicit BranchFeatures(Eigen::Index H) : Z(BranchMatrix<Scalar>::Zero(H, kBranches)) {}
  explicit BranchFeatures(BranchMatrix<Scalar> z) : Z(std::move(z)) {}

  Eigen::Index dim() const { return Z.rows(); }
  auto z(int k) { return Z.col(k); }
  auto z(int k) const { return Z.col(k); }

  template <typename To>
  BranchFeatures<To> cast() const {
    return BranchFeatures<To>(Z.template cast<To>());
  }
};

template <typename Scalar>
struct GateParams {
  BranchMatrix<Scalar> U;  // column k is u_k
  Simplex<Scalar> c = Simplex<Scalar>::Zero();
  Scalar tau_gate = Scalar(1);
  Mask mask = Mask::Ones();
  std::optional<Simplex<Scalar>> prior;
  bool prior_mixing = false;  // only meaningful with a prior
  std::optional<Simplex<Scalar>> fixed_alpha;
  Scalar warmup_ratio = Scalar(0.1);
  Scalar lambda_jaco = Scalar(0.1);

  GateParams() : U(BranchMatrix<Scalar>::Zero(kDefaultHidden, kBranches)) {}
  explicit GateParams(Eigen::Index H) : U(BranchMatrix<Scalar>::Zero(H, kBranches)) {}

  int active_count() const { return mask.sum(); }

  void validate() const {
    using std::abs;
    if (!(tau_gate > Scalar(0))) throw Error("InvalidParams", "tau_gate must be positive");
    if (!(warmup_ratio >= Scalar(0) && warmup_ratio <= Scalar(1)))
      throw Error("InvalidParams", "warmup_ratio must lie in [0, 1]");
    if (!(lambda_jaco >= Scalar(0))) throw Error("InvalidParams", "lambda_jaco must be >= 0");
    for (int k = 0; k < kBranches; ++k)
      if (mask[k] != 0 && mask[k] != 1) throw Error("InvalidParams", "mask entries must be 0 or 1");
    if (active_count() == 0) throw Error("AllMasked", "every branch is masked");
    auto check_simplex = [](const Simplex<Scalar>& s, const char* what) {
      if ((s.array() < Scalar(0)).any() || abs(s.sum() - Scalar(1)) > Scalar(1e-9))
        throw Error("InvalidParams", std::string(what) + " must be a probability vector");
    };
    if (fixed_alpha) check_simplex(*fixed_alpha, "fixed_alpha");
    if (prior) check_simplex(*prior, "prior");
    if (prior_mixing && !prior) throw Error("InvalidParams", "prior mixing needs a prior");
    if (!U.allFinite() || !c.allFinite()) throw Error("InvalidParams", "gate parameters not finite");
  }
};

template <typename Scalar>
struct HeadParams {
  Vector<Scalar> w = Vector<Scalar>::Zero(kDefaultHidden);
  Scalar b = Scalar(0);
};

template <typename Scalar>
struct LossBreakdown {
  Scalar ce = Scalar(0);
  Scalar jaco = Scalar(0);
  Scalar total = Scalar(0);
};

/// Which derivative the sensitivity target is built from.
enum class Sensitivity { Total, FusionOnly };
/// Whether the KL loss also differentiates through its target q.
enum class KlTarget { Full, Detached };

struct JacoOptions {
  Sensitivity sensitivity = Sensitivity::Total;
  KlTarget target = KlTarget::Full;
};

template <typename Scalar>
inline Scalar stable_sigmoid(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

/// Binary cross-entropy from a logit: softplus(x) - y x.
template <typename Scalar>
inline Scalar bce_with_logit(Scalar x, int y) {
  using std::abs;
  using std::exp;
  using std::log1p;
  return (x > Scalar(0) ? x : Scalar(0)) - Scalar(y) * x + log1p(exp(-abs(x)));
}

/// Everything the forward pass knows, kept for the analytic backward pass.
template <typename Scalar>
struct Forward {
  Simplex<Scalar> scores = Simplex<Scalar>::Zero();  // s_k
  Simplex<Scalar> active = Simplex<Scalar>::Zero();  // softmax over active branches
  Simplex<Scalar> omega = Simplex<Scalar>::Zero();   // fusion weights
  Scalar kappa = Scalar(1);                          // d omega_k / d active_k
  bool gated = true;                                 // false under fixed_alpha
  Vector<Scalar> h;
  Scalar logit = Scalar(0);
  Scalar prob = Scalar(0);
  Simplex<Scalar> a = Simplex<Scalar>::Zero();     // <w, z_k>
  Scalar a_bar = Scalar(0);                        // sum_k active_k a_k
  Simplex<Scalar> beta = Simplex<Scalar>::Zero();  // d logit / d s_k
  BranchMatrix<Scalar> V;                          // d logit / d z_k, column k
};

namespace detail {

template <typename Scalar>
struct GateState {
  Simplex<Scalar> scores = Simplex<Scalar>::Zero();
  Simplex<Scalar> active = Simplex<Scalar>::Zero();
  Simplex<Scalar> omega = Simplex<Scalar>::Zero();
  Scalar kappa = Scalar(1);
  bool gated = true;
};

template <typename Scalar>
GateState<Scalar> gate_state(const BranchFeatures<Scalar>& x, const GateParams<Scalar>& gp) {
  using std::exp;
  if (gp.active_count() == 0) throw Error("AllMasked", "every branch is masked");
  GateState<Scalar> st;
  if (gp.fixed_alpha) {
    st.omega = *gp.fixed_alpha;
    st.active = *gp.fixed_alpha;
    st.gated = false;
    st.kappa = Scalar(0);
    return st;
  }
  st.scores = (gp.U.array() * x.Z.array()).colwise().sum().transpose() + gp.c.array();
  Scalar top = -std::numeric_limits<Scalar>::infinity();
  for (int k = 0; k < kBranches; ++k)
    if (gp.mask[k]) top = std::max(top, st.scores[k]);
  for (int k = 0; k < kBranches; ++k)
    st.active[k] = gp.mask[k] ? exp((st.scores[k] - top) / gp.tau_gate) : Scalar(0);
  st.active /= st.active.sum();
  st.omega = st.active;
  if (gp.prior_mixing && gp.prior) {
    const Simplex<Scalar> off = (Scalar(1) - gp.mask.template cast<Scalar>().array()) * gp.prior->array();
    st.kappa = Scalar(1) - off.sum();
    st.omega = st.kappa * st.active + off;
  }
  return st;
}

}  // namespace detail

/// Simplex weights over the branches. Masked branches get exactly zero unless
/// prior mixing is switched on.
template <typename Scalar>
Simplex<Scalar> gate(const BranchFeatures<Scalar>& x, const GateParams<Scalar>& gp) {
  return detail::gate_state(x, gp).omega;
}

template <typename Scalar>
struct Fused {
  Vector<Scalar> h;
  Scalar logit;
  Scalar prob;
};

template <typename Scalar>
Fused<Scalar> fuse_and_predict(const BranchFeatures<Scalar>& x, const Simplex<Scalar>& omega,
                               const HeadParams<Scalar>& hp) {
  if (hp.w.size() != x.dim()) throw Error("DimensionMismatch", "head width differs from features");
  Fused<Scalar> out;
  out.h = x.Z * omega;
  out.logit = hp.w.dot(out.h) + hp.b;
  out.prob = stable_sigmoid(out.logit);
  return out;
}

/// Full forward pass including the per-branch logit derivatives.
template <typename Scalar>
Forward<Scalar> evaluate(const BranchFeatures<Scalar>& x, const GateParams<Scalar>& gp,
                         const HeadParams<Scalar>& hp) {
  if (gp.U.rows() != x.dim() || hp.w.size() != x.dim())
    throw Error("DimensionMismatch", "parameter width differs from features");
  const auto st = detail::gate_state(x, gp);
  Forward<Scalar> f;
  f.scores = st.scores;
  f.active = st.active;
  f.omega = st.omega;
  f.kappa = st.kappa;
  f.gated = st.gated;
  const auto fused = fuse_and_predict(x, f.omega, hp);
  f.h = fused.h;
  f.logit = fused.logit;
  f.prob = fused.prob;
  f.a = (x.Z.transpose() * hp.w);
  f.V = hp.w * f.omega.transpose();
  if (f.gated) {
    f.a_bar = f.active.dot(f.a);
    for (int k = 0; k < kBranches; ++k)
      f.beta[k] = gp.mask[k] ? f.kappa * f.active[k] / gp.tau_gate * (f.a[k] - f.a_bar) : Scalar(0);
    f.V += gp.U * f.beta.asDiagonal();
  }
  return f;
}

template <typename Scalar>
struct SensitivityTarget {
  Simplex<Scalar> g = Simplex<Scalar>::Zero();
  Simplex<Scalar> q = Simplex<Scalar>::Zero();
  bool degenerate = false;
};

/// Normalised per-branch gradient norms. The label only selects the sign of
/// the true-class logit, which the norm does not see, so it is accepted for
/// interface symmetry and otherwise unused.
template <typename Scalar>
SensitivityTarget<Scalar> sensitivity_target(const Forward<Scalar>& f, const GateParams<Scalar>& gp,
                                             const HeadParams<Scalar>& hp, int /*y_true*/ = 1,
                                             Sensitivity mode = Sensitivity::Total) {
  SensitivityTarget<Scalar> t;
  for (int k = 0; k < kBranches; ++k) {
    if (!gp.mask[k]) continue;
    t.g[k] = mode == Sensitivity::Total ? f.V.col(k).norm() : f.omega[k] * hp.w.norm();
  }
  const Scalar G = t.g.sum();
  if (G > Scalar(0)) {
    t.q = t.g / G;
  } else {
    t.degenerate = true;
    t.q = gp.mask.template cast<Scalar>() / Scalar(gp.active_count());
  }
  return t;
}

inline constexpr double kKlFloor = 1e-12;

/// Active-set renormalisation of the gate weights.
template <typename Scalar>
Simplex<Scalar> active_gate(const Simplex<Scalar>& omega, const Mask& m) {
  Simplex<Scalar> r = omega.cwiseProduct(m.template cast<Scalar>());
  const Scalar s = r.sum();
  if (!(s > Scalar(0))) throw Error("AllMasked", "no gate mass on active branches");
  return r / s;
}

/// KL(q || active gate) over the active branches.
template <typename Scalar>
Scalar jacobian_alignment_loss(const Simplex<Scalar>& q, const Simplex<Scalar>& omega, const Mask& m) {
  using std::log;
  using std::max;
  const Simplex<Scalar> ah = active_gate(omega, m);
  const Scalar eps(kKlFloor);
  Scalar kl(0);
  for (int k = 0; k < kBranches; ++k) {
    if (!m[k] || q[k] <= Scalar(0)) continue;
    kl += q[k] * (log(max(q[k], eps)) - log(max(ah[k], eps)));
  }
  return kl > Scalar(0) ? kl : Scalar(0);
}

/// Gradients with respect to every trainable parameter and the inputs.
template <typename Scalar>
struct Gradients {
  BranchMatrix<Scalar> dU;
  Simplex<Scalar> dc = Simplex<Scalar>::Zero();
  Vector<Scalar> dw;
  Scalar db = Scalar(0);
  BranchMatrix<Scalar> dZ;

  explicit Gradients(Eigen::Index H = kDefaultHidden)
      : dU(BranchMatrix<Scalar>::Zero(H, kBranches)),
        dw(Vector<Scalar>::Zero(H)),
        dZ(BranchMatrix<Scalar>::Zero(H, kBranches)) {}

  Gradients& operator+=(const Gradients& o) {
    dU += o.dU;
    dc += o.dc;
    dw += o.dw;
    db += o.db;
    dZ += o.dZ;
    return *this;
  }
  Gradients& operator*=(Scalar s) {
    dU *= s;
    dc *= s;
    dw *= s;
    db *= s;
    dZ *= s;
    return *this;
  }
  bool finite() const {
    using std::isfinite;
    return dU.allFinite() && dc.allFinite() && dw.allFinite() && isfinite(db) && dZ.allFinite();
  }
};

/// d logit.
template <typename Scalar>
Gradients<Scalar> logit_gradient(const BranchFeatures<Scalar>& x, const Forward<Scalar>& f) {
  Gradients<Scalar> g(x.dim());
  g.dw = f.h;
  g.db = Scalar(1);
  g.dZ = f.V;
  if (f.gated) {
    g.dU = x.Z * f.beta.asDiagonal();
    g.dc = f.beta;
  }
  return g;
}

/// d CE, which is (p - y) times the logit gradient.
template <typename Scalar>
Gradients<Scalar> ce_gradient(const BranchFeatures<Scalar>& x, const Forward<Scalar>& f, int y) {
  Gradients<Scalar> g = logit_gradient(x, f);
  g *= (f.prob - Scalar(y));
  return g;
}

/// d KL(q || active gate), analytic. Zero when the gate is fixed.
template <typename Scalar>
Gradients<Scalar> kl_gradient(const BranchFeatures<Scalar>& x, const GateParams<Scalar>& gp,
                              const HeadParams<Scalar>& hp, const Forward<Scalar>& f,
                              const SensitivityTarget<Scalar>& t, const JacoOptions& opt = {}) {
  using std::log;
  using std::max;
  Gradients<Scalar> g(x.dim());
  if (!f.gated) return g;
  const Scalar eps(kKlFloor);
  const Scalar tau = gp.tau_gate;
  const Mask& m = gp.mask;
  const Simplex<Scalar>& al = f.active;

  // d KL / d active_k coming straight from the target side is -q_k / active_k,
  // so the softmax pullback of that piece collapses to (active_k - q_k) / tau.
  Simplex<Scalar> S = (al - t.q) / tau;
  S = S.cwiseProduct(m.template cast<Scalar>());

  const bool through_q = opt.target == KlTarget::Full && !t.degenerate;
  if (through_q) {
    Scalar kl(0);
    Simplex<Scalar> L = Simplex<Scalar>::Zero();
    for (int k = 0; k < kBranches; ++k) {
      if (!m[k]) continue;
      L[k] = log(max(t.q[k], eps)) - log(max(al[k], eps));
      kl += t.q[k] * L[k];
    }
    const Scalar G = t.g.sum();
    Simplex<Scalar> gamma = Simplex<Scalar>::Zero();
    for (int k = 0; k < kBranches; ++k)
      if (m[k]) gamma[k] = (L[k] - kl) / G;

    // Back through g_k = |v_k| with v_k = omega_k w + beta_k u_k.
    const bool total = opt.sensitivity == Sensitivity::Total;
    BranchMatrix<Scalar> N = BranchMatrix<Scalar>::Zero(x.dim(), kBranches);
    Simplex<Scalar> p = Simplex<Scalar>::Zero(), rho = Simplex<Scalar>::Zero();
    for (int k = 0; k < kBranches; ++k) {
      if (!m[k] || !(t.g[k] > Scalar(0))) continue;
      Vector<Scalar> v = total ? Vector<Scalar>(f.V.col(k)) : Vector<Scalar>(f.omega[k] * hp.w);
      N.col(k) = v / t.g[k];
      p[k] = N.col(k).dot(hp.w);
      if (total) rho[k] = gamma[k] * N.col(k).dot(gp.U.col(k));
    }
    Scalar rsum(0);
    for (int k = 0; k < kBranches; ++k)
      if (m[k]) rsum += rho[k] * al[k] / tau;

    Simplex<Scalar> Omega = Simplex<Scalar>::Zero(), Lambda = Simplex<Scalar>::Zero();
    for (int k = 0; k < kBranches; ++k) {
      if (!m[k]) continue;
      Omega[k] = gamma[k] * p[k] + rho[k] * (f.a[k] - f.a_bar) / tau - rsum * f.a[k];
      Lambda[k] = f.kappa * al[k] * (rho[k] / tau - rsum);
    }
    const Scalar omega_bar = al.dot(Omega);
    for (int k = 0; k < kBranches; ++k)
      if (m[k]) S[k] += f.kappa * al[k] / tau * (Omega[k] - omega_bar);

    for (int k = 0; k < kBranches; ++k) {
      if (!m[k]) continue;
      g.dw += gamma[k] * f.omega[k] * N.col(k) + Lambda[k] * x.z(k);
      g.dU.col(k) += gamma[k] * f.beta[k] * N.col(k);
      g.dZ.col(k) += Lambda[k] * hp.w;
    }
  }
  for (int k = 0; k < kBranches; ++k) {
    if (!m[k]) continue;
    g.dU.col(k) += S[k] * x.z(k);
    g.dc[k] = S[k];
    g.dZ.col(k) += S[k] * gp.U.col(k);
  }
  return g;
}

template <typename Scalar>
struct SampleLoss {
  LossBreakdown<Scalar> loss;
  Gradients<Scalar> grad;
};

/// Per-sample total loss CE + lambda KL and its gradient. KL is skipped under
/// a fixed gate or a zero weight.
template <typename Scalar>
SampleLoss<Scalar> sample_loss(const BranchFeatures<Scalar>& x, int y, const GateParams<Scalar>& gp,
                               const HeadParams<Scalar>& hp, const JacoOptions& opt = {}) {
  const Forward<Scalar> f = evaluate(x, gp, hp);
  SampleLoss<Scalar> out{{}, ce_gradient(x, f, y)};
  out.loss.ce = bce_with_logit(f.logit, y);
  if (f.gated && gp.lambda_jaco > Scalar(0)) {
    const auto t = sensitivity_target(f, gp, hp, y, opt.sensitivity);
    out.loss.jaco = jacobian_alignment_loss(t.q, f.omega, gp.mask);
    Gradients<Scalar> gk = kl_gradient(x, gp, hp, f, t, opt);
    gk *= gp.lambda_jaco;
    out.grad += gk;
  }
  out.loss.total = out.loss.ce + gp.lambda_jaco * out.loss.jaco;
  return out;
}

}  // namespace factorscan::fusion
