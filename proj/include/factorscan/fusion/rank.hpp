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

#include <Eigen/Dense>

#include <algorithm>

#include "factorscan/error.hpp"
#include "factorscan/fusion/model.hpp"

namespace factorscan::fusion {

struct RankReport {
  int rank = 0;
  double min_eigenvalue_second_moment = 0.0;
  double balance_epsilon = 0.0;
  double min_eigenvalue_covariance = 0.0;
  bool covariance_bound_holds = false;  // min eig of cov >= eps (1 - eps) - 1e-9
};

inline constexpr double kDesignRankTol = 1e-9;
inline constexpr double kJacobianRankTol = 1e-8;

/// Rank and conditioning of a stacked factor-bit matrix (one row per sample).
template <typename Derived>
RankReport design_matrix_rank(const Eigen::MatrixBase<Derived>& bits) {
  if (bits.rows() == 0) throw Error("EmptyDataset", "design matrix has no rows");
  const Eigen::MatrixXd Z = bits.template cast<double>();
  const double n = double(Z.rows());

  RankReport r;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Z);
  lu.setThreshold(kDesignRankTol);
  r.rank = int(lu.rank());

  const Eigen::MatrixXd M = Z.transpose() * Z / n;
  r.min_eigenvalue_second_moment = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff();

  const Eigen::VectorXd mu = Z.colwise().mean().transpose();
  r.balance_epsilon = mu.cwiseMin((1.0 - mu.array()).matrix()).minCoeff();
  const Eigen::MatrixXd C = M - mu * mu.transpose();
  r.min_eigenvalue_covariance = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(C).eigenvalues().minCoeff();
  const double eps = r.balance_epsilon;
  r.covariance_bound_holds = r.min_eigenvalue_covariance >= eps * (1.0 - eps) - kDesignRankTol;
  return r;
}

/// Columns are d logit / d z_k for the four branches.
template <typename Scalar>
BranchMatrix<Scalar> logit_jacobian(const BranchFeatures<Scalar>& x, const GateParams<Scalar>& gp,
                                    const HeadParams<Scalar>& hp) {
  return evaluate(x, gp, hp).V;
}

/// Numerical rank of a matrix, relative tolerance on the top singular value.
template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& A, double rel_tol) {
  const Eigen::MatrixXd J = A.template cast<double>();
  if (J.size() == 0) return 0;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  if (!(top > 0.0)) return 0;
  return int((sv.array() > rel_tol * top).count());
}

template <typename Scalar>
int jacobian_column_rank(const GateParams<Scalar>& gp, const HeadParams<Scalar>& hp,
                         const BranchFeatures<Scalar>& x) {
  return numerical_rank(logit_jacobian(x, gp, hp), kJacobianRankTol);
}

}  // namespace factorscan::fusion
