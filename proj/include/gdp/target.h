// Copyright 2026 The GDP Authors
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

#ifndef GDP_TARGET_H_
#define GDP_TARGET_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gdp/matrix.h"
#include "gdp/noise_model.h"
#include "gdp/schedule.h"

namespace gdp {

// Gaussian mixture on R^d used as a ground-truth action distribution.
//
// Under the forward process x_t = sqrt(abar_t) x_0 + sqrt(1 - abar_t) eps the
// time-t marginal is again a mixture,
//   p_t = sum_k w_k N(sqrt(abar_t) mu_k, abar_t Sigma_k + (1 - abar_t) I),
// so the optimal noise predictor has the closed form
//   eps*(x, t) = -sqrt(1 - abar_t) grad log p_t(x).
class GmmTarget {
 public:
  struct Component {
    double weight = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::VectorXd variances;  // diagonal of cov; authoritative when diagonal
    Eigen::MatrixXd factor;     // factor * factor^T == cov
  };

  // Axis-aligned components. `variances[k]` is the diagonal of Sigma_k.
  static GmmTarget Diagonal(std::vector<double> weights,
                            std::vector<std::vector<double>> means,
                            std::vector<std::vector<double>> variances,
                            bool boundary = false);
  // General covariances, which may be singular (positive semi-definite):
  // every t >= 1 marginal is still non-degenerate.
  static GmmTarget Full(std::vector<double> weights,
                        std::vector<Eigen::VectorXd> means,
                        std::vector<Eigen::MatrixXd> covs,
                        bool boundary = false);
  // 2^dim equally weighted modes at (+-0.95, ..., +-0.95) with isotropic
  // `variance`; flagged `boundary` so its tails cross the action cube.
  static GmmTarget BoundaryCorners(int dim, double variance);
  // Three unequal, well separated 2-D modes inside the cube.
  static GmmTarget ThreeMode();
  // One zero-mean Gaussian in R^dim with standard deviation `scale` along a
  // seeded random k-dimensional subspace and no variance off it.
  static GmmTarget Subspace(int k, int dim, double scale, std::uint64_t seed);

  int dim() const { return dim_; }
  int num_components() const { return static_cast<int>(components_.size()); }
  bool diagonal() const { return diagonal_; }
  bool boundary() const { return boundary_; }
  const Component& component(int k) const { return components_[k]; }
  std::vector<double> weights() const;

  // n i.i.d. draws, deterministic in seed.
  Matrix Sample(int n, std::uint64_t seed) const;

  // Batched closed-form optimal predictor at a shared t in [1, T].
  void OptimalEps(const Schedule& schedule, const Matrix& x, int t,
                  Matrix& eps) const;
  std::vector<double> OptimalEps(const Schedule& schedule,
                                 std::span<const double> x, int t) const;

  // log p_t(x) via log-sum-exp, t in [1, T].
  double LogDensity(const Schedule& schedule, std::span<const double> x,
                    int t) const;

  // Exact moments of p_t (t in [0, T]).
  Eigen::VectorXd MarginalMean(const Schedule& schedule, int t) const;
  Eigen::MatrixXd MarginalCov(const Schedule& schedule, int t) const;

  // Index of the component mean closest in Euclidean distance.
  int NearestMode(std::span<const double> x) const;

 private:
  GmmTarget() = default;
  void Validate() const;

  int dim_ = 0;
  bool diagonal_ = false;
  bool boundary_ = false;
  std::vector<Component> components_;
};

// The closed-form predictor of a target exposed as a NoiseModel
// (unconditional: obs_dim() == 0).
class OracleNoiseModel final : public NoiseModel {
 public:
  OracleNoiseModel(std::shared_ptr<const GmmTarget> target,
                   std::shared_ptr<const Schedule> schedule)
      : target_(std::move(target)), schedule_(std::move(schedule)) {}

  int action_dim() const override { return target_->dim(); }
  int obs_dim() const override { return 0; }
  void Predict(const Matrix& x, std::span<const int> t, const Matrix& obs,
               Matrix& eps) const override;

  const GmmTarget& target() const { return *target_; }

 private:
  std::shared_ptr<const GmmTarget> target_;
  std::shared_ptr<const Schedule> schedule_;
};

}  // namespace gdp

#endif  // GDP_TARGET_H_
