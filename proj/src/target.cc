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

#include "gdp/target.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gdp/rng.h"

namespace gdp {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Per-component quantities of the time-t marginal.
struct MarginalFactor {
  double log_weight;
  Eigen::VectorXd shifted_mean;  // sqrt(abar) mu
  Eigen::VectorXd inv_diag;      // diagonal path
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_det;
};

void CheckTimestep(const Schedule& schedule, int t) {
  if (t < 1 || t > schedule.num_steps()) {
    throw std::invalid_argument("timestep " + std::to_string(t) +
                                " outside [1, T]");
  }
}

std::vector<MarginalFactor> Factorize(
    const std::vector<GmmTarget::Component>& components, bool diagonal,
    double abar) {
  std::vector<MarginalFactor> out;
  out.reserve(components.size());
  for (const auto& c : components) {
    if (c.weight <= 0.0) continue;
    MarginalFactor f;
    f.log_weight = std::log(c.weight);
    f.shifted_mean = std::sqrt(abar) * c.mean;
    if (diagonal) {
      const Eigen::VectorXd var =
          (abar * c.variances.array() + (1.0 - abar)).matrix();
      f.inv_diag = var.cwiseInverse();
      f.log_det = var.array().log().sum();
    } else {
      const Eigen::Index d = c.mean.size();
      Eigen::MatrixXd cov = abar * c.cov;
      cov.diagonal().array() += 1.0 - abar;
      f.llt.compute(cov);
      if (f.llt.info() != Eigen::Success) {
        throw std::runtime_error("marginal covariance not positive definite");
      }
      const Eigen::MatrixXd& l = f.llt.matrixLLT();
      f.log_det = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) f.log_det += 2.0 * std::log(l(i, i));
    }
    out.push_back(std::move(f));
  }
  return out;
}

// Fills eps (may be null) and returns log p_t(x).
double Evaluate(const std::vector<MarginalFactor>& factors, bool diagonal,
                const Eigen::Ref<const Eigen::VectorXd>& x, double abar,
                Eigen::VectorXd* eps) {
  const Eigen::Index d = x.size();
  const std::size_t k = factors.size();
  thread_local std::vector<double> log_terms;
  thread_local std::vector<Eigen::VectorXd> solved;
  log_terms.resize(k);
  solved.resize(k);
  double max_term = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    const auto& f = factors[i];
    const Eigen::VectorXd r = x - f.shifted_mean;
    solved[i] = diagonal ? Eigen::VectorXd(r.cwiseProduct(f.inv_diag))
                         : Eigen::VectorXd(f.llt.solve(r));
    log_terms[i] =
        f.log_weight - 0.5 * (d * kLog2Pi + f.log_det + r.dot(solved[i]));
    max_term = std::max(max_term, log_terms[i]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    log_terms[i] = std::exp(log_terms[i] - max_term);
    total += log_terms[i];
  }
  if (eps != nullptr) {
    eps->setZero(d);
    for (std::size_t i = 0; i < k; ++i) {
      *eps += (log_terms[i] / total) * solved[i];
    }
    *eps *= std::sqrt(1.0 - abar);
  }
  return max_term + std::log(total);
}

}  // namespace

GmmTarget GmmTarget::Diagonal(std::vector<double> weights,
                              std::vector<std::vector<double>> means,
                              std::vector<std::vector<double>> variances,
                              bool boundary) {
  if (weights.empty() || weights.size() != means.size() ||
      weights.size() != variances.size()) {
    throw std::invalid_argument("GMM: weights/means/variances size mismatch");
  }
  GmmTarget target;
  target.dim_ = static_cast<int>(means.front().size());
  target.diagonal_ = true;
  target.boundary_ = boundary;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (static_cast<int>(means[k].size()) != target.dim_ ||
        static_cast<int>(variances[k].size()) != target.dim_) {
      throw std::invalid_argument("GMM: component dimension mismatch");
    }
    Component c;
    c.weight = weights[k];
    c.mean = Eigen::Map<const Eigen::VectorXd>(means[k].data(), target.dim_);
    c.variances =
        Eigen::Map<const Eigen::VectorXd>(variances[k].data(), target.dim_);
    if ((c.variances.array() < 0.0).any()) {
      throw std::invalid_argument("GMM: negative variance");
    }
    c.cov = c.variances.asDiagonal();
    c.factor = c.variances.cwiseSqrt().asDiagonal();
    target.components_.push_back(std::move(c));
  }
  target.Validate();
  return target;
}

GmmTarget GmmTarget::Full(std::vector<double> weights,
                          std::vector<Eigen::VectorXd> means,
                          std::vector<Eigen::MatrixXd> covs, bool boundary) {
  if (weights.empty() || weights.size() != means.size() ||
      weights.size() != covs.size()) {
    throw std::invalid_argument("GMM: weights/means/covs size mismatch");
  }
  GmmTarget target;
  target.dim_ = static_cast<int>(means.front().size());
  target.diagonal_ = false;
  target.boundary_ = boundary;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const Eigen::MatrixXd& cov = covs[k];
    if (means[k].size() != target.dim_ || cov.rows() != target.dim_ ||
        cov.cols() != target.dim_) {
      throw std::invalid_argument("GMM: component dimension mismatch");
    }
    if (!cov.isApprox(cov.transpose(), 1e-12)) {
      throw std::invalid_argument("GMM: covariance not symmetric");
    }
    Component c;
    c.weight = weights[k];
    c.mean = means[k];
    c.cov = 0.5 * (cov + cov.transpose());
    c.variances = c.cov.diagonal();
    Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
    if (llt.info() == Eigen::Success) {
      c.factor = llt.matrixL();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.cov);
      const Eigen::VectorXd values = eig.eigenvalues();
      if (values.minCoeff() < -1e-10 * std::max(1.0, values.maxCoeff())) {
        throw std::invalid_argument(
            "GMM: covariance not positive semi-definite");
      }
      c.factor = eig.eigenvectors() *
                 values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    target.components_.push_back(std::move(c));
  }
  target.Validate();
  return target;
}

GmmTarget GmmTarget::BoundaryCorners(int dim, double variance) {
  if (dim < 1 || dim > 16) {
    throw std::invalid_argument("boundary target dimension must be in [1, 16]");
  }
  const int modes = 1 << dim;
  std::vector<double> weights(modes, 1.0 / modes);
  std::vector<std::vector<double>> means(modes, std::vector<double>(dim));
  std::vector<std::vector<double>> vars(modes,
                                        std::vector<double>(dim, variance));
  for (int m = 0; m < modes; ++m) {
    for (int i = 0; i < dim; ++i) means[m][i] = (m >> i) & 1 ? 0.95 : -0.95;
  }
  return Diagonal(std::move(weights), std::move(means), std::move(vars),
                  /*boundary=*/true);
}

GmmTarget GmmTarget::ThreeMode() {
  return Diagonal({0.5, 0.3, 0.2},
                  {{-0.5, -0.4}, {0.5, -0.3}, {0.0, 0.55}},
                  {{0.02, 0.01}, {0.01, 0.02}, {0.015, 0.015}});
}

GmmTarget GmmTarget::Subspace(int k, int dim, double scale,
                              std::uint64_t seed) {
  if (k < 1 || k > dim) {
    throw std::invalid_argument("subspace target needs 1 <= k <= dim");
  }
  KeyedRng rng(CombineKeys(seed, 0x737562));
  Eigen::MatrixXd basis(dim, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < dim; ++i) basis(i, j) = rng.Normal();
  }
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(basis).householderQ() *
      Eigen::MatrixXd::Identity(dim, k);
  const Eigen::MatrixXd cov = scale * scale * q * q.transpose();
  return Full({1.0}, {Eigen::VectorXd::Zero(dim)}, {cov});
}

void GmmTarget::Validate() const {
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight >= 0.0)) throw std::invalid_argument("GMM: negative weight");
    total += c.weight;
    if (!boundary_ && (c.mean.array().abs() >= 1.0).any()) {
      throw std::invalid_argument(
          "GMM: mean outside the open cube (-1, 1)^d on a non-boundary target");
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("GMM: weights do not sum to 1");
  }
}

std::vector<double> GmmTarget::weights() const {
  std::vector<double> w;
  for (const auto& c : components_) w.push_back(c.weight);
  return w;
}

Matrix GmmTarget::Sample(int n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("Sample needs n >= 1");
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : components_) cumulative.push_back(acc += c.weight);
  Matrix out(n, dim_);
  KeyedRng rng(CombineKeys(seed, 0x5a3b1e));
  Eigen::VectorXd z(dim_);
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform() * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t k = std::min<std::size_t>(it - cumulative.begin(),
                                                components_.size() - 1);
    for (int j = 0; j < dim_; ++j) z[j] = rng.Normal();
    const Eigen::VectorXd x =
        components_[k].mean + components_[k].factor * z;
    for (int j = 0; j < dim_; ++j) out(i, j) = x[j];
  }
  return out;
}

void GmmTarget::OptimalEps(const Schedule& schedule, const Matrix& x, int t,
                           Matrix& eps) const {
  CheckTimestep(schedule, t);
  if (x.cols() != dim_) throw std::invalid_argument("OptimalEps: bad width");
  const double abar = schedule.alpha_bar(t);
  const auto factors = Factorize(components_, diagonal_, abar);
  eps.Reset(x.rows(), dim_);
  Eigen::VectorXd e(dim_);
  for (int i = 0; i < x.rows(); ++i) {
    const Eigen::Map<const Eigen::VectorXd> xi(x.row(i).data(), dim_);
    Evaluate(factors, diagonal_, xi, abar, &e);
    for (int j = 0; j < dim_; ++j) eps(i, j) = e[j];
  }
}

std::vector<double> GmmTarget::OptimalEps(const Schedule& schedule,
                                          std::span<const double> x,
                                          int t) const {
  Matrix in(1, dim_);
  in.SetRow(0, x);
  Matrix out;
  OptimalEps(schedule, in, t, out);
  return {out.row(0).begin(), out.row(0).end()};
}

double GmmTarget::LogDensity(const Schedule& schedule,
                             std::span<const double> x, int t) const {
  CheckTimestep(schedule, t);
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("LogDensity: bad width");
  }
  const double abar = schedule.alpha_bar(t);
  const auto factors = Factorize(components_, diagonal_, abar);
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim_);
  return Evaluate(factors, diagonal_, xv, abar, nullptr);
}

Eigen::VectorXd GmmTarget::MarginalMean(const Schedule& schedule,
                                        int t) const {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim_);
  for (const auto& c : components_) mean += c.weight * c.mean;
  return std::sqrt(schedule.alpha_bar(t)) * mean;
}

Eigen::MatrixXd GmmTarget::MarginalCov(const Schedule& schedule, int t) const {
  const double abar = schedule.alpha_bar(t);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim_);
  for (const auto& c : components_) mean += c.weight * c.mean;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim_, dim_);
  for (const auto& c : components_) {
    const Eigen::VectorXd dm = c.mean - mean;
    cov += c.weight * (c.cov + dm * dm.transpose());
  }
  cov *= abar;
  cov.diagonal().array() += 1.0 - abar;
  return cov;
}

int GmmTarget::NearestMode(std::span<const double> x) const {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim_);
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < num_components(); ++k) {
    const double dist = (xv - components_[k].mean).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  return best;
}

void OracleNoiseModel::Predict(const Matrix& x, std::span<const int> t,
                               const Matrix& obs, Matrix& eps) const {
  (void)obs;
  if (static_cast<int>(t.size()) != x.rows()) {
    throw std::invalid_argument("Predict: one timestep per row required");
  }
  eps.Reset(x.rows(), target_->dim());
  // Rows sharing a timestep are evaluated together (one factorization).
  int begin = 0;
  Matrix block_eps;
  while (begin < x.rows()) {
    int end = begin + 1;
    while (end < x.rows() && t[end] == t[begin]) ++end;
    const Matrix block = x.RowBlock(begin, end - begin);
    target_->OptimalEps(*schedule_, block, t[begin], block_eps);
    std::copy(block_eps.flat().begin(), block_eps.flat().end(),
              eps.data() + static_cast<std::size_t>(begin) * eps.cols());
    begin = end;
  }
}

}  // namespace gdp
