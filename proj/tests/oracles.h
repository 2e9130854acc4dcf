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


// Brute-force reference computations shared by the unit and acceptance
// tests. They use only the mixture parameters and plain sampling, never the
// closed-form predictor under test.

#ifndef GDP_TESTS_ORACLES_H_
#define GDP_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gdp/rng.h"
#include "gdp/schedule.h"
#include "gdp/target.h"

namespace gdp::testing {

// Log of the clean mixture density at y.
inline double MixtureLogDensity(const GmmTarget& target,
                                const Eigen::VectorXd& y) {
  const int d = target.dim();
  double best = -INFINITY;
  std::vector<double> terms;
  for (int k = 0; k < target.num_components(); ++k) {
    const auto& c = target.component(k);
    const Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
    const Eigen::VectorXd r = llt.matrixL().solve(y - c.mean);
    const double logdet =
        2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double term = std::log(c.weight) - 0.5 * r.squaredNorm() -
                        0.5 * logdet -
                        0.5 * d * std::log(2.0 * std::numbers::pi);
    terms.push_back(term);
    best = std::max(best, term);
  }
  double sum = 0.0;
  for (double v : terms) sum += std::exp(v - best);
  return best + std::log(sum);
}

// E[eps | x_t = x] by self-normalized importance sampling over clean draws
// y. The proposal is an even mixture of the target itself and the Gaussian
// N(x / sqrt(abar), (1 - abar) / abar I) implied by the forward process, so
// the estimate stays usable from t = 1 to t = T.
inline std::vector<double> MonteCarloPosteriorEps(const GmmTarget& target,
                                                  const Schedule& schedule,
                                                  std::span<const double> x,
                                                  int t, int draws,
                                                  std::uint64_t seed) {
  const int d = target.dim();
  const double abar = schedule.alpha_bar(t);
  const double sa = std::sqrt(abar);
  const double sn = std::sqrt(1.0 - abar);
  const double like_std = sn / sa;
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), d);
  const Eigen::VectorXd like_mean = xv / sa;
  const double log_norm = -0.5 * d * std::log(2.0 * std::numbers::pi) -
                          d * std::log(like_std);

  const Matrix prior = target.Sample(draws / 2, seed);
  KeyedRng rng(CombineKeys(seed, 0x6d63));
  std::vector<double> log_w(draws);
  Eigen::MatrixXd eps(d, draws);
  for (int i = 0; i < draws; ++i) {
    Eigen::VectorXd y(d);
    if (i < prior.rows()) {
      for (int k = 0; k < d; ++k) y[k] = prior(i, k);
    } else {
      for (int k = 0; k < d; ++k) y[k] = like_mean[k] + like_std * rng.Normal();
    }
    const double log_p = MixtureLogDensity(target, y);
    // The likelihood of x given y, as a density in y, is the Gaussian above.
    const double log_like =
        log_norm - 0.5 * (y - like_mean).squaredNorm() / (like_std * like_std);
    const double a = std::log(0.5) + log_p;
    const double b = std::log(0.5) + log_like;
    const double log_q =
        std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
    log_w[i] = log_p + log_like - log_q;
    eps.col(i) = (xv - sa * y) / sn;
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  Eigen::VectorXd num = Eigen::VectorXd::Zero(d);
  double den = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double w = std::exp(log_w[i] - top);
    num += w * eps.col(i);
    den += w;
  }
  num /= den;
  return {num.data(), num.data() + d};
}

}  // namespace gdp::testing

#endif  // GDP_TESTS_ORACLES_H_
