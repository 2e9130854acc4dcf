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

#include <algorithm>
#include <cstdint>

#include "gdp/kernels/kernels.h"

namespace gdp::kernels {
namespace {

double Dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double SumSquares(const double* a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * a[i];
  return sum;
}

void Axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void X0Hat(const double* x, const double* e, double* out, std::size_t n,
           double eps_scale, double inv_signal) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (x[i] - eps_scale * e[i]) * inv_signal;
  }
}

double ClipViolationL1(const double* v, std::size_t n, double lo, double hi) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] > hi) {
      sum += v[i] - hi;
    } else if (v[i] < lo) {
      sum += lo - v[i];
    }
  }
  return sum;
}

std::int64_t DenoiseCombine(const double* x, const double* e,
                            const double* noise, double* out, std::size_t n,
                            const CombineCoefficients& c) {
  std::int64_t clipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x0 = (x[i] - c.eps_scale * e[i]) * c.inv_signal;
    if (x0 < c.lo || x0 > c.hi) {
      ++clipped;
      if (c.clip) x0 = std::clamp(x0, c.lo, c.hi);
    }
    double v = c.signal_prev * x0 + c.eps_prev * e[i];
    if (noise != nullptr) v += c.noise_prev * noise[i];
    out[i] = v;
  }
  return clipped;
}

void GemmNT(const double* x, int rows, int inner, const double* w, int outs,
            const double* bias, double* y) {
  for (int r = 0; r < rows; ++r) {
    const double* xr = x + static_cast<std::size_t>(r) * inner;
    double* yr = y + static_cast<std::size_t>(r) * outs;
    for (int o = 0; o < outs; ++o) {
      const double* wo = w + static_cast<std::size_t>(o) * inner;
      double sum = 0.0;
      for (int k = 0; k < inner; ++k) sum += xr[k] * wo[k];
      yr[o] = sum + (bias != nullptr ? bias[o] : 0.0);
    }
  }
}

constexpr KernelTable kScalarTable = {
    Isa::kScalar, Dot,    SumSquares,     Axpy, X0Hat, ClipViolationL1,
    DenoiseCombine, GemmNT,
};

}  // namespace

const KernelTable& ScalarKernels() { return kScalarTable; }

}  // namespace gdp::kernels
