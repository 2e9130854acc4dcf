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

#ifndef GDP_KERNELS_KERNELS_H_
#define GDP_KERNELS_KERNELS_H_

#include <cstddef>
#include <cstdint>
#include <string_view>

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2/FMA version; the active table is chosen once at startup
// from CPU features (override with GDP_ISA=scalar|avx2). Variants agree to
// rounding, not bitwise, so a process must not switch ISA mid-computation
// when bit-level reproducibility is expected.
namespace gdp::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view IsaName(Isa isa);

// Coefficients of one reverse step, applied elementwise:
//   x0  = (x - eps_scale * e) * inv_signal
//   c   = clip ? clamp(x0, lo, hi) : x0
//   out = signal_prev * c + eps_prev * e + noise_prev * n
struct CombineCoefficients {
  double eps_scale = 0.0;   // sqrt(1 - abar_t)
  double inv_signal = 1.0;  // 1 / sqrt(abar_t)
  double signal_prev = 0.0; // sqrt(abar_prev)
  double eps_prev = 0.0;    // sqrt(1 - abar_prev - sigma^2)
  double noise_prev = 0.0;  // gamma * sigma
  bool clip = true;
  double lo = -1.0;
  double hi = 1.0;
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = (x - eps_scale * e) * inv_signal
  void (*x0_hat)(const double* x, const double* e, double* out, std::size_t n,
                 double eps_scale, double inv_signal);
  // sum_i |v_i - clamp(v_i, lo, hi)|
  double (*clip_violation_l1)(const double* v, std::size_t n, double lo,
                              double hi);
  // Fused reverse step; `noise` may be null (term skipped). Returns the
  // number of x0 entries strictly outside [lo, hi] before projection.
  std::int64_t (*denoise_combine)(const double* x, const double* e,
                                  const double* noise, double* out,
                                  std::size_t n,
                                  const CombineCoefficients& c);
  // y[rows x outs] = x[rows x inner] * w[outs x inner]^T + bias.
  // Each output row depends only on its input row.
  void (*gemm_nt)(const double* x, int rows, int inner, const double* w,
                  int outs, const double* bias, double* y);
};

const KernelTable& ScalarKernels();
// Null when the AVX2 variants were not compiled in.
const KernelTable* Avx2Kernels();

bool CpuSupports(Isa isa);
const KernelTable& Active();
Isa ActiveIsa();
// Throws std::invalid_argument when the ISA is not available on this host.
void SetActiveIsa(Isa isa);

}  // namespace gdp::kernels

#endif  // GDP_KERNELS_KERNELS_H_
