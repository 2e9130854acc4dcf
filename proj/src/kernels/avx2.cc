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

// Built with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cstdint>

#include "gdp/kernels/kernels.h"

namespace gdp::kernels {
namespace {

inline double HorizontalSum(__m256d v) {
  const __m128d low = _mm256_castpd256_pd128(v);
  const __m128d high = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(low, high);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double Dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  }
  double sum = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double SumSquares(const double* a, std::size_t n) { return Dot(a, a, n); }

void Axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void X0Hat(const double* x, const double* e, double* out, std::size_t n,
           double eps_scale, double inv_signal) {
  const __m256d vs = _mm256_set1_pd(eps_scale);
  const __m256d vi = _mm256_set1_pd(inv_signal);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d num =
        _mm256_fnmadd_pd(vs, _mm256_loadu_pd(e + i), _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(num, vi));
  }
  for (; i < n; ++i) out[i] = (x[i] - eps_scale * e[i]) * inv_signal;
}

double ClipViolationL1(const double* v, std::size_t n, double lo, double hi) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    const __m256d over = _mm256_max_pd(_mm256_sub_pd(x, vhi), zero);
    const __m256d under = _mm256_max_pd(_mm256_sub_pd(vlo, x), zero);
    acc = _mm256_add_pd(acc, _mm256_add_pd(over, under));
  }
  double sum = HorizontalSum(acc);
  for (; i < n; ++i) {
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
  const __m256d vs = _mm256_set1_pd(c.eps_scale);
  const __m256d vi = _mm256_set1_pd(c.inv_signal);
  const __m256d vsig = _mm256_set1_pd(c.signal_prev);
  const __m256d veps = _mm256_set1_pd(c.eps_prev);
  const __m256d vnoise = _mm256_set1_pd(c.noise_prev);
  const __m256d vlo = _mm256_set1_pd(c.lo);
  const __m256d vhi = _mm256_set1_pd(c.hi);
  std::int64_t clipped = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ev = _mm256_loadu_pd(e + i);
    __m256d x0 = _mm256_mul_pd(
        _mm256_fnmadd_pd(vs, ev, _mm256_loadu_pd(x + i)), vi);
    const __m256d outside =
        _mm256_or_pd(_mm256_cmp_pd(x0, vlo, _CMP_LT_OQ),
                     _mm256_cmp_pd(x0, vhi, _CMP_GT_OQ));
    clipped += __builtin_popcount(_mm256_movemask_pd(outside));
    if (c.clip) x0 = _mm256_min_pd(_mm256_max_pd(x0, vlo), vhi);
    __m256d v = _mm256_fmadd_pd(vsig, x0, _mm256_mul_pd(veps, ev));
    if (noise != nullptr) {
      v = _mm256_fmadd_pd(vnoise, _mm256_loadu_pd(noise + i), v);
    }
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) {
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

// Accumulates four outputs of one input row. Shared by the paired and single
// row paths so a row's result does not depend on which path produced it.
inline void DotFour(const double* xr, const double* w0, const double* w1,
                    const double* w2, const double* w3, int inner,
                    double out[4]) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd();
  __m256d a3 = _mm256_setzero_pd();
  int k = 0;
  for (; k + 4 <= inner; k += 4) {
    const __m256d xv = _mm256_loadu_pd(xr + k);
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + k), xv, a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + k), xv, a1);
    a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + k), xv, a2);
    a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + k), xv, a3);
  }
  out[0] = HorizontalSum(a0);
  out[1] = HorizontalSum(a1);
  out[2] = HorizontalSum(a2);
  out[3] = HorizontalSum(a3);
  for (; k < inner; ++k) {
    out[0] += xr[k] * w0[k];
    out[1] += xr[k] * w1[k];
    out[2] += xr[k] * w2[k];
    out[3] += xr[k] * w3[k];
  }
}

inline void DotFourPair(const double* xa, const double* xb, const double* w0,
                        const double* w1, const double* w2, const double* w3,
                        int inner, double out_a[4], double out_b[4]) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
  __m256d b0 = _mm256_setzero_pd(), b1 = _mm256_setzero_pd();
  __m256d b2 = _mm256_setzero_pd(), b3 = _mm256_setzero_pd();
  int k = 0;
  for (; k + 4 <= inner; k += 4) {
    const __m256d xav = _mm256_loadu_pd(xa + k);
    const __m256d xbv = _mm256_loadu_pd(xb + k);
    const __m256d v0 = _mm256_loadu_pd(w0 + k);
    const __m256d v1 = _mm256_loadu_pd(w1 + k);
    const __m256d v2 = _mm256_loadu_pd(w2 + k);
    const __m256d v3 = _mm256_loadu_pd(w3 + k);
    a0 = _mm256_fmadd_pd(v0, xav, a0);
    a1 = _mm256_fmadd_pd(v1, xav, a1);
    a2 = _mm256_fmadd_pd(v2, xav, a2);
    a3 = _mm256_fmadd_pd(v3, xav, a3);
    b0 = _mm256_fmadd_pd(v0, xbv, b0);
    b1 = _mm256_fmadd_pd(v1, xbv, b1);
    b2 = _mm256_fmadd_pd(v2, xbv, b2);
    b3 = _mm256_fmadd_pd(v3, xbv, b3);
  }
  out_a[0] = HorizontalSum(a0);
  out_a[1] = HorizontalSum(a1);
  out_a[2] = HorizontalSum(a2);
  out_a[3] = HorizontalSum(a3);
  out_b[0] = HorizontalSum(b0);
  out_b[1] = HorizontalSum(b1);
  out_b[2] = HorizontalSum(b2);
  out_b[3] = HorizontalSum(b3);
  for (; k < inner; ++k) {
    out_a[0] += xa[k] * w0[k];
    out_a[1] += xa[k] * w1[k];
    out_a[2] += xa[k] * w2[k];
    out_a[3] += xa[k] * w3[k];
    out_b[0] += xb[k] * w0[k];
    out_b[1] += xb[k] * w1[k];
    out_b[2] += xb[k] * w2[k];
    out_b[3] += xb[k] * w3[k];
  }
}

inline double DotOne(const double* xr, const double* wo, int inner) {
  __m256d acc = _mm256_setzero_pd();
  int k = 0;
  for (; k + 4 <= inner; k += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(wo + k), _mm256_loadu_pd(xr + k),
                          acc);
  }
  double sum = HorizontalSum(acc);
  for (; k < inner; ++k) sum += xr[k] * wo[k];
  return sum;
}

void GemmNT(const double* x, int rows, int inner, const double* w, int outs,
            const double* bias, double* y) {
  const std::size_t in = static_cast<std::size_t>(inner);
  const std::size_t on = static_cast<std::size_t>(outs);
  int r = 0;
  for (; r + 2 <= rows; r += 2) {
    const double* xa = x + r * in;
    const double* xb = xa + in;
    double* ya = y + r * on;
    double* yb = ya + on;
    int o = 0;
    for (; o + 4 <= outs; o += 4) {
      const double* w0 = w + o * in;
      DotFourPair(xa, xb, w0, w0 + in, w0 + 2 * in, w0 + 3 * in, inner,
                  ya + o, yb + o);
    }
    for (; o < outs; ++o) {
      ya[o] = DotOne(xa, w + o * in, inner);
      yb[o] = DotOne(xb, w + o * in, inner);
    }
  }
  for (; r < rows; ++r) {
    const double* xr = x + r * in;
    double* yr = y + r * on;
    int o = 0;
    for (; o + 4 <= outs; o += 4) {
      const double* w0 = w + o * in;
      DotFour(xr, w0, w0 + in, w0 + 2 * in, w0 + 3 * in, inner, yr + o);
    }
    for (; o < outs; ++o) yr[o] = DotOne(xr, w + o * in, inner);
  }
  if (bias != nullptr) {
    for (int i = 0; i < rows; ++i) {
      double* yr = y + i * on;
      for (int o = 0; o < outs; ++o) yr[o] += bias[o];
    }
  }
}

constexpr KernelTable kAvx2Table = {
    Isa::kAvx2,     Dot,    SumSquares, Axpy, X0Hat, ClipViolationL1,
    DenoiseCombine, GemmNT,
};

}  // namespace

const KernelTable* Avx2Kernels() { return &kAvx2Table; }

}  // namespace gdp::kernels
