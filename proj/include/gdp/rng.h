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

#ifndef GDP_RNG_H_
#define GDP_RNG_H_

#include <cstdint>
#include <limits>
#include <span>

namespace gdp {

// Counter-based generator: the stream is a pure function of its 64-bit key,
// so any (seed, step, member) triple can be regenerated without replaying
// other streams. Satisfies UniformRandomBitGenerator.
class KeyedRng {
 public:
  using result_type = std::uint64_t;

  explicit KeyedRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  // Standard normal (Box-Muller, second variate cached).
  double Normal();
  // Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n);

  void FillNormal(std::span<double> out);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Finalizer from SplitMix64.
std::uint64_t Mix64(std::uint64_t x);
std::uint64_t CombineKeys(std::uint64_t a, std::uint64_t b);
std::uint64_t StreamKey(std::uint64_t seed, std::uint64_t step,
                        std::uint64_t member);

// Reserved step tags for streams that are not per-denoising-step noise.
inline constexpr std::uint64_t kInitStreamTag = 0xffffffff00000001ULL;
inline constexpr std::uint64_t kSelectionStreamTag = 0xffffffff00000002ULL;

}  // namespace gdp

#endif  // GDP_RNG_H_
