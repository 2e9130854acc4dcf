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

#ifndef GDP_BINARY_RECORD_H_
#define GDP_BINARY_RECORD_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace gdp {

// Flat little-endian record shared by model checkpoints and datasets:
//
//   bytes 0..11   ASCII tag, NUL padded
//   bytes 12..15  uint32 format version
//   uint64        number of dimension fields, then that many uint64 dims
//   uint64        number of values, then that many IEEE-754 float64 values
struct BinaryRecord {
  static constexpr std::size_t kTagBytes = 12;
  static constexpr std::size_t kMagicBytes = 16;

  std::array<char, kTagBytes> tag{};
  std::uint32_t version = 1;
  std::vector<std::uint64_t> dims;
  std::vector<double> values;

  static std::array<char, kTagBytes> MakeTag(std::string_view name);
};

void WriteBinaryRecord(const std::filesystem::path& path,
                       const BinaryRecord& record);
// Throws std::runtime_error on a truncated file or a tag/version mismatch.
BinaryRecord ReadBinaryRecord(const std::filesystem::path& path,
                              std::string_view expected_tag,
                              std::uint32_t expected_version);

}  // namespace gdp

#endif  // GDP_BINARY_RECORD_H_
