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

#include "gdp/binary_record.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace gdp {
namespace {

void PutU64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  }
  out.write(bytes, 8);
}

void PutU32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  }
  out.write(bytes, 4);
}

std::uint64_t GetU64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw std::runtime_error("binary record: truncated");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

std::uint32_t GetU32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw std::runtime_error("binary record: truncated");
  }
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

std::array<char, BinaryRecord::kTagBytes> BinaryRecord::MakeTag(
    std::string_view name) {
  if (name.size() > kTagBytes) {
    throw std::invalid_argument("binary record tag longer than 12 bytes");
  }
  std::array<char, kTagBytes> tag{};
  std::copy(name.begin(), name.end(), tag.begin());
  return tag;
}

void WriteBinaryRecord(const std::filesystem::path& path,
                       const BinaryRecord& record) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(record.tag.data(), BinaryRecord::kTagBytes);
  PutU32(out, record.version);
  PutU64(out, record.dims.size());
  for (std::uint64_t d : record.dims) PutU64(out, d);
  PutU64(out, record.values.size());
  for (double v : record.values) PutU64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

BinaryRecord ReadBinaryRecord(const std::filesystem::path& path,
                              std::string_view expected_tag,
                              std::uint32_t expected_version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  BinaryRecord record;
  if (!in.read(record.tag.data(), BinaryRecord::kTagBytes)) {
    throw std::runtime_error("binary record: truncated header");
  }
  if (record.tag != BinaryRecord::MakeTag(expected_tag)) {
    throw std::runtime_error("binary record: unexpected tag in " +
                             path.string());
  }
  record.version = GetU32(in);
  if (record.version != expected_version) {
    throw std::runtime_error("binary record: unsupported version " +
                             std::to_string(record.version));
  }
  const std::uint64_t n_dims = GetU64(in);
  if (n_dims > (1u << 20)) throw std::runtime_error("binary record: corrupt");
  record.dims.resize(n_dims);
  for (auto& d : record.dims) d = GetU64(in);
  const std::uint64_t n_values = GetU64(in);
  if (n_values > (std::uint64_t{1} << 34)) {
    throw std::runtime_error("binary record: corrupt");
  }
  record.values.resize(n_values);
  for (auto& v : record.values) v = std::bit_cast<double>(GetU64(in));
  return record;
}

}  // namespace gdp
