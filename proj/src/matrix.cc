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

#include "gdp/matrix.h"

#include <algorithm>
#include <stdexcept>

namespace gdp {

Matrix::Matrix(int rows, int cols, double value)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("Matrix: negative dimension");
  }
  data_.assign(static_cast<std::size_t>(rows) * cols, value);
}

void Matrix::Reset(int rows, int cols) {
  rows_ = rows;
  cols_ = cols;
  data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

void Matrix::SetRow(int i, std::span<const double> values) {
  if (static_cast<int>(values.size()) != cols_) {
    throw std::invalid_argument("Matrix::SetRow: width mismatch");
  }
  std::copy(values.begin(), values.end(), row(i).begin());
}

Matrix Matrix::RowBlock(int begin, int count) const {
  Matrix out(count, cols_);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(begin) * cols_,
              static_cast<std::size_t>(count) * cols_, out.data_.begin());
  return out;
}

Matrix Matrix::Broadcast(int rows, std::span<const double> values) {
  Matrix out(rows, static_cast<int>(values.size()));
  for (int i = 0; i < rows; ++i) out.SetRow(i, values);
  return out;
}

}  // namespace gdp
