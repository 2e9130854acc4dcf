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

#ifndef GDP_ERRORS_H_
#define GDP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace gdp {

// A NaN or infinity appeared where the math guarantees finite values.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A statistic was requested over an empty selection.
class UndefinedValueError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical estimation failed (e.g. a degenerate decomposition).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int epoch, int batch)
      : std::runtime_error(what), epoch_(epoch), batch_(batch) {}
  int epoch() const { return epoch_; }
  int batch() const { return batch_; }

 private:
  int epoch_;
  int batch_;
};

}  // namespace gdp

#endif  // GDP_ERRORS_H_
