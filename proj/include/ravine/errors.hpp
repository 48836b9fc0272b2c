// Copyright 2026 The ravine Authors
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

#ifndef RAVINE_ERRORS_HPP_
#define RAVINE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ravine {

// Caller broke a precondition: dimension mismatch, step above 1/L,
// coefficient outside [0, 1], index out of range.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The operation exists but is not defined for this input (prox of a
// logistic objective, a constant-step identity on a varying-step trace).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Divergence, blow-up, non-finite iterates, series that will not converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericError {
 public:
  using NumericError::NumericError;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ravine

#endif  // RAVINE_ERRORS_HPP_
