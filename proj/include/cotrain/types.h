// Copyright 2026 The Cotrain Lab Authors
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

#ifndef COTRAIN_TYPES_H_
#define COTRAIN_TYPES_H_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cotrain {

using Vector = Eigen::VectorXd;
// Batches of points are stored column-wise (dim x count) unless a function
// says otherwise.
using Matrix = Eigen::MatrixXd;

// Shape mismatch between arguments.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid combination of configuration values (empty required split, bad
// mixing ratio, unknown keys, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite input or a computation that produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; message names the line or field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void CheckSameSize(Eigen::Index a, Eigen::Index b,
                          const std::string& what) {
  if (a != b) {
    throw ShapeError(what + ": size " + std::to_string(a) + " vs " +
                     std::to_string(b));
  }
}

}  // namespace cotrain

#endif  // COTRAIN_TYPES_H_
