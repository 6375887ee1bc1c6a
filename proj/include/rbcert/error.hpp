// Copyright 2026 The rbcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RBCERT_ERROR_HPP_
#define RBCERT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace rbcert {

/// Malformed textual input (decimal strings, JSON documents, CLI values).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operand shapes or dimensions that do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input for which an operation has no meaningful result, e.g. projecting a
/// negative-definite operator onto the state space.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rbcert

#endif  // RBCERT_ERROR_HPP_
