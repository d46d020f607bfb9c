// Copyright 2026 The trajldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJLDP_ERRORS_HPP_
#define TRAJLDP_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trajldp {

// Invalid argument or precondition violation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A coordinate falls outside the grid's bounding box.
class OutOfDomainError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Reports that cannot be combined (mixed budgets, mismatched lengths).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal structure violates its invariant.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace trajldp

#endif  // TRAJLDP_ERRORS_HPP_
