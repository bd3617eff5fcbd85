// Copyright 2026 The fastkhin Authors
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

#ifndef FASTKHIN_ERRORS_HPP
#define FASTKHIN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fastkhin {

// Argument outside the domain of an operation (p/q outside (0,1), bad
// parameter chain, epsilon out of range...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested depth or index beyond what is available.
class RangeError : public std::out_of_range {
 public:
  RangeError(const std::string& what, std::size_t achieved)
      : std::out_of_range(what), achieved_(achieved) {}
  std::size_t achieved() const noexcept { return achieved_; }

 private:
  std::size_t achieved_;
};

// Exact-only operation handed a log-mode digit.
class UnsupportedModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A growth family produced a value < 1 or broke its monotonicity promise.
class FamilyDefinitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite-horizon estimates violated 1 <= b <= B <= beta.
class InternalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A theorem hypothesis (b, B in (1, inf]) does not hold for the input.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A digit window without an admissible integer.
class SynthesisError : public std::runtime_error {
 public:
  SynthesisError(const std::string& what, std::size_t index)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace fastkhin

#endif  // FASTKHIN_ERRORS_HPP
