// Copyright 2026 The maxent_marl Authors.
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

#ifndef MAXENT_MARL_ERROR_H_
#define MAXENT_MARL_ERROR_H_

#include <stdexcept>
#include <string>

namespace maxent_marl {

// Raised when a caller-supplied value violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative procedure ran out of iterations before reaching its tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Broken internal invariant (e.g. a singular system that should be regular).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace maxent_marl

#endif  // MAXENT_MARL_ERROR_H_
