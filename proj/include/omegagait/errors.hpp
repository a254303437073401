// Copyright 2026 The omegagait Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace omegagait {

/// Invalid argument or violated precondition.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The circular mean of module headings is undefined (unit vectors cancel).
class DegenerateAxisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The quasi-static body-velocity solve did not reach tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, long step = -1)
      : std::runtime_error(what), residual_(residual), step_(step) {}

  double residual() const { return residual_; }
  /// Integration step index at which the failure happened, -1 if unknown.
  long step() const { return step_; }

 private:
  double residual_;
  long step_;
};

/// Malformed or out-of-schema experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace omegagait
