// Copyright 2026 The SSA Authors. All Rights Reserved.
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

#include <functional>
#include <stdexcept>
#include <string>

namespace ssa {

enum class ErrorCode {
  kInvalidArgument = 1,
  kConfig,
  kDimensionMismatch,
  kSingularDesign,
  kSingularSystem,
  kInsufficientEnvironments,
  kNotOrthonormal,
  kNotSymmetric,
  kRuleUndefined,
  kUnderdeterminedDesign,
  kIo,
  kParse,
};

const char* error_code_name(ErrorCode code);

// All recoverable failures in the library are reported as ssa::Error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Configuration problems carry the offending key so the CLI can name it.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(ErrorCode::kConfig, key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Raised by fit_ols; keeps the condition number that tripped the cutoff.
class SingularDesignError : public Error {
 public:
  SingularDesignError(double condition, const std::string& what)
      : Error(ErrorCode::kSingularDesign, what), condition_(condition) {}

  double condition_number() const noexcept { return condition_; }

 private:
  double condition_;
};

// Non-fatal diagnostics (eigengap violations etc.) go through a process-wide
// sink. The default sink writes "warning: <msg>" to stderr. Thread-safe.
using WarningHandler = std::function<void(const std::string&)>;

void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace ssa
