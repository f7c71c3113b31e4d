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

#include "ssa/error.hpp"

#include <iostream>
#include <mutex>

namespace ssa {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kSingularDesign: return "singular design";
    case ErrorCode::kSingularSystem: return "singular system";
    case ErrorCode::kInsufficientEnvironments: return "insufficient environments";
    case ErrorCode::kNotOrthonormal: return "non-orthonormal basis";
    case ErrorCode::kNotSymmetric: return "asymmetric matrix";
    case ErrorCode::kRuleUndefined: return "rule undefined";
    case ErrorCode::kUnderdeterminedDesign: return "underdetermined design";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kParse: return "parse error";
  }
  return "unknown error";
}

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler() {
  static WarningHandler h;
  return h;
}

}  // namespace

void set_warning_handler(WarningHandler h) {
  std::lock_guard lock(handler_mutex());
  handler() = std::move(h);
}

void warn(const std::string& message) {
  std::lock_guard lock(handler_mutex());
  if (handler()) {
    handler()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace ssa
