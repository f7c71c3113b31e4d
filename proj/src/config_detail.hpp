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

#include <string>
#include <string_view>

#include <json.hpp>

#include "ssa/harness.hpp"

namespace ssa::detail {

// Raw config document access for the C API, which applies overrides one at
// a time and validates only when a run starts.
nlohmann::json config_document(std::string_view json_text);
void apply_override(nlohmann::json& doc, std::string key,
                    const std::string& value);
ExperimentConfig config_from_document(const nlohmann::json& doc);

}  // namespace ssa::detail
