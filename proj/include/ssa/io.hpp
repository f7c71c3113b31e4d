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
#include <vector>

#include "ssa/finetune.hpp"
#include "ssa/model.hpp"
#include "ssa/spectral.hpp"

namespace ssa {

// Datasets as CSV: header x1..xd,y; one row per sample; 17 significant
// digits. true_param is not stored in the CSV.
std::string dataset_to_csv(const EnvironmentDataset& env);
EnvironmentDataset dataset_from_csv(const std::string& text, int env_index = 0);
void write_dataset(const EnvironmentDataset& env, const std::string& path);
EnvironmentDataset read_dataset(const std::string& path, int env_index = 0);

// SourceFit as JSON. Matrices are {"rows", "cols", "data"} with data in
// row-major order. Per-environment parameters are only written on request.
std::string source_fit_to_json(const SourceFit& fit,
                               bool include_per_env_params = false);
SourceFit source_fit_from_json(const std::string& text);

std::string finetune_solution_to_json(const FinetuneSolution& sol);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// printf("%.17g")
std::string format_double(double v);

}  // namespace ssa
