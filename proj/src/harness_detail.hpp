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

#include <optional>

#include "ssa/harness.hpp"

namespace ssa::detail {

// The per-seed stream plan shared by run_sweep, run_audit and the dataset
// generator in the C API.
GroundTruth seed_ground_truth(const ExperimentConfig& cfg,
                              const MetaDistribution& meta, int seed);
std::optional<Matrix> seed_shared_basis(const ExperimentConfig& cfg, int seed);
EnvironmentDataset seed_source(const ExperimentConfig& cfg,
                               const GroundTruth& gt,
                               const std::optional<Matrix>& shared_v, int seed,
                               int env_index, int n);

struct TargetEnvironment {
  DesignBasis basis;
  Vector param;
  EnvironmentDataset test;
  Matrix eval_cov;  // X_test^T X_test / test_rows
  double eval_min_eig = 0.0;
};

TargetEnvironment seed_target(const ExperimentConfig& cfg,
                              const GroundTruth& gt,
                              const std::optional<Matrix>& shared_v, int seed);
EnvironmentDataset seed_target_sample(const ExperimentConfig& cfg,
                                      const TargetEnvironment& tgt, int seed,
                                      int n2);

}  // namespace ssa::detail
