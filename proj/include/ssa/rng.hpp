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

#include <cstdint>
#include <random>

namespace ssa {

// splitmix64 finalizer; used to turn structured ids into seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream roles used by the experiment harness when deriving stream ids.
enum class StreamRole : std::uint64_t {
  kGroundTruth = 1,
  kSourceEnvironment = 2,
  kTargetParameter = 3,
  kTargetBasis = 4,
  kTargetSample = 5,
  kTestSample = 6,
  kSharedBasis = 7,
};

// Combines (seed index, environment index, role, extra) into one stream id.
// Pure function of its arguments, so every task can derive its own stream
// without coordination.
std::uint64_t derive_stream_id(std::uint64_t seed_index, std::uint64_t env_index,
                               StreamRole role, std::uint64_t extra = 0) noexcept;

// A deterministic random stream identified by (master_seed, stream_id).
// Two streams with equal ids produce identical draw sequences regardless of
// which thread owns them.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  double normal(double mean = 0.0, double stddev = 1.0);
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ssa
