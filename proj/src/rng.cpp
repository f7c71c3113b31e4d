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

#include "ssa/rng.hpp"

namespace ssa {

std::uint64_t derive_stream_id(std::uint64_t seed_index, std::uint64_t env_index,
                               StreamRole role, std::uint64_t extra) noexcept {
  std::uint64_t h = mix64(seed_index);
  h = mix64(h ^ env_index);
  h = mix64(h ^ static_cast<std::uint64_t>(role));
  return mix64(h ^ extra);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed),
      stream_id_(stream_id),
      engine_(mix64(mix64(master_seed) ^ stream_id)) {}

double RngStream::normal(double mean, double stddev) {
  return mean + stddev * normal_(engine_);
}

}  // namespace ssa
