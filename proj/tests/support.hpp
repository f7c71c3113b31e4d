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

#include <random>
#include <string>
#include <vector>

#include "ssa/error.hpp"
#include "ssa/linalg.hpp"
#include "ssa/rng.hpp"

namespace testing {

// Collects warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture() {
    ssa::set_warning_handler([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { ssa::set_warning_handler(nullptr); }
  bool contains(const std::string& needle) const {
    for (const auto& m : messages) {
      if (m.find(needle) != std::string::npos) return true;
    }
    return false;
  }
  std::vector<std::string> messages;
};

inline ssa::Matrix gaussian(std::mt19937_64& g, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n;
  ssa::Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = n(g);
  }
  return m;
}

inline ssa::Vector gaussian(std::mt19937_64& g, Eigen::Index n) {
  return gaussian(g, n, 1).col(0);
}

// Orthonormal columns by modified Gram-Schmidt (not the library's QR).
inline ssa::Matrix orthonormal(std::mt19937_64& g, Eigen::Index r, Eigen::Index c) {
  ssa::Matrix m = gaussian(g, r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) m.col(j) -= m.col(i).dot(m.col(j)) * m.col(i);
    m.col(j).normalize();
  }
  return m;
}

inline ssa::Matrix random_spd(std::mt19937_64& g, Eigen::Index d) {
  const ssa::Matrix a = gaussian(g, d, d);
  return a * a.transpose() / static_cast<double>(d) + 0.1 * ssa::Matrix::Identity(d, d);
}

}  // namespace testing
