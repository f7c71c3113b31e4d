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

#include "ssa/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssa/error.hpp"

namespace ssa {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

std::string dataset_to_csv(const EnvironmentDataset& env) {
  env.validate();
  std::string s;
  const auto d = env.X.cols();
  for (Eigen::Index j = 0; j < d; ++j) s += "x" + std::to_string(j + 1) + ",";
  s += "y\n";
  for (Eigen::Index i = 0; i < env.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) s += format_double(env.X(i, j)) + ",";
    s += format_double(env.y(i)) + "\n";
  }
  return s;
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                       ": malformed number '" +
                                       std::string(field) + "'");
  }
  return v;
}

}  // namespace

EnvironmentDataset dataset_from_csv(const std::string& text, int env_index) {
  std::vector<std::string_view> lines;
  std::string_view all(text);
  std::size_t start = 0;
  while (start < all.size()) {
    auto nl = all.find('\n', start);
    if (nl == std::string_view::npos) nl = all.size();
    auto line = all.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  if (lines.empty()) throw Error(ErrorCode::kParse, "empty dataset CSV");

  const auto header = split_line(lines[0]);
  if (header.size() < 2 || header.back() != "y") {
    throw Error(ErrorCode::kParse, "dataset header must be x1,...,xd,y");
  }
  const auto d = static_cast<Eigen::Index>(header.size() - 1);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (header[j] != "x" + std::to_string(j + 1)) {
      throw Error(ErrorCode::kParse, "dataset header column " +
                                         std::to_string(j + 1) + " must be x" +
                                         std::to_string(j + 1));
    }
  }
  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  EnvironmentDataset env;
  env.env_index = env_index;
  env.X.resize(n, d);
  env.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto fields = split_line(lines[i + 1]);
    const auto line_no = static_cast<std::size_t>(i + 2);
    if (static_cast<Eigen::Index>(fields.size()) != d + 1) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                         ": expected " + std::to_string(d + 1) +
                                         " fields, got " +
                                         std::to_string(fields.size()));
    }
    for (Eigen::Index j = 0; j < d; ++j) env.X(i, j) = parse_number(fields[j], line_no);
    env.y(i) = parse_number(fields[d], line_no);
  }
  return env;
}

void write_dataset(const EnvironmentDataset& env, const std::string& path) {
  write_text_file(path, dataset_to_csv(env));
}

EnvironmentDataset read_dataset(const std::string& path, int env_index) {
  try {
    return dataset_from_csv(read_text_file(path), env_index);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

namespace {

json matrix_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

json vector_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Matrix matrix_from_json(const json& j, const char* name) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (!data.is_array() ||
        static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw Error(ErrorCode::kParse,
                  std::string(name) + ": data length differs from rows*cols");
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        m(i, c) = data[static_cast<std::size_t>(i * cols + c)].get<double>();
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string(name) + ": " + e.what());
  }
}

Vector vector_from_json(const json& j, const char* name) {
  try {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string(name) + ": " + e.what());
  }
}

}  // namespace

std::string source_fit_to_json(const SourceFit& fit,
                               bool include_per_env_params) {
  json j;
  j["d"] = fit.d();
  j["k"] = fit.k();
  j["num_environments"] = fit.num_environments();
  j["mean_param"] = vector_json(fit.mean_param);
  j["sample_cov"] = matrix_json(fit.sample_cov);
  j["r1_hat"] = matrix_json(fit.r1_hat);
  j["r2_hat"] = matrix_json(fit.r2_hat);
  j["eigenvalues"] = vector_json(fit.eigenvalues);
  j["noise_variance_estimate"] = fit.noise_variance_estimate;
  j["warnings"] = fit.warnings;
  if (include_per_env_params) {
    json params = json::array();
    for (std::size_t e = 0; e < fit.per_env_params.size(); ++e) {
      params.push_back({{"env_index", fit.env_indices[e]},
                        {"param", vector_json(fit.per_env_params[e])}});
    }
    j["per_env_params"] = std::move(params);
  } else {
    j["env_indices"] = fit.env_indices;
  }
  return j.dump(2) + "\n";
}

SourceFit source_fit_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("source fit JSON: ") + e.what());
  }
  SourceFit fit;
  try {
    fit.mean_param = vector_from_json(j.at("mean_param"), "mean_param");
    fit.sample_cov = matrix_from_json(j.at("sample_cov"), "sample_cov");
    fit.r1_hat = matrix_from_json(j.at("r1_hat"), "r1_hat");
    fit.r2_hat = matrix_from_json(j.at("r2_hat"), "r2_hat");
    fit.eigenvalues = vector_from_json(j.at("eigenvalues"), "eigenvalues");
    fit.noise_variance_estimate = j.value("noise_variance_estimate", 0.0);
    if (j.contains("warnings")) {
      fit.warnings = j["warnings"].get<std::vector<std::string>>();
    }
    if (j.contains("per_env_params")) {
      for (const auto& p : j["per_env_params"]) {
        fit.env_indices.push_back(p.at("env_index").get<int>());
        fit.per_env_params.push_back(vector_from_json(p.at("param"), "param"));
      }
    } else if (j.contains("env_indices")) {
      fit.env_indices = j["env_indices"].get<std::vector<int>>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("source fit JSON: ") + e.what());
  }
  const auto d = fit.mean_param.size();
  if (fit.sample_cov.rows() != d || fit.sample_cov.cols() != d ||
      fit.r1_hat.rows() != d || fit.r2_hat.rows() != d ||
      fit.r1_hat.cols() + fit.r2_hat.cols() != d || fit.eigenvalues.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                "source fit JSON: inconsistent dimensions");
  }
  return fit;
}

std::string finetune_solution_to_json(const FinetuneSolution& sol) {
  json j;
  j["theta_hat"] = vector_json(sol.theta_hat);
  j["lambda1"] = sol.lambda1_used;
  j["lambda2"] = sol.lambda2_used;
  j["objective_value"] = sol.objective_value;
  j["gradient_norm"] = sol.gradient_norm;
  return j.dump(2) + "\n";
}

}  // namespace ssa
