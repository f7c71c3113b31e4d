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

#include <cmath>
#include <set>

#include <json.hpp>

#include "ssa/error.hpp"
#include "ssa/harness.hpp"
#include "ssa/io.hpp"
#include "config_detail.hpp"

namespace ssa {

using nlohmann::json;

const char* method_name(Method m) {
  switch (m) {
    case Method::kJoint: return "joint";
    case Method::kReg1Only: return "reg1_only";
    case Method::kReg2Only: return "reg2_only";
    case Method::kOls: return "ols";
    case Method::kRidge: return "ridge";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::kJoint, Method::kReg1Only, Method::kReg2Only,
                   Method::kOls, Method::kRidge}) {
    if (name == method_name(m)) return m;
  }
  throw ConfigError("methods", "unknown method '" + name +
                                   "' (expected joint|reg1_only|reg2_only|ols|ridge)");
}

MetaDistribution ExperimentConfig::meta() const {
  const auto vec = [](const std::optional<std::vector<double>>& v, int len,
                      double fill) {
    if (!v) return Vector(Vector::Constant(len, fill));
    return Vector(Eigen::Map<const Vector>(v->data(),
                                           static_cast<Eigen::Index>(v->size())));
  };
  return MetaDistribution(vec(theta_star, k, theta_star_value),
                          vec(lambda11, k, lambda11_value),
                          vec(lambda22, d - k, lambda22_value), sigma);
}

void ExperimentConfig::validate() const {
  if (d < 2) throw ConfigError("d", "must be >= 2");
  if (k < 1 || k >= d) throw ConfigError("k", "must satisfy 1 <= k < d");
  if (E < 2) throw ConfigError("E", "must be >= 2");
  if (n1 < d) throw ConfigError("n1", "must be >= d (underdetermined designs are unsupported)");
  if (n2_grid.empty()) throw ConfigError("n2_grid", "must not be empty");
  for (int n2 : n2_grid) {
    if (n2 < 1) throw ConfigError("n2_grid", "every entry must be >= 1, got " + std::to_string(n2));
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma", "must be finite and >= 0");
  if (!(lambda11_value >= 0.0)) throw ConfigError("lambda11_value", "must be >= 0");
  if (!(lambda22_value >= 0.0)) throw ConfigError("lambda22_value", "must be >= 0");
  if (theta_star && static_cast<int>(theta_star->size()) != k) {
    throw ConfigError("theta_star", "must have length k");
  }
  if (lambda11 && static_cast<int>(lambda11->size()) != k) {
    throw ConfigError("lambda11", "must have length k");
  }
  if (lambda22 && static_cast<int>(lambda22->size()) != d - k) {
    throw ConfigError("lambda22", "must have length d - k");
  }
  if (methods.empty()) throw ConfigError("methods", "must not be empty");
  if (std::set<Method>(methods.begin(), methods.end()).size() != methods.size()) {
    throw ConfigError("methods", "must not repeat a method");
  }
  if (lambda_mode == LambdaMode::kGrid) {
    if (lambda_grid.empty()) throw ConfigError("lambda_grid", "must not be empty in grid mode");
    for (const auto& p : lambda_grid) {
      if (!(p.lambda1 >= 0.0) || !(p.lambda2 >= 0.0)) {
        throw ConfigError("lambda_grid", "entries must be >= 0");
      }
    }
  }
  if (seeds < 1) throw ConfigError("seeds", "must be >= 1");
  if (test_rows < d) throw ConfigError("test_rows", "must be >= d");
  for (int e : audit_E_grid) {
    if (e < 2) throw ConfigError("audit_E_grid", "every entry must be >= 2");
  }
  try {
    (void)meta();
  } catch (const Error& e) {
    throw ConfigError(lambda11 || lambda22 || theta_star ? "lambda11" : "lambda11_value",
                      e.what());
  }
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "d", "k", "E", "n1", "n2_grid", "sigma", "theta_star_value",
      "lambda11_value", "lambda22_value", "theta_star", "lambda11", "lambda22",
      "methods", "lambda_mode", "lambda_grid", "lambda_grid_relative", "seeds",
      "master_seed", "fixed_ground_truth", "output_path", "design_scaling",
      "shared_design_basis", "test_rows", "sigma_source", "record_timing",
      "audit_E_grid"};
  return keys;
}

const std::set<std::string>& array_keys() {
  static const std::set<std::string> keys{"n2_grid", "theta_star", "lambda11",
                                          "lambda22", "methods", "lambda_grid",
                                          "audit_E_grid"};
  return keys;
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, int>) {
      if (!j.is_number_integer()) throw ConfigError(key, "expected an integer");
      const auto v = j.get<long long>();
      if (v < INT32_MIN || v > INT32_MAX) throw ConfigError(key, "integer out of range");
      return static_cast<int>(v);
    } else if constexpr (std::is_same_v<T, double>) {
      if (!j.is_number()) throw ConfigError(key, "expected a number");
      return j.get<double>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) throw ConfigError(key, "expected true or false");
      return j.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!j.is_string()) throw ConfigError(key, "expected a string");
      return j.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
        throw ConfigError(key, "expected a nonnegative integer");
      }
      return j.get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

template <typename T>
std::vector<T> get_list(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError(key, "expected an array");
  std::vector<T> out;
  for (const auto& item : j) out.push_back(get_as<T>(item, key));
  return out;
}

ExperimentConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_keys().count(key)) throw ConfigError(key, "unknown config key");
  }
  ExperimentConfig c;
  const auto has = [&](const char* key) { return j.contains(key); };
  if (has("d")) c.d = get_as<int>(j["d"], "d");
  if (has("k")) c.k = get_as<int>(j["k"], "k");
  if (has("E")) c.E = get_as<int>(j["E"], "E");
  if (has("n1")) c.n1 = get_as<int>(j["n1"], "n1");
  if (has("n2_grid")) c.n2_grid = get_list<int>(j["n2_grid"], "n2_grid");
  if (has("sigma")) c.sigma = get_as<double>(j["sigma"], "sigma");
  if (has("theta_star_value")) c.theta_star_value = get_as<double>(j["theta_star_value"], "theta_star_value");
  if (has("lambda11_value")) c.lambda11_value = get_as<double>(j["lambda11_value"], "lambda11_value");
  if (has("lambda22_value")) c.lambda22_value = get_as<double>(j["lambda22_value"], "lambda22_value");
  if (has("theta_star") && !j["theta_star"].is_null()) c.theta_star = get_list<double>(j["theta_star"], "theta_star");
  if (has("lambda11") && !j["lambda11"].is_null()) c.lambda11 = get_list<double>(j["lambda11"], "lambda11");
  if (has("lambda22") && !j["lambda22"].is_null()) c.lambda22 = get_list<double>(j["lambda22"], "lambda22");
  if (has("methods")) {
    c.methods.clear();
    for (const auto& name : get_list<std::string>(j["methods"], "methods")) {
      c.methods.push_back(parse_method(name));
    }
  }
  if (has("lambda_mode")) {
    const auto mode = get_as<std::string>(j["lambda_mode"], "lambda_mode");
    if (mode == "paper_rule") {
      c.lambda_mode = LambdaMode::kPaperRule;
    } else if (mode == "grid") {
      c.lambda_mode = LambdaMode::kGrid;
    } else {
      throw ConfigError("lambda_mode", "expected paper_rule or grid, got '" + mode + "'");
    }
  }
  if (has("lambda_grid")) {
    const auto& g = j["lambda_grid"];
    if (!g.is_array()) throw ConfigError("lambda_grid", "expected an array");
    for (const auto& p : g) {
      if (p.is_array() && p.size() == 2) {
        c.lambda_grid.push_back({get_as<double>(p[0], "lambda_grid"),
                                 get_as<double>(p[1], "lambda_grid")});
      } else if (p.is_object() && p.contains("lambda1") && p.contains("lambda2")) {
        c.lambda_grid.push_back({get_as<double>(p["lambda1"], "lambda_grid"),
                                 get_as<double>(p["lambda2"], "lambda_grid")});
      } else {
        throw ConfigError("lambda_grid",
                          "entries must be [lambda1, lambda2] or {\"lambda1\", \"lambda2\"}");
      }
    }
  }
  if (has("lambda_grid_relative")) c.lambda_grid_relative = get_as<bool>(j["lambda_grid_relative"], "lambda_grid_relative");
  if (has("seeds")) c.seeds = get_as<int>(j["seeds"], "seeds");
  if (has("master_seed")) c.master_seed = get_as<std::uint64_t>(j["master_seed"], "master_seed");
  if (has("fixed_ground_truth")) c.fixed_ground_truth = get_as<bool>(j["fixed_ground_truth"], "fixed_ground_truth");
  if (has("output_path")) c.output_path = get_as<std::string>(j["output_path"], "output_path");
  if (has("design_scaling")) {
    try {
      c.design_scaling = parse_design_scaling(get_as<std::string>(j["design_scaling"], "design_scaling"));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("design_scaling", e.what());
    }
  }
  if (has("shared_design_basis")) c.shared_design_basis = get_as<bool>(j["shared_design_basis"], "shared_design_basis");
  if (has("test_rows")) c.test_rows = get_as<int>(j["test_rows"], "test_rows");
  if (has("sigma_source")) {
    const auto s = get_as<std::string>(j["sigma_source"], "sigma_source");
    if (s == "true") {
      c.sigma_source = SigmaSource::kTrue;
    } else if (s == "plugin") {
      c.sigma_source = SigmaSource::kPlugin;
    } else {
      throw ConfigError("sigma_source", "expected true or plugin, got '" + s + "'");
    }
  }
  if (has("record_timing")) c.record_timing = get_as<bool>(j["record_timing"], "record_timing");
  if (has("audit_E_grid")) c.audit_E_grid = get_list<int>(j["audit_E_grid"], "audit_E_grid");
  return c;
}

json parse_override_value(const std::string& key, const std::string& raw) {
  json v = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (v.is_discarded()) v = raw;
  if (array_keys().count(key) && !v.is_array()) {
    if (v.is_string() && raw.find(',') != std::string::npos) {
      json arr = json::array();
      std::size_t start = 0;
      while (true) {
        const auto comma = raw.find(',', start);
        const std::string part = raw.substr(start, comma - start);
        json item = json::parse(part, nullptr, false);
        arr.push_back(item.is_discarded() ? json(part) : item);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      v = std::move(arr);
    } else {
      v = json::array({v});
    }
  }
  return v;
}

}  // namespace

namespace detail {

json config_document(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("<root>", "config is not valid JSON");
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  return j;
}

void apply_override(json& doc, std::string key, const std::string& value) {
  if (key == "seed") key = "master_seed";
  if (!known_keys().count(key)) throw ConfigError(key, "unknown config key");
  doc[key] = parse_override_value(key, value);
}

ExperimentConfig config_from_document(const json& doc) { return from_json(doc); }

}  // namespace detail

ExperimentConfig parse_config(
    std::string_view json_text,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  json doc = detail::config_document(json_text);
  for (const auto& [key, value] : overrides) detail::apply_override(doc, key, value);
  ExperimentConfig cfg = from_json(doc);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  return parse_config(read_text_file(path), overrides);
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["d"] = c.d;
  j["k"] = c.k;
  j["E"] = c.E;
  j["n1"] = c.n1;
  j["n2_grid"] = c.n2_grid;
  j["sigma"] = c.sigma;
  j["theta_star_value"] = c.theta_star_value;
  j["lambda11_value"] = c.lambda11_value;
  j["lambda22_value"] = c.lambda22_value;
  if (c.theta_star) j["theta_star"] = *c.theta_star;
  if (c.lambda11) j["lambda11"] = *c.lambda11;
  if (c.lambda22) j["lambda22"] = *c.lambda22;
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["lambda_mode"] = c.lambda_mode == LambdaMode::kGrid ? "grid" : "paper_rule";
  json grid = json::array();
  for (const auto& p : c.lambda_grid) grid.push_back({p.lambda1, p.lambda2});
  j["lambda_grid"] = grid;
  j["lambda_grid_relative"] = c.lambda_grid_relative;
  j["seeds"] = c.seeds;
  j["master_seed"] = c.master_seed;
  j["fixed_ground_truth"] = c.fixed_ground_truth;
  j["output_path"] = c.output_path;
  j["design_scaling"] = design_scaling_name(c.design_scaling);
  j["shared_design_basis"] = c.shared_design_basis;
  j["test_rows"] = c.test_rows;
  j["sigma_source"] = c.sigma_source == SigmaSource::kTrue ? "true" : "plugin";
  j["record_timing"] = c.record_timing;
  j["audit_E_grid"] = c.audit_E_grid;
  return j.dump(2) + "\n";
}

}  // namespace ssa
