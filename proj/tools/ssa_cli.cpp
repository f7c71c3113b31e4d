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

// ssa: command-line front end over the C API.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssa/ssa.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Failure {
  int code;
};

void report(ssa_status s, const std::string& what) {
  std::fprintf(stderr, "error: %s: %s\n", what.c_str(), ssa_last_error());
  (void)s;
}

void check(ssa_status s, const std::string& what) {
  if (s == SSA_OK) return;
  report(s, what);
  throw Failure{s == SSA_ERR_CONFIG ? kExitConfig : kExitRuntime};
}

// Config-stage failures are exit 1 whatever the underlying status.
void check_config(ssa_status s, const std::string& what) {
  if (s == SSA_OK) return;
  report(s, what);
  throw Failure{kExitConfig};
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Config = Handle<ssa_config, ssa_config_free>;
using Dataset = Handle<ssa_dataset, ssa_dataset_free>;
using SourceFit = Handle<ssa_source_fit, ssa_source_fit_free>;
using Solution = Handle<ssa_solution, ssa_solution_free>;
using Results = Handle<ssa_results, ssa_results_free>;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { ssa_string_free(p); }
};

void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f || std::fwrite(text.data(), 1, text.size(), f) != text.size()) {
    if (f) std::fclose(f);
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    throw Failure{kExitRuntime};
  }
  std::fclose(f);
}

std::string read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    std::fprintf(stderr, "error: cannot read %s\n", path.c_str());
    throw Failure{kExitRuntime};
  }
  std::string out;
  char buf[65536];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
  std::fclose(f);
  return out;
}

// Loads --config (or defaults) and applies every --key=value left over by
// the subcommand parser.
void load_config(Config& cfg, const std::string& path,
                 const std::vector<std::string>& extras) {
  if (path.empty()) {
    check_config(ssa_config_default(&cfg.p), "default config");
  } else {
    check_config(ssa_config_load(path.c_str(), &cfg.p), path);
  }
  for (const auto& arg : extras) {
    const auto eq = arg.find('=');
    if (arg.rfind("--", 0) != 0 || eq == std::string::npos || eq == 2) {
      std::fprintf(stderr, "error: unrecognized argument '%s' (overrides take the form --key=value)\n",
                   arg.c_str());
      throw Failure{kExitConfig};
    }
    const std::string key = arg.substr(2, eq - 2);
    const std::string value = arg.substr(eq + 1);
    if (ssa_config_set(cfg.p, key.c_str(), value.c_str()) != SSA_OK) {
      std::fprintf(stderr, "error: --%s: %s\n", key.c_str(), ssa_last_error());
      throw Failure{kExitConfig};
    }
  }
  check_config(ssa_config_validate(cfg.p), "config");
}

int cmd_gen(const std::string& config, const std::vector<std::string>& extras,
            int seed_index, int n2, const std::string& out_dir) {
  Config cfg;
  load_config(cfg, config, extras);
  check(ssa_generate_to_directory(cfg.p, seed_index, n2, out_dir.c_str()), "gen");
  std::fprintf(stderr, "wrote datasets to %s\n", out_dir.c_str());
  return kExitOk;
}

int cmd_fit_source(std::vector<std::string> inputs, const std::string& dir,
                   int k, int workers, bool per_env, const std::string& out) {
  if (!dir.empty()) {
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("source_", 0) == 0 && entry.path().extension() == ".csv") {
        inputs.push_back(entry.path().string());
      }
    }
    if (ec) {
      std::fprintf(stderr, "error: cannot list %s: %s\n", dir.c_str(), ec.message().c_str());
      throw Failure{kExitRuntime};
    }
    std::sort(inputs.begin(), inputs.end());
  }
  if (inputs.empty()) {
    std::fprintf(stderr, "error: no source datasets given\n");
    throw Failure{kExitConfig};
  }
  std::vector<ssa_dataset*> envs(inputs.size(), nullptr);
  struct Cleanup {
    std::vector<ssa_dataset*>& v;
    ~Cleanup() {
      for (auto* p : v) ssa_dataset_free(p);
    }
  } cleanup{envs};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    check(ssa_dataset_read_csv(inputs[i].c_str(), static_cast<int>(i), &envs[i]),
          inputs[i]);
  }
  SourceFit fit;
  check(ssa_fit_sources(envs.data(), envs.size(), k, workers, &fit.p), "fit-source");
  OwnedString json;
  check(ssa_source_fit_to_json(fit.p, per_env ? 1 : 0, &json.p), "fit-source");
  write_file(out, json.p);
  return kExitOk;
}

int cmd_finetune(const std::string& fit_path, const std::string& target_path,
                 ssa_finetune_options opts, const std::string& out) {
  SourceFit fit;
  check(ssa_source_fit_from_json(read_file(fit_path).c_str(), &fit.p), fit_path);
  Dataset target;
  check(ssa_dataset_read_csv(target_path.c_str(), 0, &target.p), target_path);
  Solution sol;
  check(ssa_finetune(fit.p, target.p, &opts, &sol.p), "finetune");
  OwnedString json;
  check(ssa_solution_to_json(sol.p, &json.p), "finetune");
  write_file(out, json.p);
  return kExitOk;
}

int cmd_sweep(const std::string& config, const std::vector<std::string>& extras,
              int workers, const std::string& plot, const std::string& x,
              const std::string& y, const std::string& group, bool log_scale) {
  Config cfg;
  load_config(cfg, config, extras);
  Results res;
  check(ssa_run_sweep(cfg.p, workers, &res.p), "sweep");
  const std::string out = ssa_config_output_path(cfg.p);
  check(ssa_results_write_csv(res.p, out.c_str()), "sweep");
  std::fprintf(stderr, "wrote %zu rows to %s\n", ssa_results_count(res.p), out.c_str());
  if (!plot.empty()) {
    check(ssa_results_write_svg(res.p, x.c_str(), y.c_str(), group.c_str(),
                                log_scale ? 1 : 0, plot.c_str()),
          "plot");
    std::fprintf(stderr, "wrote plot to %s\n", plot.c_str());
  }
  return kExitOk;
}

int cmd_audit(const std::string& config, const std::vector<std::string>& extras,
              int workers, const std::string& out) {
  Config cfg;
  load_config(cfg, config, extras);
  OwnedString json;
  check(ssa_run_audit(cfg.p, workers, &json.p), "audit");
  write_file(out, json.p);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared-subspace domain adaptation: data generation, source "
               "fitting, target fine-tuning and experiment sweeps."};
  app.require_subcommand(1);
  app.set_version_flag("--version", ssa_version());

  std::string config;
  int workers = 0;

  auto* gen = app.add_subcommand("gen", "write one seed's synthetic datasets as CSV");
  int seed_index = 0, n2 = 20;
  std::string out_dir = "data";
  gen->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
  gen->add_option("--seed-index", seed_index, "seed index within the sweep")->check(CLI::NonNegativeNumber);
  gen->add_option("--n2", n2, "target sample size")->check(CLI::PositiveNumber);
  gen->add_option("-o,--out", out_dir, "output directory");
  gen->allow_extras();

  auto* fit = app.add_subcommand("fit-source", "per-environment OLS and subspace estimate");
  std::vector<std::string> inputs;
  std::string dir, fit_out = "-";
  int k = 0;
  bool per_env = false;
  fit->add_option("inputs", inputs, "source dataset CSV files");
  fit->add_option("--dir", dir, "read every source_*.csv in this directory");
  fit->add_option("-k,--k", k, "content dimension")->required()->check(CLI::PositiveNumber);
  fit->add_option("--workers", workers, "worker threads (0 = default)");
  fit->add_flag("--per-env", per_env, "include per-environment estimates");
  fit->add_option("-o,--out", fit_out, "output JSON ('-' for stdout)");

  auto* ft = app.add_subcommand("finetune", "fit the target with both regularizers");
  std::string fit_path, target_path, ft_out = "-";
  ssa_finetune_options opts{0.0, 0.0, 0, 0.0, 0.0};
  bool paper_rule = false;
  ft->add_option("--source-fit", fit_path, "source fit JSON")->required()->check(CLI::ExistingFile);
  ft->add_option("--target", target_path, "target dataset CSV")->required()->check(CLI::ExistingFile);
  ft->add_option("--lambda1", opts.lambda1, "content-direction weight")->check(CLI::NonNegativeNumber);
  ft->add_option("--lambda2", opts.lambda2, "environment-direction weight")->check(CLI::NonNegativeNumber);
  ft->add_flag("--paper-rule", paper_rule, "lambda1 = lambda2 = min_eig * sigma / (sqrt(n2) - sigma)");
  ft->add_option("--sigma", opts.sigma, "noise level for the rule")->check(CLI::NonNegativeNumber);
  ft->add_option("--min-eig", opts.sigma_x_min_eig,
                 "smallest input-covariance eigenvalue for the rule (default: from the target)");
  ft->add_option("-o,--out", ft_out, "output JSON ('-' for stdout)");

  auto* sweep = app.add_subcommand("sweep", "run a seeded experiment sweep to CSV");
  std::string plot, x = "n2", y = "target_mse", group = "method";
  bool log_scale = false;
  sweep->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
  sweep->add_option("--workers", workers, "worker threads (0 = default)");
  sweep->add_option("--plot", plot, "also write an SVG chart here");
  sweep->add_option("--x", x, "x field for --plot");
  sweep->add_option("--y", y, "y field for --plot");
  sweep->add_option("--group", group, "series field for --plot");
  sweep->add_flag("--log", log_scale, "log-log axes for --plot");
  sweep->allow_extras();

  auto* audit = app.add_subcommand("audit", "Davis-Kahan and rate-scaling report");
  std::string audit_out = "-";
  audit->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
  audit->add_option("--workers", workers, "worker threads (0 = default)");
  audit->add_option("-o,--out", audit_out, "output JSON ('-' for stdout)");
  audit->allow_extras();

  app.footer("Subcommands gen, sweep and audit accept --key=value for any config "
             "key; --seed aliases master_seed.\nExit status: 0 ok, 1 config error, "
             "2 runtime error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_gen(config, gen->remaining(), seed_index, n2, out_dir);
    if (*fit) return cmd_fit_source(inputs, dir, k, workers, per_env, fit_out);
    if (*ft) {
      opts.use_paper_rule = paper_rule ? 1 : 0;
      return cmd_finetune(fit_path, target_path, opts, ft_out);
    }
    if (*sweep) {
      return cmd_sweep(config, sweep->remaining(), workers, plot, x, y, group,
                       log_scale);
    }
    if (*audit) return cmd_audit(config, audit->remaining(), workers, audit_out);
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitConfig;
}
