// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the C API.
//
//   crystalflow run <config> [--output DIR]
//   crystalflow verify <run-dir>
//   crystalflow sweep <config> --param tau --values 1e-2,5e-3,2.5e-3
//   crystalflow compare <config> --variants sinh,exp [--K 1,0.5,0.25]
//
// Exit codes: 0 success, 1 an estimate report failed, 2 an error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crystalflow/crystalflow.h"

namespace {

constexpr int kExitReportFailed = 1;
constexpr int kExitError = 2;

struct ConfigDeleter {
  void operator()(cf_config* c) const { cf_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<cf_config, ConfigDeleter>;

int report_error(const char* what, cf_status s) {
  std::cerr << "crystalflow " << what << ": " << cf_status_name(s) << ": "
            << cf_last_error();
  if (cf_last_error_step() >= 0) std::cerr << " (step " << cf_last_error_step() << ")";
  std::cerr << '\n';
  return kExitError;
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  cf_string_free(s);
  return out;
}

void print_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (in) std::cout << in.rdbuf();
}

// Loads a config and applies an optional output override.
ConfigPtr load(const std::string& path, const std::string& output, int& rc) {
  cf_config* raw = nullptr;
  if (cf_status s = cf_config_load(path.c_str(), &raw); s != CF_OK) {
    rc = report_error("config", s);
    return nullptr;
  }
  ConfigPtr cfg(raw);
  if (!output.empty()) {
    if (cf_status s = cf_config_set_output(cfg.get(), output.c_str()); s != CF_OK) {
      rc = report_error("config", s);
      return nullptr;
    }
  }
  return cfg;
}

std::string output_dir(const cf_config* cfg) {
  char* dir = nullptr;
  if (cf_config_output_dir(cfg, &dir) != CF_OK) return {};
  return take_string(dir);
}

int cmd_run(const std::string& config, const std::string& output) {
  int rc = 0;
  ConfigPtr cfg = load(config, output, rc);
  if (!cfg) return rc;
  int exit_code = 0;
  if (cf_status s = cf_run_experiment(cfg.get(), &exit_code); s != CF_OK) {
    return report_error("run", s);
  }
  // Read the failure before any further call resets the error channel.
  const std::string error = cf_last_error();
  const int error_step = cf_last_error_step();
  const std::string dir = output_dir(cfg.get());
  if (exit_code == kExitError) {
    std::cerr << "crystalflow run: FAILED: " << error;
    if (error_step >= 0) std::cerr << " (step " << error_step << ")";
    std::cerr << "\npartial artifacts kept in " << dir << '\n';
    return kExitError;
  }
  print_file(dir + "/reports.csv");
  std::cout << "artifacts: " << dir << '\n';
  return exit_code;
}

int cmd_verify(const std::string& dir) {
  cf_report_list* list = nullptr;
  if (cf_status s = cf_verify_directory_reports(dir.c_str(), &list); s != CF_OK) {
    return report_error("verify", s);
  }
  bool all = true;
  std::cout << "name,lhs,rhs,margin,pass\n";
  for (size_t i = 0; i < cf_report_list_size(list); ++i) {
    const cf_report* r = cf_report_list_get(list, i);
    const bool pass = cf_report_pass(r) != 0;
    all = all && pass;
    std::printf("%s,%.17g,%.17g,%.17g,%s\n", cf_report_name(r), cf_report_lhs(r),
                cf_report_rhs(r), cf_report_margin(r), pass ? "true" : "false");
  }
  std::fflush(stdout);
  cf_report_list_destroy(list);
  return all ? 0 : kExitReportFailed;
}

int cmd_sweep(const std::string& config, const std::string& output,
              const std::string& param, const std::vector<double>& values,
              int workers) {
  int rc = 0;
  ConfigPtr cfg = load(config, output, rc);
  if (!cfg) return rc;
  int all_ok = 0;
  if (cf_status s = cf_sweep(cfg.get(), param.c_str(), values.data(),
                             values.size(), workers, &all_ok);
      s != CF_OK) {
    return report_error("sweep", s);
  }
  const std::string dir = output_dir(cfg.get());
  print_file(dir + "/sweep_summary.csv");
  std::cout << "artifacts: " << dir << '\n';
  return all_ok ? 0 : kExitError;
}

int cmd_compare(const std::string& config, const std::string& output,
                const std::string& variants, const std::vector<double>& ks,
                int workers) {
  int rc = 0;
  ConfigPtr cfg = load(config, output, rc);
  if (!cfg) return rc;
  if (cf_status s = cf_compare(cfg.get(), variants.c_str(),
                               ks.empty() ? nullptr : ks.data(), ks.size(),
                               workers);
      s != CF_OK) {
    return report_error("compare", s);
  }
  const std::string dir = output_dir(cfg.get());
  print_file(dir + "/compare_summary.csv");
  if (!ks.empty()) print_file(dir + "/compare_scaled_sinh.csv");
  std::cout << "artifacts: " << dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crystalflow: regularized implicit solver and estimate checks"};
  app.set_version_flag("--version", std::string(cf_version()));
  app.require_subcommand(1);

  std::string config, output, dir, param, variants = "sinh,exp";
  std::vector<double> values, ks;
  int workers = 0;

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  run->add_option("config", config, "configuration file")->required();
  run->add_option("-o,--output", output, "output directory override");

  CLI::App* verify = app.add_subcommand("verify", "recompute the estimate reports of a run");
  verify->add_option("directory", dir, "run directory")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("config", config, "configuration file")->required();
  sweep->add_option("--param", param, "tau, eps, K, p or amplitude")->required();
  sweep->add_option("--values", values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("-o,--output", output, "output directory override");
  sweep->add_option("-j,--workers", workers, "worker threads (0: all cores)");

  CLI::App* compare = app.add_subcommand("compare", "compare nonlinearity variants");
  compare->add_option("config", config, "configuration file")->required();
  compare->add_option("--variants", variants,
                      "comma-separated: sinh, exp, linear, scaled_sinh:K, p_exponent:p");
  compare->add_option("--K", ks, "scaled_sinh K values compared against f(s) = s")
      ->delimiter(',');
  compare->add_option("-o,--output", output, "output directory override");
  compare->add_option("-j,--workers", workers, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  if (*run) return cmd_run(config, output);
  if (*verify) return cmd_verify(dir);
  if (*sweep) return cmd_sweep(config, output, param, values, workers);
  if (*compare) return cmd_compare(config, output, variants, ks, workers);
  return kExitError;
}
