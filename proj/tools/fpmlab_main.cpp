// Experiment runner for the fractional porous-medium laboratory.
// Links the C API only; all numerics live behind libfpmlab.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpmlab.h"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("config", "cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// A config argument is either a JSON file path or a bare experiment name.
std::string load_config(const std::string& arg) {
  if (arg.find(".json") != std::string::npos) return read_file(arg);
  return "\"" + arg + "\"";
}

int report(fpml_status st, const std::string& summary, int all_passed) {
  if (st != FPML_OK) {
    std::cerr << "error: " << fpml_last_error() << "\n";
    return st == FPML_ERROR_INVALID_ARGUMENT ? 2 : 1;
  }
  std::cout << summary << "\n";
  return all_passed ? 0 : 1;
}

template <typename Fn>
std::pair<fpml_status, std::string> with_buffer(Fn&& fn) {
  uint64_t needed = 0;
  fpml_status st = fn(nullptr, 0, &needed);
  if (st != FPML_OK) return {st, ""};
  std::string buf(needed, '\0');
  st = fn(buf.data(), needed, &needed);
  if (!buf.empty()) buf.pop_back();  // trailing NUL
  return {st, buf};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fpmlab - fractional porous medium equation laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir;
  app.add_option("--out", out_dir, "output root (default $FPMLAB_OUT_ROOT or ./fpmlab-out)");

  auto* list_cmd = app.add_subcommand("list", "list registered experiments");

  std::string run_config;
  auto* run_cmd = app.add_subcommand("run", "run an experiment from a config or name");
  run_cmd->add_option("config", run_config, "config.json path or experiment name")->required();

  std::string sweep_config, sweep_param, sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_cmd->add_option("config", sweep_config)->required();
  sweep_cmd->add_option("--param", sweep_param, "dotted config path, e.g. params.m")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();

  std::string cmp_config;
  auto* cmp_cmd = app.add_subcommand("compare", "compare a run against a closed-form oracle");
  cmp_cmd->add_option("config", cmp_config)->required();

  std::string cal_config;
  auto* cal_cmd =
      app.add_subcommand("calibrate-extinction", "calibrate the separated extinction profile");
  cal_cmd->add_option("config", cal_config)->required();

  std::string res_config;
  auto* res_cmd = app.add_subcommand("resolvent", "single implicit-step solve (debug)");
  res_cmd->add_option("config", res_config)->required();

  std::string show_name;
  auto* show_cmd = app.add_subcommand("show-config", "print an experiment's default config");
  show_cmd->add_option("name", show_name)->required();

  CLI11_PARSE(app, argc, argv);
  const char* out = out_dir.empty() ? nullptr : out_dir.c_str();

  try {
    if (*list_cmd) {
      auto [st, text] = with_buffer(
          [&](char* b, uint64_t n, uint64_t* need) { return fpml_experiments_list(b, n, need); });
      return report(st, text, 1);
    }
    if (*show_cmd) {
      auto [st, text] = with_buffer([&](char* b, uint64_t n, uint64_t* need) {
        return fpml_experiment_default_config(show_name.c_str(), b, n, need);
      });
      return report(st, text, 1);
    }
    if (*run_cmd) {
      std::string cfg = load_config(run_config);
      int ok = 0;
      auto [st, text] = with_buffer([&](char* b, uint64_t n, uint64_t* need) {
        return fpml_experiment_run(cfg.c_str(), out, b, n, need, &ok);
      });
      return report(st, text, ok);
    }
    if (*sweep_cmd) {
      std::string cfg = load_config(sweep_config);
      int ok = 0;
      auto [st, text] = with_buffer([&](char* b, uint64_t n, uint64_t* need) {
        return fpml_experiment_sweep(cfg.c_str(), sweep_param.c_str(), sweep_values.c_str(),
                                     out, b, n, need, &ok);
      });
      return report(st, text, ok);
    }
    if (*cmp_cmd) {
      std::string cfg = load_config(cmp_config);
      int ok = 0;
      auto [st, text] = with_buffer([&](char* b, uint64_t n, uint64_t* need) {
        return fpml_compare_reference(cfg.c_str(), out, b, n, need, &ok);
      });
      return report(st, text, ok);
    }
    if (*cal_cmd) {
      std::string cfg = load_config(cal_config);
      auto [st, text] = with_buffer([&](char* b, uint64_t n, uint64_t* need) {
        return fpml_calibrate_extinction(cfg.c_str(), b, n, need);
      });
      return report(st, text, 1);
    }
    if (*res_cmd) {
      std::string cfg = load_config(res_config);
      int ok = 0;
      auto [st, text] = with_buffer([&](char* b, uint64_t n, uint64_t* need) {
        return fpml_resolvent_debug(cfg.c_str(), out, b, n, need, &ok);
      });
      return report(st, text, ok);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
