#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fpml/diagnostics.hpp"
#include "fpml/field.hpp"
#include "fpml/frac_params.hpp"
#include "fpml/semigroup.hpp"

namespace fpml {

using json = nlohmann::json;

struct ExperimentResult {
  std::string name;
  json manifest;
  std::vector<Verdict> verdicts;
  json summary;
  bool all_passed = true;
  bool failed_run = false;  // solver failure; bundle flagged, partial data kept
  std::string outdir;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  json default_config;
};

/// Stable-ordered registry of all experiments.
const std::vector<ExperimentInfo>& experiment_registry();
json list_experiments();
json default_config(const std::string& name);

/// Output root: explicit argument, else config["output_dir"], else
/// $FPMLAB_OUT_ROOT, else ./fpmlab-out.
std::string resolve_out_root(const json& config, const std::string& explicit_root);

/// Validates the config (field-level messages), runs the experiment, and
/// writes the artifact bundle: manifest.json, verdicts.json/csv, series.csv,
/// plot.csv, snapshots.  Throws std::invalid_argument before any output on
/// malformed configs.
ExperimentResult run_experiment(json config, const std::string& out_root = "");

/// Clones the config for each value of the dotted parameter path and fans the
/// runs out across worker threads, one output directory per value.
ExperimentResult run_sweep(json config, const std::string& param_path,
                           const std::vector<json>& values,
                           const std::string& out_root = "");

/// Per-snapshot errors against a named closed-form oracle plus an empirical
/// tau-convergence order over a step ladder.
ExperimentResult compare_reference(json config, const std::string& out_root = "");

/// Runs the separated-profile calibration and returns its report.
json calibrate_extinction_json(const json& config);

/// Single implicit-step solve for debugging; writes the solution and report.
ExperimentResult resolvent_debug(json config, const std::string& out_root = "");

json verdict_to_json(const Verdict& v);

// Config-to-object helpers (shared with the C API layer).
Grid grid_from_json(const json& j);
FracParams params_from_json(const json& j, int dim);
Schedule schedule_from_json(const json& j);
ResolventOptions solver_from_json(const json& j);
OperatorMode mode_from_json(const json& config);
Field make_initial_datum(const Grid& g, const json& spec,
                         double sigma_hint = -1.0);

}  // namespace fpml
