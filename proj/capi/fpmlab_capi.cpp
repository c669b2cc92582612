#include "fpmlab.h"

#include <cstring>
#include <exception>
#include <sstream>
#include <string>

#include "fpml/experiments.hpp"
#include "fpml/io.hpp"
#include "fpml/operators.hpp"
#include "fpml/resolvent.hpp"

namespace {

thread_local std::string g_last_error;

fpml_status fail(fpml_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
fpml_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(FPML_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(FPML_ERROR_RUNTIME, e.what());
  } catch (...) {
    return fail(FPML_ERROR_RUNTIME, "unknown error");
  }
}

fpml_status copy_out(const std::string& s, char* buf, uint64_t len, uint64_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf) return FPML_OK;  // size query
  if (len < s.size() + 1)
    return fail(FPML_ERROR_BUFFER_TOO_SMALL, "output buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return FPML_OK;
}

fpml::Boundary to_boundary(fpml_boundary b) {
  switch (b) {
    case FPML_BOUNDARY_TORUS: return fpml::Boundary::PeriodicTorus;
    case FPML_BOUNDARY_FREESPACE: return fpml::Boundary::FreeSpaceWindow;
    case FPML_BOUNDARY_DIRICHLET: return fpml::Boundary::DirichletBox;
  }
  throw std::invalid_argument("bad boundary enum");
}

fpml::OperatorMode to_mode(fpml_operator_mode m) {
  switch (m) {
    case FPML_MODE_SYMBOL: return fpml::OperatorMode::Symbol;
    case FPML_MODE_KERNEL_TORUS: return fpml::OperatorMode::KernelTorus;
    case FPML_MODE_KERNEL_FREESPACE: return fpml::OperatorMode::KernelFreeSpace;
    case FPML_MODE_DIRICHLET: return fpml::OperatorMode::Dirichlet;
  }
  throw std::invalid_argument("bad operator mode enum");
}

}  // namespace

struct fpml_grid {
  fpml::Grid grid;
};
struct fpml_field {
  fpml::Field field;
};

extern "C" {

const char* fpml_version(void) { return "0.1.0"; }

const char* fpml_last_error(void) { return g_last_error.c_str(); }

fpml_status fpml_grid_create(int dim, double half_length, int points_per_dim,
                             fpml_boundary boundary, fpml_grid** out) {
  if (!out) return fail(FPML_ERROR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    *out = new fpml_grid{fpml::Grid::make(dim, half_length, points_per_dim,
                                          to_boundary(boundary))};
    return FPML_OK;
  });
}

void fpml_grid_destroy(fpml_grid* grid) { delete grid; }

fpml_status fpml_grid_info(const fpml_grid* grid, int* dim, double* half_length,
                           int* points_per_dim, int* boundary, uint64_t* node_count) {
  if (!grid) return fail(FPML_ERROR_INVALID_ARGUMENT, "grid is null");
  if (dim) *dim = grid->grid.dim();
  if (half_length) *half_length = grid->grid.half_length();
  if (points_per_dim) *points_per_dim = grid->grid.points_per_dim();
  if (boundary) *boundary = static_cast<int>(grid->grid.boundary());
  if (node_count) *node_count = grid->grid.node_count();
  return FPML_OK;
}

fpml_status fpml_field_create(const fpml_grid* grid, fpml_field** out) {
  if (!grid || !out) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new fpml_field{fpml::Field(grid->grid)};
    return FPML_OK;
  });
}

void fpml_field_destroy(fpml_field* field) { delete field; }

fpml_status fpml_field_size(const fpml_field* field, uint64_t* out) {
  if (!field || !out) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  *out = field->field.size();
  return FPML_OK;
}

fpml_status fpml_field_get_values(const fpml_field* field, double* buf, uint64_t len) {
  if (!field || !buf) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  if (len < field->field.size())
    return fail(FPML_ERROR_BUFFER_TOO_SMALL, "value buffer too small");
  std::memcpy(buf, field->field.values().data(), field->field.size() * sizeof(double));
  return FPML_OK;
}

fpml_status fpml_field_set_values(fpml_field* field, const double* buf, uint64_t len) {
  if (!field || !buf) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  if (len != field->field.size())
    return fail(FPML_ERROR_INVALID_ARGUMENT, "value length does not match the grid");
  std::memcpy(field->field.values().data(), buf, len * sizeof(double));
  return FPML_OK;
}

fpml_status fpml_field_fill_bump(fpml_field* field, double center0, double center1,
                                 double width, double mass) {
  if (!field) return fail(FPML_ERROR_INVALID_ARGUMENT, "field is null");
  return guarded([&] {
    fpml::json spec = {{"kind", "bump"},
                       {"center", {center0, center1}},
                       {"width", width},
                       {"mass", mass}};
    field->field = fpml::make_initial_datum(field->field.grid(), spec);
    return FPML_OK;
  });
}

fpml_status fpml_field_save_csv(const fpml_field* field, const char* path) {
  if (!field || !path) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    fpml::write_field_csv(field->field, path);
    return FPML_OK;
  });
}

fpml_status fpml_field_save_binary(const fpml_field* field, const char* path) {
  if (!field || !path) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    fpml::write_field_binary(field->field, path);
    return FPML_OK;
  });
}

fpml_status fpml_field_load_binary(const char* path, fpml_field** out) {
  if (!path || !out) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new fpml_field{fpml::read_field_binary(path)};
    return FPML_OK;
  });
}

fpml_status fpml_norm_lp(const fpml_field* field, double p, double* out) {
  if (!field || !out) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = fpml::norm_lp(field->field, p);
    return FPML_OK;
  });
}

fpml_status fpml_mass(const fpml_field* field, double* out) {
  if (!field || !out) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  *out = fpml::mass(field->field);
  return FPML_OK;
}

fpml_status fpml_apply_operator(const fpml_field* in, double sigma,
                                fpml_operator_mode mode, fpml_field** out) {
  if (!in || !out) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    fpml::FracOperator op(in->field.grid(), sigma, to_mode(mode));
    *out = new fpml_field{op.apply(in->field)};
    return FPML_OK;
  });
}

fpml_status fpml_heat_kernel(const fpml_grid* grid, double sigma, double t,
                             fpml_field** out) {
  if (!grid || !out) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new fpml_field{fpml::heat_kernel(grid->grid, sigma, t)};
    return FPML_OK;
  });
}

fpml_status fpml_resolvent_solve(const fpml_field* g, double tau, double sigma,
                                 double m, fpml_operator_mode mode,
                                 const char* options_json, fpml_field** u_out,
                                 char* report_buf, uint64_t report_len,
                                 uint64_t* report_needed) {
  if (!g || !u_out) return fail(FPML_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() -> fpml_status {
    fpml::json opts_json =
        options_json ? fpml::json::parse(options_json) : fpml::json();
    fpml::ResolventOptions opts = fpml::solver_from_json(opts_json);
    fpml::FracParams params = fpml::FracParams::make(g->field.grid().dim(), sigma, m);
    fpml::FracOperator op(g->field.grid(), sigma, to_mode(mode));
    auto [u, rep] = fpml::resolvent(g->field, tau, params, op, opts);
    *u_out = new fpml_field{std::move(u)};
    fpml::json repj = {{"iterations", rep.iterations},
                       {"final_residual", rep.final_residual},
                       {"damping_events", rep.damping_events},
                       {"converged", rep.converged},
                       {"cg_iterations", rep.cg_iterations},
                       {"used_fallback", rep.used_fallback}};
    fpml_status st = copy_out(repj.dump(), report_buf, report_len, report_needed);
    if (st != FPML_OK) return st;
    if (!rep.converged)
      return fail(FPML_ERROR_NO_CONVERGENCE, "resolvent did not converge");
    return FPML_OK;
  });
}

fpml_status fpml_experiments_list(char* buf, uint64_t len, uint64_t* needed) {
  return guarded([&] { return copy_out(fpml::list_experiments().dump(2), buf, len, needed); });
}

fpml_status fpml_experiment_default_config(const char* name, char* buf, uint64_t len,
                                           uint64_t* needed) {
  if (!name) return fail(FPML_ERROR_INVALID_ARGUMENT, "name is null");
  return guarded(
      [&] { return copy_out(fpml::default_config(name).dump(2), buf, len, needed); });
}

namespace {

fpml_status run_json_verb(const char* config_json, const char* out_dir,
                          char* summary_buf, uint64_t len, uint64_t* needed,
                          int* all_passed, int which, const char* param_path = nullptr,
                          const char* values_csv = nullptr) {
  if (!config_json) return fail(FPML_ERROR_INVALID_ARGUMENT, "config is null");
  return guarded([&]() -> fpml_status {
    fpml::json cfg = fpml::json::parse(config_json);
    std::string root = out_dir ? out_dir : "";
    fpml::ExperimentResult res;
    if (which == 0) {
      res = fpml::run_experiment(cfg, root);
    } else if (which == 1) {
      if (!param_path || !values_csv)
        return fail(FPML_ERROR_INVALID_ARGUMENT, "sweep needs param and values");
      std::vector<fpml::json> values;
      std::stringstream ss(values_csv);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) values.push_back(fpml::json::parse(item));
      res = fpml::run_sweep(cfg, param_path, values, root);
    } else if (which == 2) {
      res = fpml::compare_reference(cfg, root);
    } else {
      res = fpml::resolvent_debug(cfg, root);
    }
    if (all_passed) *all_passed = res.all_passed ? 1 : 0;
    fpml::json out = {{"name", res.name},
                      {"all_passed", res.all_passed},
                      {"outdir", res.outdir},
                      {"verdicts", fpml::json::array()},
                      {"summary", res.summary}};
    for (const auto& v : res.verdicts) out["verdicts"].push_back(fpml::verdict_to_json(v));
    return copy_out(out.dump(2), summary_buf, len, needed);
  });
}

}  // namespace

fpml_status fpml_experiment_run(const char* config_json, const char* out_dir,
                                char* summary_buf, uint64_t len, uint64_t* needed,
                                int* all_passed) {
  return run_json_verb(config_json, out_dir, summary_buf, len, needed, all_passed, 0);
}

fpml_status fpml_experiment_sweep(const char* config_json, const char* param_path,
                                  const char* values_csv, const char* out_dir,
                                  char* summary_buf, uint64_t len, uint64_t* needed,
                                  int* all_passed) {
  return run_json_verb(config_json, out_dir, summary_buf, len, needed, all_passed, 1,
                       param_path, values_csv);
}

fpml_status fpml_compare_reference(const char* config_json, const char* out_dir,
                                   char* summary_buf, uint64_t len, uint64_t* needed,
                                   int* all_passed) {
  return run_json_verb(config_json, out_dir, summary_buf, len, needed, all_passed, 2);
}

fpml_status fpml_calibrate_extinction(const char* config_json, char* buf, uint64_t len,
                                      uint64_t* needed) {
  if (!config_json) return fail(FPML_ERROR_INVALID_ARGUMENT, "config is null");
  return guarded([&] {
    fpml::json cfg = fpml::json::parse(config_json);
    return copy_out(fpml::calibrate_extinction_json(cfg).dump(2), buf, len, needed);
  });
}

fpml_status fpml_resolvent_debug(const char* config_json, const char* out_dir,
                                 char* summary_buf, uint64_t len, uint64_t* needed,
                                 int* all_passed) {
  return run_json_verb(config_json, out_dir, summary_buf, len, needed, all_passed, 3);
}

}  // extern "C"
