/* fpmlab.h - C interface to the fractional porous-medium laboratory.
 *
 * All functions return fpml_status; on FPML_ERROR* codes a thread-local
 * message is available from fpml_last_error().  Objects are opaque handles
 * owned by the caller and released with the matching _destroy call.
 * Structured verbs (experiments, sweeps, calibration) speak JSON: pass a
 * config document, receive a report document.  Buffer-returning calls follow
 * the query idiom: call with buf = NULL to obtain the required size.
 */

#ifndef FPMLAB_H
#define FPMLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  FPML_OK = 0,
  FPML_ERROR_INVALID_ARGUMENT = 1,
  FPML_ERROR_RUNTIME = 2,
  FPML_ERROR_NO_CONVERGENCE = 3,
  FPML_ERROR_IO = 4,
  FPML_ERROR_BUFFER_TOO_SMALL = 5
} fpml_status;

typedef enum {
  FPML_BOUNDARY_TORUS = 0,
  FPML_BOUNDARY_FREESPACE = 1,
  FPML_BOUNDARY_DIRICHLET = 2
} fpml_boundary;

typedef enum {
  FPML_MODE_SYMBOL = 0,
  FPML_MODE_KERNEL_TORUS = 1,
  FPML_MODE_KERNEL_FREESPACE = 2,
  FPML_MODE_DIRICHLET = 3
} fpml_operator_mode;

typedef struct fpml_grid fpml_grid;
typedef struct fpml_field fpml_field;

const char* fpml_version(void);
/* Thread-local message describing the most recent failure. */
const char* fpml_last_error(void);

/* --- grids and fields ---------------------------------------------------- */

fpml_status fpml_grid_create(int dim, double half_length, int points_per_dim,
                             fpml_boundary boundary, fpml_grid** out);
void fpml_grid_destroy(fpml_grid* grid);
fpml_status fpml_grid_info(const fpml_grid* grid, int* dim, double* half_length,
                           int* points_per_dim, int* boundary, uint64_t* node_count);

fpml_status fpml_field_create(const fpml_grid* grid, fpml_field** out);
void fpml_field_destroy(fpml_field* field);
fpml_status fpml_field_size(const fpml_field* field, uint64_t* out);
fpml_status fpml_field_get_values(const fpml_field* field, double* buf, uint64_t len);
fpml_status fpml_field_set_values(fpml_field* field, const double* buf, uint64_t len);
/* Gaussian bump normalized to the requested discrete mass. */
fpml_status fpml_field_fill_bump(fpml_field* field, double center0, double center1,
                                 double width, double mass);

fpml_status fpml_field_save_csv(const fpml_field* field, const char* path);
fpml_status fpml_field_save_binary(const fpml_field* field, const char* path);
fpml_status fpml_field_load_binary(const char* path, fpml_field** out);

/* --- operators and norms -------------------------------------------------- */

fpml_status fpml_norm_lp(const fpml_field* field, double p, double* out);
fpml_status fpml_mass(const fpml_field* field, double* out);

/* Applies the chosen discrete realization of (-Delta)^{sigma/2}. */
fpml_status fpml_apply_operator(const fpml_field* in, double sigma,
                                fpml_operator_mode mode, fpml_field** out);
fpml_status fpml_heat_kernel(const fpml_grid* grid, double sigma, double t,
                             fpml_field** out);

/* One implicit step u + tau A(|u|^{m-1} u) = g.  options_json may be NULL;
 * report_buf (optional) receives the solve report as JSON. */
fpml_status fpml_resolvent_solve(const fpml_field* g, double tau, double sigma,
                                 double m, fpml_operator_mode mode,
                                 const char* options_json, fpml_field** u_out,
                                 char* report_buf, uint64_t report_len,
                                 uint64_t* report_needed);

/* --- experiment registry (JSON in / JSON out) ----------------------------- */

fpml_status fpml_experiments_list(char* buf, uint64_t len, uint64_t* needed);
fpml_status fpml_experiment_default_config(const char* name, char* buf, uint64_t len,
                                           uint64_t* needed);
/* Runs an experiment; out_dir NULL falls back to config/output_dir/env.
 * all_passed (optional) receives 1 when every verdict passed. */
fpml_status fpml_experiment_run(const char* config_json, const char* out_dir,
                                char* summary_buf, uint64_t len, uint64_t* needed,
                                int* all_passed);
/* values_csv: comma-separated JSON scalars assigned to the dotted param path. */
fpml_status fpml_experiment_sweep(const char* config_json, const char* param_path,
                                  const char* values_csv, const char* out_dir,
                                  char* summary_buf, uint64_t len, uint64_t* needed,
                                  int* all_passed);
fpml_status fpml_compare_reference(const char* config_json, const char* out_dir,
                                   char* summary_buf, uint64_t len, uint64_t* needed,
                                   int* all_passed);
fpml_status fpml_calibrate_extinction(const char* config_json, char* buf, uint64_t len,
                                      uint64_t* needed);
fpml_status fpml_resolvent_debug(const char* config_json, const char* out_dir,
                                 char* summary_buf, uint64_t len, uint64_t* needed,
                                 int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* FPMLAB_H */
