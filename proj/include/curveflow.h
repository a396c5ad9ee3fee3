/* curveflow — elastic curve flow simulator, C API.
 *
 * Every object returned through an out-parameter is owned by the caller and
 * released with the matching *_free function. Functions returning cf_status
 * leave out-parameters untouched on failure; the failure message is available
 * via cf_last_error() (thread-local, valid until the next failing call on the
 * same thread). Strings returned through char** out-parameters are released
 * with cf_string_free.
 */
#ifndef CURVEFLOW_H
#define CURVEFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cf_status {
  CF_OK = 0,
  CF_ERROR_CONFIG = 1,           /* invalid configuration, preset or check name */
  CF_ERROR_IO = 2,               /* filesystem failure */
  CF_ERROR_DEGENERATE = 3,       /* grid lost regularity (|f_x| -> 0) */
  CF_ERROR_NONFINITE = 4,        /* NaN/inf encountered */
  CF_ERROR_INVALID_ARGUMENT = 5, /* null pointer / bad buffer from the caller */
  CF_ERROR_INTERNAL = 6          /* unexpected failure inside the library */
} cf_status;

typedef struct cf_config cf_config;         /* one run description */
typedef struct cf_curve cf_curve;           /* one curve state */
typedef struct cf_run_result cf_run_result; /* artifacts + stats of a finished run */
typedef struct cf_report cf_report;         /* verification report */

const char* cf_version(void);
const char* cf_status_name(cf_status s);
const char* cf_last_error(void);
void cf_string_free(char* s);

/* ---- configuration ------------------------------------------------------ */

/* A config with library defaults (circle preset, lambda 0.5, 128 nodes,
 * t_end 0, adaptive steps). */
cf_status cf_config_create(cf_config** out);
/* Strict JSON parse: unknown keys are CF_ERROR_CONFIG. */
cf_status cf_config_parse(const char* json_text, cf_config** out);
cf_status cf_config_load(const char* path, cf_config** out);
/* Set one field from its string form. Keys: preset, lambda, nodes, dim, flow,
 * integrator, t_end, n_snapshots, diag_every, record_residuals, seed, out_dir,
 * snapshots_file, diagnostics_file, svg_every, policy.mode, policy.cfl,
 * policy.dt, policy.dt_max, params.<name>. */
cf_status cf_config_set(cf_config* c, const char* key, const char* value);
/* Canonical JSON rendering (round-trips through cf_config_parse). */
cf_status cf_config_render(const cf_config* c, char** json_out);
void cf_config_free(cf_config* c);

/* ---- curves ------------------------------------------------------------- */

/* Instantiate a named preset (params_json: JSON object of numbers or NULL). */
cf_status cf_curve_preset(const char* name, const char* params_json, int nodes, int dim,
                          uint64_t seed, cf_curve** out);
int cf_curve_nodes(const cf_curve* c);
int cf_curve_dim(const cf_curve* c);
double cf_curve_time(const cf_curve* c);
/* Copy the node-major coordinates into buf (len >= nodes*dim doubles). */
cf_status cf_curve_points(const cf_curve* c, double* buf, size_t len);
/* out[5] = { length L, dirichlet D, bending E, E_lambda, D_lambda }. */
cf_status cf_curve_energies(const cf_curve* c, double lambda, double out[5]);
void cf_curve_free(cf_curve* c);

/* ---- runs --------------------------------------------------------------- */

/* Evolve the configured flow and write snapshots/diagnostics/SVG artifacts.
 * Returns CF_OK even when the run stops early; interrogate the result for
 * the termination reason. */
cf_status cf_run(const cf_config* c, cf_run_result** out);
/* "reached-horizon", "degenerate-grid" or "non-finite". */
const char* cf_run_termination(const cf_run_result* r);
/* Named scalar from the run statistics; CF_ERROR_INVALID_ARGUMENT for unknown
 * names. Names: steps, t_final, initial_d_lambda, final_d_lambda,
 * initial_e_lambda, final_e_lambda, energy_violations, worst_energy_increase,
 * min_fx, max_mesh_ratio, final_mesh_ratio, cum_dissipation,
 * cum_identity_excess, min_slack_poincare, min_slack_length, min_slack_kappa,
 * min_slack_dirichlet, min_slack_cumulative, max_nk1, max_nk2, max_nk3,
 * svg_frames. */
cf_status cf_run_stat(const cf_run_result* r, const char* name, double* out);
cf_status cf_run_summary(const cf_run_result* r, char** text_out);
void cf_run_result_free(cf_run_result* r);

/* ---- verification ------------------------------------------------------- */

/* Run one named residual check (or "all") for a preset over a grid ladder.
 * grids: ascending even integers >= 8, n_grids >= 2. */
cf_status cf_check(const char* check, const char* preset, const char* params_json,
                   const int* grids, size_t n_grids, double lambda, cf_report** out);
int cf_report_passed(const cf_report* r); /* 1 all passed, 0 otherwise */
cf_status cf_report_text(const cf_report* r, char** text_out);
void cf_report_free(cf_report* r);

/* Space-separated list of check names. */
const char* cf_check_names(void);
/* Human-readable preset table. */
const char* cf_presets_text(void);

#ifdef __cplusplus
}
#endif

#endif /* CURVEFLOW_H */
