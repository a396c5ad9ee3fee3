#include "curveflow.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "curveflow/driver.hpp"
#include "curveflow/energies.hpp"
#include "curveflow/flow_engine.hpp"
#include "curveflow/grid_geometry.hpp"
#include "curveflow/invariant_monitor.hpp"
#include "curveflow/presets_io.hpp"

using namespace curveflow;

struct cf_config {
  FlowConfig cfg;
};
struct cf_curve {
  CurveState state;
};
struct cf_run_result {
  RunSummary summary;
};
struct cf_report {
  std::vector<ResidualReport> reports;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) { g_last_error = msg ? msg : ""; }

template <class Fn>
cf_status guarded(Fn&& fn) {
  try {
    fn();
    return CF_OK;
  } catch (const ConfigError& e) {
    set_error(e.what());
    return CF_ERROR_CONFIG;
  } catch (const IoError& e) {
    set_error(e.what());
    return CF_ERROR_IO;
  } catch (const DegenerateGridError& e) {
    set_error(e.what());
    return CF_ERROR_DEGENERATE;
  } catch (const NonFiniteError& e) {
    set_error(e.what());
    return CF_ERROR_NONFINITE;
  } catch (const std::exception& e) {
    set_error(e.what());
    return CF_ERROR_INTERNAL;
  } catch (...) {
    set_error("unknown failure");
    return CF_ERROR_INTERNAL;
  }
}

cf_status invalid(const char* msg) {
  set_error(msg);
  return CF_ERROR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::map<std::string, double> parse_params_json(const char* params_json) {
  std::map<std::string, double> out;
  if (!params_json || !*params_json) return out;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(params_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("params are not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("params must be a JSON object of numbers");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw ConfigError("preset parameter '" + k + "' must be a number");
    out[k] = v.get<double>();
  }
  return out;
}

bool parse_double(const char* s, double& out) {
  char* end = nullptr;
  out = std::strtod(s, &end);
  return end && *s && !*end;
}

bool parse_i64(const char* s, long long& out) {
  char* end = nullptr;
  out = std::strtoll(s, &end, 10);
  return end && *s && !*end;
}

std::string format_report(const ResidualReport& r) {
  std::string line = r.check + " on " + r.preset + ": residuals";
  char buf[64];
  for (size_t i = 0; i < r.grids.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %.3e (N=%d)", r.residuals[i], r.grids[i]);
    line += buf;
    if (i + 1 < r.grids.size()) line += ",";
  }
  if (r.rule == "order-window") {
    if (r.observed_order != r.observed_order) {
      line += "; residuals at rounding level";
    } else {
      std::snprintf(buf, sizeof buf, "; observed order %.2f in [%.1f, %.1f]",
                    r.observed_order, r.order_lo, r.order_hi);
      line += buf;
    }
  } else {
    std::snprintf(buf, sizeof buf, "; rule %s (order %.2f)", r.rule.c_str(),
                  r.observed_order);
    line += buf;
  }
  line += r.passed ? "; pass" : "; FAIL";
  return line;
}

}  // namespace

extern "C" {

const char* cf_version(void) { return "0.1.0"; }

const char* cf_status_name(cf_status s) {
  switch (s) {
    case CF_OK: return "ok";
    case CF_ERROR_CONFIG: return "config-error";
    case CF_ERROR_IO: return "io-error";
    case CF_ERROR_DEGENERATE: return "degenerate-grid";
    case CF_ERROR_NONFINITE: return "non-finite";
    case CF_ERROR_INVALID_ARGUMENT: return "invalid-argument";
    case CF_ERROR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* cf_last_error(void) { return g_last_error.c_str(); }

void cf_string_free(char* s) { std::free(s); }

/* ---- configuration ------------------------------------------------------ */

cf_status cf_config_create(cf_config** out) {
  if (!out) return invalid("cf_config_create: out is null");
  return guarded([&] { *out = new cf_config(); });
}

cf_status cf_config_parse(const char* json_text, cf_config** out) {
  if (!json_text || !out) return invalid("cf_config_parse: null argument");
  return guarded([&] { *out = new cf_config{parse_config(json_text)}; });
}

cf_status cf_config_load(const char* path, cf_config** out) {
  if (!path || !out) return invalid("cf_config_load: null argument");
  return guarded([&] { *out = new cf_config{load_config(path)}; });
}

cf_status cf_config_set(cf_config* c, const char* key, const char* value) {
  if (!c || !key || !value) return invalid("cf_config_set: null argument");
  return guarded([&] {
    FlowConfig& f = c->cfg;
    const std::string k = key;
    auto need_double = [&](double& field) {
      if (!parse_double(value, field))
        throw ConfigError("value for '" + k + "' is not a number: '" + value + "'");
    };
    auto need_int = [&](int& field) {
      long long v;
      if (!parse_i64(value, v)) throw ConfigError("value for '" + k + "' is not an integer");
      field = static_cast<int>(v);
    };
    if (k == "preset") {
      f.preset.name = value;
    } else if (k.rfind("params.", 0) == 0) {
      double v;
      if (!parse_double(value, v))
        throw ConfigError("value for '" + k + "' is not a number: '" + value + "'");
      f.preset.params[k.substr(7)] = v;
    } else if (k == "lambda") {
      need_double(f.lambda);
    } else if (k == "nodes") {
      need_int(f.nodes);
    } else if (k == "dim") {
      need_int(f.dim);
    } else if (k == "flow") {
      const std::string v = value;
      if (v == "d-lambda")
        f.variant = FlowVariant::DLambda;
      else if (v == "e-lambda")
        f.variant = FlowVariant::ELambda;
      else
        throw ConfigError("flow must be \"d-lambda\" or \"e-lambda\"");
    } else if (k == "integrator") {
      const std::string v = value;
      if (v == "rk4")
        f.integrator = Integrator::RK4;
      else if (v == "euler")
        f.integrator = Integrator::Euler;
      else
        throw ConfigError("integrator must be \"rk4\" or \"euler\"");
    } else if (k == "policy.mode") {
      const std::string v = value;
      if (v == "adaptive-cfl")
        f.policy.mode = StepPolicy::Mode::AdaptiveCfl;
      else if (v == "fixed-dt")
        f.policy.mode = StepPolicy::Mode::FixedDt;
      else
        throw ConfigError("policy.mode must be \"adaptive-cfl\" or \"fixed-dt\"");
    } else if (k == "policy.cfl") {
      need_double(f.policy.cfl);
    } else if (k == "policy.dt") {
      need_double(f.policy.dt);
      f.policy.mode = StepPolicy::Mode::FixedDt;
    } else if (k == "policy.dt_max") {
      need_double(f.policy.dt_max);
    } else if (k == "t_end") {
      need_double(f.t_end);
    } else if (k == "n_snapshots") {
      need_int(f.n_snapshots);
    } else if (k == "diag_every") {
      need_int(f.diag_every);
    } else if (k == "record_residuals") {
      const std::string v = value;
      if (v == "true" || v == "1")
        f.record_residuals = true;
      else if (v == "false" || v == "0")
        f.record_residuals = false;
      else
        throw ConfigError("record_residuals must be true or false");
    } else if (k == "seed") {
      long long v;
      if (!parse_i64(value, v) || v < 0)
        throw ConfigError("seed must be a non-negative integer");
      f.seed = static_cast<std::uint64_t>(v);
    } else if (k == "out_dir") {
      f.out_dir = value;
    } else if (k == "snapshots_file") {
      f.snapshots_file = value;
    } else if (k == "diagnostics_file") {
      f.diagnostics_file = value;
    } else if (k == "svg_every") {
      need_int(f.svg_every);
    } else {
      throw ConfigError("unknown config key '" + k + "'");
    }
  });
}

cf_status cf_config_render(const cf_config* c, char** json_out) {
  if (!c || !json_out) return invalid("cf_config_render: null argument");
  return guarded([&] { *json_out = dup_string(render_config(c->cfg)); });
}

void cf_config_free(cf_config* c) { delete c; }

/* ---- curves ------------------------------------------------------------- */

cf_status cf_curve_preset(const char* name, const char* params_json, int nodes, int dim,
                          uint64_t seed, cf_curve** out) {
  if (!name || !out) return invalid("cf_curve_preset: null argument");
  return guarded([&] {
    PresetSpec spec;
    spec.name = name;
    spec.params = parse_params_json(params_json);
    *out = new cf_curve{make_preset(spec, nodes, dim, seed)};
  });
}

int cf_curve_nodes(const cf_curve* c) { return c ? c->state.node_count() : 0; }
int cf_curve_dim(const cf_curve* c) { return c ? c->state.dim : 0; }
double cf_curve_time(const cf_curve* c) { return c ? c->state.t : 0.0; }

cf_status cf_curve_points(const cf_curve* c, double* buf, size_t len) {
  if (!c || !buf) return invalid("cf_curve_points: null argument");
  const size_t need = c->state.nodes.size();
  if (len < need) return invalid("cf_curve_points: buffer too small");
  std::memcpy(buf, c->state.nodes.data(), need * sizeof(double));
  return CF_OK;
}

cf_status cf_curve_energies(const cf_curve* c, double lambda, double out[5]) {
  if (!c || !out) return invalid("cf_curve_energies: null argument");
  return guarded([&] {
    const GeometryCache g = geometry(c->state, lambda);
    const EnergyBreakdown e = energies(g, lambda);
    out[0] = e.length;
    out[1] = e.dirichlet;
    out[2] = e.bending;
    out[3] = e.e_lambda;
    out[4] = e.d_lambda;
  });
}

void cf_curve_free(cf_curve* c) { delete c; }

/* ---- runs --------------------------------------------------------------- */

cf_status cf_run(const cf_config* c, cf_run_result** out) {
  if (!c || !out) return invalid("cf_run: null argument");
  return guarded([&] { *out = new cf_run_result{run_simulation(c->cfg)}; });
}

const char* cf_run_termination(const cf_run_result* r) {
  if (!r) return "invalid";
  switch (r->summary.termination) {
    case Termination::ReachedHorizon: return "reached-horizon";
    case Termination::DegenerateGrid: return "degenerate-grid";
    case Termination::NonFinite: return "non-finite";
  }
  return "unknown";
}

cf_status cf_run_stat(const cf_run_result* r, const char* name, double* out) {
  if (!r || !name || !out) return invalid("cf_run_stat: null argument");
  const RunStats& st = r->summary.stats;
  const std::string n = name;
  double v;
  if (n == "steps")
    v = static_cast<double>(st.accepted_steps);
  else if (n == "t_final")
    v = st.t_final;
  else if (n == "initial_d_lambda")
    v = st.initial_d_lambda;
  else if (n == "final_d_lambda")
    v = st.final_d_lambda;
  else if (n == "initial_e_lambda")
    v = st.initial_e_lambda;
  else if (n == "final_e_lambda")
    v = st.final_e_lambda;
  else if (n == "energy_violations")
    v = static_cast<double>(st.energy_violations);
  else if (n == "worst_energy_increase")
    v = st.worst_energy_increase;
  else if (n == "min_fx")
    v = st.min_fx;
  else if (n == "max_mesh_ratio")
    v = st.max_mesh_ratio;
  else if (n == "final_mesh_ratio")
    v = st.final_mesh_ratio;
  else if (n == "cum_dissipation")
    v = st.cum_dissipation;
  else if (n == "cum_identity_excess")
    v = st.cum_identity_excess;
  else if (n == "min_slack_poincare")
    v = st.min_slacks.poincare;
  else if (n == "min_slack_length")
    v = st.min_slacks.length_cap;
  else if (n == "min_slack_kappa")
    v = st.min_slacks.kappa_cap;
  else if (n == "min_slack_dirichlet")
    v = st.min_slacks.dirichlet_cap;
  else if (n == "min_slack_cumulative")
    v = st.min_slacks.cumulative_cap;
  else if (n == "max_nk1")
    v = st.max_nabla_kappa_l2[0];
  else if (n == "max_nk2")
    v = st.max_nabla_kappa_l2[1];
  else if (n == "max_nk3")
    v = st.max_nabla_kappa_l2[2];
  else if (n == "svg_frames")
    v = static_cast<double>(r->summary.svg_frames);
  else
    return invalid("cf_run_stat: unknown stat name");
  *out = v;
  return CF_OK;
}

cf_status cf_run_summary(const cf_run_result* r, char** text_out) {
  if (!r || !text_out) return invalid("cf_run_summary: null argument");
  return guarded([&] { *text_out = dup_string(summary_text(r->summary)); });
}

void cf_run_result_free(cf_run_result* r) { delete r; }

/* ---- verification ------------------------------------------------------- */

cf_status cf_check(const char* check, const char* preset, const char* params_json,
                   const int* grids, size_t n_grids, double lambda, cf_report** out) {
  if (!check || !preset || !grids || !out) return invalid("cf_check: null argument");
  if (n_grids < 2) return invalid("cf_check: need at least two grids");
  return guarded([&] {
    PresetSpec spec;
    spec.name = preset;
    spec.params = parse_params_json(params_json);
    const std::vector<int> gv(grids, grids + n_grids);
    auto rep = new cf_report();
    try {
      if (std::string(check) == "all") {
        for (const std::string& name : check_names())
          rep->reports.push_back(convergence_study(name, spec, gv, lambda));
      } else {
        rep->reports.push_back(convergence_study(check, spec, gv, lambda));
      }
    } catch (...) {
      delete rep;
      throw;
    }
    *out = rep;
  });
}

int cf_report_passed(const cf_report* r) {
  if (!r) return 0;
  for (const ResidualReport& rep : r->reports)
    if (!rep.passed) return 0;
  return 1;
}

cf_status cf_report_text(const cf_report* r, char** text_out) {
  if (!r || !text_out) return invalid("cf_report_text: null argument");
  return guarded([&] {
    std::string text;
    for (const ResidualReport& rep : r->reports) {
      text += format_report(rep);
      text += '\n';
    }
    *text_out = dup_string(text);
  });
}

void cf_report_free(cf_report* r) { delete r; }

const char* cf_check_names(void) {
  static const std::string joined = [] {
    std::string s;
    for (const std::string& n : check_names()) {
      if (!s.empty()) s += ' ';
      s += n;
    }
    return s;
  }();
  return joined.c_str();
}

const char* cf_presets_text(void) {
  static const std::string text = presets_description();
  return text.c_str();
}

}  // extern "C"
