#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curveflow/flow_engine.hpp"
#include "curveflow/invariant_monitor.hpp"
#include "curveflow/types.hpp"

namespace curveflow {

/// A named initial curve family plus its numeric parameters.
struct PresetSpec {
  std::string name = "circle";
  std::map<std::string, double> params;
};

/// Full description of one run. JSON-configurable; unknown keys rejected.
struct FlowConfig {
  PresetSpec preset;
  double lambda = 0.5;
  int nodes = 128;
  int dim = 2;
  FlowVariant variant = FlowVariant::DLambda;
  Integrator integrator = Integrator::RK4;
  StepPolicy policy;
  double t_end = 0.0;
  int n_snapshots = 100;
  int diag_every = 1;
  bool record_residuals = false;  // forces fixed dt (frozen at t=0 if adaptive)
  std::uint64_t seed = 0;
  std::string out_dir;  // "" -> $CURVEFLOW_OUT -> "."
  std::string snapshots_file = "snapshots.jsonl";
  std::string diagnostics_file = "diagnostics.csv";
  int svg_every = 0;  // every K-th snapshot also rendered as SVG; 0 = off
};

/// Instantiate a preset on N nodes in R^dim. Known presets: circle(r),
/// ellipse(a,b), warped_circle(r,alpha), perturbed_circle(r,amp,modes),
/// flower(r0,amp,lobes); dim > 2 pads with zeros, dim >= 3 accepts helix(beta)
/// adding beta*sin(x) in the third coordinate. Unknown names/params and
/// out-of-range values throw ConfigError.
CurveState make_preset(const PresetSpec& spec, int nodes, int dim, std::uint64_t seed);

/// Human-readable table of presets and their parameters/defaults.
std::string presets_description();

/// Parse a config from JSON text (strict: unknown keys are ConfigError with
/// the offending path; missing required keys -- preset, lambda, nodes, t_end
/// -- are ConfigError too).
FlowConfig parse_config(const std::string& json_text);

/// Read a config file (IoError on filesystem problems).
FlowConfig load_config(const std::string& path);

/// Canonical JSON rendering; parse_config(render_config(c)) == c.
std::string render_config(const FlowConfig& config);

/// JSONL snapshots: one {"t":..,"n":..,"N":..,"nodes":[[..],..]} per line,
/// doubles in shortest round-trip decimal form.
void write_snapshots_jsonl(const std::string& path, const std::vector<CurveState>& snaps);
std::vector<CurveState> read_snapshots_jsonl(const std::string& path);

/// Diagnostics CSV (fixed 24-column schema, one row per record).
extern const char* const diagnostics_csv_header;
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& rows);

/// Single-frame SVG: the closed polyline through all nodes (first two
/// coordinates), autoscaled viewBox.
std::string svg_render(const CurveState& curve);
void write_svg(const std::string& path, const CurveState& curve);

}  // namespace curveflow
