#pragma once

#include <string>

#include "curveflow/flow_engine.hpp"
#include "curveflow/presets_io.hpp"

namespace curveflow {

/// What a completed run produced and where the artifacts went.
struct RunSummary {
  Termination termination = Termination::ReachedHorizon;
  RunStats stats;
  std::string out_dir;
  std::string snapshots_path;
  std::string diagnostics_path;
  int svg_frames = 0;
};

/// Evolve the configured flow and write snapshots (JSONL), diagnostics (CSV)
/// and optional SVG frames under the resolved output directory
/// (config.out_dir, else $CURVEFLOW_OUT, else "."). Creates the directory.
RunSummary run_simulation(const FlowConfig& config);

/// Multi-line human-readable account of a finished run.
std::string summary_text(const RunSummary& s);

}  // namespace curveflow
