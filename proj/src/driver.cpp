#include "curveflow/driver.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace curveflow {

namespace {

std::string resolve_out_dir(const FlowConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  if (const char* env = std::getenv("CURVEFLOW_OUT"); env && *env) return env;
  return ".";
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::ReachedHorizon: return "reached-horizon";
    case Termination::DegenerateGrid: return "degenerate-grid";
    case Termination::NonFinite: return "non-finite";
  }
  return "unknown";
}

}  // namespace

RunSummary run_simulation(const FlowConfig& config) {
  namespace fs = std::filesystem;
  RunSummary out;
  out.out_dir = resolve_out_dir(config);

  std::error_code ec;
  fs::create_directories(out.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out.out_dir + "': " + ec.message());

  Trajectory traj = evolve(config);
  out.termination = traj.termination;
  out.stats = traj.stats;

  const fs::path dir(out.out_dir);
  out.snapshots_path = (dir / config.snapshots_file).string();
  out.diagnostics_path = (dir / config.diagnostics_file).string();
  write_snapshots_jsonl(out.snapshots_path, traj.snapshots);
  write_diagnostics_csv(out.diagnostics_path, traj.records);

  if (config.svg_every > 0) {
    char name[32];
    for (size_t i = 0; i < traj.snapshots.size(); i += static_cast<size_t>(config.svg_every)) {
      std::snprintf(name, sizeof name, "snapshot_%06d.svg", out.svg_frames);
      write_svg((dir / name).string(), traj.snapshots[i]);
      ++out.svg_frames;
    }
  }
  return out;
}

std::string summary_text(const RunSummary& s) {
  std::ostringstream os;
  os.precision(12);
  const RunStats& st = s.stats;
  os << "termination:        " << termination_name(s.termination) << "\n"
     << "steps accepted:     " << st.accepted_steps << "\n"
     << "t final:            " << st.t_final << "\n"
     << "D_lambda:           " << st.initial_d_lambda << " -> " << st.final_d_lambda << "\n"
     << "E_lambda:           " << st.initial_e_lambda << " -> " << st.final_e_lambda << "\n"
     << "energy violations:  " << st.energy_violations
     << " (worst increase " << st.worst_energy_increase << ")\n"
     << "cumulative diss.:   " << st.cum_dissipation
     << " (identity excess " << st.cum_identity_excess << ")\n"
     << "min |f_x|:          " << st.min_fx << "\n"
     << "mesh ratio:         max " << st.max_mesh_ratio << ", final " << st.final_mesh_ratio
     << "\n"
     << "min slacks:         poincare " << st.min_slacks.poincare << ", length "
     << st.min_slacks.length_cap << ", kappa " << st.min_slacks.kappa_cap << ", dirichlet "
     << st.min_slacks.dirichlet_cap << ", cumulative " << st.min_slacks.cumulative_cap << "\n"
     << "max ||nabla^m k||:  " << st.max_nabla_kappa_l2[0] << ", " << st.max_nabla_kappa_l2[1]
     << ", " << st.max_nabla_kappa_l2[2] << "\n"
     << "artifacts:          " << s.snapshots_path << ", " << s.diagnostics_path;
  if (s.svg_frames > 0) os << ", " << s.svg_frames << " svg frame(s)";
  os << "\n";
  return os.str();
}

}  // namespace curveflow
