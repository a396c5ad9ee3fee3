#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "curveflow/energies.hpp"
#include "curveflow/grid_geometry.hpp"
#include "curveflow/invariant_monitor.hpp"
#include "curveflow/types.hpp"

namespace curveflow {

struct FlowConfig;  // presets_io

/// Step-size selection. The adaptive rule follows the stiffness of the
/// fourth-order operator: dt = cfl * (min_i |f_x|_i * h)^4, clamped to dt_max.
struct StepPolicy {
  enum class Mode { AdaptiveCfl, FixedDt };
  Mode mode = Mode::AdaptiveCfl;
  double cfl = 0.1;
  double dt = 0.0;       // used when mode == FixedDt
  double dt_max = 1e-3;  // clamp for the adaptive rule
};

/// Flow velocity of the whole curve: the gradient-flow right-hand side.
VectorField rhs(const CurveState& curve, double lambda, FlowVariant variant);

/// dt the policy selects for the state described by `cache`.
double stable_dt(const GeometryCache& cache, const StepPolicy& policy);

/// One explicit step of size dt. Throws DegenerateGridError / NonFiniteError
/// if any stage leaves the regular regime.
CurveState step(const CurveState& curve, double lambda, FlowVariant variant,
                Integrator integrator, double dt);

/// Aggregates accumulated over every accepted step (the per-step checks run
/// unconditionally even when full records are decimated via diag_every).
struct RunStats {
  std::uint64_t accepted_steps = 0;
  double t_final = 0.0;
  double initial_d_lambda = 0.0, initial_e_lambda = 0.0;
  double final_d_lambda = 0.0, final_e_lambda = 0.0;
  /// Steps on which the run's own energy (D_lambda or E_lambda) rose by more
  /// than tol_mono = 1e-10 * (initial energy).
  std::uint64_t energy_violations = 0;
  double worst_energy_increase = 0.0;
  /// Smallest value each bound slack attained over the whole run.
  BoundSlacks min_slacks;
  double min_fx = std::numeric_limits<double>::infinity();
  double max_mesh_ratio = 0.0;
  double final_mesh_ratio = 0.0;
  double cum_dissipation = 0.0;
  /// max over steps k of cum_k - (D_l(0) - D_l(t_k)) - tol_mono * k;
  /// <= 0 when the cumulative dissipation identity holds step-wise.
  double cum_identity_excess = -std::numeric_limits<double>::infinity();
  /// Largest ||nabla_s^m kappa|| seen (m=1,2 every step; m=3 at record times).
  std::array<double, 3> max_nabla_kappa_l2{};
};

/// A completed (possibly aborted) run.
struct Trajectory {
  std::vector<CurveState> snapshots;        // t=0, cadence crossings, final
  std::vector<DiagnosticsRecord> records;   // t=0 row + every diag_every-th step + final
  Termination termination = Termination::ReachedHorizon;
  RunStats stats;

  const CurveState& final_state() const { return snapshots.back(); }
};

/// Run the configured flow from the configured preset. Step-level failures
/// (grid collapse, non-finite values) terminate the run and are reported via
/// Trajectory::termination; only configuration problems throw.
Trajectory evolve(const FlowConfig& config);

}  // namespace curveflow
