#include "curveflow/flow_engine.hpp"

#include <algorithm>
#include <cmath>

#include "curveflow/presets_io.hpp"
#include "geometry_kernels.hpp"

namespace curveflow {

namespace {

using detail::PassResult;
using detail::Workspace;

inline double pow4(double x) {
  const double x2 = x * x;
  return x2 * x2;
}

inline EnergyBreakdown breakdown(const detail::EnergyTriple& e, double lambda) {
  EnergyBreakdown out;
  out.length = e.length;
  out.dirichlet = e.dirichlet;
  out.bending = e.bending;
  out.e_lambda = e.bending + lambda * e.length;
  out.d_lambda = e.bending + lambda * e.dirichlet;
  return out;
}

inline BoundSlacks compute_slacks(const EnergyBreakdown& e, double dl0, double lambda,
                                  double cum) {
  BoundSlacks s;
  s.poincare = std::sqrt(e.length) * std::sqrt(2.0 * e.bending) - two_pi;
  s.length_cap = 2.0 * std::sqrt(std::numbers::pi * dl0 / lambda) - e.length;
  s.kappa_cap = 2.0 * dl0 - 2.0 * e.bending;
  s.dirichlet_cap = dl0 / lambda - e.dirichlet;
  s.cumulative_cap = dl0 - cum;
  return s;
}

inline void fold_min(BoundSlacks& acc, const BoundSlacks& s) {
  acc.poincare = std::min(acc.poincare, s.poincare);
  acc.length_cap = std::min(acc.length_cap, s.length_cap);
  acc.kappa_cap = std::min(acc.kappa_cap, s.kappa_cap);
  acc.dirichlet_cap = std::min(acc.dirichlet_cap, s.dirichlet_cap);
  acc.cumulative_cap = std::min(acc.cumulative_cap, s.cumulative_cap);
}

inline void axpy(size_t n, double* out, const double* y, double a, const double* x) {
  for (size_t j = 0; j < n; ++j) out[j] = y[j] + a * x[j];
}

struct StageStatus {
  bool ok = true;
  Termination cause = Termination::ReachedHorizon;
};

/// Validate the geometry currently loaded in ws against regularity/finiteness.
inline StageStatus check_pass(const PassResult& pr, double eps_reg) {
  if (!pr.finite) return {false, Termination::NonFinite};
  if (!(pr.min_fx > eps_reg)) return {false, Termination::DegenerateGrid};
  return {};
}

/// One explicit step. Pre: ws holds geometry_pass(nodes). Post on success:
/// ws.ynew holds the advanced nodes; ws geometry corresponds to some stage
/// state (callers must re-run geometry_pass on the accepted nodes).
StageStatus advance_nodes(Workspace& ws, const double* nodes, double dt, double lambda,
                          FlowVariant variant, Integrator integ, double eps_reg) {
  const size_t nv = static_cast<size_t>(ws.N) * ws.dim;
  detail::rhs_pass(variant, lambda, ws, ws.k1.data());
  if (integ == Integrator::Euler) {
    axpy(nv, ws.ynew.data(), nodes, dt, ws.k1.data());
    return {};
  }
  // classical RK4
  axpy(nv, ws.ystage.data(), nodes, 0.5 * dt, ws.k1.data());
  StageStatus st = check_pass(detail::geometry_pass(ws.ystage.data(), lambda, ws), eps_reg);
  if (!st.ok) return st;
  detail::rhs_pass(variant, lambda, ws, ws.k2.data());

  axpy(nv, ws.ystage.data(), nodes, 0.5 * dt, ws.k2.data());
  st = check_pass(detail::geometry_pass(ws.ystage.data(), lambda, ws), eps_reg);
  if (!st.ok) return st;
  detail::rhs_pass(variant, lambda, ws, ws.k3.data());

  axpy(nv, ws.ystage.data(), nodes, dt, ws.k3.data());
  st = check_pass(detail::geometry_pass(ws.ystage.data(), lambda, ws), eps_reg);
  if (!st.ok) return st;
  detail::rhs_pass(variant, lambda, ws, ws.k4.data());

  const double c = dt / 6.0;
  for (size_t j = 0; j < nv; ++j)
    ws.ynew[j] = nodes[j] + c * (ws.k1[j] + 2.0 * (ws.k2[j] + ws.k3[j]) + ws.k4[j]);
  return {};
}

DiagnosticsRecord make_record(Workspace& ws, double t, double dt, double lambda,
                              const EnergyBreakdown& e, double diss_res, double cum,
                              double dl0, const PassResult& pr) {
  DiagnosticsRecord r;
  r.t = t;
  r.dt = dt;
  r.energies = e;
  r.kappa_l2 = std::sqrt(2.0 * e.bending);
  r.nabla_kappa_l2[0] = detail::l2_ds_norm(ws.nk1.data(), ws);
  r.nabla_kappa_l2[1] = detail::l2_ds_norm(ws.nk2.data(), ws);
  detail::nabla3_pass(ws, ws.tmp.data());
  r.nabla_kappa_l2[2] = detail::l2_ds_norm(ws.tmp.data(), ws);
  r.phi_l2 = detail::l2_ds_norm_scalar(ws.phi.data(), ws);
  r.v_l2 = detail::l2_ds_norm(ws.vel.data(), ws);
  r.dissipation_residual = diss_res;
  r.cum_dissipation = cum;
  r.min_fx = pr.min_fx;
  r.max_fx = pr.max_fx;
  r.mesh_ratio = pr.max_fx / pr.min_fx;
  r.slacks = compute_slacks(e, dl0, lambda, cum);
  r.kappa_tangential_residual = detail::kappa_tangential_residual(ws);
  return r;
}

}  // namespace

VectorField rhs(const CurveState& curve, double lambda, FlowVariant variant) {
  Workspace ws;
  ws.resize(curve.node_count(), curve.dim);
  detail::to_component_major(curve.nodes.data(), ws.ycur.data(), ws.N, ws.dim);
  const PassResult pr = detail::geometry_pass(ws.ycur.data(), lambda, ws);
  const double eps_reg = eps_reg_factor * pr.sum_fx / curve.node_count();
  if (!pr.finite) throw NonFiniteError("geometry produced non-finite values");
  if (!(pr.min_fx > eps_reg))
    throw DegenerateGridError("grid degenerate: min |f_x| collapsed to numerical zero");
  VectorField out(curve.node_count(), curve.dim);
  detail::rhs_pass(variant, lambda, ws, ws.k1.data());
  detail::to_node_major(ws.k1.data(), out.v.data(), ws.N, ws.dim);
  return out;
}

double stable_dt(const GeometryCache& cache, const StepPolicy& policy) {
  if (policy.mode == StepPolicy::Mode::FixedDt) return policy.dt;
  return std::min(policy.cfl * pow4(cache.min_fx * cache.h), policy.dt_max);
}

CurveState step(const CurveState& curve, double lambda, FlowVariant variant,
                Integrator integrator, double dt) {
  if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
  Workspace ws;
  ws.resize(curve.node_count(), curve.dim);
  detail::to_component_major(curve.nodes.data(), ws.ycur.data(), ws.N, ws.dim);
  PassResult pr = detail::geometry_pass(ws.ycur.data(), lambda, ws);
  const double eps_reg = eps_reg_factor * pr.sum_fx / curve.node_count();
  StageStatus st = check_pass(pr, eps_reg);
  if (!st.ok) {
    if (st.cause == Termination::DegenerateGrid)
      throw DegenerateGridError("step: grid degenerate before step");
    throw NonFiniteError("step: non-finite state before step");
  }
  st = advance_nodes(ws, ws.ycur.data(), dt, lambda, variant, integrator, eps_reg);
  if (st.ok) st = check_pass(detail::geometry_pass(ws.ynew.data(), lambda, ws), eps_reg);
  if (!st.ok) {
    if (st.cause == Termination::DegenerateGrid)
      throw DegenerateGridError("step: grid degenerated during step");
    throw NonFiniteError("step: non-finite values during step");
  }
  CurveState out;
  out.t = curve.t + dt;
  out.dim = curve.dim;
  out.nodes.resize(curve.nodes.size());
  detail::to_node_major(ws.ynew.data(), out.nodes.data(), ws.N, ws.dim);
  return out;
}

Trajectory evolve(const FlowConfig& config) {
  if (!(config.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(config.t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  if (config.n_snapshots < 1) throw ConfigError("n_snapshots must be >= 1");
  if (config.diag_every < 1) throw ConfigError("diag_every must be >= 1");

  CurveState state = make_preset(config.preset, config.nodes, config.dim, config.seed);
  const int N = state.node_count();
  const int dim = state.dim;
  const double h = state.h();
  const double T = config.t_end;
  const double lambda = config.lambda;
  const FlowVariant variant = config.variant;

  Workspace ws;
  ws.resize(N, dim);
  detail::to_component_major(state.nodes.data(), ws.ycur.data(), N, dim);

  PassResult pr = detail::geometry_pass(ws.ycur.data(), lambda, ws);
  const double eps_reg = eps_reg_factor * pr.sum_fx / N;
  {
    const StageStatus st = check_pass(pr, eps_reg);
    if (!st.ok) {
      if (st.cause == Termination::DegenerateGrid)
        throw DegenerateGridError("initial grid is degenerate");
      throw NonFiniteError("initial state is non-finite");
    }
  }

  Trajectory traj;
  RunStats& stats = traj.stats;

  EnergyBreakdown e = breakdown(detail::energy_reduction(ws), lambda);
  stats.initial_d_lambda = e.d_lambda;
  stats.initial_e_lambda = e.e_lambda;
  const double dl0 = e.d_lambda;
  const double en0 = (variant == FlowVariant::DLambda) ? e.d_lambda : e.e_lambda;
  const double tol_mono = 1e-10 * en0;

  StepPolicy pol = config.policy;
  if (config.record_residuals && pol.mode == StepPolicy::Mode::AdaptiveCfl) {
    // Residual recording needs uniform steps; freeze dt at the initial value.
    pol.mode = StepPolicy::Mode::FixedDt;
    pol.dt = std::min(pol.cfl * pow4(pr.min_fx * h), pol.dt_max);
  }
  if (pol.mode == StepPolicy::Mode::FixedDt && T > 0.0 && !(pol.dt > 0.0))
    throw ConfigError("fixed-dt policy requires dt > 0");

  const double snap_interval = T / config.n_snapshots;
  double next_snap = snap_interval;
  traj.snapshots.push_back(state);

  double cum = 0.0;
  double prev_en = en0;

  auto update_step_aggregates = [&](const EnergyBreakdown& en, const PassResult& p,
                                    std::uint64_t k) {
    const BoundSlacks s = compute_slacks(en, dl0, lambda, cum);
    fold_min(stats.min_slacks, s);
    stats.min_fx = std::min(stats.min_fx, p.min_fx);
    const double ratio = p.max_fx / p.min_fx;
    stats.max_mesh_ratio = std::max(stats.max_mesh_ratio, ratio);
    stats.final_mesh_ratio = ratio;
    const double drop_ref = (variant == FlowVariant::DLambda) ? dl0 - en.d_lambda
                                                              : en0 - en.e_lambda;
    stats.cum_identity_excess =
        std::max(stats.cum_identity_excess, cum - drop_ref - tol_mono * static_cast<double>(k));
    stats.max_nabla_kappa_l2[0] =
        std::max(stats.max_nabla_kappa_l2[0], detail::l2_ds_norm(ws.nk1.data(), ws));
    stats.max_nabla_kappa_l2[1] =
        std::max(stats.max_nabla_kappa_l2[1], detail::l2_ds_norm(ws.nk2.data(), ws));
  };

  {
    stats.min_slacks = compute_slacks(e, dl0, lambda, cum);
    update_step_aggregates(e, pr, 0);
    DiagnosticsRecord r0 = make_record(ws, 0.0, 0.0, lambda, e, 0.0, cum, dl0, pr);
    stats.max_nabla_kappa_l2[2] = r0.nabla_kappa_l2[2];
    traj.records.push_back(r0);
  }

  Termination cause = Termination::ReachedHorizon;
  std::uint64_t k = 0;
  bool last_step = false;

  while (state.t < T && !last_step) {
    double dt = (pol.mode == StepPolicy::Mode::FixedDt)
                    ? pol.dt
                    : std::min(pol.cfl * pow4(pr.min_fx * h), pol.dt_max);
    if (!(dt > state.t * 1e-16 + 1e-300)) {
      // The step size underflowed: the grid has effectively collapsed.
      cause = Termination::DegenerateGrid;
      break;
    }
    if (state.t + dt >= T) {
      dt = T - state.t;
      last_step = true;
    }

    // Dissipation integral of the current state, before stages clobber ws.
    const double diss_prev = detail::dissipation_reduction(variant, lambda, ws);

    StageStatus st = advance_nodes(ws, ws.ycur.data(), dt, lambda, variant,
                                   config.integrator, eps_reg);
    if (!st.ok) {
      cause = st.cause;
      break;
    }
    pr = detail::geometry_pass(ws.ynew.data(), lambda, ws);
    st = check_pass(pr, eps_reg);
    if (!st.ok) {
      cause = st.cause;
      break;
    }

    // Accept.
    std::swap(ws.ycur, ws.ynew);
    state.t = last_step ? T : state.t + dt;
    ++k;

    e = breakdown(detail::energy_reduction(ws), lambda);
    cum += dt * diss_prev;
    const double en = (variant == FlowVariant::DLambda) ? e.d_lambda : e.e_lambda;
    const double diss_res =
        std::fabs((en - prev_en) / dt + diss_prev) / std::max(1.0, prev_en);

    const double rise = en - prev_en;
    if (rise > tol_mono) ++stats.energy_violations;
    stats.worst_energy_increase = std::max(stats.worst_energy_increase, rise);

    update_step_aggregates(e, pr, k);

    const bool record_now = last_step || (k % static_cast<std::uint64_t>(config.diag_every) == 0);
    if (record_now) {
      DiagnosticsRecord r = make_record(ws, state.t, dt, lambda, e, diss_res, cum, dl0, pr);
      stats.max_nabla_kappa_l2[2] = std::max(stats.max_nabla_kappa_l2[2], r.nabla_kappa_l2[2]);
      traj.records.push_back(r);
    }
    if (!last_step && state.t >= next_snap - 1e-12 * T) {
      detail::to_node_major(ws.ycur.data(), state.nodes.data(), N, dim);
      traj.snapshots.push_back(state);
      while (next_snap <= state.t + 1e-12 * T) next_snap += snap_interval;
    }
    prev_en = en;
  }

  detail::to_node_major(ws.ycur.data(), state.nodes.data(), N, dim);
  if (traj.snapshots.back().t < state.t) traj.snapshots.push_back(state);
  if (cause != Termination::ReachedHorizon && !traj.records.empty() &&
      traj.records.back().t < state.t) {
    // Re-derive geometry of the last accepted state so the tail of the
    // diagnostics stream describes it rather than the rejected attempt.
    pr = detail::geometry_pass(ws.ycur.data(), lambda, ws);
    traj.records.push_back(make_record(ws, state.t, 0.0, lambda, e, 0.0, cum, dl0, pr));
  }

  traj.termination = cause;
  stats.accepted_steps = k;
  stats.t_final = state.t;
  stats.final_d_lambda = e.d_lambda;
  stats.final_e_lambda = e.e_lambda;
  stats.cum_dissipation = cum;
  return traj;
}

}  // namespace curveflow
