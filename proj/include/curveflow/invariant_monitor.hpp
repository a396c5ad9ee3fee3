#pragma once

#include <array>
#include <string>
#include <vector>

#include "curveflow/energies.hpp"
#include "curveflow/grid_geometry.hpp"
#include "curveflow/types.hpp"

namespace curveflow {

struct PresetSpec;  // presets_io

/// Signed margins of the a-priori bound ladder; each is >= 0 in the continuum
/// and >= -bound_tolerance(h) discretely.
struct BoundSlacks {
  double poincare = 0.0;        // sqrt(L)||kappa|| - 2pi
  double length_cap = 0.0;      // 2 sqrt(pi D_l(0)/lambda) - L
  double kappa_cap = 0.0;       // 2 D_l(0) - ||kappa||^2
  double dirichlet_cap = 0.0;   // D_l(0)/lambda - D
  double cumulative_cap = 0.0;  // D_l(0) - cumulative dissipation
};

/// One row of the run diagnostics stream.
struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  EnergyBreakdown energies;
  double kappa_l2 = 0.0;                     // ||kappa||_L2(ds)
  std::array<double, 3> nabla_kappa_l2{};    // ||nabla_s^m kappa||, m = 1..3
  double phi_l2 = 0.0;
  double v_l2 = 0.0;
  double dissipation_residual = 0.0;  // of the step that produced this state
  double cum_dissipation = 0.0;
  double min_fx = 0.0;
  double max_fx = 0.0;
  double mesh_ratio = 0.0;
  BoundSlacks slacks;
  double kappa_tangential_residual = 0.0;  // max |<kappa, tau>|
};

/// Three consecutive states of a trajectory, equally spaced dt apart in time,
/// used by the identity checks that need a discrete time derivative.
struct Window3 {
  CurveState prev, mid, next;
  double dt = 0.0;
};

/// Relative defect of the energy dissipation identity between two consecutive
/// states dt apart: |(En(next) - En(prev))/dt + I(prev)| / max(1, En(prev)),
/// where for DLambda En = D_lambda and I = int (|V|^2 + phi^2) ds, and for
/// ELambda En = E_lambda and I = int |V|^2 ds. Expected O(dt) + O(h^2).
double dissipation_residual(const CurveState& prev, const CurveState& next, double lambda,
                            FlowVariant variant = FlowVariant::DLambda);

/// Max-norm defect of the length-element evolution law
/// d|f_x|/dt = (lambda/|f_x|)(|f_x|)_xx + lambda (|f_x|)_x (1/|f_x|)_x - <kappa,V>|f_x|,
/// evaluated at the window midpoint (DLambda flow).
double fx_pde_residual(const Window3& w, double lambda);

/// Max-norm defect of the tangential-speed evolution law
/// d(phi)/dt = lambda |f_x| phi_ss - lambda |f_x| (<kappa,V>)_s  (DLambda flow).
double phi_pde_residual(const Window3& w, double lambda);

/// Max-norm defects of the commutator identities at the window midpoint:
/// (a) d|f_x|/dt = (ds(phi) - <kappa,V>) |f_x|
/// (c) d(tau)/dt = nabla_s V + phi kappa
/// (e) d(kappa)/dt = ds(nabla_s V) + <kappa,V> kappa + phi ds(kappa)
struct LemformResiduals {
  double a = 0.0, c = 0.0, e = 0.0;
};
LemformResiduals lemform_residuals(const Window3& w, double lambda);

/// Same identities for an arbitrary motion: the caller supplies the normal
/// velocity V and tangential speed phi realized at the window midpoint.
LemformResiduals lemform_residuals(const Window3& w, const VectorField& velocity,
                                   const ScalarField& phi);

/// Max-norm defect of nabla_s(|f_x| kappa) = |f_x| nabla_s kappa + (phi/lambda) kappa.
double nablaw_residual(const CurveState& curve, double lambda);

/// Max-norm defect of f_xx = |f_x|^2 kappa + (phi/lambda)|f_x| tau.
double fxx_decomposition_residual(const CurveState& curve, double lambda);

/// Result of running one named residual check over a grid refinement ladder.
struct ResidualReport {
  std::string check;
  std::string preset;
  std::vector<int> grids;
  std::vector<double> residuals;
  double observed_order = 0.0;  // Richardson order from the finest grid pair
  double order_lo = 0.0;        // declared admissible window (0,0 => monotone rule)
  double order_hi = 0.0;
  std::string rule;  // "order-window" or "monotone-decrease"
  bool passed = false;
};

/// Names accepted by convergence_study / the check CLI.
const std::vector<std::string>& check_names();

/// Run one named check on a preset across grids (ascending, >= 2 entries for
/// the monotone rule, >= 3 for a meaningful order fit). Throws ConfigError
/// for unknown names or bad grids.
ResidualReport convergence_study(const std::string& check, const PresetSpec& preset,
                                 const std::vector<int>& grids, double lambda);

/// Build a 3-state window by stepping a preset with RK4 at fixed
/// dt = 0.05 (min|f_x| h)^4 after `warmup` steps (variant selectable).
Window3 make_window(const PresetSpec& preset, int nodes, int dim, double lambda,
                    FlowVariant variant, int warmup = 4);

}  // namespace curveflow
