#pragma once

#include "curveflow/grid_geometry.hpp"
#include "curveflow/types.hpp"

namespace curveflow {

/// The functionals of one state, all via the periodic rectangle rule:
/// length L = h sum |f_x|, dirichlet D = h/2 sum |f_x|^2,
/// bending E = h/2 sum |kappa|^2 |f_x|, and the penalized combinations.
struct EnergyBreakdown {
  double length = 0.0;
  double dirichlet = 0.0;
  double bending = 0.0;
  double e_lambda = 0.0;  // bending + lambda * length
  double d_lambda = 0.0;  // bending + lambda * dirichlet
};

EnergyBreakdown energies(const GeometryCache& cache, double lambda);

/// sqrt(L) * ||kappa||_L2(ds) - 2*pi  (>= 0 in the continuum for closed curves).
double poincare_slack(const GeometryCache& cache);

/// 2*sqrt(pi*D) - L  (Cauchy-Schwarz; exact discretely up to rounding).
double length_domination_slack(const EnergyBreakdown& e);

/// h sum |dx(|f_x|)| + (h/(2*pi)) sum |f_x| - max_i |f_x|_i
/// (discrete form of the sup bound on the length element).
double sup_fx_embedding_slack(const GeometryCache& cache);

}  // namespace curveflow
