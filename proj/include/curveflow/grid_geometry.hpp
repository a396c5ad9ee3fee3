#pragma once

#include <vector>

#include "curveflow/types.hpp"

namespace curveflow {

/// Everything the flow and the monitors need about one curve state, computed
/// in a single pass. Derivatives are second-order central differences on the
/// periodic grid; arc-length derivatives divide by |f_x| pointwise; covariant
/// derivatives additionally project off the tangential component.
struct GeometryCache {
  double h = 0.0;
  double lambda = 0.0;
  ScalarField fx;       // |f_x| per node
  VectorField tau;      // unit tangent f_x/|f_x|
  VectorField kappa;    // curvature vector ds(tau), kept unprojected
  std::vector<VectorField> nabla_kappa;  // nabla_s^m kappa for m = 1..m_max
  ScalarField phi;      // tangential speed lambda * (|f_x|)_s
  VectorField velocity; // V = -nabla_s^2 kappa - 1/2 |kappa|^2 kappa + lambda |f_x| kappa
  VectorField w;        // |f_x| * kappa
  double min_fx = 0.0;
  double max_fx = 0.0;
};

/// Central difference (u_{i+1} - u_{i-1}) / (2h), periodic indexing.
ScalarField dx(const ScalarField& u, double h);
VectorField dx(const VectorField& u, double h);

/// Arc-length derivative dx(u)_i / |f_x|_i.
ScalarField ds(const ScalarField& u, const ScalarField& fx, double h);
VectorField ds(const VectorField& u, const ScalarField& fx, double h);

/// Pointwise normal projection: field - <field, tau> tau.
VectorField normal_project(const VectorField& field, const VectorField& tau);

/// Full geometry of a state. m_max in {2, 3} chooses how many covariant
/// curvature derivatives are produced (the velocity always needs two).
/// Throws DegenerateGridError when min |f_x| collapses relative to its mean,
/// NonFiniteError when any derived value is NaN/inf.
GeometryCache geometry(const CurveState& curve, double lambda, int m_max = 2);

/// Max-norm residual of the tangential curvature identity
/// <ds(kappa), tau> + |kappa|^2 = 0 (pure discretization error, O(h^2)).
double qlemma_residual(const CurveState& curve);

}  // namespace curveflow
