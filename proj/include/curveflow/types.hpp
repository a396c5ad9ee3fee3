#pragma once

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace curveflow {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Tolerance under which a nodal field counts as normal (orthogonal to tau).
inline constexpr double tol_normal = 1e-10;

/// Relative collapse threshold: a grid is degenerate once
/// min_i |f_x|_i <= eps_reg_factor * (reference mean |f_x|).
inline constexpr double eps_reg_factor = 1e-12;

/// Absolute tolerance granted to the a-priori bound slacks at grid spacing h.
/// Covers the O(h^2) wiggle of second-order discretizations plus rounding.
inline double bound_tolerance(double h) { return 1e-8 + 10.0 * h * h; }

/// Which gradient flow drives the motion: the Dirichlet-penalized flow
/// (tangentially redistributing) or the length-penalized elastic flow.
enum class FlowVariant { DLambda, ELambda };

/// Explicit time integrators (the quartic CFL keeps them honest).
enum class Integrator { Euler, RK4 };

/// Why a run stopped.
enum class Termination { ReachedHorizon, DegenerateGrid, NonFinite };

// ---------------------------------------------------------------------------
// Error taxonomy. Everything thrown by the library derives from Error, so the
// C boundary can map exceptions onto stable status codes.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The grid lost regularity: some |f_x|_i reached numerical zero.
class DegenerateGridError : public Error {
 public:
  using Error::Error;
};

/// A NaN or infinity appeared in a state or a derived field.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration, preset parameters, or check name.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem-level failure while reading or writing artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Nodal fields on the uniform periodic grid x_i = 2*pi*i/N.
// ---------------------------------------------------------------------------

/// One scalar value per grid node.
struct ScalarField {
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(int n) : v(static_cast<size_t>(n), 0.0) {}

  int size() const { return static_cast<int>(v.size()); }
  double& operator[](int i) { return v[static_cast<size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

/// One R^dim value per grid node, flattened node-major.
struct VectorField {
  std::vector<double> v;
  int dim = 2;

  VectorField() = default;
  VectorField(int n, int d) : v(static_cast<size_t>(n) * d, 0.0), dim(d) {}

  int size() const { return dim > 0 ? static_cast<int>(v.size()) / dim : 0; }
  double* node(int i) { return v.data() + static_cast<size_t>(i) * dim; }
  const double* node(int i) const { return v.data() + static_cast<size_t>(i) * dim; }
};

/// Closed parametrized curve in R^dim sampled at the N uniform grid nodes.
struct CurveState {
  double t = 0.0;
  int dim = 2;
  std::vector<double> nodes;  // N*dim doubles, node-major

  int node_count() const { return dim > 0 ? static_cast<int>(nodes.size()) / dim : 0; }
  double h() const { return two_pi / node_count(); }
  double* node(int i) { return nodes.data() + static_cast<size_t>(i) * dim; }
  const double* node(int i) const { return nodes.data() + static_cast<size_t>(i) * dim; }

  /// Validating constructor: requires dim >= 2, even N >= 8, finite entries.
  static CurveState make(double t, int dim, std::vector<double> nodes);
};

}  // namespace curveflow
