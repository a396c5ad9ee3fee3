#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "curveflow/grid_geometry.hpp"
#include "helpers.hpp"

using namespace curveflow;
using namespace cf_test;

namespace {

ScalarField random_scalar(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField u(n);
  for (int i = 0; i < n; ++i) u[i] = dist(gen);
  return u;
}

VectorField random_vector(int n, int dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorField u(n, dim);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < dim; ++d) u.node(i)[d] = dist(gen);
  return u;
}

}  // namespace

TEST_CASE("central difference of a constant field is exactly zero") {
  const int n = 64;
  ScalarField u(n);
  for (int i = 0; i < n; ++i) u[i] = 3.7519;
  ScalarField d = dx(u, grid_h(n));
  for (int i = 0; i < n; ++i) CHECK(d[i] == 0.0);
}

TEST_CASE("central difference damps the first Fourier mode by sin(h)/h") {
  // (sin(x+h) - sin(x-h)) / (2h) = (sin h / h) cos x identically, so the
  // discrete derivative of the sampled sine is the sampled cosine scaled
  // by the sinc factor, up to rounding in the trig evaluations.
  const int n = 96;
  const double h = grid_h(n);
  ScalarField u(n);
  for (int i = 0; i < n; ++i) u[i] = std::sin(h * i);
  ScalarField d = dx(u, h);
  const double s = sinc_h(n);
  for (int i = 0; i < n; ++i) CHECK(std::abs(d[i] - s * std::cos(h * i)) <= 2e-14);
}

TEST_CASE("central difference commutes with grid shifts bitwise") {
  const int n = 80;
  const int shift = 13;
  ScalarField u = random_scalar(n, 42);
  ScalarField us(n);
  for (int i = 0; i < n; ++i) us[i] = u[(i + shift) % n];
  ScalarField d = dx(u, grid_h(n));
  ScalarField dsh = dx(us, grid_h(n));
  for (int i = 0; i < n; ++i) CHECK(dsh[i] == d[(i + shift) % n]);
}

TEST_CASE("summation by parts holds to rounding on the periodic grid") {
  const int n = 128;
  const double h = grid_h(n);
  ScalarField u = random_scalar(n, 1);
  ScalarField w = random_scalar(n, 2);
  ScalarField du = dx(u, h);
  ScalarField dw = dx(w, h);
  double sum = 0.0, telescoped = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += du[i] * w[i] + u[i] * dw[i];
    telescoped += du[i];
  }
  CHECK(std::abs(h * sum) <= 1e-13);
  CHECK(std::abs(h * telescoped) <= 1e-13);
}

TEST_CASE("vector and scalar central differences agree per component") {
  const int n = 48, dim = 3;
  VectorField u = random_vector(n, dim, 7);
  VectorField du = dx(u, grid_h(n));
  for (int d = 0; d < dim; ++d) {
    ScalarField comp(n);
    for (int i = 0; i < n; ++i) comp[i] = u.node(i)[d];
    ScalarField dc = dx(comp, grid_h(n));
    for (int i = 0; i < n; ++i) CHECK(du.node(i)[d] == dc[i]);
  }
}

TEST_CASE("arc-length derivative is the central difference over the length element") {
  const int n = 64;
  ScalarField u = random_scalar(n, 3);
  ScalarField fx(n);
  for (int i = 0; i < n; ++i) fx[i] = 1.0 + 0.3 * std::cos(grid_h(n) * i);
  ScalarField a = ds(u, fx, grid_h(n));
  ScalarField b = dx(u, grid_h(n));
  for (int i = 0; i < n; ++i) CHECK(a[i] == b[i] / fx[i]);
}

TEST_CASE("arc-length derivative rejects mismatched field sizes") {
  ScalarField u(64), fx(32);
  for (int i = 0; i < 32; ++i) fx[i] = 1.0;
  CHECK_THROWS_AS((void)ds(u, fx, grid_h(64)), ConfigError);
  VectorField v(64, 2);
  CHECK_THROWS_AS((void)ds(v, fx, grid_h(64)), ConfigError);
}

TEST_CASE("normal projection is orthogonal and idempotent") {
  const int n = 64;
  CurveState c = make_ellipse(n, 2.0, 1.0);
  GeometryCache g = geometry(c, 0.5);
  VectorField f = random_vector(n, 2, 11);
  VectorField p = normal_project(f, g.tau);
  VectorField pp = normal_project(p, g.tau);
  for (int i = 0; i < n; ++i) {
    double dot = p.node(i)[0] * g.tau.node(i)[0] + p.node(i)[1] * g.tau.node(i)[1];
    CHECK(std::abs(dot) <= 1e-14);
    CHECK(std::abs(pp.node(i)[0] - p.node(i)[0]) <= 1e-15);
    CHECK(std::abs(pp.node(i)[1] - p.node(i)[1]) <= 1e-15);
  }
}

TEST_CASE("discrete circle: length element and curvature magnitude are closed forms") {
  // On the sampled circle of radius r the discrete length element is
  // exactly r sin(h)/h at every node, and the discrete curvature vector is
  // exactly -e_r / r: the sinc factors of the two stencils cancel.
  for (double r : {1.0, 2.5}) {
    const int n = 128;
    CurveState c = make_circle(n, r);
    GeometryCache g = geometry(c, 0.5);
    const double want_fx = r * sinc_h(n);
    for (int i = 0; i < n; ++i) {
      CHECK(rel_err(g.fx[i], want_fx) <= 1e-14);
      double kn = std::hypot(g.kappa.node(i)[0], g.kappa.node(i)[1]);
      CHECK(rel_err(kn, 1.0 / r) <= 1e-13);
      // kappa points toward the center: negative dot with the position.
      double dot = g.kappa.node(i)[0] * c.node(i)[0] + g.kappa.node(i)[1] * c.node(i)[1];
      CHECK(dot < 0.0);
    }
    CHECK(rel_err(g.min_fx, want_fx) <= 1e-14);
    CHECK(rel_err(g.max_fx, want_fx) <= 1e-14);
  }
}

TEST_CASE("discrete circle: derived fields vanish to rounding") {
  const int n = 128;
  CurveState c = make_circle(n, 1.0);
  GeometryCache g = geometry(c, 0.5, 3);
  REQUIRE(g.nabla_kappa.size() == 3);
  for (int i = 0; i < n; ++i) {
    // Covariant curvature derivatives: each extra stencil divides the
    // trig rounding noise by another factor of h, hence the laddered
    // tolerances (the exact values are identically zero).
    CHECK(std::hypot(g.nabla_kappa[0].node(i)[0], g.nabla_kappa[0].node(i)[1]) <= 1e-12);
    CHECK(std::hypot(g.nabla_kappa[1].node(i)[0], g.nabla_kappa[1].node(i)[1]) <= 1e-10);
    CHECK(std::hypot(g.nabla_kappa[2].node(i)[0], g.nabla_kappa[2].node(i)[1]) <= 1e-8);
    CHECK(std::abs(g.phi[i]) <= 1e-12);
  }
  CHECK(qlemma_residual(c) <= 1e-12);
}

TEST_CASE("discrete circle: flow velocity is radial with closed-form magnitude") {
  // V = kappa (lambda |f_x| - |kappa|^2 / 2) = e_r (1/(2 r^3) - lambda sinc).
  const double lambda = 0.5;
  for (double r : {1.0, 2.0}) {
    const int n = 96;
    CurveState c = make_circle(n, r);
    GeometryCache g = geometry(c, lambda);
    const double mag = 1.0 / (2.0 * r * r * r) - lambda * sinc_h(n);
    for (int i = 0; i < n; ++i) {
      // The tolerance absorbs the rounding noise of the second covariant
      // derivative term, which two nested stencils amplify by 1/h^2.
      double x = grid_h(n) * i;
      CHECK(std::abs(g.velocity.node(i)[0] - mag * std::cos(x)) <= 1e-11);
      CHECK(std::abs(g.velocity.node(i)[1] - mag * std::sin(x)) <= 1e-11);
    }
  }
}

TEST_CASE("w field is the length element times the curvature vector") {
  const int n = 64;
  CurveState c = make_warped(n, 1.0, 0.3);
  GeometryCache g = geometry(c, 0.5);
  for (int i = 0; i < n; ++i) {
    CHECK(g.w.node(i)[0] == g.fx[i] * g.kappa.node(i)[0]);
    CHECK(g.w.node(i)[1] == g.fx[i] * g.kappa.node(i)[1]);
  }
}

TEST_CASE("dilation by two scales every geometric field exactly") {
  // Multiplying the curve by 2 changes only floating-point exponents, so
  // the scalings tau -> tau, |f_x| -> 2|f_x|, kappa -> kappa/2,
  // nabla^m kappa -> kappa / 2^{m+1}, phi -> phi, w -> w are bitwise exact.
  const int n = 64;
  CurveState c = make_ellipse(n, 2.0, 1.0);
  CurveState c2 = c;
  for (double& x : c2.nodes) x *= 2.0;
  GeometryCache g = geometry(c, 0.5, 3);
  GeometryCache g2 = geometry(c2, 0.5, 3);
  for (int i = 0; i < n; ++i) {
    CHECK(g2.fx[i] == 2.0 * g.fx[i]);
    CHECK(g2.phi[i] == g.phi[i]);
    for (int d = 0; d < 2; ++d) {
      CHECK(g2.tau.node(i)[d] == g.tau.node(i)[d]);
      CHECK(g2.kappa.node(i)[d] == 0.5 * g.kappa.node(i)[d]);
      CHECK(g2.nabla_kappa[0].node(i)[d] == 0.25 * g.nabla_kappa[0].node(i)[d]);
      CHECK(g2.nabla_kappa[1].node(i)[d] == 0.125 * g.nabla_kappa[1].node(i)[d]);
      CHECK(g2.nabla_kappa[2].node(i)[d] == 0.0625 * g.nabla_kappa[2].node(i)[d]);
      CHECK(g2.w.node(i)[d] == g.w.node(i)[d]);
    }
  }
}

TEST_CASE("rotating the curve rotates the geometry") {
  const int n = 64;
  const double th = 0.7;
  const double cth = std::cos(th), sth = std::sin(th);
  CurveState c = make_ellipse(n, 2.0, 1.0);
  CurveState cr = c;
  for (int i = 0; i < n; ++i) {
    double x = c.node(i)[0], y = c.node(i)[1];
    cr.node(i)[0] = cth * x - sth * y;
    cr.node(i)[1] = sth * x + cth * y;
  }
  GeometryCache g = geometry(c, 0.5);
  GeometryCache gr = geometry(cr, 0.5);
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(gr.fx[i] - g.fx[i]) <= 1e-13 * g.fx[i]);
    double kx = cth * g.kappa.node(i)[0] - sth * g.kappa.node(i)[1];
    double ky = sth * g.kappa.node(i)[0] + cth * g.kappa.node(i)[1];
    CHECK(std::abs(gr.kappa.node(i)[0] - kx) <= 1e-13);
    CHECK(std::abs(gr.kappa.node(i)[1] - ky) <= 1e-13);
  }
}

TEST_CASE("translating the curve leaves the scalar geometry nearly unchanged") {
  const int n = 64;
  CurveState c = make_warped(n, 1.0, 0.3);
  CurveState ct = c;
  for (int i = 0; i < n; ++i) {
    ct.node(i)[0] += 5.25;
    ct.node(i)[1] -= 2.75;
  }
  GeometryCache g = geometry(c, 0.5);
  GeometryCache gt = geometry(ct, 0.5);
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(gt.fx[i] - g.fx[i]) <= 1e-12);
    CHECK(std::abs(gt.phi[i] - g.phi[i]) <= 1e-11);
  }
}

TEST_CASE("tangential curvature residual converges at second order") {
  CurveState c64 = make_ellipse(64, 2.0, 1.0);
  CurveState c128 = make_ellipse(128, 2.0, 1.0);
  double q64 = qlemma_residual(c64);
  double q128 = qlemma_residual(c128);
  // Frozen 50-digit pipeline value at N=64.
  CHECK(rel_err(q64, 0.25380969971873767) <= 1e-10);
  CHECK(q64 / q128 == doctest::Approx(4.0).epsilon(0.12));
}

TEST_CASE("geometry rejects a collapsed grid") {
  const int n = 64;
  CurveState c = make_circle(n, 1.0);
  // Make nodes 0 and 2 coincide: the centered length element at node 1
  // vanishes identically.
  c.node(2)[0] = c.node(0)[0];
  c.node(2)[1] = c.node(0)[1];
  CHECK_THROWS_AS((void)geometry(c, 0.5), DegenerateGridError);
}

TEST_CASE("geometry rejects non-finite states ahead of degeneracy checks") {
  const int n = 64;
  CurveState c = make_circle(n, 1.0);
  c.node(5)[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)geometry(c, 0.5), NonFiniteError);
}

TEST_CASE("state validation rejects malformed inputs") {
  std::vector<double> ok(16 * 2, 0.0);
  CHECK_THROWS_AS((void)CurveState::make(0.0, 1, ok), ConfigError);       // dim < 2
  CHECK_THROWS_AS((void)CurveState::make(0.0, 2, std::vector<double>(6 * 2, 0.0)),
                  ConfigError);                                           // N < 8
  CHECK_THROWS_AS((void)CurveState::make(0.0, 2, std::vector<double>(9 * 2, 0.0)),
                  ConfigError);                                           // N odd
  CHECK_THROWS_AS((void)CurveState::make(0.0, 2, std::vector<double>(33, 0.0)),
                  ConfigError);                                           // ragged
  std::vector<double> nan_nodes(16 * 2, 0.0);
  nan_nodes[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS((void)CurveState::make(0.0, 2, nan_nodes), NonFiniteError);
}

TEST_CASE("number of covariant derivatives is selectable and validated") {
  CurveState c = make_circle(32, 1.0);
  CHECK(geometry(c, 0.5).nabla_kappa.size() == 2);
  CHECK(geometry(c, 0.5, 3).nabla_kappa.size() == 3);
  CHECK_THROWS_AS((void)geometry(c, 0.5, 1), ConfigError);
  CHECK_THROWS_AS((void)geometry(c, 0.5, 4), ConfigError);
}

TEST_CASE("geometry works in higher ambient dimension") {
  // Planar circle embedded in R^4: same closed forms, untouched zero planes.
  const int n = 64;
  CurveState c = make_circle(n, 1.5, 4);
  GeometryCache g = geometry(c, 0.5);
  const double want_fx = 1.5 * sinc_h(n);
  for (int i = 0; i < n; ++i) {
    CHECK(rel_err(g.fx[i], want_fx) <= 1e-14);
    CHECK(g.kappa.node(i)[2] == 0.0);
    CHECK(g.kappa.node(i)[3] == 0.0);
  }
}
