#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "curveflow/energies.hpp"
#include "helpers.hpp"

using namespace curveflow;
using namespace cf_test;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("discrete circle energies match the sinc closed forms") {
  // With s = sin(h)/h the discrete functionals of the sampled circle of
  // radius r are exactly L = 2 pi r s, D = pi r^2 s^2, E = pi s / r.
  const double lambda = 0.7;
  for (double r : {1.0, 2.5}) {
    const int n = 128;
    const double s = sinc_h(n);
    GeometryCache g = geometry(make_circle(n, r), lambda);
    EnergyBreakdown e = energies(g, lambda);
    CHECK(rel_err(e.length, two_pi * r * s) <= 1e-13);
    CHECK(rel_err(e.dirichlet, kPi * r * r * s * s) <= 1e-13);
    CHECK(rel_err(e.bending, kPi * s / r) <= 1e-13);
    CHECK(rel_err(e.e_lambda, kPi * s / r + lambda * two_pi * r * s) <= 1e-13);
    CHECK(rel_err(e.d_lambda, kPi * s / r + lambda * kPi * r * r * s * s) <= 1e-13);
  }
}

TEST_CASE("ellipse energies match the 50-digit pipeline values") {
  struct Row {
    int n;
    double length, dirichlet, bending;
  };
  // Discrete (not continuum) values, frozen from the mpmath replica.
  const Row rows[] = {
      {64, 9.6728923806107139, 7.8287810661134949, 3.2786700992061680},
      {128, 9.6845578546802179, 7.8476754171742827, 3.3080299073415153},
      {256, 9.6874755411942045, 7.8524046998521237, 3.3155091352917569},
      {1024, 9.6883874263714520, 7.8538830681702208, 3.3178580806923862},
  };
  for (const Row& row : rows) {
    EnergyBreakdown e = energies(geometry(make_ellipse(row.n, 2.0, 1.0), 0.5), 0.5);
    CHECK(rel_err(e.length, row.length) <= 1e-12);
    CHECK(rel_err(e.dirichlet, row.dirichlet) <= 1e-12);
    CHECK(rel_err(e.bending, row.bending) <= 1e-11);
  }
}

TEST_CASE("ellipse length approaches the true perimeter at second order") {
  const double perimeter = 9.6884482205476762;  // elliptic-integral value
  EnergyBreakdown e256 = energies(geometry(make_ellipse(256, 2.0, 1.0), 0.5), 0.5);
  EnergyBreakdown e1024 = energies(geometry(make_ellipse(1024, 2.0, 1.0), 0.5), 0.5);
  double err256 = std::abs(e256.length - perimeter);
  double err1024 = std::abs(e1024.length - perimeter);
  CHECK(err1024 <= 1e-4 * perimeter);
  CHECK(err256 / err1024 == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("warped-circle energies match the 50-digit pipeline values") {
  EnergyBreakdown e = energies(geometry(make_warped(128, 1.0, 0.3), 0.5), 0.5);
  CHECK(rel_err(e.length, 6.2803220835779025) <= 1e-12);
  CHECK(rel_err(e.dirichlet, 3.2796405125593232) <= 1e-12);
  CHECK(rel_err(e.bending, 3.1401620804207091) <= 1e-11);
  CHECK(rel_err(e.d_lambda, 4.7799823367003707) <= 1e-11);

  // In the continuum D = pi (1 + alpha^2/2) and E = pi for this family;
  // at N=1024 the discrete values sit within the O(h^2) window of both.
  EnergyBreakdown f = energies(geometry(make_warped(1024, 1.0, 0.3), 0.5), 0.5);
  CHECK(std::abs(f.dirichlet - kPi * (1.0 + 0.045)) <= 1e-4);
  CHECK(std::abs(f.bending - kPi) <= 1e-4);
}

TEST_CASE("penalized energies combine the pieces exactly") {
  GeometryCache g = geometry(make_warped(64, 1.0, 0.3), 0.25);
  for (double lambda : {0.25, 1.0, 3.5}) {
    EnergyBreakdown e = energies(g, lambda);
    CHECK(e.e_lambda == e.bending + lambda * e.length);
    CHECK(e.d_lambda == e.bending + lambda * e.dirichlet);
  }
}

TEST_CASE("poincare slack of a discrete circle is exactly 2 pi (sinc - 1)") {
  // sqrt(L) ||kappa|| = sqrt(2 pi r s) sqrt(2 pi s / r) = 2 pi s, so the
  // discrete slack is slightly negative: 2 pi (s - 1) = -pi h^2/3 + O(h^4).
  // This is precisely the wiggle the h^2-shaped bound tolerance absorbs.
  for (int n : {64, 128}) {
    GeometryCache g = geometry(make_circle(n, 1.7), 0.5);
    double slack = poincare_slack(g);
    CHECK(rel_err(slack, two_pi * (sinc_h(n) - 1.0)) <= 1e-9);
    CHECK(slack < 0.0);
    CHECK(slack >= -bound_tolerance(grid_h(n)));
  }
}

TEST_CASE("poincare slack on the ellipse matches the pipeline values") {
  GeometryCache g64 = geometry(make_ellipse(64, 2.0, 1.0), 0.5);
  GeometryCache g1024 = geometry(make_ellipse(1024, 2.0, 1.0), 0.5);
  CHECK(rel_err(poincare_slack(g64), 1.6810124579625519) <= 1e-11);
  CHECK(rel_err(poincare_slack(g1024), 1.7348811070458573) <= 1e-11);
}

TEST_CASE("length domination slack vanishes on circles, is positive off them") {
  // On a circle 2 sqrt(pi D) = 2 sqrt(pi^2 r^2 s^2) = 2 pi r s = L exactly.
  GeometryCache gc = geometry(make_circle(128, 2.5), 0.5);
  CHECK(std::abs(length_domination_slack(energies(gc, 0.5))) <= 1e-12);

  GeometryCache ge = geometry(make_ellipse(128, 2.0, 1.0), 0.5);
  CHECK(length_domination_slack(energies(ge, 0.5)) > 0.2);

  GeometryCache gw = geometry(make_warped(128, 1.0, 0.3), 0.5);
  CHECK(rel_err(length_domination_slack(energies(gw, 0.5)), 0.13942698960925246) <= 1e-11);
}

TEST_CASE("length-element sup bound slack: zero on circles, analytic off them") {
  // Constant |f_x| makes the total-variation term vanish and mean = max;
  // what is left is the N-term accumulation noise of the rectangle rule.
  GeometryCache gc = geometry(make_circle(128, 1.3), 0.5);
  CHECK(std::abs(sup_fx_embedding_slack(gc)) <= 5e-12);

  // For |f_x| = 1 + 0.3 cos(x): TV = 1.2, mean = 1, max = 1.3 -> slack 0.9.
  GeometryCache gw = geometry(make_warped(128, 1.0, 0.3), 0.5);
  CHECK(rel_err(sup_fx_embedding_slack(gw), 0.89785516424502901) <= 1e-11);
  GeometryCache gw2 = geometry(make_warped(1024, 1.0, 0.3), 0.5);
  CHECK(std::abs(sup_fx_embedding_slack(gw2) - 0.9) <= 5e-4);
}

TEST_CASE("energies are invariant under grid rotation of the samples") {
  GeometryCache a = geometry(make_circle(64, 1.0, 2, 0.0), 0.5);
  GeometryCache b = geometry(make_circle(64, 1.0, 2, grid_h(64) * 9), 0.5);
  EnergyBreakdown ea = energies(a, 0.5);
  EnergyBreakdown eb = energies(b, 0.5);
  CHECK(rel_err(ea.length, eb.length) <= 1e-13);
  CHECK(rel_err(ea.bending, eb.bending) <= 1e-12);
}
