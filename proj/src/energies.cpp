#include "curveflow/energies.hpp"

#include <cmath>

namespace curveflow {

EnergyBreakdown energies(const GeometryCache& cache, double lambda) {
  const int n = cache.fx.size();
  double l = 0.0, d = 0.0, e = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = cache.fx[i];
    double ksq = 0.0;
    const double* k = cache.kappa.node(i);
    for (int c = 0; c < cache.kappa.dim; ++c) ksq += k[c] * k[c];
    l += s;
    d += s * s;
    e += ksq * s;
  }
  EnergyBreakdown out;
  out.length = cache.h * l;
  out.dirichlet = 0.5 * cache.h * d;
  out.bending = 0.5 * cache.h * e;
  out.e_lambda = out.bending + lambda * out.length;
  out.d_lambda = out.bending + lambda * out.dirichlet;
  return out;
}

double poincare_slack(const GeometryCache& cache) {
  const EnergyBreakdown e = energies(cache, 0.0);
  const double kappa_l2 = std::sqrt(2.0 * e.bending);
  return std::sqrt(e.length) * kappa_l2 - two_pi;
}

double length_domination_slack(const EnergyBreakdown& e) {
  return 2.0 * std::sqrt(std::numbers::pi * e.dirichlet) - e.length;
}

double sup_fx_embedding_slack(const GeometryCache& cache) {
  const int n = cache.fx.size();
  const ScalarField dfx = dx(cache.fx, cache.h);
  double tv = 0.0, mean = 0.0, mx = 0.0;
  for (int i = 0; i < n; ++i) {
    tv += std::fabs(dfx[i]);
    mean += cache.fx[i];
    if (cache.fx[i] > mx) mx = cache.fx[i];
  }
  return cache.h * tv + cache.h * mean / two_pi - mx;
}

}  // namespace curveflow
