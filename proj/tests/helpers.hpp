#pragma once

// Shared fixtures for the unit tests: analytic sample curves plus small
// comparison utilities. Frozen oracle constants quoted in the test files
// were computed with a 50-digit mpmath replica of the same stencils
// (periodic central differences, rectangle rule), so they pin the whole
// discrete pipeline, not just the continuum limit.

#include <cmath>
#include <utility>
#include <vector>

#include "curveflow/types.hpp"

namespace cf_test {

using curveflow::CurveState;

inline double grid_h(int n) { return curveflow::two_pi / n; }

// sin(h)/h: the factor by which the central difference damps the first
// Fourier mode. Exact discrete-circle fields are closed forms in it.
inline double sinc_h(int n) {
  double h = grid_h(n);
  return std::sin(h) / h;
}

inline CurveState make_circle(int n, double r, int dim = 2, double phase = 0.0) {
  std::vector<double> pts(static_cast<size_t>(n) * dim, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = grid_h(n) * i + phase;
    pts[static_cast<size_t>(i) * dim + 0] = r * std::cos(x);
    pts[static_cast<size_t>(i) * dim + 1] = r * std::sin(x);
  }
  return CurveState::make(0.0, dim, std::move(pts));
}

inline CurveState make_ellipse(int n, double a, double b) {
  std::vector<double> pts(static_cast<size_t>(n) * 2, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = grid_h(n) * i;
    pts[static_cast<size_t>(i) * 2 + 0] = a * std::cos(x);
    pts[static_cast<size_t>(i) * 2 + 1] = b * std::sin(x);
  }
  return CurveState::make(0.0, 2, std::move(pts));
}

// Circle of radius r traversed with a wobbling parameter speed: the image
// is exactly round but |f_x| oscillates between r(1-alpha) and r(1+alpha).
inline CurveState make_warped(int n, double r, double alpha) {
  std::vector<double> pts(static_cast<size_t>(n) * 2, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = grid_h(n) * i;
    double u = x + alpha * std::sin(x);
    pts[static_cast<size_t>(i) * 2 + 0] = r * std::cos(u);
    pts[static_cast<size_t>(i) * 2 + 1] = r * std::sin(u);
  }
  return CurveState::make(0.0, 2, std::move(pts));
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace cf_test
