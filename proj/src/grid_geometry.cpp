#include "curveflow/grid_geometry.hpp"

#include <cmath>

#include "geometry_kernels.hpp"

namespace curveflow {

CurveState CurveState::make(double t, int dim, std::vector<double> nodes) {
  if (dim < 2) throw ConfigError("ambient dimension must be >= 2");
  if (nodes.empty() || nodes.size() % static_cast<size_t>(dim) != 0)
    throw ConfigError("node array length must be a positive multiple of dim");
  const int n = static_cast<int>(nodes.size()) / dim;
  if (n < 8 || n % 2 != 0) throw ConfigError("node count must be an even integer >= 8");
  for (double c : nodes)
    if (!std::isfinite(c)) throw NonFiniteError("curve nodes contain a non-finite coordinate");
  CurveState s;
  s.t = t;
  s.dim = dim;
  s.nodes = std::move(nodes);
  return s;
}

ScalarField dx(const ScalarField& u, double h) {
  ScalarField out(u.size());
  detail::dx_stream(u.v.data(), out.v.data(), u.size(), 1.0 / (2.0 * h));
  return out;
}

VectorField dx(const VectorField& u, double h) {
  VectorField out(u.size(), u.dim);
  const int N = u.size(), dim = u.dim;
  const double inv_2h = 1.0 / (2.0 * h);
  const double* in = u.v.data();
  double* o = out.v.data();
  const int stride = dim;
  const int last = (N - 1) * dim;
  for (int j = stride; j < last; ++j) o[j] = inv_2h * (in[j + stride] - in[j - stride]);
  for (int d = 0; d < dim; ++d) {
    o[d] = inv_2h * (in[stride + d] - in[last + d]);
    o[last + d] = inv_2h * (in[d] - in[last - stride + d]);
  }
  return out;
}

ScalarField ds(const ScalarField& u, const ScalarField& fx, double h) {
  if (u.size() != fx.size()) throw ConfigError("ds: field and |f_x| sizes differ");
  ScalarField out = dx(u, h);
  for (int i = 0; i < out.size(); ++i) out[i] /= fx[i];
  return out;
}

VectorField ds(const VectorField& u, const ScalarField& fx, double h) {
  if (u.size() != fx.size()) throw ConfigError("ds: field and |f_x| sizes differ");
  VectorField out = dx(u, h);
  for (int i = 0; i < out.size(); ++i) {
    double* o = out.node(i);
    for (int d = 0; d < out.dim; ++d) o[d] /= fx[i];
  }
  return out;
}

VectorField normal_project(const VectorField& field, const VectorField& tau) {
  if (field.size() != tau.size() || field.dim != tau.dim)
    throw ConfigError("normal_project: field and tau shapes differ");
  VectorField out(field.size(), field.dim);
  for (int i = 0; i < field.size(); ++i) {
    const double* u = field.node(i);
    const double* t = tau.node(i);
    double* o = out.node(i);
    double dot = 0.0;
    for (int d = 0; d < field.dim; ++d) dot += u[d] * t[d];
    for (int d = 0; d < field.dim; ++d) o[d] = u[d] - dot * t[d];
  }
  return out;
}

namespace {

/// Kernel buffers are component-major; the public value types are node-major.
void copy_vec(const std::vector<double>& src, VectorField& dst, int n, int dim) {
  dst.dim = dim;
  dst.v.resize(static_cast<size_t>(n) * dim);
  detail::to_node_major(src.data(), dst.v.data(), n, dim);
}

void copy_scal(const std::vector<double>& src, ScalarField& dst, int n) {
  dst.v.assign(src.begin(), src.begin() + n);
}

}  // namespace

GeometryCache geometry(const CurveState& curve, double lambda, int m_max) {
  if (m_max < 2 || m_max > 3)
    throw ConfigError("geometry: m_max must be 2 or 3");
  const int n = curve.node_count();
  const int dim = curve.dim;
  if (n < 8 || n % 2 != 0) throw ConfigError("node count must be an even integer >= 8");

  detail::Workspace ws;
  ws.resize(n, dim);
  detail::to_component_major(curve.nodes.data(), ws.ycur.data(), n, dim);
  const detail::PassResult pr = detail::geometry_pass(ws.ycur.data(), lambda, ws);
  const double mean_fx = pr.sum_fx / n;
  if (!pr.finite) throw NonFiniteError("geometry produced non-finite values");
  if (!(pr.min_fx > eps_reg_factor * mean_fx))
    throw DegenerateGridError("grid degenerate: min |f_x| collapsed to numerical zero");

  GeometryCache cache;
  cache.h = ws.h;
  cache.lambda = lambda;
  cache.min_fx = pr.min_fx;
  cache.max_fx = pr.max_fx;
  copy_scal(ws.fx, cache.fx, n);
  copy_vec(ws.tau, cache.tau, n, dim);
  copy_vec(ws.kappa, cache.kappa, n, dim);
  cache.nabla_kappa.resize(static_cast<size_t>(m_max));
  copy_vec(ws.nk1, cache.nabla_kappa[0], n, dim);
  copy_vec(ws.nk2, cache.nabla_kappa[1], n, dim);
  if (m_max >= 3) {
    detail::nabla3_pass(ws, ws.tmp.data());
    copy_vec(ws.tmp, cache.nabla_kappa[2], n, dim);
  }
  copy_scal(ws.phi, cache.phi, n);
  copy_vec(ws.vel, cache.velocity, n, dim);
  cache.w.dim = dim;
  cache.w.v.resize(static_cast<size_t>(n) * dim);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < dim; ++d)
      cache.w.v[static_cast<size_t>(i) * dim + d] =
          ws.fx[i] * cache.kappa.v[static_cast<size_t>(i) * dim + d];
  return cache;
}

double qlemma_residual(const CurveState& curve) {
  const GeometryCache g = geometry(curve, 0.0, 2);
  const VectorField dsk = ds(g.kappa, g.fx, g.h);
  double worst = 0.0;
  for (int i = 0; i < curve.node_count(); ++i) {
    // <ds kappa, tau> should equal -|kappa|^2; equivalently
    // ds(kappa) - (nabla kappa - |kappa|^2 tau) has only this tangential part.
    double dot = 0.0, ksq = 0.0;
    const double* t = g.tau.node(i);
    const double* k = g.kappa.node(i);
    const double* dk = dsk.node(i);
    for (int d = 0; d < curve.dim; ++d) {
      dot += dk[d] * t[d];
      ksq += k[d] * k[d];
    }
    const double r = std::fabs(dot + ksq);
    if (r > worst) worst = r;
  }
  return worst;
}

}  // namespace curveflow
