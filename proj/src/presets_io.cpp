#include "curveflow/presets_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace curveflow {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void bad_param(const std::string& preset, const std::string& what) {
  throw ConfigError("preset '" + preset + "': " + what);
}

double take_param(std::map<std::string, double>& params, const char* key, double def) {
  auto it = params.find(key);
  if (it == params.end()) return def;
  const double v = it->second;
  params.erase(it);
  return v;
}

long take_int_param(std::map<std::string, double>& params, const std::string& preset,
                    const char* key, long def) {
  auto it = params.find(key);
  if (it == params.end()) return def;
  const double v = it->second;
  params.erase(it);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e6)
    bad_param(preset, std::string("'") + key + "' must be a positive integer");
  return static_cast<long>(v);
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

CurveState make_preset(const PresetSpec& spec, int nodes, int dim, std::uint64_t seed) {
  if (dim < 2) throw ConfigError("ambient dimension must be >= 2");
  if (nodes < 8 || nodes % 2 != 0)
    throw ConfigError("node count must be an even integer >= 8");

  std::map<std::string, double> params = spec.params;
  double helix = 0.0;
  if (params.count("helix")) {
    if (dim < 3) bad_param(spec.name, "'helix' requires dim >= 3");
    helix = take_param(params, "helix", 0.0);
  }

  const int N = nodes;
  const double h = two_pi / N;
  std::vector<double> pts(static_cast<size_t>(N) * dim, 0.0);
  auto set_node = [&](int i, double x, double y) {
    pts[static_cast<size_t>(i) * dim] = x;
    pts[static_cast<size_t>(i) * dim + 1] = y;
  };

  if (spec.name == "circle") {
    const double r = take_param(params, "r", 1.0);
    if (!(r > 0.0)) bad_param(spec.name, "'r' must be positive");
    for (int i = 0; i < N; ++i) {
      const double x = h * i;
      set_node(i, r * std::cos(x), r * std::sin(x));
    }
  } else if (spec.name == "ellipse") {
    const double a = take_param(params, "a", 2.0);
    const double b = take_param(params, "b", 1.0);
    if (!(a > 0.0) || !(b > 0.0)) bad_param(spec.name, "'a' and 'b' must be positive");
    for (int i = 0; i < N; ++i) {
      const double x = h * i;
      set_node(i, a * std::cos(x), b * std::sin(x));
    }
  } else if (spec.name == "warped_circle") {
    const double r = take_param(params, "r", 1.0);
    const double alpha = take_param(params, "alpha", 0.3);
    if (!(r > 0.0)) bad_param(spec.name, "'r' must be positive");
    if (!(alpha >= 0.0 && alpha <= 0.9))
      bad_param(spec.name, "'alpha' must lie in [0, 0.9]");
    for (int i = 0; i < N; ++i) {
      const double x = h * i;
      const double u = x + alpha * std::sin(x);
      set_node(i, r * std::cos(u), r * std::sin(u));
    }
  } else if (spec.name == "perturbed_circle") {
    const double r = take_param(params, "r", 1.0);
    const double amp = take_param(params, "amp", 0.1);
    const long modes = take_int_param(params, spec.name, "modes", 3);
    if (!(r > 0.0)) bad_param(spec.name, "'r' must be positive");
    if (!(amp >= 0.0)) bad_param(spec.name, "'amp' must be >= 0");
    if (modes > N / 4) bad_param(spec.name, "'modes' must be <= nodes/4");
    double harmonic = 0.0;
    for (long k = 1; k <= modes; ++k) harmonic += 1.0 / static_cast<double>(k);
    if (!(amp * harmonic < 0.9 && amp * static_cast<double>(modes) < 0.9))
      bad_param(spec.name, "'amp' too large for this many modes (curve could degenerate)");

    std::mt19937_64 gen(seed);
    auto u11 = [&gen]() {
      // uniform in [-1, 1), 53-bit mantissa, engine-stable across platforms
      return 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
    };
    std::vector<double> ar(modes + 1), br(modes + 1), ct(modes + 1), dt(modes + 1);
    for (long k = 1; k <= modes; ++k) {
      const double scale = amp / (2.0 * static_cast<double>(k));
      ar[k] = scale * u11();
      br[k] = scale * u11();
      ct[k] = scale * u11();
      dt[k] = scale * u11();
    }
    for (int i = 0; i < N; ++i) {
      const double x = h * i;
      double rho = 1.0, u = x;
      for (long k = 1; k <= modes; ++k) {
        const double ck = std::cos(k * x), sk = std::sin(k * x);
        rho += ar[k] * ck + br[k] * sk;
        u += ct[k] * ck + dt[k] * sk;
      }
      set_node(i, r * rho * std::cos(u), r * rho * std::sin(u));
    }
  } else if (spec.name == "flower") {
    const double r0 = take_param(params, "r0", 2.0);
    const double amp = take_param(params, "amp", 1.0);
    const long lobes = take_int_param(params, spec.name, "lobes", 3);
    if (!(r0 > 0.0)) bad_param(spec.name, "'r0' must be positive");
    if (!(std::fabs(amp) < r0))
      bad_param(spec.name, "|amp| must be smaller than r0 (radius must stay positive)");
    for (int i = 0; i < N; ++i) {
      const double x = h * i;
      const double rho = r0 + amp * std::cos(static_cast<double>(lobes) * x);
      set_node(i, rho * std::cos(x), rho * std::sin(x));
    }
  } else {
    throw ConfigError("unknown preset '" + spec.name +
                      "' (known: circle, ellipse, warped_circle, perturbed_circle, flower)");
  }

  if (!params.empty())
    bad_param(spec.name, "unknown parameter '" + params.begin()->first + "'");

  if (helix != 0.0)
    for (int i = 0; i < N; ++i)
      pts[static_cast<size_t>(i) * dim + 2] = helix * std::sin(h * i);

  return CurveState::make(0.0, dim, std::move(pts));
}

std::string presets_description() {
  return
      "presets (parameters with defaults; all runs start at t = 0):\n"
      "  circle            r=1                radius-r circle\n"
      "  ellipse           a=2 b=1            axis-aligned ellipse\n"
      "  warped_circle     r=1 alpha=0.3      circle with tangentially bunched\n"
      "                                       nodes, u = x + alpha sin x\n"
      "  perturbed_circle  r=1 amp=0.1 modes=3  random radial+tangential Fourier\n"
      "                                       perturbation, coefficients drawn\n"
      "                                       deterministically from `seed`\n"
      "  flower            r0=2 amp=1 lobes=3 rho(x) = r0 + amp cos(lobes x)\n"
      "  any preset        helix=beta         (dim >= 3) adds beta sin x as the\n"
      "                                       third coordinate\n";
}

namespace {

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("config key '" + path + "' must be a number");
  return v.get<double>();
}

int require_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError("config key '" + path + "' must be an integer");
  return v.get<int>();
}

std::string require_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError("config key '" + path + "' must be a string");
  return v.get<std::string>();
}

bool require_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError("config key '" + path + "' must be a boolean");
  return v.get<bool>();
}

}  // namespace

FlowConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  FlowConfig c;
  bool saw_preset = false, saw_lambda = false, saw_nodes = false, saw_t_end = false;

  for (const auto& [key, val] : j.items()) {
    if (key == "preset") {
      c.preset.name = require_string(val, key);
      saw_preset = true;
    } else if (key == "params") {
      if (!val.is_object()) throw ConfigError("config key 'params' must be an object");
      for (const auto& [pk, pv] : val.items())
        c.preset.params[pk] = require_number(pv, "params." + pk);
    } else if (key == "lambda") {
      c.lambda = require_number(val, key);
      saw_lambda = true;
    } else if (key == "nodes") {
      c.nodes = require_int(val, key);
      saw_nodes = true;
    } else if (key == "dim") {
      c.dim = require_int(val, key);
    } else if (key == "flow") {
      const std::string s = require_string(val, key);
      if (s == "d-lambda")
        c.variant = FlowVariant::DLambda;
      else if (s == "e-lambda")
        c.variant = FlowVariant::ELambda;
      else
        throw ConfigError("config key 'flow' must be \"d-lambda\" or \"e-lambda\"");
    } else if (key == "integrator") {
      const std::string s = require_string(val, key);
      if (s == "rk4")
        c.integrator = Integrator::RK4;
      else if (s == "euler")
        c.integrator = Integrator::Euler;
      else
        throw ConfigError("config key 'integrator' must be \"rk4\" or \"euler\"");
    } else if (key == "policy") {
      if (!val.is_object()) throw ConfigError("config key 'policy' must be an object");
      for (const auto& [pk, pv] : val.items()) {
        if (pk == "mode") {
          const std::string s = require_string(pv, "policy.mode");
          if (s == "adaptive-cfl")
            c.policy.mode = StepPolicy::Mode::AdaptiveCfl;
          else if (s == "fixed-dt")
            c.policy.mode = StepPolicy::Mode::FixedDt;
          else
            throw ConfigError("policy.mode must be \"adaptive-cfl\" or \"fixed-dt\"");
        } else if (pk == "cfl") {
          c.policy.cfl = require_number(pv, "policy.cfl");
        } else if (pk == "dt") {
          c.policy.dt = require_number(pv, "policy.dt");
        } else if (pk == "dt_max") {
          c.policy.dt_max = require_number(pv, "policy.dt_max");
        } else {
          throw ConfigError("unknown config key 'policy." + pk + "'");
        }
      }
    } else if (key == "t_end") {
      c.t_end = require_number(val, key);
      saw_t_end = true;
    } else if (key == "n_snapshots") {
      c.n_snapshots = require_int(val, key);
    } else if (key == "diag_every") {
      c.diag_every = require_int(val, key);
    } else if (key == "record_residuals") {
      c.record_residuals = require_bool(val, key);
    } else if (key == "seed") {
      if (!val.is_number_unsigned() && !val.is_number_integer())
        throw ConfigError("config key 'seed' must be a non-negative integer");
      if (val.is_number_integer() && val.get<long long>() < 0)
        throw ConfigError("config key 'seed' must be a non-negative integer");
      c.seed = val.get<std::uint64_t>();
    } else if (key == "out_dir") {
      c.out_dir = require_string(val, key);
    } else if (key == "snapshots_file") {
      c.snapshots_file = require_string(val, key);
    } else if (key == "diagnostics_file") {
      c.diagnostics_file = require_string(val, key);
    } else if (key == "svg_every") {
      c.svg_every = require_int(val, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  if (!saw_preset) throw ConfigError("config is missing required key 'preset'");
  if (!saw_lambda) throw ConfigError("config is missing required key 'lambda'");
  if (!saw_nodes) throw ConfigError("config is missing required key 'nodes'");
  if (!saw_t_end) throw ConfigError("config is missing required key 't_end'");

  if (!(c.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (c.nodes < 8 || c.nodes % 2 != 0)
    throw ConfigError("nodes must be an even integer >= 8");
  if (c.dim < 2) throw ConfigError("dim must be >= 2");
  if (!(c.t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  if (c.n_snapshots < 1) throw ConfigError("n_snapshots must be >= 1");
  if (c.diag_every < 1) throw ConfigError("diag_every must be >= 1");
  if (c.svg_every < 0) throw ConfigError("svg_every must be >= 0");
  if (!(c.policy.cfl > 0.0)) throw ConfigError("policy.cfl must be positive");
  if (!(c.policy.dt_max > 0.0)) throw ConfigError("policy.dt_max must be positive");
  if (c.policy.mode == StepPolicy::Mode::FixedDt && !(c.policy.dt > 0.0))
    throw ConfigError("policy.dt must be positive when policy.mode is \"fixed-dt\"");
  return c;
}

FlowConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const FlowConfig& c) {
  ordered_json j;
  j["preset"] = c.preset.name;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : c.preset.params) params[k] = v;
  j["params"] = params;
  j["lambda"] = c.lambda;
  j["nodes"] = c.nodes;
  j["dim"] = c.dim;
  j["flow"] = (c.variant == FlowVariant::DLambda) ? "d-lambda" : "e-lambda";
  j["integrator"] = (c.integrator == Integrator::RK4) ? "rk4" : "euler";
  j["policy"] = {
      {"mode", c.policy.mode == StepPolicy::Mode::AdaptiveCfl ? "adaptive-cfl" : "fixed-dt"},
      {"cfl", c.policy.cfl},
      {"dt", c.policy.dt},
      {"dt_max", c.policy.dt_max}};
  j["t_end"] = c.t_end;
  j["n_snapshots"] = c.n_snapshots;
  j["diag_every"] = c.diag_every;
  j["record_residuals"] = c.record_residuals;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["snapshots_file"] = c.snapshots_file;
  j["diagnostics_file"] = c.diagnostics_file;
  j["svg_every"] = c.svg_every;
  return j.dump(2) + "\n";
}

void write_snapshots_jsonl(const std::string& path, const std::vector<CurveState>& snaps) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const CurveState& s : snaps) {
    ordered_json row;
    row["t"] = s.t;
    row["n"] = s.dim;
    row["N"] = s.node_count();
    ordered_json nodes = ordered_json::array();
    for (int i = 0; i < s.node_count(); ++i) {
      ordered_json pt = ordered_json::array();
      for (int d = 0; d < s.dim; ++d) pt.push_back(s.node(i)[d]);
      nodes.push_back(std::move(pt));
    }
    row["nodes"] = std::move(nodes);
    out << row.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<CurveState> read_snapshots_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open snapshots file '" + path + "'");
  std::vector<CurveState> snaps;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IoError("snapshots line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!row.is_object() || !row.contains("t") || !row.contains("n") ||
        !row.contains("N") || !row.contains("nodes") || !row["nodes"].is_array())
      throw IoError("snapshots line " + std::to_string(lineno) + ": malformed record");
    const double t = row["t"].get<double>();
    const int dim = row["n"].get<int>();
    const int n = row["N"].get<int>();
    if (static_cast<int>(row["nodes"].size()) != n)
      throw IoError("snapshots line " + std::to_string(lineno) + ": node count mismatch");
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(n) * dim);
    for (const auto& pt : row["nodes"]) {
      if (!pt.is_array() || static_cast<int>(pt.size()) != dim)
        throw IoError("snapshots line " + std::to_string(lineno) + ": bad node entry");
      for (const auto& c : pt) flat.push_back(c.get<double>());
    }
    try {
      snaps.push_back(CurveState::make(t, dim, std::move(flat)));
    } catch (const Error& e) {
      throw IoError("snapshots line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return snaps;
}

const char* const diagnostics_csv_header =
    "t,dt,L,D,E,E_lambda,D_lambda,kappa_l2,nk1,nk2,nk3,phi_l2,v_l2,diss_res,cum_diss,"
    "min_fx,max_fx,mesh_ratio,slack_poincare,slack_length,slack_kappa,slack_dirichlet,"
    "slack_cum,kappa_tan_res";

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << diagnostics_csv_header << '\n';
  std::string line;
  for (const DiagnosticsRecord& r : rows) {
    line.clear();
    const double cols[] = {r.t,
                           r.dt,
                           r.energies.length,
                           r.energies.dirichlet,
                           r.energies.bending,
                           r.energies.e_lambda,
                           r.energies.d_lambda,
                           r.kappa_l2,
                           r.nabla_kappa_l2[0],
                           r.nabla_kappa_l2[1],
                           r.nabla_kappa_l2[2],
                           r.phi_l2,
                           r.v_l2,
                           r.dissipation_residual,
                           r.cum_dissipation,
                           r.min_fx,
                           r.max_fx,
                           r.mesh_ratio,
                           r.slacks.poincare,
                           r.slacks.length_cap,
                           r.slacks.kappa_cap,
                           r.slacks.dirichlet_cap,
                           r.slacks.cumulative_cap,
                           r.kappa_tangential_residual};
    bool first = true;
    for (double c : cols) {
      if (!first) line += ',';
      line += shortest(c);
      first = false;
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string svg_render(const CurveState& curve) {
  const int n = curve.node_count();
  double minx = curve.node(0)[0], maxx = minx;
  double miny = -curve.node(0)[1], maxy = miny;
  for (int i = 0; i < n; ++i) {
    const double x = curve.node(i)[0];
    const double y = -curve.node(i)[1];  // SVG y grows downward
    minx = std::min(minx, x);
    maxx = std::max(maxx, x);
    miny = std::min(miny, y);
    maxy = std::max(maxy, y);
  }
  const double span = std::max({maxx - minx, maxy - miny, 1e-6});
  const double pad = 0.05 * span;
  const double w = (maxx - minx) + 2 * pad;
  const double ht = (maxy - miny) + 2 * pad;

  std::string d = "M ";
  for (int i = 0; i < n; ++i) {
    if (i > 0) d += " L ";
    d += shortest(curve.node(i)[0]);
    d += ' ';
    d += shortest(-curve.node(i)[1]);
  }
  d += " Z";

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
  svg += shortest(minx - pad);
  svg += ' ';
  svg += shortest(miny - pad);
  svg += ' ';
  svg += shortest(w);
  svg += ' ';
  svg += shortest(ht);
  svg += "\">\n  <path d=\"";
  svg += d;
  svg += "\" fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"";
  svg += shortest(0.01 * span);
  svg += "\" stroke-linejoin=\"round\"/>\n</svg>\n";
  return svg;
}

void write_svg(const std::string& path, const CurveState& curve) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << svg_render(curve);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace curveflow
