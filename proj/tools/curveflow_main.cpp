// curveflow command-line front end. Talks to the library exclusively through
// the C API in curveflow.h so it doubles as a smoke test of that boundary.

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include <string>
#include <vector>

#include "curveflow.h"

namespace {

const char* kHelp =
    "curveflow - closed-curve elastic flow simulator\n"
    "\n"
    "usage:\n"
    "  curveflow run [options]              evolve a flow, write artifacts\n"
    "  curveflow check <name|all> [options] verify a discrete identity on the\n"
    "                                       grid ladder {N/2, N, 2N}\n"
    "  curveflow convergence <name|all> --grids N1,N2,... [options]\n"
    "                                       same, with an explicit ladder\n"
    "  curveflow presets                    list initial-curve presets\n"
    "  curveflow --help | --version\n"
    "\n"
    "run options:\n"
    "  --config FILE        JSON run description (flags below override it)\n"
    "  --preset NAME        initial curve (default circle)\n"
    "  --param K=V          preset parameter, repeatable (e.g. --param r=2)\n"
    "  --lambda X           penalization strength (default 0.5)\n"
    "  --nodes N            grid size, even, >= 8 (default 128)\n"
    "  --dim D              ambient dimension (default 2)\n"
    "  --flow NAME          d-lambda | e-lambda (default d-lambda)\n"
    "  --integrator NAME    rk4 | euler (default rk4)\n"
    "  --t-end T            time horizon (default 0)\n"
    "  --cfl X              adaptive step safety factor (default 0.1)\n"
    "  --dt X               fixed step size (disables the adaptive rule)\n"
    "  --dt-max X           cap for the adaptive step (default 1e-3)\n"
    "  --snapshots K        number of snapshot intervals (default 100)\n"
    "  --diag-every K       keep every K-th diagnostics row (default 1)\n"
    "  --record-residuals   freeze dt so step residuals are comparable\n"
    "  --seed S             seed for randomized presets (default 0)\n"
    "  --out DIR            output directory (default $CURVEFLOW_OUT or .)\n"
    "  --svg-every K        render every K-th snapshot as SVG (default off)\n"
    "\n"
    "check / convergence options:\n"
    "  --preset NAME        curve family to test (default warped_circle)\n"
    "  --param K=V          preset parameter, repeatable\n"
    "  --lambda X           penalization strength (default 0.5)\n"
    "  --nodes N            middle of the check ladder (default 128)\n"
    "  --grids N1,N2,...    explicit ladder (convergence only)\n"
    "\n"
    "exit codes: 0 success; 1 usage or configuration error; 2 a verification\n"
    "failed or the run stopped before t-end; 3 I/O failure.\n";

int exit_for(cf_status s) {
  switch (s) {
    case CF_OK:
      return 0;
    case CF_ERROR_CONFIG:
    case CF_ERROR_INVALID_ARGUMENT:
      return 1;
    case CF_ERROR_DEGENERATE:
    case CF_ERROR_NONFINITE:
      return 2;
    case CF_ERROR_IO:
      return 3;
    default:
      return 1;
  }
}

int fail(cf_status s, const char* what) {
  fprintf(stderr, "curveflow: %s: %s\n", what, cf_last_error());
  return exit_for(s);
}

int usage_error(const std::string& msg) {
  fprintf(stderr, "curveflow: %s\n(try 'curveflow --help')\n", msg.c_str());
  return 1;
}

struct Args {
  std::vector<std::string> v;
  size_t i = 0;

  bool done() const { return i >= v.size(); }
  const std::string& peek() const { return v[i]; }
  std::string next() { return v[i++]; }
};

/// --param K=V accumulated into a JSON object literal.
class ParamSet {
 public:
  bool add(const std::string& kv, std::string& err) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      err = "--param expects K=V, got '" + kv + "'";
      return false;
    }
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    char* end = nullptr;
    const double d = strtod(val.c_str(), &end);
    if (!end || *end || val.empty()) {
      err = "--param " + key + ": value '" + val + "' is not a number";
      return false;
    }
    char buf[64];
    snprintf(buf, sizeof buf, "%.17g", d);
    if (!body_.empty()) body_ += ",";
    body_ += "\"" + key + "\":" + buf;
    return true;
  }

  const char* json() const {
    joined_ = "{" + body_ + "}";
    return joined_.c_str();
  }

 private:
  std::string body_;
  mutable std::string joined_;
};

int cmd_run(Args& args) {
  cf_config* cfg = nullptr;
  cf_status s;

  // --config must be applied first so other flags can override it.
  std::string config_file;
  {
    Args scan = args;
    while (!scan.done()) {
      const std::string a = scan.next();
      if (a == "--config") {
        if (scan.done()) return usage_error("--config expects a file path");
        config_file = scan.next();
      }
    }
  }
  if (!config_file.empty())
    s = cf_config_load(config_file.c_str(), &cfg);
  else
    s = cf_config_create(&cfg);
  if (s != CF_OK) return fail(s, "loading configuration");

  auto set = [&](const char* key, const std::string& value) -> cf_status {
    return cf_config_set(cfg, key, value.c_str());
  };

  while (!args.done()) {
    const std::string a = args.next();
    auto value = [&](const char* flag) -> std::string {
      if (args.done()) {
        fprintf(stderr, "curveflow: %s expects a value\n", flag);
        exit(1);
      }
      return args.next();
    };
    s = CF_OK;
    if (a == "--config") {
      (void)value("--config");  // already applied
    } else if (a == "--preset") {
      s = set("preset", value("--preset"));
    } else if (a == "--param") {
      const std::string kv = value("--param");
      const size_t eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        cf_config_free(cfg);
        return usage_error("--param expects K=V, got '" + kv + "'");
      }
      s = set(("params." + kv.substr(0, eq)).c_str(), kv.substr(eq + 1));
    } else if (a == "--lambda") {
      s = set("lambda", value("--lambda"));
    } else if (a == "--nodes") {
      s = set("nodes", value("--nodes"));
    } else if (a == "--dim") {
      s = set("dim", value("--dim"));
    } else if (a == "--flow") {
      s = set("flow", value("--flow"));
    } else if (a == "--integrator") {
      s = set("integrator", value("--integrator"));
    } else if (a == "--t-end") {
      s = set("t_end", value("--t-end"));
    } else if (a == "--cfl") {
      s = set("policy.cfl", value("--cfl"));
      if (s == CF_OK) s = set("policy.mode", "adaptive-cfl");
    } else if (a == "--dt") {
      s = set("policy.dt", value("--dt"));
    } else if (a == "--dt-max") {
      s = set("policy.dt_max", value("--dt-max"));
    } else if (a == "--snapshots") {
      s = set("n_snapshots", value("--snapshots"));
    } else if (a == "--diag-every") {
      s = set("diag_every", value("--diag-every"));
    } else if (a == "--record-residuals") {
      s = set("record_residuals", "true");
    } else if (a == "--seed") {
      s = set("seed", value("--seed"));
    } else if (a == "--out") {
      s = set("out_dir", value("--out"));
    } else if (a == "--svg-every") {
      s = set("svg_every", value("--svg-every"));
    } else {
      cf_config_free(cfg);
      return usage_error("unknown run option '" + a + "'");
    }
    if (s != CF_OK) {
      const int code = fail(s, "applying options");
      cf_config_free(cfg);
      return code;
    }
  }

  cf_run_result* res = nullptr;
  s = cf_run(cfg, &res);
  cf_config_free(cfg);
  if (s != CF_OK) return fail(s, "running flow");

  char* text = nullptr;
  if (cf_run_summary(res, &text) == CF_OK && text) {
    fputs(text, stdout);
    cf_string_free(text);
  }
  const bool finished = strcmp(cf_run_termination(res), "reached-horizon") == 0;
  cf_run_result_free(res);
  if (!finished) {
    fprintf(stderr, "curveflow: run stopped before reaching t-end\n");
    return 2;
  }
  return 0;
}

int cmd_check(Args& args, bool explicit_grids) {
  if (args.done() || args.peek().rfind("--", 0) == 0)
    return usage_error("expected a check name (one of: " + std::string(cf_check_names()) +
                       ", all)");
  const std::string name = args.next();

  std::string preset = "warped_circle";
  ParamSet params;
  double lambda = 0.5;
  long nodes = 128;
  std::vector<int> grids;

  while (!args.done()) {
    const std::string a = args.next();
    auto value = [&](const char* flag) -> std::string {
      if (args.done()) {
        fprintf(stderr, "curveflow: %s expects a value\n", flag);
        exit(1);
      }
      return args.next();
    };
    if (a == "--preset") {
      preset = value("--preset");
    } else if (a == "--param") {
      std::string err;
      if (!params.add(value("--param"), err)) return usage_error(err);
    } else if (a == "--lambda") {
      const std::string v = value("--lambda");
      char* end = nullptr;
      lambda = strtod(v.c_str(), &end);
      if (!end || *end || v.empty()) return usage_error("--lambda expects a number");
    } else if (a == "--nodes" && !explicit_grids) {
      const std::string v = value("--nodes");
      char* end = nullptr;
      nodes = strtol(v.c_str(), &end, 10);
      if (!end || *end || v.empty()) return usage_error("--nodes expects an integer");
    } else if (a == "--grids" && explicit_grids) {
      std::string v = value("--grids");
      size_t pos = 0;
      while (pos < v.size()) {
        size_t comma = v.find(',', pos);
        if (comma == std::string::npos) comma = v.size();
        const std::string tok = v.substr(pos, comma - pos);
        char* end = nullptr;
        const long g = strtol(tok.c_str(), &end, 10);
        if (!end || *end || tok.empty())
          return usage_error("--grids expects a comma-separated list of integers");
        grids.push_back(static_cast<int>(g));
        pos = comma + 1;
      }
    } else {
      return usage_error("unknown option '" + a + "' for this command");
    }
  }

  if (!explicit_grids) {
    if (nodes < 16 || nodes % 2 != 0 || (nodes / 2) % 2 != 0)
      return usage_error("--nodes must be a multiple of 4 and >= 16 so the ladder "
                         "{N/2, N, 2N} stays valid");
    grids = {static_cast<int>(nodes / 2), static_cast<int>(nodes),
             static_cast<int>(nodes * 2)};
  } else if (grids.empty()) {
    return usage_error("convergence requires --grids N1,N2,...");
  }

  cf_report* rep = nullptr;
  const cf_status s = cf_check(name.c_str(), preset.c_str(), params.json(), grids.data(),
                               grids.size(), lambda, &rep);
  if (s != CF_OK) return fail(s, "running check");

  char* text = nullptr;
  if (cf_report_text(rep, &text) == CF_OK && text) {
    fputs(text, stdout);
    cf_string_free(text);
  }
  const bool passed = cf_report_passed(rep) == 1;
  cf_report_free(rep);
  if (!passed) {
    fprintf(stderr, "curveflow: verification FAILED\n");
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Args args;
  for (int i = 1; i < argc; ++i) args.v.emplace_back(argv[i]);

  if (args.done()) {
    fputs(kHelp, stdout);
    return 1;
  }
  const std::string cmd = args.next();
  if (cmd == "--help" || cmd == "-h" || cmd == "help") {
    fputs(kHelp, stdout);
    return 0;
  }
  if (cmd == "--version" || cmd == "version") {
    printf("curveflow %s\n", cf_version());
    return 0;
  }
  if (cmd == "run") return cmd_run(args);
  if (cmd == "check") return cmd_check(args, false);
  if (cmd == "convergence") return cmd_check(args, true);
  if (cmd == "presets") {
    fputs(cf_presets_text(), stdout);
    return 0;
  }
  return usage_error("unknown command '" + cmd + "'");
}
