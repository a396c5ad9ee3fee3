// End-to-end tests of the command-line interface: the binary is driven as a
// subprocess (path in $CURVEFLOW_BIN) and judged only on its observable
// contract — output text, exit codes, artifacts on disk.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

std::string binary() {
  const char* p = std::getenv("CURVEFLOW_BIN");
  REQUIRE_MESSAGE(p != nullptr, "CURVEFLOW_BIN must point at the built binary");
  return p;
}

std::string data_dir() {
  const char* p = std::getenv("CF_TEST_DATA");
  REQUIRE_MESSAGE(p != nullptr, "CF_TEST_DATA must point at tests/data");
  return p;
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = binary() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  while (size_t got = fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "cf_cli_test";
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("--help matches the documented interface byte for byte") {
  const CliResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.output == slurp(std::filesystem::path(data_dir()) / "cli_help.txt"));
}

TEST_CASE("--version prints the library version") {
  const CliResult r = run_cli("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "curveflow 0.1.0\n");
}

TEST_CASE("unknown commands and options are usage errors") {
  const CliResult r = run_cli("frobnicate");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("frobnicate") != std::string::npos);
  CHECK(r.output.find("--help") != std::string::npos);

  const CliResult r2 = run_cli("run --warp-factor 9");
  CHECK(r2.exit_code == 1);

  const CliResult r3 = run_cli("run --nodes banana");
  CHECK(r3.exit_code == 1);
}

TEST_CASE("a passing verification exits 0 and says so") {
  const CliResult r = run_cli("check qlemma --preset circle --nodes 32");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("qlemma on circle") != std::string::npos);
  CHECK(r.output.find("pass") != std::string::npos);
}

TEST_CASE("a failing verification exits 2 with the measured orders") {
  // The coarse ladder {8,16,32} under-resolves the three-lobed flower, so
  // the residuals cannot shrink at second order yet; the check must say so.
  const CliResult r = run_cli("check lemform_e --preset flower --nodes 16");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("FAIL") != std::string::npos);
  CHECK(r.output.find("observed order") != std::string::npos);
}

TEST_CASE("run writes the advertised artifacts") {
  const TempDir tmp;
  const CliResult r =
      run_cli("run --preset circle --t-end 0 --out " + tmp.path.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("reached-horizon") != std::string::npos);
  CHECK(std::filesystem::exists(tmp.path / "snapshots.jsonl"));
  CHECK(std::filesystem::exists(tmp.path / "diagnostics.csv"));

  // The summary names the files it wrote.
  CHECK(r.output.find("snapshots.jsonl") != std::string::npos);
  CHECK(r.output.find("diagnostics.csv") != std::string::npos);
}

TEST_CASE("a run that stops before the horizon exits 2") {
  const TempDir tmp;
  // The quartic step rule underflows on a curve this small: the run reports
  // a degenerate grid instead of spinning forever.
  const CliResult r = run_cli("run --preset circle --param r=1e-76 --t-end 1 --out " +
                              tmp.path.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("degenerate") != std::string::npos);
}

TEST_CASE("missing configuration files exit 3") {
  const CliResult r = run_cli("run --config definitely_missing.json");
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("definitely_missing.json") != std::string::npos);
}

TEST_CASE("config file and flag overrides cooperate") {
  const TempDir tmp;
  const std::filesystem::path cfg = tmp.path / "run.json";
  {
    std::ofstream out(cfg);
    out << R"({"preset":"circle","params":{"r":2.0},"lambda":0.5,"nodes":32,"t_end":0.0})";
  }
  // The flag overrides the file's node count; the run must accept both.
  const CliResult r = run_cli("run --config " + cfg.string() + " --nodes 64 --out " +
                              tmp.path.string());
  CHECK(r.exit_code == 0);
  const std::string snaps = slurp(tmp.path / "snapshots.jsonl");
  CHECK(snaps.find("\"N\":64") != std::string::npos);
}

TEST_CASE("presets listing names every family") {
  const CliResult r = run_cli("presets");
  CHECK(r.exit_code == 0);
  for (const char* name : {"circle", "ellipse", "warped_circle", "perturbed_circle", "flower"})
    CHECK(r.output.find(name) != std::string::npos);
}
