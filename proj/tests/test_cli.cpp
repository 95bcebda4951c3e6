#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "dunesim/cli.hpp"
#include "dunesim/dsf.hpp"

using namespace dunesim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  REQUIRE(static_cast<bool>(in));
  return buf.str();
}

fs::path fresh_dir(const std::string& leaf) {
  const fs::path d = fs::temp_directory_path() / "dunesim_test_cli" / leaf;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

bool has_error(const ConfigError& e, const std::string& needle) {
  for (const auto& msg : e.errors)
    if (msg.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal config parses with defaults filled") {
  const RunConfig cfg = parse_config(
      "[run]\n"
      "command = simulate\n"
      "eps = 0.2\n"
      "[preset]\n"
      "name = tidal-short\n");
  CHECK(cfg.command == "simulate");
  CHECK(cfg.eps == 0.2);
  CHECK(cfg.T_final == 0.5);
  CHECK(cfg.n == 32);
  CHECK(cfg.tol == 1e-9);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.seed == 0);
  CHECK(cfg.preset.regime == Regime::Short);
  CHECK_FALSE(cfg.has_z0_constant);
}

TEST_CASE("value and key errors carry line numbers") {
  try {
    parse_config(
        "[run]\n"
        "command = simulate\n"
        "eps = -0.1\n"
        "[solver]\n"
        "toll = 1e-9\n"
        "[preset]\n"
        "name = tidal-short\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_error(e, "line 3: eps must be positive"));
    CHECK(has_error(e, "line 5: unknown key 'toll'"));
  }
  CHECK_THROWS_AS(parse_config("command = simulate\n"), ConfigError);  // no section
  CHECK_THROWS_AS(parse_config("[orbit]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(
      parse_config("[run]\ncommand = simulate\ncommand = cell\n"
                   "[preset]\nname = tidal-short\n"),
      ConfigError);  // duplicate
  CHECK_THROWS_AS(parse_config("[run]\njust some text\n"), ConfigError);
  try {
    parse_config("[run]\neps = 0.1\n[preset]\nname = tidal-short\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_error(e, "missing required key: command"));
  }
}

TEST_CASE("short ladders are rejected at parse") {
  try {
    parse_config(
        "[run]\n"
        "command = verify\n"
        "eps_ladder = 0.2 0.1\n"
        "[preset]\n"
        "name = drift-mean\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_error(e, "ladder needs >= 3"));
    CHECK(has_error(e, "line 3"));
  }
  CHECK_THROWS_AS(parse_config("[run]\ncommand = verify\n"
                               "eps_ladder = 0.05 0.1 0.2\n"
                               "[preset]\nname = drift-mean\n"),
                  ConfigError);  // increasing
  CHECK_THROWS_AS(parse_config("[run]\ncommand = verify\n"
                               "[preset]\nname = drift-mean\n"),
                  ConfigError);  // ladder missing entirely
}

TEST_CASE("command and preset compatibility is validated") {
  auto cfg_text = [](const std::string& cmd, const std::string& preset,
                     const std::string& extra = "") {
    return "[run]\ncommand = " + cmd + "\n[preset]\nname = " + preset + "\n" +
           extra;
  };
  CHECK_THROWS_AS(parse_config(cfg_text("homogenize", "tidal-short")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(cfg_text("corrector", "tidal-mean")),
                  ConfigError);  // thresholded law
  CHECK_THROWS_AS(parse_config(cfg_text("corrector", "tidal-long")),
                  ConfigError);  // wrong regime
  CHECK_THROWS_AS(
      parse_config("[run]\ncommand = verify\neps_ladder = 0.2 0.1 0.05\n"
                   "[preset]\nname = tidal-short\n"),
      ConfigError);  // short-regime verify needs c = 0
  CHECK_THROWS_AS(
      parse_config(cfg_text("simulate", "tidal-short",
                            "[solver]\nnu_schedule = 1e-1 1e-2\n")),
      ConfigError);  // cell-only key
  CHECK_THROWS_AS(
      parse_config(cfg_text("simulate", "tidal-short", "[solver]\nt = 0.5\n")),
      ConfigError);
  CHECK_THROWS_AS(parse_config(cfg_text("simulate", "no-such-preset")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(cfg_text("teleport", "tidal-short")),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config("[run]\ncommand = verify\neps_ladder = 0.2 0.1 0.05\n"
                   "[preset]\nname = tidal-long\n"
                   "[solver]\nwell_prepared = true\n"),
      ConfigError);  // well-prepared start is mean-only
  // Initial-height override makes no sense for coefficient-only commands.
  CHECK_THROWS_AS(
      parse_config("[run]\ncommand = hypotheses\nz0_constant = 2\n"
                   "[preset]\nname = tidal-short\n"),
      ConfigError);
}

TEST_CASE("preset overrides reach the resolved preset") {
  const RunConfig cfg = parse_config(
      "[run]\n"
      "command = simulate\n"
      "[preset]\n"
      "name = tidal-short\n"
      "b = 0.99\n"
      "g0 = 0.31\n"
      "u_thr = 0.1\n");
  CHECK(cfg.preset.b == 0.99);
  CHECK(cfg.preset.law.g0 == 0.31);
  CHECK(cfg.preset.law.u_thr == 0.1);
  CHECK(cfg.overrides.size() == 3);
  CHECK_THROWS_AS(parse_config("[run]\ncommand = simulate\n"
                               "[preset]\nname = tidal-short\nbb = 0.5\n"),
                  ConfigError);
}

TEST_CASE("serialization round-trips to an equal config") {
  const std::string text =
      "[run]\n"
      "command = cell\n"
      "eps = 0.125\n"
      "T_final = 0.75\n"
      "seed = 12345\n"
      "out = some/dir\n"
      "[grid]\n"
      "n = 24\n"
      "theta_nodes = 48\n"
      "[preset]\n"
      "name = gapped-long\n"
      "w0 = 1.5\n"
      "amp_m = 0.17\n"
      "[solver]\n"
      "tol = 1e-07\n"
      "nu_schedule = 0.2 0.05 0.003\n"
      "t = 0.33\n"
      "tau = 0.5\n";
  const RunConfig a = parse_config(text);
  const std::string canon = serialize_config(a);
  const RunConfig b = parse_config(canon);
  CHECK(serialize_config(b) == canon);
  CHECK(b.command == a.command);
  CHECK(b.eps == a.eps);
  CHECK(b.T_final == a.T_final);
  CHECK(b.seed == a.seed);
  CHECK(b.out_dir == a.out_dir);
  CHECK(b.n == a.n);
  CHECK(b.theta_nodes == a.theta_nodes);
  CHECK(b.preset_name == a.preset_name);
  CHECK(b.overrides == a.overrides);
  CHECK(b.nu_schedule == a.nu_schedule);
  CHECK(b.slice_t == a.slice_t);
  CHECK(b.slice_tau == a.slice_tau);
  CHECK(b.preset.w0 == 1.5);
  // Verify-shaped configs round-trip the ladder.
  const RunConfig v = parse_config(
      "[run]\ncommand = verify\neps_ladder = 0.2 0.1 0.05\n"
      "[preset]\nname = drift-mean\n"
      "[solver]\nwell_prepared = true\n");
  const RunConfig v2 = parse_config(serialize_config(v));
  CHECK(v2.eps_ladder == v.eps_ladder);
  CHECK(v2.well_prepared);
  CHECK(serialize_config(v2) == serialize_config(v));
}

TEST_CASE("hypotheses pipeline writes a complete digest manifest") {
  const fs::path out = fresh_dir("hyp");
  RunConfig cfg = parse_config(
      "[run]\ncommand = hypotheses\neps = 0.1\n"
      "[grid]\nn = 16\ntheta_nodes = 8\ntau_nodes = 2\nt_intervals = 4\n"
      "[preset]\nname = tidal-long\n");
  cfg.out_dir = out.string();
  const RunReport rep = run_config(cfg);
  CHECK(rep.exit_code == 0);
  CHECK(rep.all_pass());
  double gamma = 0.0;
  for (const auto& [id, v] : rep.constants)
    if (id == "gamma") gamma = v;
  CHECK(gamma > 0.0);
  CHECK(fs::exists(out / "hypotheses.csv"));
  CHECK(fs::exists(out / "report.csv"));
  CHECK(fs::exists(out / "config.cfg"));
  CHECK(fs::exists(out / "manifest.csv"));
  // Manifest covers every file in the directory except itself.
  std::set<std::string> on_disk, listed;
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.is_regular_file()) {
      const std::string rel = fs::relative(e.path(), out).generic_string();
      if (rel != "manifest.csv") on_disk.insert(rel);
    }
  for (const auto& m : rep.manifest) {
    listed.insert(m.path);
    CHECK(m.digest.size() == 16);
  }
  CHECK(on_disk == listed);
  // The CSV on disk matches the in-memory manifest.
  const std::string mf = slurp(out / "manifest.csv");
  CHECK(mf.rfind("path,fnv1a64\n", 0) == 0);
  for (const auto& m : rep.manifest)
    CHECK(mf.find(m.path + "," + m.digest + "\n") != std::string::npos);
}

TEST_CASE("transport-free simulate conserves mass exactly and reruns "
          "byte-identically") {
  const fs::path out = fresh_dir("sim");
  RunConfig cfg = parse_config(
      "[run]\ncommand = simulate\neps = 0.2\nT_final = 0.05\n"
      "z0_constant = 2\n"
      "[grid]\nn = 16\n"
      "[preset]\nname = uniform-short\n");
  cfg.out_dir = out.string();
  const RunReport rep = run_config(cfg);
  CHECK(rep.exit_code == 0);
  bool saw = false;
  for (const auto& c : rep.checks)
    if (c.id == "mass_conservation") {
      saw = true;
      CHECK(c.pass);
      CHECK(c.value == 0.0);
    }
  CHECK(saw);
  const auto snaps = read_dsf1((out / "fields" / "trajectory.dsf1").string());
  REQUIRE(!snaps.empty());
  CHECK(snaps[0].grid.n == 16);
  for (double v : snaps.back().v) CHECK(v == 2.0);
  const std::string series1 = slurp(out / "series.csv");
  const std::string report1 = slurp(out / "report.csv");
  const std::string manifest1 = slurp(out / "manifest.csv");
  CHECK(series1.rfind("step,t,mass,l2\n", 0) == 0);
  // Re-run with the identical config into the same directory.
  const RunReport rep2 = run_config(cfg);
  CHECK(rep2.exit_code == 0);
  CHECK(slurp(out / "series.csv") == series1);
  CHECK(slurp(out / "report.csv") == report1);
  CHECK(slurp(out / "manifest.csv") == manifest1);
}

TEST_CASE("homogenize pipeline emits labels and passes profile checks") {
  const fs::path out = fresh_dir("hom");
  RunConfig cfg = parse_config(
      "[run]\ncommand = homogenize\neps = 0.1\nT_final = 0.2\n"
      "[grid]\nn = 16\ntheta_nodes = 8\nt_intervals = 2\n"
      "[preset]\nname = tidal-long\n");
  cfg.out_dir = out.string();
  const RunReport rep = run_config(cfg);
  CHECK(rep.exit_code == 0);
  for (const auto& c : rep.checks) CHECK(c.pass);
  CHECK(fs::exists(out / "labels.csv"));
  CHECK(fs::exists(out / "fields" / "longterm_t000.dsf1"));
  CHECK(fs::exists(out / "fields" / "manifest.csv"));
  const auto slices = read_dsf1((out / "fields" / "longterm_t000.dsf1").string());
  CHECK(slices.size() == 8);
  const std::string labels = slurp(out / "labels.csv");
  CHECK(labels.rfind("index_t,t,index_theta,theta,class\n", 0) == 0);
}

TEST_CASE("step-budget exhaustion is reported as a solver failure") {
  const fs::path out = fresh_dir("fail");
  RunConfig cfg = parse_config(
      "[run]\ncommand = simulate\neps = 0.2\nT_final = 0.5\n"
      "[grid]\nn = 16\n"
      "[preset]\nname = tidal-short\n"
      "[solver]\nmax_steps = 5\n");
  cfg.out_dir = out.string();
  const RunReport rep = run_config(cfg);
  CHECK(rep.exit_code == 3);
  CHECK_FALSE(rep.failure.empty());
  // Partial artifacts are retained, and the report still went out.
  CHECK(fs::exists(out / "report.csv"));
  CHECK(fs::exists(out / "failure.txt"));
  CHECK(fs::exists(out / "manifest.csv"));
  const std::string report = slurp(out / "report.csv");
  CHECK(report.find("failure,failure.txt") != std::string::npos);
}

TEST_CASE("unwritable output directory fails without throwing") {
  const fs::path base = fresh_dir("blocked");
  std::ofstream(base / "file").put('x');
  RunConfig cfg = parse_config(
      "[run]\ncommand = hypotheses\n"
      "[preset]\nname = tidal-short\n");
  cfg.out_dir = (base / "file" / "sub").string();
  const RunReport rep = run_config(cfg);
  CHECK(rep.exit_code == 3);
  CHECK_FALSE(rep.failure.empty());
}

TEST_CASE("flag layer: help, missing flags, overrides") {
  const fs::path out = fresh_dir("flags");
  const fs::path cfgfile = out / "run.cfg";
  {
    std::ofstream o(cfgfile);
    o << "[run]\ncommand = hypotheses\nquiet = true\n"
         "[grid]\nn = 16\ntheta_nodes = 8\ntau_nodes = 2\nt_intervals = 4\n"
         "[preset]\nname = uniform-short\n";
  }
  const std::string cfg_arg = cfgfile.string();
  const std::string out_arg = (out / "res").string();
  {
    const char* argv[] = {"dunesim", "--help"};
    CHECK(cli_main(2, argv) == 0);
  }
  {
    const char* argv[] = {"dunesim"};
    CHECK(cli_main(1, argv) == 2);  // --config is required
  }
  {
    const char* argv[] = {"dunesim", "--config", "/no/such/file.cfg"};
    CHECK(cli_main(3, argv) == 2);
  }
  {
    const char* argv[] = {"dunesim",       "--config", cfg_arg.c_str(),
                          "--out",         out_arg.c_str(), "--seed",
                          "77",            "--quiet"};
    CHECK(cli_main(8, argv) == 0);
    CHECK(fs::exists(out / "res" / "report.csv"));
    const std::string echoed = slurp(out / "res" / "config.cfg");
    CHECK(echoed.find("seed = 77") != std::string::npos);
    CHECK(echoed.find("out = " + out_arg) != std::string::npos);
  }
}
