#include "dunesim/cli.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "dunesim/cell.hpp"
#include "dunesim/coefficients.hpp"
#include "dunesim/dsf.hpp"
#include "dunesim/evolve.hpp"
#include "dunesim/field.hpp"
#include "dunesim/homogenized.hpp"
#include "dunesim/verify.hpp"

namespace fs = std::filesystem;

namespace dunesim {

namespace {

std::string join_lines(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += '\n';
    out += s;
  }
  return out;
}

std::string fmt_g(double v) {
  char b[48];
  std::snprintf(b, sizeof(b), "%.17g", v);
  return b;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double_str(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_long_str(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

bool parse_u64_str(const std::string& s, std::uint64_t& out) {
  if (s.empty() || s[0] == '-') return false;
  char* end = nullptr;
  out = std::strtoull(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

bool parse_bool_str(const std::string& s, bool& out) {
  if (s == "true") return out = true, true;
  if (s == "false") return out = false, true;
  return false;
}

bool parse_list_str(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    double v;
    if (!parse_double_str(tok, v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

// Numeric preset members addressable from the [preset] section.
double* preset_member(Preset& p, const std::string& key) {
  if (key == "a") return &p.a;
  if (key == "b") return &p.b;
  if (key == "c") return &p.c;
  if (key == "g0") return &p.law.g0;
  if (key == "g1") return &p.law.g1;
  if (key == "g2") return &p.law.g2;
  if (key == "u_thr") return &p.law.u_thr;
  if (key == "G_thr") return &p.law.G_thr;
  if (key == "w0") return &p.w0;
  if (key == "w1") return &p.w1;
  if (key == "margin") return &p.margin;
  if (key == "amp_u") return &p.amp_u;
  if (key == "amp_u1") return &p.amp_u1;
  if (key == "phase2") return &p.phase2;
  if (key == "m0c") return &p.m0c;
  if (key == "m0v") return &p.m0v;
  if (key == "amp_m") return &p.amp_m;
  if (key == "amp_m2") return &p.amp_m2;
  if (key == "win_lo") return &p.win_lo;
  if (key == "win_hi") return &p.win_hi;
  return nullptr;
}

const std::set<std::string> kCommands = {"simulate", "cell",      "homogenize",
                                         "verify",   "corrector", "hypotheses"};

struct RawEntry {
  std::string value;
  int line = 0;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error(join_lines(errs)), errors(std::move(errs)) {}

RunConfig parse_config(const std::string& text) {
  std::vector<std::string> errors;
  auto err = [&](int line, const std::string& msg) {
    errors.push_back(line > 0 ? "line " + std::to_string(line) + ": " + msg
                              : "config: " + msg);
  };

  // Pass 1: collect section.key entries.
  std::map<std::string, RawEntry> kv;
  {
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      const std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      if (line.front() == '[') {
        if (line.back() != ']' || line.size() < 3) {
          err(lineno, "malformed section header");
          continue;
        }
        section = trim(line.substr(1, line.size() - 2));
        if (section != "run" && section != "grid" && section != "preset" &&
            section != "solver")
          err(lineno, "unknown section '" + section + "'");
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        err(lineno, "expected 'key = value'");
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty()) {
        err(lineno, "expected 'key = value'");
        continue;
      }
      if (section.empty()) {
        err(lineno, "key '" + key + "' outside any [section]");
        continue;
      }
      const std::string full = section + "." + key;
      if (kv.count(full)) {
        err(lineno, "duplicate key '" + key + "'");
        continue;
      }
      kv[full] = {value, lineno};
    }
  }

  RunConfig cfg;
  auto has = [&](const char* full) { return kv.count(full) != 0; };
  auto line_of = [&](const char* full) {
    auto it = kv.find(full);
    return it == kv.end() ? 0 : it->second.line;
  };
  std::set<std::string> known;
  auto take = [&](const char* full, auto parse_into) {
    known.insert(full);
    auto it = kv.find(full);
    if (it == kv.end()) return;
    if (!parse_into(it->second.value)) {
      const std::string key = std::string(full).substr(
          std::string(full).find('.') + 1);
      err(it->second.line, "bad value for '" + key + "'");
    }
  };
  auto take_double = [&](const char* full, double& dst) {
    take(full, [&](const std::string& v) { return parse_double_str(v, dst); });
  };
  auto take_int = [&](const char* full, int& dst) {
    take(full, [&](const std::string& v) {
      long l;
      if (!parse_long_str(v, l) || l < INT_MIN || l > INT_MAX) return false;
      dst = static_cast<int>(l);
      return true;
    });
  };
  auto take_string = [&](const char* full, std::string& dst) {
    take(full, [&](const std::string& v) { return dst = v, true; });
  };
  auto take_bool = [&](const char* full, bool& dst) {
    take(full, [&](const std::string& v) { return parse_bool_str(v, dst); });
  };

  // [run]
  take_string("run.command", cfg.command);
  take_double("run.T_final", cfg.T_final);
  take_double("run.eps", cfg.eps);
  take("run.eps_ladder",
       [&](const std::string& v) { return parse_list_str(v, cfg.eps_ladder); });
  take("run.seed",
       [&](const std::string& v) { return parse_u64_str(v, cfg.seed); });
  take_string("run.out", cfg.out_dir);
  take_bool("run.quiet", cfg.quiet);
  take("run.z0_constant", [&](const std::string& v) {
    cfg.has_z0_constant = true;
    return parse_double_str(v, cfg.z0_constant);
  });

  // [grid]
  take_int("grid.n", cfg.n);
  take_int("grid.theta_nodes", cfg.theta_nodes);
  take_int("grid.tau_nodes", cfg.tau_nodes);
  take_int("grid.t_intervals", cfg.t_intervals);
  take_int("grid.snapshots_per_period", cfg.snapshots_per_period);

  // [preset]
  take_string("preset.name", cfg.preset_name);
  for (const auto& [full, entry] : kv) {
    if (full.rfind("preset.", 0) != 0) continue;
    const std::string key = full.substr(7);
    if (key == "name") continue;
    known.insert(full);
    Preset probe;
    if (preset_member(probe, key) == nullptr) {
      err(entry.line, "unknown key '" + key + "'");
      continue;
    }
    double v;
    if (!parse_double_str(entry.value, v))
      err(entry.line, "bad value for '" + key + "'");
    else
      cfg.overrides[key] = v;
  }

  // [solver]
  take_double("solver.tol", cfg.tol);
  take("solver.nu_schedule", [&](const std::string& v) {
    return parse_list_str(v, cfg.nu_schedule);
  });
  take_double("solver.safety", cfg.safety);
  take("solver.max_steps", [&](const std::string& v) {
    return parse_long_str(v, cfg.max_steps) && cfg.max_steps >= 1;
  });
  take_double("solver.t", cfg.slice_t);
  take_double("solver.tau", cfg.slice_tau);
  take_bool("solver.well_prepared", cfg.well_prepared);

  // Unknown keys in known sections.
  for (const auto& [full, entry] : kv)
    if (!known.count(full))
      err(entry.line, "unknown key '" + full.substr(full.find('.') + 1) + "'");

  // Required keys.
  if (!has("run.command"))
    err(0, "missing required key: command");
  else if (!kCommands.count(cfg.command))
    err(line_of("run.command"), "unknown command '" + cfg.command + "'");
  if (!has("preset.name")) err(0, "missing required key: preset name");

  // Resolve the preset.
  bool preset_ok = false;
  if (has("preset.name")) {
    try {
      cfg.preset = bundled_preset(cfg.preset_name);
      preset_ok = true;
    } catch (const std::exception&) {
      err(line_of("preset.name"), "unknown preset '" + cfg.preset_name + "'");
    }
  }
  if (preset_ok)
    for (const auto& [key, v] : cfg.overrides) *preset_member(cfg.preset, key) = v;

  // Range validation.
  if (!(cfg.T_final > 0.0)) err(line_of("run.T_final"), "T_final must be positive");
  if (!(cfg.eps > 0.0)) err(line_of("run.eps"), "eps must be positive");
  if (!(cfg.tol > 0.0)) err(line_of("solver.tol"), "tol must be positive");
  if (!(cfg.safety > 0.0 && cfg.safety <= 1.0))
    err(line_of("solver.safety"), "safety must be in (0, 1]");
  if (cfg.n < 8 || cfg.n % 2 != 0)
    err(line_of("grid.n"), "n must be even and at least 8");
  if (cfg.theta_nodes < 4)
    err(line_of("grid.theta_nodes"), "theta_nodes must be at least 4");
  if (cfg.tau_nodes < 1) err(line_of("grid.tau_nodes"), "tau_nodes must be at least 1");
  if (cfg.t_intervals < 1)
    err(line_of("grid.t_intervals"), "t_intervals must be at least 1");
  if (cfg.snapshots_per_period < 1)
    err(line_of("grid.snapshots_per_period"),
        "snapshots_per_period must be at least 1");
  for (std::size_t i = 0; i < cfg.nu_schedule.size(); ++i)
    if (!(cfg.nu_schedule[i] > 0.0) ||
        (i > 0 && cfg.nu_schedule[i] >= cfg.nu_schedule[i - 1])) {
      err(line_of("solver.nu_schedule"),
          "nu_schedule must be strictly decreasing and positive");
      break;
    }
  if (has("run.eps_ladder")) {
    if (cfg.eps_ladder.size() < 3)
      err(line_of("run.eps_ladder"), "ladder needs >= 3 entries");
    for (std::size_t i = 0; i < cfg.eps_ladder.size(); ++i)
      if (!(cfg.eps_ladder[i] > 0.0) ||
          (i > 0 && cfg.eps_ladder[i] >= cfg.eps_ladder[i - 1])) {
        err(line_of("run.eps_ladder"),
            "eps_ladder must be strictly decreasing and positive");
        break;
      }
  }

  // Command/key compatibility.
  const bool is_verify = cfg.command == "verify";
  const bool is_cell = cfg.command == "cell";
  if (is_verify && !has("run.eps_ladder"))
    err(0, "verify needs eps_ladder");
  if (!is_verify && has("run.eps_ladder"))
    err(line_of("run.eps_ladder"), "eps_ladder only applies to the verify command");
  if (is_verify && has("run.eps"))
    err(line_of("run.eps"), "verify uses eps_ladder, not eps");
  if (!is_cell && has("solver.nu_schedule"))
    err(line_of("solver.nu_schedule"), "nu_schedule only applies to the cell command");
  if (!is_cell && has("solver.t"))
    err(line_of("solver.t"), "t only applies to the cell command");
  if (!is_cell && has("solver.tau"))
    err(line_of("solver.tau"), "tau only applies to the cell command");
  if (cfg.has_z0_constant && (is_cell || cfg.command == "hypotheses"))
    err(line_of("run.z0_constant"),
        "z0_constant does not apply to the " + cfg.command + " command");

  // Command/preset compatibility.
  if (preset_ok && errors.empty()) {
    const Regime r = cfg.preset.regime;
    if (cfg.command == "homogenize" && r == Regime::Short)
      err(line_of("preset.name"),
          "homogenize needs a long- or mean-regime preset");
    if (cfg.command == "corrector") {
      if (r != Regime::Mean)
        err(line_of("preset.name"), "corrector needs a mean-regime preset");
      else if (cfg.preset.law.u_thr != 0.0)
        err(line_of("preset.name"),
            "corrector needs a threshold-free law (u_thr = 0)");
    }
    if (is_verify && r == Regime::Short && cfg.preset.c != 0.0)
      err(line_of("preset.name"),
          "short-regime verification needs a transport-free preset (c = 0)");
    if (cfg.well_prepared && !(is_verify && r == Regime::Mean))
      err(line_of("solver.well_prepared"),
          "well_prepared only applies to mean-regime verification");
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  out += "[run]\n";
  out += "command = " + cfg.command + "\n";
  out += "T_final = " + fmt_g(cfg.T_final) + "\n";
  const bool is_verify = cfg.command == "verify";
  const bool is_cell = cfg.command == "cell";
  if (!is_verify) out += "eps = " + fmt_g(cfg.eps) + "\n";
  if (!cfg.eps_ladder.empty()) {
    out += "eps_ladder =";
    for (double e : cfg.eps_ladder) out += " " + fmt_g(e);
    out += "\n";
  }
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "out = " + cfg.out_dir + "\n";
  out += std::string("quiet = ") + (cfg.quiet ? "true" : "false") + "\n";
  if (cfg.has_z0_constant)
    out += "z0_constant = " + fmt_g(cfg.z0_constant) + "\n";
  out += "\n[grid]\n";
  out += "n = " + std::to_string(cfg.n) + "\n";
  out += "theta_nodes = " + std::to_string(cfg.theta_nodes) + "\n";
  out += "tau_nodes = " + std::to_string(cfg.tau_nodes) + "\n";
  out += "t_intervals = " + std::to_string(cfg.t_intervals) + "\n";
  out += "snapshots_per_period = " + std::to_string(cfg.snapshots_per_period) + "\n";
  out += "\n[preset]\n";
  out += "name = " + cfg.preset_name + "\n";
  for (const auto& [key, v] : cfg.overrides) out += key + " = " + fmt_g(v) + "\n";
  out += "\n[solver]\n";
  out += "tol = " + fmt_g(cfg.tol) + "\n";
  if (is_cell) {
    out += "nu_schedule =";
    for (double nu : cfg.nu_schedule) out += " " + fmt_g(nu);
    out += "\n";
  }
  out += "safety = " + fmt_g(cfg.safety) + "\n";
  out += "max_steps = " + std::to_string(cfg.max_steps) + "\n";
  if (is_cell) {
    out += "t = " + fmt_g(cfg.slice_t) + "\n";
    out += "tau = " + fmt_g(cfg.slice_tau) + "\n";
  }
  if (cfg.well_prepared) out += "well_prepared = true\n";
  return out;
}

bool RunReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return exit_code == 0;
}

namespace {

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream o(p, std::ios::binary);
  o << s;
  if (!o) throw std::runtime_error("cannot write " + p.string());
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in) throw std::runtime_error("cannot read " + p.string());
  char b[24];
  std::snprintf(b, sizeof(b), "%016llx",
                static_cast<unsigned long long>(fnv1a64(buf.str())));
  return b;
}

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto t1 = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(t1 - t0_).count();
    t0_ = t1;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

ScalarField initial_height(const RunConfig& cfg, Grid g) {
  if (cfg.has_z0_constant) return ScalarField(g, cfg.z0_constant);
  return default_initial_height(g);
}

std::vector<double> limit_t_nodes(const RunConfig& cfg) {
  std::vector<double> tn;
  for (int i = 0; i <= cfg.t_intervals; ++i)
    tn.push_back(cfg.T_final * i / cfg.t_intervals);
  return tn;
}

void add_check(RunReport& rep, const std::string& id, double value,
               double bound, bool pass) {
  rep.checks.push_back({id, value, bound, pass});
}

// Append the data lines of a CSV (everything after its header line).
void append_csv_rows(std::string& out, const std::string& csv) {
  const std::size_t nl = csv.find('\n');
  if (nl != std::string::npos) out += csv.substr(nl + 1);
}

void run_simulate(const RunConfig& cfg, const fs::path& out, RunReport& rep) {
  Stopwatch sw;
  EvolutionProblem ep;
  ep.preset = cfg.preset;
  ep.eps = cfg.eps;
  ep.grid = Grid(cfg.n);
  ep.T_final = cfg.T_final;
  ep.z0 = initial_height(cfg, ep.grid);
  ep.safety = cfg.safety;
  ep.max_steps = cfg.max_steps;
  ep.snapshot_dt = cfg.eps / cfg.snapshots_per_period;
  const Trajectory traj = run_full(ep);
  rep.timings_s.emplace_back("evolve", sw.lap());

  std::string series = "step,t,mass,l2\n";
  for (std::size_t i = 0; i < traj.series_step.size(); ++i)
    series += std::to_string(traj.series_step[i]) + "," +
              fmt_g(traj.series_t[i]) + "," + fmt_g(traj.mass_series[i]) + "," +
              fmt_g(traj.l2_series[i]) + "\n";
  write_text(out / "series.csv", series);
  std::string times = "index,t\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    times += std::to_string(i) + "," + fmt_g(traj.times[i]) + "\n";
  write_text(out / "times.csv", times);
  fs::create_directories(out / "fields");
  write_dsf1((out / "fields" / "trajectory.dsf1").string(), traj.snapshots);
  rep.timings_s.emplace_back("artifacts", sw.lap());

  rep.constants.emplace_back("dt", traj.dt);
  rep.constants.emplace_back("steps", static_cast<double>(traj.steps));
  rep.constants.emplace_back("mass0", traj.mass0);
  rep.constants.emplace_back("mass_drift_rel", traj.mass_drift_rel);
  rep.constants.emplace_back("sup_l2", traj.sup_l2);
  rep.constants.emplace_back("abar", traj.abar);
  rep.constants.emplace_back("max_dev", traj.max_dev);
  rep.constants.emplace_back("max_divC", traj.max_divC);
  add_check(rep, "mass_conservation", traj.mass_drift_rel, 1e-10,
            traj.mass_drift_rel <= 1e-10);
  if (traj.failed) {
    rep.exit_code = 3;
    rep.failure = traj.failure;
  }
}

void run_cell(const RunConfig& cfg, const fs::path& out, RunReport& rep) {
  Stopwatch sw;
  const Grid g(cfg.n);
  const HypothesisReport hyp = validate_hypotheses(cfg.preset, cfg.eps);
  rep.timings_s.emplace_back("hypotheses", sw.lap());
  ThetaProblem tp = theta_problem_from_preset(cfg.preset, g, cfg.slice_t,
                                              cfg.slice_tau, cfg.eps,
                                              cfg.theta_nodes, 0.0,
                                              1.0 / cfg.eps);
  const ContinuationResult cont =
      continuation_nu(tp, cfg.nu_schedule, cfg.tol, hyp);
  rep.timings_s.emplace_back("continuation", sw.lap());

  // Full estimate rows (including the t-derivative family) at the final nu.
  tp.nu = cfg.nu_schedule.back();
  std::vector<ScalarField> dAdt;
  std::vector<VectorField> dCdt;
  preset_theta_slices_dt(cfg.preset, g, cfg.slice_t, cfg.slice_tau, cfg.eps,
                         cfg.theta_nodes, dAdt, dCdt);
  const std::vector<ScalarField> dSdt =
      solve_dSdt(tp, cont.final, dAdt, dCdt, cfg.tol);
  const EstimateReport final_rep = cell_estimates(cont.final, tp, hyp, &dSdt);
  rep.timings_s.emplace_back("estimates", sw.lap());

  std::string est = "estimate_id,lhs,rhs,pass,nu,mu,lambda\n";
  for (const auto& r : cont.reports) append_csv_rows(est, r.to_csv());
  append_csv_rows(est, final_rep.to_csv());
  write_text(out / "estimates.csv", est);
  std::string res = "period,residual\n";
  for (std::size_t i = 0; i < cont.final.residual_history.size(); ++i)
    res += std::to_string(i + 1) + "," + fmt_g(cont.final.residual_history[i]) +
           "\n";
  write_text(out / "residuals.csv", res);
  std::string cs = "nu,increment\n";
  for (std::size_t i = 0; i < cont.increments.size(); ++i)
    cs += fmt_g(cont.nu_values[i + 1]) + "," + fmt_g(cont.increments[i]) + "\n";
  write_text(out / "continuation.csv", cs);
  fs::create_directories(out / "fields");
  write_dsf1((out / "fields" / "cell_S.dsf1").string(), cont.final.S);

  double zero_mean = 0.0;
  for (const auto& s : cont.final.S)
    zero_mean = std::max(zero_mean, std::abs(integral_mean(s)));
  long fails = 0;
  for (const auto& r : cont.reports)
    for (const auto& row : r.rows) fails += row.pass ? 0 : 1;
  for (const auto& row : final_rep.rows) fails += row.pass ? 0 : 1;

  rep.constants.emplace_back("gamma", hyp.gamma);
  rep.constants.emplace_back("G_thr", hyp.Gthr);
  rep.constants.emplace_back("window_lo", hyp.window_lo);
  rep.constants.emplace_back("window_hi", hyp.window_hi);
  rep.constants.emplace_back("periods", cont.final.iterations);
  rep.constants.emplace_back("periodicity_residual",
                             cont.final.periodicity_residual);
  rep.constants.emplace_back("zero_mean_sup", zero_mean);
  add_check(rep, "hypotheses_clean", static_cast<double>(hyp.violations.size()),
            0.0, hyp.violations.empty());
  add_check(rep, "cell_converged", cont.final.periodicity_residual, cfg.tol,
            cont.final.converged);
  add_check(rep, "estimate_suite", static_cast<double>(fails), 0.0, fails == 0);
  add_check(rep, "zero_mean", zero_mean, 1e-12, zero_mean <= 1e-12);
}

void run_homogenize(const RunConfig& cfg, const fs::path& out, RunReport& rep) {
  Stopwatch sw;
  const Grid g(cfg.n);
  const ScalarField z0 = initial_height(cfg, g);
  const double mass = integral_mean(z0);
  const std::vector<double> tn = limit_t_nodes(cfg);
  fs::create_directories(out / "fields");

  if (cfg.preset.regime == Regime::Long) {
    std::vector<double> thetas;
    for (int k = 0; k < cfg.theta_nodes; ++k)
      thetas.push_back(static_cast<double>(k) / cfg.theta_nodes);
    const HomogenizedProfile prof =
        build_longterm_profile(cfg.preset, tn, thetas, z0, cfg.tol);
    rep.timings_s.emplace_back("profile", sw.lap());
    const int files = dump_longterm_profile(prof, (out / "fields").string());

    std::string labels = "index_t,t,index_theta,theta,class\n";
    long n_deg = 0, n_thr = 0, n_act = 0;
    double theta_var = 0.0, mass_gap = 0.0, resid = 0.0, amp = 0.0;
    for (std::size_t it = 0; it < prof.t_nodes.size(); ++it) {
      double lo = 1e300, hi = -1e300, avg = 0.0;
      for (std::size_t k = 0; k < prof.theta_nodes.size(); ++k) {
        const ThetaClass c = prof.theta_labels[it][k];
        n_deg += c == ThetaClass::Degenerate;
        n_thr += c == ThetaClass::Threshold;
        n_act += c == ThetaClass::Active;
        labels += std::to_string(it) + "," + fmt_g(prof.t_nodes[it]) + "," +
                  std::to_string(k) + "," + fmt_g(prof.theta_nodes[k]) + "," +
                  theta_class_name(c) + "\n";
        const double m = integral_mean(prof.U[it][k]);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        avg += m;
        ScalarField V = prof.U[it][k];
        for (double& v : V.v) v -= mass;
        amp = std::max(amp, l2_norm(V));
        const LimitCoeffs lc =
            limit_AC(cfg.preset, g, prof.t_nodes[it], 0.0, prof.theta_nodes[k]);
        resid = std::max(resid, l2_norm(elliptic_residual(lc.A, lc.C, V)));
      }
      avg /= static_cast<double>(prof.theta_nodes.size());
      theta_var = std::max(theta_var, hi - lo);
      mass_gap = std::max(mass_gap, std::abs(avg - mass));
    }
    write_text(out / "labels.csv", labels);
    rep.timings_s.emplace_back("checks", sw.lap());

    rep.constants.emplace_back("mass", mass);
    rep.constants.emplace_back("files", files);
    rep.constants.emplace_back("profile_amp", amp);
    rep.constants.emplace_back("nodes_degenerate", static_cast<double>(n_deg));
    rep.constants.emplace_back("nodes_threshold", static_cast<double>(n_thr));
    rep.constants.emplace_back("nodes_active", static_cast<double>(n_act));
    add_check(rep, "theta_constancy", theta_var, 1e-10, theta_var <= 1e-10);
    add_check(rep, "mass_identity", mass_gap, 1e-10, mass_gap <= 1e-10);
    add_check(rep, "elliptic_residuals", resid, cfg.tol, resid <= cfg.tol);
  } else {
    const MeanTermProfile prof = build_meanterm_profile(
        cfg.preset, tn, cfg.tau_nodes, g, cfg.theta_nodes, z0, cfg.tol);
    rep.timings_s.emplace_back("profile", sw.lap());
    const int files = dump_meanterm_profile(prof, (out / "fields").string());

    double mean_free = 0.0, amp = 0.0;
    for (const auto& per_tau : prof.V)
      for (const auto& slices : per_tau)
        for (const auto& s : slices) {
          mean_free = std::max(mean_free, std::abs(integral_mean(s)));
          amp = std::max(amp, l2_norm(s));
        }
    rep.timings_s.emplace_back("checks", sw.lap());

    rep.constants.emplace_back("mass", mass);
    rep.constants.emplace_back("files", files);
    rep.constants.emplace_back("profile_amp", amp);
    add_check(rep, "theta_constancy", mean_free, 1e-10, mean_free <= 1e-10);
    add_check(rep, "mass_identity", mean_free, 1e-10, mean_free <= 1e-10);
    add_check(rep, "mean_free", mean_free, 1e-12, mean_free <= 1e-12);
  }
}

void run_verify(const RunConfig& cfg, const fs::path& out, RunReport& rep) {
  Stopwatch sw;
  const Grid g(cfg.n);
  const std::vector<TestFunction> psis =
      bundled_test_functions(cfg.preset.regime, cfg.T_final);
  StudyOptions opt;
  opt.limit_t_intervals = cfg.t_intervals;
  opt.theta_nodes = cfg.theta_nodes;
  opt.n_tau = cfg.tau_nodes;
  opt.profile_tol = cfg.tol;
  opt.safety = cfg.safety;
  opt.max_steps = cfg.max_steps;
  opt.snapshots_per_period = cfg.snapshots_per_period;
  opt.well_prepared = cfg.well_prepared;
  if (cfg.has_z0_constant) opt.z0 = ScalarField(g, cfg.z0_constant);
  const ConvergenceReport study =
      convergence_study(cfg.preset, cfg.eps_ladder, psis, g, cfg.T_final, opt);
  rep.timings_s.emplace_back("study", sw.lap());

  write_text(out / "pairings.csv", study.to_csv());
  write_text(out / "summary.csv", study.summary_csv());
  std::string rates = "psi_id,rate,monotone\n";
  long nonmono = 0;
  for (std::size_t ip = 0; ip < study.psi_ids.size(); ++ip) {
    rates += study.psi_ids[ip] + "," + fmt_g(study.fitted_rates[ip]) + "," +
             (study.monotone_psi[ip] ? "1" : "0") + "\n";
    nonmono += study.monotone_psi[ip] ? 0 : 1;
  }
  write_text(out / "rates.csv", rates);

  rep.constants.emplace_back("uniform_bound", study.uniform_bound);
  rep.constants.emplace_back("uniform_ratio", study.uniform_ratio);
  rep.constants.emplace_back("fitted_rate", study.fitted_rate);
  if (!study.corrector_ratios.empty())
    rep.constants.emplace_back("corrector_max_ratio",
                               study.corrector_max_ratio);
  add_check(rep, "pairings_monotone", static_cast<double>(nonmono), 0.0,
            study.monotone);
  add_check(rep, "uniform_ratio", study.uniform_ratio, 1.1,
            study.uniform_ratio <= 1.1);
  if (cfg.preset.regime == Regime::Mean) {
    add_check(rep, "fitted_rate", study.fitted_rate, 0.4,
              study.fitted_rate >= 0.4);
    if (!study.corrector_ratios.empty())
      add_check(rep, "corrector_ratio_spread", study.corrector_max_ratio, 2.0,
                study.corrector_max_ratio <= 2.0);
  }
  if (study.partial) {
    rep.exit_code = 3;
    rep.failure = join_lines(study.notes);
  }
}

void run_corrector(const RunConfig& cfg, const fs::path& out, RunReport& rep) {
  Stopwatch sw;
  const Grid g(cfg.n);
  const ScalarField z0 = initial_height(cfg, g);
  const std::vector<double> tn = limit_t_nodes(cfg);
  const MeanTermProfile mprof = build_meanterm_profile(
      cfg.preset, tn, cfg.tau_nodes, g, cfg.theta_nodes, z0, cfg.tol);
  rep.timings_s.emplace_back("mean_profile", sw.lap());
  const CorrectorProfile cp = solve_corrector_profile(cfg.preset, mprof, cfg.tol);
  rep.timings_s.emplace_back("corrector", sw.lap());

  fs::create_directories(out / "fields");
  std::string index = "index_t,t,index_tau,tau,filename\n";
  int files = 0;
  for (std::size_t it = 0; it < cp.t_nodes.size(); ++it)
    for (std::size_t jt = 0; jt < cp.tau_nodes.size(); ++jt) {
      char name[64];
      std::snprintf(name, sizeof(name), "corrector_t%03zu_tau%03zu.dsf1", it,
                    jt);
      write_dsf1((out / "fields" / name).string(), cp.U_half[it][jt]);
      index += std::to_string(it) + "," + fmt_g(cp.t_nodes[it]) + "," +
               std::to_string(jt) + "," + fmt_g(cp.tau_nodes[jt]) + "," + name +
               "\n";
      ++files;
    }
  write_text(out / "corrector_index.csv", index);
  rep.timings_s.emplace_back("artifacts", sw.lap());

  rep.constants.emplace_back("files", files);
  rep.constants.emplace_back("max_projection_residue",
                             cp.max_projection_residue);
  add_check(rep, "projection_residue", cp.max_projection_residue, 1e-6,
            !cp.residue_flagged);
}

void run_hypotheses(const RunConfig& cfg, const fs::path& out, RunReport& rep) {
  Stopwatch sw;
  SamplingSpec spec;
  spec.nt = cfg.t_intervals;
  spec.ntau = cfg.tau_nodes;
  spec.ntheta = cfg.theta_nodes;
  spec.nx = cfg.n;
  const HypothesisReport hyp = validate_hypotheses(cfg.preset, cfg.eps, spec);
  rep.timings_s.emplace_back("hypotheses", sw.lap());

  std::string csv = "key,value\n";
  csv += "gamma," + fmt_g(hyp.gamma) + "\n";
  csv += "G_thr," + fmt_g(hyp.Gthr) + "\n";
  csv += "window_lo," + fmt_g(hyp.window_lo) + "\n";
  csv += "window_hi," + fmt_g(hyp.window_hi) + "\n";
  csv += "violations," + std::to_string(hyp.violations.size()) + "\n";
  for (const auto& [clause, gamma] : hyp.clause_gamma)
    csv += "clause." + clause + "," + fmt_g(gamma) + "\n";
  write_text(out / "hypotheses.csv", csv);
  if (!hyp.violations.empty())
    write_text(out / "violations.txt", join_lines(hyp.violations) + "\n");
  if (!hyp.notes.empty())
    write_text(out / "notes.txt", join_lines(hyp.notes) + "\n");

  rep.constants.emplace_back("gamma", hyp.gamma);
  rep.constants.emplace_back("G_thr", hyp.Gthr);
  rep.constants.emplace_back("window_lo", hyp.window_lo);
  rep.constants.emplace_back("window_hi", hyp.window_hi);
  add_check(rep, "hypotheses_clean", static_cast<double>(hyp.violations.size()),
            0.0, hyp.violations.empty());
}

}  // namespace

RunReport run_config(const RunConfig& cfg) {
  RunReport rep;
  rep.config = cfg;
  const fs::path out(cfg.out_dir);
  try {
    fs::create_directories(out);
    write_text(out / "config.cfg", serialize_config(cfg));
    if (cfg.command == "simulate")
      run_simulate(cfg, out, rep);
    else if (cfg.command == "cell")
      run_cell(cfg, out, rep);
    else if (cfg.command == "homogenize")
      run_homogenize(cfg, out, rep);
    else if (cfg.command == "verify")
      run_verify(cfg, out, rep);
    else if (cfg.command == "corrector")
      run_corrector(cfg, out, rep);
    else if (cfg.command == "hypotheses")
      run_hypotheses(cfg, out, rep);
    else
      throw std::logic_error("unvalidated command");
  } catch (const std::exception& e) {
    rep.exit_code = 3;
    rep.failure = e.what();
  }
  if (rep.exit_code == 0)
    for (const auto& c : rep.checks)
      if (!c.pass) rep.exit_code = 1;

  try {
    std::string report = "kind,id,value,bound,pass\n";
    for (const auto& [id, v] : rep.constants)
      report += "constant," + id + "," + fmt_g(v) + ",,\n";
    for (const auto& c : rep.checks)
      report += "check," + c.id + "," + fmt_g(c.value) + "," + fmt_g(c.bound) +
                "," + (c.pass ? "1" : "0") + "\n";
    if (!rep.failure.empty()) {
      write_text(out / "failure.txt", rep.failure + "\n");
      report += "failure,failure.txt,,,\n";
    }
    write_text(out / "report.csv", report);

    // Digest manifest over everything in the output directory.
    std::vector<std::string> paths;
    for (const auto& entry : fs::recursive_directory_iterator(out))
      if (entry.is_regular_file()) {
        const std::string rel =
            fs::relative(entry.path(), out).generic_string();
        if (rel != "manifest.csv") paths.push_back(rel);
      }
    std::sort(paths.begin(), paths.end());
    std::string manifest = "path,fnv1a64\n";
    for (const auto& p : paths) {
      const std::string d = digest_file(out / p);
      manifest += p + "," + d + "\n";
      rep.manifest.push_back({p, d});
    }
    write_text(out / "manifest.csv", manifest);
  } catch (const std::exception& e) {
    if (rep.exit_code == 0) rep.exit_code = 3;
    if (rep.failure.empty()) rep.failure = e.what();
  }
  return rep;
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"dune morphodynamics simulation and verification toolkit"};
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "run configuration file")
      ->required();
  CLI::Option* out_opt =
      app.add_option("--out", out_dir, "output directory (overrides config)");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "seed for randomized checks (overrides config)");
  app.add_flag("--quiet", quiet, "suppress stdout reporting");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ifstream in(config_path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in) {
    std::fprintf(stderr, "error: cannot read config file '%s'\n",
                 config_path.c_str());
    return 2;
  }
  RunConfig cfg;
  try {
    cfg = parse_config(buf.str());
  } catch (const ConfigError& e) {
    for (const auto& msg : e.errors)
      std::fprintf(stderr, "error: %s\n", msg.c_str());
    return 2;
  }
  if (out_opt->count() > 0) cfg.out_dir = out_dir;
  if (seed_opt->count() > 0) cfg.seed = seed;
  if (quiet) cfg.quiet = true;

  const RunReport rep = run_config(cfg);
  if (!cfg.quiet) {
    std::printf("command: %s  preset: %s  out: %s\n", cfg.command.c_str(),
                cfg.preset_name.c_str(), cfg.out_dir.c_str());
    for (const auto& [id, v] : rep.constants)
      std::printf("  %-24s %s\n", id.c_str(), fmt_g(v).c_str());
    for (const auto& c : rep.checks)
      std::printf("[%s] %-24s value=%s bound=%s\n", c.pass ? "PASS" : "FAIL",
                  c.id.c_str(), fmt_g(c.value).c_str(), fmt_g(c.bound).c_str());
    for (const auto& [id, s] : rep.timings_s)
      std::printf("  %-24s %.2f s\n", id.c_str(), s);
    std::printf("exit %d\n", rep.exit_code);
  }
  if (rep.exit_code == 3)
    std::fprintf(stderr, "solver failure: %s\n", rep.failure.c_str());
  return rep.exit_code;
}

}  // namespace dunesim
