#include "dunesim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dunesim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double dot_mean(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
  return s / a.v.size();
}

double harmonic(int deg, bool use_sin, double u) {
  if (deg == 0) return use_sin ? 0.0 : 1.0;
  const double arg = kTwoPi * deg * u;
  return use_sin ? std::sin(arg) : std::cos(arg);
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    s += 0.5 * (t[i + 1] - t[i]) * (f[i] + f[i + 1]);
  return s;
}

double wrap_unit(double u) {
  const double w = u - std::floor(u);
  return w < 1.0 ? w : 0.0;
}

void check_times(const std::vector<double>& times, const char* op) {
  if (times.size() < 2)
    throw std::invalid_argument(std::string(op) + ": need at least 2 snapshots");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i + 1] > times[i]))
      throw std::invalid_argument(std::string(op) +
                                  ": snapshot times must increase");
}

}  // namespace

double TestFunction::bump(double t) const {
  if (!(T > 0.0)) throw std::invalid_argument("TestFunction: T must be positive");
  return smoothstep((0.9 - t / T) / 0.25);
}

double TestFunction::weight(double t, double tau, double theta) const {
  return amp * bump(t) * harmonic(theta_deg, theta_sin, theta) *
         harmonic(tau_deg, tau_sin, tau);
}

ScalarField TestFunction::x_mode(Grid g) const {
  ScalarField f(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double phase =
          kTwoPi * (k1 * static_cast<double>(i) + k2 * static_cast<double>(j)) /
          g.n;
      f(i, j) = x_sin ? std::sin(phase) : std::cos(phase);
    }
  return f;
}

std::vector<TestFunction> bundled_test_functions(Regime r, double T) {
  std::vector<TestFunction> set;
  TestFunction p;
  p.T = T;
  p.id = "psi1"; p.k1 = 1; p.k2 = 0; p.x_sin = false;
  p.theta_deg = 0; p.theta_sin = false;
  set.push_back(p);
  p.id = "psi2"; p.theta_deg = 1;
  set.push_back(p);
  p.id = "psi3"; p.k1 = 0; p.k2 = 1; p.x_sin = true; p.theta_sin = true;
  set.push_back(p);
  p.id = "psi4"; p.k1 = 1; p.k2 = 1; p.x_sin = false;
  p.theta_deg = 2; p.theta_sin = false;
  set.push_back(p);
  p.id = "psi5"; p.k1 = 0; p.k2 = 2; p.theta_sin = true;
  set.push_back(p);
  if (r == Regime::Mean) {
    p.id = "psi6"; p.k1 = 1; p.k2 = 0; p.x_sin = true;
    p.theta_deg = 1; p.theta_sin = false;
    p.tau_deg = 1; p.tau_sin = true;
    set.push_back(p);
  }
  return set;
}

double twoscale_pairing(const Trajectory& traj, const TestFunction& psi,
                        double eps, double* quad_warning) {
  if (!(eps > 0.0))
    throw std::invalid_argument("twoscale_pairing: eps must be positive");
  check_times(traj.times, "twoscale_pairing");
  if (traj.snapshots.size() != traj.times.size())
    throw std::invalid_argument("twoscale_pairing: snapshot/time mismatch");
  const Grid g = traj.snapshots[0].grid;
  const ScalarField xf = psi.x_mode(g);
  const double sq = std::sqrt(eps);
  std::vector<double> F(traj.times.size());
  double sup_inner = 0.0, max_h = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const double inner = dot_mean(traj.snapshots[i], xf);
    sup_inner = std::max(sup_inner, std::abs(inner));
    F[i] = psi.weight(t, t / sq, t / eps) * inner;
    if (i > 0) max_h = std::max(max_h, traj.times[i] - traj.times[i - 1]);
  }
  if (quad_warning) {
    *quad_warning = 0.0;
    if (max_h > eps / 8.0) {
      // Second-order trapezoid estimate with the fastest phase rate.
      const double rate =
          kTwoPi * std::max({1, psi.theta_deg, psi.tau_deg}) / eps;
      const double span = traj.times.back() - traj.times.front();
      *quad_warning =
          span * max_h * max_h / 12.0 * rate * rate * psi.amp * sup_inner;
    }
  }
  return trapezoid(traj.times, F);
}

double limit_pairing(const HomogenizedProfile& prof, const TestFunction& psi) {
  if (prof.U.empty() || prof.U[0].empty())
    throw std::invalid_argument("limit_pairing: empty profile");
  if (psi.tau_deg != 0)
    throw std::invalid_argument(
        "limit_pairing: tau-dependent test function needs the mean-regime "
        "profile");
  const std::vector<double>& tn = prof.t_nodes;
  const std::vector<double>& th = prof.theta_nodes;
  if (tn.front() > 1e-12 || tn.back() < 0.9 * psi.T - 1e-9)
    throw std::invalid_argument(
        "limit_pairing: profile t-nodes do not cover the test-function "
        "support");
  // Periodic trapezoid weights on the (sorted, within [0,1)) theta nodes.
  const std::size_t m = th.size();
  std::vector<double> w(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double next = (k + 1 < m) ? th[k + 1] : th[0] + 1.0;
    const double prev = (k > 0) ? th[k - 1] : th[m - 1] - 1.0;
    w[k] = 0.5 * (next - prev);
  }
  const ScalarField xf = psi.x_mode(prof.U[0][0].grid);
  std::vector<double> G(tn.size(), 0.0);
  for (std::size_t it = 0; it < tn.size(); ++it)
    for (std::size_t k = 0; k < m; ++k)
      G[it] += w[k] * psi.weight(tn[it], 0.0, th[k]) *
               dot_mean(prof.U[it][k], xf);
  return trapezoid(tn, G);
}

double limit_pairing(const MeanTermProfile& prof, const TestFunction& psi) {
  if (prof.V.empty() || prof.V[0].empty() || prof.V[0][0].empty())
    throw std::invalid_argument("limit_pairing: empty profile");
  const std::vector<double>& tn = prof.t_nodes;
  if (tn.front() > 1e-12 || tn.back() < 0.9 * psi.T - 1e-9)
    throw std::invalid_argument(
        "limit_pairing: profile t-nodes do not cover the test-function "
        "support");
  const int ntau = static_cast<int>(prof.tau_nodes.size());
  const int m = prof.m_theta;
  const ScalarField xf = psi.x_mode(prof.grid);
  const double xf_mean = integral_mean(xf);
  std::vector<double> G(tn.size(), 0.0);
  for (std::size_t it = 0; it < tn.size(); ++it) {
    double acc = 0.0;
    for (int j = 0; j < ntau; ++j)
      for (int k = 0; k < m; ++k)
        acc += psi.weight(tn[it], prof.tau_nodes[j],
                          static_cast<double>(k) / m) *
               (prof.mass * xf_mean + dot_mean(prof.V[it][j][k], xf));
    G[it] = acc / (static_cast<double>(ntau) * m);
  }
  return trapezoid(tn, G);
}

double corrector_norm(const Trajectory& traj, const MeanTermProfile& prof,
                      double eps) {
  if (!(eps > 0.0))
    throw std::invalid_argument("corrector_norm: eps must be positive");
  check_times(traj.times, "corrector_norm");
  if (prof.V.empty() || prof.V[0].empty() || prof.V[0][0].empty())
    throw std::invalid_argument("corrector_norm: empty profile");
  const Grid g = prof.grid;
  if (!(traj.snapshots[0].grid == g))
    throw std::invalid_argument("corrector_norm: trajectory/profile grid mismatch");
  const std::vector<double>& tn = prof.t_nodes;
  if (tn.size() < 2)
    throw std::invalid_argument("corrector_norm: profile needs at least two t-nodes");
  if (tn.front() > traj.times.front() + 1e-12 ||
      tn.back() < traj.times.back() - 1e-12)
    throw std::invalid_argument(
        "corrector_norm: profile t-nodes do not cover the trajectory");
  const int ntau = static_cast<int>(prof.tau_nodes.size());
  const int m = prof.m_theta;
  const double sq = std::sqrt(eps);
  double sup = 0.0;
  ScalarField diff(g);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    // Linear t-bracket.
    std::size_t it = 0;
    while (it + 2 < tn.size() && tn[it + 1] <= t) ++it;
    const double span = tn[it + 1] - tn[it];
    const double wt = std::clamp((t - tn[it]) / span, 0.0, 1.0);
    // Periodic bilinear (tau, theta) bracket on the uniform fast grids.
    const double tau = wrap_unit(t / sq);
    const double theta = wrap_unit(t / eps);
    const int j0 = static_cast<int>(tau * ntau) % ntau;
    const int j1 = (j0 + 1) % ntau;
    const double wj = tau * ntau - std::floor(tau * ntau);
    const int k0 = static_cast<int>(theta * m) % m;
    const int k1 = (k0 + 1) % m;
    const double wk = theta * m - std::floor(theta * m);
    const double c[2][2][2] = {
        {{(1 - wt) * (1 - wj) * (1 - wk), (1 - wt) * (1 - wj) * wk},
         {(1 - wt) * wj * (1 - wk), (1 - wt) * wj * wk}},
        {{wt * (1 - wj) * (1 - wk), wt * (1 - wj) * wk},
         {wt * wj * (1 - wk), wt * wj * wk}}};
    const int its[2] = {static_cast<int>(it), static_cast<int>(it) + 1};
    const int js[2] = {j0, j1};
    const int ks[2] = {k0, k1};
    for (std::size_t q = 0; q < diff.v.size(); ++q)
      diff.v[q] = traj.snapshots[i].v[q] - prof.mass;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int d = 0; d < 2; ++d) {
          if (c[a][b][d] == 0.0) continue;
          const ScalarField& V = prof.V[its[a]][js[b]][ks[d]];
          for (std::size_t q = 0; q < diff.v.size(); ++q)
            diff.v[q] -= c[a][b][d] * V.v[q];
        }
    sup = std::max(sup, l2_norm(diff) / sq);
  }
  return sup;
}

std::string ConvergenceReport::to_csv() const {
  std::string out = "eps,psi_id,pairing_full,pairing_limit,abs_err\n";
  char line[256];
  for (std::size_t ie = 0; ie < eps_ladder.size(); ++ie)
    for (std::size_t ip = 0; ip < psi_ids.size(); ++ip) {
      std::snprintf(line, sizeof(line), "%.17g,%s,%.17g,%.17g,%.17g\n",
                    eps_ladder[ie], psi_ids[ip].c_str(), pairing_full[ie][ip],
                    pairing_limit[ie][ip], abs_err[ie][ip]);
      out += line;
    }
  return out;
}

std::string ConvergenceReport::summary_csv() const {
  std::string out = "fitted_rate,uniform_bound,corrector_max_ratio\n";
  char line[128];
  std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", fitted_rate,
                uniform_bound, corrector_max_ratio);
  return out + line;
}

ConvergenceReport convergence_study(const Preset& preset,
                                    const std::vector<double>& eps_ladder,
                                    const std::vector<TestFunction>& psi_set,
                                    Grid grid, double T,
                                    const StudyOptions& opt) {
  if (eps_ladder.size() < 3)
    throw std::invalid_argument("convergence_study: ladder needs >= 3 entries");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0))
      throw std::invalid_argument("convergence_study: ladder must be positive");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
      throw std::invalid_argument(
          "convergence_study: ladder must be strictly decreasing");
  }
  if (psi_set.empty())
    throw std::invalid_argument("convergence_study: empty test-function set");
  if (!(T > 0.0))
    throw std::invalid_argument("convergence_study: T must be positive");
  if (preset.regime == Regime::Short && preset.c != 0.0)
    throw std::invalid_argument(
        "convergence_study: short-regime certification covers transport-free "
        "presets only (the tabulated limits exist for the long and mean "
        "hierarchies)");

  ConvergenceReport rep;
  rep.regime = preset.regime;
  rep.eps_ladder = eps_ladder;
  for (const TestFunction& psi : psi_set) rep.psi_ids.push_back(psi.id);

  ScalarField z0 = opt.z0.v.empty() ? default_initial_height(grid) : opt.z0;
  if (!(z0.grid == grid))
    throw std::invalid_argument("convergence_study: z0 grid mismatch");
  if (opt.well_prepared && preset.regime != Regime::Mean)
    throw std::invalid_argument(
        "convergence_study: well-prepared starts are defined for the "
        "mean-regime profile");

  // Tabulate the regime's limit once (it is eps-free).
  std::vector<double> t_nodes;
  for (int i = 0; i <= opt.limit_t_intervals; ++i)
    t_nodes.push_back(T * i / opt.limit_t_intervals);
  HomogenizedProfile long_prof;
  MeanTermProfile mean_prof;
  const double mass = integral_mean(z0);
  if (preset.regime == Regime::Long) {
    std::vector<double> th;
    for (int k = 0; k < opt.theta_nodes; ++k)
      th.push_back(static_cast<double>(k) / opt.theta_nodes);
    long_prof = build_longterm_profile(preset, t_nodes, th, z0,
                                       opt.profile_tol);
  } else if (preset.regime == Regime::Mean) {
    mean_prof = build_meanterm_profile(preset, t_nodes, opt.n_tau, grid,
                                       opt.theta_nodes, z0, opt.profile_tol);
    if (opt.well_prepared) {
      z0 = mean_prof.V[0][0][0];
      for (double& v : z0.v) v += mass;
    }
  }

  std::vector<double> limit_vals(psi_set.size(), 0.0);
  for (std::size_t ip = 0; ip < psi_set.size(); ++ip) {
    if (preset.regime == Regime::Long)
      limit_vals[ip] = limit_pairing(long_prof, psi_set[ip]);
    else if (preset.regime == Regime::Mean)
      limit_vals[ip] = limit_pairing(mean_prof, psi_set[ip]);
    else {
      // Transport-free short regime: the limit is the constant mass profile.
      std::vector<double> F;
      const double xf_mean = integral_mean(psi_set[ip].x_mode(grid));
      for (double t : t_nodes) {
        double th_avg = 0.0;
        const int mth = opt.theta_nodes;
        for (int k = 0; k < mth; ++k)
          th_avg += psi_set[ip].weight(t, 0.0, static_cast<double>(k) / mth);
        F.push_back(mass * xf_mean * th_avg / mth);
      }
      limit_vals[ip] = trapezoid(t_nodes, F);
    }
  }

  const bool with_corrector =
      preset.regime == Regime::Mean && preset.law.u_thr == 0.0;

  for (double eps : eps_ladder) {
    EvolutionProblem ep;
    ep.preset = preset;
    ep.eps = eps;
    ep.grid = grid;
    ep.T_final = T;
    ep.z0 = z0;
    ep.safety = opt.safety;
    ep.max_steps = opt.max_steps;
    ep.snapshot_dt = eps / opt.snapshots_per_period;
    const Trajectory traj = run_full(ep);
    rep.sup_l2.push_back(traj.sup_l2);
    if (traj.failed) {
      rep.partial = true;
      rep.notes.push_back("eps=" + std::to_string(eps) +
                          ": run failed (" + traj.failure + ")");
    }
    std::vector<double> full(psi_set.size()), err(psi_set.size());
    for (std::size_t ip = 0; ip < psi_set.size(); ++ip) {
      full[ip] = twoscale_pairing(traj, psi_set[ip], eps);
      err[ip] = std::abs(full[ip] - limit_vals[ip]);
    }
    rep.pairing_full.push_back(full);
    rep.pairing_limit.push_back(limit_vals);
    rep.abs_err.push_back(err);
    if (with_corrector)
      rep.corrector_ratios.push_back(corrector_norm(traj, mean_prof, eps));
  }

  // Reductions.
  double smin = rep.sup_l2[0], smax = rep.sup_l2[0];
  for (double s : rep.sup_l2) {
    smin = std::min(smin, s);
    smax = std::max(smax, s);
  }
  rep.uniform_bound = smax;
  rep.uniform_ratio = smin > 0.0 ? smax / smin : 0.0;
  if (!rep.corrector_ratios.empty()) {
    double cmin = rep.corrector_ratios[0], cmax = cmin;
    for (double c : rep.corrector_ratios) {
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
    rep.corrector_max_ratio = cmin > 0.0 ? cmax / cmin : 0.0;
  }
  const std::size_t ne = eps_ladder.size();
  rep.fitted_rate = 1e300;
  for (std::size_t ip = 0; ip < psi_set.size(); ++ip) {
    bool mono = true;
    for (std::size_t ie = 1; ie < ne; ++ie)
      mono = mono && rep.abs_err[ie][ip] < rep.abs_err[ie - 1][ip];
    rep.monotone_psi.push_back(mono);
    rep.monotone = rep.monotone && mono;
    // Least squares of log err on log eps, first (pre-asymptotic) point
    // dropped; errors floored to keep the fit finite at the quadrature floor.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t n = ne - 1;
    for (std::size_t ie = 1; ie < ne; ++ie) {
      const double x = std::log(eps_ladder[ie]);
      const double y = std::log(std::max(rep.abs_err[ie][ip], 1e-16));
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.fitted_rates.push_back(rate);
    rep.fitted_rate = std::min(rep.fitted_rate, rate);
  }
  return rep;
}

}  // namespace dunesim
