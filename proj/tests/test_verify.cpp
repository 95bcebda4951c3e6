#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dunesim/verify.hpp"

using namespace dunesim;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;  // 2*pi

// cos(2 pi k1 x1) mode field.
ScalarField cos_mode(Grid g, double amp) {
  ScalarField f(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) f(i, j) = amp * std::cos(kTau * i / g.n);
  return f;
}

Trajectory constant_trajectory(Grid g, double value, double T, int nsteps) {
  Trajectory traj;
  for (int i = 0; i <= nsteps; ++i) {
    traj.times.push_back(T * i / nsteps);
    traj.snapshots.emplace_back(g, value);
  }
  return traj;
}

TestFunction scalar_psi(double T) {  // x-free, theta-free: psi = bump(t)
  TestFunction p;
  p.id = "bump";
  p.T = T;
  return p;
}

}  // namespace

TEST_CASE("bump has unit plateau, smooth fall and exact integral") {
  TestFunction p = scalar_psi(0.5);
  CHECK(p.bump(0.0) == 1.0);
  CHECK(p.bump(0.3) == 1.0);           // inside the plateau [0, 0.65 T]
  CHECK(p.bump(0.46) == 0.0);          // beyond 0.9 T
  CHECK(p.bump(0.5) == 0.0);           // psi(T, .) = 0
  const double mid = p.bump(0.9 * 0.5 * 0.65 / 0.65);  // plateau edge
  CHECK(mid <= 1.0);
  // The fall is a cubic smoothstep: integral of the bump = 0.775 T exactly.
  const int N = 200000;
  double acc = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double w = (i == 0 || i == N) ? 0.5 : 1.0;
    acc += w * p.bump(0.5 * i / N);
  }
  acc *= 0.5 / N;
  CHECK(std::abs(acc - 0.775 * 0.5) < 1e-10);
}

TEST_CASE("test-function factors and spatial modes evaluate correctly") {
  TestFunction p;
  p.T = 1.0;
  p.theta_deg = 2;
  p.theta_sin = true;
  p.tau_deg = 1;
  CHECK(p.weight(0.1, 0.0, 0.125) ==
        doctest::Approx(std::sin(kTau * 0.25)).epsilon(1e-14));
  p.theta_sin = false;
  CHECK(p.weight(0.1, 0.5, 0.0) ==
        doctest::Approx(std::cos(kTau * 0.5)).epsilon(1e-14));
  const Grid g(8);
  p.k1 = 1;
  p.k2 = 1;
  const ScalarField f = p.x_mode(g);
  CHECK(f(1, 2) == doctest::Approx(std::cos(kTau * 3.0 / 8.0)).epsilon(1e-14));
  p.x_sin = true;
  CHECK(p.x_mode(g)(3, 0) ==
        doctest::Approx(std::sin(kTau * 3.0 / 8.0)).epsilon(1e-14));
  // sin factor of degree 0 annihilates the function.
  TestFunction z = scalar_psi(1.0);
  z.theta_sin = true;
  CHECK(z.weight(0.2, 0.3, 0.7) == 0.0);
}

TEST_CASE("bundled dictionary has mean-free x-modes and a tau member") {
  const auto lng = bundled_test_functions(Regime::Long, 0.5);
  CHECK(lng.size() == 5);
  const auto mean = bundled_test_functions(Regime::Mean, 0.5);
  CHECK(mean.size() == 6);
  CHECK(mean.back().tau_deg == 1);
  const Grid g(16);
  for (const auto& p : mean) {
    CHECK(std::abs(integral_mean(p.x_mode(g))) < 1e-14);
    CHECK(p.T == 0.5);
  }
}

TEST_CASE("pairing of a constant against the scalar bump is its integral") {
  const Grid g(8);
  const double T = 0.5, eps = 0.1;
  const Trajectory traj = constant_trajectory(g, 1.0, T, 1600);
  double warn = -1.0;
  const double val = twoscale_pairing(traj, scalar_psi(T), eps, &warn);
  CHECK(std::abs(val - 0.775 * T) < 1e-9);
  CHECK(warn == 0.0);
  // Zero test function pairs to exactly zero.
  TestFunction zero = scalar_psi(T);
  zero.theta_sin = true;  // sin of degree 0
  CHECK(twoscale_pairing(traj, zero, eps) == 0.0);
}

TEST_CASE("oscillating product converges to the half average") {
  const Grid g(8);
  const double T = 0.5;
  TestFunction psi = scalar_psi(T);
  psi.k1 = 1;
  psi.theta_deg = 1;
  psi.theta_sin = true;
  const double limit = 0.5 * 0.775 * T * 0.5;  // ½ ∫bump · ∫cos²
  double prev = 1e300;
  for (double eps : {0.2, 0.1, 0.05}) {
    Trajectory traj;
    const int nsteps = static_cast<int>(std::lround(64.0 * T / eps));
    for (int i = 0; i <= nsteps; ++i) {
      const double t = T * i / nsteps;
      traj.times.push_back(t);
      traj.snapshots.push_back(cos_mode(g, std::sin(kTau * t / eps)));
    }
    const double err = std::abs(twoscale_pairing(traj, psi, eps) - limit);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 2e-4);
}

TEST_CASE("pairing is linear in the test function and the trajectory") {
  const Grid g(8);
  const double T = 0.4, eps = 0.1;
  Trajectory t1, t2, mix;
  const int nsteps = 256;
  for (int i = 0; i <= nsteps; ++i) {
    const double t = T * i / nsteps;
    t1.times.push_back(t);
    t2.times.push_back(t);
    mix.times.push_back(t);
    t1.snapshots.push_back(cos_mode(g, 1.0 + t));
    t2.snapshots.push_back(cos_mode(g, std::sin(kTau * t / eps)));
    ScalarField m(g);
    for (std::size_t q = 0; q < m.v.size(); ++q)
      m.v[q] = 0.7 * t1.snapshots.back().v[q] - 1.9 * t2.snapshots.back().v[q];
    mix.snapshots.push_back(m);
  }
  TestFunction psi = scalar_psi(T);
  psi.k1 = 1;
  psi.theta_deg = 1;
  const double p1 = twoscale_pairing(t1, psi, eps);
  const double p2 = twoscale_pairing(t2, psi, eps);
  const double pm = twoscale_pairing(mix, psi, eps);
  CHECK(pm == doctest::Approx(0.7 * p1 - 1.9 * p2).epsilon(1e-13));
  TestFunction scaled = psi;
  scaled.amp = 3.75;
  CHECK(twoscale_pairing(t1, scaled, eps) ==
        doctest::Approx(3.75 * p1).epsilon(1e-14));
}

TEST_CASE("sparse snapshots trigger the quadrature warning") {
  const Grid g(8);
  const double T = 0.4, eps = 0.1;
  TestFunction psi = scalar_psi(T);
  psi.k1 = 1;
  psi.theta_deg = 1;
  const Trajectory sparse = constant_trajectory(g, 1.0, T, 8);  // dt = eps/2
  double warn = 0.0;
  twoscale_pairing(sparse, psi, eps, &warn);
  CHECK(warn > 0.0);
  const Trajectory dense = constant_trajectory(g, 1.0, T, 512);
  twoscale_pairing(dense, psi, eps, &warn);
  CHECK(warn == 0.0);
  CHECK_THROWS_AS(twoscale_pairing(sparse, psi, -0.1), std::invalid_argument);
  Trajectory one;
  one.times = {0.0};
  one.snapshots.emplace_back(g, 1.0);
  CHECK_THROWS_AS(twoscale_pairing(one, psi, eps), std::invalid_argument);
}

TEST_CASE("long-regime limit pairing integrates the tensor structure") {
  const Grid g(16);
  HomogenizedProfile prof;
  prof.mass = 2.0;
  const int nt = 21, m = 16;
  const double T = 0.5;
  for (int it = 0; it < nt; ++it) prof.t_nodes.push_back(T * it / (nt - 1));
  for (int k = 0; k < m; ++k)
    prof.theta_nodes.push_back(static_cast<double>(k) / m);
  for (int it = 0; it < nt; ++it) {
    std::vector<ScalarField> row;
    for (int k = 0; k < m; ++k) {
      ScalarField U(g, prof.mass);
      const double c = 0.3 * std::cos(kTau * k / m);
      for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
          U(i, j) += c * std::cos(kTau * i / g.n);
      row.push_back(std::move(U));
    }
    prof.U.push_back(std::move(row));
  }
  // psi theta-free and x-mean-free: only the mass term could contribute, and
  // it pairs to zero.
  TestFunction psi1 = scalar_psi(T);
  psi1.k1 = 1;
  CHECK(std::abs(limit_pairing(prof, psi1)) < 1e-13);
  // cos-theta pairing picks the cos branch: 0.775 T * (1/2) * 0.3 * (1/2).
  TestFunction psi2 = psi1;
  psi2.theta_deg = 1;
  CHECK(limit_pairing(prof, psi2) ==
        doctest::Approx(0.775 * T * 0.25 * 0.3).epsilon(1e-12));
  TestFunction tau_psi = psi2;
  tau_psi.tau_deg = 1;
  CHECK_THROWS_AS(limit_pairing(prof, tau_psi), std::invalid_argument);
  // Profile not covering the support is rejected.
  HomogenizedProfile shorty = prof;
  shorty.t_nodes.clear();
  for (int it = 0; it < nt; ++it) shorty.t_nodes.push_back(0.2 * T * it / (nt - 1));
  CHECK_THROWS_AS(limit_pairing(shorty, psi1), std::invalid_argument);
}

TEST_CASE("mean-regime limit pairing is tau-exact on replicated slices") {
  const Preset p = bundled_preset("drift-mean");
  const Grid g(16);
  const double T = 0.4;
  std::vector<double> tn;
  for (int i = 0; i <= 4; ++i) tn.push_back(T * i / 4);
  const ScalarField z0 = default_initial_height(g);
  const MeanTermProfile p4 = build_meanterm_profile(p, tn, 4, g, 16, z0, 1e-9);
  const MeanTermProfile p8 = build_meanterm_profile(p, tn, 8, g, 16, z0, 1e-9);
  const auto psis = bundled_test_functions(Regime::Mean, T);
  for (const auto& psi : psis) {
    const double a = limit_pairing(p4, psi);
    const double b = limit_pairing(p8, psi);
    CHECK(std::abs(a - b) < 1e-15);
    if (psi.tau_deg != 0) CHECK(std::abs(a) < 1e-15);  // tau-free slices
  }
}

TEST_CASE("corrector norm vanishes when the trajectory sits on the profile") {
  const Grid g(16);
  const double eps = 0.04;
  MeanTermProfile prof;
  prof.grid = g;
  prof.m_theta = 8;
  prof.mass = 1.5;
  prof.t_nodes = {0.0, 0.25, 0.5};
  prof.tau_nodes = {0.0, 0.5};
  ScalarField W(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) W(i, j) = 0.2 * std::sin(kTau * j / g.n);
  // Slices constant across (t, tau, theta): interpolation is exact.
  prof.V.assign(3, std::vector<std::vector<ScalarField>>(
                       2, std::vector<ScalarField>(8, W)));
  Trajectory traj;
  for (int i = 0; i <= 40; ++i) {
    traj.times.push_back(0.5 * i / 40);
    ScalarField z = W;
    for (double& v : z.v) v += prof.mass;
    traj.snapshots.push_back(std::move(z));
  }
  CHECK(corrector_norm(traj, prof, eps) < 1e-14);
  // Linear t-dependence is reproduced exactly by the linear interpolation.
  MeanTermProfile lin = prof;
  for (int it = 0; it < 3; ++it) {
    const double s = lin.t_nodes[it];
    for (auto& per_tau : lin.V[it])
      for (auto& slice : per_tau)
        for (double& v : slice.v) v *= s;
  }
  Trajectory tl;
  for (int i = 0; i <= 16; ++i) {
    const double t = 0.5 * i / 16;
    tl.times.push_back(t);
    ScalarField z = W;
    for (double& v : z.v) v = lin.mass + t * v;
    tl.snapshots.push_back(std::move(z));
  }
  CHECK(corrector_norm(tl, lin, eps) < 1e-13);
  // Grid and coverage mismatches are rejected.
  Trajectory wrong = constant_trajectory(Grid(8), 1.0, 0.5, 8);
  CHECK_THROWS_AS(corrector_norm(wrong, prof, eps), std::invalid_argument);
  Trajectory late = constant_trajectory(g, 1.0, 0.8, 8);
  CHECK_THROWS_AS(corrector_norm(late, prof, eps), std::invalid_argument);
}

TEST_CASE("stationary transport-free study sits at the quadrature floor") {
  const Grid g(16);
  const double T = 0.25;
  const Preset p = bundled_preset("uniform-short");
  auto psis = bundled_test_functions(Regime::Short, T);
  TestFunction xfree = scalar_psi(T);
  xfree.id = "xfree";
  xfree.theta_deg = 1;  // theta-oscillatory, x-free
  psis.push_back(xfree);
  StudyOptions opt;
  opt.z0 = ScalarField(g, 2.5);
  const auto rep = convergence_study(p, {0.2, 0.1, 0.05}, psis, g, T, opt);
  REQUIRE(rep.abs_err.size() == 3);
  for (std::size_t ie = 0; ie < rep.abs_err.size(); ++ie) {
    const auto& row = rep.abs_err[ie];
    // Constant state, mean-free spatial modes: pairings and limits both
    // vanish to rounding for the bundled dictionary.
    for (std::size_t ip = 0; ip + 1 < row.size(); ++ip) CHECK(row[ip] < 1e-12);
    // The x-free oscillatory member decays with eps: its pairing only
    // averages out at first order in the scale separation.
    CHECK(row.back() < 0.5 * rep.eps_ladder[ie]);
  }
  CHECK(rep.abs_err[2].back() < rep.abs_err[0].back());
  for (double s : rep.sup_l2) CHECK(s == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(rep.uniform_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(rep.partial);
}

TEST_CASE("mean-regime study reduces ladder statistics") {
  const Grid g(16);
  const double T = 0.25;
  const Preset p = bundled_preset("drift-mean");
  const auto psis = bundled_test_functions(Regime::Mean, T);
  StudyOptions opt;
  opt.limit_t_intervals = 16;
  opt.theta_nodes = 32;
  opt.n_tau = 4;
  const auto rep = convergence_study(p, {0.2, 0.1, 0.05}, psis, g, T, opt);
  CHECK(rep.regime == Regime::Mean);
  REQUIRE(rep.psi_ids.size() == 6);
  REQUIRE(rep.pairing_full.size() == 3);
  REQUIRE(rep.corrector_ratios.size() == 3);
  CHECK(rep.uniform_ratio <= 1.1);
  CHECK(rep.uniform_ratio >= 1.0);
  for (double c : rep.corrector_ratios) CHECK(c > 0.0);
  CHECK(rep.fitted_rates.size() == 6);
  // The theta-free member sees the strong limit: monotone decrease.
  CHECK(rep.monotone_psi[0]);
  // CSV shapes.
  const std::string csv = rep.to_csv();
  CHECK(csv.rfind("eps,psi_id,pairing_full,pairing_limit,abs_err\n", 0) == 0);
  std::size_t rows = 0;
  for (char c : csv) rows += c == '\n';
  CHECK(rows == 1 + 3 * 6);
  const std::string sum = rep.summary_csv();
  CHECK(sum.rfind("fitted_rate,uniform_bound,corrector_max_ratio\n", 0) == 0);
}

TEST_CASE("well-prepared start keeps the corrector ratio ladder flat") {
  const Grid g(16);
  const double T = 0.25;
  const Preset p = bundled_preset("drift-mean");
  const auto psis = bundled_test_functions(Regime::Mean, T);
  StudyOptions opt;
  opt.limit_t_intervals = 16;
  opt.theta_nodes = 32;
  opt.n_tau = 4;
  opt.well_prepared = true;
  const auto rep = convergence_study(p, {0.2, 0.1, 0.05}, psis, g, T, opt);
  REQUIRE(rep.corrector_ratios.size() == 3);
  CHECK(rep.corrector_max_ratio <= 2.0);
  CHECK(rep.corrector_max_ratio >= 1.0);
  // Starting on the profile removes the O(1) initial layer.
  for (double s : rep.sup_l2) CHECK(std::abs(s - 1.0) < 0.05);
}

TEST_CASE("study validates its configuration") {
  const Grid g(16);
  const auto psis = bundled_test_functions(Regime::Mean, 0.25);
  const Preset mean = bundled_preset("drift-mean");
  CHECK_THROWS_AS(convergence_study(mean, {0.2, 0.1}, psis, g, 0.25),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(mean, {0.1, 0.2, 0.4}, psis, g, 0.25),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(mean, {0.2, 0.1, 0.05}, {}, g, 0.25),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      convergence_study(bundled_preset("tidal-short"), {0.2, 0.1, 0.05}, psis,
                        g, 0.25),
      std::invalid_argument);
  StudyOptions wp;
  wp.well_prepared = true;
  CHECK_THROWS_AS(convergence_study(bundled_preset("tidal-long"),
                                    {0.2, 0.1, 0.05},
                                    bundled_test_functions(Regime::Long, 0.25),
                                    g, 0.25, wp),
                  std::invalid_argument);
}

TEST_CASE("failed ladder members mark the report partial") {
  const Grid g(16);
  const double T = 0.25;
  auto psis = bundled_test_functions(Regime::Short, T);
  StudyOptions opt;
  opt.z0 = ScalarField(g, 1.0);
  opt.max_steps = 10;
  const auto rep = convergence_study(bundled_preset("uniform-short"),
                                     {0.2, 0.1, 0.05}, psis, g, T, opt);
  CHECK(rep.partial);
  CHECK_FALSE(rep.notes.empty());
}
