#pragma once

// Certification of the scale-separation limits.  Empirical multi-scale
// pairings of simulated trajectories are compared against tabulated limit
// profiles over a decreasing-epsilon ladder; the module also tracks the
// epsilon-uniform norm statistic and the sqrt(eps)-normalized distance
// between a trajectory and the oscillatory reconstruction of its limit
// profile.

#include <string>
#include <vector>

#include "dunesim/evolve.hpp"
#include "dunesim/homogenized.hpp"

namespace dunesim {

// Separable trig test function
//   psi(t, tau, theta, x) = amp * bump(t) * f_theta(theta) * f_tau(tau) * m(x)
// with bump equal to 1 on [0, 0.65 T], smoothly falling to 0 at 0.9 T and
// vanishing beyond (so psi(T, .) = 0 and all t-derivatives vanish at both
// horizon ends); f_* = cos/sin(2 pi deg u) and m(x) = cos/sin(2 pi (k1 x1 +
// k2 x2)).  deg = 0 gives the constant 1 for cos and identically 0 for sin.
struct TestFunction {
  std::string id;
  double T = 1.0;    // support horizon; bump vanishes from 0.9 T on
  double amp = 1.0;
  int k1 = 0, k2 = 0;      // spatial mode
  bool x_sin = false;      // sin instead of cos in x
  int theta_deg = 0;       // fast-phase harmonic
  bool theta_sin = false;
  int tau_deg = 0;         // intermediate-phase harmonic (three-scale)
  bool tau_sin = false;

  double bump(double t) const;
  // amp * bump * f_theta * f_tau (no spatial part).
  double weight(double t, double tau, double theta) const;
  ScalarField x_mode(Grid g) const;
};

// Bundled dictionary: five two-scale members (theta harmonics 0..2, spatial
// modes |k| <= 2) plus, for the mean regime, one tau-dependent member.
std::vector<TestFunction> bundled_test_functions(Regime r, double T);

// Trapezoid-in-time, exact-in-space quadrature of
//   int_0^T int z(t,x) psi(t, t/sqrt(eps), t/eps, x) dx dt
// over the trajectory snapshots.  If the snapshot spacing exceeds eps/8
// (fewer than 8 samples per fast period) and quad_warning is non-null, an
// estimate of the oscillatory quadrature error is stored there (0 when the
// sampling is dense enough).
double twoscale_pairing(const Trajectory& traj, const TestFunction& psi,
                        double eps, double* quad_warning = nullptr);

// Tensor quadrature of int_0^T int_0^1 int U psi dx dtheta dt over the
// tabulated long-regime profile (trapezoid in t, periodic trapezoid in
// theta, exact in x).  Rejects tau-dependent psi.
double limit_pairing(const HomogenizedProfile& prof, const TestFunction& psi);
// Mean-regime version with the additional tau average.
double limit_pairing(const MeanTermProfile& prof, const TestFunction& psi);

// sup over snapshot times of
//   l2_norm( z(t) - [mass + V](t, t/sqrt(eps) mod 1, t/eps mod 1, .) ) / sqrt(eps)
// with linear interpolation in t over the profile's t-nodes and bilinear
// periodic interpolation in (tau, theta).
double corrector_norm(const Trajectory& traj, const MeanTermProfile& prof,
                      double eps);

struct ConvergenceReport {
  Regime regime = Regime::Long;
  std::vector<double> eps_ladder;
  std::vector<std::string> psi_ids;
  // Indexed [ladder][psi].
  std::vector<std::vector<double>> pairing_full, pairing_limit, abs_err;
  std::vector<double> sup_l2;            // per ladder member: sup_t ||z||_2
  std::vector<double> corrector_ratios;  // mean regime with u_thr = 0 only
  std::vector<double> fitted_rates;      // per psi, first ladder point dropped
  double fitted_rate = 0.0;              // min over psi
  double uniform_bound = 0.0;            // max over ladder of sup_l2
  double uniform_ratio = 1.0;            // max/min of sup_l2
  double corrector_max_ratio = 0.0;      // max/min of corrector_ratios
  std::vector<bool> monotone_psi;        // per psi: abs_err strictly decreasing
  bool monotone = true;
  bool partial = false;                  // some ladder member failed
  std::vector<std::string> notes;

  std::string to_csv() const;       // eps,psi_id,pairing_full,pairing_limit,abs_err
  std::string summary_csv() const;  // fitted_rate,uniform_bound,corrector_max_ratio
};

struct StudyOptions {
  int limit_t_intervals = 32;  // t-resolution of the tabulated limit
  int theta_nodes = 32;        // theta nodes of the limit profile
  int n_tau = 8;               // tau nodes (mean regime)
  double profile_tol = 1e-9;   // limit-solve tolerance
  double safety = 0.8;         // stability fraction for the evolution runs
  long max_steps = 60000000;
  int snapshots_per_period = 32;  // snapshot cadence: eps / this
  // Mean regime only: start on the limit profile (z0 = mass + V(0,0,0,.))
  // instead of the bundled height, eliminating the O(1) initial layer the
  // corrector estimate does not cover.
  bool well_prepared = false;
  ScalarField z0;  // empty: bundled initial height
};

// Runs the evolution once per ladder member (snapshot cadence eps/32),
// tabulates the regime's limit profile once, and reduces pairing errors,
// rates, uniform-norm statistics and (mean regime, threshold-free law)
// corrector ratios into a report.  Supported: long and mean regimes, plus
// transport-free short-regime presets (whose limit is the constant mass).
ConvergenceReport convergence_study(const Preset& preset,
                                    const std::vector<double>& eps_ladder,
                                    const std::vector<TestFunction>& psi_set,
                                    Grid grid, double T,
                                    const StudyOptions& opt = {});

}  // namespace dunesim
