#include "dunesim/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "dunesim/spectral.hpp"
#include "dunesim/stepper.hpp"

namespace dunesim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void validate_problem(const EvolutionProblem& p) {
  if (!(p.eps > 0.0))
    throw std::invalid_argument("evolve: eps must be positive");
  if (!(p.T_final > 0.0))
    throw std::invalid_argument("evolve: T_final must be positive");
  if (p.z0.grid.n != p.grid.n)
    throw std::invalid_argument("evolve: z0 grid does not match problem grid");
  if (!(p.safety > 0.0) || p.safety > 1.0)
    throw std::invalid_argument("evolve: safety must lie in (0, 1]");
  ensure_finite(p.z0, "evolve z0");
}

// Stability-limited step before cadence snapping.  The finite-difference
// branch uses the explicit-Euler bound of the flux stencil so that run_full
// in FiniteDifference mode and the dense reference land on identical steps.
double stability_dt(const EvolutionProblem& p, const CoefficientScan& sc,
                    bool fd) {
  const double epsp = std::pow(p.eps, regime_power(p.preset.regime));
  double dt;
  if (fd) {
    const double h = 1.0 / p.grid.n;
    dt = epsp * h * h / (8.0 * std::max(sc.Amax, 1e-12));
  } else {
    const double khalf = p.grid.n / 2.0;
    const double dev = 0.5 * (sc.Amax - sc.Amin);
    dt = p.safety * epsp /
         (dev * kTwoPi * kTwoPi * khalf * khalf + sc.max_divC * kTwoPi * khalf +
          1.0);
  }
  dt = std::min(dt, p.eps / 32.0);
  dt = std::min(dt, p.T_final / 8.0);
  return dt;
}

// dt is snapped so that an integer number m of steps spans each snapshot
// interval q, and q divides T_final exactly.
struct StepPlan {
  double q = 0.0, dt = 0.0;
  long nsnap = 1, m = 1, N = 1;
};

StepPlan make_plan(const EvolutionProblem& p, double dt0) {
  StepPlan pl;
  if (p.snapshot_dt > 0.0) {
    pl.nsnap = std::llround(p.T_final / p.snapshot_dt);
    if (pl.nsnap < 1) pl.nsnap = 1;
  }
  pl.q = p.T_final / pl.nsnap;
  pl.m = static_cast<long>(std::ceil(pl.q / dt0 - 1e-12));
  if (pl.m < 1) pl.m = 1;
  pl.dt = pl.q / pl.m;
  pl.N = pl.m * pl.nsnap;
  return pl;
}

enum class Path { Spectral, Fd, Dense };

// Dense row-major operator of the flux stencil: rhs = L z + d.
void dense_operator(const ScalarField& A, const VectorField& C,
                    std::vector<double>& L, std::vector<double>& d) {
  const int n = A.grid.n;
  const int NN = n * n;
  const double ih2 = static_cast<double>(n) * n;
  const double i2h = 0.5 * n;
  L.assign(static_cast<std::size_t>(NN) * NN, 0.0);
  d.assign(NN, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int r = i * n + j;
      const int ip = (i + 1) % n, im = (i + n - 1) % n;
      const int jp = (j + 1) % n, jm = (j + n - 1) % n;
      const double ae = 0.5 * (A(i, j) + A(ip, j));
      const double aw = 0.5 * (A(i, j) + A(im, j));
      const double an = 0.5 * (A(i, j) + A(i, jp));
      const double as = 0.5 * (A(i, j) + A(i, jm));
      double* row = L.data() + static_cast<std::size_t>(r) * NN;
      row[ip * n + j] += ae * ih2;
      row[im * n + j] += aw * ih2;
      row[i * n + jp] += an * ih2;
      row[i * n + jm] += as * ih2;
      row[r] -= (ae + aw + an + as) * ih2;
      d[r] = (C.x1(ip, j) - C.x1(im, j)) * i2h +
             (C.x2(i, jp) - C.x2(i, jm)) * i2h;
    }
}

// One attempt at the full march.  Returns false when the state goes
// non-finite (caller halves the step and retries); a true return may still
// carry failed=true when the step budget truncated the run.
bool attempt_run(const EvolutionProblem& p, const PresetSampler& sampler,
                 const CoefficientScan& sc, const StepPlan& pl, Path path,
                 Trajectory& out) {
  const Grid g = p.grid;
  const double eps = p.eps;
  const double sqe = std::sqrt(eps);
  const double scale = 1.0 / std::pow(eps, regime_power(p.preset.regime));
  const bool mean = p.preset.regime == Regime::Mean;

  long N = pl.N;
  bool budget = false;
  if (N > p.max_steps) {
    N = (p.max_steps / pl.m) * pl.m;  // whole snapshot intervals only
    budget = true;
  }

  out = Trajectory{};
  out.dt = pl.dt;
  out.abar = 0.5 * (sc.Amax + sc.Amin);
  out.max_dev = 0.5 * (sc.Amax - sc.Amin);
  out.max_divC = sc.max_divC;
  out.mass0 = integral_mean(p.z0);
  out.series_stride =
      N > 200000 ? static_cast<int>((N + 199999) / 200000) : 1;
  const double mden = std::max(std::abs(out.mass0), 1e-14);

  ScalarField A(g), M(g), z = p.z0, rhs(g);
  VectorField C(g), U(g);
  Spectrum zhat;
  ImexStepper stepper(g, scale, out.abar, pl.dt);
  std::vector<double> L, d, zv, zn;
  if (path == Path::Spectral) {
    zhat = fft(p.z0);
  } else if (path == Path::Dense) {
    zv.assign(z.v.begin(), z.v.end());
    zn.resize(zv.size());
  }

  const double l20 = l2_norm(p.z0);
  out.sup_l2 = l20;
  out.series_step.push_back(0);
  out.series_t.push_back(0.0);
  out.mass_series.push_back(out.mass0);
  out.l2_series.push_back(l20);
  out.times.push_back(0.0);
  out.snapshots.push_back(p.z0);

  const int NN = g.n * g.n;
  for (long k = 0; k < N; ++k) {
    // Midpoint coefficients for the exponential step, left endpoint for the
    // Euler paths (the dense oracle freezes coefficients the same way).
    const double tc = path == Path::Spectral ? (k + 0.5) * pl.dt : k * pl.dt;
    const double theta = tc / eps;
    const double tau = mean ? tc / sqe : 0.0;
    assemble_AC_into(sampler, tc, tau, theta, eps, A, C, U, M);

    double mass, l2v;
    if (path == Path::Spectral) {
      stepper.step(zhat, A, C, nullptr, false);
      mass = zhat.at(0, 0).real();
      l2v = parseval_l2(zhat);
    } else if (path == Path::Fd) {
      fd_flux_rhs(A, C, z, rhs);
      const double w = pl.dt * scale;
      for (std::size_t idx = 0; idx < z.v.size(); ++idx)
        z.v[idx] += w * rhs.v[idx];
      mass = integral_mean(z);
      l2v = l2_norm(z);
    } else {
      dense_operator(A, C, L, d);
      const double w = pl.dt * scale;
      double sum = 0.0, sq = 0.0;
      for (int r = 0; r < NN; ++r) {
        const double* row = L.data() + static_cast<std::size_t>(r) * NN;
        double acc = d[r];
        for (int s = 0; s < NN; ++s) acc += row[s] * zv[s];
        const double val = zv[r] + w * acc;
        zn[r] = val;
        sum += val;
        sq += val * val;
      }
      zv.swap(zn);
      mass = sum / NN;
      l2v = std::sqrt(sq / NN);
    }
    if (!std::isfinite(mass) || !std::isfinite(l2v)) {
      out.failed = true;
      out.failure = "non-finite state at step " + std::to_string(k + 1);
      return false;
    }

    out.sup_l2 = std::max(out.sup_l2, l2v);
    out.mass_drift_rel =
        std::max(out.mass_drift_rel, std::abs(mass - out.mass0) / mden);

    const long k1 = k + 1;
    const double t1 = k1 * pl.dt;
    if (k1 % out.series_stride == 0 || k1 == N) {
      out.series_step.push_back(k1);
      out.series_t.push_back(t1);
      out.mass_series.push_back(mass);
      out.l2_series.push_back(l2v);
    }
    if (k1 % pl.m == 0) {
      if (path == Path::Spectral) {
        ifft_into(zhat, z);
      } else if (path == Path::Dense) {
        std::copy(zv.begin(), zv.end(), z.v.begin());
      }
      ensure_finite(z, "evolve snapshot");
      out.times.push_back(static_cast<double>(k1 / pl.m) * pl.q);
      out.snapshots.push_back(z);
      // Fold the materialized field's mean into the drift statistic so the
      // conservation claim covers the physical-space output as well.
      out.mass_drift_rel = std::max(
          out.mass_drift_rel, std::abs(integral_mean(z) - out.mass0) / mden);
    }
  }
  out.steps = N;
  if (budget) {
    out.failed = true;
    out.failure = "step budget exceeded after " + std::to_string(N) +
                  " steps; trajectory is partial";
  }
  return true;
}

Trajectory drive(const EvolutionProblem& p, Path path) {
  validate_problem(p);
  const PresetSampler sampler(p.preset, p.grid);
  const CoefficientScan sc = scan_coefficients(sampler, p.eps);
  const bool fd = path != Path::Spectral;
  const double dt0 =
      p.dt_override > 0.0 ? p.dt_override : stability_dt(p, sc, fd);
  StepPlan pl = make_plan(p, dt0);
  Trajectory out;
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt_run(p, sampler, sc, pl, path, out)) return out;
    pl.m *= 2;
    pl.dt = pl.q / pl.m;
    pl.N = pl.m * pl.nsnap;
  }
  out.failure += "; retries with halved step exhausted";
  return out;
}

}  // namespace

CoefficientScan scan_coefficients(const PresetSampler& s, double eps) {
  const Grid g = s.grid();
  const SamplingSpec spec;
  const bool mean = s.preset().regime == Regime::Mean;
  const int nt = spec.nt, ntau = mean ? spec.ntau : 1, nth = spec.ntheta;
  ScalarField A(g), M(g);
  VectorField C(g), U(g);
  CoefficientScan out;
  out.Amin = std::numeric_limits<double>::infinity();
  for (int it = 0; it < nt; ++it)
    for (int jt = 0; jt < ntau; ++jt)
      for (int kt = 0; kt < nth; ++kt) {
        const double t = static_cast<double>(it) / nt;
        const double tau = static_cast<double>(jt) / ntau;
        const double theta = static_cast<double>(kt) / nth;
        assemble_AC_into(s, t, tau, theta, eps, A, C, U, M);
        for (double a : A.v) {
          out.Amin = std::min(out.Amin, a);
          out.Amax = std::max(out.Amax, a);
        }
        out.max_divC =
            std::max(out.max_divC, linf_norm(spectral_divergence(C)));
      }
  return out;
}

ScalarField step_imex(const EvolutionProblem& p, const ScalarField& z,
                      double t, double dt) {
  if (z.grid.n != p.grid.n)
    throw std::invalid_argument("step_imex: state grid mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("step_imex: dt must be positive");
  if (!(p.eps > 0.0))
    throw std::invalid_argument("step_imex: eps must be positive");
  const PresetSampler sampler(p.preset, p.grid);
  const double eps = p.eps;
  const double scale = 1.0 / std::pow(eps, regime_power(p.preset.regime));
  const double tc = t + 0.5 * dt;
  const double theta = tc / eps;
  const double tau =
      p.preset.regime == Regime::Mean ? tc / std::sqrt(eps) : 0.0;
  const CoeffPair ac = assemble_AC(sampler, tc, tau, theta, eps);
  double amin = ac.A.v[0], amax = ac.A.v[0];
  for (double a : ac.A.v) {
    amin = std::min(amin, a);
    amax = std::max(amax, a);
  }
  ImexStepper stepper(p.grid, scale, 0.5 * (amax + amin), dt);
  Spectrum zhat = fft(z);
  stepper.step(zhat, ac.A, ac.C, nullptr, false);
  return ifft(zhat);
}

Trajectory run_full(const EvolutionProblem& p) {
  return drive(p, p.mode == EvolveMode::FiniteDifference ? Path::Fd
                                                         : Path::Spectral);
}

Trajectory reference_solve_dense(const EvolutionProblem& p) {
  if (p.grid.n > 16)
    throw std::invalid_argument(
        "reference_solve_dense: dense assembly is limited to n <= 16");
  return drive(p, Path::Dense);
}

}  // namespace dunesim
