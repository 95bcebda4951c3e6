#include "dunesim/homogenized.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "dunesim/dsf.hpp"
#include "dunesim/spectral.hpp"

namespace dunesim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// -div(A grad v), spectral derivatives with pointwise coefficient product.
ScalarField apply_elliptic(const ScalarField& A, const ScalarField& v) {
  VectorField g = spectral_gradient(v);
  for (std::size_t i = 0; i < g.x1.v.size(); ++i) {
    g.x1.v[i] *= A.v[i];
    g.x2.v[i] *= A.v[i];
  }
  ScalarField out = spectral_divergence(g);
  for (double& x : out.v) x = -x;
  return out;
}

double dot_mean(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
  return s / a.v.size();
}

// z = (-Amean Laplace)^{-1} r on the mean-zero subspace.
ScalarField precondition(const ScalarField& r, double amean) {
  const Grid g = r.grid;
  Spectrum s = fft(r);
  const int n = g.n;
  for (int i = 0; i < n; ++i) {
    const int k1 = wavenumber(i, n);
    for (int j = 0; j < n / 2 + 1; ++j) {
      const double k2 = kTwoPi * kTwoPi * (static_cast<double>(k1) * k1 +
                                           static_cast<double>(j) * j);
      if (k2 > 0.0)
        s.at(i, j) /= amean * k2;
      else
        s.at(i, j) = 0.0;
    }
  }
  return ifft(s);
}

void check_mean_preset(const Preset& p, const char* op) {
  if (p.regime != Regime::Mean)
    throw std::invalid_argument(std::string(op) +
                                ": requires a mean-regime preset");
}

}  // namespace

ScalarField solve_elliptic_slice(const ScalarField& Atilde,
                                 const VectorField& Ctilde, double tol) {
  require_same_grid(Atilde.grid, Ctilde.grid(), "solve_elliptic_slice");
  if (!(tol > 0.0))
    throw std::invalid_argument("solve_elliptic_slice: tol must be positive");
  const Grid g = Atilde.grid;
  double amin = Atilde.v[0], amax = Atilde.v[0];
  for (double a : Atilde.v) {
    amin = std::min(amin, a);
    amax = std::max(amax, a);
  }
  ScalarField rhs = spectral_divergence(Ctilde);
  const bool xconst = amax - amin <= 1e-12 * std::max(1.0, std::abs(amax));
  if (xconst && linf_norm(rhs) <= 1e-12) return ScalarField(g);
  if (amin <= 0.0)
    throw std::invalid_argument(
        "solve_elliptic_slice: diffusion vanishes somewhere but the slice is "
        "not the degenerate x-constant/source-free case; classify the node "
        "(degenerate or threshold nodes take V = 0) instead of solving");

  const double amean = integral_mean(Atilde);
  ScalarField x(g), r = rhs;
  ScalarField z = precondition(r, amean);
  ScalarField p = z, Lp(g);
  double rz = dot_mean(r, z);
  const int maxit = 400 + 10 * g.n;
  for (int it = 0; it < maxit; ++it) {
    if (l2_norm(r) <= tol) return x;
    Lp = apply_elliptic(Atilde, p);
    const double alpha = rz / dot_mean(p, Lp);
    axpy(alpha, p, x);
    axpy(-alpha, Lp, r);
    z = precondition(r, amean);
    const double rz_new = dot_mean(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.v.size(); ++i)
      p.v[i] = z.v[i] + beta * p.v[i];
  }
  if (l2_norm(r) <= tol) return x;
  throw std::runtime_error(
      "solve_elliptic_slice: conjugate gradient failed to reach tolerance");
}

ScalarField elliptic_residual(const ScalarField& Atilde,
                              const VectorField& Ctilde, const ScalarField& V) {
  ScalarField res = apply_elliptic(Atilde, V);
  const ScalarField rhs = spectral_divergence(Ctilde);
  for (std::size_t i = 0; i < res.v.size(); ++i) res.v[i] -= rhs.v[i];
  return res;
}

HomogenizedProfile build_longterm_profile(const Preset& preset,
                                          const std::vector<double>& t_nodes,
                                          const std::vector<double>& theta_nodes,
                                          const ScalarField& z0, double tol) {
  if (preset.regime != Regime::Long)
    throw std::invalid_argument(
        "build_longterm_profile: requires a long-regime preset");
  if (t_nodes.empty() || theta_nodes.empty())
    throw std::invalid_argument("build_longterm_profile: empty node list");
  const Grid g = z0.grid;
  const PresetSampler s(preset, g);
  HomogenizedProfile prof;
  prof.regime = Regime::Long;
  prof.t_nodes = t_nodes;
  prof.theta_nodes = theta_nodes;
  prof.mass = integral_mean(z0);
  const int nth = static_cast<int>(theta_nodes.size());
  for (double t : t_nodes) {
    std::vector<ScalarField> row;
    std::vector<ThetaClass> labels;
    for (double theta : theta_nodes) {
      // Classification of the limit structure: sample at eps = 0.
      const ThetaClass cls = classify_theta(preset, t, theta, 0.0, g.n);
      labels.push_back(cls);
      ScalarField V(g);
      if (cls != ThetaClass::Degenerate) {
        const LimitCoeffs lc = limit_AC(s, t, 0.0, theta);
        V = solve_elliptic_slice(lc.A, lc.C, tol);
      }
      for (double& v : V.v) v += prof.mass;
      row.push_back(std::move(V));
    }
    // A degenerate arc is only determined by continuity with an adjacent
    // threshold window; reject configurations where none exists.
    bool any_nondeg = false;
    for (ThetaClass c : labels) any_nondeg |= (c != ThetaClass::Degenerate);
    for (int k = 0; k < nth; ++k) {
      if (labels[k] != ThetaClass::Degenerate) continue;
      if (!any_nondeg)
        throw std::runtime_error(
            "build_longterm_profile: every theta node is degenerate; the "
            "profile is undetermined");
      int l = k, r = k;
      while (labels[l] == ThetaClass::Degenerate) l = (l + nth - 1) % nth;
      while (labels[r] == ThetaClass::Degenerate) r = (r + 1) % nth;
      if (labels[l] != ThetaClass::Threshold &&
          labels[r] != ThetaClass::Threshold)
        throw std::runtime_error(
            "build_longterm_profile: degenerate theta-arc is not adjacent to "
            "a threshold window; the profile there is undetermined");
    }
    prof.U.push_back(std::move(row));
    prof.theta_labels.push_back(std::move(labels));
  }
  return prof;
}

std::vector<ScalarField> solve_meanterm_profile(const Preset& preset, double t,
                                                double tau, Grid g,
                                                int m_theta, double tol) {
  check_mean_preset(preset, "solve_meanterm_profile");
  const PresetSampler s(preset, g);
  ThetaProblem p;
  p.grid = g;
  p.m_theta = m_theta;
  p.lambda = 1.0;
  double amin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m_theta; ++k) {
    LimitCoeffs lc = limit_AC(s, t, tau, static_cast<double>(k) / m_theta);
    for (double a : lc.A.v) amin = std::min(amin, a);
    p.A.push_back(std::move(lc.A));
    p.C.push_back(std::move(lc.C));
  }
  CellSolution sol;
  bool have = false;
  for (double nu : {1e-1, 3e-2, 1e-2}) {
    p.nu = nu;
    sol = solve_theta_periodic(p, tol, have ? &sol : nullptr);
    have = true;
  }
  if (amin > 0.0) {
    p.nu = 0.0;
    sol = solve_theta_periodic(p, tol, &sol);
  }
  return sol.S;
}

MeanTermProfile build_meanterm_profile(const Preset& preset,
                                       const std::vector<double>& t_nodes,
                                       int n_tau, Grid g, int m_theta,
                                       const ScalarField& z0, double tol) {
  check_mean_preset(preset, "build_meanterm_profile");
  if (t_nodes.empty() || n_tau < 1)
    throw std::invalid_argument("build_meanterm_profile: empty node grid");
  MeanTermProfile prof;
  prof.t_nodes = t_nodes;
  for (int j = 0; j < n_tau; ++j)
    prof.tau_nodes.push_back(static_cast<double>(j) / n_tau);
  prof.m_theta = m_theta;
  prof.grid = g;
  prof.mass = integral_mean(z0);
  for (double t : t_nodes) {
    // The limit coefficients are tau-free, so one theta-solve per t suffices;
    // the slices are replicated across the tau grid.
    std::vector<ScalarField> slices =
        solve_meanterm_profile(preset, t, 0.0, g, m_theta, tol);
    prof.V.push_back(
        std::vector<std::vector<ScalarField>>(n_tau, slices));
  }
  return prof;
}

std::vector<ScalarField> dtau_spectral(const std::vector<ScalarField>& samples,
                                       bool* drift_warning) {
  if (samples.size() < 3)
    throw std::invalid_argument(
        "dtau_spectral: need at least 2 tau-intervals plus the closing "
        "duplicate");
  const int m = static_cast<int>(samples.size()) - 1;
  const Grid g = samples[0].grid;
  if (drift_warning) *drift_warning = false;
  double drift = 0.0;
  for (std::size_t i = 0; i < samples[0].v.size(); ++i)
    drift = std::max(drift,
                     std::abs(samples[m].v[i] - samples[0].v[i]));
  if (drift > 1e-8 && drift_warning) *drift_warning = true;

  std::vector<ScalarField> out(samples.size(), ScalarField(g));
  std::vector<double> series(m);
  for (std::size_t idx = 0; idx < samples[0].v.size(); ++idx) {
    for (int j = 0; j < m; ++j) series[j] = samples[j].v[idx];
    const std::vector<double> d = spectral_derivative_periodic(series, 1.0);
    for (int j = 0; j < m; ++j) out[j].v[idx] = d[j];
    out[m].v[idx] = d[0];
  }
  return out;
}

CorrectorProfile solve_corrector_profile(const Preset& preset,
                                         const MeanTermProfile& U,
                                         double tol) {
  check_mean_preset(preset, "solve_corrector_profile");
  if (preset.law.u_thr != 0.0)
    throw std::invalid_argument(
        "solve_corrector_profile: requires a threshold-free transport law "
        "(u_thr = 0)");
  if (U.V.empty() || U.V[0].empty())
    throw std::invalid_argument("solve_corrector_profile: empty profile");
  const Grid g = U.grid;
  const int m = U.m_theta;
  const int n_tau = static_cast<int>(U.tau_nodes.size());
  const PresetSampler s(preset, g);

  CorrectorProfile cp;
  cp.t_nodes = U.t_nodes;
  cp.tau_nodes = U.tau_nodes;
  cp.m_theta = m;
  cp.grid = g;

  for (std::size_t it = 0; it < U.t_nodes.size(); ++it) {
    const double t = U.t_nodes[it];
    // dU/dtau per theta node across the tau grid (periodic, closed series).
    std::vector<std::vector<ScalarField>> dUdtau(
        n_tau, std::vector<ScalarField>());
    for (int k = 0; k < m; ++k) {
      std::vector<ScalarField> ser;
      ser.reserve(n_tau + 1);
      for (int j = 0; j < n_tau; ++j) ser.push_back(U.V[it][j][k]);
      ser.push_back(U.V[it][0][k]);
      const std::vector<ScalarField> d = dtau_spectral(ser);
      for (int j = 0; j < n_tau; ++j) dUdtau[j].push_back(d[j]);
    }

    std::vector<std::vector<ScalarField>> per_tau;
    for (int j = 0; j < n_tau; ++j) {
      const double tau = U.tau_nodes[j];
      ThetaProblem p;
      p.grid = g;
      p.m_theta = m;
      p.lambda = 1.0;
      p.nu = 0.0;
      double amin = std::numeric_limits<double>::infinity();
      for (int k = 0; k < m; ++k) {
        LimitCoeffs lc = limit_AC(s, t, tau, static_cast<double>(k) / m);
        for (double a : lc.A.v) amin = std::min(amin, a);
        const VectorField gradU = spectral_gradient(U.V[it][j][k]);
        VectorField Ck(g);
        for (std::size_t i = 0; i < Ck.x1.v.size(); ++i) {
          Ck.x1.v[i] = lc.C1.x1.v[i] + lc.A1.v[i] * gradU.x1.v[i];
          Ck.x2.v[i] = lc.C1.x2.v[i] + lc.A1.v[i] * gradU.x2.v[i];
        }
        ScalarField fk(g);
        const ScalarField& du = dUdtau[j][k];
        for (std::size_t i = 0; i < fk.v.size(); ++i) fk.v[i] = -du.v[i];
        const double residue = integral_mean(fk);
        cp.max_projection_residue =
            std::max(cp.max_projection_residue, std::abs(residue));
        for (double& v : fk.v) v -= residue;
        p.A.push_back(std::move(lc.A));
        p.C.push_back(std::move(Ck));
        p.f.push_back(std::move(fk));
      }
      if (!(amin > 0.0)) p.nu = 1e-2;  // fall back to a viscous solve
      const CellSolution sol = solve_theta_periodic(p, tol);
      per_tau.push_back(sol.S);
    }
    cp.U_half.push_back(std::move(per_tau));
  }
  cp.residue_flagged = cp.max_projection_residue > 1e-6;
  return cp;
}

int dump_longterm_profile(const HomogenizedProfile& prof,
                          const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::string manifest = "index_t,t,filename\n";
  int count = 0;
  char buf[160];
  for (std::size_t it = 0; it < prof.t_nodes.size(); ++it) {
    std::snprintf(buf, sizeof(buf), "longterm_t%03zu.dsf1", it);
    write_dsf1(dir + "/" + buf, prof.U[it]);
    char line[200];
    std::snprintf(line, sizeof(line), "%zu,%.17g,%s\n", it, prof.t_nodes[it],
                  buf);
    manifest += line;
    ++count;
  }
  std::FILE* f = std::fopen((dir + "/manifest.csv").c_str(), "wb");
  if (!f) throw std::runtime_error("dump_longterm_profile: cannot write manifest");
  std::fwrite(manifest.data(), 1, manifest.size(), f);
  std::fclose(f);
  return count;
}

int dump_meanterm_profile(const MeanTermProfile& prof, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::string manifest = "index_t,t,index_tau,tau,filename\n";
  int count = 0;
  char buf[160];
  for (std::size_t it = 0; it < prof.t_nodes.size(); ++it)
    for (std::size_t j = 0; j < prof.tau_nodes.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "meanterm_t%03zu_tau%03zu.dsf1", it, j);
      std::vector<ScalarField> full = prof.V[it][j];
      for (ScalarField& fld : full)
        for (double& v : fld.v) v += prof.mass;
      write_dsf1(dir + "/" + buf, full);
      char line[220];
      std::snprintf(line, sizeof(line), "%zu,%.17g,%zu,%.17g,%s\n", it,
                    prof.t_nodes[it], j, prof.tau_nodes[j], buf);
      manifest += line;
      ++count;
    }
  std::FILE* f = std::fopen((dir + "/manifest.csv").c_str(), "wb");
  if (!f) throw std::runtime_error("dump_meanterm_profile: cannot write manifest");
  std::fwrite(manifest.data(), 1, manifest.size(), f);
  std::fclose(f);
  return count;
}

}  // namespace dunesim
