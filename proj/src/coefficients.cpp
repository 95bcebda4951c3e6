#include "dunesim/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "dunesim/spectral.hpp"

namespace dunesim {

double modulation_scale(Regime r, double eps) {
  return r == Regime::Mean ? std::sqrt(eps) : eps;
}

int regime_power(Regime r) { return r == Regime::Long ? 2 : 1; }

namespace {

// Maps sampled velocity/height through the transport law.
void map_through_law(const Preset& p, const VectorField& U,
                     const ScalarField& M, double scale, ScalarField& A,
                     VectorField& C) {
  const int n = A.grid.n;
  const TransportLaw& law = p.law;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double fac = 1.0 - p.b * scale * M(i, j);
      if (!(fac > 0.0))
        throw std::runtime_error(
            "assemble_AC: height modulation factor 1 - b*s*M is not positive");
      const double u1 = U.x1(i, j), u2 = U.x2(i, j);
      const double um = std::hypot(u1, u2);
      A(i, j) = p.a * fac * law.ga(um);
      const double hc = law.hc(um);
      C.x1(i, j) = p.c * fac * hc * u1;
      C.x2(i, j) = p.c * fac * hc * u2;
    }
}

}  // namespace

CoeffPair assemble_AC(const PresetSampler& s, double t, double tau,
                      double theta, double eps) {
  const Grid g = s.grid();
  VectorField U(g);
  ScalarField M(g);
  s.velocity(t, tau, theta, eps, U);
  s.height_eff(t, tau, theta, eps, M);
  CoeffPair out{ScalarField(g), VectorField(g)};
  map_through_law(s.preset(), U, M, modulation_scale(s.preset().regime, eps),
                  out.A, out.C);
  return out;
}

void assemble_AC_into(const PresetSampler& s, double t, double tau,
                      double theta, double eps, ScalarField& A, VectorField& C,
                      VectorField& Uwork, ScalarField& Mwork) {
  s.velocity(t, tau, theta, eps, Uwork);
  s.height_eff(t, tau, theta, eps, Mwork);
  map_through_law(s.preset(), Uwork, Mwork,
                  modulation_scale(s.preset().regime, eps), A, C);
}

CoeffPair assemble_dACdt(const PresetSampler& s, double t, double tau,
                         double theta, double eps) {
  const Grid g = s.grid();
  const Preset& p = s.preset();
  const TransportLaw& law = p.law;
  VectorField U(g), dU(g);
  ScalarField M(g), dM(g);
  s.velocity(t, tau, theta, eps, U);
  s.velocity_dt(t, tau, theta, eps, dU);
  s.height_eff(t, tau, theta, eps, M);
  s.height_eff_dt(t, tau, theta, eps, dM);
  const double scale = modulation_scale(p.regime, eps);
  CoeffPair out{ScalarField(g), VectorField(g)};
  const int n = g.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double fac = 1.0 - p.b * scale * M(i, j);
      const double dfac = -p.b * scale * dM(i, j);
      const double u1 = U.x1(i, j), u2 = U.x2(i, j);
      const double um = std::hypot(u1, u2);
      const double dum =
          um > 1e-14 ? (u1 * dU.x1(i, j) + u2 * dU.x2(i, j)) / um : 0.0;
      out.A(i, j) = p.a * (dfac * law.ga(um) + fac * law.dga(um) * dum);
      const double hc = law.hc(um), dhc = law.dhc(um);
      out.C.x1(i, j) = p.c * (dfac * hc * u1 +
                              fac * (dhc * dum * u1 + hc * dU.x1(i, j)));
      out.C.x2(i, j) = p.c * (dfac * hc * u2 +
                              fac * (dhc * dum * u2 + hc * dU.x2(i, j)));
    }
  return out;
}

LimitCoeffs limit_AC(const PresetSampler& s, double t, double tau,
                     double theta) {
  const Grid g = s.grid();
  const Preset& p = s.preset();
  const TransportLaw& law = p.law;
  VectorField U0(g), U1(g);
  ScalarField M0(g);
  s.velocity_limit(t, theta, U0);
  s.velocity_first(t, tau, theta, U1);
  s.height_limit(t, tau, theta, M0);
  LimitCoeffs out{ScalarField(g), VectorField(g), ScalarField(g),
                  VectorField(g)};
  const int n = g.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u1 = U0.x1(i, j), u2 = U0.x2(i, j);
      const double um = std::hypot(u1, u2);
      const double ga = law.ga(um), hc = law.hc(um);
      const double m = M0(i, j);
      out.A(i, j) = p.a * ga;
      out.C.x1(i, j) = p.c * hc * u1;
      out.C.x2(i, j) = p.c * hc * u2;
      out.A1(i, j) = -p.a * p.b * m * ga;
      out.C1.x1(i, j) = -p.c * p.b * m * hc * u1 + p.c * hc * U1.x1(i, j);
      out.C1.x2(i, j) = -p.c * p.b * m * hc * u2 + p.c * hc * U1.x2(i, j);
    }
  return out;
}

CoeffPair assemble_AC(const Preset& p, Grid g, double t, double tau,
                      double theta, double eps) {
  return assemble_AC(PresetSampler(p, g), t, tau, theta, eps);
}

LimitCoeffs limit_AC(const Preset& p, Grid g, double t, double tau,
                     double theta) {
  return limit_AC(PresetSampler(p, g), t, tau, theta);
}

namespace {

struct DerivedFields {
  CoeffPair ac;        // A, C
  CoeffPair dt;        // d/dt by central differences
  CoeffPair dth;       // d/dtheta
  CoeffPair dtau;      // d/dtau (mean regime; zero otherwise)
  VectorField gradA;
  ScalarField divC;
  VectorField dgradA_dt;
  ScalarField ddivC_dt;
  VectorField dgradA_dtau;
};

CoeffPair fd_pair(const CoeffPair& plus, const CoeffPair& minus, double h) {
  const Grid g = plus.A.grid;
  CoeffPair d{ScalarField(g), VectorField(g)};
  const double inv = 1.0 / (2.0 * h);
  for (std::size_t k = 0; k < d.A.v.size(); ++k) {
    d.A.v[k] = (plus.A.v[k] - minus.A.v[k]) * inv;
    d.C.x1.v[k] = (plus.C.x1.v[k] - minus.C.x1.v[k]) * inv;
    d.C.x2.v[k] = (plus.C.x2.v[k] - minus.C.x2.v[k]) * inv;
  }
  return d;
}

DerivedFields derive_fields(const PresetSampler& s, double t, double tau,
                            double theta, double eps, double h, bool mean) {
  const Grid g = s.grid();
  DerivedFields d{assemble_AC(s, t, tau, theta, eps),
                  CoeffPair{ScalarField(g), VectorField(g)},
                  CoeffPair{ScalarField(g), VectorField(g)},
                  CoeffPair{ScalarField(g), VectorField(g)},
                  VectorField(g),
                  ScalarField(g),
                  VectorField(g),
                  ScalarField(g),
                  VectorField(g)};
  const CoeffPair tp = assemble_AC(s, t + h, tau, theta, eps);
  const CoeffPair tm = assemble_AC(s, t - h, tau, theta, eps);
  d.dt = fd_pair(tp, tm, h);
  const CoeffPair hp = assemble_AC(s, t, tau, theta + h, eps);
  const CoeffPair hm = assemble_AC(s, t, tau, theta - h, eps);
  d.dth = fd_pair(hp, hm, h);
  d.gradA = spectral_gradient(d.ac.A);
  d.divC = spectral_divergence(d.ac.C);
  const VectorField gp = spectral_gradient(tp.A);
  const VectorField gm = spectral_gradient(tm.A);
  const ScalarField vp = spectral_divergence(tp.C);
  const ScalarField vm = spectral_divergence(tm.C);
  const double inv = 1.0 / (2.0 * h);
  for (std::size_t k = 0; k < d.divC.v.size(); ++k) {
    d.dgradA_dt.x1.v[k] = (gp.x1.v[k] - gm.x1.v[k]) * inv;
    d.dgradA_dt.x2.v[k] = (gp.x2.v[k] - gm.x2.v[k]) * inv;
    d.ddivC_dt.v[k] = (vp.v[k] - vm.v[k]) * inv;
  }
  if (mean) {
    const CoeffPair up = assemble_AC(s, t, tau + h, theta, eps);
    const CoeffPair um = assemble_AC(s, t, tau - h, theta, eps);
    d.dtau = fd_pair(up, um, h);
    const VectorField gup = spectral_gradient(up.A);
    const VectorField gum = spectral_gradient(um.A);
    for (std::size_t k = 0; k < d.divC.v.size(); ++k) {
      d.dgradA_dtau.x1.v[k] = (gup.x1.v[k] - gum.x1.v[k]) * inv;
      d.dgradA_dtau.x2.v[k] = (gup.x2.v[k] - gum.x2.v[k]) * inv;
    }
  }
  return d;
}

double vec_mag(const VectorField& v, std::size_t k) {
  return std::hypot(v.x1.v[k], v.x2.v[k]);
}

}  // namespace

const char* theta_class_name(ThetaClass c) {
  switch (c) {
    case ThetaClass::Degenerate: return "degenerate";
    case ThetaClass::Threshold: return "threshold";
    case ThetaClass::Active: return "active";
  }
  return "?";
}

ThetaClass classify_theta(const Preset& p, double t, double theta, double eps,
                          int nx) {
  if (p.regime != Regime::Long)
    throw std::invalid_argument(
        "classify_theta: phase classification is defined for the long-regime "
        "hierarchy only");
  const Grid g(nx);
  PresetSampler s(p, g);
  VectorField U(g);
  ScalarField M(g);
  double supU_all = 0.0, supM_all = 0.0;
  for (int kt = 0; kt < 3; ++kt) {
    const double ts = t + kt / 3.0;
    s.velocity(ts, 0.0, theta, eps, U);
    s.height_eff(ts, 0.0, theta, eps, M);
    for (std::size_t k = 0; k < M.v.size(); ++k) {
      supU_all = std::max(supU_all, vec_mag(U, k));
      supM_all = std::max(supM_all, std::fabs(M.v[k]));
    }
  }
  if (supU_all <= 1e-12 && supM_all <= 1e-12) return ThetaClass::Degenerate;
  s.velocity(t, 0.0, theta, eps, U);
  double supU = 0.0;
  for (std::size_t k = 0; k < U.x1.v.size(); ++k)
    supU = std::max(supU, vec_mag(U, k));
  if (supU < p.law.u_thr) return ThetaClass::Threshold;
  return ThetaClass::Active;
}

HypothesisReport validate_hypotheses(const Preset& p, double eps,
                                     const SamplingSpec& spec) {
  HypothesisReport rep;
  for (const std::string& msg : transport_law_issues(p.law))
    rep.violations.push_back("law: " + msg);

  const Grid g(spec.nx);
  PresetSampler s(p, g);
  const bool mean = p.regime == Regime::Mean;
  const bool lng = p.regime == Regime::Long;
  const int ntau = mean ? spec.ntau : 1;
  const double h = spec.h;
  const double e2 = eps * eps;

  auto upd = [&rep](const std::string& id, double need) {
    auto it = rep.clause_gamma.find(id);
    if (it == rep.clause_gamma.end())
      rep.clause_gamma[id] = need;
    else
      it->second = std::max(it->second, need);
  };

  bool viol_degenerate_activity = false;
  bool viol_negative_A = false;
  bool viol_mask = false;
  bool viol_periodic = false;
  double dt_closed_form_diff = 0.0;

  double min_active_A = -1.0;  // negative: none seen yet
  std::vector<double> theta_min_A(spec.ntheta,
                                  std::numeric_limits<double>::infinity());
  double global_min_A = std::numeric_limits<double>::infinity();

  VectorField U(g), dU(g), gU1(g), gU2(g);
  ScalarField M(g), dM(g);

  for (int ith = 0; ith < spec.ntheta; ++ith) {
    const double theta = static_cast<double>(ith) / spec.ntheta;
    for (int itau = 0; itau < ntau; ++itau) {
      const double tau = static_cast<double>(itau) / ntau;
      for (int it = 0; it < spec.nt; ++it) {
        const double t = static_cast<double>(it) / spec.nt;
        const DerivedFields d = derive_fields(s, t, tau, theta, eps, h, mean);

        // Cross-check the closed-form slow-time derivative.
        const CoeffPair cf = assemble_dACdt(s, t, tau, theta, eps);
        for (std::size_t k = 0; k < cf.A.v.size(); ++k) {
          dt_closed_form_diff = std::max(
              {dt_closed_form_diff, std::fabs(cf.A.v[k] - d.dt.A.v[k]),
               std::fabs(cf.C.x1.v[k] - d.dt.C.x1.v[k]),
               std::fabs(cf.C.x2.v[k] - d.dt.C.x2.v[k])});
        }

        const LimitCoeffs lim = limit_AC(s, t, tau, theta);

        // Velocity/height fields for the quiescence (mask) clause.
        s.velocity(t, tau, theta, eps, U);
        s.velocity_dt(t, tau, theta, eps, dU);
        s.height_eff(t, tau, theta, eps, M);
        s.height_eff_dt(t, tau, theta, eps, dM);
        gU1 = spectral_gradient(U.x1);
        gU2 = spectral_gradient(U.x2);
        const VectorField gM = spectral_gradient(M);

        for (std::size_t k = 0; k < d.ac.A.v.size(); ++k) {
          const double A = d.ac.A.v[k];
          const double absA = std::fabs(A);
          const double Cm = vec_mag(d.ac.C, k);
          const double dAdt = std::fabs(d.dt.A.v[k]);
          const double dCdt = vec_mag(d.dt.C, k);
          const double dAdth = std::fabs(d.dth.A.v[k]);
          const double dCdth = vec_mag(d.dth.C, k);
          const double gA = vec_mag(d.gradA, k);
          const double dC = std::fabs(d.divC.v[k]);
          const double dgAdt = vec_mag(d.dgradA_dt, k);
          const double ddCdt = std::fabs(d.ddivC_dt.v[k]);

          if (A < -1e-12 && !viol_negative_A) {
            viol_negative_A = true;
            rep.violations.push_back("negative diffusion coefficient sampled");
          }
          global_min_A = std::min(global_min_A, A);
          theta_min_A[ith] = std::min(theta_min_A[ith], A);

          // Absolute bounds: long-regime slow-time derivatives shrink like
          // eps^2 and spatial derivatives like eps; mean/short are unscaled.
          upd("abs_A", absA);
          upd("abs_C", Cm);
          upd("abs_dA_dt", dAdt / (lng ? e2 : 1.0));
          upd("abs_dC_dt", dCdt / (lng ? e2 : 1.0));
          upd("abs_dgradA_dt", dgAdt / (lng ? e2 : 1.0));
          upd("abs_dA_dtheta", dAdth);
          upd("abs_dC_dtheta", dCdth);
          upd("abs_gradA", gA / (lng ? eps : 1.0));
          upd("abs_divC", dC / (lng ? eps : 1.0));
          upd("abs_ddivC_dt", ddCdt / (lng ? e2 : 1.0));

          // Relative (degeneracy-weighted) bounds.
          if (absA < 1e-14) {
            const double worst =
                std::max({Cm, dAdt, dCdt, gA, dC, dgAdt, ddCdt});
            if (worst > 1e-12 && !viol_degenerate_activity) {
              viol_degenerate_activity = true;
              rep.violations.push_back(
                  "coefficient activity at a point of vanishing diffusion");
            }
          } else {
            upd("rel_C", Cm / absA);
            upd("rel_C_sq", Cm * Cm / absA);
            upd("rel_gradA", gA / ((lng ? eps : 1.0) * absA));
            upd("rel_dA_dt", dAdt / ((lng ? e2 : 1.0) * absA));
            upd("rel_dgradA_dt_sq", dgAdt * dgAdt / ((lng ? e2 : 1.0) * absA));
            upd("rel_divC", dC / ((lng ? eps : 1.0) * absA));
            upd("rel_dC_dt", dCdt / ((lng ? e2 : 1.0) * absA));
            upd("rel_dC_dt_sq",
                std::sqrt(dCdt * dCdt / ((lng ? e2 : 1.0) * absA)));
            if (mean) {
              const double dAdtau = std::fabs(d.dtau.A.v[k]);
              const double dgAdtau = vec_mag(d.dgradA_dtau, k);
              upd("rel_dA_dtau_sq", dAdtau * dAdtau / (eps * absA));
              upd("rel_dgradA_dtau_sq", dgAdtau * dgAdtau / (eps * absA));
            }
          }

          // Limit-coefficient degeneracy bound |C0|^2 <= gamma * A0.
          const double lA = std::fabs(lim.A.v[k]);
          const double lC = vec_mag(lim.C, k);
          if (lA < 1e-14) {
            if (lC > 1e-12 && !viol_degenerate_activity) {
              viol_degenerate_activity = true;
              rep.violations.push_back(
                  "limit transport without limit diffusion");
            }
          } else {
            upd("limit_rel_C_sq", lC * lC / lA);
          }

          // Activity flag for the diffusion-floor measurement.
          bool active = dAdt > 1e-10 || gA > 1e-10 || dCdt > 1e-10 ||
                        dC > 1e-10;
          if (mean)
            active = active || std::fabs(d.dtau.A.v[k]) > 1e-10 ||
                     vec_mag(d.dtau.C, k) > 1e-10;
          if (active) {
            if (min_active_A < 0.0 || A < min_active_A) min_active_A = A;
          }

          // Quiescence below the threshold speed: wherever |U| <= u_thr the
          // velocity and height modulation must be frozen in t and x.
          const double um = vec_mag(U, k);
          if (um <= p.law.u_thr) {
            const double worst =
                std::max({vec_mag(dU, k), std::fabs(dM.v[k]), vec_mag(gU1, k),
                          vec_mag(gU2, k), vec_mag(gM, k)});
            if (worst > 1e-10 && !viol_mask) {
              viol_mask = true;
              rep.violations.push_back(
                  "velocity/height activity below the threshold speed");
            }
          }
        }
      }
    }
  }

  // Periodicity in theta (and tau for the mean regime).
  {
    const double t0 = 1.0 / 3.0, tau0 = mean ? 0.21 : 0.0, th0 = 0.37;
    const CoeffPair base = assemble_AC(s, t0, tau0, th0, eps);
    const CoeffPair shth = assemble_AC(s, t0, tau0, th0 + 1.0, eps);
    double diff = 0.0;
    for (std::size_t k = 0; k < base.A.v.size(); ++k)
      diff = std::max({diff, std::fabs(base.A.v[k] - shth.A.v[k]),
                       std::fabs(base.C.x1.v[k] - shth.C.x1.v[k]),
                       std::fabs(base.C.x2.v[k] - shth.C.x2.v[k])});
    if (mean) {
      const CoeffPair shtau = assemble_AC(s, t0, tau0 + 1.0, th0, eps);
      for (std::size_t k = 0; k < base.A.v.size(); ++k)
        diff = std::max({diff, std::fabs(base.A.v[k] - shtau.A.v[k]),
                         std::fabs(base.C.x1.v[k] - shtau.C.x1.v[k]),
                         std::fabs(base.C.x2.v[k] - shtau.C.x2.v[k])});
    }
    if (diff > 1e-12 && !viol_periodic) {
      viol_periodic = true;
      rep.violations.push_back("fast-scale periodicity broken");
    }
  }

  {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "closed-form vs FD slow-time derivative max diff = %.3e",
                  dt_closed_form_diff);
    rep.notes.push_back(buf);
  }

  // Diffusion floor: smallest sampled diffusion wherever the coefficients
  // show any slow-time or spatial activity; quiescent presets fall back to
  // the declared window.
  if (min_active_A >= 0.0) {
    rep.Gthr = (1.0 - 1e-9) * min_active_A;
    rep.notes.push_back("diffusion floor measured on the active set");
  } else {
    double mn = std::numeric_limits<double>::infinity();
    for (int ith = 0; ith < spec.ntheta; ++ith) {
      const double theta = static_cast<double>(ith) / spec.ntheta;
      if (theta >= p.win_lo - 1e-12 && theta <= p.win_hi + 1e-12)
        mn = std::min(mn, theta_min_A[ith]);
    }
    if (!std::isfinite(mn)) mn = global_min_A;
    rep.Gthr = (1.0 - 1e-9) * mn;
    rep.notes.push_back(
        "no coefficient activity sampled; floor taken over the declared "
        "window");
  }
  if (!(rep.Gthr > 0.0))
    rep.violations.push_back("diffusion floor is not positive");

  // Detected window: longest contiguous theta-arc with min A >= floor.
  {
    std::vector<char> ok(spec.ntheta, 0);
    for (int ith = 0; ith < spec.ntheta; ++ith)
      ok[ith] = theta_min_A[ith] >= rep.Gthr * (1.0 - 1e-12) ? 1 : 0;
    int best_start = 0, best_len = 0, run_start = 0, run_len = 0;
    for (int k = 0; k < 2 * spec.ntheta; ++k) {
      if (ok[k % spec.ntheta]) {
        if (run_len == 0) run_start = k;
        if (++run_len > best_len && run_len <= spec.ntheta) {
          best_len = run_len;
          best_start = run_start;
        }
      } else {
        run_len = 0;
      }
    }
    if (best_len == 0) {
      rep.violations.push_back("no theta-window sustains the diffusion floor");
      rep.window_lo = rep.window_hi = 0.0;
    } else {
      rep.window_lo =
          static_cast<double>(best_start % spec.ntheta) / spec.ntheta;
      rep.window_hi = rep.window_lo +
                      static_cast<double>(best_len) / spec.ntheta;
    }
    // Declared window must sustain the floor.
    bool declared_ok = true;
    for (int ith = 0; ith < spec.ntheta; ++ith) {
      const double theta = static_cast<double>(ith) / spec.ntheta;
      if (theta >= p.win_lo - 1e-12 && theta <= p.win_hi + 1e-12 && !ok[ith])
        declared_ok = false;
    }
    if (!declared_ok)
      rep.violations.push_back(
          "declared theta-window dips below the measured diffusion floor");
  }

  for (const auto& kv : rep.clause_gamma)
    rep.gamma = std::max(rep.gamma, kv.second);
  return rep;
}

}  // namespace dunesim
