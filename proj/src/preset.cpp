#include "dunesim/preset.hpp"

#include <cmath>
#include <stdexcept>

namespace dunesim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double bump_sigma(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Short: return "short";
    case Regime::Mean: return "mean";
    case Regime::Long: return "long";
  }
  return "?";
}

Regime regime_from_name(const std::string& s) {
  if (s == "short") return Regime::Short;
  if (s == "mean") return Regime::Mean;
  if (s == "long") return Regime::Long;
  throw std::invalid_argument("unknown regime name: " + s);
}

double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = bump_sigma(s);
  return a / (a + bump_sigma(1.0 - s));
}

double plateau_profile(double theta) {
  const double th = theta - std::floor(theta);
  return smoothstep(th / 0.06) * smoothstep((0.55 - th) / 0.06);
}

double carrier_w(const Preset& p, double theta) {
  switch (p.family) {
    case Family::Gapped: return p.w0 * plateau_profile(theta);
    case Family::Uniform: return p.w0;
    default: return p.w0 + p.w1 * std::cos(kTwoPi * theta);
  }
}

double mask_chi(const Preset& p, double theta) {
  if (p.family == Family::Drift) return 1.0;
  if (p.family == Family::Uniform) return 0.0;
  const double w = std::fabs(carrier_w(p, theta));
  return smoothstep((w - (p.law.u_thr + p.margin)) / p.margin);
}

double height_m0(const Preset& p, double theta) {
  if (p.family == Family::Gapped) return p.m0c * plateau_profile(theta);
  return p.m0c + p.m0v * std::sin(kTwoPi * theta);
}

Preset bundled_preset(const std::string& name) {
  Preset p;
  p.name = name;
  if (name == "tidal-long") {
    p.regime = Regime::Long;
    p.family = Family::Tidal;
    p.law = {0.12, 1.0, 0.5, 0.4, 0.25};
    p.a = 1.0; p.b = 0.35; p.c = 0.8;
    p.w0 = 1.0; p.w1 = 0.8; p.margin = 0.25;
    p.amp_u = 0.2; p.amp_u1 = 0.3;
    p.m0c = 0.3; p.m0v = 0.2; p.amp_m = 0.25; p.amp_m2 = 0.15;
    p.win_lo = 0.0; p.win_hi = 0.2;
  } else if (name == "gapped-long") {
    p.regime = Regime::Long;
    p.family = Family::Gapped;
    p.law = {0.0, 1.2, 0.5, 0.35, 0.13};
    p.a = 1.0; p.b = 0.3; p.c = 0.7;
    p.w0 = 1.2; p.w1 = 0.0; p.margin = 0.25;
    p.amp_u = 0.15; p.amp_u1 = 0.25;
    p.m0c = 0.4; p.m0v = 0.0; p.amp_m = 0.2; p.amp_m2 = 0.1;
    p.win_lo = 0.1; p.win_hi = 0.45;
  } else if (name == "tidal-mean") {
    p.regime = Regime::Mean;
    p.family = Family::Tidal;
    p.law = {0.12, 1.0, 0.5, 0.4, 0.25};
    p.a = 1.0; p.b = 0.4; p.c = 0.8;
    p.w0 = 1.0; p.w1 = 0.8; p.margin = 0.3;
    p.amp_u = 0.18; p.amp_u1 = 0.1;
    p.m0c = 0.3; p.m0v = 0.2; p.amp_m = 0.3;
    p.win_lo = 0.0; p.win_hi = 0.2;
  } else if (name == "drift-mean") {
    p.regime = Regime::Mean;
    p.family = Family::Drift;
    p.law = {0.5, 0.8, 0.6, 0.0, 0.5};
    p.a = 1.0; p.b = 0.45; p.c = 0.9;
    p.w0 = 1.0; p.w1 = 0.3; p.margin = 0.0;
    p.amp_u = 0.2; p.amp_u1 = 0.12; p.phase2 = 0.7;
    p.m0c = 0.35; p.m0v = 0.15; p.amp_m = 0.3;
    p.win_lo = 0.0; p.win_hi = 1.0;
  } else if (name == "tidal-short") {
    p.regime = Regime::Short;
    p.family = Family::Tidal;
    p.law = {0.12, 1.0, 0.5, 0.4, 0.25};
    p.a = 1.0; p.b = 0.4; p.c = 0.8;
    p.w0 = 1.0; p.w1 = 0.8; p.margin = 0.3;
    p.amp_u = 0.18;
    p.m0c = 0.3; p.m0v = 0.2; p.amp_m = 0.3;
    p.win_lo = 0.0; p.win_hi = 0.2;
  } else if (name == "uniform-short") {
    p.regime = Regime::Short;
    p.family = Family::Uniform;
    p.law = {0.2, 0.0, 0.0, 0.0, 0.2};
    p.a = 1.0; p.b = 0.0; p.c = 0.0;
    p.w0 = 1.0; p.w1 = 0.0;
    p.m0c = 0.5;
    p.win_lo = 0.0; p.win_hi = 1.0;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return p;
}

std::vector<std::string> bundled_preset_names() {
  return {"tidal-long", "gapped-long", "tidal-mean",
          "drift-mean", "tidal-short", "uniform-short"};
}

ScalarField default_initial_height(Grid g) {
  ScalarField z(g);
  for (int i = 0; i < g.n; ++i) {
    const double x1 = static_cast<double>(i) / g.n;
    for (int j = 0; j < g.n; ++j) {
      const double x2 = static_cast<double>(j) / g.n;
      z(i, j) = 1.0 + 0.25 * std::cos(kTwoPi * x1) +
                0.15 * std::sin(kTwoPi * x2) +
                0.1 * std::cos(kTwoPi * (x1 + x2));
    }
  }
  return z;
}

PresetSampler::PresetSampler(const Preset& p, Grid g) : p_(p), g_(g) {
  const int n = g.n;
  c1_.resize(n); s1_.resize(n); c2_.resize(n); s2_.resize(n); s2p_.resize(n);
  for (int k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / n;
    c1_[k] = std::cos(kTwoPi * x);
    s1_[k] = std::sin(kTwoPi * x);
    c2_[k] = std::cos(kTwoPi * x);
    s2_[k] = std::sin(kTwoPi * x);
    s2p_[k] = std::sin(kTwoPi * x + p.phase2);
  }
}

namespace {
// Time profile of the transverse first-order velocity.
double ushape(const Preset& p, double t, double tau, double theta) {
  if (p.regime == Regime::Long) return 1.0;
  if (p.family == Family::Drift)
    return std::cos(kTwoPi * tau) +
           0.5 * std::sin(kTwoPi * theta) * std::cos(kTwoPi * t);
  return std::cos(kTwoPi * tau) + 0.5 * std::sin(kTwoPi * t);
}

double ushape_dt(const Preset& p, double t, double /*tau*/, double theta) {
  if (p.regime == Regime::Long) return 0.0;
  if (p.family == Family::Drift)
    return -0.5 * kTwoPi * std::sin(kTwoPi * theta) * std::sin(kTwoPi * t);
  return 0.5 * kTwoPi * std::cos(kTwoPi * t);
}
}  // namespace

void PresetSampler::velocity(double t, double tau, double theta, double eps,
                             VectorField& U) const {
  const int n = g_.n;
  const double w = carrier_w(p_, theta);
  const double chi = mask_chi(p_, theta);
  if (p_.regime == Regime::Long) {
    const double a2slow = chi * eps * p_.amp_u1;
    const double a2fast = chi * eps * eps * p_.amp_u * std::cos(kTwoPi * t);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        U.x1(i, j) = w;
        U.x2(i, j) = a2slow * s2p_[j] + a2fast * c1_[i];
      }
    return;
  }
  const double aslow = chi * p_.amp_u * (0.6 + 0.4 * std::cos(kTwoPi * t));
  const double across = chi * p_.amp_u * 0.4;
  const double a2 = (p_.regime == Regime::Mean)
                        ? std::sqrt(eps) * chi * p_.amp_u1 * ushape(p_, t, tau, theta)
                        : 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      U.x1(i, j) = w + aslow * c1_[i] + across * s2p_[j];
      U.x2(i, j) = a2 * s2p_[j];
    }
}

void PresetSampler::velocity_dt(double t, double tau, double theta, double eps,
                                VectorField& dU) const {
  const int n = g_.n;
  const double chi = mask_chi(p_, theta);
  if (p_.regime == Regime::Long) {
    const double a2fast =
        -chi * eps * eps * p_.amp_u * kTwoPi * std::sin(kTwoPi * t);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        dU.x1(i, j) = 0.0;
        dU.x2(i, j) = a2fast * c1_[i];
      }
    return;
  }
  const double aslow = -chi * p_.amp_u * 0.4 * kTwoPi * std::sin(kTwoPi * t);
  const double a2 = (p_.regime == Regime::Mean)
                        ? std::sqrt(eps) * chi * p_.amp_u1 * ushape_dt(p_, t, tau, theta)
                        : 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      dU.x1(i, j) = aslow * c1_[i];
      dU.x2(i, j) = a2 * s2p_[j];
    }
}

void PresetSampler::height_eff(double t, double tau, double theta, double eps,
                               ScalarField& M) const {
  const int n = g_.n;
  const double m0 = height_m0(p_, theta);
  const double chi = mask_chi(p_, theta);
  if (p_.regime == Regime::Long) {
    const double ac2 = chi * p_.amp_m;
    const double ac1 = eps * eps * chi * p_.amp_m2 * std::sin(kTwoPi * t);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = m0 + ac2 * c2_[j] + ac1 * c1_[i];
    return;
  }
  const double ac2 = (p_.regime == Regime::Mean)
                         ? chi * p_.amp_m * std::cos(kTwoPi * tau)
                         : chi * p_.amp_m * 0.8;
  const double as1 = chi * p_.amp_m * 0.5 * std::sin(kTwoPi * t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = m0 + ac2 * c2_[j] + as1 * s1_[i];
}

void PresetSampler::height_eff_dt(double t, double /*tau*/, double theta,
                                  double eps, ScalarField& dM) const {
  const int n = g_.n;
  const double chi = mask_chi(p_, theta);
  if (p_.regime == Regime::Long) {
    const double ac1 =
        eps * eps * chi * p_.amp_m2 * kTwoPi * std::cos(kTwoPi * t);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dM(i, j) = ac1 * c1_[i];
    return;
  }
  const double as1 = chi * p_.amp_m * 0.5 * kTwoPi * std::cos(kTwoPi * t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dM(i, j) = as1 * s1_[i];
}

void PresetSampler::velocity_limit(double t, double theta, VectorField& U) const {
  const int n = g_.n;
  const double w = carrier_w(p_, theta);
  if (p_.regime == Regime::Long) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) { U.x1(i, j) = w; U.x2(i, j) = 0.0; }
    return;
  }
  const double chi = mask_chi(p_, theta);
  const double aslow = chi * p_.amp_u * (0.6 + 0.4 * std::cos(kTwoPi * t));
  const double across = chi * p_.amp_u * 0.4;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      U.x1(i, j) = w + aslow * c1_[i] + across * s2p_[j];
      U.x2(i, j) = 0.0;
    }
}

void PresetSampler::velocity_limit_dt(double t, double theta,
                                      VectorField& dU) const {
  const int n = g_.n;
  if (p_.regime == Regime::Long) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) { dU.x1(i, j) = 0.0; dU.x2(i, j) = 0.0; }
    return;
  }
  const double chi = mask_chi(p_, theta);
  const double aslow = -chi * p_.amp_u * 0.4 * kTwoPi * std::sin(kTwoPi * t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      dU.x1(i, j) = aslow * c1_[i];
      dU.x2(i, j) = 0.0;
    }
}

void PresetSampler::velocity_first(double t, double tau, double theta,
                                   VectorField& U1) const {
  const int n = g_.n;
  const double chi = mask_chi(p_, theta);
  const double amp = (p_.regime == Regime::Short)
                         ? 0.0
                         : chi * p_.amp_u1 * ushape(p_, t, tau, theta);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      U1.x1(i, j) = 0.0;
      U1.x2(i, j) = amp * s2p_[j];
    }
}

void PresetSampler::height_limit(double t, double tau, double theta,
                                 ScalarField& M) const {
  const int n = g_.n;
  const double m0 = height_m0(p_, theta);
  const double chi = mask_chi(p_, theta);
  if (p_.regime == Regime::Long) {
    const double ac2 = chi * p_.amp_m;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = m0 + ac2 * c2_[j];
    return;
  }
  height_eff(t, tau, theta, 0.0, M);
}

}  // namespace dunesim
