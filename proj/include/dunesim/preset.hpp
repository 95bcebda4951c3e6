#pragma once

// Bundled coefficient scenarios.  Each preset prescribes an oscillatory water
// velocity field and a height-modulation field on the 2-torus; the diffusion
// and transport coefficients of the height equation are built from them
// through a TransportLaw.  All presets share a small set of separable
// building blocks:
//
//   carrier   w(theta)          dominant flow speed, directed along e1
//   mask      chi(theta)        C-infinity cutoff, zero wherever the carrier
//                               is too slow to move sediment; every t- or
//                               x-dependent structure is multiplied by it so
//                               that slow phases are exactly quiescent
//   mean      m0(theta)         spatial mean of the height modulation
//
// Fast-scale corrections to the velocity point along e2 (transverse to the
// carrier), which keeps |velocity| equal to the carrier speed up to second
// order in the correction amplitude.

#include <string>
#include <vector>

#include "dunesim/field.hpp"
#include "dunesim/transport.hpp"

namespace dunesim {

enum class Regime { Short, Mean, Long };

enum class Family { Tidal, Gapped, Drift, Uniform };

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& s);

struct Preset {
  std::string name;
  Regime regime = Regime::Short;
  Family family = Family::Tidal;
  TransportLaw law;
  double a = 1.0;  // diffusion scale
  double b = 0.0;  // height-modulation coupling
  double c = 0.0;  // transport scale
  // Carrier speed: tidal/drift w0 + w1*cos(2*pi*theta); gapped w0*P(theta)
  // with the plateau profile P; uniform w0.
  double w0 = 1.0, w1 = 0.0;
  // Mask activates over the band |w| in [u_thr + margin, u_thr + 2*margin].
  double margin = 0.0;
  double amp_u = 0.0;    // slow velocity structure amplitude
  double amp_u1 = 0.0;   // transverse first-order velocity amplitude
  double phase2 = 0.0;   // x2-phase of the transverse structure
  double m0c = 0.0, m0v = 0.0;  // mean height modulation m0(theta)
  double amp_m = 0.0;    // x-dependent height structure amplitude
  double amp_m2 = 0.0;   // second-order height structure (long regime)
  // Declared theta-window on which diffusion is expected to stay above the
  // measured floor.
  double win_lo = 0.0, win_hi = 1.0;
};

// C-infinity step: 0 for s <= 0, 1 for s >= 1, strictly increasing between.
double smoothstep(double s);
// Periodised plateau: rises over theta in [0, 0.06], holds 1 until 0.49,
// falls to 0 by 0.55, stays 0 up to 1.  All derivatives vanish at the ends.
double plateau_profile(double theta);

double carrier_w(const Preset& p, double theta);
double mask_chi(const Preset& p, double theta);
double height_m0(const Preset& p, double theta);

Preset bundled_preset(const std::string& name);
std::vector<std::string> bundled_preset_names();

// Bundled smooth initial height used by the demos and the checks.
ScalarField default_initial_height(Grid g);

// Grid-bound evaluator with cached trigonometric tables.  "Full" fields carry
// the epsilon-scaled fast corrections that enter the parabolic problems;
// "limit" fields are the epsilon-free leading parts, and velocity_first /
// height_limit feed the first-order coefficient expansion.
class PresetSampler {
 public:
  PresetSampler(const Preset& p, Grid g);

  const Preset& preset() const { return p_; }
  Grid grid() const { return g_; }

  void velocity(double t, double tau, double theta, double eps,
                VectorField& U) const;
  void velocity_dt(double t, double tau, double theta, double eps,
                   VectorField& dU) const;
  // Height modulation entering the factor 1 - b*scale*M; in the long regime
  // this includes the second-order term.
  void height_eff(double t, double tau, double theta, double eps,
                  ScalarField& M) const;
  void height_eff_dt(double t, double tau, double theta, double eps,
                     ScalarField& dM) const;

  void velocity_limit(double t, double theta, VectorField& U) const;
  void velocity_limit_dt(double t, double theta, VectorField& dU) const;
  // Transverse first-order velocity (unscaled amplitude).
  void velocity_first(double t, double tau, double theta, VectorField& U1) const;
  // Leading height modulation (no second-order term).
  void height_limit(double t, double tau, double theta, ScalarField& M) const;

 private:
  Preset p_;
  Grid g_;
  std::vector<double> c1_, s1_, c2_, s2_, s2p_;
};

}  // namespace dunesim
