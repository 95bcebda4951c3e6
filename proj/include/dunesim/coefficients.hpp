#pragma once

// Oscillatory diffusion/transport coefficients of the height equation and
// their leading-order expansion, together with the quantitative structure
// checks the convergence machinery relies on.
//
// Full coefficients (velocity U, height modulation M from a preset):
//   A = a * (1 - b*s(eps)*M) * g_a(|U|)
//   C = c * (1 - b*s(eps)*M) * h_c(|U|) * U
// with the regime-dependent modulation scale s(eps) = eps (short, long) or
// sqrt(eps) (mean).  Both are smooth: h_c(u) = g_c(u)/u extends through 0.
//
// The expansion A ~ A0 + s(eps)*A1, C ~ C0 + s(eps)*C1 uses the eps-free
// leading velocity/height; transverse first-order velocity keeps |U| equal to
// the leading speed to second order, so A1 carries only the height term while
// C1 adds the transverse transport contribution.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dunesim/field.hpp"
#include "dunesim/preset.hpp"

namespace dunesim {

// Scale of the first-order modulation: eps for short/long, sqrt(eps) for mean.
double modulation_scale(Regime r, double eps);
// Power p of the 1/eps^p time speed-up of the parabolic problem.
int regime_power(Regime r);

struct CoeffPair {
  ScalarField A;
  VectorField C;
};

CoeffPair assemble_AC(const PresetSampler& s, double t, double tau,
                      double theta, double eps);
// Allocation-free variant for hot loops; Uwork/Mwork are scratch fields on
// the same grid.
void assemble_AC_into(const PresetSampler& s, double t, double tau,
                      double theta, double eps, ScalarField& A, VectorField& C,
                      VectorField& Uwork, ScalarField& Mwork);
// Closed-form slow-time derivative of the assembled pair (tau, theta fixed).
CoeffPair assemble_dACdt(const PresetSampler& s, double t, double tau,
                         double theta, double eps);

struct LimitCoeffs {
  ScalarField A;   // leading diffusion
  VectorField C;   // leading transport
  ScalarField A1;  // first-order diffusion (height modulation)
  VectorField C1;  // first-order transport (height + transverse velocity)
};

LimitCoeffs limit_AC(const PresetSampler& s, double t, double tau, double theta);

// Convenience overloads constructing a sampler on the fly.
CoeffPair assemble_AC(const Preset& p, Grid g, double t, double tau,
                      double theta, double eps);
LimitCoeffs limit_AC(const Preset& p, Grid g, double t, double tau,
                     double theta);

struct SamplingSpec {
  int nt = 8;      // slow-time nodes over one period
  int ntau = 8;    // intermediate-time nodes (mean regime only)
  int ntheta = 16; // fast-time nodes
  int nx = 16;     // spatial grid
  double h = 1e-5; // finite-difference step for t/tau/theta derivatives
};

struct HypothesisReport {
  double gamma = 0.0;      // smallest constant satisfying every bound
  double Gthr = 0.0;       // measured diffusion floor on the active set
  double window_lo = 0.0;  // detected theta-window with A >= Gthr
  double window_hi = 0.0;  // (window_hi may exceed 1 when the arc wraps)
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  std::map<std::string, double> clause_gamma;  // per-clause required gamma
};

// Samples the assembled coefficients over a (t[,tau],theta,x) grid and
// measures the smallest admissible constants for the regime's derivative and
// degeneracy bounds.  Structural failures (negative diffusion, transport
// without diffusion, activity below the threshold speed, broken periodicity,
// ill-formed law) are reported as violations.
HypothesisReport validate_hypotheses(const Preset& p, double eps,
                                     const SamplingSpec& spec = {});

// Phase classification for the long-regime hierarchy at fixed (t, theta):
// Degenerate: velocity and height modulation vanish identically (sampled);
// Threshold: max speed below the threshold; Active: otherwise.
enum class ThetaClass { Degenerate, Threshold, Active };

const char* theta_class_name(ThetaClass c);
ThetaClass classify_theta(const Preset& p, double t, double theta, double eps,
                          int nx = 16);

}  // namespace dunesim
