#pragma once

// Time integration of the stiff oscillatory height equation
//   dz/dt = (1/eps^p) [ div(A grad z) + div C ],
// with p = 1 (short and mean regimes) or p = 2 (long regime) and coefficients
// assembled from a preset at the fast phases theta = t/eps (and tau =
// t/sqrt(eps) in the mean regime).  The default path keeps the state in mode
// space and advances with the exponential IMEX splitting of ImexStepper; a
// finite-difference path using the same flux stencil as the dense reference
// solver is available for matched-discretization oracle runs.

#include <string>
#include <vector>

#include "dunesim/coefficients.hpp"
#include "dunesim/field.hpp"
#include "dunesim/preset.hpp"

namespace dunesim {

enum class EvolveMode {
  Spectral,          // exponential IMEX on the spectral state
  FiniteDifference,  // explicit Euler on the flux-form stencil (oracle match)
};

struct EvolutionProblem {
  Preset preset;
  double eps = 0.1;
  Grid grid{32};
  double T_final = 0.1;
  ScalarField z0;
  double safety = 0.8;       // fraction of the stability bound
  long max_steps = 60000000; // step budget; exceeding it flags the trajectory
  double dt_override = 0.0;  // > 0: use this step instead of the bound
  double snapshot_dt = 0.0;  // > 0: snapshot cadence (also snaps dt); 0: ends only
  EvolveMode mode = EvolveMode::Spectral;
};

struct Trajectory {
  // Snapshots (always includes t = 0 and the final time).
  std::vector<double> times;
  std::vector<ScalarField> snapshots;
  // Per-step series, decimated by series_stride when runs are very long; the
  // drift/sup statistics below are tracked exactly at every step regardless.
  std::vector<long> series_step;
  std::vector<double> series_t, mass_series, l2_series;
  int series_stride = 1;
  double dt = 0.0;
  long steps = 0;
  double mass0 = 0.0;
  double mass_drift_rel = 0.0;  // max |mass(t) - mass0| / max(|mass0|, 1e-14)
  double sup_l2 = 0.0;          // max over steps of the L2 norm
  // Stability-scan metadata.
  double abar = 0.0, max_dev = 0.0, max_divC = 0.0;
  bool failed = false;
  std::string failure;
};

// Bounds of the assembled coefficients over a (t, tau, theta) tensor scan,
// used for the step-size bounds (identical inputs give identical bounds, so
// all solver paths agree on dt).
struct CoefficientScan {
  double Amin = 0.0, Amax = 0.0, max_divC = 0.0;
};
CoefficientScan scan_coefficients(const PresetSampler& s, double eps);

// One exponential IMEX step from state z at time t (coefficients frozen at
// t + dt/2); the bulk level is taken from this step's diffusion field.
ScalarField step_imex(const EvolutionProblem& p, const ScalarField& z, double t,
                      double dt);

Trajectory run_full(const EvolutionProblem& p);

// Dense-matrix explicit-Euler reference on the flux-form stencil; n <= 16.
Trajectory reference_solve_dense(const EvolutionProblem& p);

}  // namespace dunesim
