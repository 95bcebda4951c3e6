#pragma once

// Limit-profile construction.  The long-regime limit is a constrained
// elliptic system per (t, theta) node: -div(A grad U) = div C on active
// nodes, U x-constant on threshold nodes, and the x-mean of U pinned to the
// initial mass at every node.  The mean-regime limit is the theta-parabolic
// profile dU/dtheta - div(A grad U) = div C with (t, tau) as parameters, and
// its first-order corrector solves the same operator with the first-order
// coefficient sources and -dU/dtau on the right side.

#include <string>
#include <vector>

#include "dunesim/cell.hpp"
#include "dunesim/coefficients.hpp"
#include "dunesim/field.hpp"
#include "dunesim/preset.hpp"

namespace dunesim {

struct HomogenizedProfile {
  Regime regime = Regime::Long;
  std::vector<double> t_nodes, theta_nodes;
  // U[it][k]: full profile (mass + mean-free slice) at (t_nodes[it],
  // theta_nodes[k]).
  std::vector<std::vector<ScalarField>> U;
  std::vector<std::vector<ThetaClass>> theta_labels;  // same shape as U
  double mass = 0.0;                                  // common x-mean
};

// Mean-regime profile tabulated on a (t, tau, theta) tensor grid;
// V[it][itau][k] is the mean-free slice, the full profile is mass + V.
struct MeanTermProfile {
  std::vector<double> t_nodes, tau_nodes;  // tau_nodes = j/n_tau
  int m_theta = 0;
  Grid grid;
  std::vector<std::vector<std::vector<ScalarField>>> V;
  double mass = 0.0;
};

struct CorrectorProfile {
  std::vector<double> t_nodes, tau_nodes;
  int m_theta = 0;
  Grid grid;
  // U_half[it][itau][k]: mean-zero corrector slices.
  std::vector<std::vector<std::vector<ScalarField>>> U_half;
  double max_projection_residue = 0.0;  // x-mean removed from -dU/dtau
  bool residue_flagged = false;         // residue exceeded 1e-6
};

// Mean-zero V with -div(A grad V) = div C in the discrete spectral sense,
// |residual|_2 <= tol.  Preconditioned conjugate gradient on the mean-zero
// subspace (constant-coefficient inverse-Laplacian preconditioner).  The
// degenerate case (A x-constant and div C = 0, which includes A = 0) returns
// V = 0; A vanishing somewhere while the slice is not of that form is
// rejected.
ScalarField solve_elliptic_slice(const ScalarField& Atilde,
                                 const VectorField& Ctilde, double tol);

// Residual of the slice equation for diagnostics: -div(A grad V) - div C.
ScalarField elliptic_residual(const ScalarField& Atilde,
                              const VectorField& Ctilde, const ScalarField& V);

HomogenizedProfile build_longterm_profile(const Preset& preset,
                                          const std::vector<double>& t_nodes,
                                          const std::vector<double>& theta_nodes,
                                          const ScalarField& z0, double tol);

// Mean-free theta-indexed profile slices at fixed (t, tau): nu-continuation
// {1e-1, 3e-2, 1e-2} warm-started, then a final nu = 0 solve (the bundled
// mean presets have a strictly positive diffusion floor).
std::vector<ScalarField> solve_meanterm_profile(const Preset& preset, double t,
                                                double tau, Grid g,
                                                int m_theta, double tol);

// Tensor-grid assembly of the mean-term profile (the theta solve is
// tau-independent for conforming presets, but slices are tabulated on the
// full tau grid so downstream consumers can treat tau generically).
MeanTermProfile build_meanterm_profile(const Preset& preset,
                                       const std::vector<double>& t_nodes,
                                       int n_tau, Grid g, int m_theta,
                                       const ScalarField& z0, double tol);

// Spectral d/dtau of periodic samples.  samples[j] sits at tau = j/m for
// j = 0..m with the period-closing duplicate samples[m] ~ samples[0]; a
// mismatch larger than 1e-8 in sup norm sets *drift_warning.  The result has
// the same shape (last entry duplicates the first).
std::vector<ScalarField> dtau_spectral(const std::vector<ScalarField>& samples,
                                       bool* drift_warning = nullptr);

// First-order corrector: per (t, tau) node solves
//   dW/dtheta - div(A grad W) = div(C1 + A1 grad U) - dU/dtau,
// with A, A1, C1 the limit-expansion coefficients of the preset and U the
// given mean-term profile.  Requires a threshold-free transport law
// (u_thr = 0).  The right side's x-mean (analytically zero) is projected
// away; the removed residue is recorded and flagged above 1e-6.
CorrectorProfile solve_corrector_profile(const Preset& preset,
                                         const MeanTermProfile& U, double tol);

// DSF1 dumps: one file per (t[, tau]) node with theta as the field index,
// plus manifest.csv mapping node coordinates to filenames.  Returns the
// number of data files written.
int dump_longterm_profile(const HomogenizedProfile& prof,
                          const std::string& dir);
int dump_meanterm_profile(const MeanTermProfile& prof, const std::string& dir);

}  // namespace dunesim
