#pragma once

// Theta-periodic parabolic solves.  The problems all share the shape
//
//   mu S + dS/dtheta - lambda div((A + nu) grad S) = lambda div C + f,
//
// with coefficients 1-periodic in theta and S constrained to zero spatial
// mean at every theta.  lambda is the stiffness scale (1/eps for the
// fast-phase problems of the full models, 1 for the limit-profile problems),
// nu >= 0 a viscous regularization, and mu a penalization that is realized
// here as an exact per-step mean-zero projection (the mu -> 0 limit).
// Solutions are obtained by marching the theta evolution with the shared
// exponential IMEX stepper until successive periods coincide, and the
// resulting profiles are scored against the a-priori estimate suite with
// measured constants.

#include <string>
#include <utility>
#include <vector>

#include "dunesim/coefficients.hpp"
#include "dunesim/field.hpp"
#include "dunesim/preset.hpp"

namespace dunesim {

struct ThetaProblem {
  // Coefficient slices at theta_k = k/m_theta (uniform, wrapping); f is
  // optional and must have zero spatial mean at every node.
  std::vector<ScalarField> A;
  std::vector<VectorField> C;
  std::vector<ScalarField> f;
  double lambda = 1.0;
  double mu = 0.0;  // must be 0; the mean projection plays the mu -> 0 role
  double nu = 0.0;
  int m_theta = 0;
  Grid grid;
  double dtheta_override = 0.0;  // > 0: target step, snapped to divide 1/m_theta
  int max_periods = 400;
};

struct CellSolution {
  std::vector<ScalarField> S;  // mean-zero slices at theta_k = k/m_theta
  double mu = 0.0, nu = 0.0, lambda = 1.0;
  // Max over theta-nodes of the L2 gap between the last two marched periods.
  double periodicity_residual = 0.0;
  std::vector<double> residual_history;  // one entry per period
  int iterations = 0;  // periods marched
  bool converged = false;
  std::string note;
};

struct EstimateRow {
  std::string id;
  double lhs = 0.0, rhs = 0.0;
  bool pass = false;
};

struct EstimateReport {
  std::vector<EstimateRow> rows;
  double nu = 0.0, mu = 0.0, lambda = 1.0;
  bool all_pass() const;
  // CSV with header: estimate_id,lhs,rhs,pass,nu,mu,lambda.
  std::string to_csv() const;
};

// March the theta evolution over repeated periods until every theta-node
// differs from the previous period by at most tol in L2.  warm_start (when
// given) seeds both the initial state and the first-period comparison.
// Throws std::runtime_error on contraction stall (period-to-period residual
// reduction factor > 0.99 for 5 consecutive periods); exceeding max_periods
// returns a partial result with converged = false.
CellSolution solve_theta_periodic(const ThetaProblem& p, double tol,
                                  const CellSolution* warm_start = nullptr);

// Estimate suite for a solved problem.  Bounds are instantiated with the
// measured gamma and G_thr of hyp and with eps = 1/lambda; rows with nu in a
// denominator are emitted only when nu > 0, and the nu-independent
// sup-in-theta bounds switch to their viscosity-free ids at nu = 0.  dSdt
// (slices of the t-derivative of S, from solve_dSdt) enables the
// t-derivative rows.
EstimateReport cell_estimates(const CellSolution& sol, const ThetaProblem& p,
                              const HypothesisReport& hyp,
                              const std::vector<ScalarField>* dSdt = nullptr);

struct ContinuationResult {
  CellSolution final;                    // solution at the last nu
  std::vector<double> nu_values;
  std::vector<EstimateReport> reports;   // one per scheduled nu
  std::vector<double> increments;        // L2(theta,L2) gap between solves
};

// Solve along a decreasing nu schedule (final value >= 1e-6), warm-starting
// each solve from the previous one, with mu = 0 throughout.
ContinuationResult continuation_nu(ThetaProblem p,
                                   const std::vector<double>& nu_schedule,
                                   double tol, const HypothesisReport& hyp);

// t-derivative of the solution, obtained by solving the t-differentiated
// equation (same operator, source lambda div(dA/dt grad S + dC/dt)) rather
// than by finite differences across nearby t.
std::vector<ScalarField> solve_dSdt(const ThetaProblem& p,
                                    const CellSolution& sol,
                                    const std::vector<ScalarField>& dAdt,
                                    const std::vector<VectorField>& dCdt,
                                    double tol);

// Coefficient slices of a preset at fixed (t, tau): A_k, C_k assembled at
// theta_k = k/m_theta, plus the matching closed-form t-derivative slices.
ThetaProblem theta_problem_from_preset(const Preset& preset, Grid g, double t,
                                       double tau, double eps, int m_theta,
                                       double nu, double lambda);
void preset_theta_slices_dt(const Preset& preset, Grid g, double t, double tau,
                            double eps, int m_theta,
                            std::vector<ScalarField>& dAdt,
                            std::vector<VectorField>& dCdt);

}  // namespace dunesim
