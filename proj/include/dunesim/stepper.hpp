#pragma once

// Shared time steppers for the stiff parabolic problems.
//
// ImexStepper advances  u' = scale * [ div(A grad u) + div C ] + f  one step
// at a time, splitting A = Abar + (A - Abar) around a constant bulk level:
// the constant-coefficient part is integrated exactly in mode space through
// the factor exp(-scale*Abar*4pi^2|k|^2 dt), the bounded remainder and the
// sources enter through the phi1 weight dt*phi1(-lambda_k dt),
// phi1(s) = (e^s - 1)/s.  With Abar = (max A + min A)/2 and A >= 0 the
// remainder never exceeds the bulk, which keeps the explicit part contractive.
// The zero mode of div-form sources is identically zero, so the mean of u is
// conserved bit-for-bit on the spectral state.
//
// FdFluxOperator applies the matching second-order flux-form finite-difference
// operator (arithmetic face means, centered transport divergence); it
// telescopes to exact mass conservation and serves the dense-oracle path.

#include <vector>

#include "dunesim/field.hpp"
#include "dunesim/spectral.hpp"

namespace dunesim {

class ImexStepper {
 public:
  // scale multiplies the whole right side (1/eps^p in the evolution problems,
  // lambda in the theta-periodic problems).
  ImexStepper(Grid g, double scale, double abar, double dt);

  // One step with coefficients frozen at the caller's chosen instant.  The
  // optional extra source f enters unscaled.  When zero_mean is set the (0,0)
  // mode of the state is pinned to exactly zero after the update.
  void step(Spectrum& zhat, const ScalarField& A, const VectorField& C,
            const ScalarField* f, bool zero_mean);

  double dt() const { return dt_; }
  double abar() const { return abar_; }
  double scale() const { return scale_; }

 private:
  Grid g_;
  double scale_, abar_, dt_;
  std::vector<double> E_, P_;  // decay and phi1 weights per retained mode
  Spectrum g1_, g2_, f1_, f2_, div_, fhat_;
  ScalarField w1_, w2_;
};

// phi1(s) = (e^s - 1)/s extended through s = 0.
double phi1(double s);

// rhs = div(A grad z) + div C with flux-form faces on the n x n periodic
// grid, spacing 1/n; second-order centered; sums to zero exactly.
void fd_flux_rhs(const ScalarField& A, const VectorField& C,
                 const ScalarField& z, ScalarField& rhs);

}  // namespace dunesim
