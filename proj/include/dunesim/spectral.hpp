#pragma once

// Fourier-side calculus on the 2-torus.  Real fields transform through the
// real-to-complex layout: n rows of k1 (full range, wrapped) by n/2+1 columns
// of k2 >= 0.  Spectra are stored normalized, so c(0,0) equals the field mean
// and derivatives are exact for band-limited data.  The k = n/2 (Nyquist) rows
// and columns carry no usable derivative phase and are zeroed by the
// differential operators.

#include <complex>
#include <vector>

#include "dunesim/field.hpp"

namespace dunesim {

struct Spectrum {
  Grid grid;
  std::vector<std::complex<double>> c;  // size n * (n/2+1), row-major

  Spectrum() = default;
  explicit Spectrum(Grid g) : grid(g), c(static_cast<std::size_t>(g.n) * (g.n / 2 + 1)) {}

  int cols() const { return grid.n / 2 + 1; }
  std::complex<double>& at(int i, int j) { return c[static_cast<std::size_t>(i) * cols() + j]; }
  const std::complex<double>& at(int i, int j) const {
    return c[static_cast<std::size_t>(i) * cols() + j];
  }
};

// Signed wavenumber for row index i of an n-point axis: 0,1,...,n/2,-(n/2-1),...,-1.
inline int wavenumber(int i, int n) { return (i <= n / 2) ? i : i - n; }

Spectrum fft(const ScalarField& f);
ScalarField ifft(const Spectrum& s);
void fft_into(const ScalarField& f, Spectrum& out);
void ifft_into(const Spectrum& s, ScalarField& out);

// grad f via ik multiplication; both components have exactly zero mean.
VectorField spectral_gradient(const ScalarField& f);
// div v via ik dot; the (0,0) coefficient is zero by construction.
ScalarField spectral_divergence(const VectorField& v);
ScalarField spectral_laplacian(const ScalarField& f);

// Spectrum-level kernels used by the steppers (buffers reused by callers).
void gradient_spectra(const Spectrum& z, Spectrum& d1, Spectrum& d2);
// out = i 2pi (k1*g1 + k2*g2); the zero mode is forced to exactly zero.
void divergence_spectra(const Spectrum& g1, const Spectrum& g2, Spectrum& out);

// Zeroes every mode with |k1| > n/3 or k2 > n/3 (2/3-rule for quadratic
// products formed pointwise in physical space).
void dealias_23(Spectrum& s);

ScalarField project_mean_zero(const ScalarField& f);

// Parseval L2 norm computed in mode space (equals l2_norm for real fields).
double parseval_l2(const Spectrum& s);

// 1D spectral derivative of uniform periodic samples over period `period`.
std::vector<double> spectral_derivative_periodic(const std::vector<double>& samples,
                                                 double period = 1.0);

}  // namespace dunesim
