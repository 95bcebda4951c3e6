#include "dunesim/stepper.hpp"

#include <cmath>
#include <stdexcept>

namespace dunesim {

double phi1(double s) {
  if (std::fabs(s) < 1e-5) return 1.0 + s / 2.0 + s * s / 6.0;
  return std::expm1(s) / s;
}

ImexStepper::ImexStepper(Grid g, double scale, double abar, double dt)
    : g_(g),
      scale_(scale),
      abar_(abar),
      dt_(dt),
      g1_(g),
      g2_(g),
      f1_(g),
      f2_(g),
      div_(g),
      fhat_(g),
      w1_(g),
      w2_(g) {
  if (!(scale > 0.0) || !(dt > 0.0) || abar < 0.0)
    throw std::invalid_argument("ImexStepper: need scale > 0, dt > 0, abar >= 0");
  const int n = g.n, cols = g.n / 2 + 1;
  E_.resize(static_cast<std::size_t>(n) * cols);
  P_.resize(E_.size());
  const double fourpi2 = 4.0 * M_PI * M_PI;
  for (int i = 0; i < n; ++i) {
    const double k1 = wavenumber(i, n);
    for (int j = 0; j < cols; ++j) {
      const double k2 = j;
      const double lam = scale * abar * fourpi2 * (k1 * k1 + k2 * k2);
      const std::size_t idx = static_cast<std::size_t>(i) * cols + j;
      E_[idx] = std::exp(-lam * dt);
      P_[idx] = dt * phi1(-lam * dt);
    }
  }
}

void ImexStepper::step(Spectrum& zhat, const ScalarField& A,
                       const VectorField& C, const ScalarField* f,
                       bool zero_mean) {
  gradient_spectra(zhat, g1_, g2_);
  ifft_into(g1_, w1_);
  ifft_into(g2_, w2_);
  const std::size_t npts = w1_.v.size();
  for (std::size_t k = 0; k < npts; ++k) {
    const double dev = A.v[k] - abar_;
    w1_.v[k] = dev * w1_.v[k] + C.x1.v[k];
    w2_.v[k] = dev * w2_.v[k] + C.x2.v[k];
  }
  fft_into(w1_, f1_);
  fft_into(w2_, f2_);
  dealias_23(f1_);
  dealias_23(f2_);
  divergence_spectra(f1_, f2_, div_);
  const std::size_t nm = div_.c.size();
  for (std::size_t k = 0; k < nm; ++k) div_.c[k] *= scale_;
  if (f) {
    fft_into(*f, fhat_);
    for (std::size_t k = 0; k < nm; ++k) div_.c[k] += fhat_.c[k];
  }
  for (std::size_t k = 0; k < nm; ++k)
    zhat.c[k] = E_[k] * zhat.c[k] + P_[k] * div_.c[k];
  if (zero_mean) zhat.c[0] = 0.0;
}

void fd_flux_rhs(const ScalarField& A, const VectorField& C,
                 const ScalarField& z, ScalarField& rhs) {
  const int n = z.grid.n;
  const double h = 1.0 / n;
  const double ih2 = 1.0 / (h * h);
  const double i2h = 1.0 / (2.0 * h);
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n, im = (i + n - 1) % n;
    for (int j = 0; j < n; ++j) {
      const int jp = (j + 1) % n, jm = (j + n - 1) % n;
      const double ae = 0.5 * (A(i, j) + A(ip, j));
      const double aw = 0.5 * (A(i, j) + A(im, j));
      const double an = 0.5 * (A(i, j) + A(i, jp));
      const double as = 0.5 * (A(i, j) + A(i, jm));
      const double diff = ae * (z(ip, j) - z(i, j)) - aw * (z(i, j) - z(im, j)) +
                          an * (z(i, jp) - z(i, j)) - as * (z(i, j) - z(i, jm));
      const double dvc = (C.x1(ip, j) - C.x1(im, j)) * i2h +
                         (C.x2(i, jp) - C.x2(i, jm)) * i2h;
      rhs(i, j) = diff * ih2 + dvc;
    }
  }
}

}  // namespace dunesim
