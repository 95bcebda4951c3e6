#include "dunesim/spectral.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <numbers>

namespace dunesim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Cached FFTW plans per grid size.  Plans are created with FFTW_ESTIMATE so
// the chosen algorithm (and therefore the rounding pattern of results) does
// not depend on runtime measurements.  Transforms run through internal
// buffers: FFTW's c2r pass is allowed to clobber its input, and callers
// expect their spectra untouched.
struct Plans {
  int n = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Plans(int n_) : n(n_) {
    const int nc = n * (n / 2 + 1);
    real = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    cplx = fftw_alloc_complex(static_cast<std::size_t>(nc));
    fwd = fftw_plan_dft_r2c_2d(n, n, real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(n, n, cplx, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

Plans& plans_for(int n) {
  static std::map<int, std::unique_ptr<Plans>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Plans>(n)).first;
  return *it->second;
}

struct Plans1D {
  int m = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Plans1D(int m_) : m(m_) {
    real = fftw_alloc_real(static_cast<std::size_t>(m));
    cplx = fftw_alloc_complex(static_cast<std::size_t>(m / 2 + 1));
    fwd = fftw_plan_dft_r2c_1d(m, real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(m, cplx, real, FFTW_ESTIMATE);
  }
  ~Plans1D() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }
  Plans1D(const Plans1D&) = delete;
  Plans1D& operator=(const Plans1D&) = delete;
};

Plans1D& plans1d_for(int m) {
  static std::map<int, std::unique_ptr<Plans1D>> cache;
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, std::make_unique<Plans1D>(m)).first;
  return *it->second;
}

}  // namespace

void fft_into(const ScalarField& f, Spectrum& out) {
  const int n = f.grid.n;
  Plans& p = plans_for(n);
  if (out.grid.n != n) out = Spectrum(f.grid);
  std::memcpy(p.real, f.v.data(), sizeof(double) * f.v.size());
  fftw_execute(p.fwd);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  const std::size_t nc = out.c.size();
  for (std::size_t k = 0; k < nc; ++k)
    out.c[k] = std::complex<double>(p.cplx[k][0] * scale, p.cplx[k][1] * scale);
}

void ifft_into(const Spectrum& s, ScalarField& out) {
  const int n = s.grid.n;
  Plans& p = plans_for(n);
  if (out.grid.n != n) out = ScalarField(s.grid);
  const std::size_t nc = s.c.size();
  for (std::size_t k = 0; k < nc; ++k) {
    p.cplx[k][0] = s.c[k].real();
    p.cplx[k][1] = s.c[k].imag();
  }
  fftw_execute(p.bwd);
  std::memcpy(out.v.data(), p.real, sizeof(double) * out.v.size());
}

Spectrum fft(const ScalarField& f) {
  Spectrum s(f.grid);
  fft_into(f, s);
  return s;
}

ScalarField ifft(const Spectrum& s) {
  ScalarField f(s.grid);
  ifft_into(s, f);
  return f;
}

void gradient_spectra(const Spectrum& z, Spectrum& d1, Spectrum& d2) {
  const int n = z.grid.n;
  const int cols = z.cols();
  if (d1.grid.n != n) d1 = Spectrum(z.grid);
  if (d2.grid.n != n) d2 = Spectrum(z.grid);
  for (int i = 0; i < n; ++i) {
    const int k1 = wavenumber(i, n);
    // Nyquist rows/columns carry a real mode with no well-defined odd
    // derivative on the real grid; their phase factor is dropped.
    const double f1 = (i == n / 2) ? 0.0 : kTwoPi * k1;
    for (int j = 0; j < cols; ++j) {
      const double f2 = (j == n / 2) ? 0.0 : kTwoPi * j;
      const std::complex<double> zc = z.c[static_cast<std::size_t>(i) * cols + j];
      const std::complex<double> izc(-zc.imag(), zc.real());  // i * zc
      d1.c[static_cast<std::size_t>(i) * cols + j] = f1 * izc;
      d2.c[static_cast<std::size_t>(i) * cols + j] = f2 * izc;
    }
  }
}

void divergence_spectra(const Spectrum& g1, const Spectrum& g2, Spectrum& out) {
  const int n = g1.grid.n;
  const int cols = g1.cols();
  if (out.grid.n != n) out = Spectrum(g1.grid);
  for (int i = 0; i < n; ++i) {
    const int k1 = wavenumber(i, n);
    const double f1 = (i == n / 2) ? 0.0 : kTwoPi * k1;
    for (int j = 0; j < cols; ++j) {
      const double f2 = (j == n / 2) ? 0.0 : kTwoPi * j;
      const std::size_t idx = static_cast<std::size_t>(i) * cols + j;
      const std::complex<double> s = f1 * g1.c[idx] + f2 * g2.c[idx];
      out.c[idx] = std::complex<double>(-s.imag(), s.real());  // i * s
    }
  }
  out.c[0] = 0.0;  // zero mode exactly zero: divergences integrate to zero
}

VectorField spectral_gradient(const ScalarField& f) {
  ensure_finite(f, "spectral_gradient");
  Spectrum z = fft(f), d1(f.grid), d2(f.grid);
  gradient_spectra(z, d1, d2);
  VectorField g(f.grid);
  ifft_into(d1, g.x1);
  ifft_into(d2, g.x2);
  return g;
}

ScalarField spectral_divergence(const VectorField& v) {
  ensure_finite(v, "spectral_divergence");
  Spectrum g1 = fft(v.x1), g2 = fft(v.x2), d(v.grid());
  divergence_spectra(g1, g2, d);
  return ifft(d);
}

ScalarField spectral_laplacian(const ScalarField& f) {
  ensure_finite(f, "spectral_laplacian");
  Spectrum z = fft(f);
  const int n = z.grid.n;
  const int cols = z.cols();
  for (int i = 0; i < n; ++i) {
    const int k1 = wavenumber(i, n);
    for (int j = 0; j < cols; ++j) {
      const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(j) * j;
      z.c[static_cast<std::size_t>(i) * cols + j] *= -kTwoPi * kTwoPi * k2sum;
    }
  }
  return ifft(z);
}

void dealias_23(Spectrum& s) {
  const int n = s.grid.n;
  const int cols = s.cols();
  const int kmax = n / 3;
  for (int i = 0; i < n; ++i) {
    const int k1 = std::abs(wavenumber(i, n));
    for (int j = 0; j < cols; ++j)
      if (k1 > kmax || j > kmax) s.c[static_cast<std::size_t>(i) * cols + j] = 0.0;
  }
}

ScalarField project_mean_zero(const ScalarField& f) {
  const double m = integral_mean(f);
  ScalarField out(f.grid);
  for (std::size_t k = 0; k < f.v.size(); ++k) out.v[k] = f.v[k] - m;
  return out;
}

double parseval_l2(const Spectrum& s) {
  const int n = s.grid.n;
  const int cols = s.cols();
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < cols; ++j) {
      const double w = (j == 0 || j == n / 2) ? 1.0 : 2.0;  // conjugate halves
      sum += w * std::norm(s.c[static_cast<std::size_t>(i) * cols + j]);
    }
  return std::sqrt(sum);
}

std::vector<double> spectral_derivative_periodic(const std::vector<double>& samples,
                                                 double period) {
  const int m = static_cast<int>(samples.size());
  if (m < 2) throw std::invalid_argument("spectral_derivative_periodic: need >= 2 samples");
  Plans1D& p = plans1d_for(m);
  std::memcpy(p.real, samples.data(), sizeof(double) * samples.size());
  fftw_execute(p.fwd);
  const double scale = 1.0 / m;
  const int half = m / 2;
  for (int k = 0; k <= half; ++k) {
    // multiply by i*2pi*k/period (Nyquist zeroed for even m), then normalize
    const double f = (2 * k == m) ? 0.0 : kTwoPi * k / period;
    const double re = p.cplx[k][0] * scale;
    const double im = p.cplx[k][1] * scale;
    p.cplx[k][0] = -f * im;
    p.cplx[k][1] = f * re;
  }
  fftw_execute(p.bwd);
  std::vector<double> out(samples.size());
  std::memcpy(out.data(), p.real, sizeof(double) * out.size());
  return out;
}

}  // namespace dunesim
