#pragma once

// Real-valued fields sampled on a uniform n-by-n grid covering the flat
// 2-torus [0,1)^2.  Sample (i,j) sits at x = (i/n, j/n); storage is row-major
// with i (the x1 index) slow and j (the x2 index) fast.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dunesim {

struct Grid {
  int n = 0;  // points per axis; even and >= 4

  Grid() = default;
  explicit Grid(int n_) : n(n_) {
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument("Grid: n must be even and >= 4, got " +
                                  std::to_string(n));
  }
  double spacing() const { return 1.0 / n; }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  bool operator==(const Grid&) const = default;
};

struct ScalarField {
  Grid grid;
  std::vector<double> v;  // size grid.size(), row-major

  ScalarField() = default;
  explicit ScalarField(Grid g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

  double& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * grid.n + j]; }
  double operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * grid.n + j]; }
};

struct VectorField {
  ScalarField x1, x2;  // components along the two torus directions

  VectorField() = default;
  explicit VectorField(Grid g) : x1(g), x2(g) {}
  Grid grid() const { return x1.grid; }
};

// Pointwise arithmetic helpers (allocating variants are fine at these sizes).
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
ScalarField pointwise_product(const ScalarField& a, const ScalarField& b);
void axpy(double alpha, const ScalarField& x, ScalarField& y);  // y += alpha*x

// Mean over the torus; exact average of samples (trapezoid == midpoint on a
// periodic uniform grid, and exact for band-limited integrands).
double integral_mean(const ScalarField& f);

// L2(T^2) norm: sqrt(mean of squares).  Vector version uses |v|^2 = v1^2+v2^2.
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& f);
double linf_norm(const ScalarField& f);

// Throws std::invalid_argument naming `op` and the first offending sample if
// the field contains a non-finite value.
void ensure_finite(const ScalarField& f, const char* op);
void ensure_finite(const VectorField& f, const char* op);

void require_same_grid(const Grid& a, const Grid& b, const char* op);

}  // namespace dunesim
