#include "dunesim/field.hpp"

#include <cmath>

namespace dunesim {

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "operator+");
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = a.v[k] + b.v[k];
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "operator-");
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = a.v[k] - b.v[k];
  return out;
}

ScalarField operator*(double s, const ScalarField& a) {
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = s * a.v[k];
  return out;
}

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "pointwise_product");
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = a.v[k] * b.v[k];
  return out;
}

void axpy(double alpha, const ScalarField& x, ScalarField& y) {
  require_same_grid(x.grid, y.grid, "axpy");
  for (std::size_t k = 0; k < x.v.size(); ++k) y.v[k] += alpha * x.v[k];
}

double integral_mean(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return s / static_cast<double>(f.v.size());
}

double l2_norm(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.v) s += x * x;
  return std::sqrt(s / static_cast<double>(f.v.size()));
}

double l2_norm(const VectorField& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < f.x1.v.size(); ++k)
    s += f.x1.v[k] * f.x1.v[k] + f.x2.v[k] * f.x2.v[k];
  return std::sqrt(s / static_cast<double>(f.x1.v.size()));
}

double linf_norm(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

void ensure_finite(const ScalarField& f, const char* op) {
  const int n = f.grid.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!std::isfinite(f(i, j)))
        throw std::invalid_argument(std::string(op) + ": non-finite value at sample (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
}

void ensure_finite(const VectorField& f, const char* op) {
  ensure_finite(f.x1, op);
  ensure_finite(f.x2, op);
}

void require_same_grid(const Grid& a, const Grid& b, const char* op) {
  if (!(a == b))
    throw std::invalid_argument(std::string(op) + ": grid mismatch (n=" +
                                std::to_string(a.n) + " vs n=" + std::to_string(b.n) + ")");
}

}  // namespace dunesim
