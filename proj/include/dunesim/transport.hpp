#pragma once

// Sediment transport laws.  The diffusion law g_a and transport law g_c share
// the saturating form u^2/(1+u^2):
//   g_a(u) = g0 + g1*u^2/(1+u^2)      (never below g0; saturates at g0+g1)
//   g_c(u) = g2*u^2/(1+u^2)           (g_c(0) = g_c'(0) = 0)
// Both are smooth and bounded with bounded derivatives.  The threshold pair
// (u_thr, G_thr) encodes "speeds at or above u_thr diffuse at least G_thr":
// g_a is nondecreasing, so the requirement is G_thr <= g_a(u_thr).

#include <string>
#include <utility>
#include <vector>

namespace dunesim {

struct TransportLaw {
  double g0 = 0.0, g1 = 0.0, g2 = 0.0;
  double u_thr = 0.0;  // threshold speed, >= 0
  double G_thr = 0.0;  // guaranteed diffusion level at/above threshold, > 0

  double ga(double u) const { return g0 + g1 * u * u / (1.0 + u * u); }
  double gc(double u) const { return g2 * u * u / (1.0 + u * u); }
  // g_c(u)/u extended smoothly through u = 0; C = c*(...)*hc(|U|)*U needs no
  // division by |U| anywhere.
  double hc(double u) const { return g2 * u / (1.0 + u * u); }
  double dga(double u) const {
    const double d = 1.0 + u * u;
    return 2.0 * g1 * u / (d * d);
  }
  double dhc(double u) const {
    const double d = 1.0 + u * u;
    return g2 * (1.0 - u * u) / (d * d);
  }
  // Reported bound on g_a, g_c and their first derivatives.
  double bound_d() const;
};

// Evaluates (g_a(u), g_c(u)); rejects u < 0.
std::pair<double, double> eval_transport(const TransportLaw& law, double u);

// Checks the structural requirements (nonnegativity, g_a >= g_c, threshold
// level); returns a list of human-readable problems, empty when valid.
std::vector<std::string> transport_law_issues(const TransportLaw& law);

}  // namespace dunesim
