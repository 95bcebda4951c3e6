#include "dunesim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dunesim {

double TransportLaw::bound_d() const {
  // sup g_a = g0 + g1, sup g_c = g2, sup|g_a'| = g1*3*sqrt(3)/8 (at u =
  // 1/sqrt(3)), sup|g_c'| = g2 (at u = 0).
  const double dga_max = g1 * 3.0 * std::sqrt(3.0) / 8.0;
  return std::max({g0 + g1, g2, dga_max});
}

std::pair<double, double> eval_transport(const TransportLaw& law, double u) {
  if (u < 0.0) throw std::invalid_argument("eval_transport: speed must be >= 0");
  return {law.ga(u), law.gc(u)};
}

std::vector<std::string> transport_law_issues(const TransportLaw& law) {
  std::vector<std::string> issues;
  if (!(law.g0 >= 0.0)) issues.push_back("g0 must be >= 0");
  if (!(law.g1 >= 0.0)) issues.push_back("g1 must be >= 0");
  if (!(law.g2 >= 0.0)) issues.push_back("g2 must be >= 0");
  if (!(law.u_thr >= 0.0)) issues.push_back("u_thr must be >= 0");
  if (!(law.G_thr > 0.0)) issues.push_back("G_thr must be > 0");
  // g_a(u) - g_c(u) = g0 + (g1-g2)*u^2/(1+u^2): nonnegative for all u iff
  // g0 + g1 >= g2 (limit u -> inf); checked in closed form and by sampling.
  if (law.g0 + law.g1 < law.g2)
    issues.push_back("g_a >= g_c requires g0 + g1 >= g2");
  for (int k = 0; k <= 64; ++k) {
    const double u = 0.25 * k;
    if (law.ga(u) < law.gc(u) - 1e-12) {
      issues.push_back("sampled g_a < g_c at u = " + std::to_string(u));
      break;
    }
  }
  // g_a nondecreasing, so min over u >= u_thr is attained at u_thr.
  if (law.G_thr > 0.0 && law.ga(law.u_thr) < law.G_thr - 1e-12)
    issues.push_back("g_a(u_thr) < G_thr: threshold level not achieved");
  return issues;
}

}  // namespace dunesim
