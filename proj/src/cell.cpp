#include "dunesim/cell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "dunesim/spectral.hpp"
#include "dunesim/stepper.hpp"

namespace dunesim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void validate_problem(const ThetaProblem& p) {
  if (p.m_theta < 2 || p.A.size() != static_cast<std::size_t>(p.m_theta) ||
      p.C.size() != static_cast<std::size_t>(p.m_theta))
    throw std::invalid_argument(
        "theta solve: A and C need m_theta >= 2 slices");
  if (!p.f.empty() && p.f.size() != static_cast<std::size_t>(p.m_theta))
    throw std::invalid_argument("theta solve: f must be empty or m_theta slices");
  if (!(p.lambda > 0.0))
    throw std::invalid_argument("theta solve: lambda must be positive");
  if (p.nu < 0.0) throw std::invalid_argument("theta solve: nu must be >= 0");
  if (p.mu != 0.0)
    throw std::invalid_argument(
        "theta solve: the penalization is realized as an exact mean "
        "projection; set mu = 0");
  double amin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < p.m_theta; ++k) {
    if (p.A[k].grid.n != p.grid.n || p.C[k].grid().n != p.grid.n)
      throw std::invalid_argument("theta solve: slice grid mismatch");
    for (double a : p.A[k].v) amin = std::min(amin, a);
    if (!p.f.empty()) {
      if (p.f[k].grid.n != p.grid.n)
        throw std::invalid_argument("theta solve: slice grid mismatch");
      if (std::abs(integral_mean(p.f[k])) > 1e-10)
        throw std::invalid_argument(
            "theta solve: f must have zero spatial mean at every theta");
    }
  }
  if (amin < -1e-12)
    throw std::invalid_argument("theta solve: diffusion must be nonnegative");
  if (p.nu == 0.0 && amin <= 0.0)
    throw std::invalid_argument(
        "theta solve: nu = 0 requires a strictly positive diffusion floor");
}

struct MarchSetup {
  double abar = 0.0, dtheta = 0.0;
  int steps_per_node = 1;
};

MarchSetup plan_march(const ThetaProblem& p) {
  double amin = std::numeric_limits<double>::infinity(), amax = 0.0;
  double maxdiv = 0.0;
  for (int k = 0; k < p.m_theta; ++k) {
    for (double a : p.A[k].v) {
      amin = std::min(amin, a);
      amax = std::max(amax, a);
    }
    maxdiv = std::max(maxdiv, linf_norm(spectral_divergence(p.C[k])));
  }
  amin = std::max(amin, 0.0);
  MarchSetup ms;
  ms.abar = 0.5 * (amax + amin) + p.nu;
  const double khalf = p.grid.n / 2.0;
  const double dev = 0.5 * (amax - amin);
  double target =
      p.dtheta_override > 0.0
          ? p.dtheta_override
          : 0.8 / (p.lambda * dev * kTwoPi * kTwoPi * khalf * khalf +
                   p.lambda * maxdiv * kTwoPi * khalf + 1.0);
  target = std::min(target, 1.0 / (2.0 * p.m_theta));
  const double node = 1.0 / p.m_theta;
  ms.steps_per_node = static_cast<int>(std::ceil(node / target - 1e-12));
  if (ms.steps_per_node < 1) ms.steps_per_node = 1;
  ms.dtheta = node / ms.steps_per_node;
  return ms;
}

void lerp_into(const ScalarField& a, const ScalarField& b, double w,
               ScalarField& out, double shift) {
  const double u = 1.0 - w;
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] = u * a.v[i] + w * b.v[i] + shift;
}

void lerp_into(const VectorField& a, const VectorField& b, double w,
               VectorField& out) {
  lerp_into(a.x1, b.x1, w, out.x1, 0.0);
  lerp_into(a.x2, b.x2, w, out.x2, 0.0);
}

double max_node_gap(const std::vector<ScalarField>& a,
                    const std::vector<ScalarField>& b) {
  double r = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    r = std::max(r, l2_norm(a[k] - b[k]));
  return r;
}

}  // namespace

CellSolution solve_theta_periodic(const ThetaProblem& p, double tol,
                                  const CellSolution* warm_start) {
  validate_problem(p);
  if (!(tol > 0.0))
    throw std::invalid_argument("theta solve: tol must be positive");
  if (warm_start &&
      (warm_start->S.size() != static_cast<std::size_t>(p.m_theta) ||
       warm_start->S[0].grid.n != p.grid.n))
    throw std::invalid_argument("theta solve: warm start shape mismatch");

  const Grid g = p.grid;
  const int m = p.m_theta;
  const MarchSetup ms = plan_march(p);
  ImexStepper stepper(g, p.lambda, ms.abar, ms.dtheta);

  ScalarField state =
      warm_start ? project_mean_zero(warm_start->S[0]) : ScalarField(g);
  Spectrum zhat = fft(state);
  zhat.at(0, 0) = 0.0;

  std::vector<ScalarField> prev, cur;
  prev.assign(m, ScalarField(g));
  cur.assign(m, ScalarField(g));
  if (warm_start)
    for (int k = 0; k < m; ++k) prev[k] = project_mean_zero(warm_start->S[k]);

  ScalarField Ab(g), fb(g), slice(g);
  VectorField Cb(g);

  CellSolution sol;
  sol.mu = 0.0;
  sol.nu = p.nu;
  sol.lambda = p.lambda;

  double prev_res = std::numeric_limits<double>::infinity();
  int stall_count = 0;
  for (int period = 1; period <= p.max_periods; ++period) {
    for (int k = 0; k < m; ++k) {
      ifft_into(zhat, cur[k]);
      const int k1 = (k + 1) % m;
      for (int s = 0; s < ms.steps_per_node; ++s) {
        const double w = (s + 0.5) / ms.steps_per_node;
        lerp_into(p.A[k], p.A[k1], w, Ab, p.nu);
        lerp_into(p.C[k], p.C[k1], w, Cb);
        const ScalarField* fsrc = nullptr;
        if (!p.f.empty()) {
          lerp_into(p.f[k], p.f[k1], w, fb, 0.0);
          fsrc = &fb;
        }
        stepper.step(zhat, Ab, Cb, fsrc, true);
      }
    }
    if (!std::isfinite(parseval_l2(zhat)))
      throw std::runtime_error("theta solve: state became non-finite");

    const double res = max_node_gap(cur, prev);
    sol.iterations = period;
    sol.periodicity_residual = res;
    sol.residual_history.push_back(res);
    if (res <= tol) {
      sol.converged = true;
      break;
    }
    if (std::isfinite(prev_res) && prev_res > 0.0) {
      if (res / prev_res > 0.99 && res > tol) {
        if (++stall_count >= 5) {
          char buf[160];
          std::snprintf(buf, sizeof(buf),
                        "theta solve: contraction stall (residual %.3e, "
                        "reduction factor > 0.99 for 5 periods; nu=%.3e, "
                        "lambda=%.3e)",
                        res, p.nu, p.lambda);
          throw std::runtime_error(buf);
        }
      } else {
        stall_count = 0;
      }
    }
    prev_res = res;
    prev.swap(cur);
  }
  if (!sol.converged) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "period budget reached with residual %.3e > tol %.3e",
                  sol.periodicity_residual, tol);
    sol.note = buf;
  }
  sol.S = std::move(cur);
  return sol;
}

bool EstimateReport::all_pass() const {
  for (const EstimateRow& r : rows)
    if (!r.pass) return false;
  return true;
}

std::string EstimateReport::to_csv() const {
  std::string out = "estimate_id,lhs,rhs,pass,nu,mu,lambda\n";
  char buf[256];
  for (const EstimateRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%d,%.17g,%.17g,%.17g\n",
                  r.id.c_str(), r.lhs, r.rhs, r.pass ? 1 : 0, nu, mu, lambda);
    out += buf;
  }
  return out;
}

EstimateReport cell_estimates(const CellSolution& sol, const ThetaProblem& p,
                              const HypothesisReport& hyp,
                              const std::vector<ScalarField>* dSdt) {
  if (sol.S.size() != static_cast<std::size_t>(p.m_theta))
    throw std::invalid_argument("cell_estimates: solution/problem mismatch");
  const int m = p.m_theta;
  const double gamma = hyp.gamma;
  const double Gt = hyp.Gthr;
  const double nu = sol.nu;
  const double eps = 1.0 / sol.lambda;

  double sup_mean = 0.0, sup_S = 0.0, sup_grad = 0.0;
  double acc_grad2 = 0.0, acc_lap2 = 0.0, acc_dth2 = 0.0, acc_wgrad2 = 0.0;
  ScalarField flux_div(p.grid);
  for (int k = 0; k < m; ++k) {
    const ScalarField& S = sol.S[k];
    sup_mean = std::max(sup_mean, std::abs(integral_mean(S)));
    sup_S = std::max(sup_S, l2_norm(S));
    const VectorField grad = spectral_gradient(S);
    const double gn = l2_norm(grad);
    sup_grad = std::max(sup_grad, gn);
    acc_grad2 += gn * gn;
    const double ln = l2_norm(spectral_laplacian(S));
    acc_lap2 += ln * ln;
    double w = 0.0;
    VectorField flux(p.grid);
    for (std::size_t i = 0; i < S.v.size(); ++i) {
      const double a = p.A[k].v[i];
      const double g2 = grad.x1.v[i] * grad.x1.v[i] +
                        grad.x2.v[i] * grad.x2.v[i];
      w += a * g2;
      flux.x1.v[i] = (a + nu) * grad.x1.v[i] + p.C[k].x1.v[i];
      flux.x2.v[i] = (a + nu) * grad.x2.v[i] + p.C[k].x2.v[i];
    }
    acc_wgrad2 += w / S.v.size();
    // dS/dtheta through the equation the march discretizes.
    flux_div = spectral_divergence(flux);
    double d2 = 0.0;
    for (std::size_t i = 0; i < flux_div.v.size(); ++i) {
      double val = sol.lambda * flux_div.v[i];
      if (!p.f.empty()) val += p.f[k].v[i];
      d2 += val * val;
    }
    acc_dth2 += d2 / flux_div.v.size();
  }
  const double grad_l2 = std::sqrt(acc_grad2 / m);
  const double lap_l2 = std::sqrt(acc_lap2 / m);
  const double dth_l2 = std::sqrt(acc_dth2 / m);
  const double wgrad_l2 = std::sqrt(acc_wgrad2 / m);
  double sup_dSdt = 0.0;
  if (dSdt)
    for (const ScalarField& d : *dSdt)
      sup_dSdt = std::max(sup_dSdt, l2_norm(d));

  EstimateReport rep;
  rep.nu = nu;
  rep.mu = sol.mu;
  rep.lambda = sol.lambda;
  auto add = [&rep](const std::string& id, double lhs, double rhs) {
    rep.rows.push_back({id, lhs, rhs, lhs <= rhs * (1.0 + 1e-12) + 1e-300});
  };
  const double sqrtGt = Gt > 0.0 ? std::sqrt(Gt)
                                 : std::numeric_limits<double>::infinity();

  add("3.280", sup_mean, 1e-12);
  add("gr2", wgrad_l2, gamma);
  if (nu > 0.0) {
    const double gn = gamma / nu;
    add("+01", grad_l2, gn);
    add("+02", lap_l2, std::sqrt(2.0) * eps * gn * std::sqrt(gn * gn + 1.0));
    add("3.281", dth_l2,
        gamma / std::sqrt(eps * nu) * std::sqrt(gamma / (2.0 * nu) + 1.0));
    const double linf_bound =
        std::sqrt(gn * gn + (2.0 * eps * gamma * gamma / nu) * (gn * gn + 1.0));
    add("3.282", sup_grad, linf_bound);
    add("3.283", sup_S, linf_bound);
    add("XXC", sup_S * sup_S,
        gamma / sqrtGt + 2.0 * eps * gamma * gamma * gamma);
    if (dSdt) {
      add("3.29", sup_dSdt, eps * eps * eps * gn * (1.0 + gn));
      add("3.1013", sup_dSdt * sup_dSdt,
          eps * ((gamma + eps * gamma * gamma * gamma) / sqrtGt +
                 gamma * gamma + eps * eps * gamma * gamma * gamma * gamma));
    }
  } else {
    add("3.105", sup_S * sup_S,
        gamma / sqrtGt + 2.0 * eps * gamma * gamma * gamma);
    if (dSdt)
      add("3.106", sup_dSdt * sup_dSdt,
          eps * ((gamma + eps * gamma * gamma * gamma) / sqrtGt +
                 gamma * gamma + eps * eps * gamma * gamma * gamma * gamma));
  }
  return rep;
}

ContinuationResult continuation_nu(ThetaProblem p,
                                   const std::vector<double>& nu_schedule,
                                   double tol, const HypothesisReport& hyp) {
  if (nu_schedule.empty())
    throw std::invalid_argument("continuation_nu: empty schedule");
  for (std::size_t i = 0; i < nu_schedule.size(); ++i) {
    if (!(nu_schedule[i] > 0.0) ||
        (i > 0 && nu_schedule[i] >= nu_schedule[i - 1]))
      throw std::invalid_argument(
          "continuation_nu: schedule must be decreasing and positive");
  }
  if (nu_schedule.back() < 1e-6)
    throw std::invalid_argument("continuation_nu: final nu must be >= 1e-6");
  p.mu = 0.0;
  ContinuationResult out;
  CellSolution sol;
  bool have = false;
  for (double nu : nu_schedule) {
    p.nu = nu;
    CellSolution next = solve_theta_periodic(p, tol, have ? &sol : nullptr);
    if (have) {
      double acc = 0.0;
      for (int k = 0; k < p.m_theta; ++k) {
        const double d = l2_norm(next.S[k] - sol.S[k]);
        acc += d * d;
      }
      out.increments.push_back(std::sqrt(acc / p.m_theta));
    }
    sol = std::move(next);
    have = true;
    out.nu_values.push_back(nu);
    out.reports.push_back(cell_estimates(sol, p, hyp));
  }
  out.final = std::move(sol);
  return out;
}

std::vector<ScalarField> solve_dSdt(const ThetaProblem& p,
                                    const CellSolution& sol,
                                    const std::vector<ScalarField>& dAdt,
                                    const std::vector<VectorField>& dCdt,
                                    double tol) {
  if (dAdt.size() != static_cast<std::size_t>(p.m_theta) ||
      dCdt.size() != static_cast<std::size_t>(p.m_theta) ||
      sol.S.size() != static_cast<std::size_t>(p.m_theta))
    throw std::invalid_argument("solve_dSdt: slice count mismatch");
  ThetaProblem q = p;
  for (int k = 0; k < p.m_theta; ++k) {
    const VectorField grad = spectral_gradient(sol.S[k]);
    VectorField Ck(p.grid);
    for (std::size_t i = 0; i < grad.x1.v.size(); ++i) {
      Ck.x1.v[i] = dCdt[k].x1.v[i] + dAdt[k].v[i] * grad.x1.v[i];
      Ck.x2.v[i] = dCdt[k].x2.v[i] + dAdt[k].v[i] * grad.x2.v[i];
    }
    q.C[k] = std::move(Ck);
  }
  q.f.clear();
  return solve_theta_periodic(q, tol).S;
}

ThetaProblem theta_problem_from_preset(const Preset& preset, Grid g, double t,
                                       double tau, double eps, int m_theta,
                                       double nu, double lambda) {
  if (m_theta < 2)
    throw std::invalid_argument("theta_problem_from_preset: m_theta >= 2");
  const PresetSampler s(preset, g);
  ThetaProblem p;
  p.grid = g;
  p.m_theta = m_theta;
  p.nu = nu;
  p.lambda = lambda;
  p.A.reserve(m_theta);
  p.C.reserve(m_theta);
  for (int k = 0; k < m_theta; ++k) {
    CoeffPair ac = assemble_AC(s, t, tau, static_cast<double>(k) / m_theta, eps);
    p.A.push_back(std::move(ac.A));
    p.C.push_back(std::move(ac.C));
  }
  return p;
}

void preset_theta_slices_dt(const Preset& preset, Grid g, double t, double tau,
                            double eps, int m_theta,
                            std::vector<ScalarField>& dAdt,
                            std::vector<VectorField>& dCdt) {
  const PresetSampler s(preset, g);
  dAdt.clear();
  dCdt.clear();
  dAdt.reserve(m_theta);
  dCdt.reserve(m_theta);
  for (int k = 0; k < m_theta; ++k) {
    CoeffPair d = assemble_dACdt(s, t, tau, static_cast<double>(k) / m_theta, eps);
    dAdt.push_back(std::move(d.A));
    dCdt.push_back(std::move(d.C));
  }
}

}  // namespace dunesim
