#include "klsc/diagnostics/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "klsc/error.hpp"

namespace klsc {

double tilt_kl_closed_form(const std::function<double(double)>& psi, double beta, double beta_prime, double h) {
  if (beta == beta_prime) return 0.0;
  const double dpsi = (psi(beta + h) - psi(beta - h)) / (2.0 * h);
  return (beta - beta_prime) * dpsi - (psi(beta) - psi(beta_prime));
}

GaussianForms gaussian_closed_forms(double m) {
  GaussianForms g;
  g.m = m;
  const double phi = std::exp(-0.5 * m * m) / std::sqrt(2.0 * std::numbers::pi);
  const double survival = 0.5 * std::erfc(m / std::numbers::sqrt2);
  g.lambda_mills = phi / survival;
  g.mean_residual = g.lambda_mills - m;
  g.v_hard = 1.0 / g.mean_residual;
  g.v_klsc = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return g;
}

KlDecomposition kl_decomposition(const GridDensity& q, const GridDensity& prior,
                                 const std::vector<double>& score_on_grid, double beta) {
  KlDecomposition out;
  out.kl_q_prior = grid_kl(q, prior);
  // psi(beta) = log sum p e^{beta s} dA, shifted for stability
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < score_on_grid.size(); ++i) {
    if (prior[i] > 0.0) shift = std::max(shift, beta * score_on_grid[i]);
  }
  double z = 0.0;
  std::vector<double> tilt(prior.values().size());
  for (std::size_t i = 0; i < tilt.size(); ++i) {
    tilt[i] = prior[i] * std::exp(beta * score_on_grid[i] - shift);
    z += tilt[i];
  }
  z *= prior.grid().cell_area();
  out.log_partition = shift + std::log(z);
  for (double& v : tilt) v /= z;
  // Not normalized again: the identity uses exactly p e^{beta s} / Z.
  const GridDensity q_tilt(prior.grid(), std::move(tilt));
  out.kl_q_tilt = grid_kl(q, q_tilt);
  out.mean_score = q.expectation(score_on_grid);
  if (out.kl_q_prior.infinite || out.kl_q_tilt.infinite) {
    throw InvalidArgumentError("kl_decomposition: infinite KL term (q not absolutely continuous)");
  }
  out.residual = std::abs(out.kl_q_prior.value -
                          (out.kl_q_tilt.value + beta * out.mean_score - out.log_partition));
  return out;
}

double kl_decomposition_residual(const GridDensity& q, const GridDensity& prior,
                                 const std::vector<double>& score_on_grid, double beta) {
  return kl_decomposition(q, prior, score_on_grid, beta).residual;
}

double chi_square_cdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(dof / 2.0, x / 2.0);
}

ChiSquareTail chi_square_tail_check(std::size_t d, double alpha, std::size_t n_mc, Rng& rng) {
  if (d < 1) throw InvalidArgumentError("chi_square_tail_check: d must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgumentError("chi_square_tail_check: alpha must be in (0,1)");
  ChiSquareTail out;
  out.d = d;
  out.alpha = alpha;
  const double dd = static_cast<double>(d);
  const double radius2 = alpha * alpha * dd;
  out.analytic_cdf = chi_square_cdf(radius2, dd);
  const double gap = 1.0 - alpha * alpha;
  out.bound = std::exp(-gap * gap * dd / 4.0);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double z = rng.normal();
      r2 += z * z;
    }
    if (r2 <= radius2) ++inside;
  }
  out.mc_estimate = n_mc > 0 ? static_cast<double>(inside) / static_cast<double>(n_mc) : 0.0;
  out.bound_holds = out.analytic_cdf <= out.bound;
  return out;
}

double noisy_map_tv_lower(double eta, double shell_mass) {
  if (!(eta >= 0.0 && eta < 1.0)) throw InvalidArgumentError("noisy_map_tv_lower: eta must be in [0,1)");
  if (!(shell_mass >= 0.0 && shell_mass <= 1.0)) throw InvalidArgumentError("noisy_map_tv_lower: bad shell mass");
  return std::max(0.0, (1.0 - eta) - shell_mass);
}

}  // namespace klsc
