#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "klsc/analytic/seed.hpp"
#include "klsc/diagnostics/divergence.hpp"

namespace klsc {

/// KL(q_beta || q_beta') along an exponential-family path with log-partition
/// psi: (beta - beta') psi'(beta) - (psi(beta) - psi(beta')), with psi' by a
/// centred difference of step h.
double tilt_kl_closed_form(const std::function<double(double)>& psi, double beta, double beta_prime,
                           double h = 1e-4);

/// Standard-normal score quantities at threshold m.
struct GaussianForms {
  double m = 0.0;
  double lambda_mills = 0.0;   // phi(m) / Phi_bar(m)
  double mean_residual = 0.0;  // lambda(m) - m
  double v_hard = 0.0;         // 1 / (lambda(m) - m)
  double v_klsc = 0.0;         // 1 / sqrt(2 pi)
};
GaussianForms gaussian_closed_forms(double m);

/// Both sides of KL(q||p) = KL(q||q_beta) + beta E_q[s] - psi(beta) on a grid.
struct KlDecomposition {
  Divergence kl_q_prior;
  Divergence kl_q_tilt;
  double mean_score = 0.0;
  double log_partition = 0.0;
  double residual = 0.0;
};

/// Throws InvalidArgumentError when either KL term is infinite.
KlDecomposition kl_decomposition(const GridDensity& q, const GridDensity& prior,
                                 const std::vector<double>& score_on_grid, double beta);
double kl_decomposition_residual(const GridDensity& q, const GridDensity& prior,
                                 const std::vector<double>& score_on_grid, double beta);

/// P(||X|| <= alpha sqrt(d)) for X ~ N(0, I_d): Monte Carlo, analytic and the
/// exp(-(1 - alpha^2)^2 d / 4) upper bound.
struct ChiSquareTail {
  std::size_t d = 0;
  double alpha = 0.0;
  double mc_estimate = 0.0;
  double analytic_cdf = 0.0;
  double bound = 0.0;
  bool bound_holds = false;
};
ChiSquareTail chi_square_tail_check(std::size_t d, double alpha, std::size_t n_mc, Rng& rng);

/// Regularized lower incomplete gamma P(dof/2, x/2).
double chi_square_cdf(double x, double dof);

/// TV(q, rho) >= (1 - eta) - q(B(x_map, r)), clipped at zero.
double noisy_map_tv_lower(double eta, double shell_mass);

}  // namespace klsc
