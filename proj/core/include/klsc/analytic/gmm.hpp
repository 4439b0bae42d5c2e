#pragma once

#include <cstddef>
#include <vector>

#include "klsc/analytic/point.hpp"
#include "klsc/analytic/seed.hpp"

namespace klsc {

/// Uniform-weight isotropic Gaussian mixture (1/K) sum_k N(mu_k, sigma^2 I).
class IsotropicGmm {
 public:
  IsotropicGmm(std::vector<Point> means, double sigma);

  /// Four modes at (+-2, +-2) with sigma = 0.8.
  static IsotropicGmm four_mode();
  static IsotropicGmm standard_normal() { return IsotropicGmm({{0.0, 0.0}}, 1.0); }

  const std::vector<Point>& means() const noexcept { return means_; }
  double sigma() const noexcept { return sigma_; }
  std::size_t size() const noexcept { return means_.size(); }
  Point mean() const;

  /// log-sum-exp over components, never exponentiated.
  double log_pdf(Point x) const;
  Point grad_log_pdf(Point x) const;
  /// Posterior component probabilities at x; sums to one.
  std::vector<double> responsibilities(Point x) const;

  Point sample(Rng& rng) const;
  std::vector<Point> sample(std::size_t n, Rng& rng) const;

 private:
  std::vector<Point> means_;
  double sigma_;
};

}  // namespace klsc
