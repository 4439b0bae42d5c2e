#include "klsc/analytic/gmm.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>

#include "klsc/error.hpp"

namespace klsc {

IsotropicGmm::IsotropicGmm(std::vector<Point> means, double sigma)
    : means_(std::move(means)), sigma_(sigma) {
  if (means_.empty()) {
    throw InvalidArgumentError("IsotropicGmm: at least one component required");
  }
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw InvalidArgumentError("IsotropicGmm: sigma must be positive and finite");
  }
  for (const Point& m : means_) {
    if (!is_finite(m)) throw InvalidArgumentError("IsotropicGmm: non-finite mean");
  }
}

IsotropicGmm IsotropicGmm::four_mode() {
  return IsotropicGmm({{2.0, 2.0}, {2.0, -2.0}, {-2.0, 2.0}, {-2.0, -2.0}}, 0.8);
}

Point IsotropicGmm::mean() const {
  Point acc{};
  for (const Point& m : means_) acc += m;
  return (1.0 / static_cast<double>(means_.size())) * acc;
}

double IsotropicGmm::log_pdf(Point x) const {
  const double var = sigma_ * sigma_;
  double max_term = -std::numeric_limits<double>::infinity();
  // Two passes keep the buffer on the stack for the usual K <= 8.
  double terms[16];
  std::vector<double> heap;
  double* t = terms;
  if (means_.size() > 16) {
    heap.resize(means_.size());
    t = heap.data();
  }
  for (std::size_t k = 0; k < means_.size(); ++k) {
    const Point d = x - means_[k];
    t[k] = -dot(d, d) / (2.0 * var);
    max_term = std::max(max_term, t[k]);
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < means_.size(); ++k) sum += std::exp(t[k] - max_term);
  const double log_norm = -std::log(2.0 * std::numbers::pi * var);
  return max_term + std::log(sum) + log_norm - std::log(static_cast<double>(means_.size()));
}

std::vector<double> IsotropicGmm::responsibilities(Point x) const {
  const double var = sigma_ * sigma_;
  std::vector<double> w(means_.size());
  double max_term = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < means_.size(); ++k) {
    const Point d = x - means_[k];
    w[k] = -dot(d, d) / (2.0 * var);
    max_term = std::max(max_term, w[k]);
  }
  double sum = 0.0;
  for (double& v : w) {
    v = std::exp(v - max_term);
    sum += v;
  }
  for (double& v : w) v /= sum;
  return w;
}

Point IsotropicGmm::grad_log_pdf(Point x) const {
  const auto w = responsibilities(x);
  Point weighted{};
  for (std::size_t k = 0; k < means_.size(); ++k) weighted += w[k] * means_[k];
  return (1.0 / (sigma_ * sigma_)) * (weighted - x);
}

Point IsotropicGmm::sample(Rng& rng) const {
  const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(means_.size()));
  const Point& mu = means_[std::min(k, means_.size() - 1)];
  const double zx = rng.normal();
  const double zy = rng.normal();
  return {mu.x + sigma_ * zx, mu.y + sigma_ * zy};
}

std::vector<Point> IsotropicGmm::sample(std::size_t n, Rng& rng) const {
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(rng));
  return out;
}

}  // namespace klsc
