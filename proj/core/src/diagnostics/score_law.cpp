#include "klsc/diagnostics/score_law.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "klsc/error.hpp"

namespace klsc {

namespace {

// Angle density of a single 2-D component N(mu, sigma^2 I):
// (1/2pi) e^{-|mu|^2/2s^2} [1 + a sqrt(2pi) Phi(a) e^{a^2/2}],  a = mu.u / sigma.
double component_angle_density(Point mu, double sigma, double theta) {
  const double a = (mu.x * std::cos(theta) + mu.y * std::sin(theta)) / sigma;
  const double base = std::exp(-dot(mu, mu) / (2.0 * sigma * sigma));
  const double phi_cdf = 0.5 * std::erfc(-a / std::numbers::sqrt2);
  const double tail = a * std::sqrt(2.0 * std::numbers::pi) * phi_cdf *
                      std::exp(a * a / 2.0 - dot(mu, mu) / (2.0 * sigma * sigma));
  return (base + tail) / (2.0 * std::numbers::pi);
}

}  // namespace

ScalarScoreLaw ScalarScoreLaw::from_samples(std::vector<double> values, std::vector<double> weights) {
  if (values.empty()) throw EmptySampleError("ScalarScoreLaw: no samples");
  if (weights.empty()) weights.assign(values.size(), 1.0);
  if (weights.size() != values.size()) throw InvalidArgumentError("ScalarScoreLaw: weight count mismatch");
  ScalarScoreLaw law;
  law.values_ = std::move(values);
  law.weights_ = std::move(weights);
  for (double w : law.weights_) {
    if (!(w >= 0.0)) throw InvalidArgumentError("ScalarScoreLaw: negative weight");
    law.weight_total_ += w;
  }
  if (!(law.weight_total_ > 0.0)) throw InvalidArgumentError("ScalarScoreLaw: zero total weight");
  return law;
}

ScalarScoreLaw ScalarScoreLaw::from_density(std::function<double(double)> pdf, double lo, double hi) {
  if (!pdf) throw InvalidArgumentError("ScalarScoreLaw: empty density");
  if (!(hi > lo)) throw InvalidArgumentError("ScalarScoreLaw: empty support");
  ScalarScoreLaw law;
  law.pdf_ = std::move(pdf);
  law.lo_ = lo;
  law.hi_ = hi;
  return law;
}

ScalarScoreLaw ScalarScoreLaw::standard_normal() {
  return from_density(
      [](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); },
      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
}

ScalarScoreLaw ScalarScoreLaw::angular_under_gmm(const IsotropicGmm& prior, const AngularScore& score) {
  const double scale = score.scale;
  const double theta0 = score.theta0;
  auto means = prior.means();
  const double sigma = prior.sigma();
  auto angle_density = [means, sigma](double theta) {
    double s = 0.0;
    for (const Point& mu : means) s += component_angle_density(mu, sigma, theta);
    return s / static_cast<double>(means.size());
  };
  // u = scale (1 - cos phi), phi = |theta - theta0| in (0, pi); two branches.
  auto pdf = [angle_density, scale, theta0](double u) {
    if (u <= 0.0 || u >= 2.0 * scale) return 0.0;
    // 1 - cos phi = 2 sin^2(phi / 2) keeps phi and the Jacobian accurate at both ends.
    const double phi = 2.0 * std::asin(std::sqrt(u / (2.0 * scale)));
    const double jac = std::sqrt(u * (2.0 * scale - u));
    if (!(jac > 0.0)) return 0.0;
    return (angle_density(theta0 + phi) + angle_density(theta0 - phi)) / jac;
  };
  return from_density(pdf, 0.0, 2.0 * scale);
}

double ScalarScoreLaw::integrate(const std::function<double(double)>& f, double a, double b) const {
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  if (!(b > a)) return 0.0;
  if (std::isinf(b)) {
    boost::math::quadrature::exp_sinh<double> integrator;
    if (std::isinf(a)) {
      return integrator.integrate([&](double u) { return f(-u); }, 0.0,
                                  std::numeric_limits<double>::infinity()) +
             integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    }
    return integrator.integrate(f, a, std::numeric_limits<double>::infinity());
  }
  if (std::isinf(a)) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f, -std::numeric_limits<double>::infinity(), b);
  }
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b);
}

double ScalarScoreLaw::density(double u) const {
  if (!pdf_) throw InvalidArgumentError("ScalarScoreLaw: sample laws have no density");
  return pdf_(u);
}

double ScalarScoreLaw::probability(double a, double b) const {
  if (pdf_) return integrate(pdf_, a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > a && values_[i] < b) s += weights_[i];
  }
  return s / weight_total_;
}

double ScalarScoreLaw::survival(double m) const {
  if (pdf_) return integrate(pdf_, m, hi_);
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > m) s += weights_[i];
  }
  return s / weight_total_;
}

double ScalarScoreLaw::tilted_tail(double m, double beta) const {
  if (pdf_) {
    return integrate(
        [this, m, beta](double u) {
          const double f = pdf_(u);
          return f > 0.0 ? f * std::exp(beta * (u - m)) : 0.0;
        },
        m, hi_);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > m) s += weights_[i] * std::exp(beta * (values_[i] - m));
  }
  return s / weight_total_;
}

double ScalarScoreLaw::total_mass() const {
  if (pdf_) return integrate(pdf_, lo_, hi_);
  return 1.0;
}

double boundary_mass(const ScalarScoreLaw& law, double m, double delta) {
  if (!(delta > 0.0)) throw InvalidArgumentError("boundary_mass: delta must be positive");
  const double event = law.survival(m);
  if (!(event > 0.0)) throw InfeasibleThresholdError("boundary_mass: zero event mass above m");
  return std::clamp(law.probability(m, m + delta) / event, 0.0, 1.0);
}

double hazard_hard(const ScalarScoreLaw& law, double m) {
  const double surv = law.survival(m);
  if (!(surv > 0.0)) throw InfeasibleThresholdError("hazard_hard: zero survival at m");
  return law.density(m) / surv;
}

double hazard_klsc(const ScalarScoreLaw& law, double m, double beta) {
  if (beta == 0.0) return hazard_hard(law, m);
  const double tail = law.tilted_tail(m, beta);
  if (!(tail > 0.0)) throw InfeasibleThresholdError("hazard_klsc: zero tilted survival at m");
  return law.density(m) / tail;
}

}  // namespace klsc
