#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "klsc/analytic/gmm.hpp"
#include "klsc/analytic/score.hpp"

namespace klsc {

/// The law of the scalar S = s(X): either a weighted sample array or a 1-D
/// density on [lo, hi] (hi may be +inf).
class ScalarScoreLaw {
 public:
  /// Empty weights mean uniform weights.
  static ScalarScoreLaw from_samples(std::vector<double> values, std::vector<double> weights = {});
  static ScalarScoreLaw from_density(std::function<double(double)> pdf, double lo, double hi);
  static ScalarScoreLaw standard_normal();
  /// Exact law of the angular score under an isotropic GMM, built from the
  /// closed-form angle density of each component.
  static ScalarScoreLaw angular_under_gmm(const IsotropicGmm& prior, const AngularScore& score);

  bool has_density() const noexcept { return static_cast<bool>(pdf_); }
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }

  /// f_S(u); throws InvalidArgumentError for sample laws.
  double density(double u) const;
  /// P(a < S < b)
  double probability(double a, double b) const;
  /// P(S > m)
  double survival(double m) const;
  /// Integral of f(u) exp(beta (u - m)) over u > m.
  double tilted_tail(double m, double beta) const;
  double total_mass() const;

 private:
  ScalarScoreLaw() = default;
  double integrate(const std::function<double(double)>& f, double a, double b) const;

  std::vector<double> values_;
  std::vector<double> weights_;
  double weight_total_ = 0.0;
  std::function<double(double)> pdf_;
  double lo_ = -std::numeric_limits<double>::infinity();
  double hi_ = std::numeric_limits<double>::infinity();
};

/// q(m < S < m + delta) / q(S > m). Throws InfeasibleThresholdError when q(S > m) = 0.
double boundary_mass(const ScalarScoreLaw& law, double m, double delta);

/// f_S(m) / P(S > m)
double hazard_hard(const ScalarScoreLaw& law, double m);

/// f_S(m) e^{beta m} / integral_{u > m} f_S(u) e^{beta u} du
double hazard_klsc(const ScalarScoreLaw& law, double m, double beta);

}  // namespace klsc
