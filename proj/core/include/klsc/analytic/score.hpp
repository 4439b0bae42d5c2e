#pragma once

#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <variant>

#include "klsc/analytic/point.hpp"

namespace klsc {

/// s(x) = scale * (1 - cos(atan2(x2, x1) - theta0)). Range [0, 2 * scale].
struct AngularScore {
  double theta0 = std::numbers::pi / 4.0;
  double scale = 4.0;
};

/// s(x) = x_axis (axis 0 or 1).
struct CoordinateScore {
  int axis = 0;
};

/// Arbitrary score given by value and gradient callbacks.
struct CustomScore {
  std::string name;
  std::function<double(Point)> value;
  std::function<Point(Point)> gradient;
};

/// Regularizer R used by optimization-with-regularization.
struct Regularizer {
  enum class Kind { neg_second_coord, quadratic, custom };
  Kind kind = Kind::neg_second_coord;
  /// quadratic: R(x) = 0.5 * |x - center|^2
  Point center{};
  std::function<double(Point)> custom_value;
  std::function<Point(Point)> custom_gradient;

  static Regularizer neg_second_coord() { return {}; }
  static Regularizer quadratic(Point center = {}) {
    Regularizer r;
    r.kind = Kind::quadratic;
    r.center = center;
    return r;
  }

  double value(Point x) const;
  Point gradient(Point x) const;
};

class ScoreField;

/// Gibbs objective s(x) - lambda * R(x).
struct GibbsScore {
  std::shared_ptr<const ScoreField> base;
  Regularizer regularizer;
  double lambda = 0.0;
};

/// An intrinsic score s with its analytic gradient.
class ScoreField {
 public:
  using Kind = std::variant<AngularScore, CoordinateScore, GibbsScore, CustomScore>;

  ScoreField(Kind kind) : kind_(std::move(kind)) {}  // NOLINT(google-explicit-constructor)

  static ScoreField angular(double theta0 = std::numbers::pi / 4.0, double scale = 4.0) {
    return ScoreField(AngularScore{theta0, scale});
  }
  static ScoreField coordinate(int axis);
  static ScoreField gibbs(ScoreField base, Regularizer reg, double lambda);

  double value(Point x) const;
  double operator()(Point x) const { return value(x); }
  /// Throws DomainError for the angular score at the origin.
  Point gradient(Point x) const;

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;

 private:
  Kind kind_;
};

/// s(x) - lambda R(x); the unnormalized log density of the Gibbs law and the
/// objective maximized by optimization with regularization.
double gibbs_log_density_unnorm(const ScoreField& score, const Regularizer& reg, double lambda,
                                Point x);

}  // namespace klsc
