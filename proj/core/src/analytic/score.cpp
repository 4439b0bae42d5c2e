#include "klsc/analytic/score.hpp"

#include <cmath>

#include "klsc/error.hpp"

namespace klsc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double Regularizer::value(Point x) const {
  switch (kind) {
    case Kind::neg_second_coord:
      return -x.y;
    case Kind::quadratic: {
      const Point d = x - center;
      return 0.5 * dot(d, d);
    }
    case Kind::custom:
      if (!custom_value) throw InvalidArgumentError("custom regularizer has no value rule");
      return custom_value(x);
  }
  return 0.0;
}

Point Regularizer::gradient(Point x) const {
  switch (kind) {
    case Kind::neg_second_coord:
      return {0.0, -1.0};
    case Kind::quadratic:
      return x - center;
    case Kind::custom:
      if (!custom_gradient) throw InvalidArgumentError("custom regularizer has no gradient rule");
      return custom_gradient(x);
  }
  return {};
}

ScoreField ScoreField::coordinate(int axis) {
  if (axis != 0 && axis != 1) throw InvalidArgumentError("coordinate score axis must be 0 or 1");
  return ScoreField(CoordinateScore{axis});
}

ScoreField ScoreField::gibbs(ScoreField base, Regularizer reg, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgumentError("gibbs score: lambda must be >= 0");
  return ScoreField(
      GibbsScore{std::make_shared<const ScoreField>(std::move(base)), std::move(reg), lambda});
}

double ScoreField::value(Point x) const {
  return std::visit(
      overloaded{
          [x](const AngularScore& a) {
            return a.scale * (1.0 - std::cos(std::atan2(x.y, x.x) - a.theta0));
          },
          [x](const CoordinateScore& c) { return c.axis == 0 ? x.x : x.y; },
          [x](const GibbsScore& g) {
            return g.base->value(x) - g.lambda * g.regularizer.value(x);
          },
          [x](const CustomScore& c) { return c.value(x); },
      },
      kind_);
}

Point ScoreField::gradient(Point x) const {
  return std::visit(
      overloaded{
          [x](const AngularScore& a) -> Point {
            const double r2 = x.x * x.x + x.y * x.y;
            if (r2 == 0.0) {
              throw DomainError("angular score gradient is undefined at the origin");
            }
            // ds/dtheta = scale * sin(theta - theta0); dtheta/dx = (-y, x) / r^2
            const double ds = a.scale * std::sin(std::atan2(x.y, x.x) - a.theta0);
            return {-x.y / r2 * ds, x.x / r2 * ds};
          },
          [](const CoordinateScore& c) -> Point {
            return c.axis == 0 ? Point{1.0, 0.0} : Point{0.0, 1.0};
          },
          [x](const GibbsScore& g) -> Point {
            return g.base->gradient(x) - g.lambda * g.regularizer.gradient(x);
          },
          [x](const CustomScore& c) -> Point {
            if (!c.gradient) throw InvalidArgumentError("custom score has no gradient rule");
            return c.gradient(x);
          },
      },
      kind_);
}

std::string ScoreField::name() const {
  return std::visit(overloaded{
                        [](const AngularScore&) -> std::string { return "angular"; },
                        [](const CoordinateScore& c) -> std::string {
                          return c.axis == 0 ? "coord_x1" : "coord_x2";
                        },
                        [](const GibbsScore& g) -> std::string { return "gibbs(" + g.base->name() + ")"; },
                        [](const CustomScore& c) -> std::string { return c.name; },
                    },
                    kind_);
}

double gibbs_log_density_unnorm(const ScoreField& score, const Regularizer& reg, double lambda,
                                Point x) {
  if (!(lambda >= 0.0)) throw InvalidArgumentError("gibbs density: lambda must be >= 0");
  return score.value(x) - lambda * reg.value(x);
}

}  // namespace klsc
