#include "klsc/constraints/task.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "klsc/error.hpp"

namespace klsc {

namespace {

// log mean exp(eta f)
double log_mean_exp(std::span<const double> f, double eta) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : f) mx = std::max(mx, eta * v);
  double s = 0.0;
  for (double v : f) s += std::exp(eta * v - mx);
  return mx + std::log(s / static_cast<double>(f.size()));
}

double tilted_ess(std::span<const double> f, double eta) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : f) mx = std::max(mx, eta * v);
  double s = 0.0, s2 = 0.0;
  for (double v : f) {
    const double w = std::exp(eta * v - mx);
    s += w;
    s2 += w * w;
  }
  return s * s / s2;
}

}  // namespace

TaskBound task_distortion_lower_bound(std::span<const double> task_values, double r, double eta_max,
                                      double ess_floor) {
  if (task_values.empty()) throw EmptySampleError("task_distortion_lower_bound: no samples");
  if (!(eta_max > 0.0)) throw InvalidArgumentError("task_distortion_lower_bound: eta_max must be positive");
  TaskBound out;
  out.ess = static_cast<double>(task_values.size());
  const double mean = std::accumulate(task_values.begin(), task_values.end(), 0.0) /
                      static_cast<double>(task_values.size());
  if (r <= mean) return out;

  auto dual = [&](double eta) { return eta * r - log_mean_exp(task_values, eta); };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = eta_max;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = dual(c), fd = dual(d);
  while (b - a > 1e-10 * std::max(1.0, eta_max)) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = dual(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = dual(d);
    }
  }
  out.eta_star = 0.5 * (a + b);
  out.value = std::max(0.0, dual(out.eta_star));
  out.ess = tilted_ess(task_values, out.eta_star);
  if (out.ess < ess_floor) {
    std::ostringstream os;
    os << "unreliable dual estimate: ESS " << out.ess << " below floor " << ess_floor;
    out.warning = os.str();
  }
  if (out.eta_star > 0.999 * eta_max) {
    out.warning += out.warning.empty() ? "" : "; ";
    out.warning += "optimum at eta_max; bound may be loose";
  }
  return out;
}

}  // namespace klsc
