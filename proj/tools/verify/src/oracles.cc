#include "sps/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sps::verify {

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) break;
  }
  return 0.5 * (a + b);
}

Vector soft_threshold_oracle(const Vector& t, double kappa) {
  Vector out(t.size());
  for (Index j = 0; j < t.size(); ++j) {
    const double tj = t[j];
    const auto f = [&](double x) { return kappa * std::abs(x) + 0.5 * (x - tj) * (x - tj); };
    // The minimizer lies between 0 and t.
    const double span = std::abs(tj) + 1.0;
    out[j] = golden_section_minimize(f, -span, span);
  }
  return out;
}

Vector linf_projection_oracle(const Vector& g, double radius) {
  Vector out(g.size());
  for (Index j = 0; j < g.size(); ++j) {
    const double gj = g[j];
    const auto f = [&](double x) { return (x - gj) * (x - gj); };
    out[j] = golden_section_minimize(f, -radius, radius);
  }
  return out;
}

std::pair<double, Vector> scaled_soc_projection_oracle(double lambda, const Vector& beta, double s, double tol) {
  const double beta_norm = beta.norm();
  const auto primal = [&](double mu) {
    const double l = lambda + mu / s;
    const double shrink = beta_norm > 0.0 ? std::max(0.0, 1.0 - mu / beta_norm) : 0.0;
    return std::pair<double, Vector>(l, shrink * beta);
  };
  const auto dual_gradient = [&](double mu) {
    const auto [l, b] = primal(mu);
    return b.norm() - l / s;
  };

  if (dual_gradient(0.0) <= 0.0) return {lambda, beta};

  // Ascent with a doubling step until the gradient changes sign.
  double lo = 0.0;
  double hi = std::max(1.0, beta_norm);
  while (dual_gradient(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (dual_gradient(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return primal(0.5 * (lo + hi));
}

namespace {

// Distance from (u, x) to the graph {(u, weight * sign u)} of weight * d|.|.
double graph_distance(double u, double x, double weight) {
  const double up = std::hypot(std::max(0.0, -u), x - weight);
  const double down = std::hypot(std::max(0.0, u), x + weight);
  const double gap = std::max(0.0, std::abs(x) - weight);
  const double flat = std::hypot(u, gap);
  return std::min({up, down, flat});
}

}  // namespace

double inverse_abs_resolvent_grid(double w, double alpha, double lo, double hi, int points) {
  return inverse_weighted_abs_resolvent_grid(w, alpha, 1.0, lo, hi, points);
}

double inverse_weighted_abs_resolvent_grid(double w, double alpha, double weight, double lo, double hi, int points) {
  const auto residual = [&](double x) { return graph_distance((w - x) / alpha, x, weight); };
  const double spacing = (hi - lo) / (points - 1);
  double best_x = lo;
  double best_r = residual(lo);
  for (int i = 1; i < points; ++i) {
    const double x = lo + spacing * i;
    const double r = residual(x);
    if (r < best_r) {
      best_r = r;
      best_x = x;
    }
  }
  return golden_section_minimize(residual, std::max(lo, best_x - spacing), std::min(hi, best_x + spacing), 1e-14);
}

}  // namespace sps::verify
