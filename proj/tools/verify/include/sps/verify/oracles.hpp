#pragma once

// Brute-force reference solvers used to check the closed-form operators. They
// share no code with the library implementations they are compared against.

#include <functional>
#include <utility>

#include "sps/operator_core.hpp"

namespace sps::verify {

// Minimizer of a unimodal f on [lo, hi], bracket shrunk below `tol`.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

// argmin_x kappa |x| + (x - t)^2 / 2, per coordinate, by golden section.
Vector soft_threshold_oracle(const Vector& t, double kappa);

// argmin_{|x| <= radius} (x - g)^2, per coordinate, by golden section.
Vector linf_projection_oracle(const Vector& g, double radius);

// argmin ||(l, b) - (lambda, beta)||^2 s.t. ||b|| <= l / s, solved through the
// Lagrange dual: for a multiplier mu >= 0 the inner minimizer is
// l = lambda + mu / s, b = beta (1 - mu / ||beta||)_+, and the dual gradient
// ||b(mu)|| - l(mu) / s is decreasing in mu. Its root is bracketed by doubling
// and refined by bisection to `tol`.
std::pair<double, Vector> scaled_soc_projection_oracle(double lambda, const Vector& beta, double s,
                                                       double tol = 1e-13);

// Solves w in x + alpha A^{-1}(x) for scalar w and A = weight * d|.|, i.e.
// x in A((w - x) / alpha), by scanning a grid on [lo, hi] for the smallest
// distance to the graph of A and polishing the best cell by golden section.
double inverse_weighted_abs_resolvent_grid(double w, double alpha, double weight, double lo, double hi,
                                           int points = 20001);
double inverse_abs_resolvent_grid(double w, double alpha, double lo, double hi, int points = 20001);

}  // namespace sps::verify
