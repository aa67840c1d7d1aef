#pragma once

// Comparison solvers. Tseng and FRB run on the product-space form
//
//     0 in T(q) = A(q) + B(q),   q = (w_1, ..., w_n, z),
//     A(q) = A_1^{-1}(w_1) x ... x A_n^{-1}(w_n) x {0},
//     B(q) = (-z, ..., -z, sum_i w_i + B(z)),
//
// and report ||v||^2 for a certificate v in T at their current point, the
// counterpart of R_k for projective splitting.

#include <cstdint>

#include "sps/engine.hpp"
#include "sps/problem_instance.hpp"
#include "sps/schedule.hpp"
#include "sps/trace.hpp"

namespace sps {

// q = (w_1, ..., w_n, z) stacked into one vector of length (n + 1) d.
using ProductPoint = Vector;

ProductPoint make_product_point(const std::vector<Vector>& w, const Vector& z);
Vector product_primal(const ProductPoint& q, const ProblemInstance& problem);

ProductPoint product_field_B(const ProblemInstance& problem, const ProductPoint& q);

// Blockwise J_{alpha A_i^{-1}} on the dual blocks, identity on z.
ProductPoint product_resolvent_A(const ProblemInstance& problem, double alpha, const ProductPoint& q);

struct LinesearchParams {
  double alpha0 = 1.0;
  double theta = 0.8;
  double shrink = 0.7;
  int max_backtracks = 100;
};

struct TsengStep {
  ProductPoint q_next;
  ProductPoint q_bar;
  double alpha = 0.0;
};

// q_bar = J_{alpha A}(q - alpha B(q)), q+ = q_bar + alpha (B(q) - B(q_bar)),
// with alpha = alpha0 * shrink^j for the smallest j such that
// alpha ||B(q_bar) - B(q)|| <= theta ||q_bar - q||.
TsengStep tseng_iterate(const ProblemInstance& problem, const ProductPoint& q, const LinesearchParams& params);

// ||(q_prev - q_next) / alpha||^2; the vector lies in T(q_bar).
double tseng_residual(const ProductPoint& q_prev, const ProductPoint& q_next, double alpha);

struct FrbStep {
  ProductPoint q_next;
  ProductPoint field_next;  // B(q_next)
  double alpha = 0.0;
  double residual = 0.0;
};

// q+ = J_{a A}(q - a B(q) - a_prev (B(q) - B(q_prev))) with a backtracked from
// alpha0 until a ||B(q+) - B(q)|| <= (theta / 2) ||q+ - q||. With a == a_prev
// this is J_{a A}[q - a (2 B(q) - B(q_prev))].
FrbStep frb_iterate(const ProblemInstance& problem, const ProductPoint& q, const ProductPoint& field,
                    const ProductPoint& field_prev, double alpha_prev, const LinesearchParams& params);

// Certificate in T(q_next) for the step q -> q_next taken with stepsize alpha
// after a step with alpha_prev:
//   (q - q_next) / alpha + B(q_next) - B(q) - (alpha_prev / alpha) (B(q) - B(q_prev)).
// For alpha == alpha_prev it equals (q - q_next)/alpha + B(q_next) + B(q_prev) - 2 B(q).
Vector frb_certificate(const ProductPoint& q, const ProductPoint& q_next, const ProductPoint& field_prev,
                       const ProductPoint& field, const ProductPoint& field_next, double alpha_prev, double alpha);

struct PsStep {
  ExtendedPoint next;
  OperatorPairSet pairs;
  double phi = 0.0;
  double residual_R = 0.0;
  double residual_O = 0.0;
  bool converged = false;  // grad phi vanished; the point was returned unchanged
};

// Pairs as in SPS with the exact field, then the exact half-space projection
// p+ = p - (phi(p) / ||grad phi||^2) grad phi when phi(p) > 0, else p+ = p.
PsStep deterministic_ps_iterate(const ProblemInstance& problem, const ExtendedPoint& p, double rho, double tau);

// All runners start from initial_primal(dimension, Rng(seed)) with zero duals.

// rho <= 0 selects 0.9 / L.
RunResult run_deterministic_ps(const ProblemInstance& problem, double rho, double tau, const RunOptions& opts);
RunResult run_tseng(const ProblemInstance& problem, const LinesearchParams& params, const RunOptions& opts);
RunResult run_frb(const ProblemInstance& problem, const LinesearchParams& params, const RunOptions& opts);

// Double-stepsize extragradient for n = 0:
//   z+ = z - alpha_k B~(z - rho_k B~(z)),
// two oracle draws per iteration in the same order as SPS. Trace residual is
// ||B(z)||^2.
RunResult dseg_run(const ProblemInstance& problem, const StepSchedule& schedule, const RunOptions& opts);

// Simultaneous gradient descent-ascent z+ = z - eta B(z) (exact field).
RunResult run_gda(const ProblemInstance& problem, double eta, const RunOptions& opts);

}  // namespace sps
