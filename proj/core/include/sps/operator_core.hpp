#pragma once

// Dense vector type plus the operator abstractions shared by every solver:
// set-valued operators are represented only through their resolvents, and the
// single-valued Lipschitz field B carries both an exact and a stochastic
// evaluation.

#include <Eigen/Dense>

#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace sps {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Caller-owned randomness. Nothing in the library keeps an engine of its own.
using Rng = std::mt19937_64;

// A maximal monotone operator A known only through J_{tau A} = (I + tau A)^{-1}.
struct SetValuedOperator {
  using Resolvent = std::function<Vector(double tau, const Vector& t)>;

  Resolvent resolvent;
  Index dimension = 0;

  // Checks tau > 0 and the input shape before delegating.
  Vector resolve(double tau, const Vector& t) const;
};

// Monotone L-Lipschitz operator B with an unbiased stochastic oracle.
struct LipschitzMap {
  using Eval = std::function<Vector(const Vector& z)>;
  using StochasticEval = std::function<Vector(const Vector& z, Rng& rng)>;

  Eval eval;
  StochasticEval stochastic_eval;
  double lipschitz_bound = 1.0;
};

// ---------------------------------------------------------------------------
// Proximal / projection toolbox

// prox of kappa * ||.||_1: componentwise sign(t) * max(|t| - kappa, 0).
Vector soft_threshold(const Vector& t, double kappa);

// Componentwise clamp to [-radius, radius].
Vector project_linf_ball(const Vector& g, double radius);

// Euclidean projection of (lambda, beta) onto K = {(l, b) : ||b||_2 <= l / s}.
std::pair<double, Vector> project_scaled_soc(double lambda, const Vector& beta, double s);

using Projection = std::function<Vector(const Vector&)>;

// J_{tau N_C} = proj_C for every tau > 0.
Vector resolvent_of_normal_cone(const Projection& proj, double tau, const Vector& t);

// Resolvent of a block-diagonal operator: each block acts on its own slice.
Vector product_resolvent(std::span<const SetValuedOperator> blocks, double tau, const Vector& t);

// J_{alpha A^{-1}}(w) = w - alpha * J_{A/alpha}(w / alpha)  (Moreau).
Vector inverse_resolvent_via_moreau(const SetValuedOperator& op, double alpha, const Vector& w);

// ---------------------------------------------------------------------------
// Operator factories

// A = 0; resolvent is the identity.
SetValuedOperator zero_operator(Index dimension);

// A = N_C for a closed convex C given by its projection.
SetValuedOperator normal_cone(Projection proj, Index dimension);

// A = weight * d||.||_1; resolvent is soft-thresholding at tau * weight.
SetValuedOperator l1_subdifferential(double weight, Index dimension);

// A = N_{[lower, upper]} for a box (componentwise bounds).
SetValuedOperator box_normal_cone(Vector lower, Vector upper);

// Block-diagonal product A_1 x ... x A_k acting on concatenated slices.
SetValuedOperator product_operator(std::vector<SetValuedOperator> blocks);

}  // namespace sps
