#pragma once

// Concrete problem instances: the distributionally robust sparse logistic
// regression game and synthetic games with known solutions.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>

#include "sps/dataset.hpp"
#include "sps/engine.hpp"
#include "sps/operator_core.hpp"
#include "sps/problem_instance.hpp"

namespace sps {

// (z, u) -> J_B(z)^T u
using AdjointProduct = std::function<Vector(const Vector& z, const Vector& u)>;

// Upper bound on the Lipschitz constant of `field`: the largest local spectral
// norm found by power iteration on J^T J at `points` sample points (the origin
// first, then N(0, I/dim) draws), times `safety`. J v uses central finite
// differences; J^T u uses `adjoint` when given, otherwise a finite-difference
// gradient of <u, B(.)>. Throws EstimationError if the power iteration has not
// settled after 500 steps.
double estimate_lipschitz_bound(const LipschitzMap::Eval& field, const AdjointProduct& adjoint, Index dimension,
                                std::uint64_t seed, int points = 20, double safety = 1.5);

enum class OracleMode {
  kMinibatch,  // uniform with-replacement minibatch average of per-sample fields
  kExact,      // the stochastic oracle returns the exact field
};

// min_{lambda, beta} max_{gamma}
//     lambda (delta - kappa) + 1/m sum Psi(<x_i, beta>)
//   + 1/m sum gamma_i (y_i <x_i, beta> - lambda kappa) + c ||beta||_1
//   s.t. ||beta||_2 <= lambda / (L_Psi + 1),  ||gamma||_inf <= 1,
// with Psi(t) = log(e^t + e^-t) and z = (lambda, beta, gamma) in R^{1+d+m}.
class DrslrProblem {
 public:
  struct Params {
    double delta = 1.0;
    double kappa = 1.0;
    double c = 1e-3;
  };

  static constexpr double kPsiLipschitz = 1.0;

  DrslrProblem(std::shared_ptr<const SparseDataset> data, Params params);

  Index num_samples() const noexcept { return data_->num_rows(); }
  Index num_features() const noexcept { return data_->num_features; }
  Index dimension() const noexcept { return 1 + num_features() + num_samples(); }
  const Params& params() const noexcept { return params_; }
  const SparseDataset& data() const noexcept { return *data_; }

  static double psi(double t);
  static double psi_prime(double t);

  // Smooth part of the saddle function (everything except c ||beta||_1).
  double lagrangian(const Vector& z) const;

  // B(z) = [grad_{lambda,beta} L(z); -grad_gamma L(z)].
  Vector full_field(const Vector& z) const;

  // Single-sample field B_i (0-based i); B = (1/m) sum_i B_i.
  Vector component(Index i, const Vector& z) const;

  // (1/|batch|) sum_{i in batch} B_i(z), indices may repeat.
  Vector batch_average(const Vector& z, std::span<const Index> batch) const;

  // batch_average over batch_size indices drawn uniformly with replacement.
  Vector minibatch_oracle(const Vector& z, Index batch_size, Rng& rng) const;

  Vector jacobian_transpose_product(const Vector& z, const Vector& u) const;

  // A_1 = N_{C_1}(lambda, beta) x N_{C_2}(gamma).
  SetValuedOperator constraint_operator() const;
  // A_2 = {0} x c d||beta||_1 x {0}.
  SetValuedOperator l1_operator() const;

  double lipschitz_bound(std::uint64_t seed = 0) const;

  // n = 2 instance (A_1, A_2, B). `lipschitz` <= 0 means estimate it.
  ProblemInstance instance(OracleMode mode, Index batch_size = 100, double lipschitz = 0.0) const;

 private:
  void check_point(const Vector& z) const;

  std::shared_ptr<const SparseDataset> data_;
  Params params_;
};

// Free-function forms of the DRSLR operations.
Vector drslr_full_field(const DrslrProblem& problem, const Vector& z);
Vector drslr_component(const DrslrProblem& problem, Index i, const Vector& z);
Vector drslr_minibatch_oracle(const DrslrProblem& problem, const Vector& z, Index batch_size, Rng& rng);
double drslr_lipschitz_bound(const DrslrProblem& problem);

// B(x, y) = (scale * y, -scale * x) on R^{d_x + d_y} (d_x == d_y), n = 0, with
// N(0, noise_sigma^2 I) added by the stochastic oracle. Unique solution 0.
ProblemInstance make_bilinear_game(Index d_x, Index d_y, double scale, double noise_sigma = 0.0);

// A game with an analytically known point of the extended solution set:
//   A_1 = N_{[-1,1]^d}, A_2 = c d||.||_1, B(z) = S (z - z*) - c sign(z*),
// with S block-skew (scale * [[0, 1], [-1, 0]] per coordinate pair) and z*
// interior to the box with no zero coordinate. Then
//   (z*, 0, c sign(z*), -c sign(z*)) is in the extended solution set.
struct KnownSolutionGame {
  ProblemInstance problem;
  ExtendedPoint solution;
};

KnownSolutionGame make_known_solution_game(Index half_dimension, double scale, double l1_weight,
                                           std::uint64_t seed, double noise_sigma = 0.0);

}  // namespace sps
