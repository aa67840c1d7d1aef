#pragma once

// Stochastic projective splitting.
//
// The iterate p = (z, w_1, ..., w_{n+1}) lives in the subspace
// P = {sum_i w_i = 0}. Each iteration builds pairs (x_i, y_i): a resolvent
// step for every A_i and a two-sample forward step for B. The pairs define the
// affine function
//
//     phi(p) = sum_{i=1}^{n+1} <z - x_i, y_i - w_i>,
//
// and the iterate moves along -grad phi (gradient taken within P) with a
// predetermined stepsize alpha_k.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sps/operator_core.hpp"
#include "sps/problem_instance.hpp"
#include "sps/schedule.hpp"
#include "sps/trace.hpp"

namespace sps {

struct ExtendedPoint {
  Vector z;
  std::vector<Vector> w;  // n + 1 dual blocks; w.back() pairs with B

  // (z, 0, ..., 0) with n + 1 dual blocks.
  static ExtendedPoint from_primal(Vector z, std::size_t num_operators);

  std::size_t num_operators() const noexcept { return w.size() - 1; }
  double norm() const;
  bool all_finite() const;
  // ||sum_i w_i||; zero on P.
  double dual_sum_norm() const;
  double max_dual_norm() const;
};

struct OperatorPair {
  Vector x;
  Vector y;
};

struct OperatorPairSet {
  std::vector<OperatorPair> pairs;  // n + 1 entries, the last one for B
};

struct SpsStep {
  ExtendedPoint next;
  OperatorPairSet pairs;
};

using FieldOracle = std::function<Vector(const Vector&)>;

// Pairs for the current iterate. For i <= n: t = z + tau w_i, x = J_{tau A_i}(t),
// y = (t - x) / tau. For B: r = oracle(z), x = z - rho (r - w_{n+1}),
// y = oracle(x). The oracle is called exactly twice, in that order.
OperatorPairSet compute_pairs(const ExtendedPoint& p, const ProblemInstance& problem, double tau, double rho,
                              const FieldOracle& oracle);

// p - alpha * grad phi, evaluated as z - alpha * sum y and
// (w_i - alpha x_i) + (alpha / (n + 1)) * sum x, with both sums accumulated in
// operator order.
ExtendedPoint apply_update(const ExtendedPoint& p, const OperatorPairSet& pairs, double alpha);

// One iteration with the stochastic oracle of `problem`. Throws DivergenceError
// (last finite iteration k) if the new iterate is non-finite or ||p|| > 1e12.
SpsStep sps_iterate(const ExtendedPoint& p, const ProblemInstance& problem, const StepSchedule& schedule,
                    std::int64_t k, Rng& rng);

double hyperplane_eval(const ExtendedPoint& p, const OperatorPairSet& pairs);

// grad_z = sum_i y_i, grad_{w_i} = x_i - mean_j x_j.
ExtendedPoint hyperplane_gradient(const OperatorPairSet& pairs);

// sum_{i<=n} ||y_i - w_i||^2 + sum_{i<=n} ||z - x_i||^2 + ||B(z) - w_{n+1}||^2
double residual_O(const ExtendedPoint& p, const OperatorPairSet& pairs, const Vector& exact_Bz);

// sum_{i<=n} ||z - x_i||^2 + ||B(z) + sum_{i<=n} y_i||^2
double residual_R(const Vector& z, const OperatorPairSet& pairs, const Vector& exact_Bz);

// Starting point shared by every solver: z^1 from initial_primal, all duals zero.
ExtendedPoint initial_point(const ProblemInstance& problem, Rng& rng);

// Runs `opts.iterations` iterations from initial_point(seeded rng). Trace rows
// carry R and O computed with the exact field at the traced iterate. Throws
// RunDivergence with the partial trace on divergence.
RunResult run_sps(const ProblemInstance& problem, const StepSchedule& schedule, const RunOptions& opts);

// Same iterate sequence as run_sps, but with (n + 7) working vectors:
// z, w_1..w_{n+1}, t, x, y, sum x, sum y. Dual updates are applied in two
// halves, w_i -= alpha x_i as each pair is formed and w_i += alpha/(n+1) sum x
// once all pairs are done.
class CompactSpsSolver {
 public:
  CompactSpsSolver(const ProblemInstance& problem, const StepSchedule& schedule, std::uint64_t seed);

  struct Diagnostics {
    double residual_R = 0.0;
    double residual_O = 0.0;
  };

  // Advances from p^k to p^{k+1}. When `exact_Bz` is given (B at the current
  // z), the residuals of iteration k are accumulated along the way.
  std::optional<Diagnostics> step(std::int64_t k, const Vector* exact_Bz = nullptr);

  const Vector& z() const noexcept { return z_; }
  const std::vector<Vector>& w() const noexcept { return w_; }
  // Number of doubles held in working vectors.
  std::size_t working_elements() const noexcept;

 private:
  const ProblemInstance* problem_;
  StepSchedule schedule_;
  Rng rng_;
  Vector z_;
  std::vector<Vector> w_;
  Vector t_, x_, y_, x_sum_, y_sum_;
};

RunResult run_sps_compact(const ProblemInstance& problem, const StepSchedule& schedule, const RunOptions& opts);

}  // namespace sps
