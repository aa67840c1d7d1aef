#include "sps/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sps/errors.hpp"

namespace sps {

namespace {

void check_shapes(const ExtendedPoint& p, const OperatorPairSet& pairs) {
  if (pairs.pairs.size() != p.w.size()) {
    throw ShapeError("pair set has " + std::to_string(pairs.pairs.size()) + " entries, point has " +
                     std::to_string(p.w.size()) + " dual blocks");
  }
  for (std::size_t i = 0; i < p.w.size(); ++i) {
    const auto d = p.z.size();
    if (p.w[i].size() != d || pairs.pairs[i].x.size() != d || pairs.pairs[i].y.size() != d) {
      throw ShapeError("block " + std::to_string(i) + " does not match the primal dimension");
    }
  }
}

void check_point(const ExtendedPoint& p, const ProblemInstance& problem) {
  if (p.z.size() != problem.dimension) throw ShapeError("primal iterate has the wrong dimension");
  if (p.w.size() != problem.num_operators() + 1) throw ShapeError("wrong number of dual blocks");
}

void check_bounded(const ExtendedPoint& p, std::int64_t k) {
  if (!p.all_finite()) {
    throw DivergenceError(k, "non-finite iterate after iteration " + std::to_string(k));
  }
  if (p.norm() > kDivergenceNorm) {
    throw DivergenceError(k, "iterate norm exceeded 1e12 after iteration " + std::to_string(k));
  }
}

}  // namespace

ExtendedPoint ExtendedPoint::from_primal(Vector z, std::size_t num_operators) {
  ExtendedPoint p;
  p.w.assign(num_operators + 1, Vector::Zero(z.size()));
  p.z = std::move(z);
  return p;
}

double ExtendedPoint::norm() const {
  double sq = z.squaredNorm();
  for (const auto& wi : w) sq += wi.squaredNorm();
  return std::sqrt(sq);
}

bool ExtendedPoint::all_finite() const {
  return z.allFinite() && std::all_of(w.begin(), w.end(), [](const Vector& v) { return v.allFinite(); });
}

double ExtendedPoint::dual_sum_norm() const {
  Vector sum = Vector::Zero(z.size());
  for (const auto& wi : w) sum += wi;
  return sum.norm();
}

double ExtendedPoint::max_dual_norm() const {
  double m = 0.0;
  for (const auto& wi : w) m = std::max(m, wi.norm());
  return m;
}

OperatorPairSet compute_pairs(const ExtendedPoint& p, const ProblemInstance& problem, double tau, double rho,
                              const FieldOracle& oracle) {
  check_point(p, problem);
  const std::size_t n = problem.num_operators();
  OperatorPairSet out;
  out.pairs.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Vector t = p.z + tau * p.w[i];
    Vector x = problem.operators[i].resolve(tau, t);
    Vector y = (t - x) / tau;
    out.pairs.push_back({std::move(x), std::move(y)});
  }
  const Vector r = oracle(p.z);
  Vector x = p.z - rho * (r - p.w[n]);
  Vector y = oracle(x);
  out.pairs.push_back({std::move(x), std::move(y)});
  return out;
}

ExtendedPoint apply_update(const ExtendedPoint& p, const OperatorPairSet& pairs, double alpha) {
  check_shapes(p, pairs);
  const std::size_t blocks = p.w.size();
  Vector x_sum = Vector::Zero(p.z.size());
  Vector y_sum = Vector::Zero(p.z.size());
  for (const auto& [x, y] : pairs.pairs) {
    x_sum += x;
    y_sum += y;
  }
  const double scale = alpha / static_cast<double>(blocks);
  ExtendedPoint next;
  next.z = p.z - alpha * y_sum;
  next.w.reserve(blocks);
  for (std::size_t i = 0; i < blocks; ++i) {
    Vector wi = p.w[i] - alpha * pairs.pairs[i].x;
    wi += scale * x_sum;
    next.w.push_back(std::move(wi));
  }
  return next;
}

SpsStep sps_iterate(const ExtendedPoint& p, const ProblemInstance& problem, const StepSchedule& schedule,
                    std::int64_t k, Rng& rng) {
  const StepSizes steps = schedule.at(k);
  auto pairs = compute_pairs(p, problem, schedule.tau(), steps.rho,
                             [&](const Vector& z) { return problem.field.stochastic_eval(z, rng); });
  ExtendedPoint next = apply_update(p, pairs, steps.alpha);
  check_bounded(next, k);
  return {std::move(next), std::move(pairs)};
}

double hyperplane_eval(const ExtendedPoint& p, const OperatorPairSet& pairs) {
  check_shapes(p, pairs);
  double value = 0.0;
  for (std::size_t i = 0; i < p.w.size(); ++i) {
    value += (p.z - pairs.pairs[i].x).dot(pairs.pairs[i].y - p.w[i]);
  }
  return value;
}

ExtendedPoint hyperplane_gradient(const OperatorPairSet& pairs) {
  if (pairs.pairs.empty()) throw ShapeError("empty pair set");
  const Index d = pairs.pairs.front().x.size();
  Vector x_sum = Vector::Zero(d);
  Vector y_sum = Vector::Zero(d);
  for (const auto& [x, y] : pairs.pairs) {
    x_sum += x;
    y_sum += y;
  }
  const Vector x_mean = x_sum / static_cast<double>(pairs.pairs.size());
  ExtendedPoint grad;
  grad.z = std::move(y_sum);
  grad.w.reserve(pairs.pairs.size());
  for (const auto& pair : pairs.pairs) grad.w.push_back(pair.x - x_mean);
  return grad;
}

double residual_O(const ExtendedPoint& p, const OperatorPairSet& pairs, const Vector& exact_Bz) {
  check_shapes(p, pairs);
  const std::size_t n = p.num_operators();
  double dual_gap = 0.0;
  double primal_gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dual_gap += (pairs.pairs[i].y - p.w[i]).squaredNorm();
    primal_gap += (p.z - pairs.pairs[i].x).squaredNorm();
  }
  return dual_gap + primal_gap + (exact_Bz - p.w[n]).squaredNorm();
}

double residual_R(const Vector& z, const OperatorPairSet& pairs, const Vector& exact_Bz) {
  if (pairs.pairs.empty()) throw ShapeError("empty pair set");
  const std::size_t n = pairs.pairs.size() - 1;
  double primal_gap = 0.0;
  Vector y_sum = Vector::Zero(z.size());
  for (std::size_t i = 0; i < n; ++i) {
    primal_gap += (z - pairs.pairs[i].x).squaredNorm();
    y_sum += pairs.pairs[i].y;
  }
  return primal_gap + (exact_Bz + y_sum).squaredNorm();
}

ExtendedPoint initial_point(const ProblemInstance& problem, Rng& rng) {
  return ExtendedPoint::from_primal(initial_primal(problem.dimension, rng), problem.num_operators());
}

RunResult run_sps(const ProblemInstance& problem, const StepSchedule& schedule, const RunOptions& opts) {
  validate(opts);
  Rng rng(opts.seed);
  ExtendedPoint p = initial_point(problem, rng);
  RunResult result;
  SolverClock clock;
  for (std::int64_t k = 1; k <= opts.iterations; ++k) {
    clock.resume();
    SpsStep step;
    try {
      step = sps_iterate(p, problem, schedule, k, rng);
    } catch (const DivergenceError& e) {
      throw RunDivergence(e, std::move(result.trace));
    }
    clock.pause();
    if (is_trace_point(k, opts.trace_every, opts.iterations)) {
      const Vector Bz = problem.field.eval(p.z);
      result.trace.push_back({opts.label, opts.seed, k, clock.seconds(), residual_R(p.z, step.pairs, Bz),
                              residual_O(p, step.pairs, Bz)});
    }
    p = std::move(step.next);
  }
  result.final_z = std::move(p.z);
  result.final_w = std::move(p.w);
  return result;
}

CompactSpsSolver::CompactSpsSolver(const ProblemInstance& problem, const StepSchedule& schedule,
                                   std::uint64_t seed)
    : problem_(&problem), schedule_(schedule), rng_(seed) {
  const Index d = problem.dimension;
  z_ = initial_primal(d, rng_);
  w_.assign(problem.num_operators() + 1, Vector::Zero(d));
  t_ = Vector::Zero(d);
  x_ = Vector::Zero(d);
  y_ = Vector::Zero(d);
  x_sum_ = Vector::Zero(d);
  y_sum_ = Vector::Zero(d);
}

std::size_t CompactSpsSolver::working_elements() const noexcept {
  std::size_t total = static_cast<std::size_t>(z_.size() + t_.size() + x_.size() + y_.size() + x_sum_.size() +
                                               y_sum_.size());
  for (const auto& wi : w_) total += static_cast<std::size_t>(wi.size());
  return total;
}

std::optional<CompactSpsSolver::Diagnostics> CompactSpsSolver::step(std::int64_t k, const Vector* exact_Bz) {
  const StepSizes steps = schedule_.at(k);
  const double tau = schedule_.tau();
  const double alpha = steps.alpha;
  const std::size_t n = problem_->num_operators();

  double dual_gap = 0.0;
  double primal_gap = 0.0;
  x_sum_.setZero();
  y_sum_.setZero();
  for (std::size_t i = 0; i < n; ++i) {
    t_ = z_ + tau * w_[i];
    x_ = problem_->operators[i].resolve(tau, t_);
    y_ = (t_ - x_) / tau;
    if (exact_Bz != nullptr) {
      dual_gap += (y_ - w_[i]).squaredNorm();
      primal_gap += (z_ - x_).squaredNorm();
    }
    w_[i] -= alpha * x_;
    x_sum_ += x_;
    y_sum_ += y_;
  }

  std::optional<Diagnostics> diag;
  if (exact_Bz != nullptr) {
    diag = Diagnostics{primal_gap + (*exact_Bz + y_sum_).squaredNorm(),
                       dual_gap + primal_gap + (*exact_Bz - w_[n]).squaredNorm()};
  }

  // t holds r, the first oracle sample.
  t_ = problem_->field.stochastic_eval(z_, rng_);
  x_ = z_ - steps.rho * (t_ - w_[n]);
  y_ = problem_->field.stochastic_eval(x_, rng_);
  w_[n] -= alpha * x_;
  x_sum_ += x_;
  y_sum_ += y_;

  const double scale = alpha / static_cast<double>(n + 1);
  for (auto& wi : w_) wi += scale * x_sum_;
  z_ = z_ - alpha * y_sum_;

  double sq = z_.squaredNorm();
  bool finite = z_.allFinite();
  for (const auto& wi : w_) {
    sq += wi.squaredNorm();
    finite = finite && wi.allFinite();
  }
  if (!finite) throw DivergenceError(k, "non-finite iterate after iteration " + std::to_string(k));
  if (std::sqrt(sq) > kDivergenceNorm) {
    throw DivergenceError(k, "iterate norm exceeded 1e12 after iteration " + std::to_string(k));
  }
  return diag;
}

RunResult run_sps_compact(const ProblemInstance& problem, const StepSchedule& schedule, const RunOptions& opts) {
  validate(opts);
  CompactSpsSolver solver(problem, schedule, opts.seed);
  RunResult result;
  SolverClock clock;
  Vector Bz;
  for (std::int64_t k = 1; k <= opts.iterations; ++k) {
    const bool traced = is_trace_point(k, opts.trace_every, opts.iterations);
    if (traced) Bz = problem.field.eval(solver.z());
    clock.resume();
    std::optional<CompactSpsSolver::Diagnostics> diag;
    try {
      diag = solver.step(k, traced ? &Bz : nullptr);
    } catch (const DivergenceError& e) {
      throw RunDivergence(e, std::move(result.trace));
    }
    clock.pause();
    if (diag) {
      result.trace.push_back({opts.label, opts.seed, k, clock.seconds(), diag->residual_R, diag->residual_O});
    }
  }
  result.final_z = solver.z();
  result.final_w = solver.w();
  return result;
}

}  // namespace sps
