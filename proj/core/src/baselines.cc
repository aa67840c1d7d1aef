#include "sps/baselines.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sps/errors.hpp"

namespace sps {

namespace {

void check_product(const ProblemInstance& problem, const ProductPoint& q) {
  const Index expected = static_cast<Index>(problem.num_operators() + 1) * problem.dimension;
  if (q.size() != expected) {
    throw ShapeError("product point has dimension " + std::to_string(q.size()) + ", expected " +
                     std::to_string(expected));
  }
}

void check_linesearch(const LinesearchParams& params) {
  if (!(params.alpha0 > 0.0)) throw InvalidParameter("initial stepsize must be positive");
  if (!(params.theta > 0.0 && params.theta < 1.0)) throw InvalidParameter("theta must lie in (0, 1)");
  if (!(params.shrink > 0.0 && params.shrink < 1.0)) throw InvalidParameter("shrink factor must lie in (0, 1)");
}

void check_bounded(const Vector& v, std::int64_t k) {
  if (!v.allFinite()) throw DivergenceError(k - 1, "non-finite iterate at iteration " + std::to_string(k));
  if (v.norm() > kDivergenceNorm) {
    throw DivergenceError(k - 1, "iterate norm exceeded 1e12 at iteration " + std::to_string(k));
  }
}

// Steps this small are rounding noise: both sides of the linesearch test are
// then dominated by cancellation error, so the step is accepted as is.
bool below_rounding_floor(const ProductPoint& step, const ProductPoint& q) {
  return step.norm() <= 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + q.norm());
}

ProductPoint initial_product_point(const ProblemInstance& problem, std::uint64_t seed) {
  Rng rng(seed);
  const Vector z = initial_primal(problem.dimension, rng);
  return make_product_point(std::vector<Vector>(problem.num_operators(), Vector::Zero(problem.dimension)), z);
}

}  // namespace

ProductPoint make_product_point(const std::vector<Vector>& w, const Vector& z) {
  const Index d = z.size();
  ProductPoint q(static_cast<Index>(w.size() + 1) * d);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].size() != d) throw ShapeError("dual block dimension differs from primal");
    q.segment(static_cast<Index>(i) * d, d) = w[i];
  }
  q.tail(d) = z;
  return q;
}

Vector product_primal(const ProductPoint& q, const ProblemInstance& problem) {
  check_product(problem, q);
  return q.tail(problem.dimension);
}

ProductPoint product_field_B(const ProblemInstance& problem, const ProductPoint& q) {
  check_product(problem, q);
  const Index d = problem.dimension;
  const auto n = static_cast<Index>(problem.num_operators());
  const auto z = q.tail(d);
  ProductPoint out(q.size());
  Vector dual_sum = Vector::Zero(d);
  for (Index i = 0; i < n; ++i) {
    out.segment(i * d, d) = -z;
    dual_sum += q.segment(i * d, d);
  }
  out.tail(d) = dual_sum + problem.field.eval(z);
  return out;
}

ProductPoint product_resolvent_A(const ProblemInstance& problem, double alpha, const ProductPoint& q) {
  check_product(problem, q);
  if (!(alpha > 0.0)) throw InvalidParameter("resolvent stepsize must be positive");
  const Index d = problem.dimension;
  ProductPoint out(q.size());
  for (std::size_t i = 0; i < problem.num_operators(); ++i) {
    const Index off = static_cast<Index>(i) * d;
    out.segment(off, d) = inverse_resolvent_via_moreau(problem.operators[i], alpha, q.segment(off, d));
  }
  out.tail(d) = q.tail(d);
  return out;
}

TsengStep tseng_iterate(const ProblemInstance& problem, const ProductPoint& q, const LinesearchParams& params) {
  check_linesearch(params);
  const ProductPoint field = product_field_B(problem, q);
  double alpha = params.alpha0;
  for (int attempt = 0; attempt <= params.max_backtracks; ++attempt) {
    ProductPoint q_bar = product_resolvent_A(problem, alpha, q - alpha * field);
    const ProductPoint field_bar = product_field_B(problem, q_bar);
    const ProductPoint step = q_bar - q;
    if (alpha * (field_bar - field).norm() <= params.theta * step.norm() || below_rounding_floor(step, q)) {
      ProductPoint q_next = q_bar + alpha * (field - field_bar);
      return {std::move(q_next), std::move(q_bar), alpha};
    }
    alpha *= params.shrink;
  }
  throw StalledLinesearch("Tseng linesearch exceeded " + std::to_string(params.max_backtracks) + " reductions");
}

double tseng_residual(const ProductPoint& q_prev, const ProductPoint& q_next, double alpha) {
  if (q_prev.size() != q_next.size()) throw ShapeError("Tseng residual on mismatched points");
  return (q_prev - q_next).squaredNorm() / (alpha * alpha);
}

Vector frb_certificate(const ProductPoint& q, const ProductPoint& q_next, const ProductPoint& field_prev,
                       const ProductPoint& field, const ProductPoint& field_next, double alpha_prev, double alpha) {
  return (q - q_next) / alpha + (field_next - field) - (alpha_prev / alpha) * (field - field_prev);
}

FrbStep frb_iterate(const ProblemInstance& problem, const ProductPoint& q, const ProductPoint& field,
                    const ProductPoint& field_prev, double alpha_prev, const LinesearchParams& params) {
  check_linesearch(params);
  check_product(problem, q);
  const ProductPoint reflection = field - field_prev;
  double alpha = params.alpha0;
  for (int attempt = 0; attempt <= params.max_backtracks; ++attempt) {
    ProductPoint q_next = product_resolvent_A(problem, alpha, q - alpha * field - alpha_prev * reflection);
    ProductPoint field_next = product_field_B(problem, q_next);
    const ProductPoint step = q_next - q;
    if (alpha * (field_next - field).norm() <= 0.5 * params.theta * step.norm() || below_rounding_floor(step, q)) {
      const double residual =
          frb_certificate(q, q_next, field_prev, field, field_next, alpha_prev, alpha).squaredNorm();
      return {std::move(q_next), std::move(field_next), alpha, residual};
    }
    alpha *= params.shrink;
  }
  throw StalledLinesearch("FRB linesearch exceeded " + std::to_string(params.max_backtracks) + " reductions");
}

PsStep deterministic_ps_iterate(const ProblemInstance& problem, const ExtendedPoint& p, double rho, double tau) {
  if (!(rho > 0.0) || !(tau > 0.0)) throw InvalidParameter("rho and tau must be positive");
  // The first oracle call is at z; keep it for the residuals.
  Vector exact_Bz;
  bool first = true;
  PsStep out;
  out.pairs = compute_pairs(p, problem, tau, rho, [&](const Vector& v) {
    Vector b = problem.field.eval(v);
    if (first) {
      exact_Bz = b;
      first = false;
    }
    return b;
  });
  out.residual_R = residual_R(p.z, out.pairs, exact_Bz);
  out.residual_O = residual_O(p, out.pairs, exact_Bz);
  out.phi = hyperplane_eval(p, out.pairs);
  if (out.phi <= 0.0) {
    out.next = p;
    return out;
  }
  const ExtendedPoint grad = hyperplane_gradient(out.pairs);
  double grad_sq = grad.z.squaredNorm();
  for (const auto& g : grad.w) grad_sq += g.squaredNorm();
  if (grad_sq == 0.0) {
    out.next = p;
    out.converged = true;
    return out;
  }
  out.next = apply_update(p, out.pairs, out.phi / grad_sq);
  return out;
}

RunResult run_deterministic_ps(const ProblemInstance& problem, double rho, double tau, const RunOptions& opts) {
  validate(opts);
  if (rho <= 0.0) rho = 0.9 / problem.field.lipschitz_bound;
  Rng rng(opts.seed);
  ExtendedPoint p = initial_point(problem, rng);
  RunResult result;
  SolverClock clock;
  for (std::int64_t k = 1; k <= opts.iterations; ++k) {
    clock.resume();
    PsStep step = deterministic_ps_iterate(problem, p, rho, tau);
    clock.pause();
    if (!step.next.all_finite() || step.next.norm() > kDivergenceNorm) {
      throw RunDivergence(DivergenceError(k, "projective splitting diverged at iteration " + std::to_string(k)),
                          std::move(result.trace));
    }
    if (is_trace_point(k, opts.trace_every, opts.iterations)) {
      result.trace.push_back({opts.label, opts.seed, k, clock.seconds(), step.residual_R, step.residual_O});
    }
    p = std::move(step.next);
  }
  result.final_z = std::move(p.z);
  result.final_w = std::move(p.w);
  return result;
}

RunResult run_tseng(const ProblemInstance& problem, const LinesearchParams& params, const RunOptions& opts) {
  validate(opts);
  ProductPoint q = initial_product_point(problem, opts.seed);
  RunResult result;
  SolverClock clock;
  for (std::int64_t k = 1; k <= opts.iterations; ++k) {
    clock.resume();
    TsengStep step;
    try {
      step = tseng_iterate(problem, q, params);
      check_bounded(step.q_next, k);
    } catch (const DivergenceError& e) {
      throw RunDivergence(e, std::move(result.trace));
    }
    clock.pause();
    if (is_trace_point(k, opts.trace_every, opts.iterations)) {
      result.trace.push_back(
          {opts.label, opts.seed, k, clock.seconds(), tseng_residual(q, step.q_next, step.alpha), std::nullopt});
    }
    q = std::move(step.q_next);
  }
  result.final_z = product_primal(q, problem);
  return result;
}

RunResult run_frb(const ProblemInstance& problem, const LinesearchParams& params, const RunOptions& opts) {
  validate(opts);
  ProductPoint q = initial_product_point(problem, opts.seed);
  // q^0 = q^{-1}: the reflection term vanishes on the first step.
  ProductPoint field = product_field_B(problem, q);
  ProductPoint field_prev = field;
  double alpha_prev = params.alpha0;
  RunResult result;
  SolverClock clock;
  for (std::int64_t k = 1; k <= opts.iterations; ++k) {
    clock.resume();
    FrbStep step;
    try {
      step = frb_iterate(problem, q, field, field_prev, alpha_prev, params);
      check_bounded(step.q_next, k);
    } catch (const DivergenceError& e) {
      throw RunDivergence(e, std::move(result.trace));
    }
    clock.pause();
    if (is_trace_point(k, opts.trace_every, opts.iterations)) {
      result.trace.push_back({opts.label, opts.seed, k, clock.seconds(), step.residual, std::nullopt});
    }
    q = std::move(step.q_next);
    field_prev = std::move(field);
    field = std::move(step.field_next);
    alpha_prev = step.alpha;
  }
  result.final_z = product_primal(q, problem);
  return result;
}

RunResult dseg_run(const ProblemInstance& problem, const StepSchedule& schedule, const RunOptions& opts) {
  validate(opts);
  if (problem.num_operators() != 0) throw InvalidParameter("DSEG applies only to problems with n = 0");
  Rng rng(opts.seed);
  Vector z = initial_primal(problem.dimension, rng);
  RunResult result;
  SolverClock clock;
  for (std::int64_t k = 1; k <= opts.iterations; ++k) {
    clock.resume();
    const StepSizes steps = schedule.at(k);
    const Vector r = problem.field.stochastic_eval(z, rng);
    const Vector x = z - steps.rho * r;
    const Vector y = problem.field.stochastic_eval(x, rng);
    Vector z_next = z - steps.alpha * y;
    clock.pause();
    try {
      check_bounded(z_next, k);
    } catch (const DivergenceError& e) {
      throw RunDivergence(e, std::move(result.trace));
    }
    if (is_trace_point(k, opts.trace_every, opts.iterations)) {
      result.trace.push_back(
          {opts.label, opts.seed, k, clock.seconds(), problem.field.eval(z).squaredNorm(), std::nullopt});
    }
    z = std::move(z_next);
  }
  result.final_z = std::move(z);
  return result;
}

RunResult run_gda(const ProblemInstance& problem, double eta, const RunOptions& opts) {
  validate(opts);
  if (!(eta > 0.0)) throw InvalidParameter("GDA stepsize must be positive");
  Rng rng(opts.seed);
  Vector z = initial_primal(problem.dimension, rng);
  RunResult result;
  SolverClock clock;
  for (std::int64_t k = 1; k <= opts.iterations; ++k) {
    clock.resume();
    const Vector Bz = problem.field.eval(z);
    Vector z_next = z - eta * Bz;
    clock.pause();
    if (is_trace_point(k, opts.trace_every, opts.iterations)) {
      result.trace.push_back({opts.label, opts.seed, k, clock.seconds(), Bz.squaredNorm(), std::nullopt});
    }
    z = std::move(z_next);
  }
  result.final_z = std::move(z);
  return result;
}

}  // namespace sps
