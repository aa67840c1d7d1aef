#include "sps/verify/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <random>

#include "sps/baselines.hpp"
#include "sps/dataset.hpp"
#include "sps/engine.hpp"
#include "sps/problems.hpp"
#include "sps/schedule.hpp"
#include "sps/verify/oracles.hpp"

namespace sps::verify {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool same_bits(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

Vector gaussian(Index n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

std::shared_ptr<const SparseDataset> synthetic(Index rows, Index features, std::uint64_t seed) {
  return std::make_shared<const SparseDataset>(make_synthetic_dataset(rows, features, seed));
}

}  // namespace

CheckResult check_prox_oracles(int inputs, std::uint64_t seed, double tolerance, const ProxImplementations& impls) {
  Stopwatch clock;
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 8);
  double err_soft = 0.0, err_linf = 0.0, err_soc = 0.0;

  for (int k = 0; k < inputs; ++k) {
    const Index n = dim(rng);
    const Vector t = gaussian(n, rng, 2.0);
    const double kappa = 2.0 * unit(rng);
    err_soft = std::max(err_soft, (impls.soft_threshold(t, kappa) - soft_threshold_oracle(t, kappa)).lpNorm<Eigen::Infinity>());

    const double radius = 0.1 + 2.0 * unit(rng);
    err_linf = std::max(err_linf,
                        (impls.project_linf_ball(t, radius) - linf_projection_oracle(t, radius)).lpNorm<Eigen::Infinity>());

    const double lambda = 2.0 * gaussian(1, rng)[0];
    const double s = 0.5 + 3.0 * unit(rng);
    const auto [l_impl, b_impl] = impls.project_scaled_soc(lambda, t, s);
    const auto [l_ref, b_ref] = scaled_soc_projection_oracle(lambda, t, s);
    err_soc = std::max({err_soc, std::abs(l_impl - l_ref), (b_impl - b_ref).lpNorm<Eigen::Infinity>()});
  }

  CheckResult r;
  r.name = "prox_oracle_equivalence";
  r.passed = err_soft <= tolerance && err_linf <= tolerance && err_soc <= tolerance;
  r.detail = std::to_string(inputs) + " inputs, max error soft_threshold " + sci(err_soft) + ", linf " +
             sci(err_linf) + ", soc " + sci(err_soc) + " (tol " + sci(tolerance) + ")";
  r.seconds = clock.seconds();
  return r;
}

CheckResult check_moreau_inverse(int inputs, std::uint64_t seed, double tolerance) {
  Stopwatch clock;
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double err = 0.0;
  for (int k = 0; k < inputs; ++k) {
    const Index n = 3;
    const double weight = 0.1 + unit(rng);
    const double alpha = 0.1 + 2.0 * unit(rng);
    const Vector w = gaussian(n, rng, 2.0);
    const Vector got = inverse_resolvent_via_moreau(l1_subdifferential(weight, n), alpha, w);
    for (Index j = 0; j < n; ++j) {
      const double ref = inverse_weighted_abs_resolvent_grid(w[j], alpha, weight, -2.0 * weight, 2.0 * weight);
      err = std::max(err, std::abs(got[j] - ref));
    }
  }
  CheckResult r;
  r.name = "moreau_inverse_resolvent";
  r.passed = err <= tolerance;
  r.detail = std::to_string(inputs) + " inputs, max error " + sci(err);
  r.seconds = clock.seconds();
  return r;
}

CheckResult check_lemma1(std::uint64_t seed) {
  Stopwatch clock;
  const auto game = make_known_solution_game(3, 1.0, 0.1, seed);
  const ProblemInstance& problem = game.problem;
  const double tau = 1.0;
  const double rho = 0.5 / problem.field.lipschitz_bound;
  const auto O_at = [&](const ExtendedPoint& p) {
    const auto pairs = compute_pairs(p, problem, tau, rho, problem.field.eval);
    return residual_O(p, pairs, problem.field.eval(p.z));
  };

  const double at_solution = O_at(game.solution);

  Rng rng(seed + 1);
  std::uniform_real_distribution<double> exponent(-2.0, 0.0);
  double min_perturbed = INFINITY;
  for (int k = 0; k < 100; ++k) {
    ExtendedPoint p = game.solution;
    ExtendedPoint delta = game.solution;
    delta.z = gaussian(p.z.size(), rng);
    for (auto& wi : delta.w) wi = gaussian(p.z.size(), rng);
    Vector mean = Vector::Zero(p.z.size());
    for (const auto& wi : delta.w) mean += wi;
    mean /= static_cast<double>(delta.w.size());
    for (auto& wi : delta.w) wi -= mean;
    const double scale = std::pow(10.0, exponent(rng)) / delta.norm();
    p.z += scale * delta.z;
    for (std::size_t i = 0; i < p.w.size(); ++i) p.w[i] += scale * delta.w[i];
    min_perturbed = std::min(min_perturbed, O_at(p));
  }

  CheckResult r;
  r.name = "lemma1_oracle";
  r.seconds = clock.seconds();
  r.passed = at_solution <= 1e-18 && min_perturbed >= 1e-8 && r.seconds < 1.0;
  r.detail = "O(p*) = " + sci(at_solution) + ", min O over 100 perturbations = " + sci(min_perturbed);
  return r;
}

CheckResult check_unbiasedness(std::uint64_t seed) {
  Stopwatch clock;
  const DrslrProblem problem(synthetic(5, 3, seed), {});
  Rng rng(seed + 1);
  const Vector z = gaussian(problem.dimension(), rng);
  const Vector full = drslr_full_field(problem, z);
  double worst = 0.0;
  bool replay_ok = true;

  for (Index b = 1; b <= 3; ++b) {
    // Neumaier-compensated sum over all m^b ordered draws.
    Vector sum = Vector::Zero(z.size());
    Vector comp = Vector::Zero(z.size());
    std::vector<Index> batch(static_cast<std::size_t>(b), 0);
    std::int64_t count = 0;
    while (true) {
      const Vector term = problem.batch_average(z, batch);
      for (Index j = 0; j < z.size(); ++j) {
        const double t = sum[j] + term[j];
        comp[j] += std::abs(sum[j]) >= std::abs(term[j]) ? (sum[j] - t) + term[j] : (term[j] - t) + sum[j];
        sum[j] = t;
      }
      ++count;
      std::size_t pos = 0;
      while (pos < batch.size() && ++batch[pos] == problem.num_samples()) batch[pos++] = 0;
      if (pos == batch.size()) break;
    }
    const Vector mean = (sum + comp) / static_cast<double>(count);
    worst = std::max(worst, (mean - full).norm() / full.norm());

    // The oracle is the batch average over its own uniform draws.
    Rng a(seed + 10 + static_cast<std::uint64_t>(b));
    Rng replay = a;
    const Vector drawn = drslr_minibatch_oracle(problem, z, b, a);
    std::uniform_int_distribution<Index> pick(0, problem.num_samples() - 1);
    std::vector<Index> indices(static_cast<std::size_t>(b));
    for (auto& i : indices) i = pick(replay);
    replay_ok = replay_ok && same_bits(drawn, problem.batch_average(z, indices));
  }

  CheckResult r;
  r.name = "oracle_unbiasedness";
  r.passed = worst <= 1e-14 && replay_ok;
  r.detail = "m = 5, batch 1..3, max relative error " + sci(worst) + (replay_ok ? "" : ", oracle draw mismatch");
  r.seconds = clock.seconds();
  return r;
}

CheckResult check_dseg_equivalence(std::uint64_t seed) {
  Stopwatch clock;
  const ProblemInstance problem = make_bilinear_game(2, 2, 1.0, 0.1);
  const StepSchedule schedule = StepSchedule::decay(0.5);
  int mismatches = 0;
  for (std::int64_t k = 1; k <= 100; ++k) {
    RunOptions opts;
    opts.iterations = k;
    opts.seed = seed;
    opts.trace_every = 1;
    const RunResult a = run_sps(problem, schedule, opts);
    const RunResult b = dseg_run(problem, schedule, opts);
    bool same = same_bits(a.final_z, b.final_z) && a.trace.size() == b.trace.size();
    for (std::size_t i = 0; same && i < a.trace.size(); ++i)
      same = same_bits(a.trace[i].residual_R, b.trace[i].residual_R);
    if (!same) ++mismatches;
  }
  CheckResult r;
  r.name = "dseg_equivalence";
  r.passed = mismatches == 0;
  r.detail = "100 step counts compared bitwise, " + std::to_string(mismatches) + " mismatches";
  r.seconds = clock.seconds();
  return r;
}

CheckResult check_subspace_invariance(std::vector<TracedRun>* traced, std::uint64_t seed) {
  Stopwatch clock;
  const DrslrProblem drslr(synthetic(100, 20, seed), {});
  const ProblemInstance problem = drslr.instance(OracleMode::kMinibatch, 10);
  RunOptions opts;
  opts.iterations = 10000;
  opts.seed = seed;
  opts.trace_every = 500;
  CheckResult r;
  r.name = "subspace_invariance";
  try {
    const RunResult run = run_sps(problem, StepSchedule::decay(1.0), opts);
    ExtendedPoint p{run.final_z, run.final_w};
    const double sum_norm = p.dual_sum_norm();
    const double bound = 1e-8 * (1.0 + p.max_dual_norm());
    r.seconds = clock.seconds();
    r.passed = sum_norm <= bound && r.seconds < 10.0;
    r.detail = "||sum w|| = " + sci(sum_norm) + " vs bound " + sci(bound);
    if (traced) traced->push_back({"subspace_invariance", problem.num_operators(), run.trace});
  } catch (const DivergenceError& e) {
    r.seconds = clock.seconds();
    r.detail = std::string("diverged: ") + e.what();
  }
  return r;
}

CheckResult check_zero_noise_separation(std::vector<TracedRun>* traced, std::uint64_t seed) {
  Stopwatch clock;
  const auto game = make_known_solution_game(5, 2.0, 0.1, seed);
  const ProblemInstance& problem = game.problem;
  const double L = problem.field.lipschitz_bound;
  const StepSchedule schedule = StepSchedule::decay(0.9 / L);

  Rng rng(seed);
  ExtendedPoint p = initial_point(problem, rng);
  double min_current = INFINITY;
  double max_solution = -INFINITY;
  double max_rho = 0.0;
  TracedRun run{"zero_noise_separation", problem.num_operators(), {}};
  for (std::int64_t k = 1; k <= 10000; ++k) {
    max_rho = std::max(max_rho, schedule.at(k).rho);
    SpsStep step = sps_iterate(p, problem, schedule, k, rng);
    min_current = std::min(min_current, hyperplane_eval(p, step.pairs));
    max_solution = std::max(max_solution, hyperplane_eval(game.solution, step.pairs));
    if (is_trace_point(k, 100, 10000)) {
      const Vector Bz = problem.field.eval(p.z);
      run.trace.push_back({"sps", seed, k, 0.0, residual_R(p.z, step.pairs, Bz), residual_O(p, step.pairs, Bz)});
    }
    p = std::move(step.next);
  }
  if (traced) traced->push_back(std::move(run));

  CheckResult r;
  r.name = "zero_noise_separation";
  r.passed = min_current >= -1e-12 && max_solution <= 1e-12 && max_rho <= 0.9 / L;
  r.detail = "min phi(p^k) = " + sci(min_current) + ", max phi(p*) = " + sci(max_solution);
  r.seconds = clock.seconds();
  return r;
}

CheckResult check_compact_equivalence(std::vector<TracedRun>* traced, std::uint64_t seed) {
  Stopwatch clock;
  const DrslrProblem drslr(synthetic(100, 20, seed), {});
  const ProblemInstance problem = drslr.instance(OracleMode::kMinibatch, 10);
  const StepSchedule schedule = StepSchedule::decay(1.0);
  RunOptions opts;
  opts.iterations = 1000;
  opts.seed = seed;
  opts.trace_every = 1;
  const RunResult a = run_sps(problem, schedule, opts);
  const RunResult b = run_sps_compact(problem, schedule, opts);

  bool same = a.trace.size() == b.trace.size() && same_bits(a.final_z, b.final_z) &&
              a.final_w.size() == b.final_w.size();
  for (std::size_t i = 0; same && i < a.final_w.size(); ++i) same = same_bits(a.final_w[i], b.final_w[i]);
  for (std::size_t i = 0; same && i < a.trace.size(); ++i) {
    const auto& x = a.trace[i];
    const auto& y = b.trace[i];
    same = x.iteration == y.iteration && same_bits(x.residual_R, y.residual_R) && x.residual_O.has_value() &&
           y.residual_O.has_value() && same_bits(*x.residual_O, *y.residual_O);
  }
  if (traced) {
    traced->push_back({"compact_reference", problem.num_operators(), a.trace});
    traced->push_back({"compact", problem.num_operators(), b.trace});
  }
  CheckResult r;
  r.name = "compact_equivalence";
  r.passed = same;
  r.detail = std::to_string(a.trace.size()) + " traced iterates and final p compared bitwise" +
             (same ? "" : ": mismatch");
  r.seconds = clock.seconds();
  return r;
}

std::vector<CheckResult> check_convergence(std::vector<TracedRun>* traced, std::uint64_t seed) {
  Stopwatch clock;
  const DrslrProblem drslr(synthetic(50, 10, seed + 1), {});
  const ProblemInstance problem = drslr.instance(OracleMode::kExact);
  const std::int64_t iterations = 20000;
  RunOptions opts;
  opts.iterations = iterations;
  opts.seed = seed;
  opts.trace_every = 1000;

  struct Outcome {
    std::string label;
    RunResult run;
  };
  std::vector<Outcome> outcomes;
  const auto labelled = [&](std::string label) {
    RunOptions o = opts;
    o.label = label;
    return o;
  };
  const LinesearchParams ls;
  outcomes.push_back({"sps-decay", run_sps(problem, StepSchedule::decay(1.0), labelled("sps-decay"))});
  outcomes.push_back({"sps-fixed", run_sps(problem,
                                           StepSchedule::fixed(4.0, iterations, problem.field.lipschitz_bound),
                                           labelled("sps-fixed"))});
  outcomes.push_back({"ps", run_deterministic_ps(problem, 0.0, 1.0, labelled("ps"))});
  outcomes.push_back({"tseng", run_tseng(problem, ls, labelled("tseng"))});
  outcomes.push_back({"frb", run_frb(problem, ls, labelled("frb"))});
  const double seconds = clock.seconds();

  if (traced) {
    traced->push_back({"convergence sps-decay", problem.num_operators(), outcomes[0].run.trace});
    traced->push_back({"convergence sps-fixed", problem.num_operators(), outcomes[1].run.trace});
  }

  CheckResult residual;
  residual.name = "convergence_residual";
  double worst_R = 0.0;
  residual.detail = "final R:";
  for (const auto& o : outcomes) {
    const double R = o.run.trace.back().residual_R;
    worst_R = std::max(worst_R, R);
    residual.detail += " " + o.label + " " + sci(R);
  }
  residual.passed = worst_R <= 1e-5 && seconds < 60.0;
  residual.seconds = seconds;

  CheckResult consensus;
  consensus.name = "convergence_consensus";
  const Index primal_block = 1 + drslr.num_features();
  double worst_z = 0.0, worst_primal = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    for (std::size_t j = i + 1; j < outcomes.size(); ++j) {
      const Vector diff = outcomes[i].run.final_z - outcomes[j].run.final_z;
      worst_z = std::max(worst_z, diff.norm());
      worst_primal = std::max(worst_primal, diff.head(primal_block).norm());
    }
  consensus.passed = worst_z <= 1e-4;
  consensus.detail = "max pairwise ||z_a - z_b|| = " + sci(worst_z) + ", restricted to (lambda, beta) " +
                     sci(worst_primal);
  consensus.seconds = 0.0;
  return {residual, consensus};
}

CheckResult check_rate_trend(std::uint64_t seed) {
  Stopwatch clock;
  const ProblemInstance problem = make_bilinear_game(1, 1, 1.0, 0.1);
  const std::vector<std::int64_t> budgets{100, 1000, 10000};
  std::vector<double> averages;
  for (const std::int64_t K : budgets) {
    const StepSchedule schedule = StepSchedule::fixed(1.0, K, problem.field.lipschitz_bound);
    double total = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      RunOptions opts;
      opts.iterations = K;
      opts.seed = seed + s;
      opts.trace_every = 1;
      const RunResult run = run_sps(problem, schedule, opts);
      double running = 0.0;
      for (const auto& rec : run.trace) running += *rec.residual_O;
      total += running / static_cast<double>(K);
    }
    averages.push_back(total / 20.0);
  }
  CheckResult r;
  r.name = "rate_trend";
  r.passed = averages[0] > averages[1] && averages[1] > averages[2];
  r.detail = "mean running O at K = 1e2, 1e3, 1e4: " + sci(averages[0]) + ", " + sci(averages[1]) + ", " +
             sci(averages[2]);
  r.seconds = clock.seconds();
  return r;
}

CheckResult check_residual_relation(const std::vector<TracedRun>& runs) {
  Stopwatch clock;
  std::size_t checked = 0, violations = 0;
  double worst_ratio = 0.0;
  for (const auto& run : runs) {
    if (run.num_operators < 1) continue;
    const double factor = 2.0 * static_cast<double>(run.num_operators);
    for (const auto& rec : run.trace) {
      if (!rec.residual_O) continue;
      ++checked;
      const double bound = factor * *rec.residual_O;
      if (rec.residual_R > bound * (1.0 + 1e-10)) ++violations;
      if (bound > 0.0) worst_ratio = std::max(worst_ratio, rec.residual_R / bound);
    }
  }
  CheckResult r;
  r.name = "residual_relation";
  r.passed = violations == 0 && checked > 0;
  r.detail = std::to_string(checked) + " traced iterates over " + std::to_string(runs.size()) +
             " runs, max R / (2n O) = " + sci(worst_ratio);
  r.seconds = clock.seconds();
  return r;
}

CheckResult check_gda_contrast(std::uint64_t seed) {
  Stopwatch clock;
  const ProblemInstance problem = make_bilinear_game(1, 1, 1.0, 0.0);
  Rng rng(seed);
  const double initial = initial_primal(problem.dimension, rng).norm();
  RunOptions opts;
  opts.iterations = 999;  // z^1 -> z^1000
  opts.seed = seed;
  opts.trace_every = 1000;
  const double gda = run_gda(problem, 0.1, opts).final_z.norm();
  const double sps = run_sps(problem, StepSchedule::decay(1.0), opts).final_z.norm();
  CheckResult r;
  r.name = "gda_contrast";
  r.passed = gda > initial && sps < 1e-2 * initial;
  r.detail = "||z^1|| = " + sci(initial) + ", GDA ||z^1000|| = " + sci(gda) + ", SPS-decay ||z^1000|| = " + sci(sps);
  r.seconds = clock.seconds();
  return r;
}

std::vector<CheckResult> run_quick_suite(const ProxImplementations& impls) {
  return {check_lemma1(), check_unbiasedness(), check_prox_oracles(500, 0, 1e-6, impls), check_moreau_inverse(),
          check_dseg_equivalence()};
}

SuiteOutcome run_full_suite() {
  SuiteOutcome out;
  auto& runs = out.traced_runs;
  out.results.push_back(check_lemma1());
  out.results.push_back(check_subspace_invariance(&runs));
  out.results.push_back(check_zero_noise_separation(&runs));
  out.results.push_back(check_unbiasedness());
  out.results.push_back(check_prox_oracles());
  out.results.push_back(check_dseg_equivalence());
  out.results.push_back(check_compact_equivalence(&runs));
  for (auto& r : check_convergence(&runs)) out.results.push_back(std::move(r));
  out.results.push_back(check_rate_trend());
  out.results.push_back(check_residual_relation(runs));
  out.results.push_back(check_gda_contrast());
  return out;
}

}  // namespace sps::verify
