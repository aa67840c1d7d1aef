#include <cmath>
#include <memory>

#include "sps/engine.hpp"
#include "sps/errors.hpp"
#include "sps/problems.hpp"
#include "test_support.hpp"

using namespace sps;
using sps::test::gaussian;
using sps::test::near;
using sps::test::vec;

namespace {

// Random point of P: duals drawn then recentered.
ExtendedPoint random_point(Index d, std::size_t n, Rng& rng) {
  ExtendedPoint p;
  p.z = gaussian(d, rng);
  p.w.resize(n + 1);
  Vector mean = Vector::Zero(d);
  for (auto& wi : p.w) {
    wi = gaussian(d, rng);
    mean += wi;
  }
  mean /= static_cast<double>(n + 1);
  for (auto& wi : p.w) wi -= mean;
  return p;
}

// Independent recomputation of sum_i <z - x_i, y_i - w_i>.
double phi_by_hand(const ExtendedPoint& p, const OperatorPairSet& s) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    for (Index j = 0; j < p.z.size(); ++j) total += (p.z[j] - s.pairs[i].x[j]) * (s.pairs[i].y[j] - p.w[i][j]);
  }
  return total;
}

ExtendedPoint axpy(const ExtendedPoint& p, double h, const ExtendedPoint& g) {
  ExtendedPoint out = p;
  out.z += h * g.z;
  for (std::size_t i = 0; i < out.w.size(); ++i) out.w[i] += h * g.w[i];
  return out;
}

double squared_norm(const ExtendedPoint& g) {
  double s = g.z.squaredNorm();
  for (const auto& wi : g.w) s += wi.squaredNorm();
  return s;
}

std::shared_ptr<const SparseDataset> small_data(Index rows, Index features, std::uint64_t seed) {
  return std::make_shared<const SparseDataset>(make_synthetic_dataset(rows, features, seed));
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("pairs reconstruct the resolvent steps") {
    const auto game = make_known_solution_game(2, 1.0, 0.2, 1, 0.1);
    Rng rng(2);
    const ExtendedPoint p = random_point(4, 2, rng);
    const double tau = 0.7;
    const auto pairs = compute_pairs(p, game.problem, tau, 0.3, game.problem.field.eval);
    REQUIRE(pairs.pairs.size() == 3);
    for (std::size_t i = 0; i < 2; ++i) {
      const Vector t = p.z + tau * p.w[i];
      CHECK(pairs.pairs[i].x == game.problem.operators[i].resolve(tau, t));
      CHECK(pairs.pairs[i].y == (t - pairs.pairs[i].x) / tau);
    }
    const Vector Bz = game.problem.field.eval(p.z);
    const Vector x = p.z - 0.3 * (Bz - p.w[2]);
    CHECK(near(pairs.pairs[2].x, x, 1e-15));
    CHECK(near(pairs.pairs[2].y, game.problem.field.eval(x), 1e-15));
  }

  TEST_CASE("oracle is called at z, then at x_{n+1}") {
    const auto game = make_known_solution_game(1, 1.0, 0.2, 3);
    Rng rng(4);
    const ExtendedPoint p = random_point(2, 2, rng);
    std::vector<Vector> calls;
    const FieldOracle oracle = [&](const Vector& z) {
      calls.push_back(z);
      return game.problem.field.eval(z);
    };
    const auto pairs = compute_pairs(p, game.problem, 1.0, 0.5, oracle);
    REQUIRE(calls.size() == 2);
    CHECK(calls[0] == p.z);
    CHECK(calls[1] == pairs.pairs[2].x);
  }

  TEST_CASE("a solution is a fixed point without noise") {
    const auto game = make_known_solution_game(3, 1.5, 0.1, 5);
    Rng rng(6);
    const StepSchedule schedule = StepSchedule::decay(0.5);
    const SpsStep step = sps_iterate(game.solution, game.problem, schedule, 1, rng);
    CHECK(near(step.next.z, game.solution.z, 1e-14));
    for (std::size_t i = 0; i < 3; ++i) CHECK(near(step.next.w[i], game.solution.w[i], 1e-14));
  }

  TEST_CASE("n = 0 step is the double-stepsize extragradient recursion") {
    const ProblemInstance problem = make_bilinear_game(1, 1, 1.0);
    const StepSchedule schedule = StepSchedule::decay(0.8);
    Rng rng(7);
    ExtendedPoint p = initial_point(problem, rng);
    Vector z = p.z;
    for (std::int64_t k = 1; k <= 50; ++k) {
      const StepSizes s = schedule.at(k);
      const Vector Bz = vec({z[1], -z[0]});
      const Vector x = z - s.rho * Bz;
      z = z - s.alpha * vec({x[1], -x[0]});
      p = sps_iterate(p, problem, schedule, k, rng).next;
      CHECK(near(p.z, z, 1e-15));
      CHECK(p.w[0].norm() == 0.0);
    }
  }

  TEST_CASE("update equals p - alpha grad phi") {
    const auto game = make_known_solution_game(2, 1.0, 0.3, 8, 0.05);
    Rng rng(9);
    const ExtendedPoint p = random_point(4, 2, rng);
    const auto pairs = compute_pairs(p, game.problem, 1.0, 0.4, game.problem.field.eval);
    const ExtendedPoint g = hyperplane_gradient(pairs);
    const ExtendedPoint next = apply_update(p, pairs, 0.3);
    const ExtendedPoint expected = axpy(p, -0.3, g);
    CHECK(near(next.z, expected.z, 1e-14));
    for (std::size_t i = 0; i < 3; ++i) CHECK(near(next.w[i], expected.w[i], 1e-14));
  }

  TEST_CASE("hyperplane_eval") {
    Rng rng(10);
    ExtendedPoint p = random_point(3, 2, rng);
    OperatorPairSet same;
    for (const auto& wi : p.w) same.pairs.push_back({p.z, wi});
    CHECK(hyperplane_eval(p, same) == 0.0);

    OperatorPairSet pairs;
    for (int i = 0; i < 3; ++i) pairs.pairs.push_back({gaussian(3, rng), gaussian(3, rng)});
    CHECK(hyperplane_eval(p, pairs) == doctest::Approx(phi_by_hand(p, pairs)).epsilon(1e-13));

    const ExtendedPoint q = random_point(3, 2, rng);
    for (double theta : {0.0, 0.25, 0.5, 1.0, 1.7}) {
      ExtendedPoint mix = axpy(q, 0.0, q);
      mix.z = theta * p.z + (1.0 - theta) * q.z;
      for (std::size_t i = 0; i < 3; ++i) mix.w[i] = theta * p.w[i] + (1.0 - theta) * q.w[i];
      const double lhs = hyperplane_eval(mix, pairs);
      const double rhs = theta * hyperplane_eval(p, pairs) + (1.0 - theta) * hyperplane_eval(q, pairs);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }

    OperatorPairSet bad = pairs;
    bad.pairs.pop_back();
    CHECK_THROWS_AS(hyperplane_eval(p, bad), ShapeError);
  }

  TEST_CASE("hyperplane_gradient") {
    Rng rng(11);
    OperatorPairSet equal_x;
    const Vector x = gaussian(4, rng);
    for (int i = 0; i < 3; ++i) equal_x.pairs.push_back({x, gaussian(4, rng)});
    for (const auto& gw : hyperplane_gradient(equal_x).w) CHECK(gw.norm() == 0.0);

    OperatorPairSet pairs;
    for (int i = 0; i < 4; ++i) pairs.pairs.push_back({gaussian(4, rng), gaussian(4, rng)});
    const ExtendedPoint g = hyperplane_gradient(pairs);
    CHECK(g.dual_sum_norm() <= 1e-14);
    Vector ysum = Vector::Zero(4);
    for (const auto& pr : pairs.pairs) ysum += pr.y;
    CHECK(near(g.z, ysum, 1e-14));

    const ExtendedPoint p = random_point(4, 3, rng);
    for (double h : {1e-3, 1e-1, 1.0}) {
      const double change = hyperplane_eval(axpy(p, -h, g), pairs) - hyperplane_eval(p, pairs);
      CHECK(change == doctest::Approx(-h * squared_norm(g)).epsilon(1e-9));
    }
  }

  TEST_CASE("phi drops by alpha ||grad phi||^2 along the update") {
    const auto game = make_known_solution_game(2, 1.0, 0.3, 12);
    Rng rng(13);
    const ExtendedPoint p = random_point(4, 2, rng);
    const auto pairs = compute_pairs(p, game.problem, 1.0, 0.4, game.problem.field.eval);
    const double alpha = 0.2;
    const double drop = hyperplane_eval(p, pairs) - hyperplane_eval(apply_update(p, pairs, alpha), pairs);
    CHECK(drop == doctest::Approx(alpha * squared_norm(hyperplane_gradient(pairs))).epsilon(1e-10));
  }

  TEST_CASE("residual_O") {
    const auto game = make_known_solution_game(3, 1.0, 0.2, 14);
    const auto& pb = game.problem;
    const auto pairs = compute_pairs(game.solution, pb, 1.0, 0.5, pb.field.eval);
    CHECK(residual_O(game.solution, pairs, pb.field.eval(game.solution.z)) <= 1e-20);

    ExtendedPoint off = game.solution;
    off.w[0][0] += 1e-3;
    off.w[2][0] -= 1e-3;
    const auto off_pairs = compute_pairs(off, pb, 1.0, 0.5, pb.field.eval);
    CHECK(residual_O(off, off_pairs, pb.field.eval(off.z)) > 0.0);

    // n = 0, B = grad f for f(z) = ||z||^2 / 2 + <a, z>: O = ||grad f(z)||^2.
    ProblemInstance smooth;
    smooth.dimension = 3;
    const Vector a = vec({1, -2, 0.5});
    smooth.field.eval = [a](const Vector& z) { return Vector(z + a); };
    smooth.field.stochastic_eval = [a](const Vector& z, Rng&) { return Vector(z + a); };
    const ExtendedPoint p = ExtendedPoint::from_primal(vec({0.3, 0.1, -1}), 0);
    const auto s = compute_pairs(p, smooth, 1.0, 0.5, smooth.field.eval);
    CHECK(residual_O(p, s, smooth.field.eval(p.z)) == doctest::Approx((p.z + a).squaredNorm()));
  }

  TEST_CASE("residual_R by hand for n = 1") {
    OperatorPairSet pairs;
    pairs.pairs.push_back({vec({1, 2}), vec({0.5, -1})});
    pairs.pairs.push_back({vec({9, 9}), vec({9, 9})});  // the B pair does not enter R
    const Vector z = vec({0, 1});
    const Vector Bz = vec({2, 3});
    // ||z - x_1||^2 = 1 + 1, ||Bz + y_1||^2 = 6.25 + 4
    CHECK(residual_R(z, pairs, Bz) == doctest::Approx(12.25));
  }

  TEST_CASE("R <= 2n O on random iterates") {
    const DrslrProblem drslr(small_data(20, 4, 15), {});
    const ProblemInstance pb = drslr.instance(OracleMode::kExact);
    Rng rng(16);
    for (int k = 0; k < 200; ++k) {
      const ExtendedPoint p = random_point(pb.dimension, 2, rng);
      const auto pairs = compute_pairs(p, pb, 1.0, 0.3, pb.field.eval);
      const Vector Bz = pb.field.eval(p.z);
      CHECK(residual_R(p.z, pairs, Bz) <= 4.0 * residual_O(p, pairs, Bz) * (1.0 + 1e-10));
    }
  }

  TEST_CASE("graph pairs are monotone per operator") {
    const DrslrProblem drslr(small_data(15, 4, 17), {});
    const ProblemInstance pb = drslr.instance(OracleMode::kMinibatch, 5);
    Rng rng(18);
    ExtendedPoint p = initial_point(pb, rng);
    const StepSchedule schedule = StepSchedule::decay(0.5);
    std::vector<std::vector<OperatorPair>> collected(2);
    for (std::int64_t k = 1; k <= 100; ++k) {
      SpsStep step = sps_iterate(p, pb, schedule, k, rng);
      for (std::size_t i = 0; i < 2; ++i) collected[i].push_back(step.pairs.pairs[i]);
      p = std::move(step.next);
    }
    for (const auto& graph : collected) {
      double worst = 0.0;
      for (std::size_t a = 0; a < graph.size(); ++a)
        for (std::size_t b = a + 1; b < graph.size(); ++b)
          worst = std::min(worst, (graph[a].x - graph[b].x).dot(graph[a].y - graph[b].y));
      CHECK(worst >= -1e-10);
    }
  }

  TEST_CASE("iterates stay in P") {
    const auto game = make_known_solution_game(4, 1.0, 0.1, 19, 0.5);
    RunOptions opts;
    opts.iterations = 10000;
    opts.seed = 20;
    opts.trace_every = 1000;
    const RunResult run = run_sps(game.problem, StepSchedule::decay(0.5), opts);
    const ExtendedPoint p{run.final_z, run.final_w};
    CHECK(p.dual_sum_norm() <= 1e-8 * (1.0 + p.max_dual_norm()));
  }

  TEST_CASE("run_sps on the bilinear game") {
    const ProblemInstance pb = make_bilinear_game(1, 1, 1.0);
    RunOptions opts;
    opts.iterations = 100000;
    opts.seed = 21;
    opts.trace_every = 10000;
    const RunResult run = run_sps(pb, StepSchedule::decay(1.0), opts);
    CHECK(run.trace.back().iteration == 100000);
    CHECK(run.trace.back().residual_R < 1e-6);
  }

  TEST_CASE("run_sps is deterministic and traces on cadence") {
    const DrslrProblem drslr(small_data(30, 5, 22), {});
    const ProblemInstance pb = drslr.instance(OracleMode::kMinibatch, 8);
    RunOptions opts;
    opts.iterations = 95;
    opts.seed = 23;
    opts.trace_every = 10;
    opts.label = "x";
    const RunResult a = run_sps(pb, StepSchedule::decay(0.5), opts);
    const RunResult b = run_sps(pb, StepSchedule::decay(0.5), opts);
    REQUIRE(a.trace.size() == 11);
    CHECK(a.trace.front().iteration == 1);
    CHECK(a.trace[1].iteration == 11);
    CHECK(a.trace.back().iteration == 95);
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].solver == "x");
      CHECK(a.trace[i].seed == 23);
      CHECK(a.trace[i].residual_R == b.trace[i].residual_R);
      CHECK(*a.trace[i].residual_O == *b.trace[i].residual_O);
      CHECK(a.trace[i].residual_R >= 0.0);
      if (i > 0) CHECK(a.trace[i].wall_time_s >= a.trace[i - 1].wall_time_s);
    }
    CHECK(a.final_z == b.final_z);
  }

  TEST_CASE("divergence carries the partial trace") {
    const ProblemInstance pb = make_bilinear_game(1, 1, 1.0);
    RunOptions opts;
    opts.iterations = 1000;
    opts.trace_every = 1;
    try {
      run_sps(pb, StepSchedule::decay(100.0), opts);
      FAIL("expected divergence");
    } catch (const RunDivergence& e) {
      CHECK(e.last_finite_iteration() >= 1);
      // Rows exist for every completed step before the one that blew up.
      CHECK(e.trace().size() == static_cast<std::size_t>(e.last_finite_iteration() - 1));
      CHECK(e.trace().back().iteration == e.last_finite_iteration() - 1);
    }
  }

  TEST_CASE("compact variant") {
    const DrslrProblem drslr(small_data(100, 20, 24), {});
    const ProblemInstance pb = drslr.instance(OracleMode::kMinibatch, 10);
    const StepSchedule schedule = StepSchedule::decay(1.0);

    const CompactSpsSolver solver(pb, schedule, 0);
    CHECK(solver.working_elements() == (2 + 7) * static_cast<std::size_t>(pb.dimension));

    ProblemInstance wide;
    wide.dimension = 100;
    wide.operators = {zero_operator(100), zero_operator(100)};
    wide.field.eval = [](const Vector& z) { return z; };
    wide.field.stochastic_eval = [](const Vector& z, Rng&) { return z; };
    CHECK(CompactSpsSolver(wide, schedule, 0).working_elements() <= 900);

    RunOptions opts;
    opts.iterations = 300;
    opts.seed = 25;
    opts.trace_every = 7;
    const RunResult a = run_sps(pb, schedule, opts);
    const RunResult b = run_sps_compact(pb, schedule, opts);
    CHECK(a.final_z == b.final_z);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].residual_R == b.trace[i].residual_R);
      CHECK(*a.trace[i].residual_O == *b.trace[i].residual_O);
    }
  }

  TEST_CASE("initial point") {
    const ProblemInstance pb = make_bilinear_game(2, 2, 1.0);
    Rng a(5), b(5);
    const ExtendedPoint p = initial_point(pb, a);
    CHECK(p.z == initial_primal(4, b));
    REQUIRE(p.w.size() == 1);
    CHECK(p.w[0].norm() == 0.0);
  }
}
