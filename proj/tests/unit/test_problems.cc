#include <cmath>
#include <memory>

#include "sps/errors.hpp"
#include "sps/problems.hpp"
#include "test_support.hpp"

using namespace sps;
using sps::test::gaussian;
using sps::test::near;
using sps::test::vec;

namespace {

std::shared_ptr<const SparseDataset> data(Index rows, Index features, std::uint64_t seed, double density = 1.0) {
  return std::make_shared<const SparseDataset>(make_synthetic_dataset(rows, features, seed, density));
}

// Feasible-ish test point: lambda positive so the SOC is not degenerate.
Vector random_z(const DrslrProblem& p, Rng& rng) {
  Vector z = gaussian(p.dimension(), rng, 0.7);
  z[0] = std::abs(z[0]) + 0.5;
  return z;
}

}  // namespace

TEST_SUITE("problems") {
  TEST_CASE("DRSLR field at the origin") {
    const DrslrProblem p(data(8, 3, 1), {1.0, 1.0, 1e-3});
    CHECK(drslr_full_field(p, Vector::Zero(p.dimension())).norm() == 0.0);
    CHECK(p.dimension() == 1 + 3 + 8);
    CHECK_THROWS_AS(p.full_field(Vector::Zero(5)), ShapeError);
  }

  TEST_CASE("DRSLR field is the mean of its components") {
    const DrslrProblem p(data(3, 4, 2), {0.7, 1.3, 1e-3});
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
      const Vector z = random_z(p, rng);
      Vector mean = Vector::Zero(z.size());
      for (Index i = 0; i < 3; ++i) mean += drslr_component(p, i, z);
      mean /= 3.0;
      const Vector full = p.full_field(z);
      CHECK((mean - full).norm() <= 1e-15 * (1.0 + full.norm()));
    }
    CHECK_THROWS_AS(p.component(3, Vector::Zero(p.dimension())), IndexError);
    CHECK_THROWS_AS(p.component(-1, Vector::Zero(p.dimension())), IndexError);
  }

  TEST_CASE("single-sample problem") {
    const DrslrProblem p(data(1, 3, 4), {});
    Rng rng(5);
    const Vector z = random_z(p, rng);
    CHECK(near(p.component(0, z), p.full_field(z), 1e-15));
  }

  TEST_CASE("component touches exactly one gamma coordinate") {
    const DrslrProblem p(data(6, 3, 6), {});
    Rng rng(7);
    const Vector z = random_z(p, rng);
    for (Index i = 0; i < 6; ++i) {
      const Vector g = p.component(i, z).tail(6);
      int nonzero = 0;
      for (Index j = 0; j < 6; ++j) nonzero += g[j] != 0.0;
      CHECK(nonzero == 1);
      CHECK(g[i] != 0.0);
    }
  }

  TEST_CASE("field is the saddle gradient of the Lagrangian") {
    const DrslrProblem p(data(7, 4, 8, 0.6), {0.8, 1.2, 1e-3});
    Rng rng(9);
    const double h = 1e-6;
    const Index split = 1 + p.num_features();
    for (int k = 0; k < 10; ++k) {
      const Vector z = random_z(p, rng);
      const Vector B = p.full_field(z);
      for (Index j = 0; j < z.size(); ++j) {
        Vector up = z, down = z;
        up[j] += h;
        down[j] -= h;
        const double fd = (p.lagrangian(up) - p.lagrangian(down)) / (2.0 * h);
        const double expected = j < split ? fd : -fd;
        CHECK(std::abs(B[j] - expected) <= 1e-5);
      }
    }
  }

  TEST_CASE("DRSLR field is monotone") {
    const DrslrProblem p(data(10, 4, 10), {});
    Rng rng(11);
    for (int k = 0; k < 1000; ++k) {
      const Vector a = gaussian(p.dimension(), rng), b = gaussian(p.dimension(), rng);
      const double gap = (p.full_field(a) - p.full_field(b)).dot(a - b);
      CHECK(gap >= -1e-8 * (a - b).squaredNorm());
    }
  }

  TEST_CASE("minibatch oracle") {
    const DrslrProblem p(data(5, 3, 12), {});
    Rng rng(13);
    const Vector z = random_z(p, rng);
    const Vector full = p.full_field(z);

    Vector mean = Vector::Zero(z.size());
    for (Index i = 0; i < 5; ++i) {
      const std::vector<Index> one{i};
      mean += p.batch_average(z, one);
    }
    CHECK((mean / 5.0 - full).norm() <= 1e-15 * full.norm());

    const std::vector<Index> all{0, 1, 2, 3, 4};
    CHECK((p.batch_average(z, all) - full).norm() <= 1e-15 * full.norm());

    Rng a(14), b(14);
    CHECK(drslr_minibatch_oracle(p, z, 3, a) == drslr_minibatch_oracle(p, z, 3, b));
    CHECK_THROWS_AS(drslr_minibatch_oracle(p, z, 0, a), InvalidParameter);
    CHECK_THROWS_AS(drslr_minibatch_oracle(p, z, 6, a), InvalidParameter);
  }

  TEST_CASE("minibatch oracle mean approaches the field") {
    const DrslrProblem p(data(20, 3, 15), {});
    Rng rng(16);
    const Vector z = random_z(p, rng);
    Vector mean = Vector::Zero(z.size());
    const int draws = 20000;
    for (int k = 0; k < draws; ++k) mean += p.minibatch_oracle(z, 2, rng);
    mean /= draws;
    const Vector full = p.full_field(z);
    CHECK((mean - full).norm() <= 0.05 * (1.0 + full.norm()));
  }

  TEST_CASE("analytic adjoint matches finite differences") {
    const DrslrProblem p(data(6, 3, 17), {});
    Rng rng(18);
    const Vector z = random_z(p, rng);
    const Vector u = gaussian(p.dimension(), rng);
    const Vector got = p.jacobian_transpose_product(z, u);
    const double h = 1e-6;
    for (Index j = 0; j < z.size(); ++j) {
      Vector up = z, down = z;
      up[j] += h;
      down[j] -= h;
      const double fd = u.dot(p.full_field(up) - p.full_field(down)) / (2.0 * h);
      CHECK(std::abs(got[j] - fd) <= 1e-6);
    }
  }

  TEST_CASE("Lipschitz bound") {
    const ProblemInstance bilinear = make_bilinear_game(1, 1, 1.0);
    const double L = estimate_lipschitz_bound(bilinear.field.eval, nullptr, 2, 0);
    CHECK(L >= 1.0);
    CHECK(L <= 1.5);

    const auto base = data(15, 4, 19);
    const DrslrProblem p(base, {});
    const double bound = drslr_lipschitz_bound(p);
    Rng rng(20);
    for (int k = 0; k < 500; ++k) {
      const Vector a = gaussian(p.dimension(), rng), b = gaussian(p.dimension(), rng);
      CHECK((p.full_field(a) - p.full_field(b)).norm() <= bound * (a - b).norm());
    }

    SparseDataset doubled = *base;
    for (auto& v : doubled.values) v *= 2.0;
    const DrslrProblem q(std::make_shared<const SparseDataset>(doubled), {});
    CHECK(drslr_lipschitz_bound(q) > bound);
  }

  TEST_CASE("bilinear game") {
    const ProblemInstance g = make_bilinear_game(1, 1, 1.0);
    CHECK(g.field.eval(vec({1, 0})) == vec({0, -1}));
    CHECK(g.num_operators() == 0);
    Rng rng(21);
    for (int k = 0; k < 100; ++k) {
      const Vector a = gaussian(2, rng), b = gaussian(2, rng);
      CHECK(std::abs((g.field.eval(a) - g.field.eval(b)).dot(a - b)) <= 1e-14);
    }
    CHECK_THROWS_AS(make_bilinear_game(1, 2, 1.0), InvalidParameter);

    const ProblemInstance noisy = make_bilinear_game(2, 2, 1.0, 0.1);
    const Vector z = vec({0.5, -0.5, 1, 0});
    Vector mean = Vector::Zero(4);
    for (int k = 0; k < 20000; ++k) mean += noisy.field.stochastic_eval(z, rng);
    CHECK(near(mean / 20000.0, noisy.field.eval(z), 0.01));
  }

  TEST_CASE("DRSLR resolvents are projections") {
    const DrslrProblem p(data(6, 3, 22), {});
    const SetValuedOperator a1 = p.constraint_operator();
    const SetValuedOperator a2 = p.l1_operator();
    Rng rng(23);
    for (int k = 0; k < 1000; ++k) {
      const Vector x = gaussian(p.dimension(), rng, 2.0);
      const Vector y = gaussian(p.dimension(), rng, 2.0);
      const Vector px = a1.resolve(1.0, x);
      CHECK((a1.resolve(1.0, px) - px).norm() <= 1e-12 * (1.0 + x.norm()));
      CHECK((px - a1.resolve(1.0, y)).norm() <= (x - y).norm() * (1.0 + 1e-12));
      CHECK(px.tail(6).lpNorm<Eigen::Infinity>() <= 1.0);
      CHECK(px.segment(1, 3).norm() <= px[0] / (DrslrProblem::kPsiLipschitz + 1.0) + 1e-12);

      const Vector sx = a2.resolve(0.5, x);
      CHECK(sx[0] == x[0]);
      CHECK(sx.tail(6) == x.tail(6));
      CHECK((sx - a2.resolve(0.5, y)).norm() <= (x - y).norm() * (1.0 + 1e-12));
    }
  }

  TEST_CASE("known-solution game") {
    const auto game = make_known_solution_game(3, 2.0, 0.1, 24);
    const Vector& z = game.solution.z;
    CHECK(z.lpNorm<Eigen::Infinity>() < 1.0);
    CHECK(game.solution.dual_sum_norm() <= 1e-15);
    CHECK(near(game.problem.field.eval(z), game.solution.w[2], 0.0));
    CHECK(game.problem.num_operators() == 2);
  }

  TEST_CASE("instance wiring") {
    const DrslrProblem p(data(10, 3, 25), {});
    const ProblemInstance exact = p.instance(OracleMode::kExact, 4, 3.0);
    CHECK(exact.field.lipschitz_bound == 3.0);
    CHECK(exact.num_operators() == 2);
    Rng rng(26);
    const Vector z = random_z(p, rng);
    CHECK(exact.field.stochastic_eval(z, rng) == exact.field.eval(z));

    const ProblemInstance mb = p.instance(OracleMode::kMinibatch, 4, 3.0);
    Rng a(27), b(27);
    CHECK(mb.field.stochastic_eval(z, a) == p.minibatch_oracle(z, 4, b));
  }
}
