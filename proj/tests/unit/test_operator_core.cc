#include <cmath>
#include <vector>

#include "sps/errors.hpp"
#include "sps/operator_core.hpp"
#include "sps/verify/oracles.hpp"
#include "test_support.hpp"

using namespace sps;
using sps::test::gaussian;
using sps::test::near;
using sps::test::vec;

namespace {

// (lambda, beta) packed into one vector so the SOC projection fits the generic checks.
Vector soc_packed(const Vector& v, double s) {
  const auto [l, b] = project_scaled_soc(v[0], v.tail(v.size() - 1), s);
  Vector out(v.size());
  out[0] = l;
  out.tail(v.size() - 1) = b;
  return out;
}

void check_projection_properties(const std::function<Vector(const Vector&)>& proj, Index dim, std::uint64_t seed) {
  Rng rng(seed);
  for (int k = 0; k < 1000; ++k) {
    const Vector x = gaussian(dim, rng, 3.0);
    const Vector y = gaussian(dim, rng, 3.0);
    const Vector px = proj(x);
    CHECK((proj(px) - px).norm() <= 1e-12 * (1.0 + x.norm()));
    CHECK((px - proj(y)).norm() <= (x - y).norm() * (1.0 + 1e-12));
  }
}

void check_resolvent_monotone(const SetValuedOperator& op, double tau, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<Vector, Vector>> graph;
  for (int k = 0; k < 200; ++k) {
    const Vector t = gaussian(op.dimension, rng, 2.0);
    const Vector x = op.resolve(tau, t);
    graph.emplace_back(x, (t - x) / tau);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < graph.size(); ++i)
    for (std::size_t j = i + 1; j < graph.size(); ++j)
      worst = std::min(worst, (graph[i].first - graph[j].first).dot(graph[i].second - graph[j].second));
  CHECK(worst >= -1e-10);
}

}  // namespace

TEST_SUITE("operator_core") {
  TEST_CASE("soft_threshold examples") {
    CHECK(soft_threshold(vec({0, 0}), 0.5) == vec({0, 0}));
    CHECK(soft_threshold(vec({-0.3}), 0.5) == vec({0}));
    const Vector got = soft_threshold(vec({2.0}), 0.5);
    CHECK(std::abs(got[0] - verify::soft_threshold_oracle(vec({2.0}), 0.5)[0]) <= 1e-6);
    CHECK(got[0] == 1.5);
    CHECK_THROWS_AS(soft_threshold(vec({1.0}), -0.1), InvalidParameter);
  }

  TEST_CASE("soft_threshold matches the 1-D minimizer") {
    Rng rng(3);
    for (int k = 0; k < 200; ++k) {
      const Vector t = gaussian(5, rng, 2.0);
      const double kappa = std::abs(gaussian(1, rng)[0]);
      CHECK(near(soft_threshold(t, kappa), verify::soft_threshold_oracle(t, kappa), 1e-6));
    }
  }

  TEST_CASE("project_linf_ball examples") {
    CHECK(project_linf_ball(vec({0.5, -0.2}), 1.0) == vec({0.5, -0.2}));
    CHECK(project_linf_ball(vec({3, -2}), 1.0) == vec({1, -1}));
    Rng rng(4);
    for (int k = 0; k < 100; ++k) {
      const Vector g = gaussian(4, rng, 2.0);
      CHECK(near(project_linf_ball(g, 0.7), verify::linf_projection_oracle(g, 0.7), 1e-6));
    }
    CHECK_THROWS_AS(project_linf_ball(vec({NAN}), 1.0), InvalidParameter);
  }

  TEST_CASE("project_scaled_soc examples") {
    auto [l1, b1] = project_scaled_soc(3.0, vec({1, 0}), 2.0);
    CHECK(l1 == 3.0);
    CHECK(b1 == vec({1, 0}));

    auto [l2, b2] = project_scaled_soc(-4.0, vec({1, 0}), 2.0);
    CHECK(l2 == 0.0);
    CHECK(b2 == vec({0, 0}));

    auto [l3, b3] = project_scaled_soc(0.0, vec({1, 0}), 2.0);
    auto [lr, br] = verify::scaled_soc_projection_oracle(0.0, vec({1, 0}), 2.0);
    CHECK(l3 == doctest::Approx(lr).epsilon(1e-8));
    CHECK(near(b3, br, 1e-8));
    CHECK(b3.norm() <= l3 / 2.0 + 1e-15);

    CHECK_THROWS_AS(project_scaled_soc(1.0, vec({1}), 0.0), InvalidParameter);
  }

  TEST_CASE("project_scaled_soc output is feasible") {
    Rng rng(5);
    for (int k = 0; k < 500; ++k) {
      const Vector beta = gaussian(3, rng, 2.0);
      const double lambda = 2.0 * gaussian(1, rng)[0];
      const auto [l, b] = project_scaled_soc(lambda, beta, 2.0);
      CHECK(b.norm() <= l / 2.0 + 1e-12 * (1.0 + std::abs(l)));
    }
  }

  TEST_CASE("projections are idempotent and nonexpansive") {
    check_projection_properties([](const Vector& x) { return project_linf_ball(x, 1.0); }, 6, 11);
    check_projection_properties([](const Vector& x) { return soc_packed(x, 2.0); }, 5, 12);
    check_projection_properties([](const Vector& x) { return soc_packed(x, 0.5); }, 3, 13);
    const SetValuedOperator box = box_normal_cone(vec({-1, 0, -2}), vec({1, 0.5, 3}));
    check_projection_properties([&](const Vector& x) { return box.resolve(1.0, x); }, 3, 14);
  }

  TEST_CASE("resolvent graphs are monotone") {
    check_resolvent_monotone(l1_subdifferential(0.3, 4), 0.7, 21);
    check_resolvent_monotone(l1_subdifferential(1.0, 4), 2.0, 22);
    check_resolvent_monotone(normal_cone([](const Vector& x) { return soc_packed(x, 2.0); }, 4), 1.0, 23);
    check_resolvent_monotone(normal_cone([](const Vector& x) { return project_linf_ball(x, 1.0); }, 4), 0.1, 24);
    check_resolvent_monotone(zero_operator(3), 1.0, 25);
  }

  TEST_CASE("resolvent_of_normal_cone ignores tau") {
    const Projection proj = [](const Vector& x) { return project_linf_ball(x, 1.0); };
    const Vector t = vec({2.5, -0.3, -7});
    CHECK(resolvent_of_normal_cone(proj, 0.1, t) == resolvent_of_normal_cone(proj, 10.0, t));
    CHECK(resolvent_of_normal_cone(proj, 1.0, vec({0.2, -0.9})) == vec({0.2, -0.9}));
    CHECK(resolvent_of_normal_cone(proj, 1.0, t) == vec({1, -0.3, -1}));
  }

  TEST_CASE("product_resolvent") {
    const SetValuedOperator l1 = l1_subdifferential(0.4, 3);
    const Vector t = vec({1.0, -0.2, 0.7});
    const std::vector<SetValuedOperator> single{l1};
    CHECK(product_resolvent(single, 2.0, t) == l1.resolve(2.0, t));

    const std::vector<SetValuedOperator> identities{zero_operator(2), zero_operator(1)};
    CHECK(product_resolvent(identities, 1.0, t) == t);

    Rng rng(31);
    const SetValuedOperator soc = normal_cone([](const Vector& x) { return soc_packed(x, 2.0); }, 3);
    const std::vector<SetValuedOperator> mixed{soc, l1_subdifferential(0.5, 4)};
    for (int k = 0; k < 50; ++k) {
      const Vector u = gaussian(7, rng, 2.0);
      const Vector got = product_resolvent(mixed, 0.8, u);
      const auto [l, b] = verify::scaled_soc_projection_oracle(u[0], u.segment(1, 2), 2.0);
      CHECK(got[0] == doctest::Approx(l).epsilon(1e-8));
      CHECK(near(got.segment(1, 2), b, 1e-8));
      CHECK(near(got.tail(4), verify::soft_threshold_oracle(u.tail(4), 0.4), 1e-6));
    }
    CHECK_THROWS_AS(product_resolvent(mixed, 1.0, vec({1, 2})), ShapeError);
  }

  TEST_CASE("inverse_resolvent_via_moreau") {
    const Vector w = vec({0.3, -4.0, 2.5});
    const SetValuedOperator origin_cone = normal_cone([](const Vector& x) { return Vector::Zero(x.size()); }, 3);
    CHECK(near(inverse_resolvent_via_moreau(origin_cone, 0.7, w), w, 0.0));

    const SetValuedOperator abs1 = l1_subdifferential(1.0, 1);
    const Vector x = inverse_resolvent_via_moreau(abs1, 1.0, vec({2.0}));
    CHECK(x == vec({1.0}));
    // x in d|.|((w - x) / alpha): (w - x) = 1 > 0, so x must equal 1.
    CHECK((2.0 - x[0]) > 0.0);

    Rng rng(41);
    for (int k = 0; k < 100; ++k) {
      const double wk = 3.0 * gaussian(1, rng)[0];
      const double got = inverse_resolvent_via_moreau(abs1, 1.0, vec({wk}))[0];
      CHECK(got == doctest::Approx(verify::inverse_abs_resolvent_grid(wk, 1.0, -2.0, 2.0)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(inverse_resolvent_via_moreau(abs1, 0.0, vec({1.0})), InvalidParameter);
  }

  TEST_CASE("resolve validates its arguments") {
    const SetValuedOperator op = l1_subdifferential(1.0, 2);
    CHECK_THROWS_AS(op.resolve(0.0, vec({1, 2})), InvalidParameter);
    CHECK_THROWS_AS(op.resolve(1.0, vec({1, 2, 3})), ShapeError);
  }
}
