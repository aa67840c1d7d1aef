#include <benchmark/benchmark.h>

#include <memory>

#include "sps/baselines.hpp"
#include "sps/engine.hpp"
#include "sps/operator_core.hpp"
#include "sps/problems.hpp"
#include "sps/schedule.hpp"

namespace {

sps::DrslrProblem make_drslr(sps::Index rows, sps::Index features) {
  return sps::DrslrProblem(std::make_shared<const sps::SparseDataset>(sps::make_synthetic_dataset(rows, features, 0)),
                           {});
}

sps::Vector random_vector(sps::Index n, std::uint64_t seed) {
  sps::Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  sps::Vector v(n);
  for (sps::Index j = 0; j < n; ++j) v[j] = normal(rng);
  return v;
}

void BM_sps_iterate_drslr(benchmark::State& state) {
  const auto drslr = make_drslr(state.range(0), state.range(1));
  const sps::ProblemInstance problem = drslr.instance(sps::OracleMode::kMinibatch, 10, 0.0);
  const auto schedule = sps::StepSchedule::decay(1.0);
  sps::Rng rng(1);
  sps::ExtendedPoint p = sps::initial_point(problem, rng);
  std::int64_t k = 1;
  for (auto _ : state) {
    p = sps::sps_iterate(p, problem, schedule, k++, rng).next;
    benchmark::DoNotOptimize(p.z.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_sps_iterate_drslr)->Args({200, 20})->Args({2000, 50});

void BM_compact_step_drslr(benchmark::State& state) {
  const auto drslr = make_drslr(state.range(0), state.range(1));
  const sps::ProblemInstance problem = drslr.instance(sps::OracleMode::kMinibatch, 10, 0.0);
  sps::CompactSpsSolver solver(problem, sps::StepSchedule::decay(1.0), 1);
  std::int64_t k = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.step(k++));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_compact_step_drslr)->Args({200, 20})->Args({2000, 50});

void BM_tseng_iterate_drslr(benchmark::State& state) {
  const auto drslr = make_drslr(state.range(0), state.range(1));
  const sps::ProblemInstance problem = drslr.instance(sps::OracleMode::kExact, 10, 0.0);
  sps::Rng rng(1);
  sps::ProductPoint q = sps::initial_primal(problem.dimension * 3, rng);
  for (auto _ : state) {
    const sps::TsengStep step = sps::tseng_iterate(problem, q, {});
    q = step.q_next;
    benchmark::DoNotOptimize(q.data());
  }
}
BENCHMARK(BM_tseng_iterate_drslr)->Args({200, 20});

void BM_soft_threshold(benchmark::State& state) {
  const sps::Vector t = random_vector(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(sps::soft_threshold(t, 0.3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_soft_threshold)->Arg(1000)->Arg(100000);

void BM_project_scaled_soc(benchmark::State& state) {
  const sps::Vector beta = random_vector(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(sps::project_scaled_soc(0.5, beta, 2.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_project_scaled_soc)->Arg(1000)->Arg(100000);

void BM_drslr_full_field(benchmark::State& state) {
  const auto drslr = make_drslr(state.range(0), state.range(1));
  const sps::Vector z = random_vector(drslr.dimension(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(drslr.full_field(z));
}
BENCHMARK(BM_drslr_full_field)->Args({200, 20})->Args({2000, 50});

}  // namespace

BENCHMARK_MAIN();
