#include "sps/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "sps/baselines.hpp"
#include "sps/engine.hpp"
#include "sps/errors.hpp"
#include "sps/schedule.hpp"

namespace sps::cli {

namespace {

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

StepSchedule schedule_for(const RunConfig& config, const std::string& kind, double lipschitz) {
  if (kind == "fixed") return StepSchedule::fixed(config.c_f, config.iterations, lipschitz, config.tau);
  return StepSchedule::decay(config.c_d, StepSchedule::kDefaultAlphaExponent, StepSchedule::kDefaultRhoExponent,
                             config.tau);
}

void write_outputs(const RunConfig& config, std::vector<TraceRecord> traces) {
  if (!config.record_wall_time) {
    for (auto& t : traces) t.wall_time_s = 0.0;
  }
  {
    std::ofstream csv(config.out_path, std::ios::binary);
    if (!csv) throw IoError("cannot open '" + config.out_path + "' for writing");
    write_trace_csv(traces, csv);
  }
  std::ofstream manifest(config.manifest_path, std::ios::binary);
  if (!manifest) throw IoError("cannot open '" + config.manifest_path + "' for writing");
  write_manifest(config, manifest);
}

struct Job {
  std::string solver;
  std::uint64_t seed;
};

std::vector<Job> plan(const RunConfig& config) {
  std::vector<Job> jobs;
  for (const auto& solver : config.solvers) {
    if (is_stochastic(solver)) {
      for (const auto seed : config.seeds) jobs.push_back({solver, seed});
    } else {
      jobs.push_back({solver, config.seeds.front()});
    }
  }
  return jobs;
}

// Runs every job in order; on divergence the partial trace is persisted.
int execute(RunConfig& config, std::ostream& out, std::ostream& err) {
  validate(config);
  if (config.manifest_path.empty()) config.manifest_path = default_manifest_path(config.out_path);
  const BuiltProblem built = build_problem(config);

  std::vector<TraceRecord> traces;
  for (const auto& job : plan(config)) {
    try {
      RunResult run = run_solver(built.instance, config, job.solver, job.seed);
      const TraceRecord& last = run.trace.back();
      out << job.solver << " seed " << job.seed << ": iterations " << last.iteration << ", final R "
          << brief(last.residual_R) << ", solver time " << brief(last.wall_time_s) << " s\n";
      traces.insert(traces.end(), run.trace.begin(), run.trace.end());
    } catch (const RunDivergence& e) {
      traces.insert(traces.end(), e.trace().begin(), e.trace().end());
      write_outputs(config, std::move(traces));
      err << "error: " << job.solver << " seed " << job.seed << " diverged after iteration "
          << e.last_finite_iteration() << ": " << e.what() << "\npartial trace written to " << config.out_path
          << '\n';
      return kExitDivergence;
    }
  }
  write_outputs(config, std::move(traces));
  out << "trace written to " << config.out_path << ", manifest to " << config.manifest_path << '\n';
  return kExitOk;
}

}  // namespace

BuiltProblem build_problem(RunConfig& config) {
  BuiltProblem built;
  if (config.problem == "bilinear") {
    const Index d = config.bilinear_dim;
    built.instance = make_bilinear_game(d, d, config.bilinear_scale, config.noise_sigma);
    if (config.lipschitz > 0.0) built.instance.field.lipschitz_bound = config.lipschitz;
    config.lipschitz = built.instance.field.lipschitz_bound;
    return built;
  }

  auto data = config.data_path.empty()
                  ? std::make_shared<const SparseDataset>(make_synthetic_dataset(
                        config.synthetic_rows, config.synthetic_features, config.synthetic_seed))
                  : std::make_shared<const SparseDataset>(load_libsvm(config.data_path));
  if (config.oracle == "minibatch" && config.batch > data->num_rows()) {
    throw ValidationError("run config field 'batch': exceeds the number of samples (" +
                          std::to_string(data->num_rows()) + ")");
  }
  built.drslr = std::make_shared<const DrslrProblem>(data, DrslrProblem::Params{config.delta, config.kappa, config.c});
  if (config.lipschitz <= 0.0) config.lipschitz = built.drslr->lipschitz_bound();
  const OracleMode mode = config.oracle == "exact" ? OracleMode::kExact : OracleMode::kMinibatch;
  built.instance = built.drslr->instance(mode, config.batch, config.lipschitz);
  return built;
}

bool is_stochastic(const std::string& solver) {
  return solver == "sps" || solver == "sps-decay" || solver == "sps-fixed" || solver == "dseg";
}

RunResult run_solver(const ProblemInstance& problem, const RunConfig& config, const std::string& solver,
                     std::uint64_t seed) {
  RunOptions opts;
  opts.iterations = config.iterations;
  opts.seed = seed;
  opts.trace_every = config.trace_every;
  opts.label = solver;
  const double L = problem.field.lipschitz_bound;
  const LinesearchParams ls{config.ls_alpha0, config.ls_theta, config.ls_shrink};

  if (solver == "sps") return run_sps(problem, schedule_for(config, config.schedule, L), opts);
  if (solver == "sps-decay") return run_sps(problem, schedule_for(config, "decay", L), opts);
  if (solver == "sps-fixed") return run_sps(problem, schedule_for(config, "fixed", L), opts);
  if (solver == "dseg") return dseg_run(problem, schedule_for(config, config.schedule, L), opts);
  if (solver == "ps") return run_deterministic_ps(problem, 0.0, config.tau, opts);
  if (solver == "tseng") return run_tseng(problem, ls, opts);
  if (solver == "frb") return run_frb(problem, ls, opts);
  throw ValidationError("run config field 'solvers': unknown solver '" + solver + "'");
}

std::string default_manifest_path(const std::string& out_path) { return out_path + ".manifest.json"; }

int cmd_solve(RunConfig config, std::ostream& out, std::ostream& err) {
  config.subcommand = "solve";
  return execute(config, out, err);
}

int cmd_compare(RunConfig config, std::ostream& out, std::ostream& err) {
  config.subcommand = "compare";
  return execute(config, out, err);
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err, bool full,
              const verify::ProxImplementations& impls) {
  validate(config);
  std::vector<verify::CheckResult> results;
  if (full) {
    results = verify::run_full_suite().results;
  } else {
    results = verify::run_quick_suite(impls);
  }
  std::vector<std::string> failed;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << brief(r.seconds) << " s): " << r.detail
        << '\n';
    if (!r.passed) failed.push_back(r.name);
  }
  if (failed.empty()) {
    out << "all " << results.size() << " checks passed\n";
    return kExitOk;
  }
  err << "failed checks:";
  for (const auto& name : failed) err << ' ' << name;
  err << '\n';
  return kExitFailure;
}

}  // namespace sps::cli
