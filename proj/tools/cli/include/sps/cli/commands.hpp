#pragma once

// Experiment harness behind the `sps` executable.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "sps/data_io.hpp"
#include "sps/problem_instance.hpp"
#include "sps/problems.hpp"
#include "sps/trace.hpp"
#include "sps/verify/checks.hpp"

namespace sps::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // I/O errors and failed checks
  kExitUsage = 2,
  kExitDivergence = 3,
};

struct BuiltProblem {
  ProblemInstance instance;
  std::shared_ptr<const DrslrProblem> drslr;  // null for the bilinear game
};

// Builds the problem named by `config`. A non-positive config.lipschitz is
// replaced by the value actually used, so the manifest records it.
BuiltProblem build_problem(RunConfig& config);

// sps, sps-decay, sps-fixed and dseg depend on the seed; ps, tseng and frb do not.
bool is_stochastic(const std::string& solver);

// One run of `solver`; throws RunDivergence on divergence.
RunResult run_solver(const ProblemInstance& problem, const RunConfig& config, const std::string& solver,
                     std::uint64_t seed);

// Manifest path used when none is given: "<out_path>.manifest.json".
std::string default_manifest_path(const std::string& out_path);

int cmd_solve(RunConfig config, std::ostream& out, std::ostream& err);
int cmd_compare(RunConfig config, std::ostream& out, std::ostream& err);
// Runs the verification suite (quick subset unless `full`), one line per check.
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err, bool full = false,
              const verify::ProxImplementations& impls = {});

// Parses argv (argv[0] is the program name) and dispatches.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sps::cli
