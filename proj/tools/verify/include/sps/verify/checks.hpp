#pragma once

// Programmatic verification suite. Every check returns a named pass/fail
// verdict with a one-line detail and its runtime.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sps/operator_core.hpp"
#include "sps/trace.hpp"

namespace sps::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Implementations under test, replaceable so a harness can inject faults.
struct ProxImplementations {
  std::function<Vector(const Vector&, double)> soft_threshold = sps::soft_threshold;
  std::function<Vector(const Vector&, double)> project_linf_ball = sps::project_linf_ball;
  std::function<std::pair<double, Vector>(double, const Vector&, double)> project_scaled_soc =
      sps::project_scaled_soc;
};

// soft_threshold, project_linf_ball and project_scaled_soc against the
// brute-force oracles on `inputs` random inputs, max error <= tolerance.
CheckResult check_prox_oracles(int inputs = 500, std::uint64_t seed = 0, double tolerance = 1e-6,
                               const ProxImplementations& impls = {});

// J_{alpha (c d|.|)^{-1}} from the Moreau identity against the grid oracle.
CheckResult check_moreau_inverse(int inputs = 200, std::uint64_t seed = 0, double tolerance = 1e-6);

// O at a known solution point <= 1e-18, O at 100 perturbations >= 1e-8.
CheckResult check_lemma1(std::uint64_t seed = 0);

// Average of the minibatch oracle over every ordered batch draw (m = 5,
// batch sizes 1..3) against the full field, relative error <= 1e-14.
CheckResult check_unbiasedness(std::uint64_t seed = 0);

// SPS with n = 0 and the standalone DSEG runner give bit-identical iterates
// for 100 steps on a noisy bilinear game.
CheckResult check_dseg_equivalence(std::uint64_t seed = 0);

// Iterates traced by SPS runs, tagged with n, for the R <= 2n O check.
struct TracedRun {
  std::string label;
  std::size_t num_operators = 0;
  std::vector<TraceRecord> trace;
};

struct SuiteOutcome {
  std::vector<CheckResult> results;
  std::vector<TracedRun> traced_runs;
};

// After 10^4 minibatch SPS iterations on DRSLR (m = 100, d = 20):
// ||sum w_i|| <= 1e-8 (1 + max ||w_i||).
CheckResult check_subspace_invariance(std::vector<TracedRun>* traced = nullptr, std::uint64_t seed = 0);

// Exact oracle, rho_k <= 0.9 / L, k <= 10^4 on the known-solution game:
// phi_k(p^k) >= -1e-12 and phi_k(p*) <= 1e-12.
CheckResult check_zero_noise_separation(std::vector<TracedRun>* traced = nullptr, std::uint64_t seed = 0);

// run_sps_compact against run_sps on DRSLR (m = 100, d = 20, n = 2), 10^3 iterations.
CheckResult check_compact_equivalence(std::vector<TracedRun>* traced = nullptr, std::uint64_t seed = 0);

// SPS-decay, SPS-fixed, deterministic PS, Tseng and FRB on DRSLR (m = 50,
// d = 10): one result for R <= 1e-5 for every method and one for pairwise
// final-z distances <= 1e-4. The detail of the second also reports the
// distances restricted to the (lambda, beta) block.
std::vector<CheckResult> check_convergence(std::vector<TracedRun>* traced = nullptr, std::uint64_t seed = 0);

// Fixed schedule on the noisy 2-D bilinear game (sigma = 0.1): the running
// average of O over K iterations, averaged over 20 seeds, strictly decreases
// across K in {10^2, 10^3, 10^4}.
CheckResult check_rate_trend(std::uint64_t seed = 0);

// R <= 2n O (relative tolerance 1e-10) at every traced iterate of runs with n >= 1.
CheckResult check_residual_relation(const std::vector<TracedRun>& runs);

// GDA grows on the 2-D bilinear game; SPS-decay shrinks ||z|| below 1e-2 ||z^1||.
CheckResult check_gda_contrast(std::uint64_t seed = 0);

// The quick subset used by `sps bench`.
std::vector<CheckResult> run_quick_suite(const ProxImplementations& impls = {});

// Every check, in the order of the acceptance report.
SuiteOutcome run_full_suite();

}  // namespace sps::verify
