#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sps/errors.hpp"
#include "sps/operator_core.hpp"

namespace sps {

struct TraceRecord {
  std::string solver;
  std::uint64_t seed = 0;
  std::int64_t iteration = 0;
  double wall_time_s = 0.0;
  double residual_R = 0.0;
  std::optional<double> residual_O;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct RunOptions {
  std::int64_t iterations = 1;
  std::uint64_t seed = 0;
  // Residuals need a full deterministic pass over B, so they are only formed
  // at k = 1, every trace_every iterations after that, and at the last k.
  std::int64_t trace_every = 10;
  std::string label = "sps";
};

struct RunResult {
  std::vector<TraceRecord> trace;
  Vector final_z;
  // Dual iterates for the projective-splitting solvers, empty otherwise.
  std::vector<Vector> final_w;
};

// Divergence during a run, with everything recorded before it happened.
class RunDivergence : public DivergenceError {
 public:
  RunDivergence(const DivergenceError& cause, std::vector<TraceRecord> partial)
      : DivergenceError(cause.last_finite_iteration(), cause.what()), trace_(std::move(partial)) {}

  const std::vector<TraceRecord>& trace() const noexcept { return trace_; }

 private:
  std::vector<TraceRecord> trace_;
};

inline constexpr double kDivergenceNorm = 1e12;

inline bool is_trace_point(std::int64_t k, std::int64_t trace_every, std::int64_t iterations) {
  return k == iterations || (k - 1) % trace_every == 0;
}

void validate(const RunOptions& opts);

// Accumulates solver time only; diagnostics run between pause() and resume().
class SolverClock {
 public:
  void resume() { start_ = std::chrono::steady_clock::now(); }
  void pause() { elapsed_ += std::chrono::steady_clock::now() - start_; }
  double seconds() const { return std::chrono::duration<double>(elapsed_).count(); }

 private:
  std::chrono::steady_clock::time_point start_{};
  std::chrono::steady_clock::duration elapsed_{};
};

// z^1 ~ N(0, I / dimension), drawn from the run's rng before any oracle call.
Vector initial_primal(Index dimension, Rng& rng);

}  // namespace sps
