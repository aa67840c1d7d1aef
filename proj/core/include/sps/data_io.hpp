#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sps/dataset.hpp"
#include "sps/trace.hpp"

namespace sps {

// LIBSVM text: one sample per line, `<label> <idx>:<val> ...`, indices 1-based
// and strictly increasing. Labels 0/-1 map to -1 and 1/+1 to +1. Blank lines
// are skipped. Throws ParseError with the 1-based line number.
SparseDataset parse_libsvm(std::istream& in);
SparseDataset load_libsvm(const std::string& path);

// Inverse of parse_libsvm (labels written as 1 / -1, values with 17 digits).
void write_libsvm(const SparseDataset& data, std::ostream& out);

inline constexpr const char* kTraceHeader = "solver,seed,iteration,wall_time_s,residual_R,residual_O";

// Header line plus one row per record; residual_O is empty when absent.
// Reals use 17 significant digits so they read back bit-exactly.
void write_trace_csv(std::span<const TraceRecord> traces, std::ostream& out);
std::vector<TraceRecord> read_trace_csv(std::istream& in);

// Shortest-round-trip-safe formatting shared by the writers.
std::string format_real(double value);

// Everything needed to re-run an experiment.
struct RunConfig {
  std::string subcommand = "solve";  // solve | compare | bench
  std::vector<std::string> solvers{"sps"};
  std::string problem = "drslr";  // drslr | bilinear

  // DRSLR source: a LIBSVM file, or a synthetic dataset when data_path is empty.
  std::string data_path;
  std::int64_t synthetic_rows = 200;
  std::int64_t synthetic_features = 20;
  std::uint64_t synthetic_seed = 0;

  // Bilinear game.
  std::int64_t bilinear_dim = 1;  // d_x = d_y
  double bilinear_scale = 1.0;
  double noise_sigma = 0.0;

  double delta = 1.0;
  double kappa = 1.0;
  double c = 1e-3;

  std::string schedule = "decay";  // decay | fixed
  double c_d = 1.0;
  double c_f = 1.0;
  double tau = 1.0;
  std::string oracle = "minibatch";  // minibatch | exact
  std::int64_t batch = 100;
  // <= 0 means "estimate"; the estimate is written back before the manifest.
  double lipschitz = 0.0;

  double ls_alpha0 = 1.0;
  double ls_theta = 0.8;
  double ls_shrink = 0.7;

  std::int64_t iterations = 1000;
  std::int64_t trace_every = 10;
  std::vector<std::uint64_t> seeds{0};
  // Off writes 0 in the wall_time_s column, making the CSV byte-reproducible.
  bool record_wall_time = true;

  std::string out_path = "trace.csv";
  std::string manifest_path;
};

// Throws ValidationError naming the first offending field. `solve` takes exactly
// one solver, `compare` at least two, and `dseg` needs the bilinear problem.
void validate(const RunConfig& config);

// JSON manifest with every field written explicitly.
void write_manifest(const RunConfig& config, std::ostream& out);
// Requires every field; throws ValidationError otherwise.
RunConfig read_manifest(std::istream& in);

}  // namespace sps
