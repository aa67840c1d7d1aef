#include "sps/trace.hpp"

#include <cmath>

namespace sps {

void validate(const RunOptions& opts) {
  if (opts.iterations < 1) throw InvalidParameter("iterations must be >= 1");
  if (opts.trace_every < 1) throw InvalidParameter("trace-every must be >= 1");
}

Vector initial_primal(Index dimension, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dimension));
  Vector z(dimension);
  for (Index j = 0; j < dimension; ++j) z[j] = scale * normal(rng);
  return z;
}

}  // namespace sps
