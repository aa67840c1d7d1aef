#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sps/operator_core.hpp"

namespace sps {

// Row-compressed sparse design with labels in {-1, +1}. Column indices are
// 0-based and strictly increasing within a row.
struct SparseDataset {
  std::vector<std::size_t> row_offsets{0};  // size num_rows() + 1
  std::vector<Index> indices;
  std::vector<double> values;
  std::vector<double> labels;
  Index num_features = 0;

  Index num_rows() const noexcept { return static_cast<Index>(labels.size()); }

  std::span<const Index> row_indices(Index i) const {
    return {indices.data() + row_offsets[i], row_offsets[i + 1] - row_offsets[i]};
  }
  std::span<const double> row_values(Index i) const {
    return {values.data() + row_offsets[i], row_offsets[i + 1] - row_offsets[i]};
  }

  // <x_i, v> for a dense v of length num_features.
  template <typename Dense>
  double row_dot(Index i, const Dense& v) const {
    double acc = 0.0;
    for (std::size_t e = row_offsets[i]; e < row_offsets[i + 1]; ++e) acc += values[e] * v[indices[e]];
    return acc;
  }

  // out += scale * x_i
  template <typename Dense>
  void add_row(Index i, double scale, Dense&& out) const {
    for (std::size_t e = row_offsets[i]; e < row_offsets[i + 1]; ++e) out[indices[e]] += scale * values[e];
  }

  // Appends a row; entries must already be 0-based and ascending.
  void push_row(double label, std::span<const Index> idx, std::span<const double> val);

  friend bool operator==(const SparseDataset&, const SparseDataset&) = default;
};

// Gaussian features (density in (0, 1]) and labels from a random linear model
// with flipped signs at rate `label_noise`.
SparseDataset make_synthetic_dataset(Index rows, Index features, std::uint64_t seed, double density = 1.0,
                                     double label_noise = 0.1);

}  // namespace sps
