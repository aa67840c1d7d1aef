#include "sps/dataset.hpp"

#include <algorithm>
#include <random>

#include "sps/errors.hpp"

namespace sps {

void SparseDataset::push_row(double label, std::span<const Index> idx, std::span<const double> val) {
  if (idx.size() != val.size()) throw ShapeError("row index/value length mismatch");
  if (label != 1.0 && label != -1.0) throw InvalidParameter("labels must be -1 or +1");
  for (std::size_t e = 0; e < idx.size(); ++e) {
    if (idx[e] < 0 || (e > 0 && idx[e] <= idx[e - 1])) {
      throw InvalidParameter("row indices must be nonnegative and strictly increasing");
    }
  }
  indices.insert(indices.end(), idx.begin(), idx.end());
  values.insert(values.end(), val.begin(), val.end());
  row_offsets.push_back(indices.size());
  labels.push_back(label);
  if (!idx.empty()) num_features = std::max(num_features, idx.back() + 1);
}

SparseDataset make_synthetic_dataset(Index rows, Index features, std::uint64_t seed, double density,
                                     double label_noise) {
  if (rows < 1 || features < 1) throw InvalidParameter("synthetic dataset needs rows, features >= 1");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidParameter("density must lie in (0, 1]");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector truth(features);
  for (Index j = 0; j < features; ++j) truth[j] = normal(rng);

  SparseDataset data;
  std::vector<Index> idx;
  std::vector<double> val;
  for (Index i = 0; i < rows; ++i) {
    idx.clear();
    val.clear();
    double margin = 0.0;
    for (Index j = 0; j < features; ++j) {
      if (density < 1.0 && unit(rng) >= density) continue;
      const double v = normal(rng);
      idx.push_back(j);
      val.push_back(v);
      margin += v * truth[j];
    }
    double label = margin >= 0.0 ? 1.0 : -1.0;
    if (unit(rng) < label_noise) label = -label;
    data.push_row(label, idx, val);
  }
  data.num_features = features;
  return data;
}

}  // namespace sps
