#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace debias {

using Matrix = Eigen::MatrixXd;

// Dense ground-truth ratings on the unit scale, users by items.
struct RatingMatrix {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  Matrix values;

  void validate() const {
    if (num_users < 1 || num_items < 1)
      throw std::invalid_argument("RatingMatrix: dimensions must be >= 1");
    if (values.rows() != static_cast<Eigen::Index>(num_users) ||
        values.cols() != static_cast<Eigen::Index>(num_items))
      throw std::invalid_argument("RatingMatrix: shape mismatch");
    if (!values.allFinite())
      throw std::invalid_argument("RatingMatrix: non-finite entry");
    if ((values.array() < 0.0).any() || (values.array() > 1.0).any())
      throw std::invalid_argument("RatingMatrix: entry outside [0,1]");
  }
};

// n admissible values evenly spaced over [0,1] inclusive.
struct QuantizationSpec {
  int levels = 5;

  double level(int i) const { return static_cast<double>(i) / (levels - 1); }

  int level_index(double value) const {
    int i = static_cast<int>(value * (levels - 1) + 0.5);
    if (i < 0) i = 0;
    if (i > levels - 1) i = levels - 1;
    return i;
  }

  void validate() const {
    if (levels < 2) throw std::invalid_argument("QuantizationSpec: levels must be >= 2");
  }
};

struct ObservedEntry {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  double value = 0.0;
};

// Sparse (user, item, value) triples drawn from one rating matrix.
// Values normally live on the quantization grid; mixed datasets built with
// the conditional-mean upscale scheme may carry off-grid values, so grid
// membership is checked by validate() callers only where it is a real
// precondition.
struct ObservedDataset {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::vector<ObservedEntry> entries;
  QuantizationSpec quantization;

  std::size_t size() const { return entries.size(); }

  void validate_on_grid() const {
    quantization.validate();
    for (const auto& e : entries) {
      if (e.user >= num_users || e.item >= num_items)
        throw std::invalid_argument("ObservedDataset: index out of range");
      const double snapped = quantization.level(quantization.level_index(e.value));
      if (snapped != e.value)
        throw std::invalid_argument("ObservedDataset: value off the quantization grid");
    }
  }
};

struct MetricReport {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t num_entries = 0;
};

struct SeedSpec {
  std::uint64_t master_seed = 0;
};

}  // namespace debias
