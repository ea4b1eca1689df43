#include "debias/quantization.hpp"

#include <cmath>

namespace debias {

double quantize(double value, QuantizationSpec spec) {
  spec.validate();
  if (value < 0.0) value = 0.0;
  if (value > 1.0) value = 1.0;
  // floor(x + 0.5) rather than round(): midpoints must go up, and
  // round() takes half-away-from-zero which is the same on [0,1], but
  // floor keeps the rule explicit.
  const double scaled = value * (spec.levels - 1);
  int i = static_cast<int>(std::floor(scaled + 0.5));
  if (i > spec.levels - 1) i = spec.levels - 1;
  return spec.level(i);
}

std::vector<double> noisy_observed_values(
    const RatingMatrix& R, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& observed,
    NoiseConfig noise, std::mt19937_64& stream) {
  noise.validate();
  std::vector<double> values;
  values.reserve(observed.size());
  std::normal_distribution<double> gauss(0.0, noise.noise_std > 0 ? noise.noise_std : 1.0);
  for (const auto& [u, i] : observed) {
    double v = R.values(u, i);
    if (noise.noise_std > 0) v += gauss(stream);
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    values.push_back(v);
  }
  return values;
}

ObservedDataset quantize_trace(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& observed,
                               const std::vector<double>& continuous_values,
                               std::size_t num_users, std::size_t num_items,
                               QuantizationSpec spec) {
  if (observed.size() != continuous_values.size())
    throw std::invalid_argument("quantize_trace: trace length mismatch");
  ObservedDataset d;
  d.num_users = num_users;
  d.num_items = num_items;
  d.quantization = spec;
  d.entries.reserve(observed.size());
  for (std::size_t j = 0; j < observed.size(); ++j)
    d.entries.push_back({observed[j].first, observed[j].second,
                         quantize(continuous_values[j], spec)});
  return d;
}

ObservedDataset build_observed_dataset(
    const RatingMatrix& R, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& observed,
    QuantizationSpec spec, NoiseConfig noise, std::mt19937_64& stream) {
  const auto values = noisy_observed_values(R, observed, noise, stream);
  return quantize_trace(observed, values, R.num_users, R.num_items, spec);
}

}  // namespace debias
