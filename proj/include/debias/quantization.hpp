#pragma once

#include "debias/types.hpp"

#include <random>
#include <utility>
#include <vector>

namespace debias {

struct NoiseConfig {
  double noise_std = 0.05;  // Gaussian, applied before quantization

  void validate() const {
    if (noise_std < 0) throw std::invalid_argument("NoiseConfig: noise_std must be >= 0");
  }
};

// Nearest level i/(n-1); values outside [0,1] are clamped first; exact
// midpoints round up to the higher level.
double quantize(double value, QuantizationSpec spec);

// Continuous pre-quantization values for the observed cells: truth plus
// Gaussian noise, clamped to [0,1]. Drawing this once and quantizing per spec
// keeps quantization variants of one trial on identical source values.
std::vector<double> noisy_observed_values(
    const RatingMatrix& R, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& observed,
    NoiseConfig noise, std::mt19937_64& stream);

ObservedDataset quantize_trace(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& observed,
                               const std::vector<double>& continuous_values,
                               std::size_t num_users, std::size_t num_items,
                               QuantizationSpec spec);

ObservedDataset build_observed_dataset(
    const RatingMatrix& R, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& observed,
    QuantizationSpec spec, NoiseConfig noise, std::mt19937_64& stream);

}  // namespace debias
