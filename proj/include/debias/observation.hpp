#pragma once

#include "debias/types.hpp"

#include <random>
#include <utility>
#include <vector>

namespace debias {

enum class SoftmaxAxis { global, per_user };

struct ObservationModelParams {
  double beta = 1.0;
  double target_fraction = 0.1;  // expected share of observed cells
  // Multiplies the softmax exponent: p ~ softmax(beta * exponent_scale * R).
  // 1.0 keeps the exponent on the unit rating scale; experiment harnesses set
  // it to the span of the underlying star scale.
  double exponent_scale = 1.0;
  SoftmaxAxis axis = SoftmaxAxis::global;

  void validate() const {
    if (beta < 0) throw std::invalid_argument("ObservationModelParams: beta must be >= 0");
    if (!(target_fraction > 0.0 && target_fraction <= 1.0))
      throw std::invalid_argument("ObservationModelParams: target_fraction must be in (0,1]");
    if (exponent_scale <= 0)
      throw std::invalid_argument("ObservationModelParams: exponent_scale must be > 0");
  }
};

struct ObservationProbabilities {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  Matrix p;                        // per-cell Bernoulli probability, clamped to [0,1]
  double k = 0.0;                  // softmax multiplier before clamping
  double effective_fraction = 0.0; // sum(p) / (U*I); < target once clamping engages
};

// p = min(1, k * softmax(beta * scale * R)), softmax over all cells jointly
// (or per user row when axis == per_user, with k = target_fraction * I).
ObservationProbabilities observation_probabilities(const RatingMatrix& R,
                                                   const ObservationModelParams& params);

// Independent Bernoulli draw per cell, row-major order. Returns observed
// (user, item) pairs.
std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_observations(
    const ObservationProbabilities& probs, std::mt19937_64& stream);

}  // namespace debias
