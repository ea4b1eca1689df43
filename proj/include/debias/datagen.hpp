#pragma once

#include "debias/recommenders.hpp"
#include "debias/types.hpp"

#include <filesystem>
#include <random>
#include <vector>

namespace debias {

struct LatentFactorsConfig {
  std::size_t num_users = 1000;
  std::size_t num_items = 1000;
  int latent_dim = 4;
  double factor_std = 0.7;
  double bias_std = 0.5;
  double global_mean = 0.5;
  // Normalization to [0,1] clamps at this lower/upper quantile before the
  // affine map; 0 means plain min-max. Min-max over a large Gaussian-sum
  // matrix is outlier-driven and collapses the spread, so the default keeps
  // 5% rails at each end.
  double clip_quantile = 0.05;

  void validate() const {
    if (num_users < 1 || num_items < 1)
      throw std::invalid_argument("LatentFactorsConfig: dimensions must be >= 1");
    if (latent_dim < 1) throw std::invalid_argument("LatentFactorsConfig: latent_dim must be >= 1");
    if (factor_std < 0 || bias_std < 0)
      throw std::invalid_argument("LatentFactorsConfig: stds must be >= 0");
    if (clip_quantile < 0 || clip_quantile >= 0.5)
      throw std::invalid_argument("LatentFactorsConfig: clip_quantile must be in [0, 0.5)");
  }
};

// Pre-normalization matrix mean + b_u + b_i + p_u . q_i with Gaussian factors
// (per-coordinate std factor_std/sqrt(d)) and biases. Rank <= d + 3.
Matrix latent_factors_raw(const LatentFactorsConfig& config, std::mt19937_64& stream);

// Raw matrix normalized to [0,1] (quantile clamp + affine; constant matrices
// map to all 0.5).
RatingMatrix generate_latent_factors(const LatentFactorsConfig& config, std::mt19937_64& stream);

struct SparseRatings {
  struct Triple {
    std::uint32_t user = 0;  // 0-based
    std::uint32_t item = 0;
    int stars = 0;  // 1..5
  };
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::vector<Triple> triples;
};

// Classic MovieLens-100K layout: tab-separated user, item, rating, timestamp;
// 1-based ids; star ratings 1..5. Dimensions come from the max ids seen.
SparseRatings load_ml100k(const std::filesystem::path& path);

// Stars mapped to [0,1] via (r-1)/4, plain MF trained on the triples (sorted
// first so file order never matters), dense prediction clamped to [0,1].
RatingMatrix impute_dense(const SparseRatings& ratings, const TrainConfig& config,
                          std::mt19937_64& stream);

inline TrainConfig default_impute_config() {
  TrainConfig c;
  c.latent_dim = 16;
  c.epochs = 128;
  return c;
}

// Synthetic sparse star-rating dataset in the MovieLens layout: a clamped
// low-rank-plus-bias unit surface stretched to the 1..5 star span, per-cell
// Gaussian noise, then value-tilted sampling without replacement of exactly
// `count` distinct pairs (higher ratings more likely to be kept). Stands in
// for the real archive in tests and demos. The wide clip_quantile leaves
// saturated users/items at both ends of the scale, so a dense imputation of
// the output inherits rails that a plain low-rank fit cannot express.
struct StarSynthConfig {
  std::size_t num_users = 944;
  std::size_t num_items = 1683;
  std::size_t count = 100000;
  int latent_dim = 4;
  double factor_std = 0.7;
  double bias_std = 0.5;
  double clip_quantile = 0.12;
  double noise_std = 0.4;    // stars
  double select_tilt = 0.3;  // exponent per star on the keep probability
};

SparseRatings synthesize_star_ratings(const StarSynthConfig& config, std::mt19937_64& stream);

void write_ml100k_file(const std::filesystem::path& path, const SparseRatings& ratings);

}  // namespace debias
