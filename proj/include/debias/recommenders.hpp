#pragma once

#include "debias/types.hpp"

#include <random>
#include <string>
#include <vector>

namespace debias {

struct FactorModel {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  Matrix V;              // num_users x d
  Matrix W;              // num_items x d
  Eigen::VectorXd bu;    // user offsets
  Eigen::VectorXd bi;    // item offsets
  double mu = 0.0;       // global offset

  double predict_one(std::uint32_t u, std::uint32_t i) const {
    return V.row(u).dot(W.row(i)) + bu(u) + bi(i) + mu;
  }
};

struct TrainConfig {
  int latent_dim = 10;
  double learning_rate = 0.5;
  int epochs = 256;
  double offset_reg = 1e-6;   // weight on ||bu||^2 + ||bi||^2 + mu^2
  double factor_reg = 0.0;    // weight on ||V||^2 + ||W||^2
  double init_scale = 0.1;
  int batch_size = 1024;

  void validate() const {
    if (latent_dim < 1) throw std::invalid_argument("TrainConfig: latent_dim must be >= 1");
    if (learning_rate <= 0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (offset_reg < 0) throw std::invalid_argument("TrainConfig: offset_reg must be >= 0");
    if (epochs < 0 || batch_size < 1) throw std::invalid_argument("TrainConfig: bad optimizer params");
  }
};

// Mean inverse-propensity-weighted squared error plus offset and factor
// penalties:
//   (1/N) sum (y - pred)^2 / P  +  offset_reg*(||bu||^2+||bi||^2+mu^2)
//                              +  factor_reg*(||V||^2+||W||^2)
double ips_objective(const FactorModel& model, const ObservedDataset& D,
                     const std::vector<double>& propensities, double offset_reg,
                     double factor_reg);

// Analytic gradient of ips_objective in one flat vector, laid out as
// [V row-major, W row-major, bu, bi, mu]. Used by finite-difference checks.
std::vector<double> ips_gradient(const FactorModel& model, const ObservedDataset& D,
                                 const std::vector<double>& propensities, double offset_reg,
                                 double factor_reg);

// Mini-batch gradient descent on ips_objective for the fixed epoch budget.
// Weights are rescaled internally by their mean (with offset_reg rescaled to
// match), which multiplies the objective by a constant and leaves the argmin
// unchanged while keeping step sizes comparable across weight scales.
// Throws (message contains "diverged" and the epoch) on non-finite loss.
FactorModel train_ips_mf(const ObservedDataset& D, const std::vector<double>& propensities,
                         const TrainConfig& config, std::mt19937_64& stream);

// Dense predictions clamped to [0,1].
Matrix predict_matrix(const FactorModel& model);

struct KnnConfig {
  enum class Mode { user, item };
  Mode mode = Mode::user;
  int k = 40;
  int min_co_ratings = 3;  // pairs with fewer co-rated entries get similarity 0

  void validate() const {
    if (k < 1) throw std::invalid_argument("KnnConfig: k must be >= 1");
    if (min_co_ratings < 1) throw std::invalid_argument("KnnConfig: min_co_ratings must be >= 1");
  }
};

// Neighborhood prediction with cosine similarity restricted to co-rated
// entries. Prediction = similarity-weighted mean of the k most similar raters
// of the target column; falls back to the plain mean of those raters, then
// the target row's own mean, then the global mean.
Matrix train_predict_knn(const ObservedDataset& D, const KnnConfig& config);

enum class MixScheme { endpoint, cond_mean };

// Union of D with upscaled aux entries at positions not already in D.
// endpoint: aux values kept as the 0/1 endpoints. cond_mean: aux value b is
// replaced by the mean of D values that binarize to b (off-grid values).
ObservedDataset mix_datasets(const ObservedDataset& D, const ObservedDataset& aux,
                             MixScheme scheme);

}  // namespace debias
