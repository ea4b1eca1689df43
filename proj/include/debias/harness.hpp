#pragma once

#include "debias/observation.hpp"
#include "debias/propensity.hpp"
#include "debias/quantization.hpp"
#include "debias/recommenders.hpp"
#include "debias/rng.hpp"
#include "debias/types.hpp"

#include <string>
#include <vector>

namespace debias {

enum class SweepAlgorithm { user_knn, item_knn, svd_mf };
enum class CompareModel { mf, npe_mf, md_mf, nbpe_mf };

std::string to_string(SweepAlgorithm algorithm);
std::string to_string(CompareModel model);
SweepAlgorithm parse_sweep_algorithm(const std::string& name);
CompareModel parse_compare_model(const std::string& name);

// One CSV line of either experiment. model holds the algorithm name for the
// sweep and the debiasing-model name for the comparison.
struct ResultRow {
  std::string dataset;
  std::string experiment;
  std::string model;
  double beta = 0.0;
  int quantization = 0;
  int trial = 0;
  double rmse = 0.0;
  double mae = 0.0;
};

// Aggregate over the trials of one (model, beta, quantization) cell.
struct GroupSummary {
  std::string dataset;
  std::string experiment;
  std::string model;
  double beta = 0.0;
  int quantization = 0;
  int trials = 0;
  double rmse_q25 = 0.0, rmse_median = 0.0, rmse_q75 = 0.0, rmse_mean = 0.0;
  double mae_q25 = 0.0, mae_median = 0.0, mae_q75 = 0.0, mae_mean = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<GroupSummary> summaries;
};

// Bias-susceptibility sweep: per trial and beta, one observation set is drawn
// and one noisy continuous trace is quantized at every requested level, so
// quantization variants differ only in rounding. Each algorithm trains on
// each variant and is scored densely against the ground truth.
struct SweepConfig {
  std::string dataset = "latent-factors";  // row label only
  std::vector<double> betas{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  std::vector<int> quantizations{2, 3, 5};
  std::vector<SweepAlgorithm> algorithms{SweepAlgorithm::user_knn, SweepAlgorithm::item_knn,
                                         SweepAlgorithm::svd_mf};
  int trials = 10;
  double rho = 0.1;
  NoiseConfig noise{};
  // Multiplies beta in the softmax exponent, lifting the unit-scale ratings
  // back to the span of a one-to-five star scale.
  double bias_scale = 4.0;
  SeedSpec seed{};
  TrainConfig train{};
  KnnConfig knn{};  // mode is overridden per algorithm
  int jobs = 0;     // 0 = hardware concurrency

  void validate() const;
};

// Cross-dataset debiasing comparison: per trial, a biased training set D
// (train_beta, train_quantization) and an independent unbiased auxiliary set
// (aux_beta, aux_quantization) are drawn; each requested model trains on its
// view of the pair and is scored densely.
struct CompareConfig {
  std::string dataset = "latent-factors";
  double train_beta = 1.0;
  int train_quantization = 5;
  double aux_beta = 0.0;
  int aux_quantization = 2;
  int trials = 5;
  std::vector<CompareModel> models{CompareModel::mf, CompareModel::npe_mf, CompareModel::md_mf,
                                   CompareModel::nbpe_mf};
  double rho = 0.1;
  NoiseConfig noise{};
  double bias_scale = 4.0;
  SeedSpec seed{};
  TrainConfig train{};
  MixScheme mix_scheme = MixScheme::endpoint;
  MarginalMode marginal = MarginalMode::normalized;
  int jobs = 0;

  void validate() const;
};

// Ground truth is held fixed across trials; only observations and noise are
// re-sampled. Trials run concurrently (up to jobs at a time) on streams
// derived from (seed, trial, stage), and rows are reduced in trial order, so
// the output does not depend on the job count. Training failures are
// rethrown with the failing cell identified.
ExperimentResult run_sweep(const RatingMatrix& truth, const SweepConfig& config);
ExperimentResult run_comparison(const RatingMatrix& truth, const CompareConfig& config);

// CSV with header dataset,experiment,model,beta,quantization,trial,rmse,mae.
std::string rows_to_csv(const std::vector<ResultRow>& rows);

// Per-group quartiles and means as a JSON array (stable key order).
std::string summary_to_json(const std::vector<GroupSummary>& summaries);

// Long-format quartile table for external plotting, one line per
// (model, quantization, beta).
std::string plot_data_csv(const std::vector<GroupSummary>& summaries);

// Recompute group summaries from per-trial rows (grouped in first-appearance
// order). run_sweep/run_comparison use this on their own rows.
std::vector<GroupSummary> summarize_rows(const std::vector<ResultRow>& rows);

}  // namespace debias
