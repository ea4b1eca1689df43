#include "debias/harness.hpp"

#include "debias/evaluation.hpp"
#include "debias/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace debias {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// Runs trial bodies up to `jobs` at a time and returns their rows indexed by
// trial, so the reduction order never depends on scheduling.
std::vector<std::vector<ResultRow>> run_trials(
    int trials, int jobs, const std::function<std::vector<ResultRow>(int)>& body) {
  int width = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  if (width < 1) width = 1;
  std::vector<std::vector<ResultRow>> out(static_cast<std::size_t>(trials));
  for (int start = 0; start < trials; start += width) {
    const int end = std::min(trials, start + width);
    std::vector<std::future<std::vector<ResultRow>>> futures;
    futures.reserve(static_cast<std::size_t>(end - start));
    for (int t = start; t < end; ++t)
      futures.push_back(std::async(std::launch::async, body, t));
    for (int t = start; t < end; ++t)
      out[static_cast<std::size_t>(t)] = futures[static_cast<std::size_t>(t - start)].get();
  }
  return out;
}

std::vector<ResultRow> flatten(std::vector<std::vector<ResultRow>>&& per_trial) {
  std::vector<ResultRow> rows;
  for (auto& chunk : per_trial)
    rows.insert(rows.end(), std::make_move_iterator(chunk.begin()),
                std::make_move_iterator(chunk.end()));
  return rows;
}

struct TracePair {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> positions;
  std::vector<double> values;  // continuous, pre-quantization
};

TracePair sample_trace(const RatingMatrix& truth, double beta, double rho, double bias_scale,
                       NoiseConfig noise, const SeedSpec& seed, int trial,
                       const std::string& tag) {
  ObservationModelParams params;
  params.beta = beta;
  params.target_fraction = rho;
  params.exponent_scale = bias_scale;
  const ObservationProbabilities probs = observation_probabilities(truth, params);
  auto obs_stream = derive_stream(seed, trial, "obs/" + tag);
  TracePair trace;
  trace.positions = sample_observations(probs, obs_stream);
  auto noise_stream = derive_stream(seed, trial, "noise/" + tag);
  trace.values = noisy_observed_values(truth, trace.positions, noise, noise_stream);
  return trace;
}

}  // namespace

std::string to_string(SweepAlgorithm algorithm) {
  switch (algorithm) {
    case SweepAlgorithm::user_knn: return "user-knn";
    case SweepAlgorithm::item_knn: return "item-knn";
    case SweepAlgorithm::svd_mf: return "svd-mf";
  }
  throw std::logic_error("unknown sweep algorithm");
}

std::string to_string(CompareModel model) {
  switch (model) {
    case CompareModel::mf: return "MF";
    case CompareModel::npe_mf: return "NPE-MF";
    case CompareModel::md_mf: return "MD-MF";
    case CompareModel::nbpe_mf: return "NBPE-MF";
  }
  throw std::logic_error("unknown comparison model");
}

SweepAlgorithm parse_sweep_algorithm(const std::string& name) {
  if (name == "user-knn") return SweepAlgorithm::user_knn;
  if (name == "item-knn") return SweepAlgorithm::item_knn;
  if (name == "svd-mf") return SweepAlgorithm::svd_mf;
  throw std::invalid_argument("unknown sweep algorithm: " + name +
                              " (expected user-knn, item-knn, or svd-mf)");
}

CompareModel parse_compare_model(const std::string& name) {
  if (name == "MF") return CompareModel::mf;
  if (name == "NPE-MF") return CompareModel::npe_mf;
  if (name == "MD-MF") return CompareModel::md_mf;
  if (name == "NBPE-MF") return CompareModel::nbpe_mf;
  throw std::invalid_argument("unknown comparison model: " + name +
                              " (expected MF, NPE-MF, MD-MF, or NBPE-MF)");
}

void SweepConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("SweepConfig: trials must be >= 1");
  if (betas.empty()) throw std::invalid_argument("SweepConfig: beta grid is empty");
  if (quantizations.empty()) throw std::invalid_argument("SweepConfig: quantization grid is empty");
  if (algorithms.empty()) throw std::invalid_argument("SweepConfig: algorithm list is empty");
  for (double b : betas)
    if (b < 0) throw std::invalid_argument("SweepConfig: beta must be >= 0");
  for (int n : quantizations) QuantizationSpec{n}.validate();
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("SweepConfig: rho must be in (0,1]");
  if (bias_scale <= 0) throw std::invalid_argument("SweepConfig: bias_scale must be > 0");
  if (jobs < 0) throw std::invalid_argument("SweepConfig: jobs must be >= 0");
  noise.validate();
  train.validate();
  knn.validate();
}

void CompareConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("CompareConfig: trials must be >= 1");
  if (models.empty()) throw std::invalid_argument("CompareConfig: model list is empty");
  if (train_beta < 0 || aux_beta < 0)
    throw std::invalid_argument("CompareConfig: beta must be >= 0");
  QuantizationSpec{train_quantization}.validate();
  QuantizationSpec{aux_quantization}.validate();
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("CompareConfig: rho must be in (0,1]");
  if (bias_scale <= 0) throw std::invalid_argument("CompareConfig: bias_scale must be > 0");
  if (jobs < 0) throw std::invalid_argument("CompareConfig: jobs must be >= 0");
  noise.validate();
  train.validate();
}

ExperimentResult run_sweep(const RatingMatrix& truth, const SweepConfig& config) {
  truth.validate();
  config.validate();

  const auto one_trial = [&](int trial) {
    std::vector<ResultRow> rows;
    for (double beta : config.betas) {
      const std::string beta_tag = "sweep/beta=" + format_double(beta);
      const TracePair trace = sample_trace(truth, beta, config.rho, config.bias_scale,
                                           config.noise, config.seed, trial, beta_tag);
      for (int n : config.quantizations) {
        const ObservedDataset D =
            quantize_trace(trace.positions, trace.values, truth.num_users, truth.num_items,
                           QuantizationSpec{n});
        for (SweepAlgorithm algorithm : config.algorithms) {
          Matrix pred;
          try {
            if (algorithm == SweepAlgorithm::svd_mf) {
              const std::vector<double> unit(D.size(), 1.0);
              auto fit_stream = derive_stream(
                  config.seed, trial,
                  "fit/" + beta_tag + "/n=" + std::to_string(n) + "/" + to_string(algorithm));
              pred = predict_matrix(train_ips_mf(D, unit, config.train, fit_stream));
            } else {
              KnnConfig kc = config.knn;
              kc.mode = algorithm == SweepAlgorithm::user_knn ? KnnConfig::Mode::user
                                                              : KnnConfig::Mode::item;
              pred = train_predict_knn(D, kc);
            }
          } catch (const std::exception& err) {
            throw std::runtime_error("sweep cell (model=" + to_string(algorithm) +
                                     ", beta=" + format_double(beta) +
                                     ", quantization=" + std::to_string(n) +
                                     ", trial=" + std::to_string(trial) + "): " + err.what());
          }
          const MetricReport report = evaluate_dense(pred, truth);
          rows.push_back({config.dataset, "sweep", to_string(algorithm), beta, n, trial,
                          report.rmse, report.mae});
        }
      }
    }
    return rows;
  };

  ExperimentResult result;
  result.rows = flatten(run_trials(config.trials, config.jobs, one_trial));
  result.summaries = summarize_rows(result.rows);
  return result;
}

ExperimentResult run_comparison(const RatingMatrix& truth, const CompareConfig& config) {
  truth.validate();
  config.validate();

  const auto one_trial = [&](int trial) {
    const TracePair train_trace =
        sample_trace(truth, config.train_beta, config.rho, config.bias_scale, config.noise,
                     config.seed, trial, "compare/train");
    const ObservedDataset D =
        quantize_trace(train_trace.positions, train_trace.values, truth.num_users,
                       truth.num_items, QuantizationSpec{config.train_quantization});
    const TracePair aux_trace =
        sample_trace(truth, config.aux_beta, config.rho, config.bias_scale, config.noise,
                     config.seed, trial, "compare/aux");
    const ObservedDataset aux =
        quantize_trace(aux_trace.positions, aux_trace.values, truth.num_users, truth.num_items,
                       QuantizationSpec{config.aux_quantization});

    std::vector<ResultRow> rows;
    for (CompareModel model : config.models) {
      Matrix pred;
      try {
        auto fit_stream = derive_stream(config.seed, trial, "fit/compare/" + to_string(model));
        switch (model) {
          case CompareModel::mf: {
            const std::vector<double> unit(D.size(), 1.0);
            pred = predict_matrix(train_ips_mf(D, unit, config.train, fit_stream));
            break;
          }
          case CompareModel::npe_mf: {
            const auto propensities = assign(D, estimate_npe(D));
            pred = predict_matrix(train_ips_mf(D, propensities, config.train, fit_stream));
            break;
          }
          case CompareModel::md_mf: {
            const ObservedDataset mixed = mix_datasets(D, aux, config.mix_scheme);
            const std::vector<double> unit(mixed.size(), 1.0);
            pred = predict_matrix(train_ips_mf(mixed, unit, config.train, fit_stream));
            break;
          }
          case CompareModel::nbpe_mf: {
            const auto propensities = assign(D, estimate_nbpe(D, aux, config.marginal));
            pred = predict_matrix(train_ips_mf(D, propensities, config.train, fit_stream));
            break;
          }
        }
      } catch (const std::exception& err) {
        throw std::runtime_error("comparison cell (model=" + to_string(model) +
                                 ", trial=" + std::to_string(trial) + "): " + err.what());
      }
      const MetricReport report = evaluate_dense(pred, truth);
      rows.push_back({config.dataset, "compare", to_string(model), config.train_beta,
                      config.train_quantization, trial, report.rmse, report.mae});
    }
    return rows;
  };

  ExperimentResult result;
  result.rows = flatten(run_trials(config.trials, config.jobs, one_trial));
  result.summaries = summarize_rows(result.rows);
  return result;
}

std::vector<GroupSummary> summarize_rows(const std::vector<ResultRow>& rows) {
  struct Group {
    GroupSummary summary;
    std::vector<double> rmse;
    std::vector<double> mae;
  };
  std::vector<Group> groups;
  const auto same_cell = [](const Group& g, const ResultRow& r) {
    return g.summary.model == r.model && g.summary.beta == r.beta &&
           g.summary.quantization == r.quantization && g.summary.dataset == r.dataset &&
           g.summary.experiment == r.experiment;
  };
  for (const ResultRow& row : rows) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return same_cell(g, row); });
    if (it == groups.end()) {
      groups.push_back({{row.dataset, row.experiment, row.model, row.beta, row.quantization},
                        {},
                        {}});
      it = std::prev(groups.end());
    }
    it->rmse.push_back(row.rmse);
    it->mae.push_back(row.mae);
  }

  std::vector<GroupSummary> summaries;
  summaries.reserve(groups.size());
  for (Group& g : groups) {
    GroupSummary s = g.summary;
    s.trials = static_cast<int>(g.rmse.size());
    std::sort(g.rmse.begin(), g.rmse.end());
    std::sort(g.mae.begin(), g.mae.end());
    s.rmse_q25 = quantile_sorted(g.rmse, 0.25);
    s.rmse_median = quantile_sorted(g.rmse, 0.50);
    s.rmse_q75 = quantile_sorted(g.rmse, 0.75);
    s.mae_q25 = quantile_sorted(g.mae, 0.25);
    s.mae_median = quantile_sorted(g.mae, 0.50);
    s.mae_q75 = quantile_sorted(g.mae, 0.75);
    double rs = 0.0, ms = 0.0;
    for (double v : g.rmse) rs += v;
    for (double v : g.mae) ms += v;
    s.rmse_mean = rs / static_cast<double>(s.trials);
    s.mae_mean = ms / static_cast<double>(s.trials);
    summaries.push_back(s);
  }
  return summaries;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "dataset,experiment,model,beta,quantization,trial,rmse,mae\n";
  for (const ResultRow& r : rows) {
    out += r.dataset + ',' + r.experiment + ',' + r.model + ',' + format_double(r.beta) + ',' +
           std::to_string(r.quantization) + ',' + std::to_string(r.trial) + ',' +
           format_double(r.rmse) + ',' + format_double(r.mae) + '\n';
  }
  return out;
}

std::string summary_to_json(const std::vector<GroupSummary>& summaries) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const GroupSummary& s : summaries) {
    nlohmann::ordered_json g;
    g["dataset"] = s.dataset;
    g["experiment"] = s.experiment;
    g["model"] = s.model;
    g["beta"] = s.beta;
    g["quantization"] = s.quantization;
    g["trials"] = s.trials;
    g["rmse"] = {{"q25", s.rmse_q25}, {"median", s.rmse_median}, {"q75", s.rmse_q75},
                 {"mean", s.rmse_mean}};
    g["mae"] = {{"q25", s.mae_q25}, {"median", s.mae_median}, {"q75", s.mae_q75},
                {"mean", s.mae_mean}};
    arr.push_back(std::move(g));
  }
  return arr.dump(2) + "\n";
}

std::string plot_data_csv(const std::vector<GroupSummary>& summaries) {
  std::string out =
      "dataset,experiment,model,quantization,beta,"
      "rmse_q25,rmse_median,rmse_q75,rmse_mean,mae_q25,mae_median,mae_q75,mae_mean\n";
  for (const GroupSummary& s : summaries) {
    out += s.dataset + ',' + s.experiment + ',' + s.model + ',' +
           std::to_string(s.quantization) + ',' + format_double(s.beta) + ',' +
           format_double(s.rmse_q25) + ',' + format_double(s.rmse_median) + ',' +
           format_double(s.rmse_q75) + ',' + format_double(s.rmse_mean) + ',' +
           format_double(s.mae_q25) + ',' + format_double(s.mae_median) + ',' +
           format_double(s.mae_q75) + ',' + format_double(s.mae_mean) + '\n';
  }
  return out;
}

}  // namespace debias
