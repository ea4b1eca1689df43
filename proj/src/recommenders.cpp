#include "debias/recommenders.hpp"

#include "debias/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace debias {

namespace {

void check_train_inputs(const ObservedDataset& D, const std::vector<double>& propensities) {
  if (D.entries.empty()) throw std::invalid_argument("train_ips_mf: empty dataset");
  if (propensities.size() != D.entries.size())
    throw std::invalid_argument("train_ips_mf: one propensity per entry required");
  for (double p : propensities)
    if (!(p > 0.0) || !std::isfinite(p))
      throw std::invalid_argument("train_ips_mf: propensities must be finite and > 0");
}

}  // namespace

double ips_objective(const FactorModel& model, const ObservedDataset& D,
                     const std::vector<double>& propensities, double offset_reg,
                     double factor_reg) {
  check_train_inputs(D, propensities);
  const double N = static_cast<double>(D.entries.size());
  double fit = 0.0;
  for (std::size_t j = 0; j < D.entries.size(); ++j) {
    const auto& e = D.entries[j];
    const double r = e.value - model.predict_one(e.user, e.item);
    fit += r * r / propensities[j];
  }
  double obj = fit / N;
  obj += offset_reg * (model.bu.squaredNorm() + model.bi.squaredNorm() + model.mu * model.mu);
  obj += factor_reg * (model.V.squaredNorm() + model.W.squaredNorm());
  return obj;
}

std::vector<double> ips_gradient(const FactorModel& model, const ObservedDataset& D,
                                 const std::vector<double>& propensities, double offset_reg,
                                 double factor_reg) {
  check_train_inputs(D, propensities);
  const double N = static_cast<double>(D.entries.size());
  Matrix gV = 2.0 * factor_reg * model.V;
  Matrix gW = 2.0 * factor_reg * model.W;
  Eigen::VectorXd gbu = 2.0 * offset_reg * model.bu;
  Eigen::VectorXd gbi = 2.0 * offset_reg * model.bi;
  double gmu = 2.0 * offset_reg * model.mu;
  for (std::size_t j = 0; j < D.entries.size(); ++j) {
    const auto& e = D.entries[j];
    const double g = 2.0 * (model.predict_one(e.user, e.item) - e.value) / (propensities[j] * N);
    gV.row(e.user) += g * model.W.row(e.item);
    gW.row(e.item) += g * model.V.row(e.user);
    gbu(e.user) += g;
    gbi(e.item) += g;
    gmu += g;
  }
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(gV.size() + gW.size() + gbu.size() + gbi.size()) + 1);
  for (Eigen::Index r = 0; r < gV.rows(); ++r)
    for (Eigen::Index c = 0; c < gV.cols(); ++c) flat.push_back(gV(r, c));
  for (Eigen::Index r = 0; r < gW.rows(); ++r)
    for (Eigen::Index c = 0; c < gW.cols(); ++c) flat.push_back(gW(r, c));
  for (Eigen::Index r = 0; r < gbu.size(); ++r) flat.push_back(gbu(r));
  for (Eigen::Index r = 0; r < gbi.size(); ++r) flat.push_back(gbi(r));
  flat.push_back(gmu);
  return flat;
}

FactorModel train_ips_mf(const ObservedDataset& D, const std::vector<double>& propensities,
                         const TrainConfig& config, std::mt19937_64& stream) {
  config.validate();
  check_train_inputs(D, propensities);
  const auto U = static_cast<Eigen::Index>(D.num_users);
  const auto I = static_cast<Eigen::Index>(D.num_items);
  const std::size_t N = D.entries.size();
  const int d = config.latent_dim;

  std::vector<double> w(N);
  for (std::size_t j = 0; j < N; ++j) w[j] = 1.0 / propensities[j];
  const double wbar = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(N);
  for (double& x : w) x /= wbar;
  const double offset_reg = config.offset_reg / wbar;
  const double factor_reg = config.factor_reg / wbar;

  FactorModel m;
  m.num_users = D.num_users;
  m.num_items = D.num_items;
  m.V.resize(U, d);
  m.W.resize(I, d);
  std::normal_distribution<double> init(0.0, config.init_scale);
  for (Eigen::Index r = 0; r < U; ++r)
    for (int c = 0; c < d; ++c) m.V(r, c) = init(stream);
  for (Eigen::Index r = 0; r < I; ++r)
    for (int c = 0; c < d; ++c) m.W(r, c) = init(stream);
  m.bu = Eigen::VectorXd::Zero(U);
  m.bi = Eigen::VectorXd::Zero(I);
  m.mu = 0.0;

  std::vector<std::uint32_t> order(N);
  std::iota(order.begin(), order.end(), 0u);
  const double lr = config.learning_rate;
  std::vector<double> g;
  Matrix dV(U, d), dW(I, d);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), stream);
    for (std::size_t s = 0; s < N; s += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t e_end = std::min(N, s + static_cast<std::size_t>(config.batch_size));
      const double bsz = static_cast<double>(e_end - s);
      g.assign(e_end - s, 0.0);
      bool finite = true;
      for (std::size_t j = s; j < e_end; ++j) {
        const auto& e = D.entries[order[j]];
        const double res = m.predict_one(e.user, e.item) - e.value;
        const double gj = 2.0 * res * w[order[j]] / bsz;
        if (!std::isfinite(gj)) finite = false;
        g[j - s] = gj;
      }
      if (!finite)
        throw std::runtime_error("train_ips_mf: diverged at epoch " + std::to_string(epoch));
      // Accumulate before applying so every update in the batch uses the
      // parameters from the start of the batch.
      dV.setZero();
      dW.setZero();
      double dmu = 0.0;
      for (std::size_t j = s; j < e_end; ++j) {
        const auto& e = D.entries[order[j]];
        const double gj = g[j - s];
        dV.row(e.user) += gj * m.W.row(e.item);
        dW.row(e.item) += gj * m.V.row(e.user);
        m.bu(e.user) -= lr * gj;
        m.bi(e.item) -= lr * gj;
        dmu += gj;
      }
      m.V -= lr * dV;
      m.W -= lr * dW;
      m.mu -= lr * dmu;
      if (offset_reg > 0) {
        m.bu *= 1.0 - lr * 2.0 * offset_reg;
        m.bi *= 1.0 - lr * 2.0 * offset_reg;
        m.mu *= 1.0 - lr * 2.0 * offset_reg;
      }
      if (factor_reg > 0) {
        m.V *= 1.0 - lr * 2.0 * factor_reg;
        m.W *= 1.0 - lr * 2.0 * factor_reg;
      }
    }
    if (!m.V.allFinite() || !m.W.allFinite() || !m.bu.allFinite() || !m.bi.allFinite() ||
        !std::isfinite(m.mu))
      throw std::runtime_error("train_ips_mf: diverged at epoch " + std::to_string(epoch));
  }
  return m;
}

Matrix predict_matrix(const FactorModel& model) {
  Matrix pred = model.V * model.W.transpose();
  pred.colwise() += model.bu;
  pred.rowwise() += model.bi.transpose();
  pred.array() += model.mu;
  return pred.array().min(1.0).max(0.0).matrix();
}

Matrix train_predict_knn(const ObservedDataset& D, const KnnConfig& config) {
  config.validate();
  if (D.entries.empty()) throw std::invalid_argument("train_predict_knn: empty dataset");
  const bool item_mode = config.mode == KnnConfig::Mode::item;
  const auto R = static_cast<Eigen::Index>(item_mode ? D.num_items : D.num_users);
  const auto C = static_cast<Eigen::Index>(item_mode ? D.num_users : D.num_items);

  Matrix X = Matrix::Zero(R, C);  // values
  Matrix B = Matrix::Zero(R, C);  // rated mask
  for (const auto& e : D.entries) {
    const Eigen::Index r = item_mode ? e.item : e.user;
    const Eigen::Index c = item_mode ? e.user : e.item;
    X(r, c) = e.value;
    B(r, c) = 1.0;
  }

  // Cosine over co-rated entries: for rows a,b the dot restricted to common
  // support is (X X^T)_{ab} because values vanish off-support, and the
  // restricted squared norms are (X.^2 B^T)_{ab} and its transpose.
  Matrix dot = X * X.transpose();
  Matrix sqsum = X.cwiseProduct(X) * B.transpose();
  Matrix co = B * B.transpose();
  Matrix sim(R, R);
  for (Eigen::Index a = 0; a < R; ++a) {
    for (Eigen::Index b = 0; b < R; ++b) {
      const double denom = std::sqrt(sqsum(a, b) * sqsum(b, a));
      sim(a, b) = (a != b && co(a, b) >= config.min_co_ratings && denom > 0.0)
                      ? dot(a, b) / denom
                      : 0.0;
    }
  }

  Eigen::VectorXd row_count = B.rowwise().sum();
  Eigen::VectorXd row_mean(R);
  double global_sum = 0.0;
  for (const auto& e : D.entries) global_sum += e.value;
  const double global_mean = global_sum / static_cast<double>(D.entries.size());
  for (Eigen::Index r = 0; r < R; ++r)
    row_mean(r) = row_count(r) > 0 ? X.row(r).sum() / row_count(r) : global_mean;

  std::vector<std::vector<Eigen::Index>> raters(static_cast<std::size_t>(C));
  for (const auto& e : D.entries) {
    const Eigen::Index r = item_mode ? e.item : e.user;
    const Eigen::Index c = item_mode ? e.user : e.item;
    raters[static_cast<std::size_t>(c)].push_back(r);
  }

  Matrix pred(R, C);
  std::vector<std::pair<double, Eigen::Index>> cand;
  for (Eigen::Index c = 0; c < C; ++c) {
    const auto& rl = raters[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < R; ++r) {
      cand.clear();
      for (Eigen::Index nb : rl)
        if (nb != r) cand.emplace_back(sim(r, nb), nb);
      if (cand.empty()) {
        pred(r, c) = row_count(r) > 0 ? row_mean(r) : global_mean;
        continue;
      }
      const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(config.k), cand.size());
      std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk - 1), cand.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      double wsum = 0.0, vsum = 0.0, plain = 0.0;
      for (std::size_t j = 0; j < kk; ++j) {
        wsum += cand[j].first;
        vsum += cand[j].first * X(cand[j].second, c);
        plain += X(cand[j].second, c);
      }
      if (wsum > 1e-12)
        pred(r, c) = vsum / wsum;
      else if (kk > 0)
        pred(r, c) = plain / static_cast<double>(kk);
      else if (row_count(r) > 0)
        pred(r, c) = row_mean(r);
      else
        pred(r, c) = global_mean;
    }
  }

  Matrix out = item_mode ? Matrix(pred.transpose()) : pred;
  return out.array().min(1.0).max(0.0).matrix();
}

ObservedDataset mix_datasets(const ObservedDataset& D, const ObservedDataset& aux,
                             MixScheme scheme) {
  if (D.num_users != aux.num_users || D.num_items != aux.num_items)
    throw std::invalid_argument("mix_datasets: dimension mismatch");
  const QuantizationSpec binary{2};

  double mean_of[2] = {0.0, 1.0};
  if (scheme == MixScheme::cond_mean) {
    double sum[2] = {0.0, 0.0};
    std::size_t cnt[2] = {0, 0};
    for (const auto& e : D.entries) {
      const int b = binary.level_index(quantize(e.value, binary));
      sum[b] += e.value;
      ++cnt[b];
    }
    for (int b = 0; b < 2; ++b)
      if (cnt[b] > 0) mean_of[b] = sum[b] / static_cast<double>(cnt[b]);
  }

  std::unordered_set<std::uint64_t> taken;
  taken.reserve(D.entries.size() * 2);
  for (const auto& e : D.entries)
    taken.insert(static_cast<std::uint64_t>(e.user) * D.num_items + e.item);

  ObservedDataset mixed = D;
  for (const auto& e : aux.entries) {
    const std::uint64_t key = static_cast<std::uint64_t>(e.user) * D.num_items + e.item;
    if (taken.count(key)) continue;  // collisions keep D's value
    double v = e.value;
    if (scheme == MixScheme::cond_mean) v = mean_of[binary.level_index(quantize(v, binary))];
    mixed.entries.push_back({e.user, e.item, v});
  }
  return mixed;
}

}  // namespace debias
