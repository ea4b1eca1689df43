#include "debias/datagen.hpp"

#include "debias/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

namespace debias {

Matrix latent_factors_raw(const LatentFactorsConfig& config, std::mt19937_64& stream) {
  config.validate();
  const auto U = static_cast<Eigen::Index>(config.num_users);
  const auto I = static_cast<Eigen::Index>(config.num_items);
  const int d = config.latent_dim;
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double fs = config.factor_std / std::sqrt(static_cast<double>(d));

  Matrix P(U, d), Q(I, d);
  for (Eigen::Index r = 0; r < U; ++r)
    for (int c = 0; c < d; ++c) P(r, c) = fs * gauss(stream);
  for (Eigen::Index r = 0; r < I; ++r)
    for (int c = 0; c < d; ++c) Q(r, c) = fs * gauss(stream);
  Eigen::VectorXd bu(U), bi(I);
  for (Eigen::Index r = 0; r < U; ++r) bu(r) = config.bias_std * gauss(stream);
  for (Eigen::Index r = 0; r < I; ++r) bi(r) = config.bias_std * gauss(stream);

  Matrix raw = P * Q.transpose();
  raw.colwise() += bu;
  raw.rowwise() += bi.transpose();
  raw.array() += config.global_mean;
  return raw;
}

namespace {

double percentile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty range");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

RatingMatrix generate_latent_factors(const LatentFactorsConfig& config, std::mt19937_64& stream) {
  Matrix raw = latent_factors_raw(config, stream);
  RatingMatrix out;
  out.num_users = config.num_users;
  out.num_items = config.num_items;

  double lo, hi;
  if (config.clip_quantile == 0.0) {
    lo = raw.minCoeff();
    hi = raw.maxCoeff();
  } else {
    std::vector<double> flat(raw.data(), raw.data() + raw.size());
    std::sort(flat.begin(), flat.end());
    lo = percentile_sorted(flat, config.clip_quantile);
    hi = percentile_sorted(flat, 1.0 - config.clip_quantile);
  }
  if (hi <= lo) {
    out.values = Matrix::Constant(raw.rows(), raw.cols(), 0.5);
    return out;
  }
  out.values = ((raw.array() - lo) / (hi - lo)).min(1.0).max(0.0).matrix();
  return out;
}

SparseRatings load_ml100k(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  SparseRatings out;
  std::string line;
  std::size_t line_no = 0;
  std::uint32_t max_user = 0, max_item = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    long user = 0, item = 0, stars = 0;
    int consumed = 0;
    const int matched =
        std::sscanf(line.c_str(), "%ld\t%ld\t%ld\t%n", &user, &item, &stars, &consumed);
    if (matched != 3 || consumed == 0)
      throw std::runtime_error("load_ml100k: malformed line " + std::to_string(line_no));
    if (stars < 1 || stars > 5)
      throw std::runtime_error("load_ml100k: rating outside 1..5 at line " +
                               std::to_string(line_no));
    if (user < 1 || item < 1)
      throw std::runtime_error("load_ml100k: non-positive id at line " + std::to_string(line_no));
    SparseRatings::Triple t;
    t.user = static_cast<std::uint32_t>(user - 1);
    t.item = static_cast<std::uint32_t>(item - 1);
    t.stars = static_cast<int>(stars);
    max_user = std::max(max_user, t.user);
    max_item = std::max(max_item, t.item);
    out.triples.push_back(t);
  }
  if (out.triples.empty()) throw std::runtime_error("load_ml100k: no ratings");
  out.num_users = max_user + 1;
  out.num_items = max_item + 1;
  return out;
}

RatingMatrix impute_dense(const SparseRatings& ratings, const TrainConfig& config,
                          std::mt19937_64& stream) {
  if (ratings.triples.empty()) throw std::invalid_argument("impute_dense: empty ratings");
  ObservedDataset d;
  d.num_users = ratings.num_users;
  d.num_items = ratings.num_items;
  d.quantization = QuantizationSpec{5};
  d.entries.reserve(ratings.triples.size());
  for (const auto& t : ratings.triples)
    d.entries.push_back({t.user, t.item, (t.stars - 1) / 4.0});
  std::sort(d.entries.begin(), d.entries.end(), [](const auto& a, const auto& b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  });
  const std::vector<double> uniform(d.entries.size(), 1.0);
  FactorModel model = train_ips_mf(d, uniform, config, stream);
  RatingMatrix out;
  out.num_users = ratings.num_users;
  out.num_items = ratings.num_items;
  out.values = predict_matrix(model);
  return out;
}

SparseRatings synthesize_star_ratings(const StarSynthConfig& config, std::mt19937_64& stream) {
  const auto U = static_cast<Eigen::Index>(config.num_users);
  const auto I = static_cast<Eigen::Index>(config.num_items);
  const std::size_t total = config.num_users * config.num_items;
  if (config.count > total)
    throw std::invalid_argument("synthesize_star_ratings: count exceeds the grid");
  LatentFactorsConfig surface;
  surface.num_users = config.num_users;
  surface.num_items = config.num_items;
  surface.latent_dim = config.latent_dim;
  surface.factor_std = config.factor_std;
  surface.bias_std = config.bias_std;
  surface.clip_quantile = config.clip_quantile;
  const RatingMatrix unit_surface = generate_latent_factors(surface, stream);

  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix S = 1.0 + 4.0 * unit_surface.values.array();
  for (Eigen::Index r = 0; r < U; ++r)
    for (Eigen::Index c = 0; c < I; ++c) S(r, c) += config.noise_std * gauss(stream);

  // Weighted sampling without replacement (weight e^{tilt * stars}) via the
  // Gumbel top-k trick: keep the `count` largest tilt*S + Gumbel keys.
  std::uniform_real_distribution<double> unit(std::numeric_limits<double>::min(), 1.0);
  std::vector<std::pair<double, std::uint64_t>> keys;
  keys.reserve(total);
  for (Eigen::Index r = 0; r < U; ++r)
    for (Eigen::Index c = 0; c < I; ++c) {
      const double gumbel = -std::log(-std::log(unit(stream)));
      keys.emplace_back(config.select_tilt * S(r, c) + gumbel,
                        static_cast<std::uint64_t>(r) * config.num_items + c);
    }
  std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(config.count - 1),
                   keys.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  keys.resize(config.count);
  std::sort(keys.begin(), keys.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });

  SparseRatings out;
  out.num_users = config.num_users;
  out.num_items = config.num_items;
  out.triples.reserve(config.count);
  for (const auto& [key, flat] : keys) {
    SparseRatings::Triple t;
    t.user = static_cast<std::uint32_t>(flat / config.num_items);
    t.item = static_cast<std::uint32_t>(flat % config.num_items);
    const double s = std::round(S(t.user, t.item));
    t.stars = static_cast<int>(std::min(5.0, std::max(1.0, s)));
    out.triples.push_back(t);
  }
  return out;
}

void write_ml100k_file(const std::filesystem::path& path, const SparseRatings& ratings) {
  std::string text;
  text.reserve(ratings.triples.size() * 16);
  for (const auto& t : ratings.triples) {
    text += std::to_string(t.user + 1);
    text += '\t';
    text += std::to_string(t.item + 1);
    text += '\t';
    text += std::to_string(t.stars);
    text += "\t0\n";
  }
  atomic_write_file(path, text);
}

}  // namespace debias
