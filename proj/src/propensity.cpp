#include "debias/propensity.hpp"

#include <unordered_map>

namespace debias {

namespace {

double clip_unit(double p, double floor) { return std::min(1.0, std::max(floor, p)); }

}  // namespace

ClassPropensities estimate_npe(const ObservedDataset& D) {
  if (D.entries.empty()) throw std::invalid_argument("estimate_npe: empty dataset");
  const double N = static_cast<double>(D.entries.size());
  const double total = static_cast<double>(D.num_users) * static_cast<double>(D.num_items);
  std::map<double, std::size_t> counts;
  for (const auto& e : D.entries) ++counts[e.value];

  ClassPropensities cp;
  const double pr_o = N / total;
  double sum = 0.0;
  for (const auto& [value, count] : counts) {
    const double pr_r_given_o = static_cast<double>(count) / N;
    const double pr_r = static_cast<double>(count) / N;  // same counts: cancels
    const double p = clip_unit(pr_r_given_o * pr_o / pr_r, cp.floor);
    cp.by_class[value] = p;
    sum += p;
  }
  cp.fallback = sum / static_cast<double>(counts.size());
  return cp;
}

ClassPropensities estimate_nbpe(const ObservedDataset& D, const ObservedDataset& aux,
                                MarginalMode mode, double floor) {
  if (D.entries.empty()) throw std::invalid_argument("estimate_nbpe: empty dataset");
  if (aux.entries.empty()) throw std::invalid_argument("estimate_nbpe: empty auxiliary dataset");
  if (D.num_users != aux.num_users || D.num_items != aux.num_items)
    throw std::invalid_argument("estimate_nbpe: dimension mismatch");
  const double N = static_cast<double>(D.entries.size());
  const double total = static_cast<double>(D.num_users) * static_cast<double>(D.num_items);
  const int n = D.quantization.levels;
  const int nb = aux.quantization.levels;

  std::vector<std::size_t> count_r(static_cast<std::size_t>(n), 0);
  std::unordered_map<std::uint64_t, int> position_class;
  position_class.reserve(D.entries.size() * 2);
  for (const auto& e : D.entries) {
    const int r = D.quantization.level_index(e.value);
    ++count_r[static_cast<std::size_t>(r)];
    position_class[static_cast<std::uint64_t>(e.user) * D.num_items + e.item] = r;
  }

  // T[r][b]: co-observed positions with D class r and aux class b.
  std::vector<std::vector<double>> T(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(nb), 0.0));
  std::vector<double> count_b(static_cast<std::size_t>(nb), 0.0);
  std::size_t overlap = 0;
  for (const auto& e : aux.entries) {
    const int b = aux.quantization.level_index(e.value);
    count_b[static_cast<std::size_t>(b)] += 1.0;
    const auto it =
        position_class.find(static_cast<std::uint64_t>(e.user) * D.num_items + e.item);
    if (it != position_class.end()) {
      T[static_cast<std::size_t>(it->second)][static_cast<std::size_t>(b)] += 1.0;
      ++overlap;
    }
  }
  if (overlap == 0) throw std::runtime_error("estimate_nbpe: mask overlap empty");

  std::vector<double> colsum(static_cast<std::size_t>(nb), 0.0);
  for (int b = 0; b < nb; ++b)
    for (int r = 0; r < n; ++r) colsum[b] += T[r][b];
  std::vector<double> masked(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < n; ++r)
    for (int b = 0; b < nb; ++b)
      if (colsum[b] > 0) masked[r] += count_b[b] * T[r][b] / colsum[b];
  double masked_sum = 0.0;
  for (double m : masked) masked_sum += m;

  ClassPropensities cp;
  cp.floor = floor;
  const double pr_o = N / total;
  const double denom_scale = mode == MarginalMode::normalized ? masked_sum : N;
  double sum = 0.0;
  std::size_t estimable = 0;
  std::vector<int> pending;
  for (int r = 0; r < n; ++r) {
    if (count_r[r] == 0) continue;  // class absent from D: no weight ever requested
    const double value = D.quantization.level(r);
    if (masked[r] > 0) {
      const double pr_r_given_o = static_cast<double>(count_r[r]) / N;
      const double pr_r = masked[r] / denom_scale;
      const double p = clip_unit(pr_r_given_o * pr_o / pr_r, floor);
      cp.by_class[value] = p;
      sum += p;
      ++estimable;
    } else {
      pending.push_back(r);
    }
  }
  if (estimable == 0) throw std::runtime_error("estimate_nbpe: no estimable class");
  cp.fallback = sum / static_cast<double>(estimable);
  for (int r : pending) cp.by_class[D.quantization.level(r)] = clip_unit(cp.fallback, floor);
  return cp;
}

std::vector<double> true_propensities(const ObservationProbabilities& probs,
                                      const ObservedDataset& D) {
  if (probs.num_users != D.num_users || probs.num_items != D.num_items)
    throw std::invalid_argument("true_propensities: dimension mismatch");
  std::vector<double> out;
  out.reserve(D.entries.size());
  for (const auto& e : D.entries) out.push_back(probs.p(e.user, e.item));
  return out;
}

std::vector<double> assign(const ObservedDataset& D, const ClassPropensities& cp) {
  std::vector<double> out;
  out.reserve(D.entries.size());
  for (const auto& e : D.entries) out.push_back(cp.at(e.value));
  return out;
}

}  // namespace debias
