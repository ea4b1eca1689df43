#pragma once

#include "debias/observation.hpp"
#include "debias/types.hpp"

#include <map>
#include <vector>

namespace debias {

// Class-conditional observation propensities P(observed | Y = r), keyed by
// the quantization level value. Classes that could not be estimated fall back
// to the mean propensity over estimable classes; everything is clipped to
// [floor, 1].
struct ClassPropensities {
  std::map<double, double> by_class;
  double fallback = 0.0;
  double floor = 1e-3;

  double at(double class_value) const {
    const auto it = by_class.find(class_value);
    const double p = it == by_class.end() ? fallback : it->second;
    return std::min(1.0, std::max(floor, p));
  }
};

enum class MarginalMode { normalized, literal };

// Naive single-dataset estimator: every probability in the class-propensity
// ratio comes from D itself, so the class terms cancel and every class gets
// N / (U*I).
ClassPropensities estimate_npe(const ObservedDataset& D);

// Cross-dataset naive-Bayes estimator.
//   P(O | Y=r) = Pr(Y=r | O) * Pr(O) / Pr(Y=r)
// with Pr(Y=r | O) = count_r / N and Pr(O) = N / (U*I) from D, and the
// rating marginal Pr(Y=r) estimated through the auxiliary dataset: a pair
// table over positions observed in both datasets maps each aux class b to a
// distribution over D classes, and the aux class counts (an unbiased view of
// the grid) are pushed through that map:
//   masked_r = sum_b count'_b * T[r][b] / colsum_b.
// normalized mode divides masked by its sum; literal mode divides by N.
ClassPropensities estimate_nbpe(const ObservedDataset& D, const ObservedDataset& aux,
                                MarginalMode mode = MarginalMode::normalized,
                                double floor = 1e-3);

// Oracle propensities straight from the observation model, one per entry.
std::vector<double> true_propensities(const ObservationProbabilities& probs,
                                      const ObservedDataset& D);

// Per-entry propensity lookup (class value -> propensity, fallback for
// unmapped classes).
std::vector<double> assign(const ObservedDataset& D, const ClassPropensities& cp);

}  // namespace debias
