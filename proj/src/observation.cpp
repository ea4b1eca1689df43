#include "debias/observation.hpp"

#include <cmath>

namespace debias {

ObservationProbabilities observation_probabilities(const RatingMatrix& R,
                                                   const ObservationModelParams& params) {
  params.validate();
  if (!R.values.allFinite())
    throw std::invalid_argument("observation_probabilities: non-finite rating");
  const auto U = static_cast<Eigen::Index>(R.num_users);
  const auto I = static_cast<Eigen::Index>(R.num_items);
  const double total = static_cast<double>(R.num_users) * static_cast<double>(R.num_items);

  ObservationProbabilities out;
  out.num_users = R.num_users;
  out.num_items = R.num_items;
  out.p.resize(U, I);

  if (params.beta == 0.0) {
    // Uniform softmax cancels k exactly; avoid the round trip through exp.
    out.k = params.target_fraction * (params.axis == SoftmaxAxis::global
                                          ? total
                                          : static_cast<double>(R.num_items));
    out.p.setConstant(params.target_fraction);
    out.effective_fraction = params.target_fraction;
    return out;
  }

  const double scale = params.beta * params.exponent_scale;
  if (params.axis == SoftmaxAxis::global) {
    const double zmax = scale * R.values.maxCoeff();
    Eigen::ArrayXXd e = (scale * R.values.array() - zmax).exp();
    const double sum = e.sum();
    out.k = params.target_fraction * total;
    out.p = (out.k / sum * e).min(1.0).matrix();
  } else {
    out.k = params.target_fraction * static_cast<double>(R.num_items);
    for (Eigen::Index u = 0; u < U; ++u) {
      const double zmax = scale * R.values.row(u).maxCoeff();
      Eigen::ArrayXd e = (scale * R.values.row(u).transpose().array() - zmax).exp();
      out.p.row(u) = (out.k / e.sum() * e).min(1.0).matrix().transpose();
    }
  }
  out.effective_fraction = out.p.sum() / total;
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_observations(
    const ObservationProbabilities& probs, std::mt19937_64& stream) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> observed;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto U = static_cast<Eigen::Index>(probs.num_users);
  const auto I = static_cast<Eigen::Index>(probs.num_items);
  for (Eigen::Index u = 0; u < U; ++u)
    for (Eigen::Index i = 0; i < I; ++i)
      if (unit(stream) < probs.p(u, i))
        observed.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(i));
  return observed;
}

}  // namespace debias
