#include "debias/evaluation.hpp"

#include <cmath>

namespace debias {

MetricReport evaluate_dense(const Matrix& pred, const RatingMatrix& truth) {
  if (pred.rows() != truth.values.rows() || pred.cols() != truth.values.cols())
    throw std::invalid_argument("evaluate_dense: shape mismatch");
  const Eigen::ArrayXXd diff =
      pred.array().min(1.0).max(0.0) - truth.values.array();
  MetricReport r;
  r.num_entries = static_cast<std::size_t>(diff.size());
  r.rmse = std::sqrt(diff.square().mean());
  r.mae = diff.abs().mean();
  return r;
}

}  // namespace debias
