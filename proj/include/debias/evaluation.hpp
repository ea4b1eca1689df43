#pragma once

#include "debias/types.hpp"

namespace debias {

// RMSE/MAE of a dense prediction against the dense ground truth, over every
// user-item cell. Predictions are clamped to [0,1] first.
MetricReport evaluate_dense(const Matrix& pred, const RatingMatrix& truth);

}  // namespace debias
