#include "debias/evaluation.hpp"

#include "debias/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace debias;

TEST_CASE("perfect prediction scores zero") {
  RatingMatrix truth;
  truth.num_users = 3;
  truth.num_items = 3;
  truth.values = Matrix::Constant(3, 3, 0.75);
  const MetricReport r = evaluate_dense(truth.values, truth);
  CHECK(r.rmse == 0.0);
  CHECK(r.mae == 0.0);
  CHECK(r.num_entries == 9);
}

TEST_CASE("half-zero half-one truth against constant 0.5") {
  RatingMatrix truth;
  truth.num_users = 2;
  truth.num_items = 2;
  truth.values = Matrix(2, 2);
  truth.values << 0, 1, 1, 0;
  const MetricReport r = evaluate_dense(Matrix::Constant(2, 2, 0.5), truth);
  CHECK(r.rmse == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.mae == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("random instance matches a brute-force per-entry loop") {
  auto stream = derive_stream({5}, 0, "eval-test");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  RatingMatrix truth;
  truth.num_users = 4;
  truth.num_items = 4;
  truth.values = Matrix(4, 4);
  Matrix pred(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      truth.values(r, c) = uniform(stream);
      pred(r, c) = uniform(stream);
    }

  double sq = 0.0, ab = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const double d = pred(r, c) - truth.values(r, c);
      sq += d * d;
      ab += std::abs(d);
    }
  const MetricReport rep = evaluate_dense(pred, truth);
  CHECK(rep.rmse == doctest::Approx(std::sqrt(sq / 16.0)).epsilon(1e-12));
  CHECK(rep.mae == doctest::Approx(ab / 16.0).epsilon(1e-12));
}

TEST_CASE("rmse >= mae on random inputs, equality when all errors equal") {
  auto stream = derive_stream({6}, 0, "eval-prop");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    RatingMatrix truth;
    truth.num_users = 5;
    truth.num_items = 3;
    truth.values = Matrix(5, 3);
    Matrix pred(5, 3);
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 3; ++c) {
        truth.values(r, c) = uniform(stream);
        pred(r, c) = uniform(stream);
      }
    const MetricReport m = evaluate_dense(pred, truth);
    CHECK(m.rmse >= m.mae);
  }

  RatingMatrix truth;
  truth.num_users = 2;
  truth.num_items = 2;
  truth.values = Matrix::Constant(2, 2, 0.25);
  const MetricReport m = evaluate_dense(Matrix::Constant(2, 2, 0.45), truth);
  CHECK(m.rmse == doctest::Approx(m.mae).epsilon(1e-12));
}

TEST_CASE("predictions are clamped to [0,1] before scoring") {
  RatingMatrix truth;
  truth.num_users = 1;
  truth.num_items = 2;
  truth.values = Matrix(1, 2);
  truth.values << 1.0, 0.0;
  Matrix pred(1, 2);
  pred << 3.0, -2.0;  // clamps to 1.0 and 0.0, matching truth exactly
  const MetricReport m = evaluate_dense(pred, truth);
  CHECK(m.rmse == 0.0);
  CHECK(m.mae == 0.0);
}

TEST_CASE("shape mismatch is an error") {
  RatingMatrix truth;
  truth.num_users = 2;
  truth.num_items = 2;
  truth.values = Matrix::Constant(2, 2, 0.5);
  CHECK_THROWS_AS(evaluate_dense(Matrix::Constant(2, 3, 0.5), truth), std::invalid_argument);
}
