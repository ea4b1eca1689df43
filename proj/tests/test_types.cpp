#include "debias/types.hpp"

#include <doctest.h>

#include <limits>

using namespace debias;

namespace {

RatingMatrix small_matrix() {
  RatingMatrix m;
  m.num_users = 2;
  m.num_items = 3;
  m.values = Matrix::Constant(2, 3, 0.5);
  return m;
}

}  // namespace

TEST_CASE("RatingMatrix validation accepts a well-formed matrix") {
  CHECK_NOTHROW(small_matrix().validate());
}

TEST_CASE("RatingMatrix validation rejects bad shapes and ranges") {
  auto m = small_matrix();
  m.num_items = 4;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  m = small_matrix();
  m.values(0, 0) = 1.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  m = small_matrix();
  m.values(1, 2) = -0.01;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  m = small_matrix();
  m.values(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  m = small_matrix();
  m.num_users = 0;
  m.num_items = 0;
  m.values = Matrix(0, 0);
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("quantization level sets match the evenly spaced grid") {
  const QuantizationSpec two{2};
  CHECK(two.level(0) == 0.0);
  CHECK(two.level(1) == 1.0);

  const QuantizationSpec three{3};
  CHECK(three.level(1) == 0.5);

  const QuantizationSpec five{5};
  CHECK(five.level(0) == 0.0);
  CHECK(five.level(1) == 0.25);
  CHECK(five.level(2) == 0.5);
  CHECK(five.level(3) == 0.75);
  CHECK(five.level(4) == 1.0);
}

TEST_CASE("level_index inverts level and clamps out-of-range input") {
  for (int n : {2, 3, 5, 7}) {
    const QuantizationSpec spec{n};
    for (int i = 0; i < n; ++i) CHECK(spec.level_index(spec.level(i)) == i);
    CHECK(spec.level_index(-0.4) == 0);
    CHECK(spec.level_index(1.7) == n - 1);
  }
}

TEST_CASE("QuantizationSpec requires at least two levels") {
  CHECK_THROWS_AS(QuantizationSpec{1}.validate(), std::invalid_argument);
  CHECK_THROWS_AS(QuantizationSpec{0}.validate(), std::invalid_argument);
  CHECK_NOTHROW(QuantizationSpec{2}.validate());
}

TEST_CASE("ObservedDataset grid validation") {
  ObservedDataset d;
  d.num_users = 2;
  d.num_items = 2;
  d.quantization = QuantizationSpec{5};
  d.entries = {{0, 0, 0.25}, {1, 1, 1.0}};
  CHECK_NOTHROW(d.validate_on_grid());
  CHECK(d.size() == 2);

  d.entries.push_back({0, 1, 0.3});  // off the n=5 grid
  CHECK_THROWS_AS(d.validate_on_grid(), std::invalid_argument);

  d.entries = {{2, 0, 0.0}};  // user index out of range
  CHECK_THROWS_AS(d.validate_on_grid(), std::invalid_argument);
}
