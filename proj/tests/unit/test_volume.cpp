#include <cmath>

#include <doctest.h>

#include "roodbench/volume.hpp"
#include "helpers.hpp"

using namespace roodbench;

TEST_CASE("volume indexing is x-fastest") {
  Volume v(2, 3, 4);
  REQUIRE(v.size() == 24);
  v(1, 0, 0) = 7.0;
  v(0, 1, 0) = 8.0;
  v(0, 0, 1) = 9.0;
  CHECK(v.data()[1] == 7.0);
  CHECK(v.data()[2] == 8.0);
  CHECK(v.data()[6] == 9.0);
}

TEST_CASE("mean, stddev and minmax agree with hand values") {
  Volume v(2, 2, 1);
  v(0, 0, 0) = 1.0;
  v(1, 0, 0) = 2.0;
  v(0, 1, 0) = 3.0;
  v(1, 1, 0) = 6.0;
  CHECK(v.mean() == doctest::Approx(3.0).epsilon(1e-12));
  // population convention: sqrt(((1-3)^2+(2-3)^2+0+9)/4) = sqrt(3.5)
  CHECK(v.stddev() == doctest::Approx(std::sqrt(3.5)).epsilon(1e-12));
  auto [lo, hi] = v.minmax();
  CHECK(lo == 1.0);
  CHECK(hi == 6.0);
}

TEST_CASE("all_finite flags NaN and infinity") {
  Volume v(2, 2, 2, 1.0);
  CHECK(v.all_finite());
  v(1, 1, 1) = std::nan("");
  CHECK_FALSE(v.all_finite());
  v(1, 1, 1) = INFINITY;
  CHECK_FALSE(v.all_finite());
}

TEST_CASE("orientation code helpers invert each other") {
  CHECK(code_axis('R') == 0);
  CHECK(code_axis('L') == 0);
  CHECK(code_axis('A') == 1);
  CHECK(code_axis('P') == 1);
  CHECK(code_axis('S') == 2);
  CHECK(code_axis('I') == 2);
  CHECK(code_axis('Q') == -1);
  CHECK(code_sign('R') == 1);
  CHECK(code_sign('P') == -1);
  CHECK(axis_code(0, 1) == 'R');
  CHECK(axis_code(1, -1) == 'P');
  CHECK(axis_code(2, 1) == 'S');
  for (char c : {'R', 'L', 'A', 'P', 'S', 'I'}) {
    CHECK(axis_code(code_axis(c), code_sign(c)) == c);
  }
}

TEST_CASE("orientation validity requires one code per world axis") {
  CHECK(is_valid_orientation({'R', 'A', 'S'}));
  CHECK(is_valid_orientation({'L', 'P', 'I'}));
  CHECK(is_valid_orientation({'A', 'S', 'R'}));
  CHECK_FALSE(is_valid_orientation({'R', 'R', 'S'}));
  CHECK_FALSE(is_valid_orientation({'R', 'L', 'S'}));
  CHECK_FALSE(is_valid_orientation({'R', 'A', 'Q'}));
}

TEST_CASE("same_grid compares shape and spacing") {
  Volume a(4, 4, 4);
  Volume b(4, 4, 4);
  CHECK(same_grid(a, b));
  b.spacing = {1.0 + 5e-5, 1.0, 1.0};  // inside the relative tolerance
  CHECK(same_grid(a, b));
  b.spacing = {1.01, 1.0, 1.0};
  CHECK_FALSE(same_grid(a, b));
  Volume c(4, 4, 5);
  CHECK_FALSE(same_grid(a, c));

  LabelVolume l(4, 4, 4);
  CHECK(same_grid(a, l));
  LabelVolume m(5, 4, 4);
  CHECK_FALSE(same_grid(a, m));
}

TEST_CASE("trilinear sampling is exact on a linear ramp") {
  Volume v = testutil::ramp_volume(6, 6, 6, 2.0, 1.0, 10.0, 100.0);
  CHECK(sample_at(v, {1.5, 2.25, 3.75}, InterpMode::Linear) ==
        doctest::Approx(2.0 + 1.5 + 22.5 + 375.0).epsilon(1e-12));
  CHECK(sample_at(v, {3.0, 4.0, 5.0}, InterpMode::Linear) ==
        doctest::Approx(2.0 + 3.0 + 40.0 + 500.0).epsilon(1e-12));
}

TEST_CASE("sampling outside the grid reads zero padding") {
  Volume v(4, 4, 4, 5.0);
  CHECK(sample_at(v, {-1.0, 2.0, 2.0}, InterpMode::Linear) == 0.0);
  CHECK(sample_at(v, {2.0, 2.0, 10.0}, InterpMode::Linear) == 0.0);
  // halfway off the edge blends with zero
  CHECK(sample_at(v, {-0.5, 2.0, 2.0}, InterpMode::Linear) ==
        doctest::Approx(2.5).epsilon(1e-12));
  CHECK(sample_at(v, {-1.0, 2.0, 2.0}, InterpMode::Nearest) == 0.0);
}

TEST_CASE("nearest sampling rounds to the closest voxel") {
  Volume v = testutil::ramp_volume(4, 4, 4, 0.0, 1.0, 4.0, 16.0);
  CHECK(sample_at(v, {1.4, 2.6, 0.0}, InterpMode::Nearest) == v(1, 3, 0));
  CHECK(sample_at(v, {2.5, 1.0, 3.0}, InterpMode::Nearest) == v(3, 1, 3));
}

TEST_CASE("label round trip through float volumes preserves the mask") {
  LabelVolume l = testutil::sphere_label(10, 4.5, 4.5, 4.5, 3.2);
  REQUIRE(l.foreground_count() > 0);
  Volume v = l.to_volume();
  LabelVolume back = LabelVolume::from_volume_threshold(v, 0.5);
  REQUIRE(back.size() == l.size());
  for (std::size_t i = 0; i < l.size(); ++i) {
    CHECK(back.data()[i] == l.data()[i]);
  }
}

TEST_CASE("threshold keeps the midpoint in the foreground") {
  Volume v(2, 1, 1);
  v(0, 0, 0) = 0.5;
  v(1, 0, 0) = 0.4999999;
  LabelVolume l = LabelVolume::from_volume_threshold(v, 0.5);
  CHECK(l(0, 0, 0) == 1);
  CHECK(l(1, 0, 0) == 0);
}
