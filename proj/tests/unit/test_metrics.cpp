#include <algorithm>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "roodbench/seg_metrics.hpp"
#include "helpers.hpp"

using namespace roodbench;

namespace {

LabelVolume empty_label(std::size_t n) {
  return LabelVolume(n, n, n, 0);
}

// brute-force Dice for cross-checks
double dice_reference(const LabelVolume& a, const LabelVolume& b) {
  std::size_t na = 0;
  std::size_t nb = 0;
  std::size_t inter = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a.data()[i];
    nb += b.data()[i];
    inter += a.data()[i] & b.data()[i];
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

}  // namespace

TEST_CASE("dice of half-overlapping two-voxel masks is one half") {
  LabelVolume a = empty_label(4);
  LabelVolume b = empty_label(4);
  a(0, 0, 0) = 1;
  a(1, 0, 0) = 1;
  b(1, 0, 0) = 1;
  b(2, 0, 0) = 1;
  CHECK(dice(a, b) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("dice conventions for empty masks") {
  LabelVolume a = empty_label(4);
  LabelVolume b = empty_label(4);
  CHECK(dice(a, b) == 1.0);
  b(1, 2, 3) = 1;
  CHECK(dice(a, b) == 0.0);
  CHECK(dice(b, a) == 0.0);
}

TEST_CASE("dice of identical masks is one") {
  LabelVolume a = testutil::sphere_label(10, 4.5, 4.5, 4.5, 3.0);
  CHECK(dice(a, a) == 1.0);
}

TEST_CASE("dice requires matching grids") {
  LabelVolume a = empty_label(4);
  LabelVolume b = empty_label(5);
  CHECK_THROWS_AS(dice(a, b), std::invalid_argument);
  LabelVolume c = empty_label(4);
  c.spacing = {1.0, 1.0, 2.0};
  CHECK_THROWS_AS(dice(a, c), std::invalid_argument);
}

TEST_CASE("dice agrees with a direct count on random masks") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngStream rng(seed);
    LabelVolume a = empty_label(8);
    LabelVolume b = empty_label(8);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a.data()[i] = rng.uniform() < 0.3 ? 1 : 0;
      b.data()[i] = rng.uniform() < 0.3 ? 1 : 0;
    }
    REQUIRE(dice(a, b) == doctest::Approx(dice_reference(a, b)).epsilon(1e-15));
  }
}

TEST_CASE("boundary voxels of a solid block exclude its interior") {
  LabelVolume m = empty_label(5);
  for (std::size_t z = 1; z <= 3; ++z) {
    for (std::size_t y = 1; y <= 3; ++y) {
      for (std::size_t x = 1; x <= 3; ++x) {
        m(x, y, z) = 1;
      }
    }
  }
  auto boundary = boundary_voxels(m);
  CHECK(boundary.size() == 26);  // the 3x3x3 shell minus its center
  for (const auto& p : boundary) {
    CHECK(p != std::array<std::size_t, 3>{2, 2, 2});
  }
}

TEST_CASE("the grid edge counts as background for boundary purposes") {
  LabelVolume m(3, 3, 3, 1);
  auto boundary = boundary_voxels(m);
  CHECK(boundary.size() == 26);  // all except the center voxel
}

TEST_CASE("percentile95 interpolates between order statistics") {
  std::vector<double> values(19, 1.0);
  values.push_back(10.0);
  std::mt19937 shuffler(3);
  std::shuffle(values.begin(), values.end(), shuffler);
  // rank 0.95 * 19 = 18.05 between the last two sorted entries
  CHECK(percentile95(values) == doctest::Approx(1.45).epsilon(1e-12));
}

TEST_CASE("percentile95 of degenerate inputs") {
  CHECK(percentile95({7.0}) == 7.0);
  CHECK(percentile95({3.0, 3.0, 3.0}) == 3.0);
  std::vector<double> two{1.0, 2.0};
  CHECK(percentile95(two) == doctest::Approx(1.95).epsilon(1e-12));
}

TEST_CASE("hd95 of two single voxels is their distance") {
  LabelVolume a = empty_label(8);
  LabelVolume b = empty_label(8);
  a(0, 0, 0) = 1;
  b(3, 4, 0) = 1;
  auto d = hd95(a, b);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(5.0).epsilon(1e-12));
  auto rev = hd95(b, a);
  REQUIRE(rev.has_value());
  CHECK(*rev == *d);
}

TEST_CASE("hd95 honors anisotropic spacing") {
  LabelVolume a = empty_label(8);
  LabelVolume b = empty_label(8);
  a.spacing = {1.0, 1.0, 3.0};
  b.spacing = {1.0, 1.0, 3.0};
  a(0, 0, 0) = 1;
  b(0, 0, 2) = 1;
  auto d = hd95(a, b);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("hd95 of identical masks is zero") {
  LabelVolume m = testutil::sphere_label(12, 5.5, 5.5, 5.5, 4.0);
  auto d = hd95(m, m);
  REQUIRE(d.has_value());
  CHECK(*d == 0.0);
}

TEST_CASE("hd95 is absent when either mask is empty") {
  LabelVolume a = empty_label(6);
  LabelVolume b = testutil::cube_label(6, 1, 4);
  CHECK_FALSE(hd95(a, b).has_value());
  CHECK_FALSE(hd95(b, a).has_value());
  CHECK_FALSE(hd95(a, a).has_value());
}

TEST_CASE("hd95 requires matching grids") {
  LabelVolume a = empty_label(4);
  LabelVolume b = empty_label(6);
  a(0, 0, 0) = 1;
  b(0, 0, 0) = 1;
  CHECK_THROWS_AS(hd95(a, b), std::invalid_argument);
}

TEST_CASE("hd95 matches the all-pairs reference on random masks") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(100 + seed);
    LabelVolume a = empty_label(8);
    LabelVolume b = empty_label(8);
    a.spacing = {1.0, 1.25, 0.75};
    b.spacing = {1.0, 1.25, 0.75};
    for (std::size_t i = 0; i < a.size(); ++i) {
      a.data()[i] = rng.uniform() < 0.2 ? 1 : 0;
      b.data()[i] = rng.uniform() < 0.2 ? 1 : 0;
    }
    auto fast = hd95(a, b);
    auto slow = hd95_brute_force(a, b);
    REQUIRE(fast.has_value() == slow.has_value());
    if (fast) {
      REQUIRE(*fast == doctest::Approx(*slow).epsilon(1e-9));
    }
  }
}

TEST_CASE("evaluating a normal prediction fills every field") {
  LabelVolume gt = testutil::sphere_label(12, 5.5, 5.5, 5.5, 4.0);
  LabelVolume pred = testutil::sphere_label(12, 6.5, 5.5, 5.5, 4.0);
  SampleMetrics m = evaluate_sample(pred, gt, "case7", "noise", 3);
  CHECK(m.sample_id == "case7");
  CHECK(m.transform == "noise");
  CHECK(m.severity == 3);
  CHECK_FALSE(m.null_prediction);
  CHECK(m.dsc > 0.5);
  CHECK(m.dsc < 1.0);
  REQUIRE(m.hd95_mm.has_value());
  CHECK(*m.hd95_mm > 0.0);
}

TEST_CASE("an empty prediction is flagged null with no distance") {
  LabelVolume gt = testutil::cube_label(8, 2, 6);
  LabelVolume pred(8, 8, 8, 0);
  SampleMetrics m = evaluate_sample(pred, gt, "s", "clean", 0);
  CHECK(m.null_prediction);
  CHECK(m.dsc == 0.0);
  CHECK_FALSE(m.hd95_mm.has_value());
}

TEST_CASE("an empty prediction on empty ground truth scores one") {
  LabelVolume gt(8, 8, 8, 0);
  LabelVolume pred(8, 8, 8, 0);
  SampleMetrics m = evaluate_sample(pred, gt, "s", "affine", 5);
  CHECK(m.null_prediction);
  CHECK(m.dsc == 1.0);
  CHECK_FALSE(m.hd95_mm.has_value());
}

TEST_CASE("a perfect prediction scores one with zero distance") {
  LabelVolume gt = testutil::sphere_label(10, 4.5, 4.5, 4.5, 3.5);
  SampleMetrics m = evaluate_sample(gt, gt, "s", "clean", 0);
  CHECK_FALSE(m.null_prediction);
  CHECK(m.dsc == 1.0);
  REQUIRE(m.hd95_mm.has_value());
  CHECK(*m.hd95_mm == 0.0);
}
