#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "roodbench/volume.hpp"

namespace roodbench {

/// Per-sample segmentation scores for one (transform, severity) cell.
struct SampleMetrics {
  std::string sample_id;
  std::string transform;  // transform kind name, or "clean"
  int severity = 0;
  double dsc = 0.0;
  std::optional<double> hd95_mm;  // absent for null predictions
  bool null_prediction = false;
};

/// Dice overlap: twice the intersection size over the sum of the two mask
/// sizes. Two empty masks count as perfect agreement (1.0).
/// Throws std::invalid_argument on grid mismatch.
double dice(const LabelVolume& a, const LabelVolume& b);

/// Foreground voxels with at least one face-adjacent (6-connectivity)
/// background voxel; positions outside the grid count as background, so a
/// mask touching the grid edge has boundary there.
std::vector<std::array<std::size_t, 3>> boundary_voxels(const LabelVolume& m);

/// Percentile at rank 0.95 * (n - 1) with linear interpolation between
/// order statistics. The input need not be sorted; must be non-empty.
double percentile95(std::vector<double> values);

/// 95th-percentile Hausdorff distance in mm between the mask boundaries:
/// the larger of the two directed 95th-percentile nearest-boundary
/// distances, computed with voxel spacing. Absent when either mask is
/// empty. Throws std::invalid_argument on grid mismatch.
std::optional<double> hd95(const LabelVolume& a, const LabelVolume& b);

/// Same contract via all-pairs search; the slow reference path used to
/// validate the distance-transform implementation.
std::optional<double> hd95_brute_force(const LabelVolume& a, const LabelVolume& b);

/// Scores a prediction against ground truth. An empty prediction yields
/// dsc per the Dice convention, no hd95, and null_prediction = true.
SampleMetrics evaluate_sample(const LabelVolume& pred, const LabelVolume& gt,
                              const std::string& sample_id,
                              const std::string& transform, int severity);

}  // namespace roodbench
