#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace roodbench {

enum class InterpMode { Linear, Nearest };

/// Per-axis anatomical direction codes; data axis i increases toward
/// orientation[i]. Letters come from {R,L}, {A,P}, {S,I} with one letter
/// per pair. RAS+ is {'R','A','S'}.
using OrientationCodes = std::array<char, 3>;

inline constexpr OrientationCodes kRasOrientation{'R', 'A', 'S'};

/// 3D scalar grid with voxel spacing (mm), anatomical orientation codes and
/// world-space origin. Values are stored as double; x is the fastest axis.
class Volume {
 public:
  Volume() = default;
  Volume(std::size_t h, std::size_t w, std::size_t d, double fill = 0.0)
      : shape_{h, w, d}, data_(h * w * d, fill) {}

  const std::array<std::size_t, 3>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t x, std::size_t y, std::size_t z) {
    return data_[x + shape_[0] * (y + shape_[1] * z)];
  }
  double operator()(std::size_t x, std::size_t y, std::size_t z) const {
    return data_[x + shape_[0] * (y + shape_[1] * z)];
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// New volume with this volume's grid metadata and zero-filled data.
  Volume like() const {
    Volume v(shape_[0], shape_[1], shape_[2]);
    v.spacing = spacing;
    v.orientation = orientation;
    v.origin = origin;
    return v;
  }

  double mean() const;
  /// Population (biased) standard deviation over all voxels.
  double stddev() const;
  std::pair<double, double> minmax() const;
  bool all_finite() const;

  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  OrientationCodes orientation = kRasOrientation;
  std::array<double, 3> origin{0.0, 0.0, 0.0};

 private:
  std::array<std::size_t, 3> shape_{0, 0, 0};
  std::vector<double> data_;
};

/// Binary mask on the same kind of grid as Volume; voxels are exactly 0 or 1.
class LabelVolume {
 public:
  LabelVolume() = default;
  LabelVolume(std::size_t h, std::size_t w, std::size_t d, std::uint8_t fill = 0)
      : shape_{h, w, d}, data_(h * w * d, fill) {}

  const std::array<std::size_t, 3>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  std::uint8_t& operator()(std::size_t x, std::size_t y, std::size_t z) {
    return data_[x + shape_[0] * (y + shape_[1] * z)];
  }
  std::uint8_t operator()(std::size_t x, std::size_t y, std::size_t z) const {
    return data_[x + shape_[0] * (y + shape_[1] * z)];
  }

  std::vector<std::uint8_t>& data() { return data_; }
  const std::vector<std::uint8_t>& data() const { return data_; }

  LabelVolume like() const {
    LabelVolume l(shape_[0], shape_[1], shape_[2]);
    l.spacing = spacing;
    l.orientation = orientation;
    l.origin = origin;
    return l;
  }

  /// Number of foreground voxels.
  std::size_t foreground_count() const;
  bool empty_mask() const { return foreground_count() == 0; }

  /// Mask as a float volume (0.0/1.0) sharing the grid metadata.
  Volume to_volume() const;
  /// Threshold a float volume at 0.5 back into a mask.
  static LabelVolume from_volume_threshold(const Volume& v, double threshold = 0.5);

  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  OrientationCodes orientation = kRasOrientation;
  std::array<double, 3> origin{0.0, 0.0, 0.0};

 private:
  std::array<std::size_t, 3> shape_{0, 0, 0};
  std::vector<std::uint8_t> data_;
};

/// World axis a direction code moves along: R/L -> 0, A/P -> 1, S/I -> 2.
/// Returns -1 for an unknown letter.
int code_axis(char code);
/// +1 for R/A/S, -1 for L/P/I, 0 for an unknown letter.
int code_sign(char code);
/// Inverse of the two above, e.g. axis_code(1, -1) == 'P'.
char axis_code(int axis, int sign);
/// True when the three codes cover all three world axes exactly once.
bool is_valid_orientation(const OrientationCodes& codes);

/// True when the two grids have identical shape and spacing within
/// header precision (1e-4 relative on spacing).
bool same_grid(const Volume& a, const Volume& b);
bool same_grid(const LabelVolume& a, const LabelVolume& b);
bool same_grid(const Volume& a, const LabelVolume& b);

/// Interpolated sample at a continuous voxel-space coordinate.
/// Linear mode is trilinear over the 8 surrounding voxels, nearest mode
/// rounds to the closest voxel. Coordinates outside the grid read as 0.
double sample_at(const Volume& v, const std::array<double, 3>& p, InterpMode mode);

}  // namespace roodbench
