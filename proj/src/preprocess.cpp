#include "roodbench/preprocess.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace roodbench {

namespace {

struct AxisMap {
  // for output (world) axis a: source data axis, and whether it is flipped
  int src_axis[3];
  bool flipped[3];
};

AxisMap ras_axis_map(const OrientationCodes& codes) {
  if (!is_valid_orientation(codes)) {
    throw std::invalid_argument(std::string("invalid orientation codes '") +
                                codes[0] + codes[1] + codes[2] + "'");
  }
  AxisMap map{};
  for (int j = 0; j < 3; ++j) {
    const int a = code_axis(codes[j]);
    map.src_axis[a] = j;
    map.flipped[a] = code_sign(codes[j]) < 0;
  }
  return map;
}

template <typename Vol>
Vol reorient_impl(const Vol& in) {
  const AxisMap map = ras_axis_map(in.orientation);
  const auto& shape = in.shape();

  Vol out(shape[map.src_axis[0]], shape[map.src_axis[1]], shape[map.src_axis[2]]);
  out.orientation = kRasOrientation;
  for (int a = 0; a < 3; ++a) {
    const int j = map.src_axis[a];
    out.spacing[a] = in.spacing[j];
    out.origin[a] = in.origin[a];
    if (map.flipped[a]) {
      out.origin[a] -= in.spacing[j] * static_cast<double>(shape[j] - 1);
    }
  }

  const auto& oshape = out.shape();
  std::size_t idx[3];
  for (std::size_t z = 0; z < oshape[2]; ++z) {
    for (std::size_t y = 0; y < oshape[1]; ++y) {
      for (std::size_t x = 0; x < oshape[0]; ++x) {
        const std::size_t o[3] = {x, y, z};
        for (int a = 0; a < 3; ++a) {
          const int j = map.src_axis[a];
          idx[j] = map.flipped[a] ? shape[j] - 1 - o[a] : o[a];
        }
        out(x, y, z) = in(idx[0], idx[1], idx[2]);
      }
    }
  }
  return out;
}

}  // namespace

Volume reorient_to_ras(const Volume& v) { return reorient_impl(v); }
LabelVolume reorient_to_ras(const LabelVolume& l) { return reorient_impl(l); }

Volume resample_isotropic(const Volume& v, double target_mm, InterpMode mode) {
  if (!(target_mm > 0.0)) {
    throw std::invalid_argument("target spacing must be positive");
  }
  const auto& shape = v.shape();
  std::size_t oshape[3];
  for (int a = 0; a < 3; ++a) {
    const double n = std::round(static_cast<double>(shape[a]) * v.spacing[a] / target_mm);
    oshape[a] = n < 1.0 ? 1 : static_cast<std::size_t>(n);
  }

  Volume out(oshape[0], oshape[1], oshape[2]);
  out.spacing = {target_mm, target_mm, target_mm};
  out.orientation = v.orientation;
  out.origin = v.origin;

  // endpoint-aligned axis mapping; exact identity when shapes match
  double scale[3];
  for (int a = 0; a < 3; ++a) {
    scale[a] = oshape[a] > 1
                   ? static_cast<double>(shape[a] - 1) / static_cast<double>(oshape[a] - 1)
                   : 0.0;
  }

  for (std::size_t z = 0; z < oshape[2]; ++z) {
    const double pz = static_cast<double>(z) * scale[2];
    for (std::size_t y = 0; y < oshape[1]; ++y) {
      const double py = static_cast<double>(y) * scale[1];
      for (std::size_t x = 0; x < oshape[0]; ++x) {
        out(x, y, z) = sample_at(v, {static_cast<double>(x) * scale[0], py, pz}, mode);
      }
    }
  }
  return out;
}

LabelVolume resample_label_isotropic(const LabelVolume& l, double target_mm) {
  const Volume soft = resample_isotropic(l.to_volume(), target_mm, InterpMode::Linear);
  return LabelVolume::from_volume_threshold(soft, 0.5);
}

Volume zscore_normalize(const Volume& v) {
  const double sigma = v.stddev();
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("degenerate intensity distribution");
  }
  const double mu = v.mean();
  Volume out = v.like();
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.data()[i] = (v.data()[i] - mu) / sigma;
  }
  return out;
}

}  // namespace roodbench
