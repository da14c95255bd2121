#include "roodbench/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace roodbench {

double Volume::mean() const {
  if (data_.empty()) return 0.0;
  double sum = 0.0;
  for (double v : data_) sum += v;
  return sum / static_cast<double>(data_.size());
}

double Volume::stddev() const {
  if (data_.empty()) return 0.0;
  const double mu = mean();
  double acc = 0.0;
  for (double v : data_) {
    const double d = v - mu;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(data_.size()));
}

std::pair<double, double> Volume::minmax() const {
  if (data_.empty()) return {0.0, 0.0};
  auto [lo, hi] = std::minmax_element(data_.begin(), data_.end());
  return {*lo, *hi};
}

bool Volume::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::size_t LabelVolume::foreground_count() const {
  std::size_t n = 0;
  for (std::uint8_t v : data_) n += (v != 0);
  return n;
}

Volume LabelVolume::to_volume() const {
  Volume v(shape_[0], shape_[1], shape_[2]);
  v.spacing = spacing;
  v.orientation = orientation;
  v.origin = origin;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    v.data()[i] = data_[i] ? 1.0 : 0.0;
  }
  return v;
}

LabelVolume LabelVolume::from_volume_threshold(const Volume& v, double threshold) {
  LabelVolume l(v.shape()[0], v.shape()[1], v.shape()[2]);
  l.spacing = v.spacing;
  l.orientation = v.orientation;
  l.origin = v.origin;
  for (std::size_t i = 0; i < v.size(); ++i) {
    l.data()[i] = v.data()[i] >= threshold ? 1 : 0;
  }
  return l;
}

int code_axis(char code) {
  switch (code) {
    case 'R': case 'L': return 0;
    case 'A': case 'P': return 1;
    case 'S': case 'I': return 2;
    default: return -1;
  }
}

int code_sign(char code) {
  switch (code) {
    case 'R': case 'A': case 'S': return 1;
    case 'L': case 'P': case 'I': return -1;
    default: return 0;
  }
}

char axis_code(int axis, int sign) {
  static const char pos[3] = {'R', 'A', 'S'};
  static const char neg[3] = {'L', 'P', 'I'};
  return sign >= 0 ? pos[axis] : neg[axis];
}

bool is_valid_orientation(const OrientationCodes& codes) {
  bool seen[3] = {false, false, false};
  for (char c : codes) {
    const int a = code_axis(c);
    if (a < 0 || seen[a]) return false;
    seen[a] = true;
  }
  return true;
}

namespace {

bool spacing_close(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  for (int i = 0; i < 3; ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-12});
    if (std::abs(a[i] - b[i]) / scale > 1e-4) return false;
  }
  return true;
}

}  // namespace

bool same_grid(const Volume& a, const Volume& b) {
  return a.shape() == b.shape() && spacing_close(a.spacing, b.spacing);
}
bool same_grid(const LabelVolume& a, const LabelVolume& b) {
  return a.shape() == b.shape() && spacing_close(a.spacing, b.spacing);
}
bool same_grid(const Volume& a, const LabelVolume& b) {
  return a.shape() == b.shape() && spacing_close(a.spacing, b.spacing);
}

double sample_at(const Volume& v, const std::array<double, 3>& p, InterpMode mode) {
  const auto& shape = v.shape();
  if (mode == InterpMode::Nearest) {
    const long long x = std::llround(p[0]);
    const long long y = std::llround(p[1]);
    const long long z = std::llround(p[2]);
    if (x < 0 || y < 0 || z < 0 || x >= static_cast<long long>(shape[0]) ||
        y >= static_cast<long long>(shape[1]) || z >= static_cast<long long>(shape[2])) {
      return 0.0;
    }
    return v(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
             static_cast<std::size_t>(z));
  }

  const double fx = std::floor(p[0]);
  const double fy = std::floor(p[1]);
  const double fz = std::floor(p[2]);
  const long long x0 = static_cast<long long>(fx);
  const long long y0 = static_cast<long long>(fy);
  const long long z0 = static_cast<long long>(fz);
  const double tx = p[0] - fx;
  const double ty = p[1] - fy;
  const double tz = p[2] - fz;

  auto fetch = [&](long long x, long long y, long long z) -> double {
    if (x < 0 || y < 0 || z < 0 || x >= static_cast<long long>(shape[0]) ||
        y >= static_cast<long long>(shape[1]) || z >= static_cast<long long>(shape[2])) {
      return 0.0;  // zero padding outside the grid
    }
    return v(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
             static_cast<std::size_t>(z));
  };

  const double c000 = fetch(x0, y0, z0);
  const double c100 = fetch(x0 + 1, y0, z0);
  const double c010 = fetch(x0, y0 + 1, z0);
  const double c110 = fetch(x0 + 1, y0 + 1, z0);
  const double c001 = fetch(x0, y0, z0 + 1);
  const double c101 = fetch(x0 + 1, y0, z0 + 1);
  const double c011 = fetch(x0, y0 + 1, z0 + 1);
  const double c111 = fetch(x0 + 1, y0 + 1, z0 + 1);

  const double c00 = c000 + (c100 - c000) * tx;
  const double c10 = c010 + (c110 - c010) * tx;
  const double c01 = c001 + (c101 - c001) * tx;
  const double c11 = c011 + (c111 - c011) * tx;
  const double c0 = c00 + (c10 - c00) * ty;
  const double c1 = c01 + (c11 - c01) * ty;
  return c0 + (c1 - c0) * tz;
}

}  // namespace roodbench
