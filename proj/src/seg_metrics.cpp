#include "roodbench/seg_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace roodbench {

double dice(const LabelVolume& a, const LabelVolume& b) {
  if (!same_grid(a, b)) {
    throw std::invalid_argument("dice: mask grids do not match");
  }
  std::size_t na = 0, nb = 0, inter = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool fa = a.data()[i] != 0;
    const bool fb = b.data()[i] != 0;
    na += fa;
    nb += fb;
    inter += fa && fb;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

std::vector<std::array<std::size_t, 3>> boundary_voxels(const LabelVolume& m) {
  const auto& s = m.shape();
  std::vector<std::array<std::size_t, 3>> out;
  for (std::size_t z = 0; z < s[2]; ++z) {
    for (std::size_t y = 0; y < s[1]; ++y) {
      for (std::size_t x = 0; x < s[0]; ++x) {
        if (!m(x, y, z)) continue;
        const bool boundary =
            x == 0 || !m(x - 1, y, z) || x + 1 == s[0] || !m(x + 1, y, z) ||
            y == 0 || !m(x, y - 1, z) || y + 1 == s[1] || !m(x, y + 1, z) ||
            z == 0 || !m(x, y, z - 1) || z + 1 == s[2] || !m(x, y, z + 1);
        if (boundary) out.push_back({x, y, z});
      }
    }
  }
  return out;
}

double percentile95(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("percentile of an empty list");
  }
  std::sort(values.begin(), values.end());
  const double rank = 0.95 * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(rank);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

namespace {

// Effectively infinite squared distance; finite so the envelope
// arithmetic below never produces NaN.
constexpr double kFar = 1e30;

// Felzenszwalb-Huttenlocher lower envelope of parabolas, generalized to
// sample positions i*w. Transforms f from squared distances at the
// previous pass to squared distances including this axis.
void edt_pass_1d(std::vector<double>& f, double w) {
  const int n = static_cast<int>(f.size());
  if (n == 1) return;
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);
  std::vector<double> out(static_cast<std::size_t>(n));
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (int q = 1; q < n; ++q) {
    const double pq = q * w;
    double s;
    while (true) {
      const double pv = v[static_cast<std::size_t>(k)] * w;
      s = ((f[static_cast<std::size_t>(q)] + pq * pq) -
           (f[static_cast<std::size_t>(v[static_cast<std::size_t>(k)])] + pv * pv)) /
          (2.0 * pq - 2.0 * pv);
      if (s <= z[static_cast<std::size_t>(k)]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    const double pq = q * w;
    while (z[static_cast<std::size_t>(k) + 1] < pq) ++k;
    const double d = pq - v[static_cast<std::size_t>(k)] * w;
    out[static_cast<std::size_t>(q)] =
        d * d + f[static_cast<std::size_t>(v[static_cast<std::size_t>(k)])];
  }
  f = out;
}

// Squared distance in mm from every voxel to the nearest seed voxel.
std::vector<double> edt_squared(const std::array<std::size_t, 3>& shape,
                                const std::array<double, 3>& spacing,
                                const std::vector<std::array<std::size_t, 3>>& seeds) {
  std::vector<double> d(shape[0] * shape[1] * shape[2], kFar);
  for (const auto& p : seeds) {
    d[p[0] + shape[0] * (p[1] + shape[1] * p[2])] = 0.0;
  }
  std::vector<double> line;
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = axis == 0 ? 1 : 0;
    const int a2 = axis == 2 ? 1 : 2;
    line.resize(shape[axis]);
    std::size_t idx[3];
    for (std::size_t u = 0; u < shape[a2]; ++u) {
      idx[a2] = u;
      for (std::size_t q = 0; q < shape[a1]; ++q) {
        idx[a1] = q;
        for (std::size_t i = 0; i < shape[axis]; ++i) {
          idx[axis] = i;
          line[i] = d[idx[0] + shape[0] * (idx[1] + shape[1] * idx[2])];
        }
        edt_pass_1d(line, spacing[axis]);
        for (std::size_t i = 0; i < shape[axis]; ++i) {
          idx[axis] = i;
          d[idx[0] + shape[0] * (idx[1] + shape[1] * idx[2])] = line[i];
        }
      }
    }
  }
  return d;
}

std::vector<double> directed_distances(
    const std::vector<std::array<std::size_t, 3>>& from,
    const std::vector<double>& dist_sq_to_other, const std::array<std::size_t, 3>& shape) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const auto& p : from) {
    out.push_back(std::sqrt(dist_sq_to_other[p[0] + shape[0] * (p[1] + shape[1] * p[2])]));
  }
  return out;
}

}  // namespace

std::optional<double> hd95(const LabelVolume& a, const LabelVolume& b) {
  if (!same_grid(a, b)) {
    throw std::invalid_argument("hd95: mask grids do not match");
  }
  if (a.empty_mask() || b.empty_mask()) return std::nullopt;

  const auto ba = boundary_voxels(a);
  const auto bb = boundary_voxels(b);
  const auto dist_to_a = edt_squared(a.shape(), a.spacing, ba);
  const auto dist_to_b = edt_squared(a.shape(), a.spacing, bb);
  const double p_ab = percentile95(directed_distances(ba, dist_to_b, a.shape()));
  const double p_ba = percentile95(directed_distances(bb, dist_to_a, a.shape()));
  return std::max(p_ab, p_ba);
}

std::optional<double> hd95_brute_force(const LabelVolume& a, const LabelVolume& b) {
  if (!same_grid(a, b)) {
    throw std::invalid_argument("hd95: mask grids do not match");
  }
  if (a.empty_mask() || b.empty_mask()) return std::nullopt;

  const auto ba = boundary_voxels(a);
  const auto bb = boundary_voxels(b);
  const auto& sp = a.spacing;

  auto directed = [&](const std::vector<std::array<std::size_t, 3>>& from,
                      const std::vector<std::array<std::size_t, 3>>& to) {
    std::vector<double> dists;
    dists.reserve(from.size());
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) {
        const double dx = (static_cast<double>(p[0]) - static_cast<double>(q[0])) * sp[0];
        const double dy = (static_cast<double>(p[1]) - static_cast<double>(q[1])) * sp[1];
        const double dz = (static_cast<double>(p[2]) - static_cast<double>(q[2])) * sp[2];
        best = std::min(best, dx * dx + dy * dy + dz * dz);
      }
      dists.push_back(std::sqrt(best));
    }
    return dists;
  };

  const double p_ab = percentile95(directed(ba, bb));
  const double p_ba = percentile95(directed(bb, ba));
  return std::max(p_ab, p_ba);
}

SampleMetrics evaluate_sample(const LabelVolume& pred, const LabelVolume& gt,
                              const std::string& sample_id,
                              const std::string& transform, int severity) {
  if (!same_grid(pred, gt)) {
    throw std::invalid_argument("evaluate_sample: prediction and label grids differ for " +
                                sample_id);
  }
  SampleMetrics m;
  m.sample_id = sample_id;
  m.transform = transform;
  m.severity = severity;
  m.null_prediction = pred.empty_mask();
  m.dsc = dice(pred, gt);
  m.hd95_mm = hd95(pred, gt);
  return m;
}

}  // namespace roodbench
