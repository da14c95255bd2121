#include "roodbench/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "roodbench/kspace.hpp"

namespace roodbench {

RigidDraw draw_rigid(double theta_deg, double trans_mm, RngStream& rng) {
  RigidDraw d;
  for (int a = 0; a < 3; ++a) d.euler_deg[a] = rng.uniform(-theta_deg, theta_deg);
  for (int a = 0; a < 3; ++a) d.trans_mm[a] = rng.uniform(-trans_mm, trans_mm);
  return d;
}

Volume apply_noise(const Volume& v, double sigma_ratio, RngStream& rng) {
  if (sigma_ratio < 0.0) {
    throw std::invalid_argument("noise sigma_ratio must be >= 0");
  }
  const double sigma_img = v.stddev();
  if (sigma_ratio > 0.0 && sigma_img == 0.0) {
    throw std::invalid_argument("noise ratio is undefined for a constant image");
  }
  return add_rician_noise(v, sigma_ratio * sigma_img, rng);
}

Volume add_rician_noise(const Volume& v, double sigma_g, RngStream& rng) {
  if (sigma_g < 0.0) {
    throw std::invalid_argument("noise sigma must be >= 0");
  }
  Volume out = v.like();
  if (sigma_g == 0.0) {
    for (std::size_t i = 0; i < v.size(); ++i) out.data()[i] = std::abs(v.data()[i]);
    return out;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double re = v.data()[i] + rng.normal(sigma_g);
    const double im = rng.normal(sigma_g);
    out.data()[i] = std::sqrt(re * re + im * im);
  }
  return out;
}

Volume apply_gamma(const Volume& v, double gamma) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("gamma must be positive");
  }
  const auto [lo, hi] = v.minmax();
  const double range = hi - lo;
  if (!(range > 0.0)) {
    throw std::invalid_argument("gamma correction is undefined for a constant image");
  }
  Volume out = v.like();
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.data()[i] = lo + range * std::pow((v.data()[i] - lo) / range, gamma);
  }
  return out;
}

namespace {

// In-place 1D Gaussian pass along one axis with edge replication.
void blur_axis(Volume& v, int axis, double sigma_vox) {
  const long long radius = static_cast<long long>(std::ceil(4.0 * sigma_vox));
  if (radius < 1) return;
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  double wsum = 0.0;
  for (long long t = -radius; t <= radius; ++t) {
    const double val = std::exp(-0.5 * (t * t) / (sigma_vox * sigma_vox));
    w[static_cast<std::size_t>(t + radius)] = val;
    wsum += val;
  }
  for (double& x : w) x /= wsum;

  const auto& s = v.shape();
  const long long n = static_cast<long long>(s[axis]);
  const int a1 = axis == 0 ? 1 : 0;
  const int a2 = axis == 2 ? 1 : 2;
  std::vector<double> line(static_cast<std::size_t>(n));
  std::size_t idx[3];
  for (std::size_t u = 0; u < s[a2]; ++u) {
    idx[a2] = u;
    for (std::size_t q = 0; q < s[a1]; ++q) {
      idx[a1] = q;
      for (long long i = 0; i < n; ++i) {
        idx[axis] = static_cast<std::size_t>(i);
        line[static_cast<std::size_t>(i)] = v(idx[0], idx[1], idx[2]);
      }
      for (long long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long long t = -radius; t <= radius; ++t) {
          const long long j = std::clamp(i + t, 0LL, n - 1);
          acc += w[static_cast<std::size_t>(t + radius)] * line[static_cast<std::size_t>(j)];
        }
        idx[axis] = static_cast<std::size_t>(i);
        v(idx[0], idx[1], idx[2]) = acc;
      }
    }
  }
}

}  // namespace

Volume apply_smoothing(const Volume& v, double sigma_mm) {
  if (sigma_mm < 0.0) {
    throw std::invalid_argument("smoothing sigma must be >= 0");
  }
  Volume out = v;
  if (sigma_mm == 0.0) return out;
  for (int axis = 0; axis < 3; ++axis) {
    blur_axis(out, axis, sigma_mm / v.spacing[axis]);
  }
  return out;
}

namespace {

struct Monomial {
  int i, j, k;
};

const std::array<Monomial, kBiasFieldCoeffCount>& bias_monomials() {
  static const auto table = [] {
    std::array<Monomial, kBiasFieldCoeffCount> t{};
    int n = 0;
    for (int i = 0; i <= 3; ++i) {
      for (int j = 0; j <= 3 - i; ++j) {
        for (int k = 0; k <= 3 - i - j; ++k) {
          t[n++] = {i, j, k};
        }
      }
    }
    return t;
  }();
  return table;
}

// index i of extent n mapped to [-1, 1]; a degenerate axis sits at 0
double normalized_coord(std::size_t i, std::size_t n) {
  return n > 1 ? 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0 : 0.0;
}

}  // namespace

Volume apply_bias_field(const Volume& v, double coeff_bound, RngStream& rng) {
  if (coeff_bound < 0.0) {
    throw std::invalid_argument("bias field coefficient bound must be >= 0");
  }
  std::array<double, kBiasFieldCoeffCount> coeffs{};
  for (auto& c : coeffs) c = rng.uniform(-coeff_bound, coeff_bound);
  return apply_bias_field_coeffs(v, coeffs);
}

Volume apply_bias_field_coeffs(const Volume& v,
                               const std::array<double, kBiasFieldCoeffCount>& coeffs) {
  const auto& s = v.shape();
  const auto& mono = bias_monomials();
  Volume out = v.like();

  std::vector<std::array<double, 4>> px(s[0]), py(s[1]), pz(s[2]);
  for (std::size_t x = 0; x < s[0]; ++x) {
    const double c = normalized_coord(x, s[0]);
    px[x] = {1.0, c, c * c, c * c * c};
  }
  for (std::size_t y = 0; y < s[1]; ++y) {
    const double c = normalized_coord(y, s[1]);
    py[y] = {1.0, c, c * c, c * c * c};
  }
  for (std::size_t z = 0; z < s[2]; ++z) {
    const double c = normalized_coord(z, s[2]);
    pz[z] = {1.0, c, c * c, c * c * c};
  }

  for (std::size_t z = 0; z < s[2]; ++z) {
    for (std::size_t y = 0; y < s[1]; ++y) {
      for (std::size_t x = 0; x < s[0]; ++x) {
        double b = 0.0;
        for (int n = 0; n < kBiasFieldCoeffCount; ++n) {
          b += coeffs[n] * px[x][mono[n].i] * py[y][mono[n].j] * pz[z][mono[n].k];
        }
        out(x, y, z) = std::exp(b) * v(x, y, z);
      }
    }
  }
  return out;
}

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) m[i][j] += a[i][k] * b[k][j];
    }
  }
  return m;
}

// intrinsic Z-Y-X rotation: M = Rz * Ry * Rx, angles in degrees
Mat3 euler_zyx(const std::array<double, 3>& euler_deg) {
  const double d2r = 3.14159265358979323846 / 180.0;
  const double cx = std::cos(euler_deg[0] * d2r), sx = std::sin(euler_deg[0] * d2r);
  const double cy = std::cos(euler_deg[1] * d2r), sy = std::sin(euler_deg[1] * d2r);
  const double cz = std::cos(euler_deg[2] * d2r), sz = std::sin(euler_deg[2] * d2r);
  const Mat3 rx{{{1, 0, 0}, {0, cx, -sx}, {0, sx, cx}}};
  const Mat3 ry{{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}}};
  const Mat3 rz{{{cz, -sz, 0}, {sz, cz, 0}, {0, 0, 1}}};
  return matmul(rz, matmul(ry, rx));
}

}  // namespace

Volume apply_affine(const Volume& v, const RigidDraw& draw, InterpMode mode) {
  const Mat3 m = euler_zyx(draw.euler_deg);
  const auto& s = v.shape();
  double center[3];
  for (int a = 0; a < 3; ++a) center[a] = (static_cast<double>(s[a]) - 1.0) / 2.0;

  Volume out = v.like();
  for (std::size_t z = 0; z < s[2]; ++z) {
    for (std::size_t y = 0; y < s[1]; ++y) {
      for (std::size_t x = 0; x < s[0]; ++x) {
        const double p[3] = {(static_cast<double>(x) - center[0]) * v.spacing[0],
                             (static_cast<double>(y) - center[1]) * v.spacing[1],
                             (static_cast<double>(z) - center[2]) * v.spacing[2]};
        std::array<double, 3> q;
        for (int a = 0; a < 3; ++a) {
          const double mm =
              m[a][0] * p[0] + m[a][1] * p[1] + m[a][2] * p[2] + draw.trans_mm[a];
          q[a] = mm / v.spacing[a] + center[a];
        }
        out(x, y, z) = sample_at(v, q, mode);
      }
    }
  }
  return out;
}

Volume apply_affine(const Volume& v, double theta_deg, double trans_mm, RngStream& rng,
                    InterpMode mode) {
  if (theta_deg < 0.0 || trans_mm < 0.0) {
    throw std::invalid_argument("affine parameter ranges must be >= 0");
  }
  return apply_affine(v, draw_rigid(theta_deg, trans_mm, rng), mode);
}

ElasticField draw_elastic_field(double disp_mm, RngStream& rng) {
  if (disp_mm < 0.0) {
    throw std::invalid_argument("elastic displacement range must be >= 0");
  }
  ElasticField field(kElasticPointCount);
  for (auto& d : field) {
    for (int a = 0; a < 3; ++a) d[a] = rng.uniform(-disp_mm, disp_mm);
  }
  return field;
}

namespace {

// Cubic B-spline basis centered at 0, support (-2, 2).
double bspline3(double s) {
  const double a = std::abs(s);
  if (a >= 2.0) return 0.0;
  if (a >= 1.0) {
    const double t = 2.0 - a;
    return t * t * t / 6.0;
  }
  return 2.0 / 3.0 - a * a + a * a * a / 2.0;
}

struct SplineTaps {
  int base;             // first control index of the 4-point support
  double w[4];
};

// Voxel index -> lattice coordinate 1 + 4*i/(n-1), so the volume spans
// control points 1..5 and points 0 and 6 act as padding. The base is
// clamped to [0, 3]; the clamp only reorders zero-weight taps.
std::vector<SplineTaps> spline_taps(std::size_t n) {
  std::vector<SplineTaps> taps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t =
        n > 1 ? 1.0 + 4.0 * static_cast<double>(i) / static_cast<double>(n - 1) : 3.0;
    int base = static_cast<int>(std::floor(t)) - 1;
    base = std::clamp(base, 0, kElasticGridSize - 4);
    taps[i].base = base;
    for (int m = 0; m < 4; ++m) {
      taps[i].w[m] = bspline3(t - static_cast<double>(base + m));
    }
  }
  return taps;
}

}  // namespace

Volume apply_elastic(const Volume& v, const ElasticField& field, InterpMode mode) {
  if (field.size() != static_cast<std::size_t>(kElasticPointCount)) {
    throw std::invalid_argument("elastic field must have " +
                                std::to_string(kElasticPointCount) + " control points");
  }
  const auto& s = v.shape();
  const auto tx = spline_taps(s[0]);
  const auto ty = spline_taps(s[1]);
  const auto tz = spline_taps(s[2]);

  Volume out = v.like();
  for (std::size_t z = 0; z < s[2]; ++z) {
    for (std::size_t y = 0; y < s[1]; ++y) {
      for (std::size_t x = 0; x < s[0]; ++x) {
        double u[3] = {0.0, 0.0, 0.0};
        for (int mz = 0; mz < 4; ++mz) {
          const double wz = tz[z].w[mz];
          if (wz == 0.0) continue;
          const int cz = tz[z].base + mz;
          for (int my = 0; my < 4; ++my) {
            const double wyz = ty[y].w[my] * wz;
            if (wyz == 0.0) continue;
            const int cy = ty[y].base + my;
            for (int mx = 0; mx < 4; ++mx) {
              const double w = tx[x].w[mx] * wyz;
              if (w == 0.0) continue;
              const auto& c =
                  field[static_cast<std::size_t>(tx[x].base + mx) +
                        static_cast<std::size_t>(kElasticGridSize) *
                            (static_cast<std::size_t>(cy) +
                             static_cast<std::size_t>(kElasticGridSize) *
                                 static_cast<std::size_t>(cz))];
              u[0] += w * c[0];
              u[1] += w * c[1];
              u[2] += w * c[2];
            }
          }
        }
        const std::array<double, 3> q = {
            static_cast<double>(x) + u[0] / v.spacing[0],
            static_cast<double>(y) + u[1] / v.spacing[1],
            static_cast<double>(z) + u[2] / v.spacing[2]};
        out(x, y, z) = sample_at(v, q, mode);
      }
    }
  }
  return out;
}

Volume apply_elastic(const Volume& v, double disp_mm, RngStream& rng, InterpMode mode) {
  return apply_elastic(v, draw_elastic_field(disp_mm, rng), mode);
}

namespace {

// Endpoint-aligned linear resampling along a single axis.
Volume resample_axis_linear(const Volume& in, int axis, std::size_t n_out) {
  auto shape = in.shape();
  const std::size_t n_in = shape[axis];
  shape[axis] = n_out;
  Volume out(shape[0], shape[1], shape[2]);
  out.spacing = in.spacing;
  out.orientation = in.orientation;
  out.origin = in.origin;

  const double scale =
      n_out > 1 ? static_cast<double>(n_in - 1) / static_cast<double>(n_out - 1) : 0.0;
  for (std::size_t z = 0; z < shape[2]; ++z) {
    for (std::size_t y = 0; y < shape[1]; ++y) {
      for (std::size_t x = 0; x < shape[0]; ++x) {
        std::size_t idx[3] = {x, y, z};
        const double t = static_cast<double>(idx[axis]) * scale;
        const std::size_t i0 = static_cast<std::size_t>(t);
        const std::size_t i1 = std::min(i0 + 1, n_in - 1);
        const double frac = t - static_cast<double>(i0);
        idx[axis] = i0;
        const double a = in(idx[0], idx[1], idx[2]);
        idx[axis] = i1;
        const double b = in(idx[0], idx[1], idx[2]);
        out(x, y, z) = a + (b - a) * frac;
      }
    }
  }
  return out;
}

}  // namespace

Volume apply_downsample(const Volume& v, double factor, const std::array<bool, 3>& axes) {
  if (!(factor >= 1.0)) {
    throw std::invalid_argument("downsampling factor must be >= 1");
  }
  const int selected = static_cast<int>(axes[0]) + axes[1] + axes[2];
  if (selected != 1 && selected != 3) {
    throw std::invalid_argument("downsampling needs one selected axis or all three");
  }
  Volume cur = v;
  for (int axis = 0; axis < 3; ++axis) {
    if (!axes[axis]) continue;
    const std::size_t n = v.shape()[axis];
    std::size_t n_down = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) / factor));
    n_down = std::clamp<std::size_t>(n_down, std::min<std::size_t>(2, n), n);
    if (n_down == n) continue;
    cur = resample_axis_linear(cur, axis, n_down);
    cur = resample_axis_linear(cur, axis, n);
  }
  return cur;
}

Volume apply_ghosting(const Volume& v, int num_ghosts, int axis) {
  if (num_ghosts < 2) {
    throw std::invalid_argument("num_ghosts must be >= 2");
  }
  if (axis < 0 || axis > 2) {
    throw std::invalid_argument("ghosting axis must be 0, 1, or 2");
  }
  const std::size_t extent = v.shape()[axis];
  if (extent < 2 * static_cast<std::size_t>(num_ghosts)) {
    throw std::invalid_argument(
        "ghosting axis extent " + std::to_string(extent) + " is smaller than 2*" +
        std::to_string(num_ghosts));
  }
  return zero_kspace_planes(v, axis, ghost_zero_planes(extent, num_ghosts));
}

Volume apply_ghosting(const Volume& v, int num_ghosts, RngStream& rng) {
  const int axis = static_cast<int>(rng.uniform_int(0, 1));
  return apply_ghosting(v, num_ghosts, axis);
}

Volume apply_random_motion(const Volume& v, const std::vector<RigidDraw>& copies,
                           int axis, RngStream& rng) {
  if (axis < 0 || axis > 2) {
    throw std::invalid_argument("motion axis must be 0, 1, or 2");
  }
  const std::size_t extent = v.shape()[axis];
  const std::size_t n = copies.size();
  if (n + 1 > extent) {
    throw std::invalid_argument("motion segment count " + std::to_string(n) +
                                " + 1 exceeds axis extent " + std::to_string(extent));
  }

  KSpace k = fft_forward(v);
  if (n > 0) {
    // distinct sorted cut points in [1, extent - 1]
    std::vector<std::size_t> cuts;
    while (cuts.size() < n) {
      const auto c = static_cast<std::size_t>(
          rng.uniform_int(1, static_cast<std::int64_t>(extent) - 1));
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());

    for (std::size_t i = 0; i < n; ++i) {
      const Volume moved = apply_affine(v, copies[i], InterpMode::Linear);
      const KSpace ki = fft_forward(moved);
      const std::size_t begin = cuts[i];
      const std::size_t end = i + 1 < n ? cuts[i + 1] : extent;
      splice_planes(k, ki, axis, begin, end);
    }
  }
  return ifft_magnitude(k, v);
}

Volume apply_random_motion(const Volume& v, int num_segments, double theta_deg,
                           double trans_mm, RngStream& rng) {
  if (num_segments < 0) {
    throw std::invalid_argument("num_segments must be >= 0");
  }
  const int axis = static_cast<int>(rng.uniform_int(0, 1));
  std::vector<RigidDraw> copies;
  copies.reserve(static_cast<std::size_t>(num_segments));
  for (int i = 0; i < num_segments; ++i) {
    copies.push_back(draw_rigid(theta_deg, trans_mm, rng));
  }
  return apply_random_motion(v, copies, axis, rng);
}

ResolvedTransform resolve(const TransformSpec& spec, const SeverityTable& table) {
  ResolvedTransform rt;
  rt.kind = spec.kind;
  rt.severity = spec.severity;

  RngStream rng(spec.seed);
  if (spec.explicit_params) {
    rt.params = *spec.explicit_params;
  } else if (spec.severity == 0) {
    rt.no_op = true;
    rt.field_rng = rng;
    return rt;
  } else {
    rt.params = table.params(spec.kind, spec.severity);
  }

  switch (spec.kind) {
    case TransformKind::BiasField:
      for (auto& c : rt.bias_coeffs) {
        c = rng.uniform(-rt.params.coeff_bound, rt.params.coeff_bound);
      }
      break;
    case TransformKind::Affine:
      rt.rigid = draw_rigid(rt.params.theta_deg, rt.params.trans_mm, rng);
      break;
    case TransformKind::ElasticDeformation:
      rt.elastic = draw_elastic_field(rt.params.disp_mm, rng);
      break;
    case TransformKind::DownsampleIso:
      rt.axes = {true, true, true};
      break;
    case TransformKind::DownsampleAniso:
      rt.axes[static_cast<std::size_t>(rng.uniform_int(0, 2))] = true;
      break;
    case TransformKind::Ghosting:
      rt.phase_axis = static_cast<int>(rng.uniform_int(0, 1));
      break;
    case TransformKind::RandomMotion:
      rt.phase_axis = static_cast<int>(rng.uniform_int(0, 1));
      for (int i = 0; i < rt.params.num_segments; ++i) {
        rt.motion_copies.push_back(
            draw_rigid(rt.params.theta_deg, rt.params.trans_mm, rng));
      }
      break;
    default:
      break;
  }
  rt.field_rng = rng;
  return rt;
}

Volume apply_resolved(const ResolvedTransform& rt, const Volume& v) {
  if (rt.no_op) return v;
  RngStream rng = rt.field_rng;
  switch (rt.kind) {
    case TransformKind::Noise:
      return apply_noise(v, rt.params.sigma_ratio, rng);
    case TransformKind::GammaCompression:
    case TransformKind::GammaExpansion:
      return apply_gamma(v, rt.params.gamma);
    case TransformKind::Smoothing:
      return apply_smoothing(v, rt.params.sigma_mm);
    case TransformKind::BiasField:
      return apply_bias_field_coeffs(v, rt.bias_coeffs);
    case TransformKind::Affine:
      return apply_affine(v, *rt.rigid, InterpMode::Linear);
    case TransformKind::ElasticDeformation:
      return apply_elastic(v, rt.elastic, InterpMode::Linear);
    case TransformKind::DownsampleIso:
    case TransformKind::DownsampleAniso:
      return apply_downsample(v, rt.params.factor, rt.axes);
    case TransformKind::Ghosting:
      return apply_ghosting(v, rt.params.num_ghosts, rt.phase_axis);
    case TransformKind::RandomMotion:
      return apply_random_motion(v, rt.motion_copies, rt.phase_axis, rng);
  }
  throw std::logic_error("unhandled transform kind");
}

LabelVolume co_transform_label_resolved(const ResolvedTransform& rt,
                                        const LabelVolume& l) {
  if (rt.no_op || !is_spatial(rt.kind)) return l;
  const Volume soft = apply_resolved(rt, l.to_volume());
  return LabelVolume::from_volume_threshold(soft, 0.5);
}

Volume apply(const TransformSpec& spec, const SeverityTable& table, const Volume& v) {
  return apply_resolved(resolve(spec, table), v);
}

LabelVolume co_transform_label(const TransformSpec& spec, const SeverityTable& table,
                               const LabelVolume& l) {
  return co_transform_label_resolved(resolve(spec, table), l);
}

nlohmann::json aux_json(const ResolvedTransform& rt) {
  nlohmann::json j = nlohmann::json::object();
  if (rt.no_op) return j;
  switch (rt.kind) {
    case TransformKind::BiasField:
      j["bias_coeffs"] = rt.bias_coeffs;
      break;
    case TransformKind::Affine:
      j["euler_deg"] = rt.rigid->euler_deg;
      j["trans_mm"] = rt.rigid->trans_mm;
      break;
    case TransformKind::ElasticDeformation: {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& d : rt.elastic) pts.push_back(d);
      j["control_disp_mm"] = pts;
      break;
    }
    case TransformKind::DownsampleAniso:
      for (int a = 0; a < 3; ++a) {
        if (rt.axes[a]) j["axis"] = a;
      }
      break;
    case TransformKind::Ghosting:
      j["axis"] = rt.phase_axis;
      break;
    case TransformKind::RandomMotion: {
      j["axis"] = rt.phase_axis;
      nlohmann::json copies = nlohmann::json::array();
      for (const auto& c : rt.motion_copies) {
        copies.push_back({{"euler_deg", c.euler_deg}, {"trans_mm", c.trans_mm}});
      }
      j["copies"] = copies;
      break;
    }
    default:
      break;
  }
  return j;
}

}  // namespace roodbench
