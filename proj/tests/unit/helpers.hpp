#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "roodbench/rng.hpp"
#include "roodbench/volume.hpp"

namespace testutil {

inline roodbench::Volume random_volume(std::size_t nx, std::size_t ny, std::size_t nz,
                                       std::uint64_t seed, double lo = 10.0,
                                       double hi = 100.0) {
  roodbench::Volume v(nx, ny, nz);
  roodbench::RngStream rng(seed);
  for (auto& x : v.data()) {
    x = rng.uniform(lo, hi);
  }
  return v;
}

/// f(x, y, z) = a + bx + cy + dz on the voxel grid.
inline roodbench::Volume ramp_volume(std::size_t nx, std::size_t ny, std::size_t nz,
                                     double a, double b, double c, double d) {
  roodbench::Volume v(nx, ny, nz);
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x) {
        v(x, y, z) = a + b * static_cast<double>(x) + c * static_cast<double>(y) +
                     d * static_cast<double>(z);
      }
    }
  }
  return v;
}

/// Axis-aligned solid cube [lo, hi) on an n^3 grid.
inline roodbench::LabelVolume cube_label(std::size_t n, std::size_t lo,
                                         std::size_t hi) {
  roodbench::LabelVolume l(n, n, n);
  for (std::size_t z = lo; z < hi; ++z) {
    for (std::size_t y = lo; y < hi; ++y) {
      for (std::size_t x = lo; x < hi; ++x) {
        l(x, y, z) = 1;
      }
    }
  }
  return l;
}

inline roodbench::LabelVolume sphere_label(std::size_t n, double cx, double cy,
                                           double cz, double r) {
  roodbench::LabelVolume l(n, n, n);
  for (std::size_t z = 0; z < n; ++z) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t x = 0; x < n; ++x) {
        double dx = static_cast<double>(x) - cx;
        double dy = static_cast<double>(y) - cy;
        double dz = static_cast<double>(z) - cz;
        if (dx * dx + dy * dy + dz * dz <= r * r) {
          l(x, y, z) = 1;
        }
      }
    }
  }
  return l;
}

inline double max_abs_diff(const roodbench::Volume& a, const roodbench::Volume& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

/// ||a - b||_2 / ||b||_2.
inline double rel_error(const roodbench::Volume& a, const roodbench::Volume& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a.data()[i] - b.data()[i];
    num += d * d;
    den += b.data()[i] * b.data()[i];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

/// Fresh empty scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("roodbench_test_" + tag + "_" + std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& name = "") const {
    return name.empty() ? path_.string() : (path_ / name).string();
  }

 private:
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::filesystem::path path_;
};

}  // namespace testutil
