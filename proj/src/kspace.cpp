#include "roodbench/kspace.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace roodbench {

namespace {

// FFTW planning mutates global state; execution of a ready plan does not.
std::mutex g_fftw_mutex;

void run_dft(const std::array<std::size_t, 3>& shape, std::complex<double>* in,
             std::complex<double>* out, int sign) {
  // our layout is x fastest, i.e. row-major [z][y][x] in FFTW terms
  const int n0 = static_cast<int>(shape[2]);
  const int n1 = static_cast<int>(shape[1]);
  const int n2 = static_cast<int>(shape[0]);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    plan = fftw_plan_dft_3d(n0, n1, n2, reinterpret_cast<fftw_complex*>(in),
                            reinterpret_cast<fftw_complex*>(out), sign, FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("FFTW plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_destroy_plan(plan);
  }
}

}  // namespace

double KSpace::energy() const {
  double e = 0.0;
  for (const auto& c : data) e += std::norm(c);
  return e;
}

KSpace fft_forward(const Volume& v) {
  KSpace k;
  k.shape = v.shape();
  k.data.resize(v.size());
  std::vector<std::complex<double>> in(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) in[i] = v.data()[i];
  run_dft(k.shape, in.data(), k.data.data(), FFTW_FORWARD);
  return k;
}

Volume ifft_magnitude(const KSpace& k, const Volume& meta) {
  if (k.shape != meta.shape()) {
    throw std::invalid_argument("k-space and metadata volume shapes differ");
  }
  std::vector<std::complex<double>> in = k.data;
  std::vector<std::complex<double>> out(k.data.size());
  run_dft(k.shape, in.data(), out.data(), FFTW_BACKWARD);

  Volume v = meta.like();
  const double scale = 1.0 / static_cast<double>(k.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    v.data()[i] = std::abs(out[i]) * scale;
  }
  return v;
}

std::vector<std::size_t> ghost_zero_planes(std::size_t extent, int num_ghosts) {
  if (num_ghosts < 2) {
    throw std::invalid_argument("num_ghosts must be >= 2");
  }
  const std::size_t band = extent / 32;
  std::vector<std::size_t> planes;
  for (std::size_t j = 0; j < extent; j += static_cast<std::size_t>(num_ghosts)) {
    const std::size_t circ = std::min(j, extent - j);
    if (circ <= band) continue;  // preserve the center of k-space
    planes.push_back(j);
  }
  return planes;
}

namespace {

// Calls fn(x, y, z) for every element of the plane at index p along axis.
template <typename Fn>
void for_each_in_plane(const std::array<std::size_t, 3>& shape, int axis, std::size_t p,
                       Fn&& fn) {
  const int a1 = axis == 0 ? 1 : 0;
  const int a2 = axis == 2 ? 1 : 2;
  std::size_t idx[3];
  idx[axis] = p;
  for (std::size_t u = 0; u < shape[a2]; ++u) {
    idx[a2] = u;
    for (std::size_t w = 0; w < shape[a1]; ++w) {
      idx[a1] = w;
      fn(idx[0], idx[1], idx[2]);
    }
  }
}

}  // namespace

void zero_planes(KSpace& k, int axis, const std::vector<std::size_t>& planes) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1, or 2");
  for (std::size_t p : planes) {
    if (p >= k.shape[axis]) {
      throw std::invalid_argument("plane index " + std::to_string(p) +
                                  " outside axis extent " + std::to_string(k.shape[axis]));
    }
    for_each_in_plane(k.shape, axis, p,
                      [&](std::size_t x, std::size_t y, std::size_t z) {
                        k.at(x, y, z) = 0.0;
                      });
  }
}

void splice_planes(KSpace& dst, const KSpace& src, int axis, std::size_t begin,
                   std::size_t end) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1, or 2");
  if (dst.shape != src.shape) throw std::invalid_argument("k-space shape mismatch");
  if (end > dst.shape[axis] || begin > end) {
    throw std::invalid_argument("bad plane range for splice");
  }
  for (std::size_t p = begin; p < end; ++p) {
    for_each_in_plane(dst.shape, axis, p,
                      [&](std::size_t x, std::size_t y, std::size_t z) {
                        dst.at(x, y, z) = src.at(x, y, z);
                      });
  }
}

Volume zero_kspace_planes(const Volume& v, int axis,
                          const std::vector<std::size_t>& planes) {
  KSpace k = fft_forward(v);
  zero_planes(k, axis, planes);
  return ifft_magnitude(k, v);
}

}  // namespace roodbench
