#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "roodbench/volume.hpp"

namespace roodbench {

/// Spatial-frequency representation of a volume, same x-fastest layout as
/// Volume. The DC component sits at index (0, 0, 0); no fftshift is
/// applied anywhere.
struct KSpace {
  std::array<std::size_t, 3> shape{0, 0, 0};
  std::vector<std::complex<double>> data;

  std::complex<double>& at(std::size_t x, std::size_t y, std::size_t z) {
    return data[x + shape[0] * (y + shape[1] * z)];
  }
  const std::complex<double>& at(std::size_t x, std::size_t y, std::size_t z) const {
    return data[x + shape[0] * (y + shape[1] * z)];
  }

  /// Sum of |K|^2 over all coefficients.
  double energy() const;
};

/// Unnormalized forward 3D DFT. Thread safe; plan setup is serialized
/// internally, execution runs concurrently.
KSpace fft_forward(const Volume& v);

/// Inverse DFT scaled by 1/N followed by a pointwise magnitude, the final
/// step of every k-space corruption. Grid metadata is copied from `meta`.
Volume ifft_magnitude(const KSpace& k, const Volume& meta);

/// Plane indices zeroed by ghosting: every `num_ghosts`-th plane along the
/// axis, excluding a central band of half-width extent/32 around DC
/// (distance measured circularly, so the top of the range is protected
/// too). The band keeps roughly 1/16 of all planes.
std::vector<std::size_t> ghost_zero_planes(std::size_t extent, int num_ghosts);

/// Zeroes whole planes perpendicular to `axis`.
void zero_planes(KSpace& k, int axis, const std::vector<std::size_t>& planes);

/// Copies planes [begin, end) perpendicular to `axis` from src into dst.
/// Shapes must match.
void splice_planes(KSpace& dst, const KSpace& src, int axis, std::size_t begin,
                   std::size_t end);

/// FFT round trip with the given planes zeroed; the building block behind
/// ghosting, exposed so arbitrary (including empty) plane sets can be
/// applied.
Volume zero_kspace_planes(const Volume& v, int axis,
                          const std::vector<std::size_t>& planes);

}  // namespace roodbench
