#include "roodbench/nifti.hpp"

#include <zlib.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace roodbench {

namespace {

// NIfTI-1 fixed-size header. Field layout follows nifti1.h; the unused
// ANALYZE compatibility fields are kept so offsets line up.
#pragma pack(push, 1)
struct Nifti1Header {
  std::int32_t sizeof_hdr;    // must be 348
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1;
  float intent_p2;
  float intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max;
  float cal_min;
  float slice_duration;
  float toffset;
  std::int32_t glmax;
  std::int32_t glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code;
  std::int16_t sform_code;
  float quatern_b;
  float quatern_c;
  float quatern_d;
  float qoffset_x;
  float qoffset_y;
  float qoffset_z;
  float srow_x[4];
  float srow_y[4];
  float srow_z[4];
  char intent_name[16];
  char magic[4];
};
#pragma pack(pop)
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

// Datatype codes from nifti1.h.
constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtInt32 = 8;
constexpr std::int16_t kDtFloat32 = 16;
constexpr std::int16_t kDtFloat64 = 64;
constexpr std::int16_t kDtInt8 = 256;
constexpr std::int16_t kDtUint16 = 512;
constexpr std::int16_t kDtUint32 = 768;

void swap2(void* p) {
  auto* b = static_cast<unsigned char*>(p);
  std::swap(b[0], b[1]);
}

void swap4(void* p) {
  auto* b = static_cast<unsigned char*>(p);
  std::swap(b[0], b[3]);
  std::swap(b[1], b[2]);
}

void swap8(void* p) {
  auto* b = static_cast<unsigned char*>(p);
  std::swap(b[0], b[7]);
  std::swap(b[1], b[6]);
  std::swap(b[2], b[5]);
  std::swap(b[3], b[4]);
}

void swap_header(Nifti1Header& h) {
  swap4(&h.sizeof_hdr);
  swap4(&h.extents);
  swap2(&h.session_error);
  for (auto& d : h.dim) swap2(&d);
  swap4(&h.intent_p1);
  swap4(&h.intent_p2);
  swap4(&h.intent_p3);
  swap2(&h.intent_code);
  swap2(&h.datatype);
  swap2(&h.bitpix);
  swap2(&h.slice_start);
  for (auto& d : h.pixdim) swap4(&d);
  swap4(&h.vox_offset);
  swap4(&h.scl_slope);
  swap4(&h.scl_inter);
  swap2(&h.slice_end);
  swap4(&h.cal_max);
  swap4(&h.cal_min);
  swap4(&h.slice_duration);
  swap4(&h.toffset);
  swap4(&h.glmax);
  swap4(&h.glmin);
  swap2(&h.qform_code);
  swap2(&h.sform_code);
  swap4(&h.quatern_b);
  swap4(&h.quatern_c);
  swap4(&h.quatern_d);
  swap4(&h.qoffset_x);
  swap4(&h.qoffset_y);
  swap4(&h.qoffset_z);
  for (auto& v : h.srow_x) swap4(&v);
  for (auto& v : h.srow_y) swap4(&v);
  for (auto& v : h.srow_z) swap4(&v);
}

class GzReader {
 public:
  explicit GzReader(const std::string& path) : path_(path) {
    // gzread handles both plain and gzip-compressed files transparently
    file_ = gzopen(path.c_str(), "rb");
    if (!file_) throw std::runtime_error("cannot open " + path);
    gzbuffer(file_, 1 << 18);
  }
  ~GzReader() {
    if (file_) gzclose(file_);
  }
  GzReader(const GzReader&) = delete;
  GzReader& operator=(const GzReader&) = delete;

  void read_exact(void* dst, std::size_t n) {
    auto* out = static_cast<unsigned char*>(dst);
    while (n > 0) {
      const unsigned chunk = n > (1u << 30) ? (1u << 30) : static_cast<unsigned>(n);
      const int got = gzread(file_, out, chunk);
      if (got <= 0) throw std::runtime_error("truncated or corrupt file: " + path_);
      out += got;
      n -= static_cast<std::size_t>(got);
    }
  }

  void skip(std::size_t n) {
    std::array<unsigned char, 4096> buf;
    while (n > 0) {
      const std::size_t chunk = n > buf.size() ? buf.size() : n;
      read_exact(buf.data(), chunk);
      n -= chunk;
    }
  }

 private:
  std::string path_;
  gzFile file_ = nullptr;
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Nearest anatomical direction codes for the 3x3 part of a voxel-to-world
// affine. Columns are data axes; greedy assignment on the largest remaining
// entry keeps the result a permutation even for oblique matrices.
OrientationCodes codes_from_matrix(const double m[3][3]) {
  bool row_used[3] = {false, false, false};
  bool col_used[3] = {false, false, false};
  OrientationCodes codes = kRasOrientation;
  for (int n = 0; n < 3; ++n) {
    double best = -1.0;
    int bi = 0, bj = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (row_used[i] || col_used[j]) continue;
        if (std::abs(m[i][j]) > best) {
          best = std::abs(m[i][j]);
          bi = i;
          bj = j;
        }
      }
    }
    row_used[bi] = true;
    col_used[bj] = true;
    codes[bj] = axis_code(bi, m[bi][bj] >= 0.0 ? 1 : -1);
  }
  return codes;
}

// Rotation matrix of the qform quaternion (b, c, d) with qfac applied to
// the third column, as specified in nifti1.h.
void qform_matrix(double b, double c, double d, double qfac, double m[3][3]) {
  double a2 = 1.0 - (b * b + c * c + d * d);
  const double a = a2 > 0.0 ? std::sqrt(a2) : 0.0;
  m[0][0] = a * a + b * b - c * c - d * d;
  m[0][1] = 2 * b * c - 2 * a * d;
  m[0][2] = (2 * b * d + 2 * a * c) * qfac;
  m[1][0] = 2 * b * c + 2 * a * d;
  m[1][1] = a * a + c * c - b * b - d * d;
  m[1][2] = (2 * c * d - 2 * a * b) * qfac;
  m[2][0] = 2 * b * d - 2 * a * c;
  m[2][1] = 2 * c * d + 2 * a * b;
  m[2][2] = (a * a + d * d - c * c - b * b) * qfac;
}

template <typename T>
void convert_voxels(const std::vector<unsigned char>& raw, bool swapped,
                    double slope, double inter, std::vector<double>& out) {
  const std::size_t n = out.size();
  const T* src = reinterpret_cast<const T*>(raw.data());
  for (std::size_t i = 0; i < n; ++i) {
    T v = src[i];
    if (swapped) {
      if constexpr (sizeof(T) == 2) swap2(&v);
      if constexpr (sizeof(T) == 4) swap4(&v);
      if constexpr (sizeof(T) == 8) swap8(&v);
    }
    out[i] = slope * static_cast<double>(v) + inter;
  }
}

}  // namespace

Volume load_volume(const std::string& path) {
  GzReader reader(path);

  Nifti1Header hdr;
  reader.read_exact(&hdr, sizeof(hdr));

  bool swapped = false;
  if (hdr.sizeof_hdr != 348) {
    swap_header(hdr);
    swapped = true;
    if (hdr.sizeof_hdr != 348) {
      throw std::runtime_error(path + " is not a NIfTI-1 file (bad header size)");
    }
  }
  if (std::strncmp(hdr.magic, "n+1", 3) != 0) {
    if (std::strncmp(hdr.magic, "ni1", 3) == 0) {
      throw std::runtime_error(path + ": two-file NIfTI (.hdr/.img) is not supported");
    }
    throw std::runtime_error(path + " is not a NIfTI-1 file (bad magic)");
  }

  const int ndim = hdr.dim[0];
  if (ndim < 1 || ndim > 7) {
    throw std::runtime_error(path + ": malformed dimension count " + std::to_string(ndim));
  }
  for (int i = ndim + 1; i <= 7; ++i) hdr.dim[i] = 1;
  for (int i = 4; i <= 7; ++i) {
    if (hdr.dim[i] > 1) {
      throw std::runtime_error(path + ": expected a 3D image, got " +
                               std::to_string(ndim) + " non-trivial dimensions");
    }
  }
  std::size_t shape[3];
  for (int i = 0; i < 3; ++i) {
    const int d = i < ndim ? hdr.dim[i + 1] : 1;
    if (d < 1) throw std::runtime_error(path + ": malformed dimensions");
    shape[i] = static_cast<std::size_t>(d);
  }

  std::size_t voxel_bytes;
  switch (hdr.datatype) {
    case kDtUint8:
    case kDtInt8:
      voxel_bytes = 1;
      break;
    case kDtInt16:
    case kDtUint16:
      voxel_bytes = 2;
      break;
    case kDtInt32:
    case kDtUint32:
    case kDtFloat32:
      voxel_bytes = 4;
      break;
    case kDtFloat64:
      voxel_bytes = 8;
      break;
    default:
      throw std::runtime_error(path + ": unsupported NIfTI datatype code " +
                               std::to_string(hdr.datatype));
  }

  if (hdr.vox_offset < static_cast<float>(sizeof(hdr))) {
    throw std::runtime_error(path + ": malformed vox_offset");
  }
  reader.skip(static_cast<std::size_t>(hdr.vox_offset) - sizeof(hdr));

  Volume vol(shape[0], shape[1], shape[2]);
  const std::size_t n = vol.size();
  std::vector<unsigned char> raw(n * voxel_bytes);
  reader.read_exact(raw.data(), raw.size());

  // slope 0 means "no scaling stored", not "multiply by zero"
  const double slope = hdr.scl_slope != 0.0f ? static_cast<double>(hdr.scl_slope) : 1.0;
  const double inter = hdr.scl_slope != 0.0f ? static_cast<double>(hdr.scl_inter) : 0.0;

  switch (hdr.datatype) {
    case kDtUint8:
      convert_voxels<std::uint8_t>(raw, false, slope, inter, vol.data());
      break;
    case kDtInt8:
      convert_voxels<std::int8_t>(raw, false, slope, inter, vol.data());
      break;
    case kDtInt16:
      convert_voxels<std::int16_t>(raw, swapped, slope, inter, vol.data());
      break;
    case kDtUint16:
      convert_voxels<std::uint16_t>(raw, swapped, slope, inter, vol.data());
      break;
    case kDtInt32:
      convert_voxels<std::int32_t>(raw, swapped, slope, inter, vol.data());
      break;
    case kDtUint32:
      convert_voxels<std::uint32_t>(raw, swapped, slope, inter, vol.data());
      break;
    case kDtFloat32:
      convert_voxels<float>(raw, swapped, slope, inter, vol.data());
      break;
    case kDtFloat64:
      convert_voxels<double>(raw, swapped, slope, inter, vol.data());
      break;
  }

  double m[3][3];
  if (hdr.sform_code > 0) {
    const float* rows[3] = {hdr.srow_x, hdr.srow_y, hdr.srow_z};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] = rows[i][j];
      vol.origin[i] = rows[i][3];
    }
    vol.orientation = codes_from_matrix(m);
    for (int j = 0; j < 3; ++j) {
      const double norm = std::sqrt(m[0][j] * m[0][j] + m[1][j] * m[1][j] + m[2][j] * m[2][j]);
      vol.spacing[j] = norm > 1e-12 ? norm : 1.0;
    }
  } else if (hdr.qform_code > 0) {
    const double qfac = hdr.pixdim[0] < 0.0f ? -1.0 : 1.0;
    qform_matrix(hdr.quatern_b, hdr.quatern_c, hdr.quatern_d, qfac, m);
    vol.orientation = codes_from_matrix(m);
    vol.origin = {hdr.qoffset_x, hdr.qoffset_y, hdr.qoffset_z};
    for (int j = 0; j < 3; ++j) {
      const double p = std::abs(hdr.pixdim[j + 1]);
      vol.spacing[j] = p > 1e-12 ? p : 1.0;
    }
  } else {
    // no orientation info recorded; treat the data axes as RAS+
    vol.orientation = kRasOrientation;
    vol.origin = {0.0, 0.0, 0.0};
    for (int j = 0; j < 3; ++j) {
      const double p = std::abs(hdr.pixdim[j + 1]);
      vol.spacing[j] = p > 1e-12 ? p : 1.0;
    }
  }

  return vol;
}

LabelVolume load_label(const std::string& path) {
  const Volume v = load_volume(path);
  LabelVolume l(v.shape()[0], v.shape()[1], v.shape()[2]);
  l.spacing = v.spacing;
  l.orientation = v.orientation;
  l.origin = v.origin;
  for (std::size_t i = 0; i < v.size(); ++i) {
    l.data()[i] = v.data()[i] != 0.0 ? 1 : 0;
  }
  return l;
}

namespace {

void fill_header(Nifti1Header& hdr, const std::array<std::size_t, 3>& shape,
                 const std::array<double, 3>& spacing, const OrientationCodes& orientation,
                 const std::array<double, 3>& origin, std::int16_t datatype,
                 std::int16_t bitpix) {
  std::memset(&hdr, 0, sizeof(hdr));
  hdr.sizeof_hdr = 348;
  hdr.regular = 'r';
  hdr.dim[0] = 3;
  for (int i = 0; i < 3; ++i) hdr.dim[i + 1] = static_cast<std::int16_t>(shape[i]);
  for (int i = 4; i <= 7; ++i) hdr.dim[i] = 1;
  hdr.datatype = datatype;
  hdr.bitpix = bitpix;
  hdr.pixdim[0] = 1.0f;
  for (int i = 0; i < 3; ++i) hdr.pixdim[i + 1] = static_cast<float>(spacing[i]);
  hdr.vox_offset = 352.0f;
  hdr.scl_slope = 1.0f;
  hdr.scl_inter = 0.0f;
  hdr.xyzt_units = 2;  // NIFTI_UNITS_MM
  hdr.qform_code = 0;
  hdr.sform_code = 1;  // NIFTI_XFORM_SCANNER_ANAT
  float* rows[3] = {hdr.srow_x, hdr.srow_y, hdr.srow_z};
  for (int j = 0; j < 3; ++j) {
    const int axis = code_axis(orientation[j]);
    const int sign = code_sign(orientation[j]);
    rows[axis][j] = static_cast<float>(sign * spacing[j]);
  }
  for (int i = 0; i < 3; ++i) rows[i][3] = static_cast<float>(origin[i]);
  std::memcpy(hdr.magic, "n+1", 4);
}

void write_nifti(const std::string& path, const Nifti1Header& hdr, const void* voxels,
                 std::size_t voxel_bytes) {
  // "T" writes uncompressed pass-through for plain .nii paths; zlib's gzip
  // header carries mtime 0 so compressed output is byte-identical across runs
  const char* mode = ends_with(path, ".gz") ? "wb6" : "wbT";
  gzFile f = gzopen(path.c_str(), mode);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  gzbuffer(f, 1 << 18);

  bool ok = gzwrite(f, &hdr, sizeof(hdr)) == static_cast<int>(sizeof(hdr));
  const char pad[4] = {0, 0, 0, 0};
  ok = ok && gzwrite(f, pad, 4) == 4;

  const auto* src = static_cast<const unsigned char*>(voxels);
  std::size_t remaining = voxel_bytes;
  while (ok && remaining > 0) {
    const unsigned chunk =
        remaining > (1u << 28) ? (1u << 28) : static_cast<unsigned>(remaining);
    ok = gzwrite(f, src, chunk) == static_cast<int>(chunk);
    src += chunk;
    remaining -= chunk;
  }

  const int close_rc = gzclose(f);
  if (!ok || close_rc != Z_OK) {
    throw std::runtime_error("failed writing " + path);
  }
}

}  // namespace

void save_volume(const std::string& path, const Volume& v, bool as_float64) {
  for (std::size_t d : v.shape()) {
    if (d == 0 || d > 32767) {
      throw std::runtime_error("volume shape does not fit a NIfTI-1 header");
    }
  }
  if (!v.all_finite()) {
    throw std::runtime_error("refusing to write non-finite voxel values to " + path);
  }
  Nifti1Header hdr;
  if (as_float64) {
    fill_header(hdr, v.shape(), v.spacing, v.orientation, v.origin, kDtFloat64, 64);
    write_nifti(path, hdr, v.data().data(), v.size() * sizeof(double));
  } else {
    fill_header(hdr, v.shape(), v.spacing, v.orientation, v.origin, kDtFloat32, 32);
    std::vector<float> buf(v.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
      buf[i] = static_cast<float>(v.data()[i]);
    }
    write_nifti(path, hdr, buf.data(), buf.size() * sizeof(float));
  }
}

void save_label(const std::string& path, const LabelVolume& l) {
  for (std::size_t d : l.shape()) {
    if (d == 0 || d > 32767) {
      throw std::runtime_error("label shape does not fit a NIfTI-1 header");
    }
  }
  Nifti1Header hdr;
  fill_header(hdr, l.shape(), l.spacing, l.orientation, l.origin, kDtUint8, 8);
  write_nifti(path, hdr, l.data().data(), l.size());
}

}  // namespace roodbench
