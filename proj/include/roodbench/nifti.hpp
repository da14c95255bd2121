#pragma once

#include <string>

#include "roodbench/volume.hpp"

namespace roodbench {

// Reads a 3D NIfTI-1 image (.nii or .nii.gz) into a double-precision volume.
// Integer and floating point datatypes are converted on load and the
// scl_slope / scl_inter rescaling from the header is applied.  Orientation
// codes are derived from the sform when present, otherwise from the qform.
// Throws std::runtime_error for unreadable files, malformed headers,
// unsupported datatypes, or images with more than three non-trivial
// dimensions.
Volume load_volume(const std::string& path);

// Reads a NIfTI-1 image as a binary mask: any voxel that is nonzero after
// rescaling becomes foreground.
LabelVolume load_label(const std::string& path);

// Writes a volume as NIfTI-1.  Data is stored as float32 unless
// `as_float64` is set.  Paths ending in .gz are gzip compressed.  The
// orientation, spacing, and origin are encoded in the sform (and a matching
// qform code of 0).
void save_volume(const std::string& path, const Volume& v, bool as_float64 = false);

// Writes a mask as uint8 NIfTI-1.
void save_label(const std::string& path, const LabelVolume& l);

}  // namespace roodbench
