#pragma once

#include "roodbench/volume.hpp"

namespace roodbench {

// Permutes and flips the data axes so the volume is RAS+ oriented: axis 0
// increases to the Right, axis 1 to Anterior, axis 2 to Superior. Pure
// index remapping, no interpolation; spacing and origin follow the axes.
// Throws std::invalid_argument when the orientation codes are not a valid
// axis permutation.
Volume reorient_to_ras(const Volume& v);
LabelVolume reorient_to_ras(const LabelVolume& l);

// Resamples onto an isotropic grid of `target_mm` spacing. The output
// shape per axis is round(extent / target_mm) with a minimum of 1, and
// output voxel i samples the input at i * (n_in - 1) / (n_out - 1), so
// the first and last voxel centers of both grids coincide.
// Throws std::invalid_argument for a non-positive target.
Volume resample_isotropic(const Volume& v, double target_mm, InterpMode mode);

// Label counterpart: linear resampling of the 0/1 field followed by
// thresholding at 0.5, so the result is again a crisp mask.
LabelVolume resample_label_isotropic(const LabelVolume& l, double target_mm);

// Shifts and scales intensities to zero mean and unit standard deviation
// (population convention) over the whole volume.
// Throws std::invalid_argument for a constant image.
Volume zscore_normalize(const Volume& v);

}  // namespace roodbench
