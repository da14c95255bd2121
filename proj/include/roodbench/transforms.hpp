#pragma once

#include <array>
#include <optional>
#include <vector>

#include <json.hpp>

#include "roodbench/rng.hpp"
#include "roodbench/severity.hpp"
#include "roodbench/volume.hpp"

namespace roodbench {

/// One concrete rigid-body draw: Euler angles in degrees composed
/// intrinsically as Z-Y-X about the volume center, plus a world-space
/// translation in mm.
struct RigidDraw {
  std::array<double, 3> euler_deg{0.0, 0.0, 0.0};
  std::array<double, 3> trans_mm{0.0, 0.0, 0.0};
};

/// Euler angles ~ U(-theta, theta) per axis (drawn x, y, z) followed by
/// translation components ~ U(-d, d).
RigidDraw draw_rigid(double theta_deg, double trans_mm, RngStream& rng);

// -- intensity transforms ------------------------------------------------

/// Magnitude of the image after adding independent Gaussian noise to the
/// real and imaginary channel, with sigma_g = sigma_ratio * image sigma.
/// Throws std::invalid_argument for a negative ratio or for a positive
/// ratio on a constant image (where the ratio is undefined).
Volume apply_noise(const Volume& v, double sigma_ratio, RngStream& rng);

/// Same corruption with an absolute noise sigma; usable on constant
/// images.
Volume add_rician_noise(const Volume& v, double sigma_g, RngStream& rng);

/// Gamma contrast change: intensities are mapped to [0, 1] over the
/// image's own range, raised to `gamma`, and mapped back, so the min and
/// max voxel values are preserved exactly.
/// Throws std::invalid_argument for gamma <= 0 or a constant image.
Volume apply_gamma(const Volume& v, double gamma);

/// Separable Gaussian blur with sigma given in mm (converted to voxels
/// per axis), kernel truncated at 4 sigma, edge voxels replicated.
Volume apply_smoothing(const Volume& v, double sigma_mm);

/// Number of monomials x^i y^j z^k with i + j + k <= 3.
inline constexpr int kBiasFieldCoeffCount = 20;

/// Multiplies by exp(B) where B is a random polynomial of degree <= 3
/// with coefficients ~ U(-coeff_bound, coeff_bound).
Volume apply_bias_field(const Volume& v, double coeff_bound, RngStream& rng);

/// Same with explicit coefficients. Monomials are enumerated i outermost,
/// then j, then k (i + j + k <= 3); coordinates are normalized to [-1, 1]
/// per axis.
Volume apply_bias_field_coeffs(const Volume& v,
                               const std::array<double, kBiasFieldCoeffCount>& coeffs);

// -- spatial transforms --------------------------------------------------

/// Pull-back affine resampling S(x) = I(Mx + d) about the volume center
/// in world space; translation converted from mm to voxels via spacing.
Volume apply_affine(const Volume& v, const RigidDraw& draw, InterpMode mode);

/// Spec-shaped wrapper: draws the rigid parameters from rng, then applies.
Volume apply_affine(const Volume& v, double theta_deg, double trans_mm, RngStream& rng,
                    InterpMode mode);

/// Control points per axis of the deformation lattice. Points 1..5 span
/// the volume; points 0 and 6 pad it so the spline support is complete.
inline constexpr int kElasticGridSize = 7;
inline constexpr int kElasticPointCount =
    kElasticGridSize * kElasticGridSize * kElasticGridSize;

/// Per-control-point displacement vectors in mm, x-fastest point order.
using ElasticField = std::vector<std::array<double, 3>>;

/// Displacement components ~ U(-disp_mm, disp_mm), drawn per point in
/// x, y, z component order.
ElasticField draw_elastic_field(double disp_mm, RngStream& rng);

/// Free-form deformation S(x) = I(x + u(x)); u interpolates the control
/// displacements with cubic B-splines (the control values are spline
/// coefficients, so a constant lattice yields exactly that constant
/// displacement everywhere).
Volume apply_elastic(const Volume& v, const ElasticField& field, InterpMode mode);

/// Spec-shaped wrapper: draws the field from rng, then applies.
Volume apply_elastic(const Volume& v, double disp_mm, RngStream& rng, InterpMode mode);

/// Linear downsampling by `factor` along each selected axis followed by
/// linear upsampling back to the original extent. `axes` must select all
/// three axes (isotropic) or exactly one (anisotropic).
Volume apply_downsample(const Volume& v, double factor, const std::array<bool, 3>& axes);

// -- k-space transforms --------------------------------------------------

/// Ghosting: zero every num_ghosts-th k-space plane along the given
/// phase-encoding axis (center band protected), round trip, magnitude.
/// Throws std::invalid_argument when the axis extent is < 2 * num_ghosts.
Volume apply_ghosting(const Volume& v, int num_ghosts, int axis);

/// Spec-shaped wrapper: draws the phase axis from the left-right/
/// anterior-posterior pair (axis 0 or 1).
Volume apply_ghosting(const Volume& v, int num_ghosts, RngStream& rng);

/// Motion: k-space along the phase axis is partitioned into
/// copies.size() + 1 contiguous blocks at sorted distinct cut points
/// drawn from rng; block 0 (containing DC) keeps the original data,
/// block i comes from the i-th rigid-transformed copy.
/// Throws std::invalid_argument when copies.size() + 1 exceeds the axis
/// extent.
Volume apply_random_motion(const Volume& v, const std::vector<RigidDraw>& copies,
                           int axis, RngStream& rng);

/// Spec-shaped wrapper: draws the phase axis, then num_segments rigid
/// draws, then delegates (cut points consumed from the same stream).
Volume apply_random_motion(const Volume& v, int num_segments, double theta_deg,
                           double trans_mm, RngStream& rng);

// -- spec-driven dispatch ------------------------------------------------

/// A TransformSpec with every resolve-time random draw materialized.
/// Applying the image and co-transforming the label through the same
/// ResolvedTransform is what guarantees they share one parameter draw.
struct ResolvedTransform {
  TransformKind kind = TransformKind::Noise;
  int severity = 0;
  bool no_op = false;
  TransformParams params;

  std::optional<RigidDraw> rigid;                 // affine
  ElasticField elastic;                           // elastic_deformation
  std::array<bool, 3> axes{false, false, false};  // downsample selection
  int phase_axis = -1;                            // ghosting / random_motion
  std::vector<RigidDraw> motion_copies;           // random_motion
  std::array<double, kBiasFieldCoeffCount> bias_coeffs{};  // bias_field

  /// Continuation of the seed stream for apply-time draws (noise fields,
  /// motion cut points). Copied on use, so a ResolvedTransform can be
  /// applied repeatedly with identical results.
  RngStream field_rng{0};
};

/// Draws all random parameters of the spec from its seed. Severity 0
/// without explicit parameters resolves to a no-op.
ResolvedTransform resolve(const TransformSpec& spec, const SeverityTable& table);

Volume apply_resolved(const ResolvedTransform& rt, const Volume& v);

/// Warps the mask with the identical geometric draw for spatial kinds
/// (linear interpolation re-thresholded at 0.5); returns the mask
/// unchanged for intensity and k-space kinds. Output is strictly binary.
LabelVolume co_transform_label_resolved(const ResolvedTransform& rt,
                                        const LabelVolume& l);

/// resolve + apply in one step.
Volume apply(const TransformSpec& spec, const SeverityTable& table, const Volume& v);
LabelVolume co_transform_label(const TransformSpec& spec, const SeverityTable& table,
                               const LabelVolume& l);

/// Audit record of the sampled draws (chosen axes, rigid parameters, bias
/// coefficients, control displacements) for the manifest aux column.
nlohmann::json aux_json(const ResolvedTransform& rt);

}  // namespace roodbench
