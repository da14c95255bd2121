#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace roodbench {

/// The 11 volume corruption families. Enum order is the canonical
/// reporting order; the string names are stable identifiers used in
/// manifests, metrics files, and on the command line.
enum class TransformKind {
  Noise,
  GammaCompression,
  GammaExpansion,
  Smoothing,
  BiasField,
  Affine,
  ElasticDeformation,
  DownsampleIso,
  DownsampleAniso,
  Ghosting,
  RandomMotion,
};

inline constexpr int kNumTransformKinds = 11;

const std::array<TransformKind, kNumTransformKinds>& all_transform_kinds();

/// Stable string name, e.g. "gamma_compression".
const char* kind_name(TransformKind kind);

/// Reverse lookup; nullopt for unknown names.
std::optional<TransformKind> kind_from_name(std::string_view name);

/// Spatial transforms warp voxel positions, so their ground-truth masks
/// must be warped too. Intensity and k-space transforms leave masks alone.
bool is_spatial(TransformKind kind);

/// Concrete parameter set for one transform application. Only the fields
/// relevant to the kind are consulted; the rest stay at their no-op
/// defaults.
struct TransformParams {
  double sigma_ratio = 0.0;  // noise: sigma_g as a fraction of image sigma
  double gamma = 1.0;        // gamma_compression / gamma_expansion
  double sigma_mm = 0.0;     // smoothing
  double coeff_bound = 0.0;  // bias_field: polynomial coefficients ~ U(-b, b)
  double theta_deg = 0.0;    // affine / random_motion rotation range
  double trans_mm = 0.0;     // affine / random_motion translation range
  double disp_mm = 0.0;      // elastic_deformation control displacement range
  double factor = 1.0;       // downsample_iso / downsample_aniso
  int num_ghosts = 2;        // ghosting
  int num_segments = 0;      // random_motion
};

/// Five parameter sets (severity 1..5) per transform kind. Severity 0 is
/// the clean image everywhere and has no table entry.
class SeverityTable {
 public:
  /// Built-in severity schedule.
  static SeverityTable defaults();

  /// Parses a JSON table and merges it over the defaults. Layout: one
  /// object per transform name, each field an array of 5 values, e.g.
  ///   {"noise": {"sigma_ratio": [0.16, 0.32, 0.48, 0.64, 0.8]}}
  /// Unknown transform names or parameter keys are rejected.
  /// Throws std::invalid_argument on schema or constraint violations.
  static SeverityTable from_json(const nlohmann::json& j);
  static SeverityTable from_json_file(const std::string& path);

  /// Parameters for severity 1..5. Throws std::out_of_range otherwise.
  const TransformParams& params(TransformKind kind, int severity) const;
  TransformParams& params(TransformKind kind, int severity);

  /// Checks the per-field constraints and monotone severity progression.
  /// Throws std::invalid_argument naming the offending entry.
  void validate() const;

  /// Canonical JSON form (all kinds, all fields relevant to each kind).
  nlohmann::json to_json() const;

  /// FNV-1a over the canonical JSON serialization; recorded in manifests
  /// so a regeneration can detect a changed table.
  std::uint64_t checksum() const;

 private:
  std::array<std::array<TransformParams, 5>, kNumTransformKinds> levels_{};
};

/// One transform application: table-driven via (kind, severity) or fully
/// explicit via params. The seed pins down every random draw.
struct TransformSpec {
  TransformKind kind = TransformKind::Noise;
  int severity = 0;  // 0 = clean (no-op), 1..5 = table row
  std::optional<TransformParams> explicit_params;
  std::uint64_t seed = 0;
};

/// Training-time augmentation: with probability `probability` pick one of
/// `kinds` uniformly and sample its parameters uniformly between the no-op
/// point and the listed maxima.
struct AugmentationPolicy {
  double probability = 0.0;
  std::vector<std::pair<TransformKind, TransformParams>> kinds;
};

class RngStream;

/// Returns nullopt when augmentation does not fire; otherwise a spec with
/// explicit parameters. Throws std::invalid_argument for an empty kind
/// list or probability outside [0, 1].
std::optional<TransformSpec> sample_augmentation(const AugmentationPolicy& policy,
                                                 RngStream& rng);

}  // namespace roodbench
