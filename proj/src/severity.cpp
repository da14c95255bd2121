#include "roodbench/severity.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "roodbench/rng.hpp"

namespace roodbench {

const std::array<TransformKind, kNumTransformKinds>& all_transform_kinds() {
  static const std::array<TransformKind, kNumTransformKinds> kinds = {
      TransformKind::Noise,          TransformKind::GammaCompression,
      TransformKind::GammaExpansion, TransformKind::Smoothing,
      TransformKind::BiasField,      TransformKind::Affine,
      TransformKind::ElasticDeformation, TransformKind::DownsampleIso,
      TransformKind::DownsampleAniso,    TransformKind::Ghosting,
      TransformKind::RandomMotion,
  };
  return kinds;
}

const char* kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::Noise: return "noise";
    case TransformKind::GammaCompression: return "gamma_compression";
    case TransformKind::GammaExpansion: return "gamma_expansion";
    case TransformKind::Smoothing: return "smoothing";
    case TransformKind::BiasField: return "bias_field";
    case TransformKind::Affine: return "affine";
    case TransformKind::ElasticDeformation: return "elastic_deformation";
    case TransformKind::DownsampleIso: return "downsample_iso";
    case TransformKind::DownsampleAniso: return "downsample_aniso";
    case TransformKind::Ghosting: return "ghosting";
    case TransformKind::RandomMotion: return "random_motion";
  }
  return "unknown";
}

std::optional<TransformKind> kind_from_name(std::string_view name) {
  for (TransformKind k : all_transform_kinds()) {
    if (name == kind_name(k)) return k;
  }
  return std::nullopt;
}

bool is_spatial(TransformKind kind) {
  switch (kind) {
    case TransformKind::Affine:
    case TransformKind::ElasticDeformation:
    case TransformKind::DownsampleIso:
    case TransformKind::DownsampleAniso:
      return true;
    default:
      return false;
  }
}

namespace {

// Declarative schema tying JSON keys to TransformParams fields, with the
// validation bounds for each parameter.
struct FieldDesc {
  const char* key;
  bool is_int;
  double TransformParams::* dmember;
  int TransformParams::* imember;
  double min_value;
  // monotonicity measure: plain value, or distance from 1 for gamma
  bool distance_from_one;
};

const std::vector<FieldDesc>& fields_for(TransformKind kind) {
  static const std::vector<FieldDesc> noise = {
      {"sigma_ratio", false, &TransformParams::sigma_ratio, nullptr, 0.0, false}};
  static const std::vector<FieldDesc> gamma = {
      {"gamma", false, &TransformParams::gamma, nullptr, 1e-9, true}};
  static const std::vector<FieldDesc> smoothing = {
      {"sigma_mm", false, &TransformParams::sigma_mm, nullptr, 0.0, false}};
  static const std::vector<FieldDesc> bias = {
      {"coeff_bound", false, &TransformParams::coeff_bound, nullptr, 0.0, false}};
  static const std::vector<FieldDesc> affine = {
      {"theta_deg", false, &TransformParams::theta_deg, nullptr, 0.0, false},
      {"trans_mm", false, &TransformParams::trans_mm, nullptr, 0.0, false}};
  static const std::vector<FieldDesc> elastic = {
      {"disp_mm", false, &TransformParams::disp_mm, nullptr, 0.0, false}};
  static const std::vector<FieldDesc> downsample = {
      {"factor", false, &TransformParams::factor, nullptr, 1.0, false}};
  static const std::vector<FieldDesc> ghosting = {
      {"num_ghosts", true, nullptr, &TransformParams::num_ghosts, 2.0, false}};
  static const std::vector<FieldDesc> motion = {
      {"num_segments", true, nullptr, &TransformParams::num_segments, 1.0, false},
      {"theta_deg", false, &TransformParams::theta_deg, nullptr, 0.0, false},
      {"trans_mm", false, &TransformParams::trans_mm, nullptr, 0.0, false}};
  switch (kind) {
    case TransformKind::Noise: return noise;
    case TransformKind::GammaCompression:
    case TransformKind::GammaExpansion: return gamma;
    case TransformKind::Smoothing: return smoothing;
    case TransformKind::BiasField: return bias;
    case TransformKind::Affine: return affine;
    case TransformKind::ElasticDeformation: return elastic;
    case TransformKind::DownsampleIso:
    case TransformKind::DownsampleAniso: return downsample;
    case TransformKind::Ghosting: return ghosting;
    case TransformKind::RandomMotion: return motion;
  }
  return noise;
}

double field_value(const TransformParams& p, const FieldDesc& f) {
  return f.is_int ? static_cast<double>(p.*(f.imember)) : p.*(f.dmember);
}

}  // namespace

SeverityTable SeverityTable::defaults() {
  SeverityTable t;
  const double noise[5] = {0.16, 0.32, 0.48, 0.64, 0.80};
  const double gamma_c[5] = {0.86, 0.72, 0.58, 0.44, 0.30};
  const double sigma[5] = {0.5, 1.0, 1.5, 2.0, 2.5};
  const double bias[5] = {0.2, 0.4, 0.6, 0.8, 1.0};
  const double aff_theta[5] = {6, 12, 18, 24, 30};
  const double aff_trans[5] = {8, 16, 24, 32, 40};
  const double disp[5] = {6, 12, 18, 24, 30};
  const double factor_iso[5] = {1.5, 2.0, 2.5, 3.0, 4.0};
  const double factor_aniso[5] = {2, 3, 4, 5, 6};
  const int ghosts[5] = {2, 3, 4, 6, 8};
  const int segments[5] = {1, 2, 3, 4, 5};
  const double mot_theta[5] = {2, 4, 6, 8, 10};
  const double mot_trans[5] = {2, 4, 6, 8, 10};

  for (int s = 0; s < 5; ++s) {
    t.params(TransformKind::Noise, s + 1).sigma_ratio = noise[s];
    t.params(TransformKind::GammaCompression, s + 1).gamma = gamma_c[s];
    t.params(TransformKind::GammaExpansion, s + 1).gamma = 1.0 / gamma_c[s];
    t.params(TransformKind::Smoothing, s + 1).sigma_mm = sigma[s];
    t.params(TransformKind::BiasField, s + 1).coeff_bound = bias[s];
    t.params(TransformKind::Affine, s + 1).theta_deg = aff_theta[s];
    t.params(TransformKind::Affine, s + 1).trans_mm = aff_trans[s];
    t.params(TransformKind::ElasticDeformation, s + 1).disp_mm = disp[s];
    t.params(TransformKind::DownsampleIso, s + 1).factor = factor_iso[s];
    t.params(TransformKind::DownsampleAniso, s + 1).factor = factor_aniso[s];
    t.params(TransformKind::Ghosting, s + 1).num_ghosts = ghosts[s];
    auto& mot = t.params(TransformKind::RandomMotion, s + 1);
    mot.num_segments = segments[s];
    mot.theta_deg = mot_theta[s];
    mot.trans_mm = mot_trans[s];
  }
  return t;
}

const TransformParams& SeverityTable::params(TransformKind kind, int severity) const {
  if (severity < 1 || severity > 5) {
    throw std::out_of_range("severity must be in 1..5, got " + std::to_string(severity));
  }
  return levels_[static_cast<int>(kind)][severity - 1];
}

TransformParams& SeverityTable::params(TransformKind kind, int severity) {
  if (severity < 1 || severity > 5) {
    throw std::out_of_range("severity must be in 1..5, got " + std::to_string(severity));
  }
  return levels_[static_cast<int>(kind)][severity - 1];
}

SeverityTable SeverityTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("severity table: top level must be a JSON object");
  }
  SeverityTable t = defaults();
  for (const auto& [name, section] : j.items()) {
    const auto kind = kind_from_name(name);
    if (!kind) {
      throw std::invalid_argument("severity table: unknown transform '" + name + "'");
    }
    if (!section.is_object()) {
      throw std::invalid_argument("severity table: section '" + name +
                                  "' must be an object");
    }
    const auto& fields = fields_for(*kind);
    for (const auto& [key, arr] : section.items()) {
      const FieldDesc* desc = nullptr;
      for (const auto& f : fields) {
        if (key == f.key) {
          desc = &f;
          break;
        }
      }
      if (!desc) {
        throw std::invalid_argument("severity table: unknown parameter '" + key +
                                    "' for " + name);
      }
      if (!arr.is_array() || arr.size() != 5) {
        throw std::invalid_argument("severity table: " + name + "." + key +
                                    " must be an array of 5 values");
      }
      for (int s = 0; s < 5; ++s) {
        auto& p = t.params(*kind, s + 1);
        if (desc->is_int) {
          if (!arr[s].is_number_integer()) {
            throw std::invalid_argument("severity table: " + name + "." + key +
                                        " must hold integers");
          }
          p.*(desc->imember) = arr[s].get<int>();
        } else {
          if (!arr[s].is_number()) {
            throw std::invalid_argument("severity table: " + name + "." + key +
                                        " must hold numbers");
          }
          p.*(desc->dmember) = arr[s].get<double>();
        }
      }
    }
  }
  t.validate();
  return t;
}

SeverityTable SeverityTable::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open severity table file " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("severity table " + path + ": " + e.what());
  }
  return from_json(j);
}

void SeverityTable::validate() const {
  for (TransformKind kind : all_transform_kinds()) {
    for (const auto& f : fields_for(kind)) {
      double prev_measure = -1.0;
      for (int s = 1; s <= 5; ++s) {
        const double v = field_value(params(kind, s), f);
        if (v < f.min_value) {
          throw std::invalid_argument(std::string("severity table: ") + kind_name(kind) +
                                      "." + f.key + " must be >= " +
                                      std::to_string(f.min_value) + " at severity " +
                                      std::to_string(s));
        }
        const double measure = f.distance_from_one ? std::abs(v - 1.0) : v;
        if (measure < prev_measure) {
          throw std::invalid_argument(std::string("severity table: ") + kind_name(kind) +
                                      "." + f.key +
                                      " must be monotone in corruption magnitude, "
                                      "violated at severity " +
                                      std::to_string(s));
        }
        prev_measure = measure;
      }
    }
  }
}

nlohmann::json SeverityTable::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (TransformKind kind : all_transform_kinds()) {
    nlohmann::json section = nlohmann::json::object();
    for (const auto& f : fields_for(kind)) {
      nlohmann::json arr = nlohmann::json::array();
      for (int s = 1; s <= 5; ++s) {
        const auto& p = params(kind, s);
        if (f.is_int) {
          arr.push_back(p.*(f.imember));
        } else {
          arr.push_back(p.*(f.dmember));
        }
      }
      section[f.key] = arr;
    }
    j[kind_name(kind)] = section;
  }
  return j;
}

std::uint64_t SeverityTable::checksum() const { return fnv1a64(to_json().dump()); }

std::optional<TransformSpec> sample_augmentation(const AugmentationPolicy& policy,
                                                 RngStream& rng) {
  if (policy.kinds.empty()) {
    throw std::invalid_argument("augmentation policy has no transform kinds");
  }
  if (policy.probability < 0.0 || policy.probability > 1.0) {
    throw std::invalid_argument("augmentation probability must be in [0, 1]");
  }
  const bool fire = rng.uniform() < policy.probability;
  const auto idx =
      static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(policy.kinds.size()) - 1));
  if (!fire) return std::nullopt;

  const auto& [kind, max_params] = policy.kinds[idx];
  TransformParams p;
  switch (kind) {
    case TransformKind::Noise:
      p.sigma_ratio = rng.uniform(0.0, max_params.sigma_ratio);
      break;
    case TransformKind::GammaCompression:
    case TransformKind::GammaExpansion: {
      const double lo = std::min(1.0, max_params.gamma);
      const double hi = std::max(1.0, max_params.gamma);
      p.gamma = rng.uniform(lo, hi);
      break;
    }
    case TransformKind::Smoothing:
      p.sigma_mm = rng.uniform(0.0, max_params.sigma_mm);
      break;
    case TransformKind::BiasField:
      p.coeff_bound = rng.uniform(0.0, max_params.coeff_bound);
      break;
    case TransformKind::Affine:
      p.theta_deg = rng.uniform(0.0, max_params.theta_deg);
      p.trans_mm = rng.uniform(0.0, max_params.trans_mm);
      break;
    case TransformKind::ElasticDeformation:
      p.disp_mm = rng.uniform(0.0, max_params.disp_mm);
      break;
    case TransformKind::DownsampleIso:
    case TransformKind::DownsampleAniso:
      p.factor = rng.uniform(1.0, max_params.factor);
      break;
    case TransformKind::Ghosting:
      if (max_params.num_ghosts < 2) {
        throw std::invalid_argument("augmentation ghosting maximum must be >= 2");
      }
      p.num_ghosts = static_cast<int>(rng.uniform_int(2, max_params.num_ghosts));
      break;
    case TransformKind::RandomMotion:
      p.num_segments = static_cast<int>(rng.uniform_int(0, max_params.num_segments));
      p.theta_deg = rng.uniform(0.0, max_params.theta_deg);
      p.trans_mm = rng.uniform(0.0, max_params.trans_mm);
      break;
  }

  TransformSpec spec;
  spec.kind = kind;
  spec.severity = 0;
  spec.explicit_params = p;
  return spec;
}

}  // namespace roodbench
