#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "roodbench/robustness.hpp"
#include "roodbench/seg_metrics.hpp"
#include "roodbench/severity.hpp"

namespace roodbench {

/// One generated (sample, transform, severity) artifact. Paths are
/// relative to the manifest location; the seed and aux column make the
/// row auditable and bit-exactly regenerable.
struct ManifestRow {
  std::string sample_id;
  std::string transform;  // "clean" or a transform kind name
  int severity = 0;
  std::string image_path;
  std::string label_path;
  std::uint64_t seed = 0;
  std::string status;  // "ok" or "failed: <reason>"
  std::string aux;     // JSON object with the sampled draws
};

struct DatasetManifest {
  std::uint64_t global_seed = 0;
  std::uint64_t table_checksum = 0;
  std::string tool_version;
  std::vector<ManifestRow> rows;
};

void write_manifest(const std::string& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::string& path);

/// An image/label pair found in an input directory.
struct SamplePair {
  std::string sample_id;
  std::string image_path;
  std::string label_path;
};

/// Matches `<id>.nii[.gz]` images with `<id>_label.nii[.gz]` labels,
/// sorted by id. Throws std::invalid_argument for unmatched files.
std::vector<SamplePair> list_samples(const std::string& input_dir);

struct GenerateOptions {
  std::string input_dir;
  std::string output_dir;
  SeverityTable table = SeverityTable::defaults();
  std::vector<TransformKind> transforms;  // empty selects all 11
  std::uint64_t global_seed = 0;
  int jobs = 1;
  bool verbose = false;
};

struct GenerateResult {
  DatasetManifest manifest;
  std::size_t failed_rows = 0;
};

/// Expands every input pair into clean + (transform, severity) artifacts,
/// writes them plus manifest.csv into output_dir, and returns the
/// manifest. Individual transform failures are recorded in their rows and
/// counted; infrastructure errors (unreadable input directory, unmatched
/// pairs, unwritable output) throw.
GenerateResult generate_benchmark(const GenerateOptions& options);

/// SampleMetrics plus the row disposition: "ok", or "missing" when no
/// prediction file exists for the manifest row.
struct MetricsRow {
  SampleMetrics metrics;
  std::string status = "ok";
};

struct EvaluateResult {
  std::vector<MetricsRow> rows;
  std::size_t missing = 0;         // rows without a prediction file
  std::size_t skipped_failed = 0;  // manifest rows that failed generation
};

/// Scores predictions named `<sample_id>__<transform>__s<severity>.nii[.gz]`
/// in pred_dir against the manifest's co-transformed labels.
EvaluateResult evaluate_predictions(const std::string& manifest_path,
                                    const std::string& pred_dir, int jobs,
                                    bool verbose);

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);

/// Reads back a metrics CSV; only rows with status "ok" are returned.
std::vector<SampleMetrics> read_metrics_csv(const std::string& path);

/// Writes report.json (full precision) plus degradation.csv,
/// weighted.csv, and curves.csv (6 significant digits) into out_dir.
void write_report_files(const RobustnessReport& report, const std::string& out_dir);

void write_comparison_csv(const std::string& path,
                          const std::vector<ComparisonCell>& cells);

/// Reorients to RAS+, resamples to an isotropic grid, and Z-score
/// normalizes every image (labels: reorientation + resampling with
/// re-thresholding). Writes pairs under the same names into output_dir.
void preprocess_dataset(const std::string& input_dir, const std::string& output_dir,
                        double target_mm, int jobs, bool verbose);

}  // namespace roodbench
