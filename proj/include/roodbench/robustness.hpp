#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roodbench/seg_metrics.hpp"
#include "roodbench/severity.hpp"

namespace roodbench {

/// Exponential severity weighting w_s = alpha^s for s = 0..5. Severe
/// corruption counts less, with alpha = 1 weighting all levels equally.
struct RobustnessWeights {
  double alpha;

  explicit RobustnessWeights(double a) : alpha(a) {
    if (!(a > 0.0) || a > 1.0) {
      throw std::invalid_argument("alpha must be in (0, 1]");
    }
  }

  double weight(int severity) const { return std::pow(alpha, severity); }
};

/// Statistics over all samples of one (transform, severity) cell. DSC
/// statistics include null predictions (as dsc = 0); HD statistics are
/// over non-null samples only and absent when every sample is null.
struct SeverityStats {
  double mdsc = 0.0;
  double sdsc = 0.0;
  std::optional<double> mhd95;
  std::optional<double> shd95;
  double null_fraction = 0.0;
  std::size_t count = 0;
};

/// Computes SeverityStats for records that all share one (transform,
/// severity). Standard deviations use the sample (n - 1) convention, 0
/// for a single record. Throws std::invalid_argument for an empty list.
SeverityStats severity_stats(const std::vector<SampleMetrics>& records);

/// Weighted mean over six per-severity values (s = 0..5).
double weighted_mean(const std::array<double, 6>& values, const RobustnessWeights& w);

/// Which difference a degradation value measures. DSC means drop under
/// corruption, so their degradation is clean minus corrupted; spread and
/// HD values grow, so theirs is corrupted minus clean.
enum class DegradationKind { DscMean, DscSpread, HdMean, HdSpread };

/// Severity-weighted degradation over values at s = 1..5 against the
/// clean (s = 0) value. Positive means performance got worse; can be
/// negative when corrupted data scores better than clean.
double degradation(double clean, const std::array<double, 5>& per_severity,
                   const RobustnessWeights& w, DegradationKind kind);

/// Full per-transform aggregate row.
struct TransformSummary {
  TransformKind transform = TransformKind::Noise;
  std::array<SeverityStats, 6> per_severity;  // s = 0 is the shared clean cell

  double wmdsc = 0.0;
  double wsdsc = 0.0;
  std::optional<double> wmhd95;  // absent when some severity has no HD values
  std::optional<double> wshd95;
  double mddeg = 0.0;
  double vddeg = 0.0;
  std::optional<double> mhdeg;
  std::optional<double> vhdeg;
  double null_pct = 0.0;  // percent of null predictions over s = 1..5
};

struct RobustnessReport {
  double alpha = 2.0 / 3.0;
  SeverityStats clean;                       // shared s = 0 statistics
  std::vector<TransformSummary> transforms;  // canonical kind order

  // arithmetic means over the transforms present (HD aggregates over the
  // transforms where defined)
  double wmdsc = 0.0;
  double wsdsc = 0.0;
  std::optional<double> wmhd95;
  std::optional<double> wshd95;
  double mddeg = 0.0;
  double vddeg = 0.0;
  std::optional<double> mhdeg;
  std::optional<double> vhdeg;
  double null_pct = 0.0;  // percent over every record in the report
};

/// Aggregates raw per-sample metrics into the full report. Requires clean
/// records and, for every transform present, records at all severities
/// 1..5. Throws std::invalid_argument when coverage is incomplete.
RobustnessReport build_report(const std::vector<SampleMetrics>& records,
                              const RobustnessWeights& w);

/// Two-sided Wilcoxon signed-rank test on paired differences.
struct WilcoxonResult {
  std::size_t n = 0;          // pairs remaining after zero removal
  bool insufficient = false;  // n < 5: no meaningful p-value
  double w_plus = 0.0;        // sum of ranks of positive differences
  double p_value = 1.0;       // two-sided, uncorrected
};

/// Zero differences are dropped; ties get mid-ranks. Exact null
/// distribution for n <= 25, normal approximation with tie correction
/// above that.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& diffs);

/// One (transform, severity) comparison between two models.
struct ComparisonCell {
  std::string transform;
  int severity = 0;
  std::size_t n_pairs = 0;  // paired samples before zero removal
  double mean_diff = 0.0;   // mean DSC of model A minus model B
  WilcoxonResult test;
  double p_corrected = 1.0;  // Bonferroni x5, capped at 1
  bool significant = false;
};

/// Pairs records by sample_id within every (transform, severity) cell at
/// severities 1..5 and tests the per-sample DSC differences. Throws
/// std::invalid_argument when the two record sets are not sample-paired.
std::vector<ComparisonCell> compare_models(const std::vector<SampleMetrics>& records_a,
                                           const std::vector<SampleMetrics>& records_b,
                                           double significance);

}  // namespace roodbench
