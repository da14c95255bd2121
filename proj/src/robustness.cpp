#include "roodbench/robustness.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace roodbench {

namespace {

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

SeverityStats severity_stats(const std::vector<SampleMetrics>& records) {
  if (records.empty()) {
    throw std::invalid_argument("severity_stats: empty record list");
  }
  SeverityStats s;
  s.count = records.size();

  std::vector<double> dsc, hd;
  std::size_t nulls = 0;
  for (const auto& r : records) {
    dsc.push_back(r.dsc);
    if (r.hd95_mm) hd.push_back(*r.hd95_mm);
    nulls += r.null_prediction;
  }
  s.mdsc = std::accumulate(dsc.begin(), dsc.end(), 0.0) / static_cast<double>(dsc.size());
  s.sdsc = sample_std(dsc, s.mdsc);
  if (!hd.empty()) {
    s.mhd95 = std::accumulate(hd.begin(), hd.end(), 0.0) / static_cast<double>(hd.size());
    s.shd95 = sample_std(hd, *s.mhd95);
  }
  s.null_fraction = static_cast<double>(nulls) / static_cast<double>(records.size());
  return s;
}

double weighted_mean(const std::array<double, 6>& values, const RobustnessWeights& w) {
  double num = 0.0, den = 0.0;
  for (int s = 0; s < 6; ++s) {
    if (!std::isfinite(values[static_cast<std::size_t>(s)])) {
      throw std::invalid_argument("weighted_mean: non-finite value at severity " +
                                  std::to_string(s));
    }
    const double ws = w.weight(s);
    num += ws * values[static_cast<std::size_t>(s)];
    den += ws;
  }
  return num / den;
}

double degradation(double clean, const std::array<double, 5>& per_severity,
                   const RobustnessWeights& w, DegradationKind kind) {
  double num = 0.0, den = 0.0;
  for (int s = 1; s <= 5; ++s) {
    const double v = per_severity[static_cast<std::size_t>(s - 1)];
    if (!std::isfinite(v) || !std::isfinite(clean)) {
      throw std::invalid_argument("degradation: non-finite input value");
    }
    const double diff = kind == DegradationKind::DscMean ? clean - v : v - clean;
    const double ws = w.weight(s);
    num += ws * diff;
    den += ws;
  }
  return num / den;
}

RobustnessReport build_report(const std::vector<SampleMetrics>& records,
                              const RobustnessWeights& w) {
  std::vector<SampleMetrics> clean_records;
  std::map<TransformKind, std::array<std::vector<SampleMetrics>, 5>> cells;
  std::size_t total_nulls = 0;

  for (const auto& r : records) {
    total_nulls += r.null_prediction;
    if (r.transform == "clean") {
      if (r.severity != 0) {
        throw std::invalid_argument("clean record with nonzero severity for sample " +
                                    r.sample_id);
      }
      clean_records.push_back(r);
      continue;
    }
    const auto kind = kind_from_name(r.transform);
    if (!kind) {
      throw std::invalid_argument("unknown transform '" + r.transform + "' in metrics");
    }
    if (r.severity < 1 || r.severity > 5) {
      throw std::invalid_argument("transform record with severity outside 1..5 for sample " +
                                  r.sample_id);
    }
    cells[*kind][static_cast<std::size_t>(r.severity - 1)].push_back(r);
  }

  if (clean_records.empty()) {
    throw std::invalid_argument("metrics contain no clean records");
  }

  RobustnessReport report;
  report.alpha = w.alpha;
  report.clean = severity_stats(clean_records);

  for (TransformKind kind : all_transform_kinds()) {
    const auto it = cells.find(kind);
    if (it == cells.end()) continue;

    TransformSummary t;
    t.transform = kind;
    t.per_severity[0] = report.clean;
    std::size_t cell_total = 0, cell_nulls = 0;
    for (int s = 1; s <= 5; ++s) {
      const auto& cell = it->second[static_cast<std::size_t>(s - 1)];
      if (cell.empty()) {
        throw std::invalid_argument(std::string("transform ") + kind_name(kind) +
                                    " has no records at severity " + std::to_string(s));
      }
      t.per_severity[static_cast<std::size_t>(s)] = severity_stats(cell);
      cell_total += cell.size();
      for (const auto& r : cell) cell_nulls += r.null_prediction;
    }
    t.null_pct = 100.0 * static_cast<double>(cell_nulls) / static_cast<double>(cell_total);

    std::array<double, 6> mdsc{}, sdsc{};
    bool hd_complete = true;
    std::array<double, 6> mhd{}, shd{};
    for (int s = 0; s < 6; ++s) {
      const auto& ss = t.per_severity[static_cast<std::size_t>(s)];
      mdsc[static_cast<std::size_t>(s)] = ss.mdsc;
      sdsc[static_cast<std::size_t>(s)] = ss.sdsc;
      if (ss.mhd95) {
        mhd[static_cast<std::size_t>(s)] = *ss.mhd95;
        shd[static_cast<std::size_t>(s)] = *ss.shd95;
      } else {
        hd_complete = false;
      }
    }

    t.wmdsc = weighted_mean(mdsc, w);
    t.wsdsc = weighted_mean(sdsc, w);
    t.mddeg = degradation(mdsc[0], {mdsc[1], mdsc[2], mdsc[3], mdsc[4], mdsc[5]}, w,
                          DegradationKind::DscMean);
    t.vddeg = degradation(sdsc[0], {sdsc[1], sdsc[2], sdsc[3], sdsc[4], sdsc[5]}, w,
                          DegradationKind::DscSpread);
    if (hd_complete) {
      t.wmhd95 = weighted_mean(mhd, w);
      t.wshd95 = weighted_mean(shd, w);
      t.mhdeg = degradation(mhd[0], {mhd[1], mhd[2], mhd[3], mhd[4], mhd[5]}, w,
                            DegradationKind::HdMean);
      t.vhdeg = degradation(shd[0], {shd[1], shd[2], shd[3], shd[4], shd[5]}, w,
                            DegradationKind::HdSpread);
    }
    report.transforms.push_back(std::move(t));
  }

  if (report.transforms.empty()) {
    throw std::invalid_argument("metrics contain no transformed records");
  }

  const auto mean_of = [](const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  };
  std::vector<double> wmdsc, wsdsc, mddeg, vddeg, wmhd, wshd, mhdeg, vhdeg;
  for (const auto& t : report.transforms) {
    wmdsc.push_back(t.wmdsc);
    wsdsc.push_back(t.wsdsc);
    mddeg.push_back(t.mddeg);
    vddeg.push_back(t.vddeg);
    if (t.wmhd95) wmhd.push_back(*t.wmhd95);
    if (t.wshd95) wshd.push_back(*t.wshd95);
    if (t.mhdeg) mhdeg.push_back(*t.mhdeg);
    if (t.vhdeg) vhdeg.push_back(*t.vhdeg);
  }
  report.wmdsc = mean_of(wmdsc);
  report.wsdsc = mean_of(wsdsc);
  report.mddeg = mean_of(mddeg);
  report.vddeg = mean_of(vddeg);
  if (!wmhd.empty()) report.wmhd95 = mean_of(wmhd);
  if (!wshd.empty()) report.wshd95 = mean_of(wshd);
  if (!mhdeg.empty()) report.mhdeg = mean_of(mhdeg);
  if (!vhdeg.empty()) report.vhdeg = mean_of(vhdeg);
  report.null_pct =
      100.0 * static_cast<double>(total_nulls) / static_cast<double>(records.size());
  return report;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& diffs) {
  std::vector<double> d;
  for (double x : diffs) {
    if (x != 0.0) d.push_back(x);
  }

  WilcoxonResult r;
  r.n = d.size();
  if (r.n < 5) {
    r.insufficient = true;
    r.p_value = std::numeric_limits<double>::quiet_NaN();
    return r;
  }

  // mid-ranks over |d|
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
  std::vector<double> rank(n);
  std::vector<std::size_t> tie_sizes;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(d[order[j]]) == std::abs(d[order[i]])) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = mid;
    tie_sizes.push_back(j - i);
    i = j;
  }

  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] > 0.0) w_plus += rank[i];
  }
  r.w_plus = w_plus;

  const double nn = static_cast<double>(n);
  if (n <= 25) {
    // exact null distribution; doubled ranks are integers even with ties
    const long long total2 = llround(nn * (nn + 1.0));
    std::vector<double> count(static_cast<std::size_t>(total2) + 1, 0.0);
    count[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const long long r2 = llround(2.0 * rank[i]);
      for (long long s = total2; s >= r2; --s) {
        count[static_cast<std::size_t>(s)] +=
            count[static_cast<std::size_t>(s - r2)];
      }
    }
    const long long w2 = llround(2.0 * w_plus);
    double below = 0.0, above = 0.0;
    for (long long s = 0; s <= total2; ++s) {
      if (s <= w2) below += count[static_cast<std::size_t>(s)];
      if (s >= w2) above += count[static_cast<std::size_t>(s)];
    }
    const double denom = std::pow(2.0, nn);
    r.p_value = std::min(1.0, 2.0 * std::min(below, above) / denom);
  } else {
    const double mu = nn * (nn + 1.0) / 4.0;
    double tie_corr = 0.0;
    for (std::size_t t : tie_sizes) {
      const double tt = static_cast<double>(t);
      tie_corr += tt * tt * tt - tt;
    }
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_corr / 48.0;
    const double z = (w_plus - mu) / std::sqrt(var);
    r.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  }
  return r;
}

std::vector<ComparisonCell> compare_models(const std::vector<SampleMetrics>& records_a,
                                           const std::vector<SampleMetrics>& records_b,
                                           double significance) {
  using CellKey = std::pair<std::string, int>;
  const auto index = [](const std::vector<SampleMetrics>& records) {
    std::map<CellKey, std::map<std::string, double>> idx;
    for (const auto& r : records) {
      if (r.transform == "clean") continue;
      auto& cell = idx[{r.transform, r.severity}];
      if (!cell.emplace(r.sample_id, r.dsc).second) {
        throw std::invalid_argument("duplicate record for sample " + r.sample_id +
                                    " in cell " + r.transform + "/s" +
                                    std::to_string(r.severity));
      }
    }
    return idx;
  };

  const auto idx_a = index(records_a);
  const auto idx_b = index(records_b);

  std::vector<ComparisonCell> cells;
  for (const auto& [key, cell_a] : idx_a) {
    const auto it_b = idx_b.find(key);
    if (it_b == idx_b.end()) {
      throw std::invalid_argument("cell " + key.first + "/s" +
                                  std::to_string(key.second) +
                                  " is missing from the second metrics set");
    }
    const auto& cell_b = it_b->second;
    if (cell_a.size() != cell_b.size()) {
      throw std::invalid_argument("cell " + key.first + "/s" +
                                  std::to_string(key.second) +
                                  " has different sample sets in the two metrics sets");
    }

    ComparisonCell c;
    c.transform = key.first;
    c.severity = key.second;
    c.n_pairs = cell_a.size();

    std::vector<double> diffs;
    for (const auto& [sample_id, dsc_a] : cell_a) {
      const auto it = cell_b.find(sample_id);
      if (it == cell_b.end()) {
        throw std::invalid_argument("sample " + sample_id + " in cell " + key.first +
                                    "/s" + std::to_string(key.second) +
                                    " has no pair in the second metrics set");
      }
      diffs.push_back(dsc_a - it->second);
    }
    c.mean_diff = std::accumulate(diffs.begin(), diffs.end(), 0.0) /
                  static_cast<double>(diffs.size());
    c.test = wilcoxon_signed_rank(diffs);
    if (c.test.insufficient) {
      c.p_corrected = std::numeric_limits<double>::quiet_NaN();
      c.significant = false;
    } else {
      c.p_corrected = std::min(1.0, 5.0 * c.test.p_value);
      c.significant = c.p_corrected < significance;
    }
    cells.push_back(std::move(c));
  }
  if (idx_b.size() != idx_a.size()) {
    for (const auto& [key, cell_b] : idx_b) {
      if (idx_a.find(key) == idx_a.end()) {
        throw std::invalid_argument("cell " + key.first + "/s" +
                                    std::to_string(key.second) +
                                    " is missing from the first metrics set");
      }
    }
  }
  return cells;
}

}  // namespace roodbench
