#include "roodbench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "roodbench/nifti.hpp"
#include "roodbench/preprocess.hpp"
#include "roodbench/rng.hpp"
#include "roodbench/transforms.hpp"
#include "roodbench/version.hpp"

namespace roodbench {

namespace fs = std::filesystem;

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += "\"\"";
    } else {
      out += c;
    }
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

/// Shortest decimal representation that parses back to the exact double.
std::string format_full(double v) {
  char buf[64];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) {
      break;
    }
  }
  return buf;
}

std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

bool is_nii_name(const std::string& name) {
  return name.ends_with(".nii") || name.ends_with(".nii.gz");
}

std::string strip_nii_ext(const std::string& name) {
  if (name.ends_with(".nii.gz")) {
    return name.substr(0, name.size() - 7);
  }
  if (name.ends_with(".nii")) {
    return name.substr(0, name.size() - 4);
  }
  return name;
}

std::string nii_ext(const std::string& name) {
  return name.ends_with(".gz") ? ".nii.gz" : ".nii";
}

/// Runs fn(0..count-1) on up to `jobs` threads. The first exception stops
/// the remaining work and is rethrown on the calling thread.
template <typename Fn>
void run_parallel(std::size_t count, int jobs, Fn&& fn) {
  std::size_t workers = static_cast<std::size_t>(std::max(1, jobs));
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto body = [&]() {
    while (!stop.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        stop.store(true);
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back(body);
  }
  for (auto& t : threads) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

int transform_rank(const std::string& name) {
  if (name == "clean") {
    return -1;
  }
  auto kind = kind_from_name(name);
  return kind ? static_cast<int>(*kind) : kNumTransformKinds;
}

bool manifest_row_before(const ManifestRow& a, const ManifestRow& b) {
  if (a.sample_id != b.sample_id) {
    return a.sample_id < b.sample_id;
  }
  int ra = transform_rank(a.transform);
  int rb = transform_rank(b.transform);
  if (ra != rb) {
    return ra < rb;
  }
  return a.severity < b.severity;
}

std::vector<ManifestRow> generate_for_sample(const SamplePair& sample,
                                             const std::vector<TransformKind>& kinds,
                                             const GenerateOptions& options,
                                             const fs::path& out_dir) {
  Volume image;
  LabelVolume label;
  std::string load_error;
  try {
    image = load_volume(sample.image_path);
    label = load_label(sample.label_path);
    if (!same_grid(image, label)) {
      throw std::runtime_error("image and label grids differ");
    }
  } catch (const std::exception& e) {
    load_error = e.what();
  }

  const std::string img_ext = nii_ext(sample.image_path);
  const std::string lbl_ext = nii_ext(sample.label_path);
  auto make_row = [&](const std::string& transform, int severity) {
    ManifestRow row;
    row.sample_id = sample.sample_id;
    row.transform = transform;
    row.severity = severity;
    row.seed = derive_seed(options.global_seed, sample.sample_id, transform, severity);
    row.aux = "{}";
    return row;
  };

  std::vector<ManifestRow> rows;
  rows.reserve(1 + kinds.size() * 5);

  {
    ManifestRow row = make_row("clean", 0);
    if (!load_error.empty()) {
      row.status = "failed: " + load_error;
    } else {
      std::string img_name = sample.sample_id + "__clean__s0" + img_ext;
      std::string lbl_name = sample.sample_id + "__clean__s0_label" + lbl_ext;
      try {
        fs::copy_file(sample.image_path, out_dir / img_name,
                      fs::copy_options::overwrite_existing);
        fs::copy_file(sample.label_path, out_dir / lbl_name,
                      fs::copy_options::overwrite_existing);
        row.image_path = img_name;
        row.label_path = lbl_name;
        row.status = "ok";
      } catch (const std::exception& e) {
        row.status = std::string("failed: ") + e.what();
      }
    }
    rows.push_back(std::move(row));
  }

  for (TransformKind kind : kinds) {
    const std::string name = kind_name(kind);
    for (int severity = 1; severity <= 5; ++severity) {
      ManifestRow row = make_row(name, severity);
      if (!load_error.empty()) {
        row.status = "failed: " + load_error;
        rows.push_back(std::move(row));
        continue;
      }
      try {
        TransformSpec spec;
        spec.kind = kind;
        spec.severity = severity;
        spec.seed = row.seed;
        ResolvedTransform rt = resolve(spec, options.table);
        Volume out_image = apply_resolved(rt, image);
        LabelVolume out_label = co_transform_label_resolved(rt, label);

        std::string stem =
            sample.sample_id + "__" + name + "__s" + std::to_string(severity);
        std::string img_name = stem + img_ext;
        std::string lbl_name = stem + "_label" + lbl_ext;
        save_volume((out_dir / img_name).string(), out_image);
        save_label((out_dir / lbl_name).string(), out_label);

        row.aux = aux_json(rt).dump();
        row.image_path = img_name;
        row.label_path = lbl_name;
        row.status = "ok";
      } catch (const std::exception& e) {
        row.status = std::string("failed: ") + e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

nlohmann::json stats_json(const SeverityStats& s) {
  nlohmann::json j;
  j["mdsc"] = s.mdsc;
  j["sdsc"] = s.sdsc;
  j["mhd95"] = s.mhd95 ? nlohmann::json(*s.mhd95) : nlohmann::json();
  j["shd95"] = s.shd95 ? nlohmann::json(*s.shd95) : nlohmann::json();
  j["null_fraction"] = s.null_fraction;
  j["count"] = s.count;
  return j;
}

nlohmann::json report_json(const RobustnessReport& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json();
  };

  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["alpha"] = r.alpha;
  j["clean"] = stats_json(r.clean);

  nlohmann::json transforms = nlohmann::json::array();
  for (const auto& t : r.transforms) {
    nlohmann::json tj;
    tj["transform"] = kind_name(t.transform);
    nlohmann::json severities = nlohmann::json::array();
    for (int s = 0; s <= 5; ++s) {
      severities.push_back(stats_json(t.per_severity[static_cast<std::size_t>(s)]));
    }
    tj["per_severity"] = severities;
    tj["wmdsc"] = t.wmdsc;
    tj["wsdsc"] = t.wsdsc;
    tj["wmhd95"] = opt(t.wmhd95);
    tj["wshd95"] = opt(t.wshd95);
    tj["mddeg"] = t.mddeg;
    tj["vddeg"] = t.vddeg;
    tj["mhdeg"] = opt(t.mhdeg);
    tj["vhdeg"] = opt(t.vhdeg);
    tj["null_pct"] = t.null_pct;
    transforms.push_back(std::move(tj));
  }
  j["transforms"] = transforms;

  nlohmann::json agg;
  agg["wmdsc"] = r.wmdsc;
  agg["wsdsc"] = r.wsdsc;
  agg["wmhd95"] = opt(r.wmhd95);
  agg["wshd95"] = opt(r.wshd95);
  agg["mddeg"] = r.mddeg;
  agg["vddeg"] = r.vddeg;
  agg["mhdeg"] = opt(r.mhdeg);
  agg["vhdeg"] = opt(r.vhdeg);
  agg["null_pct"] = r.null_pct;
  j["aggregate"] = agg;
  return j;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  return out;
}

void check_stream(const std::ofstream& out, const fs::path& path) {
  if (!out) {
    throw std::runtime_error("failed while writing " + path.string());
  }
}

}  // namespace

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
  std::ofstream out = open_output(path);
  char checksum[32];
  std::snprintf(checksum, sizeof(checksum), "%016" PRIx64, manifest.table_checksum);
  out << "# roodbench dataset manifest\n";
  out << "# tool_version=" << manifest.tool_version << "\n";
  out << "# global_seed=" << manifest.global_seed << "\n";
  out << "# table_checksum=" << checksum << "\n";
  out << "sample_id,transform,severity,image_path,label_path,seed,status,aux\n";
  for (const auto& row : manifest.rows) {
    out << csv_escape(row.sample_id) << ',' << row.transform << ',' << row.severity
        << ',' << csv_escape(row.image_path) << ',' << csv_escape(row.label_path)
        << ',' << row.seed << ',' << csv_escape(row.status) << ','
        << csv_escape(row.aux) << '\n';
  }
  check_stream(out, path);
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open manifest " + path);
  }

  DatasetManifest manifest;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        continue;
      }
      std::string key = line.substr(2, eq - 2);
      std::string value = line.substr(eq + 1);
      if (key == "tool_version") {
        manifest.tool_version = value;
      } else if (key == "global_seed") {
        manifest.global_seed = std::strtoull(value.c_str(), nullptr, 10);
      } else if (key == "table_checksum") {
        manifest.table_checksum = std::strtoull(value.c_str(), nullptr, 16);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "sample_id,transform,severity,image_path,label_path,seed,status,aux") {
        throw std::runtime_error("unrecognized manifest column header in " + path);
      }
      header_seen = true;
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 8) {
      throw std::runtime_error("malformed manifest row in " + path);
    }
    ManifestRow row;
    row.sample_id = fields[0];
    row.transform = fields[1];
    row.severity = std::atoi(fields[2].c_str());
    row.image_path = fields[3];
    row.label_path = fields[4];
    row.seed = std::strtoull(fields[5].c_str(), nullptr, 10);
    row.status = fields[6];
    row.aux = fields[7];
    manifest.rows.push_back(std::move(row));
  }
  if (!header_seen) {
    throw std::runtime_error("manifest " + path + " has no column header");
  }
  return manifest;
}

std::vector<SamplePair> list_samples(const std::string& input_dir) {
  if (!fs::is_directory(input_dir)) {
    throw std::invalid_argument("input directory " + input_dir + " does not exist");
  }

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(input_dir)) {
    if (!entry.is_regular_file()) {
      continue;
    }
    std::string name = entry.path().filename().string();
    if (is_nii_name(name)) {
      names.push_back(std::move(name));
    }
  }
  std::sort(names.begin(), names.end());

  std::map<std::string, SamplePair> by_id;
  for (const auto& name : names) {
    std::string stem = strip_nii_ext(name);
    std::string full = (fs::path(input_dir) / name).string();
    if (stem.ends_with("_label")) {
      std::string id = stem.substr(0, stem.size() - 6);
      auto& pair = by_id[id];
      if (!pair.label_path.empty()) {
        throw std::invalid_argument("duplicate label file for sample '" + id + "'");
      }
      pair.label_path = full;
    } else {
      auto& pair = by_id[stem];
      if (!pair.image_path.empty()) {
        throw std::invalid_argument("duplicate image file for sample '" + stem + "'");
      }
      pair.image_path = full;
    }
  }

  std::vector<SamplePair> samples;
  samples.reserve(by_id.size());
  for (auto& [id, pair] : by_id) {
    if (pair.image_path.empty()) {
      throw std::invalid_argument("label without matching image for sample '" + id +
                                  "'");
    }
    if (pair.label_path.empty()) {
      throw std::invalid_argument("no label found for sample '" + id + "'");
    }
    pair.sample_id = id;
    samples.push_back(std::move(pair));
  }
  if (samples.empty()) {
    throw std::invalid_argument("no image/label pairs found in " + input_dir);
  }
  return samples;
}

GenerateResult generate_benchmark(const GenerateOptions& options) {
  const auto samples = list_samples(options.input_dir);

  std::vector<TransformKind> kinds = options.transforms;
  if (kinds.empty()) {
    for (int k = 0; k < kNumTransformKinds; ++k) {
      kinds.push_back(static_cast<TransformKind>(k));
    }
  } else {
    std::sort(kinds.begin(), kinds.end());
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
  }
  options.table.validate();

  fs::path out_dir(options.output_dir);
  fs::create_directories(out_dir);

  std::vector<std::vector<ManifestRow>> per_sample(samples.size());
  std::mutex log_mutex;
  std::atomic<std::size_t> done{0};
  run_parallel(samples.size(), options.jobs, [&](std::size_t i) {
    per_sample[i] = generate_for_sample(samples[i], kinds, options, out_dir);
    std::size_t finished = done.fetch_add(1) + 1;
    if (options.verbose) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::fprintf(stderr, "generated %s (%zu/%zu)\n", samples[i].sample_id.c_str(),
                   finished, samples.size());
    }
  });

  GenerateResult result;
  result.manifest.global_seed = options.global_seed;
  result.manifest.table_checksum = options.table.checksum();
  result.manifest.tool_version = kToolVersion;
  for (auto& rows : per_sample) {
    for (auto& row : rows) {
      if (row.status != "ok") {
        ++result.failed_rows;
      }
      result.manifest.rows.push_back(std::move(row));
    }
  }
  std::sort(result.manifest.rows.begin(), result.manifest.rows.end(),
            manifest_row_before);
  write_manifest((out_dir / "manifest.csv").string(), result.manifest);
  return result;
}

EvaluateResult evaluate_predictions(const std::string& manifest_path,
                                    const std::string& pred_dir, int jobs,
                                    bool verbose) {
  DatasetManifest manifest = read_manifest(manifest_path);
  fs::path base = fs::absolute(fs::path(manifest_path)).parent_path();
  fs::path preds(pred_dir);
  if (!fs::is_directory(preds)) {
    throw std::invalid_argument("prediction directory " + pred_dir +
                                " does not exist");
  }

  EvaluateResult result;
  std::vector<const ManifestRow*> todo;
  for (const auto& row : manifest.rows) {
    if (row.status != "ok") {
      ++result.skipped_failed;
      continue;
    }
    todo.push_back(&row);
  }

  std::vector<MetricsRow> rows(todo.size());
  std::mutex log_mutex;
  run_parallel(todo.size(), jobs, [&](std::size_t i) {
    const ManifestRow& row = *todo[i];
    MetricsRow out;
    out.metrics.sample_id = row.sample_id;
    out.metrics.transform = row.transform;
    out.metrics.severity = row.severity;

    std::string stem =
        row.sample_id + "__" + row.transform + "__s" + std::to_string(row.severity);
    fs::path pred_path = preds / (stem + ".nii.gz");
    if (!fs::exists(pred_path)) {
      pred_path = preds / (stem + ".nii");
    }
    if (!fs::exists(pred_path)) {
      out.status = "missing";
    } else {
      LabelVolume gt = load_label((base / row.label_path).string());
      LabelVolume pred = load_label(pred_path.string());
      out.metrics = evaluate_sample(pred, gt, row.sample_id, row.transform,
                                    row.severity);
    }
    if (verbose) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::fprintf(stderr, "evaluated %s (%s)\n", stem.c_str(), out.status.c_str());
    }
    rows[i] = std::move(out);
  });

  for (const auto& row : rows) {
    if (row.status == "missing") {
      ++result.missing;
    }
  }
  result.rows = std::move(rows);
  return result;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out = open_output(path);
  out << "sample_id,transform,severity,dsc,hd95_mm,null_prediction,status\n";
  for (const auto& row : rows) {
    const SampleMetrics& m = row.metrics;
    out << csv_escape(m.sample_id) << ',' << m.transform << ',' << m.severity << ',';
    if (row.status == "ok") {
      out << format_full(m.dsc) << ',';
      if (m.hd95_mm) {
        out << format_full(*m.hd95_mm);
      }
      out << ',' << (m.null_prediction ? '1' : '0');
    } else {
      out << ",,";
    }
    out << ',' << row.status << '\n';
  }
  check_stream(out, path);
}

std::vector<SampleMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open metrics file " + path);
  }

  std::vector<SampleMetrics> records;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (!header_seen) {
      if (line != "sample_id,transform,severity,dsc,hd95_mm,null_prediction,status") {
        throw std::runtime_error("unrecognized metrics column header in " + path);
      }
      header_seen = true;
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 7) {
      throw std::runtime_error("malformed metrics row in " + path);
    }
    if (fields[6] != "ok") {
      continue;
    }
    SampleMetrics m;
    m.sample_id = fields[0];
    m.transform = fields[1];
    m.severity = std::atoi(fields[2].c_str());
    m.dsc = std::strtod(fields[3].c_str(), nullptr);
    if (!fields[4].empty()) {
      m.hd95_mm = std::strtod(fields[4].c_str(), nullptr);
    }
    m.null_prediction = fields[5] == "1";
    records.push_back(std::move(m));
  }
  if (!header_seen) {
    throw std::runtime_error("metrics file " + path + " has no column header");
  }
  return records;
}

void write_report_files(const RobustnessReport& report, const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);

  {
    fs::path path = dir / "report.json";
    std::ofstream out = open_output(path);
    out << report_json(report).dump(2) << "\n";
    check_stream(out, path);
  }

  auto sig6_opt = [](const std::optional<double>& v) {
    return v ? format_sig6(*v) : std::string();
  };

  {
    fs::path path = dir / "degradation.csv";
    std::ofstream out = open_output(path);
    out << "metric";
    for (const auto& t : report.transforms) {
      out << ',' << kind_name(t.transform);
    }
    out << ",Avg.\n";
    auto row = [&](const char* name, auto getter, const std::optional<double>& avg) {
      out << name;
      for (const auto& t : report.transforms) {
        out << ',' << sig6_opt(getter(t));
      }
      out << ',' << sig6_opt(avg) << '\n';
    };
    using TS = TransformSummary;
    row("mddeg", [](const TS& t) { return std::optional<double>(t.mddeg); },
        report.mddeg);
    row("vddeg", [](const TS& t) { return std::optional<double>(t.vddeg); },
        report.vddeg);
    row("mhdeg", [](const TS& t) { return t.mhdeg; }, report.mhdeg);
    row("vhdeg", [](const TS& t) { return t.vhdeg; }, report.vhdeg);
    check_stream(out, path);
  }

  {
    fs::path path = dir / "weighted.csv";
    std::ofstream out = open_output(path);
    out << "transform,wmdsc,wsdsc,wmhd95,wshd95,null_pct\n";
    auto row = [&](const std::string& name, double wmdsc, double wsdsc,
                   const std::optional<double>& wmhd95,
                   const std::optional<double>& wshd95, double null_pct) {
      out << name << ',' << format_sig6(wmdsc) << ',' << format_sig6(wsdsc) << ','
          << sig6_opt(wmhd95) << ',' << sig6_opt(wshd95) << ','
          << format_sig6(null_pct) << '\n';
    };
    for (const auto& t : report.transforms) {
      row(kind_name(t.transform), t.wmdsc, t.wsdsc, t.wmhd95, t.wshd95, t.null_pct);
    }
    row("Avg.", report.wmdsc, report.wsdsc, report.wmhd95, report.wshd95,
        report.null_pct);
    check_stream(out, path);
  }

  {
    fs::path path = dir / "curves.csv";
    std::ofstream out = open_output(path);
    out << "transform,severity,mdsc,sdsc,mhd95,shd95,null_fraction,count\n";
    for (const auto& t : report.transforms) {
      for (int s = 0; s <= 5; ++s) {
        const SeverityStats& stats = t.per_severity[static_cast<std::size_t>(s)];
        out << kind_name(t.transform) << ',' << s << ',' << format_sig6(stats.mdsc)
            << ',' << format_sig6(stats.sdsc) << ',' << sig6_opt(stats.mhd95) << ','
            << sig6_opt(stats.shd95) << ',' << format_sig6(stats.null_fraction)
            << ',' << stats.count << '\n';
      }
    }
    check_stream(out, path);
  }
}

void write_comparison_csv(const std::string& path,
                          const std::vector<ComparisonCell>& cells) {
  std::ofstream out = open_output(path);
  out << "transform,severity,n_pairs,mean_diff,w_plus,p_value,p_corrected,"
         "significant,status\n";
  for (const auto& c : cells) {
    out << c.transform << ',' << c.severity << ',' << c.n_pairs << ','
        << format_full(c.mean_diff) << ',';
    if (c.test.insufficient) {
      out << ",,," << '0' << ",insufficient_data\n";
    } else {
      out << format_full(c.test.w_plus) << ',' << format_full(c.test.p_value) << ','
          << format_full(c.p_corrected) << ',' << (c.significant ? '1' : '0')
          << ",ok\n";
    }
  }
  check_stream(out, path);
}

void preprocess_dataset(const std::string& input_dir, const std::string& output_dir,
                        double target_mm, int jobs, bool verbose) {
  const auto samples = list_samples(input_dir);
  fs::path out_dir(output_dir);
  fs::create_directories(out_dir);

  std::mutex log_mutex;
  run_parallel(samples.size(), jobs, [&](std::size_t i) {
    const SamplePair& sample = samples[i];
    Volume image = reorient_to_ras(load_volume(sample.image_path));
    LabelVolume label = reorient_to_ras(load_label(sample.label_path));
    if (!same_grid(image, label)) {
      throw std::runtime_error("image and label grids differ for sample '" +
                               sample.sample_id + "'");
    }
    image = zscore_normalize(resample_isotropic(image, target_mm, InterpMode::Linear));
    label = resample_label_isotropic(label, target_mm);

    fs::path img_name = fs::path(sample.image_path).filename();
    fs::path lbl_name = fs::path(sample.label_path).filename();
    save_volume((out_dir / img_name).string(), image);
    save_label((out_dir / lbl_name).string(), label);
    if (verbose) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::fprintf(stderr, "preprocessed %s (%zu/%zu)\n", sample.sample_id.c_str(),
                   i + 1, samples.size());
    }
  });
}

}  // namespace roodbench
