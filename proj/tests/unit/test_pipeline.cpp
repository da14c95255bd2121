#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "roodbench/nifti.hpp"
#include "roodbench/pipeline.hpp"
#include "roodbench/rng.hpp"
#include "helpers.hpp"

using namespace roodbench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// two smooth image/label pairs on a 12^3 grid
void write_input_pair(const std::string& dir, const std::string& id,
                      std::uint64_t seed) {
  Volume v(12, 12, 12);
  RngStream rng(seed);
  for (std::size_t z = 0; z < 12; ++z) {
    for (std::size_t y = 0; y < 12; ++y) {
      for (std::size_t x = 0; x < 12; ++x) {
        v(x, y, z) = 40.0 + 2.0 * static_cast<double>(x + y) +
                     3.0 * static_cast<double>(z) + rng.uniform(0.0, 5.0);
      }
    }
  }
  LabelVolume l = testutil::sphere_label(12, 5.5, 5.5, 5.5, 3.5);
  save_volume(dir + "/" + id + ".nii.gz", v);
  save_label(dir + "/" + id + "_label.nii.gz", l);
}

GenerateResult small_generate(const std::string& input_dir,
                              const std::string& output_dir,
                              std::uint64_t seed = 7) {
  GenerateOptions opt;
  opt.input_dir = input_dir;
  opt.output_dir = output_dir;
  opt.transforms = {TransformKind::Noise, TransformKind::Affine};
  opt.global_seed = seed;
  return generate_benchmark(opt);
}

}  // namespace

TEST_CASE("manifests survive a write and read cycle") {
  testutil::TempDir tmp("manifest");
  DatasetManifest m;
  m.global_seed = 42;
  m.table_checksum = 0xdeadbeefcafe1234ULL;
  m.tool_version = "0.1.0";

  ManifestRow clean;
  clean.sample_id = "case, one";  // comma forces quoting
  clean.transform = "clean";
  clean.severity = 0;
  clean.image_path = "images/case1__clean__s0.nii.gz";
  clean.label_path = "labels/case1__clean__s0.nii.gz";
  clean.seed = 1;
  clean.status = "ok";
  clean.aux = "{}";
  ManifestRow row;
  row.sample_id = "case2";
  row.transform = "affine";
  row.severity = 3;
  row.image_path = "images/case2__affine__s3.nii.gz";
  row.label_path = "labels/case2__affine__s3.nii.gz";
  row.seed = 18446744073709551615ULL;  // uint64 max survives the text form
  row.status = "failed: could not warp";
  row.aux = "{\"euler_deg\":[1.5,-2.0,0.25],\"note\":\"a\\\"b\\\"\"}";
  m.rows = {clean, row};

  const std::string path = tmp.str("manifest.csv");
  write_manifest(path, m);
  DatasetManifest back = read_manifest(path);

  CHECK(back.global_seed == 42);
  CHECK(back.table_checksum == 0xdeadbeefcafe1234ULL);
  CHECK(back.tool_version == "0.1.0");
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].sample_id == "case, one");
  CHECK(back.rows[0].transform == "clean");
  CHECK(back.rows[0].aux == "{}");
  CHECK(back.rows[1].seed == 18446744073709551615ULL);
  CHECK(back.rows[1].status == "failed: could not warp");
  CHECK(back.rows[1].aux == row.aux);
  CHECK(nlohmann::json::parse(back.rows[1].aux)["euler_deg"].size() == 3);
}

TEST_CASE("sample discovery pairs images with their labels") {
  testutil::TempDir tmp("discovery");
  write_input_pair(tmp.path().string(), "beta", 1);
  write_input_pair(tmp.path().string(), "alpha", 2);

  auto pairs = list_samples(tmp.path().string());
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].sample_id == "alpha");  // sorted by id
  CHECK(pairs[1].sample_id == "beta");
  CHECK(fs::exists(pairs[0].image_path));
  CHECK(fs::exists(pairs[0].label_path));
}

TEST_CASE("sample discovery rejects incomplete and ambiguous inputs") {
  SUBCASE("image without label") {
    testutil::TempDir tmp("no_label");
    Volume v(4, 4, 4, 1.0);
    save_volume(tmp.str("lonely.nii.gz"), v);
    CHECK_THROWS_AS(list_samples(tmp.path().string()), std::invalid_argument);
  }
  SUBCASE("label without image") {
    testutil::TempDir tmp("no_image");
    LabelVolume l(4, 4, 4, 1);
    save_label(tmp.str("orphan_label.nii.gz"), l);
    CHECK_THROWS_AS(list_samples(tmp.path().string()), std::invalid_argument);
  }
  SUBCASE("duplicate sample id across extensions") {
    testutil::TempDir tmp("dup");
    write_input_pair(tmp.path().string(), "a", 1);
    Volume v(4, 4, 4, 1.0);
    save_volume(tmp.str("a.nii"), v);
    CHECK_THROWS_AS(list_samples(tmp.path().string()), std::invalid_argument);
  }
  SUBCASE("empty directory") {
    testutil::TempDir tmp("empty");
    CHECK_THROWS_AS(list_samples(tmp.path().string()), std::invalid_argument);
  }
  SUBCASE("missing directory") {
    CHECK_THROWS(list_samples("/nonexistent/roodbench/input"));
  }
}

TEST_CASE("generation expands samples into the full row grid") {
  testutil::TempDir in("gen_in");
  testutil::TempDir out("gen_out");
  write_input_pair(in.path().string(), "s1", 1);
  write_input_pair(in.path().string(), "s2", 2);

  GenerateResult result = small_generate(in.path().string(), out.path().string());
  CHECK(result.failed_rows == 0);
  // per sample: 1 clean + 2 transforms x 5 severities
  REQUIRE(result.manifest.rows.size() == 22);

  // ordering: samples by id, clean first, then canonical kinds by severity
  const auto& rows = result.manifest.rows;
  CHECK(rows[0].sample_id == "s1");
  CHECK(rows[0].transform == "clean");
  CHECK(rows[1].transform == "noise");
  CHECK(rows[1].severity == 1);
  CHECK(rows[5].severity == 5);
  CHECK(rows[6].transform == "affine");
  CHECK(rows[11].sample_id == "s2");

  // every row's files exist relative to the output directory
  for (const auto& r : rows) {
    CAPTURE(r.sample_id);
    CAPTURE(r.transform);
    CAPTURE(r.severity);
    REQUIRE(r.status == "ok");
    CHECK(fs::exists(out.path() / r.image_path));
    CHECK(fs::exists(out.path() / r.label_path));
    CHECK(r.seed == derive_seed(7, r.sample_id,
                                r.transform == "clean" ? "clean" : r.transform,
                                r.severity));
  }
  CHECK(fs::exists(out.path() / "manifest.csv"));

  // the clean artifact is a byte copy of the input
  CHECK(slurp((out.path() / rows[0].image_path).string()) ==
        slurp((in.path() / "s1.nii.gz").string()));
}

TEST_CASE("regeneration is bit-identical") {
  testutil::TempDir in("regen_in");
  testutil::TempDir out1("regen_a");
  testutil::TempDir out2("regen_b");
  write_input_pair(in.path().string(), "s1", 3);

  small_generate(in.path().string(), out1.path().string());
  small_generate(in.path().string(), out2.path().string());

  CHECK(slurp(out1.str("manifest.csv")) == slurp(out2.str("manifest.csv")));
  DatasetManifest m = read_manifest(out1.str("manifest.csv"));
  for (const auto& r : m.rows) {
    CAPTURE(r.transform);
    CAPTURE(r.severity);
    REQUIRE(slurp((out1.path() / r.image_path).string()) ==
            slurp((out2.path() / r.image_path).string()));
    REQUIRE(slurp((out1.path() / r.label_path).string()) ==
            slurp((out2.path() / r.label_path).string()));
  }
}

TEST_CASE("worker count does not change the artifacts") {
  testutil::TempDir in("jobs_in");
  testutil::TempDir out1("jobs_a");
  testutil::TempDir out2("jobs_b");
  write_input_pair(in.path().string(), "s1", 4);
  write_input_pair(in.path().string(), "s2", 5);

  GenerateOptions opt;
  opt.input_dir = in.path().string();
  opt.output_dir = out1.path().string();
  opt.transforms = {TransformKind::Ghosting};
  opt.global_seed = 11;
  generate_benchmark(opt);
  opt.output_dir = out2.path().string();
  opt.jobs = 4;
  generate_benchmark(opt);

  CHECK(slurp(out1.str("manifest.csv")) == slurp(out2.str("manifest.csv")));
  DatasetManifest m = read_manifest(out1.str("manifest.csv"));
  for (const auto& r : m.rows) {
    REQUIRE(slurp((out1.path() / r.image_path).string()) ==
            slurp((out2.path() / r.image_path).string()));
  }
}

TEST_CASE("a transform subset limits the manifest") {
  testutil::TempDir in("subset_in");
  testutil::TempDir out("subset_out");
  write_input_pair(in.path().string(), "only", 6);

  GenerateOptions opt;
  opt.input_dir = in.path().string();
  opt.output_dir = out.path().string();
  opt.transforms = {TransformKind::Smoothing};
  GenerateResult result = generate_benchmark(opt);
  REQUIRE(result.manifest.rows.size() == 6);  // clean + 5 severities
  std::set<std::string> names;
  for (const auto& r : result.manifest.rows) {
    names.insert(r.transform);
  }
  CHECK(names == std::set<std::string>{"clean", "smoothing"});
}

TEST_CASE("evaluation scores the generated labels as perfect predictions") {
  testutil::TempDir in("eval_in");
  testutil::TempDir out("eval_out");
  testutil::TempDir pred("eval_pred");
  write_input_pair(in.path().string(), "s1", 8);

  GenerateResult gen = small_generate(in.path().string(), out.path().string());
  for (const auto& r : gen.manifest.rows) {
    std::string stem = r.sample_id + "__" + r.transform + "__s" +
                       std::to_string(r.severity) + ".nii.gz";
    fs::copy_file(out.path() / r.label_path, pred.path() / stem);
  }

  EvaluateResult result =
      evaluate_predictions(out.str("manifest.csv"), pred.path().string(), 1, false);
  CHECK(result.missing == 0);
  CHECK(result.skipped_failed == 0);
  REQUIRE(result.rows.size() == 11);
  for (const auto& row : result.rows) {
    CAPTURE(row.metrics.transform);
    CAPTURE(row.metrics.severity);
    REQUIRE(row.status == "ok");
    CHECK(row.metrics.dsc == 1.0);
    if (row.metrics.hd95_mm) {
      CHECK(*row.metrics.hd95_mm == 0.0);
    }
  }
}

TEST_CASE("missing predictions are reported but do not abort") {
  testutil::TempDir in("miss_in");
  testutil::TempDir out("miss_out");
  testutil::TempDir pred("miss_pred");
  write_input_pair(in.path().string(), "s1", 9);

  GenerateResult gen = small_generate(in.path().string(), out.path().string());
  bool skipped_one = false;
  for (const auto& r : gen.manifest.rows) {
    if (!skipped_one && r.transform == "noise" && r.severity == 2) {
      skipped_one = true;  // leave this prediction out
      continue;
    }
    std::string stem = r.sample_id + "__" + r.transform + "__s" +
                       std::to_string(r.severity) + ".nii.gz";
    fs::copy_file(out.path() / r.label_path, pred.path() / stem);
  }

  EvaluateResult result =
      evaluate_predictions(out.str("manifest.csv"), pred.path().string(), 1, false);
  CHECK(result.missing == 1);
  std::size_t missing_rows = 0;
  for (const auto& row : result.rows) {
    if (row.status == "missing") {
      ++missing_rows;
      CHECK(row.metrics.transform == "noise");
      CHECK(row.metrics.severity == 2);
    }
  }
  CHECK(missing_rows == 1);
}

TEST_CASE("rows that failed generation are skipped during evaluation") {
  testutil::TempDir tmp("skip_failed");
  DatasetManifest m;
  m.global_seed = 1;
  m.table_checksum = 2;
  m.tool_version = "0.1.0";
  ManifestRow bad;
  bad.sample_id = "s1";
  bad.transform = "affine";
  bad.severity = 4;
  bad.image_path = "images/none.nii.gz";
  bad.label_path = "labels/none.nii.gz";
  bad.status = "failed: synthetic";
  bad.aux = "{}";
  m.rows = {bad};
  write_manifest(tmp.str("manifest.csv"), m);

  EvaluateResult result =
      evaluate_predictions(tmp.str("manifest.csv"), tmp.path().string(), 1, false);
  CHECK(result.skipped_failed == 1);
  CHECK(result.rows.empty());
}

TEST_CASE("metrics CSV round trip keeps ok rows and flags the rest") {
  testutil::TempDir tmp("metrics_csv");
  std::vector<MetricsRow> rows(3);
  rows[0].metrics.sample_id = "a";
  rows[0].metrics.transform = "clean";
  rows[0].metrics.severity = 0;
  rows[0].metrics.dsc = 0.875;
  rows[0].metrics.hd95_mm = 1.25;
  rows[1].metrics.sample_id = "a";
  rows[1].metrics.transform = "noise";
  rows[1].metrics.severity = 5;
  rows[1].metrics.dsc = 0.0;
  rows[1].metrics.null_prediction = true;
  rows[2].metrics.sample_id = "b";
  rows[2].metrics.transform = "noise";
  rows[2].metrics.severity = 1;
  rows[2].status = "missing";

  const std::string path = tmp.str("metrics.csv");
  write_metrics_csv(path, rows);
  auto back = read_metrics_csv(path);
  REQUIRE(back.size() == 2);  // the missing row is dropped
  CHECK(back[0].sample_id == "a");
  CHECK(back[0].dsc == 0.875);
  REQUIRE(back[0].hd95_mm.has_value());
  CHECK(*back[0].hd95_mm == 1.25);
  CHECK(back[1].null_prediction);
  CHECK_FALSE(back[1].hd95_mm.has_value());

  std::string text = slurp(path);
  CHECK(text.find("sample_id,transform,severity,dsc,hd95_mm,null_prediction,status") !=
        std::string::npos);
  CHECK(text.find("missing") != std::string::npos);
}

TEST_CASE("report files land on disk with consistent averages") {
  testutil::TempDir tmp("report_files");
  std::vector<SampleMetrics> records;
  const std::array<double, 5> per{0.8, 0.7, 0.6, 0.5, 0.4};
  for (const std::string& id : {"s1", "s2"}) {
    SampleMetrics clean;
    clean.sample_id = id;
    clean.transform = "clean";
    clean.dsc = 0.9;
    clean.hd95_mm = 1.0;
    records.push_back(clean);
    for (const std::string& name : {"noise", "smoothing"}) {
      for (int s = 1; s <= 5; ++s) {
        SampleMetrics m;
        m.sample_id = id;
        m.transform = name;
        m.severity = s;
        m.dsc = per[static_cast<std::size_t>(s - 1)] - (name == "smoothing" ? 0.1 : 0.0);
        m.hd95_mm = 2.0 + s;
        records.push_back(m);
      }
    }
  }
  RobustnessReport report = build_report(records, RobustnessWeights(2.0 / 3.0));
  write_report_files(report, tmp.path().string());

  CHECK(fs::exists(tmp.path() / "report.json"));
  CHECK(fs::exists(tmp.path() / "degradation.csv"));
  CHECK(fs::exists(tmp.path() / "weighted.csv"));
  CHECK(fs::exists(tmp.path() / "curves.csv"));

  nlohmann::json j = nlohmann::json::parse(slurp(tmp.str("report.json")));
  CHECK(j["alpha"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  REQUIRE(j["transforms"].size() == 2);
  CHECK(j["aggregate"]["wmdsc"].get<double>() ==
        doctest::Approx((report.transforms[0].wmdsc + report.transforms[1].wmdsc) / 2.0)
            .epsilon(1e-12));

  // degradation.csv: each metric row ends in the average over transforms
  std::istringstream deg(slurp(tmp.str("degradation.csv")));
  std::string header;
  std::getline(deg, header);
  CHECK(header.find("noise") != std::string::npos);
  CHECK(header.find("Avg.") != std::string::npos);
  std::string line;
  bool saw_mddeg = false;
  while (std::getline(deg, line)) {
    if (line.rfind("mddeg", 0) == 0) {
      saw_mddeg = true;
      std::vector<double> cells;
      std::stringstream ss(line);
      std::string cell;
      std::getline(ss, cell, ',');  // row label
      while (std::getline(ss, cell, ',')) {
        cells.push_back(std::stod(cell));
      }
      REQUIRE(cells.size() == 3);
      CHECK(cells[2] == doctest::Approx((cells[0] + cells[1]) / 2.0).epsilon(1e-5));
    }
  }
  CHECK(saw_mddeg);

  // curves.csv covers severities 0..5 per transform
  std::istringstream curves(slurp(tmp.str("curves.csv")));
  std::getline(curves, header);
  std::size_t curve_rows = 0;
  while (std::getline(curves, line)) {
    if (!line.empty()) ++curve_rows;
  }
  CHECK(curve_rows == 12);
}

TEST_CASE("comparison CSV marks insufficient cells without p-values") {
  testutil::TempDir tmp("cmp_csv");
  std::vector<SampleMetrics> records;
  for (const std::string& id : {"a", "b", "c"}) {
    SampleMetrics clean;
    clean.sample_id = id;
    clean.transform = "clean";
    clean.dsc = 0.9;
    records.push_back(clean);
    for (int s = 1; s <= 5; ++s) {
      SampleMetrics m;
      m.sample_id = id;
      m.transform = "noise";
      m.severity = s;
      m.dsc = 0.8;
      records.push_back(m);
    }
  }
  auto cells = compare_models(records, records, 0.01);
  const std::string path = tmp.str("comparison.csv");
  write_comparison_csv(path, cells);

  std::istringstream in(slurp(path));
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "transform,severity,n_pairs,mean_diff,w_plus,p_value,p_corrected,"
        "significant,status");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(line.find("insufficient_data") != std::string::npos);
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(rows == 5);
}

TEST_CASE("preprocessing writes normalized isotropic pairs") {
  testutil::TempDir in("prep_in");
  testutil::TempDir out("prep_out");

  Volume v(10, 12, 8);
  RngStream rng(21);
  for (auto& x : v.data()) {
    x = rng.uniform(50.0, 150.0);
  }
  v.spacing = {1.0, 1.0, 2.5};
  v.orientation = {'L', 'P', 'S'};
  LabelVolume l(10, 12, 8, 0);
  for (std::size_t z = 2; z < 6; ++z) {
    for (std::size_t y = 3; y < 9; ++y) {
      for (std::size_t x = 2; x < 8; ++x) {
        l(x, y, z) = 1;
      }
    }
  }
  l.spacing = v.spacing;
  l.orientation = v.orientation;
  save_volume(in.str("t1.nii.gz"), v);
  save_label(in.str("t1_label.nii.gz"), l);

  preprocess_dataset(in.path().string(), out.path().string(), 1.0, 1, false);

  Volume pv = load_volume(out.str("t1.nii.gz"));
  LabelVolume pl = load_label(out.str("t1_label.nii.gz"));
  CHECK(pv.orientation == std::array<char, 3>{'R', 'A', 'S'});
  for (double s : pv.spacing) {
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(pv.shape()[2] == 20);  // 8 voxels at 2.5 mm resampled to 1 mm
  CHECK(std::abs(pv.mean()) < 1e-9);
  CHECK(pv.stddev() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pl.shape() == pv.shape());
  bool any = false;
  for (auto b : pl.data()) {
    REQUIRE((b == 0 || b == 1));
    any = any || b == 1;
  }
  CHECK(any);
}
