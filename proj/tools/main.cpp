#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roodbench/pipeline.hpp"
#include "roodbench/robustness.hpp"
#include "roodbench/severity.hpp"
#include "roodbench/version.hpp"

namespace {

using namespace roodbench;

std::vector<TransformKind> parse_transform_list(const std::string& csv) {
  std::vector<TransformKind> kinds;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = csv.find(',', start);
    std::string name = comma == std::string::npos ? csv.substr(start)
                                                  : csv.substr(start, comma - start);
    auto kind = kind_from_name(name);
    if (!kind) {
      std::string valid;
      for (int k = 0; k < kNumTransformKinds; ++k) {
        if (k > 0) {
          valid += ", ";
        }
        valid += kind_name(static_cast<TransformKind>(k));
      }
      throw std::invalid_argument("unknown transform '" + name +
                                  "' in --transforms (valid: " + valid + ")");
    }
    kinds.push_back(*kind);
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  return kinds;
}

SeverityTable load_table(const std::string& config_path) {
  if (config_path.empty()) {
    return SeverityTable::defaults();
  }
  return SeverityTable::from_json_file(config_path);
}

struct GenerateArgs {
  std::string input_dir;
  std::string output_dir;
  std::string config;
  std::string transforms;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool verbose = false;
};

int run_generate(const GenerateArgs& args) {
  GenerateOptions options;
  options.input_dir = args.input_dir;
  options.output_dir = args.output_dir;
  options.table = load_table(args.config);
  if (!args.transforms.empty()) {
    options.transforms = parse_transform_list(args.transforms);
  }
  options.global_seed = args.seed;
  options.jobs = args.jobs;
  options.verbose = args.verbose;

  GenerateResult result = generate_benchmark(options);
  for (const auto& row : result.manifest.rows) {
    if (row.status != "ok") {
      std::fprintf(stderr, "%s %s s%d: %s\n", row.sample_id.c_str(),
                   row.transform.c_str(), row.severity, row.status.c_str());
    }
  }
  std::fprintf(stderr, "wrote %zu manifest rows to %s (%zu failed)\n",
               result.manifest.rows.size(), args.output_dir.c_str(),
               result.failed_rows);
  return result.failed_rows == 0 ? 0 : 1;
}

struct EvaluateArgs {
  std::string manifest;
  std::string predictions;
  std::string output = "metrics.csv";
  int jobs = 1;
  bool verbose = false;
};

int run_evaluate(const EvaluateArgs& args) {
  EvaluateResult result =
      evaluate_predictions(args.manifest, args.predictions, args.jobs, args.verbose);
  write_metrics_csv(args.output, result.rows);
  std::fprintf(stderr,
               "evaluated %zu rows to %s (%zu missing predictions, %zu failed "
               "manifest rows skipped)\n",
               result.rows.size(), args.output.c_str(), result.missing,
               result.skipped_failed);
  return result.missing == 0 && result.skipped_failed == 0 ? 0 : 1;
}

struct ReportArgs {
  std::string metrics;
  std::string output_dir;
  double alpha = 0.6667;
};

int run_report(const ReportArgs& args) {
  if (!(args.alpha > 0.0) || args.alpha > 1.0) {
    std::fprintf(stderr, "alpha must be in (0, 1]\n");
    return 2;
  }
  auto records = read_metrics_csv(args.metrics);
  RobustnessReport report = build_report(records, RobustnessWeights(args.alpha));
  write_report_files(report, args.output_dir);
  std::fprintf(stderr, "wrote report.json, degradation.csv, weighted.csv, curves.csv to %s\n",
               args.output_dir.c_str());
  return 0;
}

struct CompareArgs {
  std::string metrics_a;
  std::string metrics_b;
  std::string output = "comparison.csv";
  double significance = 0.01;
};

int run_compare(const CompareArgs& args) {
  if (!(args.significance > 0.0) || args.significance >= 1.0) {
    std::fprintf(stderr, "significance must be in (0, 1)\n");
    return 2;
  }
  auto records_a = read_metrics_csv(args.metrics_a);
  auto records_b = read_metrics_csv(args.metrics_b);
  auto cells = compare_models(records_a, records_b, args.significance);
  write_comparison_csv(args.output, cells);

  std::size_t significant = 0;
  for (const auto& cell : cells) {
    if (cell.significant) {
      ++significant;
    }
  }
  std::fprintf(stderr, "compared %zu cells to %s (%zu significant at %g after "
               "Bonferroni correction)\n",
               cells.size(), args.output.c_str(), significant, args.significance);
  return 0;
}

struct PreprocessArgs {
  std::string input_dir;
  std::string output_dir;
  double spacing = 1.0;
  int jobs = 1;
  bool verbose = false;
};

int run_preprocess(const PreprocessArgs& args) {
  if (!(args.spacing > 0.0)) {
    std::fprintf(stderr, "spacing must be positive\n");
    return 2;
  }
  preprocess_dataset(args.input_dir, args.output_dir, args.spacing, args.jobs,
                     args.verbose);
  std::fprintf(stderr, "preprocessed pairs written to %s\n", args.output_dir.c_str());
  return 0;
}

void add_jobs_flags(CLI::App* cmd, int& jobs, bool& verbose) {
  cmd->add_option("--jobs", jobs, "worker threads (default 1)")
      ->check(CLI::Range(1, 1 << 16));
  cmd->add_flag("--verbose", verbose, "log per-sample progress to stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corruption benchmark generator and evaluator for 3D MRI "
               "segmentation models"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "apply the corruption battery to an image/label directory");
  generate
      ->add_option("--input-dir", gen.input_dir,
                   "directory of <id>.nii[.gz] images with <id>_label.nii[.gz] masks")
      ->required();
  generate
      ->add_option("--output-dir", gen.output_dir,
                   "directory for transformed pairs plus manifest.csv")
      ->required();
  generate->add_option("--seed", gen.seed, "global seed for all parameter draws");
  generate
      ->add_option("--config", gen.config,
                   "severity table JSON overriding the built-in defaults")
      ->envname("ROODBENCH_CONFIG");
  generate->add_option("--transforms", gen.transforms,
                       "comma-separated subset of transforms (default: all)");
  add_jobs_flags(generate, gen.jobs, gen.verbose);

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score binary predictions against a generated benchmark");
  evaluate->add_option("--manifest", ev.manifest, "manifest.csv of the benchmark")
      ->required();
  evaluate
      ->add_option("--predictions", ev.predictions,
                   "directory of <sample>__<transform>__s<severity>.nii[.gz] masks")
      ->required();
  evaluate->add_option("--output", ev.output, "metrics CSV to write");
  add_jobs_flags(evaluate, ev.jobs, ev.verbose);

  ReportArgs rep;
  CLI::App* report = app.add_subcommand(
      "report", "aggregate a metrics CSV into robustness tables");
  report->add_option("--metrics", rep.metrics, "metrics CSV from evaluate")
      ->required();
  report->add_option("--output-dir", rep.output_dir, "directory for report files")
      ->required();
  report->add_option("--alpha", rep.alpha,
                     "severity weight decay in (0, 1] (default 0.6667)");

  CompareArgs cmp;
  CLI::App* compare = app.add_subcommand(
      "compare", "test two models' metrics for paired DSC differences");
  compare->add_option("--metrics-a", cmp.metrics_a, "metrics CSV of model A")
      ->required();
  compare->add_option("--metrics-b", cmp.metrics_b, "metrics CSV of model B")
      ->required();
  compare->add_option("--output", cmp.output, "comparison CSV to write");
  compare->add_option("--significance", cmp.significance,
                      "per-cell significance level (default 0.01)");

  PreprocessArgs pre;
  CLI::App* preprocess = app.add_subcommand(
      "preprocess", "reorient to RAS+, resample isotropically, Z-score normalize");
  preprocess
      ->add_option("--input-dir", pre.input_dir, "directory of image/label pairs")
      ->required();
  preprocess
      ->add_option("--output-dir", pre.output_dir, "directory for processed pairs")
      ->required();
  preprocess->add_option("--spacing", pre.spacing,
                         "target isotropic spacing in mm (default 1.0)");
  add_jobs_flags(preprocess, pre.jobs, pre.verbose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      return run_generate(gen);
    }
    if (evaluate->parsed()) {
      return run_evaluate(ev);
    }
    if (report->parsed()) {
      return run_report(rep);
    }
    if (compare->parsed()) {
      return run_compare(cmp);
    }
    if (preprocess->parsed()) {
      return run_preprocess(pre);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
