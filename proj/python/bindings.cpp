#include <array>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "roodbench/nifti.hpp"
#include "roodbench/pipeline.hpp"
#include "roodbench/preprocess.hpp"
#include "roodbench/rng.hpp"
#include "roodbench/robustness.hpp"
#include "roodbench/seg_metrics.hpp"
#include "roodbench/severity.hpp"
#include "roodbench/transforms.hpp"
#include "roodbench/version.hpp"

namespace py = pybind11;
using namespace roodbench;

namespace {

// Arrays are exchanged in [z, y, x] index order, which lays out C-contiguous
// numpy buffers exactly like the internal x-fastest storage.

py::array_t<double> volume_to_numpy(const Volume& v) {
  const auto& s = v.shape();
  py::array_t<double> arr({s[2], s[1], s[0]});
  std::memcpy(arr.mutable_data(), v.data().data(), v.size() * sizeof(double));
  return arr;
}

Volume volume_from_numpy(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& arr,
    const std::array<double, 3>& spacing) {
  if (arr.ndim() != 3) {
    throw std::invalid_argument("expected a 3D array in [z, y, x] order");
  }
  Volume v(static_cast<std::size_t>(arr.shape(2)),
           static_cast<std::size_t>(arr.shape(1)),
           static_cast<std::size_t>(arr.shape(0)));
  v.spacing = spacing;
  std::memcpy(v.data().data(), arr.data(), v.size() * sizeof(double));
  return v;
}

py::array_t<std::uint8_t> label_to_numpy(const LabelVolume& l) {
  const auto& s = l.shape();
  py::array_t<std::uint8_t> arr({s[2], s[1], s[0]});
  std::memcpy(arr.mutable_data(), l.data().data(), l.size());
  return arr;
}

LabelVolume label_from_numpy(
    const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& arr,
    const std::array<double, 3>& spacing) {
  if (arr.ndim() != 3) {
    throw std::invalid_argument("expected a 3D array in [z, y, x] order");
  }
  LabelVolume l(static_cast<std::size_t>(arr.shape(2)),
                static_cast<std::size_t>(arr.shape(1)),
                static_cast<std::size_t>(arr.shape(0)));
  l.spacing = spacing;
  const std::uint8_t* src = arr.data();
  for (std::size_t i = 0; i < l.size(); ++i) {
    l.data()[i] = src[i] ? 1 : 0;
  }
  return l;
}

TransformKind kind_from_name_checked(const std::string& name) {
  auto kind = kind_from_name(name);
  if (!kind) {
    throw std::invalid_argument("unknown transform '" + name + "'");
  }
  return *kind;
}

TransformSpec make_spec(const std::string& kind, int severity, std::uint64_t seed) {
  TransformSpec spec;
  spec.kind = kind_from_name_checked(kind);
  spec.severity = severity;
  spec.seed = seed;
  return spec;
}

py::dict metrics_dict(const SampleMetrics& m) {
  py::dict d;
  d["sample_id"] = m.sample_id;
  d["transform"] = m.transform;
  d["severity"] = m.severity;
  d["dsc"] = m.dsc;
  d["hd95_mm"] = m.hd95_mm ? py::object(py::float_(*m.hd95_mm)) : py::none();
  d["null_prediction"] = m.null_prediction;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "corruption benchmark for 3D MRI segmentation models";
  m.attr("__version__") = kToolVersion;

  py::class_<Volume>(m, "Volume")
      .def_static("from_numpy", &volume_from_numpy, py::arg("array"),
                  py::arg("spacing") = std::array<double, 3>{1.0, 1.0, 1.0},
                  "Build a volume from a [z, y, x] array with (x, y, z) "
                  "spacing in mm.")
      .def("to_numpy", &volume_to_numpy, "Voxel data as a [z, y, x] array.")
      .def_property_readonly(
          "shape", [](const Volume& v) { return v.shape(); },
          "Extents as (nx, ny, nz).")
      .def_readwrite("spacing", &Volume::spacing)
      .def_readwrite("origin", &Volume::origin)
      .def("mean", &Volume::mean)
      .def("stddev", &Volume::stddev);

  py::class_<LabelVolume>(m, "LabelVolume")
      .def_static("from_numpy", &label_from_numpy, py::arg("array"),
                  py::arg("spacing") = std::array<double, 3>{1.0, 1.0, 1.0},
                  "Build a binary mask from a [z, y, x] array (nonzero = "
                  "foreground).")
      .def("to_numpy", &label_to_numpy, "Mask data as a [z, y, x] uint8 array.")
      .def_property_readonly(
          "shape", [](const LabelVolume& l) { return l.shape(); },
          "Extents as (nx, ny, nz).")
      .def_readwrite("spacing", &LabelVolume::spacing)
      .def("foreground_count", &LabelVolume::foreground_count);

  py::class_<SeverityTable>(m, "SeverityTable")
      .def_static("defaults", &SeverityTable::defaults)
      .def_static("from_json_file", &SeverityTable::from_json_file, py::arg("path"))
      .def("checksum", &SeverityTable::checksum)
      .def("validate", &SeverityTable::validate);

  m.def("load_volume", &load_volume, py::arg("path"));
  m.def("load_label", &load_label, py::arg("path"));
  m.def("save_volume", &save_volume, py::arg("path"), py::arg("volume"),
        py::arg("as_float64") = false);
  m.def("save_label", &save_label, py::arg("path"), py::arg("label"));

  m.def("derive_seed", &derive_seed, py::arg("global_seed"), py::arg("sample_id"),
        py::arg("kind"), py::arg("severity"),
        "Per-cell seed hash used by benchmark generation.");

  m.def(
      "apply_transform",
      [](const Volume& v, const std::string& kind, int severity, std::uint64_t seed,
         const SeverityTable& table) {
        return apply(make_spec(kind, severity, seed), table, v);
      },
      py::arg("volume"), py::arg("kind"), py::arg("severity"), py::arg("seed"),
      py::arg("table") = SeverityTable::defaults(),
      "Apply one corruption transform at the given severity.");
  m.def(
      "co_transform_label",
      [](const LabelVolume& l, const std::string& kind, int severity,
         std::uint64_t seed, const SeverityTable& table) {
        return co_transform_label(make_spec(kind, severity, seed), table, l);
      },
      py::arg("label"), py::arg("kind"), py::arg("severity"), py::arg("seed"),
      py::arg("table") = SeverityTable::defaults(),
      "Warp a mask with the identical parameter draw as apply_transform.");
  m.def("transform_names", []() {
    std::vector<std::string> names;
    for (int k = 0; k < kNumTransformKinds; ++k) {
      names.emplace_back(kind_name(static_cast<TransformKind>(k)));
    }
    return names;
  });

  m.def("reorient_to_ras",
        static_cast<Volume (*)(const Volume&)>(&reorient_to_ras), py::arg("volume"));
  m.def(
      "resample_isotropic",
      [](const Volume& v, double target_mm) {
        return resample_isotropic(v, target_mm, InterpMode::Linear);
      },
      py::arg("volume"), py::arg("target_mm"));
  m.def("zscore_normalize", &zscore_normalize, py::arg("volume"));

  m.def("dice", &dice, py::arg("a"), py::arg("b"));
  m.def(
      "hd95",
      [](const LabelVolume& a, const LabelVolume& b) -> py::object {
        auto d = hd95(a, b);
        return d ? py::object(py::float_(*d)) : py::none();
      },
      py::arg("a"), py::arg("b"),
      "95th percentile symmetric surface distance in mm; None when a mask "
      "is empty.");
  m.def(
      "evaluate_sample",
      [](const LabelVolume& pred, const LabelVolume& gt, const std::string& sample_id,
         const std::string& transform, int severity) {
        return metrics_dict(evaluate_sample(pred, gt, sample_id, transform, severity));
      },
      py::arg("prediction"), py::arg("truth"), py::arg("sample_id") = "sample",
      py::arg("transform") = "clean", py::arg("severity") = 0);

  m.def(
      "wilcoxon_signed_rank",
      [](const std::vector<double>& diffs) {
        WilcoxonResult r = wilcoxon_signed_rank(diffs);
        py::dict d;
        d["n"] = r.n;
        d["insufficient"] = r.insufficient;
        d["w_plus"] = r.w_plus;
        d["p_value"] = r.p_value;
        return d;
      },
      py::arg("diffs"));

  m.def(
      "generate_benchmark",
      [](const std::string& input_dir, const std::string& output_dir,
         std::uint64_t seed, const std::vector<std::string>& transforms, int jobs,
         const SeverityTable& table) {
        GenerateOptions options;
        options.input_dir = input_dir;
        options.output_dir = output_dir;
        options.global_seed = seed;
        for (const auto& name : transforms) {
          options.transforms.push_back(kind_from_name_checked(name));
        }
        options.jobs = jobs;
        options.table = table;
        GenerateResult result = generate_benchmark(options);
        py::dict d;
        d["rows"] = result.manifest.rows.size();
        d["failed"] = result.failed_rows;
        d["manifest"] = output_dir + "/manifest.csv";
        return d;
      },
      py::arg("input_dir"), py::arg("output_dir"), py::arg("seed") = 0,
      py::arg("transforms") = std::vector<std::string>{}, py::arg("jobs") = 1,
      py::arg("table") = SeverityTable::defaults());

  m.def(
      "evaluate_predictions",
      [](const std::string& manifest, const std::string& pred_dir,
         const std::string& output_csv, int jobs) {
        EvaluateResult result = evaluate_predictions(manifest, pred_dir, jobs, false);
        write_metrics_csv(output_csv, result.rows);
        py::dict d;
        d["rows"] = result.rows.size();
        d["missing"] = result.missing;
        d["skipped_failed"] = result.skipped_failed;
        return d;
      },
      py::arg("manifest"), py::arg("pred_dir"), py::arg("output_csv"),
      py::arg("jobs") = 1);

  m.def(
      "write_report",
      [](const std::string& metrics_csv, const std::string& output_dir,
         double alpha) {
        auto records = read_metrics_csv(metrics_csv);
        RobustnessReport report = build_report(records, RobustnessWeights(alpha));
        write_report_files(report, output_dir);
      },
      py::arg("metrics_csv"), py::arg("output_dir"), py::arg("alpha") = 2.0 / 3.0,
      "Aggregate a metrics CSV into report.json plus the CSV tables.");
}
