"""Corruption benchmark for 3D MRI segmentation models."""

from ._core import (
    LabelVolume,
    SeverityTable,
    Volume,
    __version__,
    apply_transform,
    co_transform_label,
    derive_seed,
    dice,
    evaluate_predictions,
    evaluate_sample,
    generate_benchmark,
    hd95,
    load_label,
    load_volume,
    reorient_to_ras,
    resample_isotropic,
    save_label,
    save_volume,
    transform_names,
    wilcoxon_signed_rank,
    write_report,
    zscore_normalize,
)

__all__ = [
    "LabelVolume",
    "SeverityTable",
    "Volume",
    "__version__",
    "apply_transform",
    "co_transform_label",
    "derive_seed",
    "dice",
    "evaluate_predictions",
    "evaluate_sample",
    "generate_benchmark",
    "hd95",
    "load_label",
    "load_volume",
    "reorient_to_ras",
    "resample_isotropic",
    "save_label",
    "save_volume",
    "transform_names",
    "wilcoxon_signed_rank",
    "write_report",
    "zscore_normalize",
]
