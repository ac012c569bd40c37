"""CT-to-radiograph simulation with pixel-aligned bone masks."""

from ._core import (
    AugmentConfig,
    AugmentParams,
    CtVolume,
    LabelMask,
    LabelVolume,
    MetricsReport,
    ProjectionConfig,
    Radiograph,
    XraysimError,
    apply_augmentation,
    asd,
    clamp_air,
    clamp_artifacts,
    dice,
    evaluate_manifests,
    label_names,
    load_ct,
    load_image_png,
    load_labels,
    load_mask_png,
    make_phantom,
    normalize_minmax,
    project,
    project_labels,
    resample_isotropic,
    resample_labels,
    resize,
    resize_mask,
    rotate_labels,
    rotate_volume,
    sample_params,
    save_ct,
    save_image_png,
    save_labels,
    save_mask_png,
    simulate_view,
    tissue_reduction,
)

__all__ = [
    "AugmentConfig",
    "AugmentParams",
    "CtVolume",
    "LabelMask",
    "LabelVolume",
    "MetricsReport",
    "ProjectionConfig",
    "Radiograph",
    "XraysimError",
    "apply_augmentation",
    "asd",
    "clamp_air",
    "clamp_artifacts",
    "dice",
    "evaluate_manifests",
    "label_names",
    "load_ct",
    "load_image_png",
    "load_labels",
    "load_mask_png",
    "make_phantom",
    "normalize_minmax",
    "project",
    "project_labels",
    "resample_isotropic",
    "resample_labels",
    "resize",
    "resize_mask",
    "rotate_labels",
    "rotate_volume",
    "sample_params",
    "save_ct",
    "save_image_png",
    "save_labels",
    "save_mask_png",
    "simulate_view",
    "tissue_reduction",
]
