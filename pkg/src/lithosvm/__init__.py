"""Lithology classification from well logs with a from-scratch SVM.

The package covers the full workflow: loading or synthesizing well-log
records, cleaning and resampling them on a uniform depth grid, z-score
normalization, ReliefF feature weighting, one-against-all SVM training
with a deterministic SMO solver (compiled core with a pure-Python
fallback), a Gaussian naive Bayes baseline, and confusion-matrix
evaluation with parameter sweeps.

The colliding per-model ``predict`` functions stay in their modules:
``multiclass.predict`` for the SVM and ``baselines.predict`` for the
naive Bayes baseline.
"""

from . import baselines, data_pipeline, evaluate, kernels, model_io, multiclass, preprocess, solver
from .baselines import GaussianNbModel, train_gaussian_nb
from .data_pipeline import (
    CLASS_NAMES,
    DEFAULT_CLASS_MEANS,
    DEFAULT_CLASS_STDDEVS,
    MISSING_SENTINEL,
    NOISE_FEATURE_NAME,
    PREDICTOR_ENVELOPE,
    PREDICTOR_NAMES,
    UNCLASSIFIED_NAME,
    DatasetBuildResult,
    LabeledDataset,
    LithologyClass,
    NormalizationStats,
    SplitConfig,
    SyntheticConfig,
    WellLogRecord,
    build_labeled_dataset,
    drop_missing,
    generate_synthetic,
    label_lithology,
    load_csv,
    resample_uniform,
    save_csv,
    split_train_test,
)
from .evaluate import (
    ConfusionMatrix,
    accuracy,
    adjacency_violation_rate,
    confusion_matrix,
    feature_subset_sweep,
    format_confusion_csv,
    row_normalize,
    sigma_sweep,
)
from .kernels import KERNEL_KINDS, KernelSpec, cross_kernel, gram_matrix, kernel_value, linear_kernel, rbf_kernel
from .model_io import load_model, save_model
from .multiclass import MulticlassSvmModel, decision_matrix, lithology_class_names, train_one_vs_all
from .preprocess import apply_normalization, fit_normalization, normalize_dataset, rank_features, relieff_weights
from .solver import (
    BinarySvmModel,
    ConvergenceError,
    SmoDiagnostics,
    SolverConfig,
    active_backend,
    decision_function,
    dual_objective,
    geometric_margin,
    kkt_violation,
    materialize_weights,
    train_binary_svm,
)

__version__ = "0.1.0"

__all__ = [
    "CLASS_NAMES",
    "DEFAULT_CLASS_MEANS",
    "DEFAULT_CLASS_STDDEVS",
    "KERNEL_KINDS",
    "MISSING_SENTINEL",
    "NOISE_FEATURE_NAME",
    "PREDICTOR_ENVELOPE",
    "PREDICTOR_NAMES",
    "UNCLASSIFIED_NAME",
    "BinarySvmModel",
    "ConfusionMatrix",
    "ConvergenceError",
    "DatasetBuildResult",
    "GaussianNbModel",
    "KernelSpec",
    "LabeledDataset",
    "LithologyClass",
    "MulticlassSvmModel",
    "NormalizationStats",
    "SmoDiagnostics",
    "SolverConfig",
    "SplitConfig",
    "SyntheticConfig",
    "WellLogRecord",
    "accuracy",
    "active_backend",
    "adjacency_violation_rate",
    "apply_normalization",
    "baselines",
    "build_labeled_dataset",
    "confusion_matrix",
    "cross_kernel",
    "data_pipeline",
    "decision_function",
    "decision_matrix",
    "drop_missing",
    "dual_objective",
    "evaluate",
    "feature_subset_sweep",
    "fit_normalization",
    "format_confusion_csv",
    "generate_synthetic",
    "geometric_margin",
    "gram_matrix",
    "kernel_value",
    "kernels",
    "kkt_violation",
    "label_lithology",
    "linear_kernel",
    "lithology_class_names",
    "load_csv",
    "load_model",
    "materialize_weights",
    "model_io",
    "multiclass",
    "normalize_dataset",
    "preprocess",
    "rank_features",
    "rbf_kernel",
    "relieff_weights",
    "resample_uniform",
    "row_normalize",
    "save_csv",
    "save_model",
    "sigma_sweep",
    "solver",
    "split_train_test",
    "train_binary_svm",
    "train_gaussian_nb",
    "train_one_vs_all",
    "__version__",
]
