"""Command-line driver wiring the lithology pipeline end to end.

Subcommands: gen, train, predict, eval, sweep, relieff. Every run echoes
its effective configuration to stderr, keeps diagnostics on stderr and
data on files or stdout, and exits 0 only when the run completed. All
randomness flows from --seed, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace

import numpy as np

from . import baselines, model_io, multiclass
from .data_pipeline import (
    NOISE_FEATURE_NAME,
    LabeledDataset,
    LithologyClass,
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
    accuracy,
    adjacency_violation_rate,
    confusion_matrix,
    feature_subset_sweep,
    format_confusion_csv,
    sigma_sweep,
)
from .kernels import KernelSpec, linear_kernel, rbf_kernel
from .preprocess import apply_normalization, normalize_dataset, rank_features, relieff_weights
from .solver import ConvergenceError, SolverConfig


class PipelineError(RuntimeError):
    """Pipeline failure tagged with the stage that raised it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


def _stage(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ValueError, OSError, ConvergenceError) as exc:
        raise PipelineError(stage, str(exc)) from exc


def _fmt(value: float) -> str:
    return repr(float(value))


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


# ---------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lithosvm",
        description="Lithology classification from well logs (SVM and naive Bayes).",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    seed = argparse.ArgumentParser(add_help=False)
    seed.add_argument("--seed", type=int, default=42, help="RNG seed (default 42)")

    inp = argparse.ArgumentParser(add_help=False)
    inp.add_argument("--in", dest="input", metavar="CSV", help="input CSV path")

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", metavar="PATH", help="output path (default stdout)")

    split = argparse.ArgumentParser(add_help=False)
    split.add_argument("--train-fraction", type=float, default=0.70,
                       help="per-well training fraction (default 0.70)")
    split.add_argument("--resample-step", type=float, default=0.15,
                       help="uniform depth step applied per well (default 0.15)")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", choices=("svm", "nb"), default="svm",
                       help="classifier family (default svm)")
    model.add_argument("--kernel", choices=("linear", "rbf"), default="rbf",
                       help="SVM kernel (default rbf)")
    model.add_argument("--sigma", type=float, default=0.5,
                       help="RBF bandwidth (default 0.5)")
    model.add_argument("--C", type=float, default=10.0,
                       help="box constraint (default 10.0)")
    model.add_argument("--kkt-tol", type=float, default=1e-3,
                       help="solver KKT tolerance (default 1e-3)")
    model.add_argument("--max-passes", type=int, default=200,
                       help="solver examination budget multiplier (default 200)")

    p = sub.add_parser("gen", parents=[seed, out],
                       help="write a synthetic labeled well-log CSV")
    p.add_argument("--samples-per-class", type=int, default=125,
                   help="records per class per well (default 125)")
    p.add_argument("--wells", type=int, default=4, help="well count (default 4)")
    p.add_argument("--depth-start", type=float, default=1000.0,
                   help="first depth of each well (default 1000.0)")
    p.add_argument("--resample-step", type=float, default=0.15,
                   help="depth grid step (default 0.15)")
    p.add_argument("--noise-feature", action="store_true",
                   help="append a pure-noise NOISE column")
    p.set_defaults(handler=_cmd_gen)

    p = sub.add_parser("train", parents=[seed, inp, out, split, model],
                       help="train a classifier and write the model file")
    p.add_argument("--train-out", metavar="CSV", help="also write the training split")
    p.add_argument("--test-out", metavar="CSV", help="also write the held-out split")
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("predict", parents=[seed, inp, out],
                       help="predict classes for a CSV with a saved model")
    p.add_argument("--model-file", metavar="PATH", help="trained model file")
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("eval", parents=[seed, inp, out],
                       help="confusion matrix and accuracy of a model on labeled data")
    p.add_argument("--model-file", metavar="PATH", help="trained model file")
    p.add_argument("--normalized", action="store_true",
                   help="row-normalize the confusion matrix")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("sweep", parents=[seed, inp, out, split, model],
                       help="accuracy sweep over sigma or feature subsets")
    p.add_argument("--mode", choices=("sigma", "features"), required=True)
    p.add_argument("--grid", metavar="LO:HI:STEP", default="0.1:2.0:0.1",
                   help="sigma grid (default 0.1:2.0:0.1)")
    p.add_argument("--subsets", metavar="A+B,...",
                   default="GR+NPHI,GR+NPHI+RHOB,GR+NPHI+RHOB+DT",
                   help="comma-separated feature subsets joined by +")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("relieff", parents=[seed, inp, out],
                       help="ReliefF relevance weight per feature")
    p.add_argument("--neighbors", type=int, default=10,
                   help="hits/misses per class (default 10)")
    p.add_argument("--sample-count", type=int, default=None,
                   help="instances to sample (default: all)")
    p.set_defaults(handler=_cmd_relieff)

    return parser


def _validate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """Flag validation before any file is touched; failures are usage errors."""
    if args.seed < 0:
        parser.error("--seed must be non-negative")
    cmd = args.subcommand
    need_input = cmd in ("train", "predict", "eval", "sweep", "relieff")
    if need_input and not args.input:
        parser.error(f"{cmd} requires --in")
    if cmd in ("train", "gen") and not args.out:
        parser.error(f"{cmd} requires --out")
    if cmd in ("predict", "eval") and not args.model_file:
        parser.error(f"{cmd} requires --model-file")
    if hasattr(args, "resample_step") and args.resample_step <= 0:
        parser.error("--resample-step must be positive")
    if hasattr(args, "train_fraction") and not 0.0 < args.train_fraction < 1.0:
        parser.error("--train-fraction must lie strictly between 0 and 1")
    if hasattr(args, "kernel"):
        if args.sigma <= 0:
            parser.error("--sigma must be positive")
        if args.C <= 0:
            parser.error("--C must be positive")
        if not 0.0 < args.kkt_tol < 1.0:
            parser.error("--kkt-tol must lie strictly between 0 and 1")
        if args.max_passes < 1:
            parser.error("--max-passes must be at least 1")
    if cmd == "gen":
        if args.samples_per_class < 1:
            parser.error("--samples-per-class must be at least 1")
        if args.wells < 1:
            parser.error("--wells must be at least 1")
    if cmd == "sweep" and args.mode == "sigma":
        args.grid_values = _parse_grid(parser, args.grid)
    if cmd == "sweep" and args.mode == "features":
        args.subset_list = _parse_subsets(parser, args.subsets)
    if cmd == "relieff":
        if args.neighbors < 1:
            parser.error("--neighbors must be at least 1")
        if args.sample_count is not None and args.sample_count < 1:
            parser.error("--sample-count must be at least 1")


def _parse_grid(parser: argparse.ArgumentParser, text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        parser.error(f"--grid must be LO:HI:STEP, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        parser.error(f"--grid has a non-numeric part: {text!r}")
    if lo <= 0 or step <= 0 or hi < lo:
        parser.error("--grid needs 0 < LO <= HI and STEP > 0")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _parse_subsets(parser: argparse.ArgumentParser, text: str) -> list[tuple[str, ...]]:
    subsets = []
    for chunk in text.split(","):
        names = tuple(n for n in chunk.split("+") if n)
        if not names:
            parser.error(f"--subsets contains an empty subset: {text!r}")
        subsets.append(names)
    return subsets


def _echo_config(args: argparse.Namespace) -> None:
    skip = ("handler", "grid_values", "subset_list")
    pairs = [(k, v) for k, v in sorted(vars(args).items()) if k not in skip]
    _diag("config: " + " ".join(f"{k}={v}" for k, v in pairs))


# ------------------------------------------------------------- pipeline


def _kernel_from_args(args: argparse.Namespace) -> KernelSpec:
    return linear_kernel() if args.kernel == "linear" else rbf_kernel(args.sigma)


def _solver_from_args(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(C=args.C, kkt_tol=args.kkt_tol, max_passes=args.max_passes)


def _load_clean(args: argparse.Namespace, resample: bool) -> tuple[list[WellLogRecord], int]:
    records = _stage("load", load_csv, args.input)
    records, dropped = drop_missing(records)
    if dropped:
        _diag(f"dropped {dropped} record(s) with missing values")
    if not records:
        raise PipelineError("clean", "no records left after dropping missing values")
    if resample:
        resampled = []
        for well in sorted({r.well_id for r in records}):
            rows = sorted((r for r in records if r.well_id == well), key=lambda r: r.depth)
            resampled.extend(_stage("resample", resample_uniform, rows, args.resample_step))
        records = resampled
    return records, dropped


def _build_dataset(records: list[WellLogRecord]) -> tuple[LabeledDataset, int, int]:
    build = _stage("label", build_labeled_dataset, records)
    if build.label_disagreements:
        _diag(
            f"warning: {build.label_disagreements} row(s) where labels recomputed "
            "from fractions disagree with the class column; fractions win"
        )
    if build.unclassified:
        _diag(f"excluded {build.unclassified} unclassified row(s)")
    return build.dataset, build.unclassified, build.label_disagreements


def _records_from_dataset(ds: LabeledDataset) -> list[WellLogRecord]:
    col = {name: i for i, name in enumerate(ds.feature_names)}
    for required in ("GR", "NPHI", "RHOB", "DT"):
        if required not in col:
            raise ValueError(f"dataset lacks predictor column {required}")
    has_noise = NOISE_FEATURE_NAME in col
    records = []
    for i in range(len(ds)):
        row = ds.features[i]
        records.append(
            WellLogRecord(
                well_id=str(ds.well_ids[i]),
                depth=float(ds.depths[i]),
                gr=float(row[col["GR"]]),
                nphi=float(row[col["NPHI"]]),
                rhob=float(row[col["RHOB"]]),
                dt=float(row[col["DT"]]),
                noise=float(row[col[NOISE_FEATURE_NAME]]) if has_noise else None,
                label=LithologyClass(int(ds.labels[i])),
            )
        )
    return records


def _model_predict(model, features: np.ndarray) -> np.ndarray:
    if isinstance(model, multiclass.MulticlassSvmModel):
        return multiclass.predict(model, features)
    if isinstance(model, baselines.GaussianNbModel):
        return baselines.predict(model, features)
    raise PipelineError("predict", f"unsupported model type {type(model).__name__}")


def _write_text(out_path: str | None, text: str) -> None:
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header: list[str], rows: list[list[str]], comments: list[str] | None = None) -> str:
    buf = io.StringIO()
    for line in comments or []:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ----------------------------------------------------------- subcommands


def _cmd_gen(args: argparse.Namespace) -> int:
    config = SyntheticConfig(
        seed=args.seed,
        samples_per_class=args.samples_per_class,
        depth_start=args.depth_start,
        depth_step=args.resample_step,
        wells=args.wells,
        noise_feature=args.noise_feature,
    )
    records = _stage("generate", generate_synthetic, config)
    # stamp the rule-derived class so the CSV is self-describing; training
    # recomputes labels from the fractions either way
    records = [
        replace(r, label=label_lithology(r.v_sand, r.v_shale)) for r in records
    ]
    _stage("save", save_csv, args.out, records, True)
    _diag(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    records, dropped = _load_clean(args, resample=True)
    dataset, unclassified, disagreements = _build_dataset(records)
    split_cfg = SplitConfig(train_fraction=args.train_fraction, seed=args.seed)
    train_set, test_set = _stage("split", split_train_test, dataset, split_cfg)
    train_norm = _stage("normalize", normalize_dataset, train_set)

    if args.model == "nb":
        model = _stage(
            "train", baselines.train_gaussian_nb,
            train_norm.features, train_norm.labels,
            feature_names=train_norm.feature_names,
            normalization=train_norm.normalization,
        )
    else:
        model = _stage(
            "train", multiclass.train_one_vs_all,
            train_norm.features, train_norm.labels,
            _solver_from_args(args), _kernel_from_args(args),
            feature_names=train_norm.feature_names,
            normalization=train_norm.normalization,
        )
    _stage("save", model_io.save_model, args.out, model)
    if args.train_out:
        _stage("save", save_csv, args.train_out, _records_from_dataset(train_set), True)
    if args.test_out:
        _stage("save", save_csv, args.test_out, _records_from_dataset(test_set), True)

    def counts_line(ds: LabeledDataset) -> str:
        counts = ds.class_counts()
        name_of = dict(zip(model.classes, model.class_names))
        return " ".join(f"{name_of.get(c, f'class{c}')}={n}" for c, n in sorted(counts.items()))

    print("train report")
    print(f"  rows: kept={len(dataset)} dropped={dropped} "
          f"unclassified={unclassified} label_disagreements={disagreements}")
    print(f"  split: train={len(train_set)} test={len(test_set)} "
          f"(fraction {args.train_fraction})")
    print(f"  train class counts: {counts_line(train_set)}")
    print(f"  test class counts: {counts_line(test_set)}")
    if args.model == "svm":
        print(f"  kernel: {model.models[0].kernel.describe()}")
        print("  kkt residual per binary model:")
        for name, binary in zip(model.class_names, model.models):
            print(f"    {name}: {binary.diagnostics.max_kkt_violation:.6e}")
    else:
        print("  model: gaussian naive Bayes (no KKT residuals)")
    print(f"  model file: {args.out}")
    return 0


def _feature_matrix(records: list[WellLogRecord], names: tuple[str, ...]) -> np.ndarray:
    getters = {
        "GR": lambda r: r.gr, "NPHI": lambda r: r.nphi,
        "RHOB": lambda r: r.rhob, "DT": lambda r: r.dt,
        NOISE_FEATURE_NAME: lambda r: r.noise,
    }
    for name in names:
        if name not in getters:
            raise PipelineError("features", f"model expects unsupported feature {name!r}")
    columns = []
    for name in names:
        get = getters[name]
        values = [get(r) for r in records]
        if any(v is None for v in values):
            raise PipelineError("features", f"input lacks values for model feature {name!r}")
        columns.append(values)
    return np.array(columns, dtype=np.float64).T


def _cmd_predict(args: argparse.Namespace) -> int:
    model = _stage("load-model", model_io.load_model, args.model_file)
    if isinstance(model, type(None)) or not hasattr(model, "feature_names"):
        raise PipelineError("load-model", "model file does not hold a classifier")
    records, _ = _load_clean(args, resample=False)
    X = _feature_matrix(records, tuple(model.feature_names))
    if model.normalization is not None:
        X = _stage("normalize", apply_normalization, X, model.normalization)
    codes = _model_predict(model, X)
    name_of = dict(zip(model.classes, model.class_names))
    rows = [
        [rec.well_id, _fmt(rec.depth), name_of[int(code)]]
        for rec, code in zip(records, codes)
    ]
    _write_text(args.out, _csv_text(["well_id", "depth", "class"], rows))
    _diag(f"predicted {len(rows)} record(s)")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    model = _stage("load-model", model_io.load_model, args.model_file)
    records, _ = _load_clean(args, resample=False)
    dataset, _, _ = _build_dataset(records)
    subset = _stage("features", dataset.select_features, tuple(model.feature_names))
    X = subset.features
    if model.normalization is not None:
        X = _stage("normalize", apply_normalization, X, model.normalization)
    predicted = _model_predict(model, X)
    cm = _stage(
        "evaluate", confusion_matrix,
        subset.labels, predicted, model.classes, model.class_names,
    )
    _write_text(args.out, format_confusion_csv(cm, normalized=args.normalized))
    print(f"accuracy={_fmt(accuracy(cm))}")
    print(f"adjacency_violation_rate={_fmt(adjacency_violation_rate(cm))}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    records, _ = _load_clean(args, resample=True)
    dataset, _, _ = _build_dataset(records)
    split_cfg = SplitConfig(train_fraction=args.train_fraction, seed=args.seed)
    train_set, test_set = _stage("split", split_train_test, dataset, split_cfg)
    solver_cfg = _solver_from_args(args)

    comments = [
        "lithosvm sweep",
        f"mode={args.mode} seed={args.seed} input={args.input}",
        f"C={_fmt(args.C)} kkt_tol={_fmt(args.kkt_tol)} max_passes={args.max_passes} "
        f"train_fraction={_fmt(args.train_fraction)} resample_step={_fmt(args.resample_step)}",
    ]
    if args.mode == "sigma":
        comments.append("kernel convention: K(x,y) = exp(-||x-y||^2 / (2*sigma^2))")
        results = _stage(
            "sweep", sigma_sweep, train_set, test_set, args.grid_values, solver_cfg
        )
        rows = [[_fmt(sigma), _fmt(acc)] for sigma, acc in results]
    else:
        kernel = _kernel_from_args(args)
        comments.append(f"kernel: {kernel.describe()}")
        results = _stage(
            "sweep", feature_subset_sweep,
            train_set, test_set, args.subset_list, kernel, solver_cfg,
        )
        rows = [["+".join(names), _fmt(acc)] for names, acc in results]
    _write_text(args.out, _csv_text(["parameter", "accuracy"], rows, comments))
    _diag(f"swept {len(rows)} point(s)")
    return 0


def _cmd_relieff(args: argparse.Namespace) -> int:
    records, _ = _load_clean(args, resample=False)
    dataset, _, _ = _build_dataset(records)
    weights = _stage(
        "relieff", relieff_weights,
        dataset.features, dataset.labels,
        k=args.neighbors, sample_count=args.sample_count, seed=args.seed,
    )
    ranked = rank_features(weights, dataset.feature_names)
    weight_of = dict(zip(dataset.feature_names, weights))
    rows = [[name, _fmt(weight_of[name])] for name in ranked]
    _write_text(args.out, _csv_text(["feature", "weight"], rows))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    _echo_config(args)
    try:
        return args.handler(args)
    except PipelineError as exc:
        _diag(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
