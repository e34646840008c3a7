"""Well-log dataset handling: CSV ingest, cleaning, resampling, lithology
labeling from sand/shale fractions, per-well train/test splitting, and a
synthetic generator for benchmarking."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace

import numpy as np

# Conventional well-log null value; any non-finite value also counts as missing.
MISSING_SENTINEL = -999.25

PREDICTOR_NAMES = ("GR", "NPHI", "RHOB", "DT")
NOISE_FEATURE_NAME = "NOISE"

# Observed min/max envelope of each predictor (API, v/v, g/cc, us/ft).
PREDICTOR_ENVELOPE = {
    "GR": (13.45, 104.82),
    "NPHI": (0.09, 0.61),
    "RHOB": (1.69, 2.86),
    "DT": (60.68, 138.24),
}


class LithologyClass(enum.IntEnum):
    """Ordinal lithology classes; adjacency distance is |code_a - code_b|."""

    SAND = 0
    SHALY_SAND = 1
    SANDY_SHALE = 2
    SHALE = 3

    @property
    def label(self) -> str:
        return CLASS_NAMES[self.value]


CLASS_NAMES = ("Sand", "ShalySand", "SandyShale", "Shale")
UNCLASSIFIED_NAME = "UNCLASSIFIED"
_NAME_TO_CLASS = {name: LithologyClass(code) for code, name in enumerate(CLASS_NAMES)}


@dataclass
class WellLogRecord:
    """One depth sample: the four predictors plus optional fractions.

    ``v_sand``/``v_shale`` are None when the source data carries no fraction
    columns. ``noise`` holds the synthetic pure-noise predictor when present,
    ``label`` an explicit class when the source had a class column.
    """

    well_id: str
    depth: float
    gr: float
    nphi: float
    rhob: float
    dt: float
    v_sand: float | None = None
    v_shale: float | None = None
    noise: float | None = None
    label: LithologyClass | None = None

    def predictors(self) -> tuple[float, float, float, float]:
        return (self.gr, self.nphi, self.rhob, self.dt)


@dataclass
class NormalizationStats:
    """Per-feature z-score statistics (population stddev convention)."""

    feature_names: tuple[str, ...]
    mean: np.ndarray
    stddev: np.ndarray


@dataclass
class LabeledDataset:
    """Feature matrix with ordinal class labels and per-row provenance."""

    features: np.ndarray  # N x F float64
    feature_names: tuple[str, ...]
    labels: np.ndarray  # N int64, values are LithologyClass codes
    well_ids: np.ndarray  # N str
    depths: np.ndarray  # N float64
    normalized: bool = False
    normalization: NormalizationStats | None = None

    def __post_init__(self) -> None:
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.well_ids = np.asarray(self.well_ids)
        self.depths = np.asarray(self.depths, dtype=np.float64)
        n, f = self.features.shape
        if n < 1 or f < 1:
            raise ValueError("dataset needs at least one row and one feature")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("dataset features must be finite")
        if len(self.feature_names) != f:
            raise ValueError("feature_names length does not match feature count")
        for name, arr in (("labels", self.labels), ("well_ids", self.well_ids), ("depths", self.depths)):
            if len(arr) != n:
                raise ValueError(f"{name} length {len(arr)} does not match {n} rows")

    def __len__(self) -> int:
        return self.features.shape[0]

    def class_counts(self) -> dict[int, int]:
        codes, counts = np.unique(self.labels, return_counts=True)
        return {int(c): int(n) for c, n in zip(codes, counts)}

    def select_features(self, names: list[str] | tuple[str, ...]) -> "LabeledDataset":
        missing = [n for n in names if n not in self.feature_names]
        if missing:
            raise ValueError(f"unknown feature name(s): {', '.join(missing)}")
        cols = [self.feature_names.index(n) for n in names]
        return replace(
            self,
            features=self.features[:, cols].copy(),
            feature_names=tuple(names),
            normalized=self.normalized,
            normalization=None,
        )


@dataclass
class SplitConfig:
    train_fraction: float = 0.70
    seed: int = 42

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


# Class-conditional Gaussian parameters for the synthetic generator, one row
# per class (Sand..Shale) and one column per predictor (GR, NPHI, RHOB, DT).
# Means move monotonically along the shaliness axis so adjacent classes are
# the ones that overlap. The extreme classes sit near the envelope edges
# with wide tails on NPHI, RHOB and DT, so clipping piles up probability
# mass at the bounds and the class-conditional shapes are visibly
# non-Gaussian there; the middle classes stay interior and nearly Gaussian.
DEFAULT_CLASS_MEANS = (
    (36.0, 0.095, 1.70, 61.0),
    (51.0, 0.26, 2.22, 86.0),
    (65.0, 0.40, 2.38, 100.0),
    (79.0, 0.60, 2.80, 132.0),
)
DEFAULT_CLASS_STDDEVS = (
    (13.0, 0.150, 0.320, 18.0),
    (9.0, 0.090, 0.170, 11.0),
    (9.0, 0.090, 0.170, 11.0),
    (13.0, 0.150, 0.320, 18.0),
)

# Sampling ranges for (v_shale, v_sand) per class, chosen with a margin inside
# the Table-rule regions so interpolated fractions relabel to the same class.
_FRACTION_RANGES = {
    LithologyClass.SAND: (0.02, 0.13),
    LithologyClass.SHALY_SAND: (0.18, 0.40),
    LithologyClass.SANDY_SHALE: (0.52, 0.64),
    LithologyClass.SHALE: (0.67, 0.92),
}


@dataclass
class SyntheticConfig:
    """Synthetic well-log generator settings, anchored to the published
    predictor statistics (envelope and pooled GR mean/stddev)."""

    seed: int = 42
    samples_per_class: int = 125  # records per class per well
    class_means: tuple = DEFAULT_CLASS_MEANS
    class_stddevs: tuple = DEFAULT_CLASS_STDDEVS
    depth_start: float = 1000.0
    depth_step: float = 0.15
    wells: int = 4
    noise_feature: bool = False

    def __post_init__(self) -> None:
        if self.samples_per_class < 1:
            raise ValueError("samples_per_class must be at least 1")
        if self.wells < 1:
            raise ValueError("wells must be at least 1")
        if self.depth_step <= 0:
            raise ValueError("depth_step must be positive")
        means = np.asarray(self.class_means, dtype=np.float64)
        stds = np.asarray(self.class_stddevs, dtype=np.float64)
        if means.shape != (4, 4) or stds.shape != (4, 4):
            raise ValueError("class_means and class_stddevs must be 4x4 tables")
        if np.any(stds <= 0):
            raise ValueError("all class stddevs must be positive")


def _parse_cell(raw: str, column: str, line_no: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"line {line_no}: non-numeric value {raw!r} in column {column}") from None


def _parse_optional(raw: str, column: str, line_no: int) -> float | None:
    raw = raw.strip()
    if raw == "":
        return None
    value = _parse_cell(raw, column, line_no)
    if value == MISSING_SENTINEL or not math.isfinite(value):
        return None
    return value


def load_csv(path) -> list[WellLogRecord]:
    """Read well-log records from a CSV file.

    Expected header: well_id,depth,GR,NPHI,RHOB,DT with optional NOISE,
    v_sand, v_shale and class columns. Missing cells may be empty or the
    -999.25 null; predictor nulls are kept as-is for drop_missing to remove.
    Raises ValueError naming the offending line for malformed rows.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        required = ["well_id", "depth", "GR", "NPHI", "RHOB", "DT"]
        if header[: len(required)] != required:
            raise ValueError(
                f"{path}: header must start with {','.join(required)}, got {','.join(header)}"
            )
        extras = header[len(required) :]
        allowed_extras = [NOISE_FEATURE_NAME, "v_sand", "v_shale", "class"]
        filtered = [c for c in allowed_extras if c in extras]
        if extras != filtered:
            unknown = [c for c in extras if c not in allowed_extras]
            raise ValueError(f"{path}: unsupported column(s) {', '.join(unknown)}")
        if ("v_sand" in extras) != ("v_shale" in extras):
            raise ValueError(f"{path}: v_sand and v_shale must appear together")
        col_index = {name: i for i, name in enumerate(header)}

        records: list[WellLogRecord] = []
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and row[0].strip() == ""):
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"line {line_no}: expected {len(header)} columns, found {len(row)}"
                )
            depth = _parse_cell(row[col_index["depth"]], "depth", line_no)
            predictors = {}
            for name in PREDICTOR_NAMES:
                raw = row[col_index[name]].strip()
                predictors[name] = math.nan if raw == "" else _parse_cell(raw, name, line_no)
            noise = None
            if NOISE_FEATURE_NAME in col_index:
                raw = row[col_index[NOISE_FEATURE_NAME]].strip()
                noise = math.nan if raw == "" else _parse_cell(raw, NOISE_FEATURE_NAME, line_no)
            v_sand = v_shale = None
            if "v_sand" in col_index:
                v_sand = _parse_optional(row[col_index["v_sand"]], "v_sand", line_no)
                v_shale = _parse_optional(row[col_index["v_shale"]], "v_shale", line_no)
                for name, val in (("v_sand", v_sand), ("v_shale", v_shale)):
                    if val is not None and not 0.0 <= val <= 1.0:
                        raise ValueError(f"line {line_no}: {name}={val} outside [0, 1]")
            label = None
            if "class" in col_index:
                raw = row[col_index["class"]].strip()
                if raw and raw != UNCLASSIFIED_NAME:
                    if raw not in _NAME_TO_CLASS:
                        raise ValueError(f"line {line_no}: unknown class name {raw!r}")
                    label = _NAME_TO_CLASS[raw]
            records.append(
                WellLogRecord(
                    well_id=row[col_index["well_id"]].strip(),
                    depth=depth,
                    gr=predictors["GR"],
                    nphi=predictors["NPHI"],
                    rhob=predictors["RHOB"],
                    dt=predictors["DT"],
                    v_sand=v_sand,
                    v_shale=v_shale,
                    noise=noise,
                    label=label,
                )
            )
    return records


def _fmt(value: float) -> str:
    return repr(float(value))


def save_csv(path, records: list[WellLogRecord], with_class: bool = False) -> None:
    """Write records in the input CSV format, optionally with a trailing
    class column holding the class name or UNCLASSIFIED."""
    has_noise = any(r.noise is not None for r in records)
    has_fractions = any(r.v_sand is not None for r in records)
    header = list(("well_id", "depth") + PREDICTOR_NAMES)
    if has_noise:
        header.append(NOISE_FEATURE_NAME)
    if has_fractions:
        header += ["v_sand", "v_shale"]
    if with_class:
        header.append("class")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rec in records:
            row = [rec.well_id, _fmt(rec.depth)] + [_fmt(v) for v in rec.predictors()]
            if has_noise:
                row.append("" if rec.noise is None else _fmt(rec.noise))
            if has_fractions:
                row.append("" if rec.v_sand is None else _fmt(rec.v_sand))
                row.append("" if rec.v_shale is None else _fmt(rec.v_shale))
            if with_class:
                row.append(UNCLASSIFIED_NAME if rec.label is None else rec.label.label)
            writer.writerow(row)


def _is_missing(value: float | None) -> bool:
    return value is None or not math.isfinite(value) or value == MISSING_SENTINEL


def drop_missing(records: list[WellLogRecord]) -> tuple[list[WellLogRecord], int]:
    """Remove records with any missing required predictor.

    A predictor is missing when it is non-finite or equals the -999.25 null.
    Returns the surviving records in order plus the removed count.
    """
    kept = []
    for rec in records:
        values = list(rec.predictors())
        if rec.noise is not None:
            values.append(rec.noise)
        if any(_is_missing(v) for v in values):
            continue
        kept.append(rec)
    return kept, len(records) - len(kept)


def resample_uniform(records: list[WellLogRecord], step: float) -> list[WellLogRecord]:
    """Resample one well onto a uniform depth grid by linear interpolation.

    Output depths run from the first input depth in increments of ``step`` up
    to the last input depth. Predictors, the noise column and fractions are
    interpolated between bracketing samples; explicit labels, which cannot be
    interpolated, are taken from the nearest input depth (ties go shallow).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if len(records) < 2:
        raise ValueError("resampling needs at least 2 records")
    depths = np.array([r.depth for r in records], dtype=np.float64)
    if np.any(np.diff(depths) <= 0):
        raise ValueError("record depths must be strictly increasing")
    well_ids = {r.well_id for r in records}
    if len(well_ids) != 1:
        raise ValueError("resample_uniform expects records from a single well")
    well_id = records[0].well_id

    span = depths[-1] - depths[0]
    count = int(math.floor(span / step + 1e-9)) + 1
    grid = depths[0] + np.arange(count, dtype=np.float64) * step

    def interp(values: list[float | None]) -> list[float | None]:
        if any(v is None for v in values):
            return [None] * count
        arr = np.array(values, dtype=np.float64)
        return list(np.interp(grid, depths, arr))

    columns = {
        "gr": interp([r.gr for r in records]),
        "nphi": interp([r.nphi for r in records]),
        "rhob": interp([r.rhob for r in records]),
        "dt": interp([r.dt for r in records]),
        "noise": interp([r.noise for r in records]),
        "v_sand": interp([r.v_sand for r in records]),
        "v_shale": interp([r.v_shale for r in records]),
    }
    nearest = np.searchsorted(depths, grid, side="left")
    out = []
    for i, depth in enumerate(grid):
        j = nearest[i]
        if j >= len(depths) or (j > 0 and depth - depths[j - 1] <= depths[j] - depth):
            j -= 1
        out.append(
            WellLogRecord(
                well_id=well_id,
                depth=float(depth),
                gr=columns["gr"][i],
                nphi=columns["nphi"][i],
                rhob=columns["rhob"][i],
                dt=columns["dt"][i],
                v_sand=columns["v_sand"][i],
                v_shale=columns["v_shale"][i],
                noise=columns["noise"][i],
                label=records[j].label,
            )
        )
    return out


def label_lithology(v_sand: float, v_shale: float) -> LithologyClass | None:
    """Classify a (v_sand, v_shale) pair by the expert rule table.

    Returns None (unclassified) for pairs satisfying none of the four rules,
    e.g. mid-range v_shale with v_sand <= v_shale or exact fraction ties.
    """
    for name, value in (("v_sand", v_sand), ("v_shale", v_shale)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name}={value} outside [0, 1]")
    matches = [cls for cls, rule in _CLASS_RULES if rule(v_sand, v_shale)]
    if not matches:
        return None
    if len(matches) > 1:  # the v_shale bands are disjoint, so this is unreachable
        raise AssertionError(f"rules overlap for v_sand={v_sand}, v_shale={v_shale}")
    return matches[0]


# One independent predicate per rule row; disjointness is a tested property,
# not an artifact of if/elif ordering.
_CLASS_RULES = (
    (LithologyClass.SAND, lambda vsa, vsh: vsh <= 0.15),
    (LithologyClass.SHALY_SAND, lambda vsa, vsh: 0.15 < vsh <= 0.5 and vsa > vsh),
    (LithologyClass.SANDY_SHALE, lambda vsa, vsh: 0.5 < vsh <= 0.65 and vsa < vsh),
    (LithologyClass.SHALE, lambda vsa, vsh: vsh > 0.65 and vsa < vsh),
)


@dataclass
class DatasetBuildResult:
    dataset: LabeledDataset
    unclassified: int
    label_disagreements: int


def build_labeled_dataset(records: list[WellLogRecord]) -> DatasetBuildResult:
    """Assemble a LabeledDataset from cleaned records.

    Labels are recomputed from fractions whenever fractions are present (the
    fractions are the ground-truth source); an explicit class column is used
    only for records without fractions. Unclassified rows are excluded and
    counted, as are disagreements between recomputed and explicit labels.
    """
    if not records:
        raise ValueError("no records to build a dataset from")
    has_noise = any(r.noise is not None for r in records)
    names = PREDICTOR_NAMES + ((NOISE_FEATURE_NAME,) if has_noise else ())

    rows, labels, wells, depths = [], [], [], []
    unclassified = 0
    disagreements = 0
    for rec in records:
        if rec.v_sand is not None and rec.v_shale is not None:
            label = label_lithology(rec.v_sand, rec.v_shale)
            if rec.label is not None and label is not None and label != rec.label:
                disagreements += 1
        elif rec.label is not None:
            label = rec.label
        else:
            raise ValueError(
                f"record at depth {rec.depth} in well {rec.well_id} has neither "
                "fractions nor an explicit class"
            )
        if label is None:
            unclassified += 1
            continue
        row = list(rec.predictors())
        if has_noise:
            if rec.noise is None:
                raise ValueError("noise column present but missing for some records")
            row.append(rec.noise)
        rows.append(row)
        labels.append(int(label))
        wells.append(rec.well_id)
        depths.append(rec.depth)
    if not rows:
        raise ValueError("all records were unclassified")
    dataset = LabeledDataset(
        features=np.array(rows, dtype=np.float64),
        feature_names=names,
        labels=np.array(labels, dtype=np.int64),
        well_ids=np.array(wells),
        depths=np.array(depths, dtype=np.float64),
    )
    return DatasetBuildResult(dataset, unclassified, disagreements)


def _take_rows(dataset: LabeledDataset, idx: np.ndarray) -> LabeledDataset:
    return LabeledDataset(
        features=dataset.features[idx],
        feature_names=dataset.feature_names,
        labels=dataset.labels[idx],
        well_ids=dataset.well_ids[idx],
        depths=dataset.depths[idx],
        normalized=dataset.normalized,
        normalization=dataset.normalization,
    )


def split_train_test(
    dataset: LabeledDataset, config: SplitConfig
) -> tuple[LabeledDataset, LabeledDataset]:
    """Per-well 70/30-style split with deterministic scrambling.

    For each well, floor(train_fraction * n_well) rows go to train and the
    rest to test; the combined outputs are row-permuted by the seed so depth
    trends are removed. The two outputs partition the input rows exactly.
    """
    if len(dataset) == 0:
        raise ValueError("cannot split an empty dataset")
    rng = np.random.default_rng(config.seed)
    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for well in sorted(set(dataset.well_ids.tolist())):
        rows = np.flatnonzero(dataset.well_ids == well)
        perm = rows[rng.permutation(len(rows))]
        n_train = int(math.floor(config.train_fraction * len(rows)))
        train_idx.append(perm[:n_train])
        test_idx.append(perm[n_train:])
    train_all = np.concatenate(train_idx)
    test_all = np.concatenate(test_idx)
    train_all = train_all[rng.permutation(len(train_all))]
    test_all = test_all[rng.permutation(len(test_all))]
    return _take_rows(dataset, train_all), _take_rows(dataset, test_all)


def generate_synthetic(config: SyntheticConfig) -> list[WellLogRecord]:
    """Generate benchmark well logs from per-class Gaussian predictors.

    Per well, each class contributes samples_per_class records drawn from
    independent per-predictor Gaussians with the configured mean/stddev and
    clipped to the published min/max envelope. Fractions are drawn inside the
    generating class's rule region, so relabeling reproduces the class.
    Depths are uniform at depth_step. Deterministic under the seed.
    """
    rng = np.random.default_rng(config.seed)
    means = np.asarray(config.class_means, dtype=np.float64)
    stds = np.asarray(config.class_stddevs, dtype=np.float64)
    lows = np.array([PREDICTOR_ENVELOPE[n][0] for n in PREDICTOR_NAMES])
    highs = np.array([PREDICTOR_ENVELOPE[n][1] for n in PREDICTOR_NAMES])

    records: list[WellLogRecord] = []
    n = config.samples_per_class
    for w in range(config.wells):
        well_id = f"W{w + 1}"
        row_in_well = 0
        for cls in LithologyClass:
            X = rng.normal(means[cls.value], stds[cls.value], size=(n, 4))
            X = np.clip(X, lows, highs)
            sh_lo, sh_hi = _FRACTION_RANGES[cls]
            v_shale = rng.uniform(sh_lo, sh_hi, size=n)
            if cls is LithologyClass.SAND:
                v_sand = rng.uniform(0.70, 0.85, size=n)
            elif cls is LithologyClass.SHALY_SAND:
                v_sand = v_shale + rng.uniform(0.05, 0.18, size=n)
            elif cls is LithologyClass.SANDY_SHALE:
                v_sand = v_shale - rng.uniform(0.05, 0.30, size=n)
            else:
                v_sand = (1.0 - v_shale) * rng.uniform(0.20, 0.80, size=n)
            noise = rng.standard_normal(n) if config.noise_feature else None
            for i in range(n):
                records.append(
                    WellLogRecord(
                        well_id=well_id,
                        depth=config.depth_start + row_in_well * config.depth_step,
                        gr=float(X[i, 0]),
                        nphi=float(X[i, 1]),
                        rhob=float(X[i, 2]),
                        dt=float(X[i, 3]),
                        v_sand=float(v_sand[i]),
                        v_shale=float(v_shale[i]),
                        noise=float(noise[i]) if noise is not None else None,
                    )
                )
                row_in_well += 1
    return records
