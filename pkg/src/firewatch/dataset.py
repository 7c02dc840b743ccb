"""Labeled fire-outbreak datasets.

Covers CSV persistence in the ``Temp,Smoke,Flame,Label`` schema, the
train/test/validation split, synthetic data generation, and the
exploratory computations (lag pairs, Pearson correlation, Andrews curves)
emitted as plot-ready numbers. Rendering is someone else's job.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ._numfmt import format_float
from .errors import ConfigError, InvalidInputError, SchemaError

FEATURE_NAMES = ("Temp", "Smoke", "Flame")
CSV_HEADER = "Temp,Smoke,Flame,Label"

# Observed envelope of the bundled sample capture, used as generator defaults.
DEFAULT_RANGES = ((15.0, 50.0), (27.0, 95.0), (208.0, 921.0))


class LabeledSample(NamedTuple):
    features: tuple[float, float, float]
    label: int


@dataclass(frozen=True)
class Dataset:
    """Immutable ordered collection of labeled readings."""

    rows: tuple[LabeledSample, ...]
    feature_names: tuple[str, str, str] = FEATURE_NAMES

    def __post_init__(self):
        for k, row in enumerate(self.rows):
            if len(row.features) != len(self.feature_names):
                raise InvalidInputError(
                    f"row {k} has {len(row.features)} features, expected {len(self.feature_names)}"
                )
            if any(not math.isfinite(v) for v in row.features):
                raise InvalidInputError(f"row {k} contains a non-finite feature")
            if row.label not in (0, 1):
                raise InvalidInputError(f"row {k} label {row.label!r} is not 0 or 1")

    def __len__(self) -> int:
        return len(self.rows)

    def feature_array(self) -> np.ndarray:
        return np.array([row.features for row in self.rows], dtype=float).reshape(
            len(self.rows), len(self.feature_names)
        )

    def labels(self) -> list[int]:
        return [row.label for row in self.rows]

    def column(self, name: str) -> list[float]:
        """Values of one named column; ``Label`` yields the 0/1 labels."""
        if name == "Label":
            return [float(row.label) for row in self.rows]
        if name not in self.feature_names:
            raise InvalidInputError(f"unknown column {name!r}")
        j = self.feature_names.index(name)
        return [row.features[j] for row in self.rows]

    def training_pairs(self) -> list[tuple[tuple[float, float, float], int]]:
        return [(row.features, row.label) for row in self.rows]


def dataset_from_rows(rows: Iterable[tuple[Sequence[float], int]]) -> Dataset:
    """Build a Dataset from (features, label) pairs."""
    return Dataset(
        rows=tuple(LabeledSample(tuple(float(v) for v in f), int(label)) for f, label in rows)
    )


# ---------------------------------------------------------------------------
# CSV persistence

def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write ``Temp,Smoke,Flame,Label`` CSV (UTF-8, LF, round-trip reals)."""
    lines = [CSV_HEADER]
    for row in dataset.rows:
        cells = [format_float(v) for v in row.features] + [str(row.label)]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_dataset(path: str | Path) -> Dataset:
    """Read a dataset CSV, naming the row and column of any schema violation."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"dataset file {path} does not exist")
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise SchemaError(f"{path}: empty file, expected header '{CSV_HEADER}'")
    header = lines[0].strip()
    if header != CSV_HEADER:
        raise SchemaError(f"{path}: header is {header!r}, expected '{CSV_HEADER}'")

    columns = CSV_HEADER.split(",")
    rows = []
    for i, line in enumerate(lines[1:], start=1):
        cells = line.split(",")
        if len(cells) != len(columns):
            raise SchemaError(f"{path}: row {i} has {len(cells)} cells, expected {len(columns)}")
        values = []
        for name, cell in zip(columns[:-1], cells[:-1]):
            try:
                value = float(cell.strip())
            except ValueError:
                raise SchemaError(
                    f"{path}: row {i}, column {name!r}: {cell.strip()!r} is not a number"
                ) from None
            if not math.isfinite(value):
                raise SchemaError(f"{path}: row {i}, column {name!r}: value is not finite")
            values.append(value)
        label_cell = cells[-1].strip()
        if label_cell not in ("0", "1"):
            raise SchemaError(
                f"{path}: row {i}, column 'Label': {label_cell!r} is not 0 or 1"
            )
        rows.append(LabeledSample(tuple(values), int(label_cell)))
    return Dataset(rows=tuple(rows))


def sample_dataset_path() -> Path:
    """Path of the bundled 58-row sample capture."""
    return Path(__file__).with_name("sample_capture.csv")


def load_sample_dataset() -> Dataset:
    return load_dataset(sample_dataset_path())


# ---------------------------------------------------------------------------
# Splitting

@dataclass(frozen=True)
class SplitSpec:
    """Fractions for the train/test/validation partition."""

    train_fraction: float = 0.6
    test_fraction: float = 0.2
    validation_fraction: float = 0.2
    rng_seed: int = 0
    stratified: bool = False

    def __post_init__(self):
        fractions = (self.train_fraction, self.test_fraction, self.validation_fraction)
        for f in fractions:
            if not (0.0 < f < 1.0):
                raise ConfigError(f"split fraction {f!r} is not in (0, 1)")
        if abs(sum(fractions) - 1.0) > 1e-9:
            raise ConfigError(f"split fractions sum to {sum(fractions)!r}, expected 1")


def _floor(x: float) -> int:
    # tolerate float dust just below an integer (fractions are read from flags)
    return int(math.floor(x + 1e-9))


def _apportion(count: int, fractions: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment; each part gets floor or ceil of its quota."""
    quotas = [f * count for f in fractions]
    base = [int(math.floor(q)) for q in quotas]
    leftover = count - sum(base)
    remainders = sorted(
        range(len(fractions)), key=lambda k: (-(quotas[k] - base[k]), k)
    )
    for k in remainders[:leftover]:
        base[k] += 1
    return base


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    """Partition rows into (train, test, validation).

    Default mode shuffles once and slices: test and validation get
    ``floor(fraction * n)`` rows each and train keeps the remainder.
    Stratified mode apportions each class separately (largest remainder),
    keeping every part's class count within one sample of proportional.
    """
    n = len(dataset)
    if n == 0:
        raise InvalidInputError("cannot split an empty dataset")
    rng = np.random.default_rng(spec.rng_seed)

    if not spec.stratified:
        order = rng.permutation(n)
        n_test = _floor(spec.test_fraction * n)
        n_val = _floor(spec.validation_fraction * n)
        n_train = n - n_test - n_val
        train_idx = order[:n_train]
        test_idx = order[n_train : n_train + n_test]
        val_idx = order[n_train + n_test :]
    else:
        parts: tuple[list[int], list[int], list[int]] = ([], [], [])
        fractions = (spec.train_fraction, spec.test_fraction, spec.validation_fraction)
        for label in (0, 1):
            members = [k for k, row in enumerate(dataset.rows) if row.label == label]
            if not members:
                continue
            shuffled = [members[j] for j in rng.permutation(len(members))]
            sizes = _apportion(len(members), fractions)
            start = 0
            for part, size in zip(parts, sizes):
                part.extend(shuffled[start : start + size])
                start += size
        train_idx, test_idx, val_idx = parts

    def take(indices) -> Dataset:
        return Dataset(rows=tuple(dataset.rows[int(k)] for k in indices))

    return take(train_idx), take(test_idx), take(val_idx)


# ---------------------------------------------------------------------------
# Synthetic generation

@dataclass(frozen=True)
class LabelRule:
    """Linear threshold rule: label 1 iff ``weights . features > threshold``."""

    weights: tuple[float, float, float]
    threshold: float

    def fires(self, features: Sequence[float]) -> bool:
        return sum(w * v for w, v in zip(self.weights, features)) > self.threshold


def default_label_rule(
    ranges: Sequence[tuple[float, float]] = DEFAULT_RANGES,
) -> LabelRule:
    """Rule calibrated so roughly a sixth of uniform draws come out positive.

    Each feature is weighted to span one unit across its range, and the
    threshold asks the normalized sum (0..3) to exceed 2 — i.e. the three
    sensors jointly run hot.
    """
    weights = tuple(1.0 / (hi - lo) for lo, hi in ranges)
    threshold = sum(lo / (hi - lo) for lo, hi in ranges) + 2.0
    return LabelRule(weights=weights, threshold=threshold)


DEFAULT_LABEL_RULE = default_label_rule()


@dataclass(frozen=True)
class GeneratorParams:
    """Synthetic dataset shape: uniform features plus a linear label rule."""

    n: int
    ranges: tuple[tuple[float, float], ...] = DEFAULT_RANGES
    rule: LabelRule = DEFAULT_LABEL_RULE
    rng_seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"generator n must be >= 1, got {self.n}")
        if len(self.ranges) != len(FEATURE_NAMES):
            raise ConfigError(f"expected {len(FEATURE_NAMES)} feature ranges")
        for name, (lo, hi) in zip(FEATURE_NAMES, self.ranges):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ConfigError(f"{name} range ({lo}, {hi}) is not finite")
            if lo > hi:
                raise ConfigError(f"{name} range ({lo}, {hi}) has min > max")


def generate_synthetic(params: GeneratorParams) -> Dataset:
    """Draw ``n`` uniform rows from the configured ranges and label by rule.

    Fully deterministic for a given ``rng_seed``. A collapsed range
    (min == max) pins that feature to the single value.
    """
    rng = np.random.default_rng(params.rng_seed)
    lows = np.array([lo for lo, _ in params.ranges])
    widths = np.array([hi - lo for lo, hi in params.ranges])
    features = lows + rng.random((params.n, len(params.ranges))) * widths
    rows = []
    for row in features:
        values = tuple(float(v) for v in row)
        rows.append(LabeledSample(values, int(params.rule.fires(values))))
    return Dataset(rows=tuple(rows))


# ---------------------------------------------------------------------------
# Exploratory computations

def lag_plot_data(series: Sequence[float], lag: int) -> list[tuple[float, float]]:
    """Pairs (x_t, x_{t+lag}) for eyeballing serial structure."""
    if lag < 1:
        raise InvalidInputError(f"lag must be a positive integer, got {lag}")
    if lag >= len(series):
        raise InvalidInputError(
            f"lag {lag} needs a series longer than {lag}, got {len(series)} values"
        )
    values = [float(v) for v in series]
    return [(values[t], values[t + lag]) for t in range(len(values) - lag)]


def correlation_matrix(dataset: Dataset) -> np.ndarray:
    """Pearson correlation over Temp, Smoke, Flame and the 0/1 label.

    Returns a symmetric 4x4 array with unit diagonal. Any pairing that
    involves a zero-variance column is reported as NaN (undefined) rather
    than a made-up number.
    """
    if len(dataset) < 2:
        raise InvalidInputError("correlation needs at least 2 rows")
    columns = np.column_stack(
        [dataset.feature_array(), np.array(dataset.labels(), dtype=float)]
    )
    n, m = columns.shape
    means = columns.mean(axis=0)
    devs = columns - means
    scale = np.sqrt((devs**2).sum(axis=0))
    out = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            if scale[i] == 0.0 or scale[j] == 0.0:
                r = math.nan
            else:
                r = float((devs[:, i] * devs[:, j]).sum() / (scale[i] * scale[j]))
            out[i, j] = r
            out[j, i] = r
    return out


@dataclass(frozen=True)
class AndrewsCurve:
    """One observation mapped onto x1/sqrt(2) + x2 sin t + x3 cos t."""

    row: int
    label: int
    t: tuple[float, ...]
    values: tuple[float, ...]


def andrews_curves(dataset: Dataset, resolution: int) -> list[AndrewsCurve]:
    """Sample every row's curve at ``resolution`` even t values in [-pi, pi]."""
    if len(dataset) == 0:
        raise InvalidInputError("cannot compute curves for an empty dataset")
    if resolution < 2:
        raise InvalidInputError(f"resolution must be >= 2, got {resolution}")
    t = np.linspace(-math.pi, math.pi, resolution)
    sin_t, cos_t = np.sin(t), np.cos(t)
    curves = []
    for k, row in enumerate(dataset.rows):
        x1, x2, x3 = row.features
        values = x1 / math.sqrt(2.0) + x2 * sin_t + x3 * cos_t
        curves.append(
            AndrewsCurve(
                row=k,
                label=row.label,
                t=tuple(float(v) for v in t),
                values=tuple(float(v) for v in values),
            )
        )
    return curves


# ---------------------------------------------------------------------------
# Plot-data emission

def write_lag_csv(pairs: Sequence[tuple[float, float]], path: str | Path) -> None:
    """Two-column CSV of lag pairs."""
    lines = ["x_t,x_t_plus_lag"]
    lines += [f"{format_float(a)},{format_float(b)}" for a, b in pairs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_correlation_json(matrix: np.ndarray, path: str | Path) -> None:
    """Labeled 4x4 correlation as JSON; undefined entries become null."""
    payload = {
        "columns": list(FEATURE_NAMES) + ["Label"],
        "matrix": [
            [None if math.isnan(v) else v for v in row] for row in matrix.tolist()
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def write_andrews_csv(curves: Sequence[AndrewsCurve], path: str | Path) -> None:
    """Long-format CSV: one (row, label, t, f) line per sampled point."""
    lines = ["row,label,t,f"]
    for curve in curves:
        for t, v in zip(curve.t, curve.values):
            lines.append(f"{curve.row},{curve.label},{format_float(t)},{format_float(v)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
