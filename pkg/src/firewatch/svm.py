"""RBF-kernel support vector machine with a sequential-minimal-optimization trainer.

Training solves the soft-margin dual

    max over a:   sum_i a_i  -  1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
    subject to    0 <= a_i <= C   and   sum_i a_i y_i = 0

with the public {0, 1} class labels remapped internally to y in {-1, +1}
(the equality constraint is degenerate under {0, 1}). Features are z-scored
before any kernel evaluation — flame counts in the hundreds would otherwise
drown temperature in the squared distance — and the scaling is stored in the
model so prediction accepts raw sensor units.

The optimizer walks pairs of dual variables: every sweep examines each index
(in seeded random order), and for a KKT violator i the partner j is the index
maximizing |E_i - E_j| (ties to the lowest index). The pair subproblem is
solved in closed form, clipped to the box, and the running bias threshold is
updated from the step. A model counts as converged only when box, equality
and margin conditions all hold within ``kkt_tolerance`` using the final bias,
which is the average of the per-vector estimates over unbounded support
vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from ._numfmt import format_float
from .errors import InvalidInputError, SchemaError, TrainingError

# One unit of kernel width per feature dimension of the three-sensor rig.
DEFAULT_GAMMA = 1.0 / 3.0

# A pair step smaller than this is numerical noise, not progress.
_MIN_STEP = 1e-12

FeatureVector = Sequence[float]
TrainingSet = Sequence[tuple[FeatureVector, int]]


@dataclass(frozen=True)
class KernelConfig:
    """RBF width: K(a, b) = exp(-gamma * ||a - b||^2), gamma > 0."""

    gamma: float

    def __post_init__(self):
        if not math.isfinite(self.gamma) or self.gamma <= 0:
            raise InvalidInputError(f"gamma must be a positive real, got {self.gamma!r}")


@dataclass(frozen=True)
class TrainConfig:
    """Solver knobs: box bound, stopping tolerance, sweep budget, shuffle seed."""

    c: float = 1.0
    kkt_tolerance: float = 1e-3
    max_passes: int = 200
    rng_seed: int = 0

    def __post_init__(self):
        if not math.isfinite(self.c) or self.c <= 0:
            raise InvalidInputError(f"c must be a positive real, got {self.c!r}")
        if not math.isfinite(self.kkt_tolerance) or self.kkt_tolerance <= 0:
            raise InvalidInputError(
                f"kkt_tolerance must be a positive real, got {self.kkt_tolerance!r}"
            )
        if self.max_passes < 1:
            raise InvalidInputError(f"max_passes must be >= 1, got {self.max_passes!r}")


@dataclass(frozen=True)
class FeatureScaler:
    """Per-feature z-scoring fitted on a training split.

    Constant features keep a unit divisor so they pass through unscaled.
    """

    means: tuple[float, ...]
    stds: tuple[float, ...]

    @classmethod
    def fit(cls, features: np.ndarray) -> "FeatureScaler":
        means = features.mean(axis=0)
        stds = features.std(axis=0)
        stds = np.where(stds == 0.0, 1.0, stds)
        return cls(
            means=tuple(float(m) for m in means),
            stds=tuple(float(s) for s in stds),
        )

    def apply(self, features: Sequence[float]) -> tuple[float, ...]:
        if len(features) != len(self.means):
            raise InvalidInputError(
                f"expected {len(self.means)} features, got {len(features)}"
            )
        return tuple(
            (float(v) - m) / s for v, m, s in zip(features, self.means, self.stds)
        )

    def apply_array(self, features: np.ndarray) -> np.ndarray:
        return (features - np.array(self.means)) / np.array(self.stds)


@dataclass(frozen=True)
class SvmModel:
    """Trained classifier: support vectors (raw units), dual weights, bias.

    ``signed_labels`` holds the internal {-1, +1} remapping of each support
    vector's class; ``converged`` is False for best-effort models returned
    when the sweep budget ran out or the instance was degenerate.
    """

    support_vectors: tuple[tuple[float, ...], ...]
    alphas: tuple[float, ...]
    signed_labels: tuple[float, ...]
    bias: float
    kernel: KernelConfig
    scaler: FeatureScaler
    c: float
    converged: bool = True

    def __post_init__(self):
        k = len(self.support_vectors)
        if len(self.alphas) != k or len(self.signed_labels) != k:
            raise InvalidInputError("support vectors, alphas and labels differ in length")
        if not math.isfinite(self.c) or self.c <= 0:
            raise InvalidInputError(f"box bound C must be a positive real, got {self.c!r}")
        if self.converged and k == 0:
            raise InvalidInputError("a converged model must keep at least one support vector")
        for a in self.alphas:
            if not (0.0 < a <= self.c):
                raise InvalidInputError(f"dual weight {a!r} outside (0, C={self.c}]")
        for s in self.signed_labels:
            if s not in (-1.0, 1.0):
                raise InvalidInputError(f"signed label {s!r} is not -1 or +1")

    @property
    def dimension(self) -> int:
        return len(self.scaler.means)


# ---------------------------------------------------------------------------
# Kernel

def rbf_kernel(a: FeatureVector, b: FeatureVector, cfg: KernelConfig) -> float:
    """exp(-gamma * ||a - b||^2); 1.0 exactly when a == b.

    The value underflows to 0.0 once gamma * ||a - b||^2 exceeds ~745,
    the double-precision limit of exp.
    """
    if len(a) != len(b):
        raise InvalidInputError(f"dimension mismatch: {len(a)} vs {len(b)}")
    d2 = 0.0
    for u, v in zip(a, b):
        diff = float(u) - float(v)
        d2 += diff * diff
    return math.exp(-cfg.gamma * d2)


def kernel_matrix(xs: Sequence[FeatureVector], cfg: KernelConfig) -> np.ndarray:
    """Symmetric Gram matrix M[i][j] = rbf_kernel(xs[i], xs[j], cfg)."""
    if len(xs) == 0:
        raise InvalidInputError("kernel matrix needs at least one vector")
    dim = len(xs[0])
    for k, x in enumerate(xs):
        if len(x) != dim:
            raise InvalidInputError(f"vector {k} has dimension {len(x)}, expected {dim}")
    n = len(xs)
    out = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            value = rbf_kernel(xs[i], xs[j], cfg)
            out[i, j] = value
            out[j, i] = value
    return out


# ---------------------------------------------------------------------------
# Training

def _as_arrays(data: TrainingSet) -> tuple[np.ndarray, np.ndarray]:
    if len(data) == 0:
        raise InvalidInputError("training set is empty")
    dim = len(data[0][0])
    if dim < 1:
        raise InvalidInputError("feature vectors must have at least one entry")
    features = []
    labels = []
    for k, (x, y) in enumerate(data):
        if len(x) != dim:
            raise InvalidInputError(f"sample {k} has dimension {len(x)}, expected {dim}")
        row = [float(v) for v in x]
        if any(not math.isfinite(v) for v in row):
            raise InvalidInputError(f"sample {k} contains a non-finite feature")
        if y not in (0, 1):
            raise InvalidInputError(f"sample {k} label {y!r} is not 0 or 1")
        features.append(row)
        labels.append(int(y))
    return np.array(features), np.array(labels)


def _take_step(i, j, alpha, yhat, K, c, b, errors):
    """Joint closed-form update of the (i, j) pair; returns the new bias or None."""
    if i == j:
        return None
    a_i, a_j = alpha[i], alpha[j]
    y_i, y_j = yhat[i], yhat[j]
    e_i, e_j = errors[i], errors[j]

    if y_i != y_j:
        low = max(0.0, a_j - a_i)
        high = min(c, c + a_j - a_i)
    else:
        low = max(0.0, a_i + a_j - c)
        high = min(c, a_i + a_j)
    if low >= high:
        return None

    eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
    if eta <= 0.0:
        return None
    a_j_new = a_j + y_j * (e_i - e_j) / eta
    a_j_new = min(max(a_j_new, low), high)
    # snap arithmetic dust onto the exact bound; a stray 1e-15 alpha would
    # otherwise flag a phantom complementary-slackness violation forever
    snap = 1e-10 * c
    if a_j_new < snap:
        a_j_new = 0.0
    elif a_j_new > c - snap:
        a_j_new = c
    if abs(a_j_new - a_j) < _MIN_STEP:
        return None
    a_i_new = a_i + y_i * y_j * (a_j - a_j_new)
    if a_i_new < snap:
        a_i_new = 0.0
    elif a_i_new > c - snap:
        a_i_new = c

    d_i = a_i_new - a_i
    d_j = a_j_new - a_j
    b1 = b - e_i - y_i * d_i * K[i, i] - y_j * d_j * K[i, j]
    b2 = b - e_j - y_i * d_i * K[i, j] - y_j * d_j * K[j, j]
    if 0.0 < a_i_new < c:
        b_new = b1
    elif 0.0 < a_j_new < c:
        b_new = b2
    else:
        b_new = 0.5 * (b1 + b2)

    alpha[i] = a_i_new
    alpha[j] = a_j_new
    errors += y_i * d_i * K[i] + y_j * d_j * K[j] + (b_new - b)
    return b_new


def _finalize_bias(alpha, yhat, K, c, running_b):
    """Bias for the final model: mean estimate over unbounded support vectors,
    else the midpoint of the KKT-feasible interval from the bounded points."""
    g = (alpha * yhat) @ K
    targets = yhat - g
    free = (alpha > 0.0) & (alpha < c)
    if free.any():
        return float(targets[free].mean())
    lower = targets[((alpha <= 0.0) & (yhat > 0)) | ((alpha >= c) & (yhat < 0))]
    upper = targets[((alpha <= 0.0) & (yhat < 0)) | ((alpha >= c) & (yhat > 0))]
    if lower.size and upper.size:
        return float((lower.max() + upper.min()) / 2.0)
    if lower.size:
        return float(lower.max())
    if upper.size:
        return float(upper.min())
    return float(running_b)


def _kkt_satisfied(alpha, yhat, K, c, bias, tol):
    """Full optimality check: box, equality, and margin conditions."""
    if not np.all((alpha >= 0.0) & (alpha <= c)):
        return False
    if abs(float(alpha @ yhat)) > tol:
        return False
    margins = yhat * ((alpha * yhat) @ K + bias)
    free = (alpha > 0.0) & (alpha < c)
    if np.any(np.abs(margins[free] - 1.0) > tol):
        return False
    if np.any(margins[alpha <= 0.0] < 1.0 - tol):
        return False
    if np.any(margins[alpha >= c] > 1.0 + tol):
        return False
    return True


def train(data: TrainingSet, kernel: KernelConfig, cfg: TrainConfig) -> SvmModel:
    """Fit the dual problem on (features, {0,1}-label) pairs.

    Returns a model whose dual variables are box- and equality-feasible;
    ``converged`` reflects whether the KKT conditions were met within
    ``cfg.kkt_tolerance`` before the sweep budget ran out. Degenerate
    inputs (e.g. coincident points from both classes) come back flagged,
    never as an exception.

    Raises:
        TrainingError: only one class is present.
        InvalidInputError: empty input, ragged dimensions, non-finite
            features, or labels outside {0, 1}.
    """
    features_raw, labels = _as_arrays(data)
    if len(set(labels.tolist())) < 2:
        raise TrainingError("training needs both classes present (labels 0 and 1)")

    scaler = FeatureScaler.fit(features_raw)
    features = scaler.apply_array(features_raw)
    yhat = np.where(labels == 1, 1.0, -1.0)
    K = kernel_matrix([tuple(row) for row in features], kernel)

    n = len(yhat)
    c = float(cfg.c)
    tol = float(cfg.kkt_tolerance)
    select_tol = 0.5 * tol
    rng = np.random.default_rng(cfg.rng_seed)

    alpha = np.zeros(n)
    b = 0.0
    bias = 0.0
    converged = False
    sweeps = 0
    while sweeps < cfg.max_passes:
        sweeps += 1
        errors = (alpha * yhat) @ K + b - yhat
        changed = 0
        for i in rng.permutation(n):
            r = errors[i] * yhat[i]
            if not ((r < -select_tol and alpha[i] < c) or (r > select_tol and alpha[i] > 0.0)):
                continue
            # partner preference: maximal |E_i - E_j|, ties to the lowest
            # index; if that pair cannot move (bound-stuck box), fall back
            # through the remaining candidates in the same order
            deltas = np.abs(errors - errors[i])
            deltas[i] = -math.inf
            for j in np.argsort(-deltas, kind="stable"):
                b_new = _take_step(i, int(j), alpha, yhat, K, c, b, errors)
                if b_new is not None:
                    b = b_new
                    changed += 1
                    break
        bias = _finalize_bias(alpha, yhat, K, c, b)
        if _kkt_satisfied(alpha, yhat, K, c, bias, tol):
            converged = True
            break
        if changed == 0:
            break  # stalled: the pair rule cannot move any violator

    keep = alpha > 0.0
    return SvmModel(
        support_vectors=tuple(
            tuple(float(v) for v in row) for row in features_raw[keep]
        ),
        alphas=tuple(float(a) for a in alpha[keep]),
        signed_labels=tuple(float(s) for s in yhat[keep]),
        bias=float(bias),
        kernel=kernel,
        scaler=scaler,
        c=c,
        converged=converged,
    )


def dual_objective(alphas: Sequence[float], data: TrainingSet, kernel: KernelConfig) -> float:
    """Value of the dual objective at ``alphas`` for the given samples.

    Pure function; the features are used exactly as passed (no scaling).
    """
    features, labels = _as_arrays(data)
    if len(alphas) != len(labels):
        raise InvalidInputError(
            f"{len(alphas)} dual weights for {len(labels)} samples"
        )
    a = np.array([float(v) for v in alphas])
    yhat = np.where(labels == 1, 1.0, -1.0)
    K = kernel_matrix([tuple(row) for row in features], kernel)
    coeff = a * yhat
    return float(a.sum() - 0.5 * coeff @ K @ coeff)


# ---------------------------------------------------------------------------
# Prediction

@lru_cache(maxsize=16)
def _scaled_support(model: SvmModel) -> tuple[tuple[float, ...], ...]:
    return tuple(model.scaler.apply(sv) for sv in model.support_vectors)


def decision_value(model: SvmModel, x: FeatureVector) -> float:
    """sum_i alpha_i y_i K(sv_i, x) + b, evaluated in scaled coordinates."""
    z = model.scaler.apply(x)
    if any(not math.isfinite(v) for v in z):
        raise InvalidInputError("input point contains a non-finite feature")
    total = model.bias
    for a, s, sv in zip(model.alphas, model.signed_labels, _scaled_support(model)):
        total += a * s * rbf_kernel(sv, z, model.kernel)
    return float(total)


def predict(model: SvmModel, x: FeatureVector) -> int:
    """1 (fire outbreak) iff the decision value is >= 0, else 0.

    The tie at exactly zero goes to the positive class: a false alarm is
    cheaper than a missed outbreak.
    """
    return 1 if decision_value(model, x) >= 0.0 else 0


def decision_values(model: SvmModel, xs: Sequence[FeatureVector]) -> list[float]:
    return [decision_value(model, x) for x in xs]


def predict_many(model: SvmModel, xs: Sequence[FeatureVector]) -> list[int]:
    return [predict(model, x) for x in xs]


# ---------------------------------------------------------------------------
# Persistence

_MODEL_MAGIC = "firewatch-svm"
_MODEL_VERSION = "v1"


def save_model(model: SvmModel, path: str | Path) -> None:
    """Write the flat text model format.

    Header line:
        firewatch-svm v1 d=<dim> gamma=<g> C=<c> b=<bias> n_sv=<k> scale=<m1,s1;...>
    then one ``<alpha> <signed_label> <f1> ... <fd>`` line per support
    vector, features in raw sensor units, all reals in round-trip precision.
    """
    scale = ";".join(
        f"{format_float(m)},{format_float(s)}"
        for m, s in zip(model.scaler.means, model.scaler.stds)
    )
    header = (
        f"{_MODEL_MAGIC} {_MODEL_VERSION} d={model.dimension}"
        f" gamma={format_float(model.kernel.gamma)} C={format_float(model.c)}"
        f" b={format_float(model.bias)} n_sv={len(model.alphas)} scale={scale}"
    )
    lines = [header]
    for a, s, sv in zip(model.alphas, model.signed_labels, model.support_vectors):
        cells = [format_float(a), format_float(s)] + [format_float(v) for v in sv]
        lines.append(" ".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _header_fields(tokens: list[str], path: Path) -> dict[str, str]:
    fields = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep:
            raise SchemaError(f"{path}: malformed header token {token!r}")
        fields[key] = value
    missing = {"d", "gamma", "C", "b", "n_sv", "scale"} - set(fields)
    if missing:
        raise SchemaError(f"{path}: header is missing {sorted(missing)}")
    return fields


def load_model(path: str | Path) -> SvmModel:
    """Read a model file written by :func:`save_model`.

    The file format carries no training diagnostics, so a non-empty model
    loads with ``converged=True``; an ``n_sv=0`` file comes back flagged.
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"model file {path} does not exist")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty model file")
    tokens = lines[0].split()
    if len(tokens) < 2 or tokens[0] != _MODEL_MAGIC or tokens[1] != _MODEL_VERSION:
        raise SchemaError(f"{path}: not a {_MODEL_MAGIC} {_MODEL_VERSION} file")
    fields = _header_fields(tokens[2:], path)

    def real(key: str) -> float:
        try:
            value = float(fields[key])
        except ValueError:
            raise SchemaError(f"{path}: header {key}={fields[key]!r} is not a number") from None
        if not math.isfinite(value):
            raise SchemaError(f"{path}: header {key} is not finite")
        return value

    try:
        dim = int(fields["d"])
        n_sv = int(fields["n_sv"])
    except ValueError:
        raise SchemaError(f"{path}: d and n_sv must be integers") from None
    if dim < 1 or n_sv < 0:
        raise SchemaError(f"{path}: d={dim} n_sv={n_sv} out of range")

    pairs = fields["scale"].split(";")
    if len(pairs) != dim:
        raise SchemaError(f"{path}: scale has {len(pairs)} pairs, expected {dim}")
    means, stds = [], []
    for pair in pairs:
        cells = pair.split(",")
        if len(cells) != 2:
            raise SchemaError(f"{path}: malformed scale pair {pair!r}")
        try:
            m, s = float(cells[0]), float(cells[1])
        except ValueError:
            raise SchemaError(f"{path}: malformed scale pair {pair!r}") from None
        if not (math.isfinite(m) and math.isfinite(s)) or s == 0.0:
            raise SchemaError(f"{path}: unusable scale pair {pair!r}")
        means.append(m)
        stds.append(s)

    body = lines[1:]
    if len(body) != n_sv:
        raise SchemaError(f"{path}: header says n_sv={n_sv} but {len(body)} vector lines follow")
    alphas, signed, vectors = [], [], []
    for k, line in enumerate(body, start=1):
        cells = line.split()
        if len(cells) != 2 + dim:
            raise SchemaError(f"{path}: vector line {k} has {len(cells)} fields, expected {2 + dim}")
        try:
            values = [float(cell) for cell in cells]
        except ValueError:
            raise SchemaError(f"{path}: vector line {k} has a non-numeric field") from None
        if any(not math.isfinite(v) for v in values):
            raise SchemaError(f"{path}: vector line {k} has a non-finite field")
        alphas.append(values[0])
        signed.append(values[1])
        vectors.append(tuple(values[2:]))

    try:
        return SvmModel(
            support_vectors=tuple(vectors),
            alphas=tuple(alphas),
            signed_labels=tuple(signed),
            bias=real("b"),
            kernel=KernelConfig(gamma=real("gamma")),
            scaler=FeatureScaler(means=tuple(means), stds=tuple(stds)),
            c=real("C"),
            converged=n_sv > 0,
        )
    except InvalidInputError as exc:
        raise SchemaError(f"{path}: {exc}") from None
