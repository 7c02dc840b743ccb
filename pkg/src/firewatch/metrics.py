"""Binary-classification scoring: confusion counts, rate metrics, ROC/AUC.

Labels are ``0`` (no fire outbreak) and ``1`` (fire outbreak) everywhere.
Metrics whose denominator is zero are reported as ``None`` ("undefined"),
never silently coerced to 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from ._numfmt import format_float
from .errors import InvalidInputError

_METRIC_FIELDS = ("tpr", "fpr", "precision", "accuracy", "error_rate")


def _check_labels(name: str, labels: Sequence[int]) -> list[int]:
    out = []
    for k, value in enumerate(labels):
        if value not in (0, 1):
            raise InvalidInputError(f"{name}[{k}] is {value!r}, expected 0 or 1")
        out.append(int(value))
    return out


@dataclass(frozen=True)
class ConfusionMatrix:
    """TP/TN/FP/FN counts for one test pass."""

    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise InvalidInputError(f"{name} must be a nonnegative integer, got {value!r}")

    @property
    def n(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    """The five rate metrics over a confusion matrix; ``None`` = undefined."""

    tpr: Optional[float]
    fpr: Optional[float]
    precision: Optional[float]
    accuracy: float
    error_rate: float
    n: int


@dataclass(frozen=True)
class RocCurve:
    """Threshold sweep of (FPR, TPR) points with trapezoidal area."""

    points: tuple[tuple[float, float], ...]
    auc: float


def confusion(predicted: Sequence[int], actual: Sequence[int]) -> ConfusionMatrix:
    """Tally predictions against ground truth.

    Raises ``InvalidInputError`` on empty or length-mismatched inputs.
    """
    pred = _check_labels("predicted", predicted)
    act = _check_labels("actual", actual)
    if not pred or not act:
        raise InvalidInputError("cannot build a confusion matrix from empty inputs")
    if len(pred) != len(act):
        raise InvalidInputError(
            f"predicted has {len(pred)} entries but actual has {len(act)}"
        )
    tp = tn = fp = fn = 0
    for p, a in zip(pred, act):
        if p == 1 and a == 1:
            tp += 1
        elif p == 0 and a == 0:
            tn += 1
        elif p == 1 and a == 0:
            fp += 1
        else:
            fn += 1
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Derive TPR, FPR, precision, accuracy and error rate from counts."""
    n = cm.n
    if n < 1:
        raise InvalidInputError("confusion matrix is empty (N = 0)")

    def ratio(num: int, den: int) -> Optional[float]:
        return num / den if den else None

    return MetricsReport(
        tpr=ratio(cm.tp, cm.tp + cm.fn),
        fpr=ratio(cm.fp, cm.fp + cm.tn),
        precision=ratio(cm.tp, cm.tp + cm.fp),
        accuracy=(cm.tp + cm.tn) / n,
        error_rate=(cm.fp + cm.fn) / n,
        n=n,
    )


def roc(scores: Sequence[float], actual: Sequence[int]) -> RocCurve:
    """Sweep a decision threshold over the scores and trace (FPR, TPR).

    A sample is classified positive when ``score >= threshold`` (the same
    tie direction the classifier uses). One point is emitted per distinct
    score, so tied scores collapse into a single combined point; the curve
    is anchored at (0, 0) and (1, 1) and the area is the trapezoidal
    integral.

    Raises ``InvalidInputError`` unless both classes are present and the
    inputs have equal nonzero length.
    """
    labels = _check_labels("actual", actual)
    values = [float(s) for s in scores]
    if not values or len(values) != len(labels):
        raise InvalidInputError(
            f"scores has {len(values)} entries but actual has {len(labels)}"
        )
    n_pos = sum(labels)
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise InvalidInputError(
            "ROC needs both classes present (TPR or FPR is undefined otherwise)"
        )

    order = sorted(range(len(values)), key=lambda k: values[k], reverse=True)
    points = [(0.0, 0.0)]
    tp = fp = 0
    k = 0
    while k < len(order):
        threshold = values[order[k]]
        # consume the whole tie group at this threshold
        while k < len(order) and values[order[k]] == threshold:
            if labels[order[k]] == 1:
                tp += 1
            else:
                fp += 1
            k += 1
        points.append((fp / n_neg, tp / n_pos))
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))

    auc = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2.0
    return RocCurve(points=tuple(points), auc=auc)


def render_metrics(report: MetricsReport) -> str:
    """Line-oriented ``metric=value`` text; undefined metrics say so."""
    lines = []
    for name in _METRIC_FIELDS:
        value = getattr(report, name)
        lines.append(f"{name}={'undefined' if value is None else format_float(value)}")
    lines.append(f"n={report.n}")
    return "\n".join(lines)


def roc_to_json(curve: RocCurve) -> str:
    """JSON rendering of the ROC points and area, for external plotting."""
    return json.dumps(
        {"points": [[fpr, tpr] for fpr, tpr in curve.points], "auc": curve.auc},
        indent=2,
    )
