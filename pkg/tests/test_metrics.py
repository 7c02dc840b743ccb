import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from firewatch.errors import InvalidInputError
from firewatch.metrics import (
    ConfusionMatrix,
    confusion,
    metrics,
    render_metrics,
    roc,
    roc_to_json,
)
from oracles import pair_count_auc

label_lists = st.lists(st.integers(0, 1), min_size=1, max_size=40)


class TestConfusion:
    def test_perfect_prediction(self):
        cm = confusion([1, 0, 1], [1, 0, 1])
        assert (cm.tp, cm.tn, cm.fp, cm.fn) == (2, 1, 0, 0)

    def test_all_misses(self):
        cm = confusion([0, 0], [1, 1])
        assert (cm.tp, cm.tn, cm.fp, cm.fn) == (0, 0, 0, 2)

    def test_mixed(self):
        cm = confusion([1, 1, 0, 0], [1, 0, 1, 0])
        assert (cm.tp, cm.tn, cm.fp, cm.fn) == (1, 1, 1, 1)

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            confusion([1, 0], [1])

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            confusion([], [])

    def test_bad_label(self):
        with pytest.raises(InvalidInputError):
            confusion([2, 0], [1, 0])

    def test_negative_count_rejected(self):
        with pytest.raises(InvalidInputError):
            ConfusionMatrix(tp=-1, tn=0, fp=0, fn=0)

    @given(label_lists, label_lists)
    def test_count_conservation(self, pred, act):
        size = min(len(pred), len(act))
        cm = confusion(pred[:size], act[:size])
        assert cm.tp + cm.tn + cm.fp + cm.fn == size


class TestMetrics:
    def test_fixed_140_sample_counts(self):
        # hand-checked reference point: 112 right and 28 wrong out of 140
        report = metrics(ConfusionMatrix(tp=1, tn=111, fp=0, fn=28))
        assert report.tpr == pytest.approx(1 / 29, abs=1e-9)
        assert report.fpr == 0.0
        assert report.precision == 1.0
        assert report.accuracy == 0.8
        assert report.error_rate == 0.2
        assert report.n == 140

    def test_all_true_positives(self):
        report = metrics(ConfusionMatrix(tp=7, tn=0, fp=0, fn=0))
        assert report.tpr == 1.0
        assert report.precision == 1.0
        assert report.accuracy == 1.0
        assert report.error_rate == 0.0
        assert report.fpr is None  # no negatives: undefined, not zero

    def test_all_cells_equal(self):
        report = metrics(ConfusionMatrix(tp=1, tn=1, fp=1, fn=1))
        assert (
            report.tpr
            == report.fpr
            == report.precision
            == report.accuracy
            == report.error_rate
            == 0.5
        )

    def test_undefined_precision(self):
        report = metrics(ConfusionMatrix(tp=0, tn=5, fp=0, fn=2))
        assert report.precision is None

    def test_empty_matrix_rejected(self):
        with pytest.raises(InvalidInputError):
            metrics(ConfusionMatrix(tp=0, tn=0, fp=0, fn=0))

    @given(
        st.integers(0, 500), st.integers(0, 500), st.integers(0, 500), st.integers(0, 500)
    )
    def test_accuracy_and_error_rate_partition(self, tp, tn, fp, fn):
        if tp + tn + fp + fn == 0:
            return
        report = metrics(ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn))
        assert report.accuracy + report.error_rate == pytest.approx(1.0, abs=1e-12)


class TestRoc:
    def test_perfectly_separated(self):
        curve = roc([0.9, 0.8, -0.5, -0.7], [1, 1, 0, 0])
        assert curve.auc == 1.0

    def test_constant_scores(self):
        curve = roc([0.3] * 6, [1, 0, 1, 0, 0, 1])
        assert curve.points == ((0.0, 0.0), (1.0, 1.0))
        assert curve.auc == 0.5

    def test_four_point_perfect_ranking(self):
        curve = roc([0.9, 0.4, 0.6, 0.1], [1, 0, 1, 0])
        assert curve.auc == 1.0

    def test_endpoints(self):
        curve = roc([0.2, 0.9, 0.5], [0, 1, 1])
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1] == (1.0, 1.0)

    def test_monotone_in_both_coordinates(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 15))
            labels = rng.integers(0, 2, n)
            if labels.sum() in (0, n):
                continue
            scores = rng.normal(0, 1, n).round(1)
            curve = roc(scores.tolist(), labels.tolist())
            xs = [p[0] for p in curve.points]
            ys = [p[1] for p in curve.points]
            assert xs == sorted(xs)
            assert ys == sorted(ys)

    def test_tied_scores_make_one_combined_point(self):
        curve = roc([0.5, 0.5, 0.1], [1, 0, 0])
        # one point for the tie group at 0.5, plus anchors
        assert curve.points == ((0.0, 0.0), (0.5, 1.0), (1.0, 1.0))

    def test_single_class_rejected(self):
        with pytest.raises(InvalidInputError):
            roc([0.1, 0.2], [1, 1])

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            roc([0.1], [1, 0])

    def test_matches_pair_counting_oracle(self, rng):
        checked = 0
        while checked < 50:
            n = int(rng.integers(2, 13))
            labels = rng.integers(0, 2, n)
            if labels.sum() in (0, n):
                continue
            # coarse scores force plenty of ties
            scores = rng.normal(0, 1, n).round(1)
            curve = roc(scores.tolist(), labels.tolist())
            expected = pair_count_auc(scores.tolist(), labels.tolist())
            assert curve.auc == pytest.approx(expected, abs=1e-9)
            checked += 1

    def test_joint_permutation_invariance(self, rng):
        scores = [0.3, -0.2, 0.9, 0.4, 0.4, -1.0]
        labels = [0, 0, 1, 1, 0, 1]
        curve = roc(scores, labels)
        for _ in range(10):
            order = rng.permutation(len(scores))
            shuffled = roc([scores[k] for k in order], [labels[k] for k in order])
            assert shuffled == curve


class TestRendering:
    def test_metric_lines(self):
        report = metrics(ConfusionMatrix(tp=1, tn=111, fp=0, fn=28))
        text = render_metrics(report)
        assert "accuracy=0.8" in text.splitlines()
        assert "error_rate=0.2" in text.splitlines()
        assert "precision=1" in text.splitlines()
        assert "fpr=0" in text.splitlines()
        assert "n=140" in text.splitlines()

    def test_undefined_rendering(self):
        report = metrics(ConfusionMatrix(tp=3, tn=0, fp=0, fn=0))
        assert "fpr=undefined" in render_metrics(report).splitlines()

    def test_roc_json_round_trip(self):
        curve = roc([0.9, 0.4, 0.6, 0.1], [1, 0, 1, 0])
        payload = json.loads(roc_to_json(curve))
        assert payload["auc"] == curve.auc
        assert [tuple(p) for p in payload["points"]] == list(curve.points)
