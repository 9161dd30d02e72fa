"""Evaluation tests: matrix arithmetic, reference reconstructions, rendering."""

import json

import numpy as np
import pytest

from agcdetect.evaluation import (ConfusionMatrix, EvaluationReport,
                                  LabelOutOfRange, UnknownFormat, confusion,
                                  metrics, report_render, round_half_up)

# Reference percent-form confusion matrices for the detector comparison
# (rows: none, f1, f2, ptie) with test counts [40, 140, 140, 160].
TEST_COUNTS = [40.0, 140.0, 140.0, 160.0]

DT_PERCENT = [
    [100.0, 0.0, 0.0, 0.0],
    [0.0, 82.76, 11.72, 5.52],
    [0.74, 7.42, 86.67, 5.17],
    [0.0, 3.80, 4.43, 91.77],
]
RF_PERCENT = [
    [97.62, 2.38, 0.0, 0.0],
    [0.0, 91.03, 5.52, 3.45],
    [0.0, 2.22, 95.56, 2.22],
    [0.0, 0.63, 0.63, 98.74],
]
GNB_PERCENT = [
    [97.62, 2.38, 0.0, 0.0],
    [17.93, 32.41, 12.41, 37.25],
    [20.0, 5.19, 22.22, 52.59],
    [24.68, 2.53, 0.0, 72.79],
]
XGB_PERCENT = [
    [97.62, 0.0, 2.38, 0.0],
    [0.0, 88.97, 6.9, 4.13],
    [0.0, 4.45, 93.33, 2.22],
    [0.0, 1.9, 0.63, 97.47],
]


def report_from_percent(percent):
    return metrics(ConfusionMatrix.from_percent(percent, TEST_COUNTS))


class TestRounding:
    def test_half_goes_up(self):
        assert round_half_up(13.835) == 13.84
        assert round_half_up(0.005) == 0.01
        assert round_half_up(88.344999) == 88.34


class TestConfusion:
    def test_perfect_predictions(self):
        y = np.array([0, 1, 2, 3, 2, 1])
        cm = confusion(y, y)
        assert np.allclose(cm.percent(), np.diag([100.0] * 4))

    def test_all_predicted_zero(self):
        y = np.array([0, 1, 2, 3])
        cm = confusion(y, np.zeros(4, dtype=int))
        assert np.allclose(cm.percent()[:, 0], 100.0)
        assert cm.percent()[:, 1:].sum() == 0.0

    def test_two_sample_toy(self):
        cm = confusion([0, 1], [1, 1])
        assert cm.percent()[0].tolist() == [0.0, 100.0, 0.0, 0.0]
        assert cm.percent()[1].tolist() == [0.0, 100.0, 0.0, 0.0]

    def test_counts_and_row_sums(self):
        rng = np.random.default_rng(3)
        yt = rng.integers(0, 4, 500)
        yp = rng.integers(0, 4, 500)
        cm = confusion(yt, yp)
        assert cm.total == 500
        for c in range(4):
            assert cm.row_sums[c] == np.sum(yt == c)

    def test_label_out_of_range(self):
        with pytest.raises(LabelOutOfRange):
            confusion([0, 4], [0, 0])
        with pytest.raises(LabelOutOfRange):
            confusion([0, 1], [-1, 0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion([0, 1, 2], [0, 1])

    def test_empty_row_percent_is_zero(self):
        cm = confusion([1, 1, 2], [1, 2, 2])
        assert np.all(cm.percent()[0] == 0.0)
        assert np.all(cm.percent()[3] == 0.0)


class TestReferenceTables:
    """Reconstruct the reference summary metrics from the percent matrices."""

    def test_decision_tree_row(self):
        rep = report_from_percent(DT_PERCENT)
        assert rep.detected_fdias == pytest.approx(87.28, abs=0.05)
        assert rep.weighted_accuracy == pytest.approx(88.3, abs=0.05)
        assert rep.detected_no_attack == pytest.approx(100.0, abs=0.005)
        assert rep.precision == pytest.approx(100.0, abs=0.005)

    def test_random_forest_row(self):
        rep = report_from_percent(RF_PERCENT)
        assert rep.detected_fdias == pytest.approx(95.28, abs=0.05)
        assert rep.weighted_accuracy == pytest.approx(95.47, abs=0.05)
        assert rep.detected_no_attack == pytest.approx(97.62, abs=0.005)
        assert rep.precision == pytest.approx(99.77, abs=0.05)
        assert rep.recall == pytest.approx(100.0, abs=0.005)
        assert rep.f1 == pytest.approx(99.88, abs=0.05)

    def test_naive_bayes_row(self):
        rep = report_from_percent(GNB_PERCENT)
        assert rep.detected_fdias == pytest.approx(43.85, abs=0.05)
        assert rep.weighted_accuracy == pytest.approx(48.33, abs=0.05)

    def test_boosting_row(self):
        rep = report_from_percent(XGB_PERCENT)
        assert rep.detected_fdias == pytest.approx(93.45, abs=0.05)
        assert rep.weighted_accuracy == pytest.approx(93.8, abs=0.05)
        assert rep.f1 == pytest.approx(99.88, abs=0.05)

    def test_percent_round_trip(self):
        cm = ConfusionMatrix.from_percent(RF_PERCENT, TEST_COUNTS)
        assert np.allclose(cm.percent(), RF_PERCENT, atol=0.005)
        assert np.allclose(cm.row_sums, TEST_COUNTS)


class TestMetricProperties:
    def test_weighted_accuracy_is_count_weighted_diag_mean(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            counts = rng.integers(1, 40, size=(4, 4)).astype(float)
            cm = ConfusionMatrix(counts=counts)
            rep = metrics(cm)
            rates = np.diag(counts) / counts.sum(axis=1)
            weights = counts.sum(axis=1) / counts.sum()
            assert rep.weighted_accuracy == pytest.approx(
                100.0 * float(np.dot(rates, weights)), rel=1e-12)

    def test_detected_fdias_ignores_row_zero(self):
        rng = np.random.default_rng(12)
        counts = rng.integers(1, 40, size=(4, 4)).astype(float)
        base = metrics(ConfusionMatrix(counts=counts)).detected_fdias
        counts2 = counts.copy()
        counts2[0] = [500.0, 3.0, 0.0, 250.0]
        assert metrics(ConfusionMatrix(counts=counts2)).detected_fdias == base

    def test_f1_invariant_to_attack_confusions(self):
        counts = np.array([[38.0, 2.0, 0.0, 0.0],
                           [1.0, 120.0, 10.0, 9.0],
                           [0.0, 5.0, 125.0, 10.0],
                           [2.0, 4.0, 4.0, 152.0]])
        rep = metrics(ConfusionMatrix(counts=counts))
        swapped = counts.copy()
        # move mass among attack-predicted columns of attack rows
        swapped[1, 1], swapped[1, 2] = 90.0, 40.0
        swapped[3, 1], swapped[3, 3] = 50.0, 106.0
        rep2 = metrics(ConfusionMatrix(counts=swapped))
        assert rep2.f1 == pytest.approx(rep.f1, rel=1e-12)
        assert rep2.detected_fdias != pytest.approx(rep.detected_fdias)

    def test_perfect_matrix_all_hundred(self):
        cm = ConfusionMatrix(counts=np.diag([40.0, 140.0, 140.0, 160.0]))
        rep = metrics(cm)
        for name, value in rep.metric_values().items():
            assert value == pytest.approx(100.0), name
        assert rep.notes == ()

    def test_empty_rows_give_zero_with_note(self):
        cm = ConfusionMatrix(counts=np.zeros((4, 4)))
        rep = metrics(cm)
        assert all(v == 0.0 for v in rep.metric_values().values())
        assert len(rep.notes) >= 4

    def test_f1_is_harmonic_mean(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            counts = rng.integers(1, 60, size=(4, 4)).astype(float)
            rep = metrics(ConfusionMatrix(counts=counts))
            expect = 2 * rep.precision * rep.recall / (rep.precision + rep.recall)
            assert rep.f1 == pytest.approx(expect, rel=1e-12)


class TestRender:
    def fixture_report(self):
        return report_from_percent(RF_PERCENT)

    def test_json_round_trip(self):
        rep = self.fixture_report()
        payload = json.loads(report_render(rep, "json"))
        assert payload["detected_fdias"] == 95.28
        assert payload["weighted_accuracy"] == 95.47
        again = json.loads(report_render(rep, "json"))
        assert payload == again

    def test_csv_column_order(self):
        text = report_render(self.fixture_report(), "csv")
        header, row = text.strip().split("\n")
        assert header == ("detected_fdias,detected_no_attack,"
                          "weighted_accuracy,precision,recall,f1")
        values = row.split(",")
        assert values[0] == "95.28"
        assert values[2] == "95.47"

    def test_table_contains_metric_names(self):
        text = report_render(self.fixture_report(), "table")
        for title in ("Detected FDIAs", "Detected No-Attack Cases",
                      "Weighted Accuracy", "Precision", "Recall", "F1-score"):
            assert title in text

    def test_two_decimals_half_up(self):
        cm = ConfusionMatrix(counts=np.array(
            [[0.0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1.0]]))
        # all attack rows perfect -> 100.00; empty no-attack row -> note
        rep = metrics(cm)
        assert rep.detected_no_attack == 0.0
        text = report_render(rep, "table")
        assert "100.00" in text
        assert "note:" in text

    def test_unknown_format(self):
        with pytest.raises(UnknownFormat):
            report_render(self.fixture_report(), "yaml")
