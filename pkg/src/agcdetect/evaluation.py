"""Confusion matrices and the summary metrics reported for each classifier.

Labels: 0 = no attack, 1/2/3 = falsified f1 / f2 / tie-line channel.
Metric conventions:

* detected_fdias      — diagonal mass of the attack rows over their total;
* detected_no_attack  — recall of class 0;
* weighted_accuracy   — overall accuracy (trace over total);
* precision/recall/f1 — binary collapse, positive = any attack class.

Counts are kept as floats so percentage-form matrices can be converted
back to (fractional) counts and fed through the same arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

N_CLASSES = 4

METRIC_FIELDS = ("detected_fdias", "detected_no_attack", "weighted_accuracy",
                 "precision", "recall", "f1")

_METRIC_TITLES = {
    "detected_fdias": "Detected FDIAs",
    "detected_no_attack": "Detected No-Attack Cases",
    "weighted_accuracy": "Weighted Accuracy",
    "precision": "Precision",
    "recall": "Recall",
    "f1": "F1-score",
}


class LabelOutOfRange(ValueError):
    """A label fell outside 0..3."""


class UnknownFormat(ValueError):
    """Requested render format is not one of json / csv / table."""


def round_half_up(x: float, decimals: int = 2) -> float:
    """Decimal rounding with exact halves going up (13.835 -> 13.84)."""
    scale = 10 ** decimals
    return math.floor(x * scale + 0.5) / scale


def format_2dec(x: float) -> str:
    cents = int(math.floor(x * 100 + 0.5))
    return f"{cents // 100}.{cents % 100:02d}"


@dataclass(frozen=True)
class ConfusionMatrix:
    """4x4 matrix of (possibly fractional) counts, rows = actual class."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float)
        if counts.shape != (N_CLASSES, N_CLASSES):
            raise ValueError(f"counts must be 4x4, got {counts.shape}")
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise ValueError("counts must be finite and nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def percent(self) -> np.ndarray:
        """Row-normalized percentages, 2 decimals half-up; empty rows -> 0."""
        out = np.zeros((N_CLASSES, N_CLASSES))
        sums = self.row_sums
        for a in range(N_CLASSES):
            if sums[a] > 0:
                for p in range(N_CLASSES):
                    out[a, p] = round_half_up(
                        100.0 * self.counts[a, p] / sums[a])
        return out

    @classmethod
    def from_percent(cls, percent_rows, row_totals) -> "ConfusionMatrix":
        """Rebuild (fractional) counts from row percentages and row totals."""
        percent = np.asarray(percent_rows, dtype=float)
        totals = np.asarray(row_totals, dtype=float)
        if percent.shape != (N_CLASSES, N_CLASSES) or totals.shape != (N_CLASSES,):
            raise ValueError("need a 4x4 percent matrix and 4 row totals")
        return cls(counts=percent / 100.0 * totals[:, None])

    def __eq__(self, other):
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    """Count (actual, predicted) pairs into a 4x4 matrix."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError("y_true and y_pred must be equal-length 1-d arrays")
    for name, arr in (("y_true", y_true), ("y_pred", y_pred)):
        if len(arr) and (arr.min() < 0 or arr.max() >= N_CLASSES):
            raise LabelOutOfRange(f"{name} labels must lie in 0..{N_CLASSES - 1}")
    counts = np.bincount(y_true * N_CLASSES + y_pred,
                         minlength=N_CLASSES * N_CLASSES)
    return ConfusionMatrix(counts=counts.reshape(N_CLASSES, N_CLASSES)
                           .astype(float))


@dataclass(frozen=True)
class EvaluationReport:
    """Percent-form matrix plus the six summary metrics (percentages).

    ``notes`` carries diagnostics for metrics whose denominator was empty
    (reported as 0).
    """

    percent_matrix: Tuple[Tuple[float, ...], ...]
    detected_fdias: float
    detected_no_attack: float
    weighted_accuracy: float
    precision: float
    recall: float
    f1: float
    notes: Tuple[str, ...] = ()

    def metric_values(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_FIELDS}


def metrics(cm: ConfusionMatrix) -> EvaluationReport:
    """Summary metrics of a confusion matrix; empty denominators give 0
    plus a note."""
    counts = cm.counts
    notes = []

    def ratio(numer: float, denom: float, name: str) -> float:
        if denom <= 0:
            notes.append(f"{name}: empty denominator, reported as 0")
            return 0.0
        return 100.0 * numer / denom

    attack_diag = float(counts[1, 1] + counts[2, 2] + counts[3, 3])
    attack_total = float(counts[1:].sum())
    detected_fdias = ratio(attack_diag, attack_total, "detected_fdias")
    detected_no_attack = ratio(float(counts[0, 0]), float(counts[0].sum()),
                               "detected_no_attack")
    weighted_accuracy = ratio(float(np.trace(counts)), cm.total,
                              "weighted_accuracy")

    tp = float(counts[1:, 1:].sum())
    fp = float(counts[0, 1:].sum())
    fn = float(counts[1:, 0].sum())
    precision = ratio(tp, tp + fp, "precision")
    recall = ratio(tp, tp + fn, "recall")
    if precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    else:
        notes.append("f1: empty denominator, reported as 0")
        f1 = 0.0

    percent = tuple(tuple(row) for row in cm.percent())
    return EvaluationReport(percent_matrix=percent,
                            detected_fdias=detected_fdias,
                            detected_no_attack=detected_no_attack,
                            weighted_accuracy=weighted_accuracy,
                            precision=precision, recall=recall, f1=f1,
                            notes=tuple(notes))


def report_render(report: EvaluationReport, format: str = "table") -> str:
    """Render a report as json, csv, or aligned table text (2 decimals,
    half-up)."""
    if format == "json":
        payload = {name: float(format_2dec(getattr(report, name)))
                   for name in METRIC_FIELDS}
        payload["percent_matrix"] = [[float(format_2dec(v)) for v in row]
                                     for row in report.percent_matrix]
        if report.notes:
            payload["notes"] = list(report.notes)
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"
    if format == "csv":
        header = ",".join(METRIC_FIELDS)
        row = ",".join(format_2dec(getattr(report, name)) for name in METRIC_FIELDS)
        return header + "\n" + row + "\n"
    if format == "table":
        width = max(len(t) for t in _METRIC_TITLES.values())
        lines = [f"{_METRIC_TITLES[name]:<{width}}  "
                 f"{format_2dec(getattr(report, name)):>7}"
                 for name in METRIC_FIELDS]
        for note in report.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"
    raise UnknownFormat(f"unknown report format: {format!r}")
