"""Per-feature relevance testing and Benjamini-Hochberg FDR filtration.

Each feature column is scored with a Kruskal-Wallis H test across the
class groups (nonparametric, natively multiclass); the resulting p-values
are filtered by the Benjamini-Hochberg step-up procedure at FDR level q.
The mask is fitted on training data only and then applied to any matrix
with the same column registry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc
from scipy.stats import rankdata

from .features import FeatureMatrix

__all__ = [
    "DegenerateLabels",
    "SelectionMask",
    "feature_p_value",
    "benjamini_hochberg",
    "fit_mask",
    "apply_mask",
]


class DegenerateLabels(ValueError):
    """Label vector unusable for a group test (class too small or single)."""


def feature_p_value(values, labels) -> float:
    """Kruskal-Wallis p-value of one feature column against the labels.

    Tie-corrected H statistic, chi-square upper tail with (groups - 1)
    degrees of freedom (3 for the full 4-class problem) computed through
    the regularized upper incomplete gamma function.  A constant column
    carries no information and reports p = 1 by convention.
    """
    x = np.asarray(values, dtype=float)
    y = np.asarray(labels)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("values and labels must be equal-length vectors")
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) < 2:
        raise DegenerateLabels("need at least two classes")
    if counts.min() < 2:
        raise DegenerateLabels("every present class needs at least 2 samples")

    n = len(x)
    ranks = rankdata(x)  # average ranks for ties
    h = 0.0
    for cls in classes:
        r = ranks[y == cls]
        h += r.sum() ** 2 / len(r)
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)

    _, tie_counts = np.unique(x, return_counts=True)
    correction = 1.0 - (tie_counts ** 3 - tie_counts).sum() / (n ** 3 - n)
    if correction == 0.0:
        return 1.0  # constant column
    h /= correction

    df = len(classes) - 1
    return float(gammaincc(df / 2.0, max(h, 0.0) / 2.0))


def benjamini_hochberg(p_values, q) -> np.ndarray:
    """Boolean keep-mask of the BH step-up procedure at level q.

    Sort p ascending, find the largest k with p_(k) <= (k/m) * q, and keep
    every p not exceeding that cutoff — so tied p-values share fate.  If
    no k qualifies nothing is kept.
    """
    p = np.asarray(p_values, dtype=float)
    if p.ndim != 1:
        raise ValueError("p_values must be a vector")
    if not 0.0 < q < 1.0:
        raise ValueError("q must be in (0, 1)")
    if len(p) == 0:
        return np.zeros(0, dtype=bool)
    if p.min() < 0.0 or p.max() > 1.0:
        raise ValueError("p-values must lie in [0, 1]")
    order = np.sort(p)
    m = len(p)
    thresholds = (np.arange(1, m + 1) / m) * q
    ok = np.flatnonzero(order <= thresholds)
    if ok.size == 0:
        return np.zeros(m, dtype=bool)
    cutoff = order[ok[-1]]
    return p <= cutoff


@dataclass(frozen=True)
class SelectionMask:
    """Fitted feature filtration: p-values and the surviving indices."""

    kept_indices: tuple
    p_values: np.ndarray
    names: tuple
    fdr_q: float

    def __post_init__(self):
        object.__setattr__(self, "kept_indices",
                           tuple(int(i) for i in self.kept_indices))
        object.__setattr__(self, "p_values",
                           np.asarray(self.p_values, dtype=float))
        if len(self.p_values) != len(self.names):
            raise ValueError("p_values and names must align")
        if any(not 0 <= i < len(self.names) for i in self.kept_indices):
            raise ValueError("kept_indices out of range")

    def __eq__(self, other):
        if not isinstance(other, SelectionMask):
            return NotImplemented
        return (self.kept_indices == other.kept_indices
                and self.names == other.names and self.fdr_q == other.fdr_q
                and np.array_equal(self.p_values, other.p_values))

    @property
    def kept_names(self):
        return tuple(self.names[i] for i in self.kept_indices)

    def to_json(self) -> str:
        payload = {
            "q": self.fdr_q,
            "kept_features": list(self.kept_names),
            "p_values": {name: float(p)
                         for name, p in zip(self.names, self.p_values)},
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "SelectionMask":
        d = json.loads(text)
        names = tuple(d["p_values"].keys())
        kept = set(d["kept_features"])
        missing = kept - set(names)
        if missing:
            raise ValueError(f"kept features missing from p_values: {missing}")
        return cls(kept_indices=tuple(i for i, nm in enumerate(names)
                                      if nm in kept),
                   p_values=np.array([d["p_values"][nm] for nm in names]),
                   names=names, fdr_q=d["q"])

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def fit_mask(train: FeatureMatrix, q: float = 0.05) -> SelectionMask:
    """P-values for every column of the training matrix, then BH at q."""
    if len(train) == 0:
        raise ValueError("empty training matrix")
    p = np.array([feature_p_value(train.values[:, j], train.labels)
                  for j in range(train.values.shape[1])])
    keep = benjamini_hochberg(p, q)
    return SelectionMask(kept_indices=tuple(np.flatnonzero(keep)),
                         p_values=p, names=tuple(train.names), fdr_q=q)


def apply_mask(mask: SelectionMask, matrix: FeatureMatrix) -> FeatureMatrix:
    """Project a matrix onto the mask's surviving columns."""
    if tuple(matrix.names) != tuple(mask.names):
        raise ValueError("matrix columns do not match the fitted mask")
    idx = list(mask.kept_indices)
    return FeatureMatrix(values=matrix.values[:, idx],
                         labels=matrix.labels,
                         names=tuple(mask.names[i] for i in idx))
