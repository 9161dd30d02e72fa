"""Shared pieces of the classifier suite: errors, scaling, folds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_CLASSES = 4


class DimensionMismatch(ValueError):
    """Input feature count differs from what the model was trained on."""


class EmptyNode(ValueError):
    """Impurity of a node with no samples is undefined."""


def check_training_inputs(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2:
        raise DimensionMismatch("X must be 2-d (samples x features)")
    if len(X) != len(y):
        raise DimensionMismatch("X and y row counts differ")
    if len(X) == 0:
        raise DimensionMismatch("empty training set")
    if X.shape[1] == 0:
        raise DimensionMismatch("training matrix has no feature columns")
    if y.min() < 0 or y.max() >= N_CLASSES:
        raise ValueError(f"labels must lie in 0..{N_CLASSES - 1}")
    return X, y


def check_predict_inputs(X, feature_count):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != feature_count:
        raise DimensionMismatch(
            f"expected {feature_count} features, got shape {X.shape}")
    return X


def argmax_rows(scores: np.ndarray) -> np.ndarray:
    """Row-wise argmax; ties resolve to the lowest class id."""
    return np.argmax(scores, axis=1)


@dataclass(frozen=True)
class Scaler:
    """Per-feature standardization fitted on training data.

    Zero-variance features map to exactly 0 so they drop out of distances
    and inner products.
    """

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Scaler":
        return cls(mean=X.mean(axis=0), std=X.std(axis=0))

    def transform(self, X: np.ndarray) -> np.ndarray:
        safe = np.where(self.std > 0.0, self.std, 1.0)
        Z = (X - self.mean) / safe
        if np.any(self.std == 0.0):
            Z = Z.copy()
            Z[:, self.std == 0.0] = 0.0
        return Z

    def to_dict(self):
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(mean=np.array(d["mean"], dtype=float),
                   std=np.array(d["std"], dtype=float))


def stratified_kfold(y: np.ndarray, n_folds: int, seed: int):
    """Deterministic stratified folds: shuffle within class, deal round-robin.

    Returns a list of index arrays (the folds), each sorted ascending.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    folds = [[] for _ in range(n_folds)]
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(len(idx))]
        for pos, i in enumerate(idx):
            folds[pos % n_folds].append(int(i))
    return [np.array(sorted(f), dtype=int) for f in folds]
