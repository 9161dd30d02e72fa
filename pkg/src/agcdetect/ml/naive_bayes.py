"""Gaussian naive Bayes with equal class priors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._common import (N_CLASSES, argmax_rows, check_predict_inputs,
                      check_training_inputs)

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianNBConfig:
    var_smoothing: float = 1e-9

    def to_dict(self):
        return {"var_smoothing": self.var_smoothing}

    @classmethod
    def from_dict(cls, d):
        return cls(var_smoothing=float(d["var_smoothing"]))


@dataclass
class GaussianNBModel:
    means: np.ndarray        # (4, d); rows of absent classes unused
    variances: np.ndarray    # (4, d), smoothed
    present: np.ndarray      # bool (4,)
    n_features: int
    config: GaussianNBConfig

    def predict_scores(self, X) -> np.ndarray:
        """Joint log densities log p(x|c) + log(1/4), -inf for absent classes."""
        X = check_predict_inputs(X, self.n_features)
        scores = np.full((len(X), N_CLASSES), -np.inf)
        for c in range(N_CLASSES):
            if not self.present[c]:
                continue
            var = self.variances[c]
            ll = -0.5 * (np.log(var) + _LOG_2PI
                         + (X - self.means[c]) ** 2 / var).sum(axis=1)
            scores[:, c] = ll + math.log(1.0 / N_CLASSES)
        return scores

    def predict(self, X) -> np.ndarray:
        return argmax_rows(self.predict_scores(X))

    def to_dict(self):
        return {"n_features": self.n_features,
                "config": self.config.to_dict(),
                "means": self.means.tolist(),
                "variances": self.variances.tolist(),
                "present": [bool(p) for p in self.present]}

    @classmethod
    def from_dict(cls, d):
        return cls(means=np.array(d["means"], dtype=float),
                   variances=np.array(d["variances"], dtype=float),
                   present=np.array(d["present"], dtype=bool),
                   n_features=int(d["n_features"]),
                   config=GaussianNBConfig.from_dict(d["config"]))


def train_gaussian_nb(X, y, config: GaussianNBConfig = GaussianNBConfig(),
                      seed: int = 0) -> GaussianNBModel:
    """Per-class feature means/variances; every variance is padded by
    var_smoothing times the largest per-feature variance of the whole
    training set. Priors are fixed at 1/4 regardless of class frequency."""
    X, y = check_training_inputs(X, y)
    d = X.shape[1]
    eps = config.var_smoothing * float(np.max(X.var(axis=0)))
    means = np.zeros((N_CLASSES, d))
    variances = np.ones((N_CLASSES, d))
    present = np.zeros(N_CLASSES, dtype=bool)
    for c in range(N_CLASSES):
        rows = X[y == c]
        if len(rows) == 0:
            continue
        present[c] = True
        means[c] = rows.mean(axis=0)
        variances[c] = rows.var(axis=0) + eps
    return GaussianNBModel(means=means, variances=variances, present=present,
                           n_features=d, config=config)
