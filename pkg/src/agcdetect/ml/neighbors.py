"""k-nearest-neighbor voting on standardized features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._common import (N_CLASSES, Scaler, argmax_rows, check_predict_inputs,
                      check_training_inputs)


@dataclass(frozen=True)
class KnnConfig:
    k: int = 5

    def to_dict(self):
        return {"k": self.k}

    @classmethod
    def from_dict(cls, d):
        return cls(k=int(d["k"]))


@dataclass
class KnnModel:
    scaler: Scaler
    Z: np.ndarray            # standardized training rows
    y: np.ndarray
    n_features: int
    config: KnnConfig

    def predict_scores(self, X) -> np.ndarray:
        """Fraction of the k nearest training rows voting for each class.

        Distances are Euclidean in standardized space; zero-variance
        features contribute nothing.  Equal distances rank by the lower
        training-row index.
        """
        X = check_predict_inputs(X, self.n_features)
        Q = self.scaler.transform(X)
        scores = np.zeros((len(Q), N_CLASSES))
        for i in range(len(Q)):
            # squared distances rank the same as distances and skip the sqrt
            dist = ((self.Z - Q[i]) ** 2).sum(axis=1)
            nearest = np.argsort(dist, kind="stable")[:self.config.k]
            votes = np.bincount(self.y[nearest], minlength=N_CLASSES)
            scores[i] = votes / self.config.k
        return scores

    def predict(self, X) -> np.ndarray:
        return argmax_rows(self.predict_scores(X))

    def to_dict(self):
        return {"n_features": self.n_features,
                "config": self.config.to_dict(),
                "scaler": self.scaler.to_dict(),
                "Z": self.Z.tolist(),
                "y": self.y.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(scaler=Scaler.from_dict(d["scaler"]),
                   Z=np.array(d["Z"], dtype=float),
                   y=np.array(d["y"], dtype=int),
                   n_features=int(d["n_features"]),
                   config=KnnConfig.from_dict(d["config"]))


def train_knn(X, y, config: KnnConfig = KnnConfig(), seed: int = 0) -> KnnModel:
    X, y = check_training_inputs(X, y)
    if len(X) < config.k:
        raise ValueError(f"need at least k={config.k} training rows, "
                         f"got {len(X)}")
    scaler = Scaler.fit(X)
    return KnnModel(scaler=scaler, Z=scaler.transform(X), y=y,
                    n_features=X.shape[1], config=config)
