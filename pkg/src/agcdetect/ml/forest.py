"""Random forest of CART trees."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._common import (N_CLASSES, argmax_rows, check_predict_inputs,
                      check_training_inputs)
from ._tree import Node, grow_classification_tree, tree_class_counts


@dataclass(frozen=True)
class RandomForestConfig:
    n_trees: int = 500
    bootstrap: bool = True
    features_per_split: Optional[int] = None   # None -> floor(sqrt(d))
    min_samples_split: int = 2

    def to_dict(self):
        return {"n_trees": self.n_trees, "bootstrap": self.bootstrap,
                "features_per_split": self.features_per_split,
                "min_samples_split": self.min_samples_split}

    @classmethod
    def from_dict(cls, d):
        fps = d["features_per_split"]
        return cls(n_trees=int(d["n_trees"]), bootstrap=bool(d["bootstrap"]),
                   features_per_split=None if fps is None else int(fps),
                   min_samples_split=int(d["min_samples_split"]))


@dataclass
class RandomForestModel:
    roots: list
    n_features: int
    config: RandomForestConfig

    def predict_scores(self, X) -> np.ndarray:
        """Fraction of trees voting for each class."""
        X = check_predict_inputs(X, self.n_features)
        votes = np.zeros((len(X), N_CLASSES))
        for root in self.roots:
            counts = tree_class_counts(root, X)
            votes[np.arange(len(X)), np.argmax(counts, axis=1)] += 1.0
        return votes / len(self.roots)

    def predict(self, X) -> np.ndarray:
        return argmax_rows(self.predict_scores(X))

    def to_dict(self):
        return {"n_features": self.n_features,
                "config": self.config.to_dict(),
                "trees": [r.to_dict() for r in self.roots]}

    @classmethod
    def from_dict(cls, d):
        return cls(roots=[Node.from_dict(t) for t in d["trees"]],
                   n_features=int(d["n_features"]),
                   config=RandomForestConfig.from_dict(d["config"]))


def train_random_forest(X, y, config: RandomForestConfig = RandomForestConfig(),
                        seed: int = 0) -> RandomForestModel:
    """Each tree gets its own child stream of ``seed``; with bootstrap on,
    it trains on n rows drawn with replacement, and every node considers
    ``features_per_split`` randomly drawn candidate features."""
    X, y = check_training_inputs(X, y)
    n, d = X.shape
    fps = config.features_per_split
    if fps is None:
        fps = int(math.floor(math.sqrt(d)))
    fps = max(1, min(fps, d))

    streams = np.random.SeedSequence(seed).spawn(config.n_trees)
    roots = []
    for ss in streams:
        rng = np.random.default_rng(ss)
        if config.bootstrap:
            rows = rng.integers(0, n, size=n)
        else:
            rows = np.arange(n)
        roots.append(grow_classification_tree(
            X[rows], y[rows],
            features_per_split=None if fps >= d else fps,
            rng=rng, min_samples_split=config.min_samples_split))
    return RandomForestModel(roots=roots, n_features=d, config=config)
