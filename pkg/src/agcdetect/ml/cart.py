"""Single CART decision tree."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._common import (N_CLASSES, argmax_rows, check_predict_inputs,
                      check_training_inputs)
from ._tree import Node, grow_classification_tree, tree_class_counts


@dataclass(frozen=True)
class DecisionTreeConfig:
    min_samples_split: int = 2

    def to_dict(self):
        return {"min_samples_split": self.min_samples_split}

    @classmethod
    def from_dict(cls, d):
        return cls(min_samples_split=int(d["min_samples_split"]))


@dataclass
class DecisionTreeModel:
    root: Node
    n_features: int
    config: DecisionTreeConfig

    def predict_scores(self, X) -> np.ndarray:
        """Class-count fractions of the leaf each row lands in."""
        X = check_predict_inputs(X, self.n_features)
        counts = tree_class_counts(self.root, X)
        return counts / counts.sum(axis=1, keepdims=True)

    def predict(self, X) -> np.ndarray:
        return argmax_rows(self.predict_scores(X))

    def to_dict(self):
        return {"n_features": self.n_features,
                "config": self.config.to_dict(),
                "tree": self.root.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(root=Node.from_dict(d["tree"]),
                   n_features=int(d["n_features"]),
                   config=DecisionTreeConfig.from_dict(d["config"]))


def train_decision_tree(X, y, config: DecisionTreeConfig = DecisionTreeConfig(),
                        seed: int = 0) -> DecisionTreeModel:
    """Grow an unpruned CART tree (the seed is accepted for interface
    uniformity; training is deterministic)."""
    X, y = check_training_inputs(X, y)
    root = grow_classification_tree(
        X, y, min_samples_split=config.min_samples_split)
    return DecisionTreeModel(root=root, n_features=X.shape[1], config=config)
