"""Gradient-boosted trees with second-order (Newton) updates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._common import (N_CLASSES, argmax_rows, check_predict_inputs,
                      check_training_inputs)
from ._tree import Node, grow_regression_tree, tree_values


@dataclass(frozen=True)
class GbtConfig:
    n_rounds: int = 300
    learning_rate: float = 0.025
    max_depth: int = 5
    reg_lambda: float = 1.0
    gamma: float = 0.066
    min_child_weight: float = 1.2
    subsample: float = 0.8
    colsample: float = 0.8

    def to_dict(self):
        return {"n_rounds": self.n_rounds,
                "learning_rate": self.learning_rate,
                "max_depth": self.max_depth,
                "reg_lambda": self.reg_lambda,
                "gamma": self.gamma,
                "min_child_weight": self.min_child_weight,
                "subsample": self.subsample,
                "colsample": self.colsample}

    @classmethod
    def from_dict(cls, d):
        return cls(n_rounds=int(d["n_rounds"]),
                   learning_rate=float(d["learning_rate"]),
                   max_depth=int(d["max_depth"]),
                   reg_lambda=float(d["reg_lambda"]),
                   gamma=float(d["gamma"]),
                   min_child_weight=float(d["min_child_weight"]),
                   subsample=float(d["subsample"]),
                   colsample=float(d["colsample"]))


def softmax(F: np.ndarray) -> np.ndarray:
    shifted = F - F.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_gradients(F: np.ndarray, y: np.ndarray):
    """Per-score gradient and Hessian diagonal of the multiclass log-loss.

    g[i, k] = p[i, k] - 1{y_i = k},  h[i, k] = p[i, k] (1 - p[i, k]).
    """
    p = softmax(F)
    g = p.copy()
    g[np.arange(len(y)), y] -= 1.0
    h = p * (1.0 - p)
    return g, h


def log_loss(F: np.ndarray, y: np.ndarray) -> float:
    p = softmax(F)
    return float(-np.mean(np.log(p[np.arange(len(y)), y])))


@dataclass
class GbtModel:
    rounds: list             # list of [Node x 4], one regression tree per class
    n_features: int
    config: GbtConfig

    def predict_scores(self, X) -> np.ndarray:
        """Accumulated boosting scores (pre-softmax margins)."""
        X = check_predict_inputs(X, self.n_features)
        F = np.zeros((len(X), N_CLASSES))
        for trees in self.rounds:
            for k in range(N_CLASSES):
                F[:, k] += tree_values(trees[k], X)
        return F

    def predict(self, X) -> np.ndarray:
        return argmax_rows(self.predict_scores(X))

    def to_dict(self):
        return {"n_features": self.n_features,
                "config": self.config.to_dict(),
                "rounds": [[t.to_dict() for t in trees]
                           for trees in self.rounds]}

    @classmethod
    def from_dict(cls, d):
        return cls(rounds=[[Node.from_dict(t) for t in trees]
                           for trees in d["rounds"]],
                   n_features=int(d["n_features"]),
                   config=GbtConfig.from_dict(d["config"]))


def _draw_subset(rng, total: int, fraction: float) -> np.ndarray:
    count = max(1, int(math.floor(fraction * total)))
    if count >= total:
        return np.arange(total)
    return np.sort(rng.choice(total, size=count, replace=False))


def train_gbt(X, y, config: GbtConfig = GbtConfig(), seed: int = 0) -> GbtModel:
    """Each round refits all four class trees on the current softmax
    gradients.  Rows are resampled once per round and columns once per
    tree, each from its own child stream of ``seed``."""
    X, y = check_training_inputs(X, y)
    n, d = X.shape
    F = np.zeros((n, N_CLASSES))
    streams = np.random.SeedSequence(seed).spawn(max(config.n_rounds, 1))
    rounds = []
    for r in range(config.n_rounds):
        rng = np.random.default_rng(streams[r])
        g, h = softmax_gradients(F, y)
        rows = _draw_subset(rng, n, config.subsample)
        trees = []
        for k in range(N_CLASSES):
            cols = _draw_subset(rng, d, config.colsample)
            trees.append(grow_regression_tree(
                X, g[:, k], h[:, k], rows, cols,
                max_depth=config.max_depth, lam=config.reg_lambda,
                gamma=config.gamma,
                min_child_weight=config.min_child_weight,
                learning_rate=config.learning_rate))
        for k in range(N_CLASSES):
            F[:, k] += tree_values(trees[k], X)
        rounds.append(trees)
    return GbtModel(rounds=rounds, n_features=d, config=config)
