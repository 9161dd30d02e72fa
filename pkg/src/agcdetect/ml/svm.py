"""One-vs-rest linear SVMs trained by deterministic subgradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._common import (N_CLASSES, Scaler, argmax_rows, check_predict_inputs,
                      check_training_inputs, stratified_kfold)

C_GRID = (1e-4, 1e-2, 1.0, 1e2)


@dataclass(frozen=True)
class LinearSvmConfig:
    c_grid: tuple = C_GRID
    epochs: int = 300
    cv_folds: int = 3

    def to_dict(self):
        return {"c_grid": list(self.c_grid), "epochs": self.epochs,
                "cv_folds": self.cv_folds}

    @classmethod
    def from_dict(cls, d):
        return cls(c_grid=tuple(float(c) for c in d["c_grid"]),
                   epochs=int(d["epochs"]), cv_folds=int(d["cv_folds"]))


@dataclass
class LinearSvmModel:
    scaler: Scaler
    weights: np.ndarray      # (4, d+1), last column is the bias term
    chosen_c: float
    cv_accuracy: dict        # C -> mean fold accuracy
    n_features: int
    config: LinearSvmConfig

    def predict_scores(self, X) -> np.ndarray:
        """Decision values of the four one-vs-rest separators."""
        X = check_predict_inputs(X, self.n_features)
        return _augment(self.scaler.transform(X)) @ self.weights.T

    def predict(self, X) -> np.ndarray:
        return argmax_rows(self.predict_scores(X))

    def to_dict(self):
        return {"n_features": self.n_features,
                "config": self.config.to_dict(),
                "scaler": self.scaler.to_dict(),
                "weights": self.weights.tolist(),
                "chosen_c": self.chosen_c,
                "cv_accuracy": {repr(k): v for k, v in
                                self.cv_accuracy.items()}}

    @classmethod
    def from_dict(cls, d):
        return cls(scaler=Scaler.from_dict(d["scaler"]),
                   weights=np.array(d["weights"], dtype=float),
                   chosen_c=float(d["chosen_c"]),
                   cv_accuracy={float(k): float(v) for k, v in
                                d["cv_accuracy"].items()},
                   n_features=int(d["n_features"]),
                   config=LinearSvmConfig.from_dict(d["config"]))


def _augment(Z: np.ndarray) -> np.ndarray:
    return np.hstack([Z, np.ones((len(Z), 1))])


def _fit_binary(Z: np.ndarray, t: np.ndarray, c: float, epochs: int):
    """Full-batch subgradient descent on lam/2 |w|^2 + mean hinge(t, Zw),
    lam = 1/(c n), step 1/(lam k) at epoch k."""
    n, d = Z.shape
    lam = 1.0 / (c * n)
    w = np.zeros(d)
    for k in range(1, epochs + 1):
        margins = t * (Z @ w)
        viol = margins < 1.0
        grad = lam * w
        if viol.any():
            grad = grad - (Z[viol] * t[viol, None]).sum(axis=0) / n
        w = w - grad / (lam * k)
    return w


def _fit_ovr(Z: np.ndarray, y: np.ndarray, c: float, epochs: int) -> np.ndarray:
    W = np.zeros((N_CLASSES, Z.shape[1]))
    for cls in range(N_CLASSES):
        target = np.where(y == cls, 1.0, -1.0)
        W[cls] = _fit_binary(Z, target, c, epochs)
    return W


def train_linear_svm(X, y, config: LinearSvmConfig = LinearSvmConfig(),
                     seed: int = 0) -> LinearSvmModel:
    """Pick C on stratified folds by mean overall accuracy (ties go to the
    smaller C), then retrain on the full training set."""
    X, y = check_training_inputs(X, y)
    if len(X) < 6:
        raise ValueError(f"need at least 6 training rows, got {len(X)}")
    scaler = Scaler.fit(X)
    Z = _augment(scaler.transform(X))

    folds = stratified_kfold(y, config.cv_folds, seed)
    all_idx = np.arange(len(y))
    cv_accuracy = {}
    best_c, best_acc = None, -1.0
    for c in sorted(config.c_grid):
        accs = []
        for held in folds:
            train_idx = np.setdiff1d(all_idx, held)
            W = _fit_ovr(Z[train_idx], y[train_idx], c, config.epochs)
            pred = argmax_rows(Z[held] @ W.T)
            accs.append(np.mean(pred == y[held]))
        cv_accuracy[c] = float(np.mean(accs))
        if cv_accuracy[c] > best_acc:
            best_c, best_acc = c, cv_accuracy[c]

    weights = _fit_ovr(Z, y, best_c, config.epochs)
    return LinearSvmModel(scaler=scaler, weights=weights, chosen_c=best_c,
                          cv_accuracy=cv_accuracy, n_features=X.shape[1],
                          config=config)
