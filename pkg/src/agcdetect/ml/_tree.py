"""Binary decision trees grown by exhaustive midpoint-threshold search.

Two split criteria share one vectorized scan:

* Gini gain, used by the decision tree and random forest.
* Second-order (gradient/Hessian) gain, used by gradient boosting.

A split candidate is the midpoint between adjacent distinct values of one
feature.  The best split maximizes the criterion; exact ties resolve to the
lowest feature index, then the lowest threshold.  Rows go left when
``x <= threshold``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._common import N_CLASSES, EmptyNode


def gini(counts) -> float:
    """Gini impurity 1 - sum((count/total)^2) of a class-count vector."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise EmptyNode("gini impurity of an empty node is undefined")
    frac = counts / total
    return float(1.0 - np.dot(frac, frac))


@dataclass
class Node:
    """Internal node (feature/threshold/children) or leaf (children None).

    ``counts`` holds per-class totals for leaves of classification trees;
    ``value`` holds the additive leaf weight for boosted regression trees.
    """

    feature: int = -1
    threshold: float = 0.0
    left: Optional["Node"] = None
    right: Optional["Node"] = None
    counts: Optional[np.ndarray] = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def to_dict(self):
        if self.is_leaf:
            if self.counts is not None:
                return {"counts": [int(c) for c in self.counts]}
            return {"value": self.value}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d) -> "Node":
        if "feature" in d:
            return cls(feature=int(d["feature"]),
                       threshold=float(d["threshold"]),
                       left=cls.from_dict(d["left"]),
                       right=cls.from_dict(d["right"]))
        if "counts" in d:
            return cls(counts=np.array(d["counts"], dtype=float))
        return cls(value=float(d["value"]))


def _sorted_columns(X: np.ndarray):
    order = np.argsort(X, axis=0, kind="stable")
    Xs = np.take_along_axis(X, order, axis=0)
    boundary = Xs[1:] > Xs[:-1]          # valid split positions, (n-1, m)
    return order, Xs, boundary


def best_gini_split(X: np.ndarray, y: np.ndarray, features: np.ndarray):
    """Best (feature, threshold, gain) over the given feature columns.

    ``features`` maps local columns to global feature indices and must be
    ascending so that the tie rule lands on the lowest global index.
    Returns None when no column has two distinct values.
    """
    n = len(y)
    if n < 2:
        return None
    order, Xs, boundary = _sorted_columns(X[:, features])
    if not boundary.any():
        return None
    m = order.shape[1]
    ys = y[order]                         # (n, m) labels in sorted order

    total = np.bincount(y, minlength=N_CLASSES).astype(float)
    parent = 1.0 - np.dot(total / n, total / n)

    sizes = np.arange(1, n, dtype=float)[:, None]     # left sizes, (n-1, 1)
    sumsq_left = np.zeros((n - 1, m))
    sumsq_right = np.zeros((n - 1, m))
    for c in range(N_CLASSES):
        left_c = np.cumsum(ys == c, axis=0)[:-1].astype(float)
        sumsq_left += left_c ** 2
        sumsq_right += (total[c] - left_c) ** 2
    gini_left = 1.0 - sumsq_left / sizes ** 2
    gini_right = 1.0 - sumsq_right / (n - sizes) ** 2
    gain = parent - (sizes * gini_left + (n - sizes) * gini_right) / n
    gain[~boundary] = -np.inf

    return _pick(gain, Xs, features, require_positive=False)


def best_newton_split(X: np.ndarray, g: np.ndarray, h: np.ndarray,
                      features: np.ndarray, lam: float, gamma: float,
                      min_child_weight: float):
    """Best split by second-order gain.

    gain = 1/2 [G_L^2/(H_L+lam) + G_R^2/(H_R+lam) - G^2/(H+lam)] - gamma,
    admissible only when both children carry Hessian mass of at least
    ``min_child_weight`` and the gain is strictly positive.
    """
    n = len(g)
    if n < 2:
        return None
    order, Xs, boundary = _sorted_columns(X[:, features])
    if not boundary.any():
        return None

    gl = np.cumsum(g[order], axis=0)[:-1]
    hl = np.cumsum(h[order], axis=0)[:-1]
    g_tot, h_tot = g.sum(), h.sum()
    gr = g_tot - gl
    hr = h_tot - hl
    gain = 0.5 * (gl ** 2 / (hl + lam) + gr ** 2 / (hr + lam)
                  - g_tot ** 2 / (h_tot + lam)) - gamma
    bad = (~boundary) | (hl < min_child_weight) | (hr < min_child_weight)
    gain[bad] = -np.inf

    return _pick(gain, Xs, features, require_positive=True)


def _pick(gain, Xs, features, require_positive):
    """First-occurrence argmax over (position, column) with midpoint threshold."""
    per_col_pos = np.argmax(gain, axis=0)            # lowest threshold per column
    per_col_gain = gain[per_col_pos, np.arange(gain.shape[1])]
    col = int(np.argmax(per_col_gain))               # lowest feature index
    best = float(per_col_gain[col])
    if not np.isfinite(best):
        return None
    if require_positive and best <= 0.0:
        return None
    pos = int(per_col_pos[col])
    threshold = 0.5 * (Xs[pos, col] + Xs[pos + 1, col])
    return int(features[col]), float(threshold), best


def grow_classification_tree(X, y, features_per_split=None, rng=None,
                             min_samples_split=2):
    """CART with Gini gain, grown until nodes are pure or too small.

    When ``features_per_split`` is given, that many candidate features are
    drawn without replacement from ``rng`` at every node; otherwise all
    features compete.
    """
    d = X.shape[1]

    def build(idx):
        counts = np.bincount(y[idx], minlength=N_CLASSES)
        if len(idx) < min_samples_split or np.max(counts) == len(idx):
            return Node(counts=counts)
        if features_per_split is None or features_per_split >= d:
            feats = np.arange(d)
        else:
            feats = np.sort(rng.choice(d, size=features_per_split,
                                       replace=False))
        found = best_gini_split(X[idx], y[idx], feats)
        if found is None:
            return Node(counts=counts)
        feature, threshold, _ = found
        mask = X[idx, feature] <= threshold
        if not mask.any() or mask.all():   # threshold rounded onto a value
            return Node(counts=counts)
        return Node(feature=feature, threshold=threshold,
                    left=build(idx[mask]), right=build(idx[~mask]))

    return build(np.arange(len(y)))


def grow_regression_tree(X, g, h, rows, features, max_depth, lam, gamma,
                         min_child_weight, learning_rate):
    """Boosted-round regression tree on the given rows/features.

    Leaf value = -learning_rate * G / (H + lam).
    """

    def build(idx, depth):
        if depth < max_depth and len(idx) >= 2:
            found = best_newton_split(X[idx], g[idx], h[idx], features,
                                      lam, gamma, min_child_weight)
            if found is not None:
                feature, threshold, _ = found
                mask = X[idx, feature] <= threshold
                if mask.any() and not mask.all():
                    return Node(feature=feature, threshold=threshold,
                                left=build(idx[mask], depth + 1),
                                right=build(idx[~mask], depth + 1))
        leaf = -learning_rate * g[idx].sum() / (h[idx].sum() + lam)
        return Node(value=float(leaf))

    return build(np.asarray(rows, dtype=int), 0)


def tree_apply(node: Node, X: np.ndarray):
    """Leaf index per row of X plus the leaf list (preorder numbering)."""
    leaves = []
    out = np.empty(len(X), dtype=int)

    def descend(nd, idx):
        if nd.is_leaf:
            leaves.append(nd)
            out[idx] = len(leaves) - 1
            return
        mask = X[idx, nd.feature] <= nd.threshold
        descend(nd.left, idx[mask])
        descend(nd.right, idx[~mask])

    descend(node, np.arange(len(X)))
    return out, leaves


def tree_class_counts(node: Node, X: np.ndarray) -> np.ndarray:
    """Per-row class-count vectors of the leaves reached by X."""
    which, leaves = tree_apply(node, X)
    table = np.stack([leaf.counts for leaf in leaves]).astype(float)
    return table[which]


def tree_values(node: Node, X: np.ndarray) -> np.ndarray:
    """Per-row additive leaf values of a regression tree."""
    which, leaves = tree_apply(node, X)
    table = np.array([leaf.value for leaf in leaves], dtype=float)
    return table[which]
