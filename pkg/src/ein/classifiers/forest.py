"""CART trees with gini splits and a bagged random forest built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass
class Tree:
    """Flat array-encoded binary tree. Leaves have feature == -1.

    ``value[i]`` is the class histogram of the training samples reaching node i.
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row (x <= threshold goes left)."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] >= 0
        while active.any():
            n = node[active]
            go_left = X[rows[active], self.feature[n]] <= self.threshold[n]
            node[active] = np.where(go_left, self.left[n], self.right[n])
            active = self.feature[node] >= 0
        return node

    def predict_index(self, X: np.ndarray) -> np.ndarray:
        # argmax takes the first maximum, i.e. the lexicographically smallest class
        return np.argmax(self.value[self.apply(X)], axis=1)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": [float(t) for t in self.threshold],
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(np.array(d["feature"], dtype=np.int64), np.array(d["threshold"], dtype=float),
                   np.array(d["left"], dtype=np.int64), np.array(d["right"], dtype=np.int64),
                   np.array(d["value"], dtype=np.int64).reshape(len(d["feature"]), -1))


_TIE = 1e-9


def _best_split(X, y_onehot, idx, features):
    """Lowest weighted gini over the candidate features, scanning features in index order."""
    n = len(idx)
    total = y_onehot[idx].sum(axis=0)
    best = None
    best_score = math.inf
    for f in features:
        vals = X[idx, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        valid = sv[:-1] < sv[1:]
        if not valid.any():
            continue
        cum = np.cumsum(y_onehot[idx[order]], axis=0)[:-1]
        n_left = np.arange(1, n, dtype=float)
        n_right = n - n_left
        right = total - cum
        # n * weighted gini = n_l - sum(c_l^2)/n_l + n_r - sum(c_r^2)/n_r
        score = (n_left - (cum * cum).sum(axis=1) / n_left
                 + n_right - (right * right).sum(axis=1) / n_right)
        score = np.where(valid, score, math.inf)
        # equal scores can differ in the last bits; the first candidate wins a tie
        low = score.min()
        i = int(np.argmax(score <= low + _TIE * n))
        if score[i] < best_score - _TIE * n:
            best_score = score[i]
            thr = 0.5 * (sv[i] + sv[i + 1])
            if not sv[i] <= thr < sv[i + 1]:
                thr = sv[i]
            best = (f, thr)
    return best


def build_tree(X: np.ndarray, y: np.ndarray, n_classes: int, max_depth: int | None = None,
               max_features: int | None = None, rng: np.random.Generator | None = None,
               min_samples_split: int = 2) -> Tree:
    """Grow a CART tree on integer class targets ``y``.

    With ``max_features`` a fresh random subset of that many features is
    drawn at every node; otherwise all features are considered.
    """
    X = np.asarray(X, dtype=float)
    n_features = X.shape[1]
    y_onehot = np.eye(n_classes, dtype=np.int64)[y]
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(np.bincount(y[idx], minlength=n_classes))
        return len(feature) - 1

    root_idx = np.arange(len(y))
    stack = [(new_node(root_idx), root_idx, 0)]
    while stack:
        node, idx, depth = stack.pop()
        counts = value[node]
        if (np.count_nonzero(counts) <= 1 or len(idx) < min_samples_split
                or (max_depth is not None and depth >= max_depth)):
            continue
        if max_features is None or max_features >= n_features:
            candidates = range(n_features)
        else:
            candidates = np.sort(rng.choice(n_features, size=max_features, replace=False))
        split = _best_split(X, y_onehot, idx, candidates)
        if split is None:
            continue
        f, thr = split
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = int(f), float(thr)
        left[node] = new_node(li)
        right[node] = new_node(ri)
        # push right first so the left subtree is numbered first
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    return Tree(np.array(feature, dtype=np.int64), np.array(threshold), np.array(left, dtype=np.int64),
                np.array(right, dtype=np.int64), np.vstack(value).astype(np.int64))


@dataclass
class RandomForest:
    classes: list[str]
    trees: list[Tree]
    tree_seeds: list[int]
    feature_subsample: int | None
    bootstrap: bool = True
    feature_names: list[str] | None = None
    max_depth: int | None = None

    def votes(self, X) -> np.ndarray:
        """(N, n_classes) vote counts; each row sums to the number of trees."""
        X = np.asarray(X, dtype=float)
        v = np.zeros((X.shape[0], len(self.classes)), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for tree in self.trees:
            v[rows, tree.predict_index(X)] += 1
        return v

    def predict(self, X) -> list[str]:
        return [self.classes[i] for i in np.argmax(self.votes(X), axis=1)]

    def predict_proba(self, X) -> np.ndarray:
        return self.votes(X) / len(self.trees)


def _resolve_subsample(spec, n_features: int) -> int | None:
    if spec is None:
        return None
    if spec == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    spec = int(spec)
    if not 1 <= spec:
        raise ValueError("feature_subsample must be >= 1")
    return min(spec, n_features)


def tree_seeds(seed: int, n_trees: int) -> list[int]:
    """Independent per-tree seeds spawned from the master seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n_trees)]


def train_random_forest(features, labels: Sequence[str], n_trees: int = 100,
                        max_depth: int | None = None, feature_subsample="sqrt", seed: int = 0,
                        bootstrap: bool = True,
                        feature_names: Sequence[str] | None = None) -> RandomForest:
    X = np.asarray(features, dtype=float)
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ValueError("random forest needs at least two classes")
    if X.shape[0] != len(labels):
        raise ValueError("features and labels differ in length")
    y = np.array([classes.index(l) for l in labels], dtype=np.int64)
    k = _resolve_subsample(feature_subsample, X.shape[1])
    seeds = tree_seeds(seed, n_trees)
    trees = []
    for s in seeds:
        rng = np.random.default_rng(s)
        idx = rng.integers(0, len(y), size=len(y)) if bootstrap else np.arange(len(y))
        trees.append(build_tree(X[idx], y[idx], len(classes), max_depth, k, rng))
    return RandomForest(classes, trees, seeds, k, bootstrap,
                        list(feature_names) if feature_names is not None else None, max_depth)


def train_cart(features, labels: Sequence[str], max_depth: int | None = None):
    """A single deterministic CART tree over all features; returns (classes, tree)."""
    X = np.asarray(features, dtype=float)
    classes = sorted(set(labels))
    y = np.array([classes.index(l) for l in labels], dtype=np.int64)
    return classes, build_tree(X, y, len(classes), max_depth)
