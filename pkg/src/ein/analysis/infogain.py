from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass
class FeatureRanking:
    """(feature, score) pairs, scores non-increasing, ties in name order."""
    items: list[tuple[str, float]]

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.items]

    def score(self, name: str) -> float:
        return dict(self.items)[name]

    def to_dict(self) -> list[dict]:
        return [{"feature": n, "score": s} for n, s in self.items]


def entropy(labels: Sequence) -> float:
    """Shannon entropy in nats."""
    if len(labels) == 0:
        return 0.0
    _, counts = np.unique(np.asarray(labels), return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def discretize(values: np.ndarray, bins: int = 10, strategy: str = "width") -> np.ndarray:
    """Bin indices in [0, bins). ``width``: equal-width over [min, max]; ``frequency``: quantiles."""
    values = np.asarray(values, dtype=float)
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.zeros(len(values), dtype=int)
    if strategy == "width":
        idx = np.floor((values - lo) / (hi - lo) * bins).astype(int)
        return np.minimum(idx, bins - 1)
    if strategy == "frequency":
        edges = np.quantile(values, np.linspace(0, 1, bins + 1)[1:-1])
        return np.searchsorted(np.unique(edges), values, side="right")
    raise ValueError(f"unknown binning strategy {strategy!r}")


def information_gain_1d(values, labels, bins: int = 10, strategy: str = "width") -> float:
    labels = np.asarray(labels)
    values = np.asarray(values, dtype=float)
    if values.max() == values.min():
        return 0.0
    codes = discretize(values, bins, strategy)
    h = entropy(labels)
    cond = 0.0
    n = len(labels)
    for b in np.unique(codes):
        sel = codes == b
        cond += sel.sum() / n * entropy(labels[sel])
    return max(h - cond, 0.0)


def information_gain(features: np.ndarray, labels: Sequence, bins: int = 10,
                     names: Sequence[str] | None = None, strategy: str = "width") -> FeatureRanking:
    """Rank columns of ``features`` by IG(f) = H(labels) - sum_b p(b) H(labels | b)."""
    X = np.asarray(features, dtype=float)
    if X.ndim != 2 or X.shape[0] != len(labels):
        raise ValueError("features must be (n_documents, n_features) aligned with labels")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    names = list(names) if names is not None else [f"f{j}" for j in range(X.shape[1])]
    if len(set(names)) != len(names) or len(names) != X.shape[1]:
        raise ValueError("feature names must be unique and match the column count")
    scores = [(n, information_gain_1d(X[:, j], labels, bins, strategy)) for j, n in enumerate(names)]
    scores.sort(key=lambda item: (-item[1], item[0]))
    return FeatureRanking(scores)
