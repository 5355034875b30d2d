"""Emotion-level views over the (lexicon, emotion) feature coordinates."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np


def emotion_of(name: str) -> str:
    """``"EmoLex:joy"`` -> ``"joy"``; bare emotion names pass through."""
    return name.rsplit(":", 1)[-1]


def aggregate_columns(X: np.ndarray, names: Sequence[str]) -> tuple[np.ndarray, list[str]]:
    """Collapse same-emotion coordinates across lexicons by taking their max.

    Output columns follow the first appearance of each emotion in ``names``.
    """
    groups: dict[str, list[int]] = {}
    for j, n in enumerate(names):
        groups.setdefault(emotion_of(n), []).append(j)
    X = np.asarray(X, dtype=float)
    cols = [X[:, ix].max(axis=1) for ix in groups.values()]
    out = np.column_stack(cols) if cols else np.zeros((X.shape[0], 0))
    return out, list(groups)


def aggregate_weights(weights: Mapping[str, float]) -> dict[str, float]:
    out: dict[str, float] = {}
    for name, w in weights.items():
        e = emotion_of(name)
        out[e] = max(out[e], w) if e in out else w
    return out


def top_n_emotions(coefficients: Mapping[str, Mapping[str, float]], n: int = 3,
                   aggregate: bool = True) -> dict[str, list[str]]:
    """Per class, the ``n`` emotions with the largest signed weight.

    ``coefficients`` maps class -> feature name -> weight. With ``aggregate``
    the lexicon prefix is dropped and same-named emotions keep their largest
    weight. Ties break on emotion name.
    """
    out = {}
    for cls in sorted(coefficients):
        weights = aggregate_weights(coefficients[cls]) if aggregate else dict(coefficients[cls])
        if n > len(weights):
            raise ValueError(f"n={n} exceeds the {len(weights)} available emotions")
        ranked = sorted(weights, key=lambda e: (-weights[e], e))
        out[cls] = ranked[:n]
    return out
