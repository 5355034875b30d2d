"""Low-dimensional projection of document representations (PCA by power iteration)
and export of the network's penultimate-layer activations."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import numpy as np


def _top_eigenpair(C: np.ndarray, rng: np.random.Generator, tol: float, max_iter: int):
    v = rng.standard_normal(C.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = C @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0, v
        w /= norm
        # align sign to measure convergence
        if w @ v < 0:
            w = -w
        done = np.linalg.norm(w - v) < tol
        v = w
        if done:
            break
    lam = float(v @ C @ v)
    return lam, v


def pca_project(vectors, k: int = 2, seed: int = 0, tol: float = 1e-13,
                max_iter: int = 100_000) -> tuple[np.ndarray, np.ndarray]:
    """Project mean-centred ``vectors`` onto their top-``k`` principal directions.

    Directions come from power iteration with deflation on the covariance
    matrix; each is signed so its largest-magnitude entry is positive.
    Returns (coordinates (N, k), explained variance ratios (k,)).
    """
    X = np.asarray(vectors, dtype=float)
    if X.ndim != 2:
        raise ValueError("vectors must form a 2-d array")
    n, dim = X.shape
    if n < k + 1 or dim < k:
        raise ValueError(f"need at least {k + 1} vectors of dimension >= {k}")
    Xc = X - X.mean(axis=0)
    C = Xc.T @ Xc / (n - 1)
    total = float(np.trace(C))
    if total <= 0.0:
        raise ValueError("input has zero variance")
    rng = np.random.default_rng(seed)
    comps, lams = [], []
    D = C.copy()
    for _ in range(k):
        lam, v = _top_eigenpair(D, rng, tol, max_iter)
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            v = -v
        comps.append(v)
        lams.append(max(lam, 0.0))
        D = D - lam * np.outer(v, v)
    W = np.column_stack(comps)
    return Xc @ W, np.array(lams) / total


def write_projection(path, ids: Sequence[str], labels: Sequence[str], coords: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "label", "x", "y"])
        for i, row in enumerate(coords):
            w.writerow([ids[i], labels[i], repr(float(row[0])), repr(float(row[1]))])


def export_penultimate(model, corpus, lexicons, path) -> np.ndarray:
    """Write ``id,label,d0..d{m-1}`` rows of dense_b activations; returns the matrix."""
    from ..neural.training import prepare

    docs = list(corpus)
    data = prepare(model, docs, lexicons)
    H = model.penultimate_matrix(data)
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["id", "label"] + [f"d{j}" for j in range(H.shape[1])])
            for doc, row in zip(docs, H):
                w.writerow([doc.id, doc.label] + [format(float(np.float32(v)), ".9g") for v in row])
    except OSError as exc:
        raise OSError(f"cannot write penultimate embeddings to {path}: {exc}") from exc
    return H


def read_penultimate(path) -> tuple[list[str], list[str], np.ndarray]:
    ids, labels, rows = [], [], []
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        next(r)
        for rec in r:
            ids.append(rec[0])
            labels.append(rec[1])
            rows.append([float(v) for v in rec[2:]])
    return ids, labels, np.array(rows, dtype=np.float32)
