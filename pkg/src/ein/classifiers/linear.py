from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse


@dataclass
class LinearModel:
    classes: list[str]
    feature_names: list[str]
    weights: np.ndarray        # (n_classes, n_features)
    bias: np.ndarray           # (n_classes,)
    training: str              # "hinge_ovr" | "multinomial_logistic"

    def decision_function(self, X) -> np.ndarray:
        X = X if sparse.issparse(X) else np.asarray(X, dtype=float)
        return np.asarray(X @ self.weights.T) + self.bias

    def predict(self, X) -> list[str]:
        return [self.classes[i] for i in np.argmax(self.decision_function(X), axis=1)]

    def predict_proba(self, X) -> np.ndarray:
        if self.training != "multinomial_logistic":
            raise ValueError("probabilities are only defined for the logistic model")
        return _softmax(self.decision_function(X))


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _prepare(features, labels, feature_names):
    X = features.tocsr().astype(float) if sparse.issparse(features) else np.asarray(features, dtype=float)
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ValueError("need at least two classes")
    if X.shape[0] != len(labels):
        raise ValueError("features and labels differ in length")
    if not sparse.issparse(X) and not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    names = list(feature_names) if feature_names is not None else [f"f{j}" for j in range(X.shape[1])]
    y = np.array([classes.index(l) for l in labels], dtype=np.int64)
    return X, y, classes, names


def _row(X, i):
    if sparse.issparse(X):
        lo, hi = X.indptr[i], X.indptr[i + 1]
        return X.indices[lo:hi], X.data[lo:hi]
    return slice(None), X[i]


def train_linear_svm(features, labels: Sequence[str], c: float = 1.0, epochs: int = 20,
                     seed: int = 0, feature_names: Sequence[str] | None = None) -> LinearModel:
    """One-vs-rest linear SVM by stochastic subgradient descent.

    Each class minimises ``0.5*||w||^2 + c * sum(hinge)`` (bias unregularised),
    rescaled to ``lam/2*||w||^2 + mean(hinge)`` with ``lam = 1/(c*n)``. Steps
    follow ``1 / (lam * (t0 + t))`` and the returned weights average the
    iterates of the second half of training.
    """
    X, y, classes, names = _prepare(features, labels, feature_names)
    n, F = X.shape
    K = len(classes)
    Y = -np.ones((n, K))
    Y[np.arange(n), y] = 1.0
    lam = 1.0 / (c * n)
    t0 = 1.0 / lam      # first step size close to 1
    rng = np.random.default_rng(seed)
    W = np.zeros((K, F))
    b = np.zeros(K)
    W_sum = np.zeros((K, F))
    b_sum = np.zeros(K)
    n_avg = 0
    t = 0
    avg_from = epochs // 2
    for epoch in range(epochs):
        for i in rng.permutation(n):
            eta = 1.0 / (lam * (t0 + t))
            cols, vals = _row(X, i)
            margin = Y[i] * (W[:, cols] @ vals + b)
            W *= 1.0 - eta * lam
            viol = margin < 1.0
            if viol.any():
                step = eta * Y[i, viol]
                if sparse.issparse(X):
                    W[np.ix_(viol, cols)] += step[:, None] * vals[None, :]
                else:
                    W[viol] += step[:, None] * vals[None, :]
                b[viol] += step
            t += 1
            if epoch >= avg_from:
                W_sum += W
                b_sum += b
                n_avg += 1
    return LinearModel(classes, names, W_sum / n_avg, b_sum / n_avg, "hinge_ovr")


def logistic_loss_and_grad(W: np.ndarray, b: np.ndarray, X, y: np.ndarray, l2: float):
    """Mean multinomial cross-entropy plus ``l2/2 * ||W||^2`` and its gradients."""
    n = X.shape[0]
    P = _softmax(np.asarray(X @ W.T) + b)
    loss = -np.log(np.clip(P[np.arange(n), y], 1e-300, None)).mean() + 0.5 * l2 * (W * W).sum()
    G = P.copy()
    G[np.arange(n), y] -= 1.0
    G /= n
    dW = np.asarray((X.T @ G).T) + l2 * W
    db = G.sum(axis=0)
    return loss, dW, db


def train_logistic_regression(features, labels: Sequence[str], l2: float = 1e-3,
                              epochs: int = 500, seed: int = 0, learning_rate: float = 1.0,
                              feature_names: Sequence[str] | None = None) -> LinearModel:
    """Multinomial logistic regression by full-batch gradient descent.

    The step starts at ``learning_rate`` each epoch and is halved until the
    loss does not increase (Armijo backtracking).
    """
    X, y, classes, names = _prepare(features, labels, feature_names)
    K, F = len(classes), X.shape[1]
    rng = np.random.default_rng(seed)
    W = rng.normal(0.0, 0.01, size=(K, F))
    b = np.zeros(K)
    loss, dW, db = logistic_loss_and_grad(W, b, X, y, l2)
    for _ in range(epochs):
        g2 = (dW * dW).sum() + (db * db).sum()
        if g2 < 1e-20:
            break
        step = learning_rate
        while True:
            W_new, b_new = W - step * dW, b - step * db
            new_loss, new_dW, new_db = logistic_loss_and_grad(W_new, b_new, X, y, l2)
            if new_loss <= loss - 0.5 * step * g2 or step < 1e-12:
                break
            step *= 0.5
        W, b, loss, dW, db = W_new, b_new, new_loss, new_dW, new_db
    return LinearModel(classes, names, W, b, "multinomial_logistic")


def coefficients(model: LinearModel) -> dict[str, dict[str, float]]:
    """class -> feature name -> weight, features in the featurizer's order."""
    return {
        cls: {name: float(model.weights[k, j]) for j, name in enumerate(model.feature_names)}
        for k, cls in enumerate(model.classes)
    }
