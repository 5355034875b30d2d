"""Forward and backward passes for the network's building blocks.

Sequence inputs are right-padded batches ``(B, T, ...)`` with a boolean
mask ``(B, T)``.  Padded steps sit after every real step, so they never
influence real hidden states, and the attention softmax gives them zero
weight; results per document match an unpadded pass.
"""

from __future__ import annotations

import numpy as np

PROB_EPS = 1e-7


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def activate(z, kind: str):
    if kind == "relu":
        return np.maximum(z, 0)
    if kind == "tanh":
        return np.tanh(z)
    raise ValueError(f"unknown activation {kind!r}")


def activate_grad(z, out, kind: str):
    """Derivative of the activation given its input ``z`` and output ``out``."""
    if kind == "relu":
        return (z > 0).astype(z.dtype)
    return 1.0 - out * out


def softmax(z, axis=-1):
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


# ---------------------------------------------------------------------------
# LSTM

def lstm_forward(x, W, U, b):
    """Run an LSTM over ``x`` of shape (B, T, d) or (T, d); h0 = c0 = 0.

    Gate blocks in W/U/b are ordered input, forget, output, candidate.
    Returns all hidden states and a cache for ``lstm_backward``.
    """
    squeeze = x.ndim == 2
    if squeeze:
        x = x[None]
    B, T, _ = x.shape
    u = U.shape[0]
    h = np.zeros((B, u), dtype=x.dtype)
    c = np.zeros((B, u), dtype=x.dtype)
    H = np.empty((B, T, u), dtype=x.dtype)
    gates = np.empty((B, T, 4 * u), dtype=x.dtype)
    cells = np.empty((B, T, u), dtype=x.dtype)
    # input projection for every step at once
    xW = x @ W + b
    for t in range(T):
        z = xW[:, t] + h @ U
        i = sigmoid(z[:, :u])
        f = sigmoid(z[:, u:2 * u])
        o = sigmoid(z[:, 2 * u:3 * u])
        g = np.tanh(z[:, 3 * u:])
        c = f * c + i * g
        h = o * np.tanh(c)
        gates[:, t, :u], gates[:, t, u:2 * u], gates[:, t, 2 * u:3 * u], gates[:, t, 3 * u:] = i, f, o, g
        cells[:, t] = c
        H[:, t] = h
    cache = (x, H, gates, cells, W, U)
    return (H[0] if squeeze else H), cache


def lstm_backward(dH, cache):
    """Backpropagation through time. Returns (dx, dW, dU, db)."""
    x, H, gates, cells, W, U = cache
    if dH.ndim == 2:
        dH = dH[None]
    B, T, u = H.shape
    dW = np.zeros_like(W)
    dU = np.zeros_like(U)
    db = np.zeros(4 * u, dtype=W.dtype)
    dx = np.empty_like(x)
    dz = np.empty((B, T, 4 * u), dtype=x.dtype)
    dh_next = np.zeros((B, u), dtype=x.dtype)
    dc_next = np.zeros((B, u), dtype=x.dtype)
    for t in range(T - 1, -1, -1):
        g_t = gates[:, t]
        i, f, o, g = g_t[:, :u], g_t[:, u:2 * u], g_t[:, 2 * u:3 * u], g_t[:, 3 * u:]
        c = cells[:, t]
        c_prev = cells[:, t - 1] if t > 0 else np.zeros_like(c)
        tc = np.tanh(c)
        dh = dH[:, t] + dh_next
        dc = dh * o * (1.0 - tc * tc) + dc_next
        dzt = dz[:, t]
        dzt[:, :u] = dc * g * i * (1.0 - i)
        dzt[:, u:2 * u] = dc * c_prev * f * (1.0 - f)
        dzt[:, 2 * u:3 * u] = dh * tc * o * (1.0 - o)
        dzt[:, 3 * u:] = dc * i * (1.0 - g * g)
        dc_next = dc * f
        dh_next = dzt @ U.T
        if t > 0:
            dU += H[:, t - 1].T @ dzt
    dx[:] = dz @ W.T
    dW += np.einsum("btd,btg->dg", x, dz)
    db += dz.sum(axis=(0, 1))
    return dx, dW, dU, db


# ---------------------------------------------------------------------------
# feed-forward attention

def attention_forward(H, w, b, mask=None):
    """Score each state with tanh(w.h + b), softmax over real steps, return the weighted mean.

    ``H`` is (B, T, u) or (T, u). Returns (context, alpha, cache).
    """
    squeeze = H.ndim == 2
    if squeeze:
        H = H[None]
    if mask is None:
        mask = np.ones(H.shape[:2], dtype=bool)
    e = np.tanh(H @ w + b[0])
    scores = np.where(mask, e, -np.inf)
    alpha = softmax(scores, axis=1)
    ctx = np.einsum("bt,btu->bu", alpha, H)
    cache = (H, w, e, alpha)
    if squeeze:
        return ctx[0], alpha[0], cache
    return ctx, alpha, cache


def attention_backward(dctx, cache):
    """Returns (dH, dw, db)."""
    H, w, e, alpha = cache
    if dctx.ndim == 1:
        dctx = dctx[None]
    dalpha = np.einsum("bu,btu->bt", dctx, H)
    ds = alpha * (dalpha - (alpha * dalpha).sum(axis=1, keepdims=True))
    dpre = ds * (1.0 - e * e)
    dH = alpha[:, :, None] * dctx[:, None, :] + dpre[:, :, None] * w
    dw = np.einsum("bt,btu->u", dpre, H)
    db = np.array([dpre.sum()], dtype=w.dtype)
    return dH, dw, db


# ---------------------------------------------------------------------------
# losses

def cross_entropy(probs, targets):
    """Mean negative log-likelihood of integer ``targets``; also returns d(loss)/d(logits).

    Probabilities are clamped to [eps, 1-eps] before the log; a clamped
    entry contributes no gradient.
    """
    B = probs.shape[0]
    p_t = probs[np.arange(B), targets]
    clipped = np.clip(p_t, PROB_EPS, 1.0 - PROB_EPS)
    loss = -np.log(clipped).mean()
    grad = probs.copy()
    grad[np.arange(B), targets] -= 1.0
    live = (p_t >= PROB_EPS) & (p_t <= 1.0 - PROB_EPS)
    grad *= live[:, None]
    return loss, grad / B


def binary_cross_entropy(p, targets):
    """``p`` holds positive-class probabilities (B,), targets are 0/1."""
    y = targets.astype(p.dtype)
    clipped = np.clip(p, PROB_EPS, 1.0 - PROB_EPS)
    loss = -(y * np.log(clipped) + (1 - y) * np.log(1 - clipped)).mean()
    live = (p >= PROB_EPS) & (p <= 1.0 - PROB_EPS)
    grad = (p - y) * live / p.shape[0]
    return loss, grad


def loss(pred, target, mode: str = "softmax_multiclass") -> float:
    """Batch-mean loss for a distribution (or positive-class probability) and targets."""
    pred = np.asarray(pred, dtype=float)
    target = np.atleast_1d(np.asarray(target))
    if mode == "sigmoid_binary":
        return float(binary_cross_entropy(np.atleast_1d(pred), target)[0])
    return float(cross_entropy(np.atleast_2d(pred), target)[0])
