"""First-order optimizers operating in place on dicts of numpy arrays."""

from __future__ import annotations

import numpy as np

DEFAULTS = {
    "adam": dict(lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8),
    "rmsprop": dict(lr=1e-3, rho=0.9, eps=1e-8),
    "adadelta": dict(lr=1.0, rho=0.95, eps=1e-6),
}


class Optimizer:
    name = ""

    def __init__(self, **hyper):
        unknown = set(hyper) - set(DEFAULTS[self.name])
        if unknown:
            raise ValueError(f"unknown {self.name} hyper-parameters: {sorted(unknown)}")
        self.hyper = {**DEFAULTS[self.name], **{k: v for k, v in hyper.items() if v is not None}}
        self.state: dict = {"t": 0}

    def step(self, params: dict, grads: dict, frozen: frozenset = frozenset()) -> None:
        self.state["t"] += 1
        for name in sorted(grads):
            if name in frozen:
                continue
            self._update(name, params[name], grads[name])

    def _slot(self, key, like):
        if key not in self.state:
            self.state[key] = np.zeros_like(like)
        return self.state[key]


class Adam(Optimizer):
    name = "adam"

    def _update(self, name, p, g):
        h = self.hyper
        m = self._slot(("m", name), p)
        v = self._slot(("v", name), p)
        t = self.state["t"]
        m *= h["beta1"]
        m += (1 - h["beta1"]) * g
        v *= h["beta2"]
        v += (1 - h["beta2"]) * g * g
        m_hat = m / (1 - h["beta1"] ** t)
        v_hat = v / (1 - h["beta2"] ** t)
        p -= h["lr"] * m_hat / (np.sqrt(v_hat) + h["eps"])


class RMSprop(Optimizer):
    name = "rmsprop"

    def _update(self, name, p, g):
        h = self.hyper
        v = self._slot(("v", name), p)
        v *= h["rho"]
        v += (1 - h["rho"]) * g * g
        p -= h["lr"] * g / (np.sqrt(v) + h["eps"])


class Adadelta(Optimizer):
    name = "adadelta"

    def _update(self, name, p, g):
        h = self.hyper
        acc_g = self._slot(("g2", name), p)
        acc_dx = self._slot(("dx2", name), p)
        acc_g *= h["rho"]
        acc_g += (1 - h["rho"]) * g * g
        dx = g * np.sqrt(acc_dx + h["eps"]) / np.sqrt(acc_g + h["eps"])
        acc_dx *= h["rho"]
        acc_dx += (1 - h["rho"]) * dx * dx
        p -= h["lr"] * dx


_CLASSES = {cls.name: cls for cls in (Adam, RMSprop, Adadelta)}


def make_optimizer(which: str, learning_rate: float | None = None, **hyper) -> Optimizer:
    if which not in _CLASSES:
        raise ValueError(f"unknown optimizer {which!r}")
    if learning_rate is not None:
        hyper["lr"] = learning_rate
    return _CLASSES[which](**hyper)


def optimizer_step(params: dict, grads: dict, state: dict | None, which: str,
                   hyper: dict | None = None) -> tuple[dict, dict]:
    """Functional wrapper: returns updated copies of ``params`` and ``state``."""
    opt = make_optimizer(which, **(hyper or {}))
    if state:
        opt.state = {k: (v.copy() if isinstance(v, np.ndarray) else v) for k, v in state.items()}
    new_params = {k: np.array(v, dtype=float, copy=True) for k, v in params.items()}
    opt.step(new_params, grads)
    return new_params, opt.state
