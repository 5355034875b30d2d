"""Welch's unequal-variance t-test with p-values from the regularized incomplete beta."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

_FPMIN = 1e-300
_EPS = 1e-16
_MAX_ITER = 20000


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = _FPMIN if abs(d) < _FPMIN else d
        c = 1.0 + aa / c
        c = _FPMIN if abs(c) < _FPMIN else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = _FPMIN if abs(d) < _FPMIN else d
        c = 1.0 + aa / c
        c = _FPMIN if abs(c) < _FPMIN else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return betainc(df / 2.0, 0.5, df / (df + t * t))


def _mean_var(xs: Sequence[float]) -> tuple[float, float]:
    n = len(xs)
    m = math.fsum(xs) / n
    v = math.fsum((x - m) ** 2 for x in xs) / (n - 1)
    return m, v


@dataclass
class TTestResult:
    t: float
    p: float
    df: float
    significant_at: dict[float, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"t": self.t, "p": self.p, "df": self.df,
                "significant_at": {str(k): v for k, v in self.significant_at.items()}}


def welch_t_test(sample_a: Sequence[float], sample_b: Sequence[float],
                 alphas: Sequence[float] = (0.05, 0.01)) -> TTestResult:
    """Two-sided Welch t-test of mean(a) - mean(b).

    Two constant samples with equal means give t = 0, p = 1; with different
    means t is infinite and p = 0.
    """
    a = [float(x) for x in sample_a]
    b = [float(x) for x in sample_b]
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least two observations")
    ma, va = _mean_var(a)
    mb, vb = _mean_var(b)
    sa, sb = va / len(a), vb / len(b)
    se2 = sa + sb
    if se2 == 0.0:
        if ma == mb:
            t, p, df = 0.0, 1.0, float(len(a) + len(b) - 2)
        else:
            t, p, df = math.copysign(math.inf, ma - mb), 0.0, float(len(a) + len(b) - 2)
    else:
        t = (ma - mb) / math.sqrt(se2)
        df = se2 * se2 / (sa * sa / (len(a) - 1) + sb * sb / (len(b) - 1))
        p = t_sf_two_sided(t, df)
    return TTestResult(t, p, df, {alpha: p < alpha for alpha in alphas})
