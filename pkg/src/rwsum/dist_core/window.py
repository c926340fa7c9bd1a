"""Weight windows (f1, f2) and the power / log-power helpers behind them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ..errors import InvalidParameter

E_M1 = math.e - 1.0


def power_fn(exponent):
    """x -> 1 on [0, 1], x**exponent beyond."""
    def f(x):
        xa = np.asarray(x, dtype=float)
        out = np.where(xa > 1.0, np.power(np.maximum(xa, 1.0), exponent), 1.0)
        return float(out) if np.ndim(x) == 0 else out
    f.exponent = exponent
    return f


def log_window_f2(x):
    """x / ln(e - 1 + x) beyond 1, 1 on [0, 1]."""
    xa = np.asarray(x, dtype=float)
    xs = np.maximum(xa, 1.0)
    out = np.where(xa > 1.0, xs / np.log(E_M1 + xs), 1.0)
    return float(out) if np.ndim(x) == 0 else out


def log_window_h(x):
    """x / sqrt(ln(e - 1 + x)) beyond 1: the insensitivity function paired with the log window."""
    xa = np.asarray(x, dtype=float)
    xs = np.maximum(xa, 1.0)
    out = np.where(xa > 1.0, xs / np.sqrt(np.log(E_M1 + xs)), 1.0)
    return float(out) if np.ndim(x) == 0 else out


def log_window_f2_inv(y):
    """Inverse of log_window_f2 on y >= 1 (increasing there)."""
    def one(v):
        if v <= 1.0:
            return 1.0
        hi = v * math.log(E_M1 + v) * 2.0 + 2.0
        return optimize.brentq(lambda x: x / math.log(E_M1 + x) - v, 1.0, hi,
                               xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    ya = np.asarray(y, dtype=float)
    out = np.array([one(float(v)) for v in np.atleast_1d(ya)]).reshape(ya.shape)
    return float(out) if np.ndim(y) == 0 else out


@dataclass(frozen=True)
class WeightWindow:
    """Lower and upper admissible weight bounds f1(x) <= w <= f2(x)."""
    f1: object = field(repr=False)
    f2: object = field(repr=False)
    p: float = 0.0
    gamma: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    kind: str = "power"
    # exponent of f1^{-p}(x) F(-h(x)) / Fbar(x) for two-sided power models
    exponent_108: float | None = None

    def contains(self, lo, hi, x):
        return float(self.f1(x)) <= lo and hi <= float(self.f2(x))


def weight_window(F, p, gamma, gamma1, gamma2):
    """Power-law window for a two-sided regularly varying F.

    Enforces beta^-1 alpha < gamma < 1, 0 < gamma1 < min(1 - gamma, (beta gamma - alpha)/p),
    0 < gamma2 < gamma and p > J+.
    """
    alpha = F.rv_index
    beta = F.left_index
    if alpha is None:
        raise InvalidParameter("weight_window needs a regularly varying model")
    jplus = F.matuszewska[1] if F.matuszewska else alpha
    if not p > jplus:
        raise InvalidParameter(f"p > J+ violated: p={p}, J+={jplus}")
    if beta is None:
        beta = math.inf
    if not alpha / beta < gamma:
        raise InvalidParameter(f"alpha/beta < gamma violated: {alpha / beta} >= {gamma}")
    if not gamma < 1:
        raise InvalidParameter(f"gamma < 1 violated: gamma={gamma}")
    if not gamma1 > 0:
        raise InvalidParameter("gamma1 > 0 violated")
    if not gamma1 < 1 - gamma:
        raise InvalidParameter(f"gamma1 < 1 - gamma violated: gamma1={gamma1} >= {1 - gamma}")
    if math.isfinite(beta) and not gamma1 < (beta * gamma - alpha) / p:
        raise InvalidParameter(
            f"gamma1 < (beta gamma - alpha)/p violated: gamma1={gamma1} >= {(beta * gamma - alpha) / p}")
    if not 0 < gamma2 < gamma:
        raise InvalidParameter(f"0 < gamma2 < gamma violated: gamma2={gamma2}, gamma={gamma}")
    expo = gamma1 * p - beta * gamma + alpha if math.isfinite(beta) else -math.inf
    return WeightWindow(f1=power_fn(-gamma1), f2=power_fn(gamma2), p=p, gamma=gamma,
                        gamma1=gamma1, gamma2=gamma2, kind="power", exponent_108=expo)


def log_window(gamma1=0.1):
    """f2(x) = x / ln(e-1+x) paired with a power-law f1."""
    return WeightWindow(f1=power_fn(-gamma1), f2=log_window_f2, gamma1=gamma1, kind="log")


def capped_window(window, x0):
    """Same window with f2 frozen beyond x0."""
    f2 = window.f2
    cap = float(f2(x0))

    def g(x):
        xa = np.asarray(x, dtype=float)
        out = np.where(xa > x0, cap, f2(np.minimum(xa, x0)))
        return float(out) if np.ndim(x) == 0 else out
    return WeightWindow(f1=window.f1, f2=g, p=window.p, gamma=window.gamma,
                        gamma1=window.gamma1, gamma2=window.gamma2, kind=window.kind + "-capped")
