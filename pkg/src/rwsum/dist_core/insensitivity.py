"""Insensitivity functions h with tail(x + y) ~ tail(x) uniformly in |y| <= h(x)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParameter, MembershipError, UnsupportedModel
from .window import power_fn

DEFAULT_GRID = tuple(10.0 ** k for k in range(2, 9))


def uniform_deviation(model, h, x):
    """max over |y| <= h(x) of |tail(x+y)/tail(x) - 1|.

    The tail is monotone, so the extremes sit at y = -h(x) and y = +h(x).
    """
    xa = np.asarray(x, dtype=float)
    hx = np.asarray(h(xa), dtype=float)
    t = model.tail(xa)
    lo = model.tail(xa - hx) / t
    hi = model.tail(xa + hx) / t
    out = np.maximum(np.abs(lo - 1.0), np.abs(hi - 1.0))
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class InsensitivityFn:
    h: object = field(repr=False)
    mode: str = "H"          # "H" (h(x)/x non-increasing) or "H_hat" (h(x)/x -> 0)
    gamma: float | None = None
    stair: tuple | None = field(default=None, repr=False)

    def __call__(self, x):
        return self.h(x)

    def deviations(self, model, grid=DEFAULT_GRID):
        g = np.asarray(grid, dtype=float)
        return uniform_deviation(model, self.h, g)


def insensitivity_function(model, gamma, grid=DEFAULT_GRID, slack=1e-12):
    """Power-law h(x) = x^gamma (1 below x = 1), with a grid membership check."""
    if not 0.0 < gamma < 1.0:
        raise InvalidParameter(f"gamma must lie in (0, 1), got {gamma}")
    alpha = model.rv_index
    if alpha is None:
        raise UnsupportedModel("insensitivity_function needs a regularly varying model")
    beta = model.left_index
    if beta is not None and not alpha / beta < gamma:
        raise InvalidParameter(f"need alpha/beta < gamma, got {alpha / beta} >= {gamma}")
    h = InsensitivityFn(h=power_fn(gamma), mode="H", gamma=gamma)
    dev = h.deviations(model, grid)
    for k in range(1, len(dev)):
        if dev[k] > dev[k - 1] * (1 + slack) + slack:
            raise MembershipError(f"uniform ratio grows at x={grid[k]:g}", x=grid[k])
    if not dev[-1] < 0.5:
        raise MembershipError(f"uniform ratio deviation {dev[-1]:.3g} at x={grid[-1]:g}", x=grid[-1])
    return h


def _entry_point(model, h, mult, tol, start, stop=1e300, per_decade=40):
    """First log-grid point beyond ``start`` after which the ratio stays in (1-tol, 1+tol)
    and mult*h(x)/x <= tol."""
    k0 = math.log10(start)
    grid = 10.0 ** np.arange(k0, math.log10(stop), 1.0 / per_decade)
    hx = mult * np.asarray(h(grid), dtype=float)
    t = model.tail(grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = model.tail(grid - hx) / t
    ok = (np.abs(r - 1.0) < tol) & (hx / grid <= tol) & (t > 0)
    bad = np.nonzero(~ok)[0]
    if len(bad) == 0:
        return float(grid[0])
    last = bad[-1]
    if last + 1 >= len(grid):
        return None
    return float(grid[last + 1])


def widen_insensitivity(h, model, cap=64):
    """Staircase widening h1 = f h, with f(x_n) = n and f linear in between.

    x_n is the first point where the ratio tail(x - (n+1)h(x))/tail(x) stays
    within 1 +- 1/n and (n+1)h(x)/x <= 1/n, subject to x_{n+1} > 2 x_n.  On
    [x_n, x_{n+1}) we have f <= n+1, which keeps the widened ratio inside
    (1 - 1/n, 1 + 1/n).
    """
    if h.mode != "H":
        raise InvalidParameter("widen_insensitivity expects an H-mode function")
    xs = []
    start = 2.0
    for n in range(1, cap + 1):
        xn = _entry_point(model, h.h, n + 1, 1.0 / n, start)
        if xn is None:
            raise UnsupportedModel(f"ratio check fails at level n={n}; model not long-tailed?")
        if xs and xn <= 2 * xs[-1]:
            xn = 2 * xs[-1] * (1 + 1e-12)
        xs.append(xn)
        start = xn
    xs = np.array(xs)
    levels = np.arange(1, cap + 1, dtype=float)
    hf = h.h

    def f(x):
        xa = np.asarray(x, dtype=float)
        val = np.interp(np.log(np.maximum(xa, 1e-300)), np.log(xs), levels, left=1.0, right=float(cap))
        return val

    def h1(x):
        xa = np.asarray(x, dtype=float)
        out = f(xa) * np.asarray(hf(xa), dtype=float)
        return float(out) if np.ndim(x) == 0 else out

    # interpolation in log x is still monotone and piecewise linear in level
    out = InsensitivityFn(h=h1, mode="H_hat", gamma=h.gamma, stair=tuple(xs))
    grid = 10.0 ** np.arange(3, 11)
    ratio_h = np.asarray(h1(grid)) / np.asarray(hf(grid))
    if np.any(np.diff(ratio_h) < 0):
        raise MembershipError("h1/h is not non-decreasing on the grid")
    rel = np.asarray(h1(grid)) / grid
    if not (rel[-1] < rel[0] and np.all(rel < 1)):
        raise MembershipError("h1(x)/x does not decay on the grid")
    return out
