"""Numerical class-membership diagnostics for a tail model."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ClassReport:
    long_tail: list            # (x, tail(x+1)/tail(x))
    dominated: list            # (x, tail(x/2)/tail(x))
    rv_fit: tuple              # (slope, stderr)
    potter: dict
    step_ratio: float | None   # limsup of tail(y_i - 1)/tail(y_i) at jump points
    flags: dict
    notes: list = field(default_factory=list)


def _rv_fit(model, lo, hi, points=61):
    x = np.geomspace(lo, hi, points)
    t = model.tail(x)
    keep = t > 0
    if keep.sum() < 3:
        return (math.nan, math.nan)
    lx, lt = np.log(x[keep]), np.log(t[keep])
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, *_ = np.linalg.lstsq(A, lt, rcond=None)
    resid = lt - A @ coef
    dof = max(len(lx) - 2, 1)
    s2 = float(resid @ resid) / dof
    se = math.sqrt(s2 / float(((lx - lx.mean()) ** 2).sum()))
    return (-float(coef[0]), se)


def potter_constants(model, p, grid):
    """Smallest C1 with tail(y)/tail(x) <= C1 (x/y)^p for all grid pairs x >= y >= C2."""
    g = np.asarray(grid, dtype=float)
    t = model.tail(g)
    best = None
    for k in range(len(g) - 1):
        y, ty = g[k:], t[k:]
        # pairs (x >= y) among the remaining grid
        ratio = ty[:, None] / ty[None, :] * (y[:, None] / y[None, :]) ** p
        mask = y[None, :] >= y[:, None]
        with np.errstate(invalid="ignore"):
            c1 = float(np.max(np.where(mask, ratio, 0.0)))
        if math.isfinite(c1):
            best = (c1, float(g[k]))
            break
    if best is None:
        return {"p": p, "C1": math.inf, "C2": math.nan, "ok": False}
    return {"p": p, "C1": best[0], "C2": best[1], "ok": True}


def class_diagnostics(model, p=None, lo=1e2, hi=1e8, per_decade=4, lt_tol=0.01):
    decades = math.log10(hi / lo)
    grid = np.geomspace(lo, hi, int(round(decades * per_decade)) + 1)
    t = model.tail(grid)
    lt = model.tail(grid + 1.0) / t
    dv = model.tail(grid / 2.0) / t
    notes = []
    slope = _rv_fit(model, lo, hi)

    step = None
    jumps = model.jump_points()
    probe_ratios = list(lt[len(lt) // 2:])
    if jumps is not None:
        js = jumps[(jumps > lo) & (jumps < hi)]
        if len(js):
            r = model.tail(js - 1.0) / model.tail(js)
            step = float(np.max(r[len(r) // 2:]))
            probe_ratios.extend(r[len(r) // 2:])
            notes.append("step ratio measured at the right ends of the flat pieces")
    in_L = bool(np.max(np.abs(np.asarray(probe_ratios) - 1.0)) <= lt_tol)
    in_D = bool(np.all(np.isfinite(dv)))
    in_R = bool(math.isfinite(slope[0]) and slope[1] < 0.01 and in_L)
    if p is None:
        mat = model.matuszewska
        p = (mat[1] if mat else slope[0]) + 0.5
    potter = potter_constants(model, p, grid)
    if not potter["ok"]:
        notes.append("potter bound violated or inconclusive")
    return ClassReport(long_tail=list(zip(grid.tolist(), lt.tolist())),
                       dominated=list(zip(grid.tolist(), dv.tolist())),
                       rv_fit=slope, potter=potter, step_ratio=step,
                       flags={"in_L": in_L, "in_D": in_D, "in_R": in_R}, notes=notes)
