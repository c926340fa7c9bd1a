"""Ratio tables: left-hand side estimate over asymptotic right-hand side."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import asymptotics as asy
from ..dependence import Independent, NuodPairwise
from ..dist_core.zoo import Scaled
from ..errors import RwsumError, UnsupportedStructure
from ..weights import FixedVector, ProductIID, resolve_weights
from .estimators import (McEstimate, ruin_prob_mc, stopped_tail_mc, tail_prob_conditional,
                         tail_prob_crude)
from .oracle import convolution_oracle

ESTIMATORS = ("auto", "oracle", "crude", "conditional", "ak")


@dataclass(frozen=True)
class RatioRow:
    x: float
    n: int
    lhs: float
    stderr: float
    ci_lo: float
    ci_hi: float
    rhs: float
    ratio: float
    flag: str = ""
    source: str = ""

    @property
    def rel_half_width(self):
        return 0.5 * (self.ci_hi - self.ci_lo) / self.rhs


@dataclass
class RatioTable:
    rows: list
    f3: dict = field(default_factory=dict)
    tolerance: float = 0.05

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: (r.x, r.n))

    def __len__(self):
        return len(self.rows)

    def select(self, n=None, x=None):
        return [r for r in self.rows if (n is None or r.n == n) and (x is None or r.x == x)]

    def ratios(self, n):
        return np.array([r.ratio for r in self.select(n=n)])


@dataclass(frozen=True)
class RatioConfig:
    """What ratio_table needs; the harness builds this from an ExperimentConfig."""
    F: object
    x_grid: tuple
    n_list: tuple
    dep: object = None
    weights: object = None          # WeightProcess; default unit weights
    estimator: str = "auto"
    N: int = 100_000
    seed: int = 0
    tolerance: float = 0.05
    grid_n: int = 1 << 15
    threads: int = 1


def _row_from_mc(x, n, est: McEstimate, rhs, source):
    ratio = est.mean / rhs if rhs > 0 else math.nan
    return RatioRow(float(x), int(n), float(est.mean), float(est.stderr), float(est.ci[0]),
                    float(est.ci[1]), float(rhs), float(ratio), est.flag, source)


def _row_from_value(x, n, value, err, rhs, source):
    ratio = value / rhs if rhs > 0 else math.nan
    value, err = float(value), float(err)
    return RatioRow(float(x), int(n), value, err, value - err, value + err, float(rhs),
                    float(ratio), "", source)


def _error_row(x, n, exc):
    nan = math.nan
    return RatioRow(float(x), int(n), nan, nan, nan, nan, nan, nan,
                    f"error:{type(exc).__name__}", "")


def oracle_lhs(dep, proc, n, x, grid_n=1 << 15):
    """Deterministic P(sum w_i X_i > x) where a one- or two-term convolution applies.

    Returns (value, error bound) or raises UnsupportedStructure.
    """
    if not isinstance(proc, FixedVector):
        raise UnsupportedStructure("oracle needs fixed weights")
    w = proc.w[:n]
    if len(w) < n:
        raise UnsupportedStructure(f"fixed vector shorter than n={n}")
    if n == 1:
        return float(dep.marginal().tail(x / w[0])), 0.0
    if n != 2:
        raise UnsupportedStructure("oracle covers n <= 2")
    if isinstance(dep, Independent):
        A, B = Scaled(dep.F, w[0]), Scaled(dep.F, w[1])
    elif isinstance(dep, NuodPairwise) and w[0] == w[1]:
        # the shared U cancels: X1 + X2 = V1 + V2
        A = B = Scaled(dep.G, w[0])
    else:
        raise UnsupportedStructure(f"no oracle for {dep.spec()} with these weights")
    return convolution_oracle(A, B, x, grid_n=grid_n, return_error=True)


def sum_rhs(F, proc, n, x):
    """sum_i P(W_i X > x): exact for fixed weights, quadrature otherwise."""
    if isinstance(proc, FixedVector):
        return asy.fixed_weight_rhs(F, proc.w[:n], x)
    vals, _, _ = asy.random_weight_tails(F, proc, n, x)
    return math.fsum(vals.tolist())


def _lhs(cfg, dep, proc, n, x):
    est = cfg.estimator
    if est in ("auto", "oracle"):
        try:
            v, e = oracle_lhs(dep, proc, n, x, cfg.grid_n)
            return ("value", v, e, "oracle")
        except UnsupportedStructure:
            if est == "oracle":
                raise
            est = "ak" if dep.independent else "crude"
    if est == "crude":
        r = tail_prob_crude(cfg.F, dep, proc, n, x, cfg.N, cfg.seed, cfg.threads)
    else:
        variant = "ak" if est == "ak" else "last"
        r = tail_prob_conditional(cfg.F, dep, proc, n, x, cfg.N, cfg.seed, variant, cfg.threads)
    return ("mc", r, None, r.estimator)


def f3_scan(table, tolerance):
    """For each x the largest n such that every listed n' <= n has |ratio - 1| <= tol."""
    out = {}
    for x in sorted({r.x for r in table.rows}):
        best = 0
        for r in table.select(x=x):
            if not (abs(r.ratio - 1.0) <= tolerance):
                break
            best = r.n
        out[x] = best
    return out


def ratio_table(cfg: RatioConfig) -> RatioTable:
    dep = cfg.dep if cfg.dep is not None else Independent(cfg.F)
    F = dep.marginal()
    nmax = max(cfg.n_list)
    rows = []
    for x in cfg.x_grid:
        for n in cfg.n_list:
            base = cfg.weights if cfg.weights is not None else FixedVector((1.0,) * nmax)
            proc = resolve_weights(base, float(x), nmax)
            try:
                rhs = sum_rhs(F, proc, n, float(x))
                kind, a, b, src = _lhs(cfg, dep, proc, n, float(x))
                if kind == "value":
                    rows.append(_row_from_value(x, n, a, b, rhs, src))
                else:
                    rows.append(_row_from_mc(x, n, a, rhs, src))
            except RwsumError as exc:
                rows.append(_error_row(x, n, exc))
    table = RatioTable(rows, tolerance=cfg.tolerance)
    table.f3 = f3_scan(table, cfg.tolerance)
    return table


def ruin_table(F, dep, G, x_grid, n_list, N, seed, estimator="ak", case=None, window=None,
               form="rv", threads=1):
    """psi(x; n) by simulation against the finite-time approximation."""
    dep = dep if dep is not None else Independent(F)
    F = dep.marginal()
    if case is None:
        case = asy.case_classifier(G, F.rv_index)
    rows = []
    for x in x_grid:
        for n in n_list:
            try:
                rhs = asy.ruin_approx_finite(F, G, window, case, n, float(x), form=form).value
                est = ruin_prob_mc(F, dep, G, n, float(x), N, seed, estimator, threads)
                rows.append(_row_from_mc(x, n, est, rhs, est.estimator))
            except RwsumError as exc:
                rows.append(_error_row(x, n, exc))
    return RatioTable(rows)


def stopped_table(F, dep, G, tau, x_grid, N, seed, estimator="conditional", form="rv",
                  case=None, window=None, threads=1):
    dep = dep if dep is not None else Independent(F)
    F = dep.marginal()
    rows = []
    for x in x_grid:
        try:
            rhs = asy.stopped_sum_approx(F, G, tau, float(x), form=form, case=case,
                                         window=window).value
            est = stopped_tail_mc(F, dep, ProductIID(G), tau, float(x), N, seed, estimator, threads)
            rows.append(_row_from_mc(x, tau.n_max, est, rhs, est.estimator))
        except RwsumError as exc:
            rows.append(_error_row(x, tau.n_max, exc))
    return RatioTable(rows)


def breiman_table(F, G, x_grid, n_list, case=None, window=None):
    """Quadrature H_n(x) against the extended Breiman asymptote."""
    alpha = F.rv_index
    if case is None:
        case = asy.case_classifier(G, alpha)
    I = None
    if str(case) == "Case3" and window is not None:
        from ..weights import TruncatedMoment
        I = TruncatedMoment(G, alpha, window.f2)
    nmax = max(n_list)
    rows = []
    for x in x_grid:
        try:
            vals, tol, src = asy.random_weight_tails(F, ProductIID(G), nmax, float(x))
        except RwsumError as exc:
            rows.extend(_error_row(x, n, exc) for n in n_list)
            continue
        for n in n_list:
            try:
                rhs = asy.breiman_tail(F, G, case, I, n, float(x))
                v = float(vals[n - 1])
                rows.append(_row_from_value(x, n, v, tol * v, rhs, src))
            except RwsumError as exc:
                rows.append(_error_row(x, n, exc))
    return RatioTable(rows)
