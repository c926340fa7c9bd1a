"""Monte-Carlo estimators for tails of randomly weighted sums and ruin.

Replications are cut into fixed blocks of ``rng.BLOCK`` rows.  Block b draws
its increments, weights and stopping times from separate streams keyed by
(seed, b, purpose), and columns are generated left to right, so runs with
different n share the same first columns.  Per-block sums are folded in block
order, which makes the result independent of threading and batching.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..dependence import Independent
from ..dist_core.zoo import Degenerate
from ..errors import InvalidParameter, UnsupportedModel, UnsupportedStructure
from ..rng import INCREMENTS, TAU, WEIGHTS, block_plan, block_rng
from ..weights import ProductIID

Z99 = 2.5758293035489004
MIN_N = 1000
FEW_HITS = 50


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    ci: tuple
    n_samples: int
    seed: int
    batches: int
    hits: int
    flag: str = ""
    estimator: str = "crude"

    @property
    def half_width(self):
        return 0.5 * (self.ci[1] - self.ci[0])


@dataclass
class _Partial:
    total: float
    m2: float        # sum of squared deviations from the block mean
    rows: int
    hits: int

    @classmethod
    def of(cls, v, hits):
        total = math.fsum(v.tolist())
        d = v - total / len(v)
        return cls(total, math.fsum((d * d).tolist()), len(v), int(hits))


def _finish(parts, seed, batches, estimator):
    N = sum(p.rows for p in parts)
    mean = math.fsum(p.total for p in parts) / N
    m2 = math.fsum([p.m2 for p in parts] + [p.rows * (p.total / p.rows - mean) ** 2 for p in parts])
    hits = sum(p.hits for p in parts)
    var = m2 / (N - 1)
    se = math.sqrt(var / N)
    flag = ""
    if estimator == "crude" and hits == 0:
        ci = (0.0, 3.0 / N)
        flag = "rare"
    else:
        ci = (max(mean - Z99 * se, 0.0), min(mean + Z99 * se, 1.0) if estimator == "crude"
              else mean + Z99 * se)
        if hits == 0:
            flag = "rare"
        elif hits < FEW_HITS:
            flag = "few-hits"
    return McEstimate(mean, se, ci, N, int(seed), batches, hits, flag, estimator)


def _run_blocks(block_fn, N, threads=1):
    if N < MIN_N:
        raise InvalidParameter(f"N must be at least {MIN_N}")
    if threads < 1:
        raise InvalidParameter("threads must be at least 1")
    plan = block_plan(N)

    def work(item):
        return _Partial.of(*block_fn(*item))

    if threads == 1:
        parts = [work(it) for it in plan]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, plan))
    return parts, len(plan)


def _tail_or_one(F, thr):
    out = np.asarray(F.tail(thr), dtype=float)
    return np.where(np.isneginf(thr), 1.0, out)


def _default_dep(F, dep):
    return Independent(F) if dep is None else dep


def _draw(dep, proc, n, seed, b, rows):
    X = dep.sample(block_rng(seed, b, INCREMENTS), n, rows)
    W = proc.sample(block_rng(seed, b, WEIGHTS), n, rows)
    return X, W


def _validate(n, x):
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    if not math.isfinite(x):
        raise InvalidParameter("x must be finite")


def _generic(F, dep, proc, n, x, N, seed, estimator, ruin, threads=1):
    _validate(n, x)
    dep = _default_dep(F, dep)
    if estimator not in ("crude", "conditional", "ak"):
        raise InvalidParameter(f"unknown estimator {estimator!r}")
    if estimator != "crude":
        if not dep.independent:
            raise UnsupportedStructure(
                f"{estimator} estimator needs independent increments, got {dep.spec()}")
    F = dep.marginal()
    if estimator == "ak" and isinstance(F, Degenerate):
        raise UnsupportedModel("max-conditioning needs a continuous increment law")

    def block(b, rows):
        X, W = _draw(dep, proc, n, seed, b, rows)
        Z = np.ascontiguousarray(X * W)
        hit = kernels.exceed(Z, float(x), ruin)
        if estimator == "crude":
            return hit.astype(float), hit.sum()
        if estimator == "conditional":
            thr = kernels.last_threshold(Z, W, float(x), ruin)
            return _tail_or_one(F, thr), hit.sum()
        thr = kernels.ak_thresholds(Z, W, float(x), ruin)
        return _tail_or_one(F, thr).sum(axis=1), hit.sum()

    parts, nb = _run_blocks(block, N, threads)
    return _finish(parts, seed, nb, estimator)


def tail_prob_crude(F, dep, proc, n, x, N, seed, threads=1):
    """Fraction of replications with sum_i W_i X_i > x."""
    return _generic(F, dep, proc, n, x, N, seed, "crude", False, threads)


def tail_prob_conditional(F, dep, proc, n, x, N, seed, variant="last", threads=1):
    """Conditional MC: integrate one increment out analytically.

    variant="last" averages tail((x - S_{n-1}) / W_n); variant="ak" sums over
    which term is the largest (max-conditioning), which keeps the relative
    error bounded as x grows.
    """
    est = {"last": "conditional", "ak": "ak"}.get(variant)
    if est is None:
        raise InvalidParameter(f"unknown variant {variant!r}")
    return _generic(F, dep, proc, n, x, N, seed, est, False, threads)


def ruin_prob_mc(F, dep, y_model, n, x, N, seed, estimator="crude", threads=1):
    """P(max_{k<=n} sum_{i<=k} W_i X_i > x) with W_i = Y_1 ... Y_i."""
    lo = y_model.support[0]
    if lo < 0:
        raise InvalidParameter("discount factors need a positive support")
    return _generic(F, dep, ProductIID(y_model), n, x, N, seed, estimator, True, threads)


def stopped_tail_mc(F, dep, proc, tau, x, N, seed, estimator="crude", threads=1):
    """P(sum_{i<=tau} W_i X_i > x) with tau independent of everything else."""
    if tau.kind == "infinite":
        raise InvalidParameter("stopped sums need a finite stopping time")
    if not math.isfinite(x):
        raise InvalidParameter("x must be finite")
    dep = _default_dep(F, dep)
    if estimator not in ("crude", "conditional"):
        raise InvalidParameter(f"unknown estimator {estimator!r}")
    if estimator == "conditional" and not dep.independent:
        raise UnsupportedStructure(f"conditional estimator needs independent increments, got {dep.spec()}")
    F = dep.marginal()
    even = getattr(dep, "zoo_name", "") in ("utai_sum", "nuod_pairwise")

    def block(b, rows):
        t = tau.sample(block_rng(seed, b, TAU), rows)
        n = int(t.max())
        if even and n % 2:
            n += 1
        X, W = _draw(dep, proc, n, seed, b, rows)
        Z = np.ascontiguousarray(X * W)
        hit, thr = kernels.stopped(Z, W, t, float(x))
        if estimator == "crude":
            return hit.astype(float), hit.sum()
        return _tail_or_one(F, thr), hit.sum()

    parts, nb = _run_blocks(block, N, threads)
    return _finish(parts, seed, nb, estimator)
