"""Dependent increment vectors and empirical tail-independence estimators."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist_core.base import TailModel
from .dist_core.zoo import ParetoWeight, SumModel, UtaiMarginal
from .errors import InvalidParameter, UndefinedEstimate
from .rng import as_generator, open_uniform

GOLDEN_Q = (3.0 - math.sqrt(5.0)) / 2.0   # (1 - q)^2 = q


class DependenceSpec:
    zoo_name = "dependence"
    independent = False

    def validate_n(self, n):
        if n < 1:
            raise InvalidParameter("n must be at least 1")

    def marginal(self, i=0):
        raise NotImplementedError

    def _draw(self, rng, n, size):
        raise NotImplementedError

    def sample(self, rng, n, size):
        self.validate_n(n)
        return np.ascontiguousarray(self._draw(rng, n, size))

    def spec(self):
        return self.zoo_name

    def __str__(self):
        return self.spec()


@dataclass(frozen=True)
class Independent(DependenceSpec):
    F: TailModel
    zoo_name = "independent"
    independent = True

    def marginal(self, i=0):
        return self.F

    def _draw(self, rng, n, size):
        out = np.empty((size, n))
        for j in range(n):
            out[:, j] = self.F.isf(open_uniform(rng, size))
        return out


@dataclass(frozen=True)
class UtaiSum(DependenceSpec):
    """Pairs X1 = Y1+ + Y2- - Y1- 1{Y2 >= 0}, X2 = Y2 with equal marginals.

    Y1 = +V with probability q and -V otherwise.  Y2 = -V with probability q;
    otherwise Y2 is drawn from the law of B1 V1 + B2 V2 given that not both
    Bernoulli(q) switches are off.  With (1-q)^2 = q this makes the positive
    and negative parts of X1 and X2 agree in law.
    """
    v: TailModel = ParetoWeight(1.0)
    zoo_name = "utai_sum"

    def validate_n(self, n):
        if n < 2 or n % 2:
            raise InvalidParameter("utai_sum needs an even n >= 2")

    def marginal(self, i=0):
        return UtaiMarginal(self.v)

    def spec(self):
        return f"utai_sum(v={self.v.spec()})"

    def _draw(self, rng, n, size):
        q = GOLDEN_Q
        out = np.empty((size, n))
        for p in range(n // 2):
            s1 = open_uniform(rng, size)
            v1 = self.v.isf(open_uniform(rng, size))
            s2 = open_uniform(rng, size)
            mix = open_uniform(rng, size)
            va = self.v.isf(open_uniform(rng, size))
            vb = self.v.isf(open_uniform(rng, size))
            y1 = np.where(s1 < q, v1, -v1)
            pos2 = np.where(mix < 2.0 * q, va, va + vb)
            y2 = np.where(s2 < q, -va, pos2)
            x1 = np.maximum(y1, 0.0) + np.maximum(-y2, 0.0) - np.maximum(-y1, 0.0) * (y2 >= 0)
            out[:, 2 * p] = x1
            out[:, 2 * p + 1] = y2
        return out


@dataclass(frozen=True)
class QuantileAntithetic(DependenceSpec):
    F: TailModel
    zoo_name = "quantile_antithetic"

    def validate_n(self, n):
        if n != 2:
            raise InvalidParameter("quantile_antithetic is defined for n = 2 only")

    def marginal(self, i=0):
        return self.F

    def _draw(self, rng, n, size):
        u = open_uniform(rng, size)
        # isf(U) = F^{<-}(1 - U) without forming 1 - U
        return np.stack([self.F.isf(u), self.F.quantile(u)], axis=1)


@dataclass(frozen=True)
class NuodPairwise(DependenceSpec):
    """X_{2k-1} = V_{2k-1} + U_k, X_{2k} = V_{2k} - U_k with U ~ H, V ~ G."""
    H: TailModel
    G: TailModel
    zoo_name = "nuod_pairwise"

    def validate_n(self, n):
        if n < 2 or n % 2:
            raise InvalidParameter("nuod_pairwise needs an even n >= 2")

    def marginal(self, i=0):
        return SumModel(self.G, self.H)

    def spec(self):
        return f"nuod_pairwise(h={self.H.spec()},g={self.G.spec()})"

    def _draw(self, rng, n, size):
        out = np.empty((size, n))
        for p in range(n // 2):
            v1 = self.G.isf(open_uniform(rng, size))
            v2 = self.G.isf(open_uniform(rng, size))
            u = self.H.isf(open_uniform(rng, size))
            out[:, 2 * p] = v1 + u
            out[:, 2 * p + 1] = v2 - u
        return out


def sample_increments(spec, n, rng, size=None):
    """One increment vector (size=None) or a (size, n) matrix of them."""
    rng = as_generator(rng)
    if size is None:
        return spec.sample(rng, n, 1)[0]
    return spec.sample(rng, n, size)


@dataclass(frozen=True)
class ExceedanceEstimate:
    utai_hat: float
    utai_se: float
    tai_hat: float
    tai_se: float
    count: int


def exceedance_estimators(samples, i, j, x_i, x_j):
    """Empirical P(X_i > x_i | X_j > x_j) and P(|X_i| > x_i | X_j > x_j)."""
    S = np.asarray(samples)
    if S.ndim != 2 or S.shape[0] < 1000:
        raise InvalidParameter("need at least 1000 sample rows")
    cond = S[:, j] > x_j
    c = int(cond.sum())
    if c == 0:
        raise UndefinedEstimate("no conditioning exceedances", count=0)
    xi = S[cond, i]
    u = float(np.count_nonzero(xi > x_i)) / c
    t = float(np.count_nonzero(np.abs(xi) > x_i)) / c
    return ExceedanceEstimate(utai_hat=u, utai_se=math.sqrt(u * (1 - u) / c),
                              tai_hat=t, tai_se=math.sqrt(t * (1 - t) / c), count=c)
