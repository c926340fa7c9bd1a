"""Base class for one-dimensional tail models.

Subclasses implement ``_tail`` on float arrays and, where a closed form
exists, ``_isf`` / ``_quantile`` / ``_cdf``.  Everything else falls back to
bracketed bisection or quadrature on the quantile transform.
"""
from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy import integrate

from ..errors import DomainError, NumericError
from ..rng import open_uniform

INF = math.inf

BISECT_RTOL = 1e-12
BISECT_MAXIT = 200
QUAD_RTOL = 1e-8


def _ret(x, res):
    """Return a Python float for scalar input, an array otherwise."""
    if np.ndim(x) == 0:
        return float(np.asarray(res).reshape(()))
    return res


def fmt_value(v):
    if isinstance(v, TailModel):
        return v.spec()
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (tuple, list)):
        return "(" + ",".join(fmt_value(e) for e in v) + ("," if len(v) == 1 else "") + ")"
    if isinstance(v, (int, np.integer)):
        return repr(float(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return repr(v)


class TailModel:
    """Analytic description of a real distribution through its tail."""

    zoo_name = "model"
    support = (-INF, INF)

    # metadata; None means unknown / not applicable
    rv_index: float | None = None
    left_index: float | None = None
    matuszewska: tuple | None = None
    moment_index: float | None = None

    @property
    def class_flags(self):
        return {}

    # --- to override -----------------------------------------------------
    def _tail(self, x):
        raise NotImplementedError

    def _cdf(self, x):
        return 1.0 - self._tail(x)

    def _isf(self, s):
        return self._bisect_isf(s)

    def _quantile(self, u):
        return self._bisect_quantile(u)

    # --- public ------------------------------------------------------------
    def tail(self, x):
        xa = np.asarray(x, dtype=float)
        return _ret(x, self._tail(np.atleast_1d(xa)).reshape(xa.shape))

    def cdf(self, x):
        xa = np.asarray(x, dtype=float)
        return _ret(x, self._cdf(np.atleast_1d(xa)).reshape(xa.shape))

    def quantile(self, u):
        """Generalized left inverse inf{x : F(x) >= u}."""
        ua = np.asarray(u, dtype=float)
        if np.any(~((ua > 0) & (ua < 1))):
            raise DomainError("quantile level must lie in (0, 1)")
        return _ret(u, self._quantile(np.atleast_1d(ua)).reshape(ua.shape))

    def isf(self, s):
        """inf{x : tail(x) <= s}, accurate for small s."""
        sa = np.asarray(s, dtype=float)
        if np.any(~((sa > 0) & (sa < 1))):
            raise DomainError("tail level must lie in (0, 1)")
        return _ret(s, self._isf(np.atleast_1d(sa)).reshape(sa.shape))

    def sample(self, rng, size=None):
        # tail-side inversion: isf(U) has law F and resolves the right tail
        u = open_uniform(rng, size)
        return self.isf(u)

    def jump_points(self):
        """Points where the tail (or density) drops by a fixed factor."""
        return None

    # --- moments (positive-support models) --------------------------------
    def moment_finite(self, s):
        """True/False when known analytically, None otherwise."""
        return None

    def moment(self, s):
        fin = self.moment_finite(s)
        if fin is False:
            return INF
        return float(self.partial_moment(s, INF))

    def partial_moment(self, s, upper):
        """E[Y^s 1{Y <= upper}] by quadrature on the quantile transform."""
        ua = np.asarray(upper, dtype=float)
        out = np.array([self._quad_partial(s, float(t)) for t in np.atleast_1d(ua)])
        return _ret(upper, out.reshape(ua.shape))

    def _quad_partial(self, s, upper):
        lo = self.support[0]
        if lo < 0:
            raise DomainError("moments are defined here for positive-support models only")
        if upper <= lo:
            return 0.0
        Fu = float(self.cdf(upper))
        if Fu <= 0.0:
            return 0.0

        def low(w):
            u = 0.5 * math.exp(-w)
            if u <= 0.0:
                return 0.0
            return float(self.quantile(u)) ** s * u

        def high(v):
            t = 0.5 * math.exp(-v)
            if t <= 0.0:
                return 0.0
            return float(self.isf(t)) ** s * t

        total = 0.0
        err = 0.0
        w0 = -math.log(2.0 * min(Fu, 0.5))
        r, e = integrate.quad(low, w0, INF, epsrel=QUAD_RTOL, epsabs=0.0, limit=400)
        total += r
        err += e
        if Fu > 0.5:
            tu = float(self.tail(upper))
            v1 = INF if tu <= 0.0 else -math.log(2.0 * tu)
            r, e = integrate.quad(high, 0.0, v1, epsrel=QUAD_RTOL, epsabs=0.0, limit=400)
            total += r
            err += e
        if not math.isfinite(total):
            raise NumericError("partial moment diverged", achieved=INF)
        if total > 0 and err > 1e-6 * total:
            raise NumericError(f"quadrature did not reach tolerance (rel err {err / total:.2e})",
                               achieved=err / total)
        return total

    # --- generic inverses ---------------------------------------------------
    def _bracket(self):
        lo, hi = self.support
        tlo = math.asinh(lo) if math.isfinite(lo) else -710.0
        thi = math.asinh(hi) if math.isfinite(hi) else 710.0
        return tlo, thi

    def _bisect(self, target, pred):
        """Smallest x with pred(x, target) true, pred monotone in x."""
        target = np.asarray(target, dtype=float)
        tlo, thi = self._bracket()
        lo = np.full(target.shape, tlo)
        hi = np.full(target.shape, thi)
        xlo = np.sinh(lo)
        at_lo = pred(xlo, target)
        for _ in range(BISECT_MAXIT):
            xl = np.sinh(lo)
            xh = np.sinh(hi)
            with np.errstate(over="ignore"):
                active = (xh - xl) > BISECT_RTOL * np.maximum(np.abs(xh), 1e-300)
            if not active.any():
                break
            mid = 0.5 * (lo + hi)
            ok = pred(np.sinh(mid), target)
            hi = np.where(active & ok, mid, hi)
            lo = np.where(active & ~ok, mid, lo)
        res = np.sinh(hi)
        return np.where(at_lo, xlo, res)

    def _bisect_isf(self, s):
        return self._bisect(s, lambda x, t: self._tail(x) <= t)

    def _bisect_quantile(self, u):
        return self._bisect(u, lambda x, t: self._cdf(x) >= t)

    # --- identity -------------------------------------------------------------
    def params(self):
        if dataclasses.is_dataclass(self):
            return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
                    if f.repr and getattr(self, f.name) is not None}
        return {}

    def spec(self):
        args = ",".join(f"{k}={fmt_value(v)}" for k, v in self.params().items())
        return f"{self.zoo_name}({args})"

    def __str__(self):
        return self.spec()
