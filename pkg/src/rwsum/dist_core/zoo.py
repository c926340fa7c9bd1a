"""Concrete tail models."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ..errors import InvalidParameter
from .base import INF, TailModel, _ret
from .window import E_M1, log_window_f2, log_window_f2_inv


def _check(cond, msg):
    if not cond:
        raise InvalidParameter(msg)


# ---------------------------------------------------------------------------
# two-sided power tails

class _TwoSidedPower(TailModel):
    """Tail 1/2 x^-a on (1, inf), flat 1/2 on [-1, 1], left tail 1/2 |x|^-b."""

    def _ab(self):
        raise NotImplementedError

    def _tail(self, x):
        a, b = self._ab()
        ax = np.maximum(np.abs(x), 1.0)
        return np.where(x > 1.0, 0.5 * ax ** -a,
                        np.where(x < -1.0, 1.0 - 0.5 * ax ** -b, 0.5))

    def _cdf(self, x):
        a, b = self._ab()
        ax = np.maximum(np.abs(x), 1.0)
        return np.where(x < -1.0, 0.5 * ax ** -b,
                        np.where(x > 1.0, 1.0 - 0.5 * ax ** -a, 0.5))

    def _quantile(self, u):
        a, b = self._ab()
        lo = -(2.0 * np.minimum(u, 0.5)) ** (-1.0 / b)
        hi = (2.0 * (1.0 - np.maximum(u, 0.5))) ** (-1.0 / a)
        with np.errstate(divide="ignore"):
            return np.where(u < 0.5, lo, np.where(u > 0.5, hi, -1.0))

    def _isf(self, s):
        a, b = self._ab()
        right = (2.0 * np.minimum(s, 0.5)) ** (-1.0 / a)
        left = -(2.0 * (1.0 - np.maximum(s, 0.5))) ** (-1.0 / b)
        return np.where(s < 0.5, right, np.where(s > 0.5, left, -1.0))

    @property
    def class_flags(self):
        return {"in_L": True, "in_D": True, "in_R": True}


@dataclass(frozen=True)
class TwoSidedPareto(_TwoSidedPower):
    alpha: float
    beta: float
    zoo_name = "two_sided_pareto"

    def __post_init__(self):
        _check(self.alpha > 0, "alpha must be positive")
        _check(self.beta > self.alpha, "two_sided_pareto requires alpha < beta")

    def _ab(self):
        return self.alpha, self.beta

    rv_index = property(lambda self: self.alpha)
    left_index = property(lambda self: self.beta)
    matuszewska = property(lambda self: (self.alpha, self.alpha))
    moment_index = property(lambda self: self.alpha)


@dataclass(frozen=True)
class SymmetricPareto(_TwoSidedPower):
    beta: float
    zoo_name = "symmetric_pareto"

    def __post_init__(self):
        _check(self.beta > 0, "beta must be positive")

    def _ab(self):
        return self.beta, self.beta

    rv_index = property(lambda self: self.beta)
    left_index = property(lambda self: self.beta)
    matuszewska = property(lambda self: (self.beta, self.beta))
    moment_index = property(lambda self: self.beta)


# ---------------------------------------------------------------------------
# positive weight models

@dataclass(frozen=True)
class ParetoWeight(TailModel):
    theta: float
    c: float = 1.0
    zoo_name = "pareto"

    def __post_init__(self):
        _check(self.theta > 0, "theta must be positive")
        _check(self.c > 0, "scale c must be positive")

    support = property(lambda self: (self.c, INF))
    rv_index = property(lambda self: self.theta)
    matuszewska = property(lambda self: (self.theta, self.theta))
    moment_index = property(lambda self: self.theta)

    @property
    def class_flags(self):
        return {"in_L": True, "in_D": True, "in_R": True}

    def _tail(self, x):
        return np.where(x > self.c, (np.maximum(x, self.c) / self.c) ** -self.theta, 1.0)

    def _isf(self, s):
        return self.c * s ** (-1.0 / self.theta)

    def _quantile(self, u):
        # -expm1(log1p(-u)) keeps 1-u exact enough for tiny u
        return self.c * np.exp(-np.log1p(-u) / self.theta)

    def moment_finite(self, s):
        return s < self.theta

    def moment(self, s):
        if s >= self.theta:
            return INF
        return self.c ** s * self.theta / (self.theta - s)

    def partial_moment(self, s, upper):
        T = np.asarray(upper, dtype=float)
        th, c = self.theta, self.c
        r = np.maximum(T, c) / c
        if s == th:
            val = th * c ** s * np.log(r)
        else:
            val = c ** s * th / (th - s) * (1.0 - r ** (s - th))
        val = np.where(T <= c, 0.0, val)
        return _ret(upper, val)


class _PowerLog(TailModel):
    """tail(x) = x^-a ln^-k(e-1+x) on x > 1, 1 below."""

    support = (1.0, INF)

    def _ak(self):
        raise NotImplementedError

    def _tail(self, x):
        a, k = self._ak()
        xs = np.maximum(x, 1.0)
        with np.errstate(over="ignore"):
            val = xs ** -a * np.log(E_M1 + xs) ** -k
        return np.where(x > 1.0, val, 1.0)

    def _isf(self, s):
        a, k = self._ak()
        c = np.log(s)

        def lnl(t):
            # ln(e - 1 + e^t) for t >= 0
            return t + np.log1p(E_M1 * np.exp(-t))

        def phi(t):
            return -a * t - k * np.log(lnl(t)) - c

        def dphi(t):
            return -a - k / ((1.0 + E_M1 * np.exp(-t)) * lnl(t))

        lo = np.zeros_like(c)
        hi = -c / a
        t = hi.copy()
        for _ in range(200):
            f = phi(t)
            lo = np.where(f > 0, t, lo)
            hi = np.where(f <= 0, t, hi)
            tn = t - f / dphi(t)
            bad = ~((tn > lo) & (tn < hi))
            tn = np.where(bad, 0.5 * (lo + hi), tn)
            done = np.abs(tn - t) <= 1e-15 * np.maximum(1.0, np.abs(t))
            t = tn
            if done.all():
                break
        return np.exp(t)

    def _quantile(self, u):
        return self._isf(1.0 - u)

    def moment_finite(self, s):
        a, k = self._ak()
        if s < a:
            return True
        if s > a:
            return False
        return k > 1

    def _log_integral(self, s, tmax):
        """s * int_0^tmax e^{(s-a)t} ln^-k(e-1+e^t) dt."""
        a, k = self._ak()

        def g(t):
            return math.exp((s - a) * t) * (t + math.log1p(E_M1 * math.exp(-t))) ** -k

        if tmax <= 0:
            return 0.0
        if s == a and not math.isfinite(tmax):
            # polynomial tail: integrate to 50 and close with t^-k asymptotics
            head, _ = integrate.quad(g, 0.0, 50.0, epsrel=1e-10, limit=400)
            tail, _ = integrate.quad(g, 50.0, 1e6, epsrel=1e-10, limit=400)
            return s * (head + tail + 1e6 ** (1 - k) / (k - 1))
        # split at the points where the log factor changes character
        pts = [p for p in (1.0, 5.0, 20.0, 100.0) if p < tmax]
        edges = [0.0] + pts + [tmax]
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            r, _ = integrate.quad(g, lo, hi, epsrel=1e-11, epsabs=0.0, limit=400)
            total += r
        return s * total

    def partial_moment(self, s, upper):
        """Integration by parts: 1 - T^s tail(T) + s int_0^{ln T} e^{st} tail(e^t) dt."""
        ua = np.atleast_1d(np.asarray(upper, dtype=float))
        out = np.empty(ua.shape)
        for j, T in enumerate(ua):
            if T <= 1.0:
                out[j] = 0.0
                continue
            if not math.isfinite(T):
                if not self.moment_finite(s):
                    out[j] = INF
                    continue
                out[j] = 1.0 + self._log_integral(s, INF)
                continue
            boundary = T ** s * float(self._tail(np.array([T]))[0])
            out[j] = 1.0 - boundary + self._log_integral(s, math.log(T))
        return _ret(upper, out.reshape(np.shape(upper)))

    def moment(self, s):
        if not self.moment_finite(s):
            return INF
        return float(self.partial_moment(s, INF))


@dataclass(frozen=True)
class LogPerturbedPareto(_PowerLog):
    alpha: float
    kappa: float = 1.0
    zoo_name = "log_perturbed_pareto"

    def __post_init__(self):
        _check(self.alpha > 0, "alpha must be positive")
        _check(self.kappa >= 0, "kappa must be non-negative")

    def _ak(self):
        return self.alpha, self.kappa

    rv_index = property(lambda self: self.alpha)
    matuszewska = property(lambda self: (self.alpha, self.alpha))
    moment_index = property(lambda self: self.alpha)

    @property
    def class_flags(self):
        return {"in_L": True, "in_D": True, "in_R": True}


@dataclass(frozen=True)
class InversePowerLog(_PowerLog):
    rho: float
    zoo_name = "inverse_power_log"

    def __post_init__(self):
        _check(self.rho > 1, "inverse_power_log requires rho > 1")

    def _ak(self):
        return self.rho, 2.0

    def _tail(self, x):
        # closed at 1: tail(1) = 1 either way since ln(e) = 1
        return super()._tail(x)

    rv_index = property(lambda self: self.rho)
    matuszewska = property(lambda self: (self.rho, self.rho))
    moment_index = property(lambda self: self.rho)

    @property
    def class_flags(self):
        return {"in_L": True, "in_D": True, "in_R": True}


# ---------------------------------------------------------------------------
# oscillating constructions

def _staircase(alpha, a, x1):
    r = a ** (1.0 / (alpha + 1.0))
    if x1 is None:
        x1 = max(2.0, 2.0 / (r - 1.0))
    xs = []
    x = x1
    while x * r < 1e300:
        xs.append(x)
        x = 2.0 * r * x
    xs = np.array(xs)
    return xs, xs * r, x1


@dataclass(frozen=True)
class OscillatingTail(TailModel):
    """x^(-alpha-1) with flat steps on [x_i, y_i), y_i = a^(1/(alpha+1)) x_i, x_{i+1} = 2 y_i."""
    alpha: float
    a: float
    x1: float | None = None
    _xs: np.ndarray = field(init=False, repr=False, compare=False)
    _ys: np.ndarray = field(init=False, repr=False, compare=False)
    zoo_name = "oscillating"
    support = (1.0, INF)

    def __post_init__(self):
        _check(self.alpha > 0, "alpha must be positive")
        _check(self.a > 1, "staircase ratio a must exceed 1")
        xs, ys, x1 = _staircase(self.alpha, self.a, self.x1)
        _check(ys[0] - xs[0] > 1, "x1 too small: need y1 - x1 > 1")
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_ys", ys)

    matuszewska = property(lambda self: (self.alpha + 1.0, self.alpha + 1.0))
    moment_index = property(lambda self: self.alpha + 1.0)

    @property
    def class_flags(self):
        return {"in_L": False, "in_D": True, "in_R": False}

    @property
    def breakpoints(self):
        return self._xs, self._ys

    def _base(self, x):
        return np.where(x > 1.0, np.maximum(x, 1.0) ** (-self.alpha - 1.0), 1.0)

    def _tail(self, x):
        i = np.searchsorted(self._xs, x, side="right") - 1
        ic = np.clip(i, 0, len(self._xs) - 1)
        flat = (i >= 0) & (x < self._ys[ic])
        return np.where(flat, self._base(self._xs[ic]), self._base(x))

    def _isf(self, s):
        xb = s ** (-1.0 / (self.alpha + 1.0))
        i = np.searchsorted(self._xs, xb, side="right") - 1
        ic = np.clip(i, 0, len(self._xs) - 1)
        inside = (i >= 0) & (xb < self._ys[ic])
        step = self._base(self._xs[ic]) > s
        return np.where(inside & step, self._ys[ic], xb)

    def _quantile(self, u):
        return self._isf(1.0 - u)

    def jump_points(self):
        return self._ys.copy()

    def __hash__(self):
        return hash((self.zoo_name, self.alpha, self.a, self.x1))

    def __eq__(self, other):
        return type(other) is type(self) and (self.alpha, self.a, self.x1) == (other.alpha, other.a, other.x1)


@dataclass(frozen=True)
class IntegratedOscillatingTail(TailModel):
    """Integrated-tail law built from the staircase with linear links.

    Start from the staircase tail g02, replace it on [f2(u_i - b/2), y_i] by the
    straight line joining g02(x_i) and g02(y_i + 0), where f2(u_i) = y_i and
    f2 = x / ln(e-1+x).  The resulting continuous g03 is normalized and
    integrated: tail(x) = int_x^inf g03 / int_1^inf g03.
    """
    alpha: float
    a: float
    b: float = 1.0
    x1: float | None = None
    _pieces: tuple = field(init=False, repr=False, compare=False)
    zoo_name = "integrated_oscillating"
    support = (1.0, INF)

    def __post_init__(self):
        _check(0 < self.alpha, "alpha must be positive")
        _check(self.a > 1, "a must exceed 1")
        _check(self.b > 0, "b must be positive")
        xs, ys, _ = _staircase(self.alpha, self.a, self.x1)
        _check(ys[0] - xs[0] > 1, "x1 too small: need y1 - x1 > 1")
        keep = ys < 1e12
        xs, ys = xs[keep], ys[keep]
        us = log_window_f2_inv(ys)
        ls = log_window_f2(us - 0.5 * self.b)
        if np.any(ls <= xs):
            raise InvalidParameter("link start falls before x_i; increase x1 or decrease b")
        p = -self.alpha - 1.0
        # pieces: (lo, hi, kind, A, B) with g03 = y^p (kind 0), const A (1), A + B y (2)
        lo, hi, kind, A, B = [], [], [], [], []

        def add(l, h, k, aa=0.0, bb=0.0):
            if h > l:
                lo.append(l); hi.append(h); kind.append(k); A.append(aa); B.append(bb)

        add(1.0, xs[0], 0)
        for i in range(len(xs)):
            gx = xs[i] ** p
            gy = ys[i] ** p
            add(xs[i], ls[i], 1, gx)
            slope = (gy - gx) / (ys[i] - ls[i])
            add(ls[i], ys[i], 2, gx - slope * ls[i], slope)
            nxt = xs[i + 1] if i + 1 < len(xs) else INF
            add(ys[i], nxt, 0)
        lo, hi = np.array(lo), np.array(hi)
        kind, A, B = np.array(kind), np.array(A), np.array(B)
        mass = self._piece_moment(0.0, lo, hi, kind, A, B)
        # suffix sums give accurate tails far out
        suffix = np.concatenate([np.cumsum(mass[::-1])[::-1], [0.0]])
        object.__setattr__(self, "_pieces", (lo, hi, kind, A, B, suffix, xs, ys, ls, us))

    @property
    def norm(self):
        return self._pieces[5][0]

    moment_index = property(lambda self: self.alpha)
    matuszewska = property(lambda self: (self.alpha, self.alpha))

    @property
    def class_flags(self):
        return {"in_L": True, "in_D": True, "in_R": False}

    def _piece_moment(self, s, lo, hi, kind, A, B):
        """int_lo^hi y^s g03(y) dy, piecewise closed forms."""
        p = -self.alpha - 1.0
        out = np.zeros(lo.shape)
        hi_f = np.where(np.isfinite(hi), hi, 1.0)
        e = s + p + 1.0
        m0 = kind == 0
        if e == 0:
            v0 = np.log(hi_f / lo)
        else:
            with np.errstate(over="ignore"):
                v0 = (hi_f ** e - lo ** e) / e
            if e < 0:
                v0 = np.where(np.isfinite(hi), v0, -lo ** e / e)
        if e >= 0:
            v0 = np.where(np.isfinite(hi), v0, INF)
        out = np.where(m0, v0, out)
        m1 = kind == 1
        out = np.where(m1, A * (hi_f ** (s + 1) - lo ** (s + 1)) / (s + 1), out)
        m2 = kind == 2
        v2 = A * (hi_f ** (s + 1) - lo ** (s + 1)) / (s + 1) + B * (hi_f ** (s + 2) - lo ** (s + 2)) / (s + 2)
        out = np.where(m2, v2, out)
        return out

    def density_tail(self, y):
        """The un-normalized integrand g03(y)."""
        lo, hi, kind, A, B = self._pieces[:5]
        ya = np.atleast_1d(np.asarray(y, dtype=float))
        j = np.clip(np.searchsorted(lo, ya, side="right") - 1, 0, len(lo) - 1)
        p = -self.alpha - 1.0
        val = np.where(kind[j] == 0, np.maximum(ya, 1.0) ** p,
                       np.where(kind[j] == 1, A[j], A[j] + B[j] * ya))
        return _ret(y, np.where(ya < 1.0, 1.0, val).reshape(np.shape(y)))

    def _tail(self, x):
        lo, hi, kind, A, B, suffix = self._pieces[:6]
        xc = np.maximum(x, 1.0)
        j = np.clip(np.searchsorted(lo, xc, side="right") - 1, 0, len(lo) - 1)
        part = self._piece_moment(0.0, xc, hi[j], kind[j], A[j], B[j])
        return np.where(x > 1.0, (part + suffix[j + 1]) / suffix[0], 1.0)

    def moment_finite(self, s):
        return s < self.alpha

    def partial_moment(self, s, upper):
        lo, hi, kind, A, B, suffix = self._pieces[:6]
        ua = np.atleast_1d(np.asarray(upper, dtype=float))
        full = self._piece_moment(s, lo, hi, kind, A, B)
        cum = np.concatenate([[0.0], np.cumsum(full)])
        out = np.empty(ua.shape)
        for k, T in enumerate(ua):
            if T <= 1.0:
                out[k] = 0.0
                continue
            j = int(np.clip(np.searchsorted(lo, T, side="right") - 1, 0, len(lo) - 1))
            part = self._piece_moment(s, lo[j:j + 1], np.array([min(T, hi[j])]),
                                      kind[j:j + 1], A[j:j + 1], B[j:j + 1])[0]
            # density of G is g03 / norm, so E[Y^s; Y <= T] = int y^s g03 / norm
            out[k] = (cum[j] + part) / suffix[0]
        return _ret(upper, out.reshape(np.shape(upper)))

    def moment(self, s):
        if s >= self.alpha:
            return INF
        return float(self.partial_moment(s, 1e300))

    def jump_points(self):
        return self._pieces[7].copy()

    @property
    def link_starts(self):
        return self._pieces[8].copy()

    @property
    def window_points(self):
        """u_i with f2(u_i) = y_i."""
        return self._pieces[9].copy()

    def __hash__(self):
        return hash((self.zoo_name, self.alpha, self.a, self.b, self.x1))

    def __eq__(self, other):
        return type(other) is type(self) and (self.alpha, self.a, self.b, self.x1) == (
            other.alpha, other.a, other.b, other.x1)


@dataclass(frozen=True)
class TwoPieceWeight(TailModel):
    """P(Y <= y) = 1/2 K(1/y) on (0, 1), 1/2 upper(y) tail beyond 1.

    ``lower`` is the law of Z = 1/Y on [1, inf) restricted to the lower half.
    """
    lower: TailModel
    upper: TailModel
    zoo_name = "two_piece"
    support = (0.0, INF)

    rv_index = property(lambda self: self.upper.rv_index)
    matuszewska = property(lambda self: self.upper.matuszewska)
    moment_index = property(lambda self: self.upper.moment_index)

    @property
    def class_flags(self):
        return dict(self.upper.class_flags)

    def _cdf(self, y):
        ys = np.where(y > 0, y, 1.0)
        with np.errstate(over="ignore", divide="ignore"):
            low = 0.5 * self.lower._tail(1.0 / ys)
        high = 1.0 - 0.5 * self.upper._tail(np.maximum(y, 1.0))
        return np.where(y <= 0, 0.0, np.where(y < 1.0, low, high))

    def _tail(self, y):
        ys = np.where(y > 0, y, 1.0)
        with np.errstate(over="ignore", divide="ignore"):
            low = 1.0 - 0.5 * self.lower._tail(1.0 / ys)
        high = 0.5 * self.upper._tail(np.maximum(y, 1.0))
        return np.where(y < 0, 1.0, np.where(y < 1.0, np.where(y == 0, 1.0, low), high))

    def _isf(self, s):
        up = self.upper._isf(np.minimum(2.0 * s, 1.0))
        dn = 1.0 / self.lower._isf(np.clip(2.0 * (1.0 - s), 1e-300, 1.0))
        return np.where(s <= 0.5, np.maximum(up, 1.0), np.minimum(dn, 1.0))

    def _quantile(self, u):
        dn = 1.0 / self.lower._isf(np.clip(2.0 * u, 1e-300, 1.0))
        up = self.upper._isf(np.clip(2.0 * (1.0 - u), 1e-300, 1.0))
        return np.where(u < 0.5, np.minimum(dn, 1.0), np.maximum(up, 1.0))

    def moment_finite(self, s):
        return self.upper.moment_finite(s)

    def moment(self, s):
        up = self.upper.moment(s)
        if not math.isfinite(up):
            return INF
        return 0.5 * up + 0.5 * _neg_moment(self.lower, s)

    def partial_moment(self, s, upper):
        ua = np.atleast_1d(np.asarray(upper, dtype=float))
        low_total = 0.5 * _neg_moment(self.lower, s)
        out = np.empty(ua.shape)
        for k, T in enumerate(ua):
            if T <= 0:
                out[k] = 0.0
            elif T < 1.0:
                # E[Z^-s; Z >= 1/T] / 2
                out[k] = 0.5 * _neg_moment(self.lower, s, zmin=1.0 / T)
            else:
                out[k] = low_total + 0.5 * float(self.upper.partial_moment(s, T))
        return _ret(upper, out.reshape(np.shape(upper)))


def _neg_moment(Z, s, zmin=1.0):
    """E[Z^-s 1{Z >= zmin}] for Z on [1, inf), by parts on the tail."""
    # = zmin^-s tail(zmin) - s int_zmin^inf z^{-s-1} tail(z) dz
    tz = float(Z.tail(zmin)) if zmin > 1.0 else 1.0
    if s == 0:
        return tz

    def g(t):
        z = math.exp(t)
        return z ** -s * float(Z.tail(z))

    r, _ = integrate.quad(g, math.log(zmin), INF, epsrel=1e-10, limit=400)
    return zmin ** -s * tz - s * r


# ---------------------------------------------------------------------------
# simple models

@dataclass(frozen=True)
class Degenerate(TailModel):
    value: float
    zoo_name = "degenerate"

    support = property(lambda self: (self.value, self.value))

    def _tail(self, x):
        return np.where(x < self.value, 1.0, 0.0)

    def _cdf(self, x):
        return np.where(x >= self.value, 1.0, 0.0)

    def _isf(self, s):
        return np.full(np.shape(s), float(self.value))

    def _quantile(self, u):
        return np.full(np.shape(u), float(self.value))

    def moment_finite(self, s):
        return True

    def moment(self, s):
        return float(self.value) ** s

    def partial_moment(self, s, upper):
        T = np.asarray(upper, dtype=float)
        return _ret(upper, np.where(T >= self.value, float(self.value) ** s, 0.0))

    def sample(self, rng, size=None):
        super().sample(rng, size)  # consume the stream like every other model
        if size is None:
            return float(self.value)
        return np.full(size, float(self.value))


@dataclass(frozen=True)
class Exponential(TailModel):
    rate: float = 1.0
    zoo_name = "exponential"
    support = (0.0, INF)

    def __post_init__(self):
        _check(self.rate > 0, "rate must be positive")

    @property
    def class_flags(self):
        return {"in_L": False, "in_D": False, "in_R": False}

    def _tail(self, x):
        return np.where(x > 0, np.exp(-self.rate * np.maximum(x, 0.0)), 1.0)

    def _cdf(self, x):
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def _isf(self, s):
        return -np.log(s) / self.rate

    def _quantile(self, u):
        return -np.log1p(-u) / self.rate

    def moment_finite(self, s):
        return True

    def moment(self, s):
        return math.gamma(s + 1.0) / self.rate ** s


@dataclass(frozen=True)
class Scaled(TailModel):
    """Law of w * X for a fixed w > 0."""
    base: TailModel
    w: float
    zoo_name = "scaled"

    def __post_init__(self):
        _check(self.w > 0, "scale must be positive")

    support = property(lambda self: (self.base.support[0] * self.w, self.base.support[1] * self.w))
    rv_index = property(lambda self: self.base.rv_index)
    left_index = property(lambda self: self.base.left_index)
    matuszewska = property(lambda self: self.base.matuszewska)
    moment_index = property(lambda self: self.base.moment_index)

    @property
    def class_flags(self):
        return dict(self.base.class_flags)

    def _tail(self, x):
        return self.base._tail(x / self.w)

    def _cdf(self, x):
        return self.base._cdf(x / self.w)

    def _isf(self, s):
        return self.w * self.base._isf(s)

    def _quantile(self, u):
        return self.w * self.base._quantile(u)

    def jump_points(self):
        j = self.base.jump_points()
        return None if j is None else j * self.w


@dataclass(frozen=True)
class SumModel(TailModel):
    """Law of A + B for independent A, B; tail by the convolution oracle."""
    a: TailModel
    b: TailModel
    grid_n: int = 1 << 15
    zoo_name = "sum"

    def params(self):
        return {"a": self.a, "b": self.b}

    support = property(lambda self: (self.a.support[0] + self.b.support[0],
                                      self.a.support[1] + self.b.support[1]))

    def _tail(self, x):
        from ..montecarlo.oracle import convolution_oracle
        return np.array([convolution_oracle(self.a, self.b, float(v), self.grid_n) for v in x])

    def _cdf(self, x):
        from ..montecarlo.oracle import convolution_oracle
        return np.array([convolution_oracle(self.a, self.b, float(v), self.grid_n, lower=True)
                         for v in x])

    def sample(self, rng, size=None):
        return self.a.sample(rng, size) + self.b.sample(rng, size)


@dataclass(frozen=True)
class UtaiMarginal(TailModel):
    """Common marginal of the golden-ratio UTAI pair built from V on (0, inf).

    P(X > t) = 2q(1-q) V(t) + q^2 V*V(t) for t >= 0 and P(X < -t) = q V(t),
    with q = (3 - sqrt 5)/2 so that (1-q)^2 = q.
    """
    v: TailModel
    zoo_name = "utai_marginal"

    rv_index = property(lambda self: self.v.rv_index)

    @property
    def q(self):
        return (3.0 - math.sqrt(5.0)) / 2.0

    def _tail(self, x):
        q = self.q
        out = np.empty(x.shape)
        pos = x >= 0
        if pos.any():
            xp = x[pos]
            vv = SumModel(self.v, self.v)._tail(xp)
            out[pos] = 2 * q * (1 - q) * self.v._tail(xp) + q * q * vv
        neg = ~pos
        if neg.any():
            out[neg] = 1.0 - q * self.v._tail(-x[neg])
        return out

    def _cdf(self, x):
        q = self.q
        out = np.empty(x.shape)
        neg = x < 0
        out[neg] = q * self.v._tail(-x[neg])
        # P(X <= -t) uses the left limit; V continuous makes it the same
        pos = ~neg
        out[pos] = 1.0 - self._tail(x[pos])
        return out
