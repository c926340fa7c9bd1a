"""Asymptotic right-hand sides: weighted sums, Breiman-type tails, ruin."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .dist_core.zoo import Degenerate
from .errors import (InconsistentCase, InvalidParameter, NumericError, PreconditionError,
                     TruncationError)
from .kernels import grid_expect
from .weights import FixedVector, IndependentIID, ProductIID, TruncatedMoment

DEFAULT_PROBES = (0.5, 0.1, 0.01)


# ---------------------------------------------------------------------------
# cases

@dataclass(frozen=True)
class CaseLabel:
    label: str                      # "Case1" | "Case2" | "Case3"
    evidence: dict = field(default_factory=dict, compare=False)
    low_confidence: bool = False

    def __str__(self):
        return self.label


def _moment_is_finite(G, s):
    """(finite?, heuristic?) for E Y^s."""
    known = G.moment_finite(s)
    if known is not None:
        return bool(known), False
    # doubling test on partial integrals up to far quantiles
    tops = [float(G.isf(10.0 ** -k)) for k in (6, 9, 12, 15)]
    vals = [float(G.partial_moment(s, t)) for t in tops]
    inc = np.diff(vals)
    finite = bool(inc[-1] <= 1e-3 * vals[-1] and np.all(inc[1:] <= inc[:-1] * 1.0001))
    return finite, True


def case_classifier(G, alpha, delta_probes=DEFAULT_PROBES):
    if alpha < 0:
        raise InvalidParameter("alpha must be non-negative")
    if any(d <= 0 for d in delta_probes):
        raise InvalidParameter("delta probes must be positive")
    fin_a, heur = _moment_is_finite(G, alpha)
    ev = {"E[Y^alpha] finite": fin_a}
    low = heur
    if not fin_a:
        return CaseLabel("Case3", ev, low)
    any_fin = False
    for d in delta_probes:
        f, h = _moment_is_finite(G, alpha + d)
        ev[f"E[Y^(alpha+{d})] finite"] = f
        low = low or h
        any_fin = any_fin or f
    return CaseLabel("Case1" if any_fin else "Case2", ev, low)


# ---------------------------------------------------------------------------
# stopping times

@dataclass(frozen=True)
class StoppingTime:
    """Law of tau through P(tau >= i), tabulated up to n_max."""
    kind: str                       # deterministic | geometric | infinite | pmf
    n_max: int
    param: float = 0.0
    pmf: tuple = field(default=(), compare=False)

    @classmethod
    def deterministic(cls, n):
        if n < 1:
            raise InvalidParameter("tau must be at least 1")
        return cls("deterministic", int(n), float(n))

    @classmethod
    def geometric(cls, q, n_max=200):
        """P(tau >= i) = q^(i-1)."""
        if not 0 <= q < 1:
            raise InvalidParameter("geometric parameter must lie in [0, 1)")
        return cls("geometric", int(n_max), float(q))

    @classmethod
    def infinite(cls, n_max=60):
        """tau = infinity: every P(tau >= i) is one (infinite-horizon sums)."""
        return cls("infinite", int(n_max), 0.0)

    @classmethod
    def from_pmf(cls, pmf):
        p = np.asarray(pmf, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise InvalidParameter("pmf must be non-negative and sum to 1 within 1e-12")
        return cls("pmf", len(p), 0.0, tuple(p.tolist()))

    def survival(self, i):
        """P(tau >= i) for integer array i >= 1 (beyond n_max as well, when known)."""
        i = np.asarray(i, dtype=float)
        if self.kind == "deterministic":
            return np.where(i <= self.param, 1.0, 0.0)
        if self.kind == "geometric":
            return self.param ** (i - 1)
        if self.kind == "infinite":
            return np.ones_like(i)
        p = np.asarray(self.pmf)
        tail = np.concatenate([np.cumsum(p[::-1])[::-1], [0.0]])
        k = np.clip(i.astype(int) - 1, 0, len(p))
        return tail[k]

    def moment(self, s):
        """E tau^s (infinite for tau = infinity)."""
        if self.kind == "infinite":
            return math.inf
        if self.kind == "deterministic":
            return self.param ** s
        if self.kind == "geometric":
            i = np.arange(1, 20_000)
            return float(np.sum(i ** s * self.param ** (i - 1) * (1 - self.param)))
        i = np.arange(1, len(self.pmf) + 1)
        return float(np.sum(i ** s * np.asarray(self.pmf)))

    def truncated_pmf(self):
        i = np.arange(1, self.n_max + 2)
        s = self.survival(i)
        p = s[:-1] - s[1:]
        p[-1] += s[-1]
        return p

    def sample(self, rng, size):
        if self.kind == "infinite":
            raise InvalidParameter("cannot sample an infinite stopping time")
        if self.kind == "deterministic":
            return np.full(size, int(self.param), dtype=np.int64)
        cdf = np.cumsum(self.truncated_pmf())
        cdf[-1] = 1.0
        u = rng.random(size)
        return (np.searchsorted(cdf, u, side="right") + 1).astype(np.int64).clip(1, self.n_max)

    def spec(self):
        if self.kind == "deterministic":
            return f"deterministic(n={int(self.param)})"
        if self.kind == "geometric":
            return f"geometric(q={self.param!r},n_max={self.n_max})"
        if self.kind == "infinite":
            return f"infinite(n_max={self.n_max})"
        return "pmf(p=(" + ",".join(repr(v) for v in self.pmf) + "))"


# ---------------------------------------------------------------------------
# right-hand sides

def fixed_weight_rhs(F, w, x):
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise InvalidParameter("weights must be positive")
    return math.fsum(np.atleast_1d(F.tail(x / w)).tolist())


@dataclass(frozen=True)
class TailEvaluation:
    value: float
    rtol: float
    method: str

    def __float__(self):
        return self.value


def _left_limit(F):
    return float(F.tail(np.nextafter(0.0, 1.0)))


def _weight_nodes(G, v_max, panel, order):
    """Quadrature nodes z = ln Y and weights over both halves of G's law."""
    gx, gw = np.polynomial.legendre.leggauss(order)
    edges = np.arange(0.0, v_max + 0.5 * panel, panel)
    mid = 0.5 * (edges[:-1] + edges[1:])
    v = (mid[:, None] + 0.5 * panel * gx[None, :]).ravel()
    wv = np.tile(0.5 * panel * gw, len(mid))
    mass = 0.5 * np.exp(-v) * wv
    s = 0.5 * np.exp(-v)
    z_hi = np.log(G.isf(s))
    z_lo = np.log(G.quantile(s))
    rem = 0.5 * math.exp(-edges[-1])
    return np.concatenate([z_lo, z_hi]), np.concatenate([mass, mass]), rem


def _grid_tails(F, G, n, x, h, panel, order=16, v_max=45.0, span=40.0):
    """H_1..H_n at x for product weights by recursion on a log grid.

    psi_k(s) = P(W_k X > e^s) satisfies psi_k(s) = E psi_{k-1}(s - ln Y),
    psi_0(s) = tail_F(e^s).
    """
    s_star = math.log(x)
    z, w, rem = _weight_nodes(G, v_max, panel, order)
    left = _left_limit(F)
    s0 = s_star - span
    K = int(round(2 * span / h)) + 1
    s = s0 + h * np.arange(K)
    # level 1 straight from the closed-form tail; remaining upper mass sees psi(-inf)
    out = np.empty(n)
    lv = np.empty(K)
    for a in range(0, K, 512):
        arg = np.exp(s[a:a + 512, None] - z[None, :])
        lv[a:a + 512] = F.tail(arg) @ w + rem * left
    arg = np.exp(s_star - z)
    out[0] = float(F.tail(arg) @ w + rem * left)
    for k in range(1, n):
        with np.errstate(divide="ignore"):
            logpsi = np.log(np.maximum(lv, 1e-300))
        lvl0 = float(lv[0])
        out[k] = float(grid_expect(logpsi, s0, h, z, w, lvl0, np.array([s_star]))[0]) + rem * lvl0
        if k < n - 1:
            lv = grid_expect(logpsi, s0, h, z, w, lvl0, s) + rem * lvl0
    return out


def _qmc_tails(F, G, n, x, m=1 << 20, reps=4, seed=12345):
    vals = np.empty((reps, n))
    for r in range(reps):
        sob = qmc.Sobol(d=n, scramble=True, seed=seed + r)
        u = sob.random(m)
        u = np.clip(u, 1e-300, 1 - 1e-16)
        logw = np.cumsum(np.log(G.isf(u)), axis=1)
        for i in range(n):
            vals[r, i] = F.tail(x / np.exp(logw[:, i])).mean()
    mean = vals.mean(axis=0)
    err = vals.std(axis=0, ddof=1) / math.sqrt(reps)
    return mean, err


def random_weight_tails(F, proc, n, x, method="auto", rtol=1e-4, h=0.01, panel=0.25):
    """[H_1(x), ..., H_n(x)] with H_i(x) = P(W_i X > x), plus achieved tolerance."""
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    if not x > 0:
        raise InvalidParameter("x must be positive")
    if isinstance(proc, FixedVector):
        w = np.asarray(proc.w[:n])
        return np.atleast_1d(F.tail(x / w)).astype(float), 0.0, "exact"
    G = proc.G
    if isinstance(G, Degenerate):
        if isinstance(proc, ProductIID):
            w = float(G.value) ** np.arange(1, n + 1)
        else:
            w = np.full(n, float(G.value))
        return np.atleast_1d(F.tail(x / w)).astype(float), 0.0, "exact"
    levels = n if isinstance(proc, ProductIID) else 1
    if method == "qmc":
        vals, err = _qmc_tails(F, G, levels, x)
        achieved = float(np.max(err / vals))
        used = "qmc"
    else:
        fine = _grid_tails(F, G, levels, x, h, panel)
        coarse = _grid_tails(F, G, levels, x, 2 * h, 2 * panel)
        achieved = float(np.max(np.abs(fine - coarse) / fine))
        vals = fine
        used = "grid"
    if achieved > rtol:
        raise NumericError(f"H tail tolerance {achieved:.2e} above target {rtol:.0e}",
                           achieved=achieved)
    if isinstance(proc, IndependentIID):
        vals = np.full(n, vals[0])
    return vals, achieved, used


def random_weight_tail(F, proc, i, x, **kw):
    if i < 1:
        raise InvalidParameter("index i must be at least 1")
    vals, achieved, used = random_weight_tails(F, proc, i, x, **kw)
    return TailEvaluation(float(vals[i - 1]), achieved, used)


def _alpha_of(F, alpha):
    a = F.rv_index if alpha is None else alpha
    if a is None:
        raise InvalidParameter("F must be regularly varying (rv_index unset)")
    return a


def breiman_tail(F, G, case, I, n, x, alpha=None):
    a = _alpha_of(F, alpha)
    fx = float(F.tail(x))
    if n == 0:
        return fx
    lab = str(case)
    if lab in ("Case1", "Case2"):
        m = G.moment(a)
        if not math.isfinite(m):
            raise InconsistentCase(f"{lab} requested but E[Y^alpha] is infinite")
        return m ** n * fx
    if lab == "Case3":
        if I is None:
            raise InvalidParameter("Case3 needs the truncated moment I")
        return float(I(x)) ** n * fx
    raise InvalidParameter(f"unknown case label {lab!r}")


@dataclass(frozen=True)
class RuinApprox:
    value: float
    form: str
    case: str
    leading: float | None = None
    terms: tuple = ()
    rtol: float = 0.0


def ruin_approx_finite(F, G, window, case, n, x, form="rv", alpha=None, **kw):
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    fx = float(F.tail(x))
    lab = str(case) if case is not None else ""
    if form == "generic":
        vals, achieved, _ = random_weight_tails(F, ProductIID(G), n, x, **kw)
        return RuinApprox(math.fsum(vals.tolist()), "generic", lab, terms=tuple(vals.tolist()),
                          rtol=achieved)
    if form != "rv":
        raise InvalidParameter(f"unknown form {form!r}")
    a = _alpha_of(F, alpha)
    if lab in ("Case1", "Case2"):
        m = G.moment(a)
        if not math.isfinite(m):
            raise InconsistentCase(f"{lab} requested but E[Y^alpha] is infinite")
        terms = [m ** i * fx for i in range(1, n + 1)]
        return RuinApprox(math.fsum(terms), "rv", lab, terms=tuple(terms))
    if lab == "Case3":
        if window is None:
            raise InvalidParameter("Case3 needs a weight window (f2)")
        Ix = float(TruncatedMoment(G, a, window.f2)(x))
        terms = [Ix ** i * fx for i in range(1, n + 1)]
        return RuinApprox(math.fsum(terms), "rv", lab, leading=Ix ** n * fx, terms=tuple(terms))
    raise InvalidParameter(f"unknown case label {lab!r}")


def ruin_approx_infinite(F, G, x, alpha=None):
    a = _alpha_of(F, alpha)
    m = G.moment(a)
    if not m < 1:
        raise PreconditionError(f"E[Y^alpha] = {m} >= 1; the infinite-horizon series diverges")
    return m / (1.0 - m) * float(F.tail(x))


@dataclass(frozen=True)
class StoppedApprox:
    value: float
    remainder: float
    n_terms: int
    form: str
    tau_moment: float


def _geometric_remainder(tau, base, N):
    """sum_{i>N} P(tau >= i) base^i in closed form where possible."""
    if tau.kind == "deterministic":
        return 0.0 if tau.param <= N else math.inf
    if tau.kind == "geometric":
        qb = tau.param * base
        if qb >= 1:
            return math.inf
        return base * qb ** N / (1.0 - qb)
    if tau.kind == "infinite":
        if base >= 1:
            return math.inf
        return base ** (N + 1) / (1.0 - base)
    return 0.0 if len(tau.pmf) <= N else math.inf


def stopped_sum_approx(F, G, tau, x, form="rv", case=None, window=None, alpha=None,
                       p=None, eps=0.05, potter_c1=None, max_rel_remainder=0.01, **kw):
    """sum_{i <= N_max} P(tau >= i) H_i(x) with a remainder bound.

    form="rv" uses H_i = m^i tail_F(x) (m = E Y^alpha, or I(x) in Case3) whose
    tail is summed exactly; form="generic" computes H_i numerically and bounds
    the remainder by C1 (m + eps)^i tail_F(x).
    """
    a = _alpha_of(F, alpha)
    fx = float(F.tail(x))
    N = tau.n_max if tau.kind != "deterministic" else int(tau.param)
    i = np.arange(1, N + 1)
    surv = tau.survival(i)
    pmom = tau.moment(p + 1) if p is not None else math.nan
    lab = str(case) if case is not None else None
    if form == "rv":
        if lab == "Case3":
            base = float(TruncatedMoment(G, a, window.f2)(x))
        else:
            base = G.moment(a)
            if not math.isfinite(base):
                raise InconsistentCase("E[Y^alpha] infinite; use Case3 with a window")
        terms = surv * base ** i * fx
        rem = _geometric_remainder(tau, base, N) * fx
    elif form == "generic":
        vals, _, _ = random_weight_tails(F, ProductIID(G), N, x, **kw)
        terms = surv * vals
        m = G.moment(a)
        ratios = vals / ((m + eps) ** i * fx)
        c1 = max(float(np.max(ratios)), potter_c1 or 0.0)
        rem = c1 * _geometric_remainder(tau, m + eps, N) * fx
    else:
        raise InvalidParameter(f"unknown form {form!r}")
    total = math.fsum(terms.tolist())
    if total > 0 and rem > max_rel_remainder * total:
        raise TruncationError(f"remainder {rem:.3g} exceeds {max_rel_remainder:.0%} of the sum; "
                              f"increase n_max (now {N})", achieved=rem / total)
    return StoppedApprox(total, rem, N, form, pmom)


def h_comparability(F, G, n, x_grid, alpha=None, tol=0.05, **kw):
    """Rows (x, i, H_i/H_1, pattern m^(i-1)) and whether all ratios sit in
    [u1 - tol, u2 + tol] with u1, u2 the extremes of the pattern."""
    a = _alpha_of(F, alpha)
    m = G.moment(a)
    pattern = m ** np.arange(n)
    u1, u2 = float(pattern.min()), float(pattern.max())
    rows = []
    ok = True
    for x in x_grid:
        vals, _, _ = random_weight_tails(F, ProductIID(G), n, float(x), **kw)
        r = vals / vals[0]
        for k in range(n):
            rows.append((float(x), k + 1, float(r[k]), float(pattern[k])))
        ok = ok and bool(np.all((r >= u1 - tol) & (r <= u2 + tol)))
    return rows, (u1, u2), ok
