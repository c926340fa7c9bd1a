"""Weight processes, truncated moments and the weight-condition checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .dist_core.base import TailModel
from .errors import InvalidParameter
from .rng import as_generator, open_uniform


# ---------------------------------------------------------------------------
# weight processes

class WeightProcess:
    zoo_name = "weights"
    y_model = None

    def _draw(self, rng, n, size):
        raise NotImplementedError

    def sample(self, rng, n, size):
        if n < 1:
            raise InvalidParameter("n must be at least 1")
        return np.ascontiguousarray(self._draw(rng, n, size))

    def deterministic(self):
        return None

    def spec(self):
        return self.zoo_name

    def __str__(self):
        return self.spec()


@dataclass(frozen=True)
class FixedVector(WeightProcess):
    w: tuple
    zoo_name = "fixed"

    def __post_init__(self):
        w = tuple(float(v) for v in self.w)
        if not w or any(not (v > 0 and math.isfinite(v)) for v in w):
            raise InvalidParameter("fixed weights must be finite and positive")
        object.__setattr__(self, "w", w)

    def _draw(self, rng, n, size):
        if n > len(self.w):
            raise InvalidParameter(f"fixed vector has {len(self.w)} entries, n={n} requested")
        return np.broadcast_to(np.array(self.w[:n]), (size, n)).copy()

    def deterministic(self):
        return np.array(self.w)

    def spec(self):
        return "fixed(w=(" + ",".join(repr(v) for v in self.w) + ("," if len(self.w) == 1 else "") + "))"


@dataclass(frozen=True)
class ProductIID(WeightProcess):
    """W_i = Y_1 ... Y_i with i.i.d. Y_j ~ G."""
    G: TailModel
    zoo_name = "product"

    @property
    def y_model(self):
        return self.G

    def _draw(self, rng, n, size):
        out = np.empty((size, n))
        acc = np.ones(size)
        for j in range(n):
            acc = acc * self.G.isf(open_uniform(rng, size))
            out[:, j] = acc
        return out

    def spec(self):
        return f"product(g={self.G.spec()})"


@dataclass(frozen=True)
class IndependentIID(WeightProcess):
    G: TailModel
    zoo_name = "iid"

    @property
    def y_model(self):
        return self.G

    def _draw(self, rng, n, size):
        out = np.empty((size, n))
        for j in range(n):
            out[:, j] = self.G.isf(open_uniform(rng, size))
        return out

    def spec(self):
        return f"iid(g={self.G.spec()})"


@dataclass(frozen=True)
class WindowEndpoints(WeightProcess):
    """Deterministic weights that move with x: f1(x), f2(x), f1(x), ...

    f1(x) = x^-gamma1 and f2(x) = x^gamma2 for x > 1 (both 1 below), i.e. the
    extreme admissible weights of the power window.
    """
    gamma1: float
    gamma2: float
    zoo_name = "window_endpoints"

    def __post_init__(self):
        if not (self.gamma1 >= 0 and self.gamma2 >= 0):
            raise InvalidParameter("window exponents must be non-negative")

    def at(self, x, n):
        lo = x ** -self.gamma1 if x > 1 else 1.0
        hi = x ** self.gamma2 if x > 1 else 1.0
        return FixedVector(tuple(lo if i % 2 == 0 else hi for i in range(n)))

    def _draw(self, rng, n, size):
        raise InvalidParameter("window_endpoints depends on x; resolve it with .at(x, n)")

    def spec(self):
        return f"window_endpoints(gamma1={self.gamma1!r},gamma2={self.gamma2!r})"


def resolve_weights(proc, x, n):
    """The weight process to use at level x (identity unless it moves with x)."""
    return proc.at(x, n) if hasattr(proc, "at") else proc


def sample_weights(proc, n, rng, size=None):
    rng = as_generator(rng)
    if size is None:
        return proc.sample(rng, n, 1)[0]
    return proc.sample(rng, n, size)


# ---------------------------------------------------------------------------
# truncated moments

@dataclass(frozen=True)
class TruncatedMoment:
    """x -> E[Y^alpha 1{Y <= f2(x)}]."""
    G: TailModel
    alpha: float
    f2: object = field(repr=False)
    f2_inv: object = field(default=None, repr=False)

    def __call__(self, x):
        return truncated_moment(self.G, self.alpha, self.f2, x)

    def inverse_window(self, y):
        if self.f2_inv is not None:
            return self.f2_inv(y)
        f2 = self.f2

        def one(v):
            hi = 2.0
            while float(f2(hi)) < v:
                hi *= 2.0
            return optimize.brentq(lambda s: float(f2(s)) - v, 0.0, hi, rtol=4e-16, maxiter=500)
        ya = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.array([one(float(v)) for v in ya])
        return float(out[0]) if np.ndim(y) == 0 else out


def truncated_moment(G, alpha, f2, x, method="auto"):
    """I(x) = E[Y^alpha 1{Y <= f2(x)}].

    ``method="quadrature"`` bypasses any closed form and integrates on the
    quantile transform.
    """
    if alpha < 0:
        raise InvalidParameter("alpha must be non-negative")
    T = np.asarray(f2(x), dtype=float)
    if method == "quadrature":
        vals = np.array([TailModel._quad_partial(G, alpha, float(t)) for t in np.atleast_1d(T)])
        return float(vals[0]) if np.ndim(x) == 0 else vals.reshape(np.shape(x))
    out = G.partial_moment(alpha, T)
    return float(out) if np.ndim(x) == 0 else np.asarray(out)


# ---------------------------------------------------------------------------
# condition checks

@dataclass
class CheckRow:
    x: float
    check_id: str
    value: float
    verdict: str


@dataclass
class CheckReport:
    rows: list
    series: dict          # check_id -> verdict for the whole series
    staircase: tuple = ()
    notes: list = field(default_factory=list)

    def values(self, check_id):
        return np.array([r.value for r in self.rows if r.check_id == check_id])


def _series_verdict(vals, decay=1e-2):
    vals = np.asarray(vals, dtype=float)
    if len(vals) < 2 or not np.all(np.isfinite(vals)):
        return "inconclusive"
    if np.all(vals == 0.0):
        return "vanishing"
    mono = bool(np.all(np.diff(vals) <= 1e-12 * np.abs(vals[:-1])))
    if mono and vals[-1] < decay * vals[0]:
        return "decaying"
    if mono:
        return "slowly-decaying"
    return "not-decaying"


def staircase_g(F, G, window, lo=1.0, hi=1e300, per_decade=20, m_max=10_000):
    """Thresholds x_m: first points where tail_G(f2(x/m)) < tail_F(x)/m and f2(x) >= m^2.

    g(x) = 1 below x_1 and 1/m on [x_m, x_{m+1}).
    """
    grid = 10.0 ** np.arange(math.log10(max(lo, 1.0)), math.log10(hi), 1.0 / per_decade)
    Fbar = F.tail(grid)
    f2g = np.asarray(window.f2(grid), dtype=float)
    xs = []
    start = 0
    for m in range(1, m_max + 1):
        ok = (G.tail(np.asarray(window.f2(grid / m), dtype=float)) < Fbar / m) & (f2g >= m * m)
        ok[:start] = False
        # enter and stay
        bad = np.nonzero(~ok)[0]
        k = 0 if len(bad) == 0 else bad[-1] + 1
        if k >= len(grid):
            break
        xs.append(float(grid[k]))
        start = k + 1
        if start >= len(grid):
            break
    xs = np.array(xs)

    def g(x):
        xa = np.asarray(x, dtype=float)
        m = np.searchsorted(xs, xa, side="right")
        out = np.where(m == 0, 1.0, 1.0 / np.maximum(m, 1))
        return float(out) if np.ndim(x) == 0 else out
    g.thresholds = xs
    return g


def weight_condition_checks(F, G, window, p, x_grid, n=2, r_exponent=None, scan_points=200):
    """Rows (x, check_id, value, verdict) for the weight conditions.

    check ids:
      upper_tail       tail_G(f2(x)) / tail_F(x)
      lower_tail       f2(x)^p * P(Y <= f1(x))
      product_bound    I_G^{n-1}(f2(x)) tail_G(f2(x)) + tail_G(f2(x g(x)))
      product_ratio    product_bound / (I_G^{n-1}(f2(x)) tail_F(x))
      ratio_scan       sup_{1<=y<=f2(x)} tail_G(x/y) / (r_G(y) tail_G(x))
    """
    jplus = F.matuszewska[1] if F.matuszewska else F.rv_index
    if jplus is not None and not p > jplus:
        raise InvalidParameter(f"p must exceed J+ = {jplus}")
    xg = np.asarray(x_grid, dtype=float)
    f1 = np.asarray(window.f1(xg), dtype=float)
    f2 = np.asarray(window.f2(xg), dtype=float)
    Fbar = F.tail(xg)
    a = G.tail(f2) / Fbar
    b = f2 ** p * G.cdf(f1)
    th = r_exponent if r_exponent is not None else G.rv_index
    if th is None:
        raise InvalidParameter("r_G exponent unknown for this weight model")
    g = staircase_g(F, G, window)
    IG = np.asarray(G.partial_moment(th, f2), dtype=float)
    c = IG ** (n - 1) * G.tail(f2) + G.tail(np.asarray(window.f2(xg * g(xg)), dtype=float))
    c_ratio = c / (IG ** (n - 1) * Fbar)
    d = np.empty(len(xg))
    for k, (x, top) in enumerate(zip(xg, f2)):
        y = np.geomspace(1.0, max(top, 1.0), scan_points)
        d[k] = float(np.max(G.tail(x / y) / (y ** th * G.tail(x))))
    rows = []
    series = {}
    for cid, vals in (("upper_tail", a), ("lower_tail", b), ("product_bound", c),
                      ("product_ratio", c_ratio)):
        v = _series_verdict(vals)
        series[cid] = v
        rows.extend(CheckRow(float(x), cid, float(val), v) for x, val in zip(xg, vals))
    dv = "bounded" if np.all(d <= 1.0 + 1e-9) else ("finite" if np.all(np.isfinite(d)) else "unbounded")
    series["ratio_scan"] = dv
    rows.extend(CheckRow(float(x), "ratio_scan", float(val), dv) for x, val in zip(xg, d))
    if window.exponent_108 is not None:
        e = window.exponent_108
        vals = xg ** e
        v = _series_verdict(vals) if e < 0 else "not-decaying"
        series["left_tail_window"] = v
        rows.extend(CheckRow(float(x), "left_tail_window", float(val), v) for x, val in zip(xg, vals))
    rows.sort(key=lambda r: (r.check_id, r.x))
    return CheckReport(rows=rows, series=series, staircase=tuple(g.thresholds[:20]))


@dataclass
class LongTailReport:
    rows: list                 # (x, I(x+t)/I(x))
    deviations: list           # (x, |ratio - 1|) including probes, sorted
    step_ratio: float | None
    a_G: float
    b_f2: float
    in_L0: bool
    reasons: list = field(default_factory=list)


def i_long_tail_check(I, t, x_grid, lag=None, tol=1e-3, step_tol=0.05):
    """Long-tail behaviour of the truncated moment I on a grid.

    Besides the ratios I(x+t)/I(x), increments of I are probed right after each
    drop point of the weight model (mapped through f2^-1).  The step ratio is
    (I(x-b+d) - I(x-b)) / (I(x+d) - I(x)) at x = u_i + b/4, d = b/8, which
    exposes a density that drops by a fixed factor across each window point.
    """
    if t <= 0:
        raise InvalidParameter("t must be positive")
    xg = np.sort(np.asarray(x_grid, dtype=float))
    Ix = np.asarray(I(xg), dtype=float)
    ratios = np.asarray(I(xg + t), dtype=float) / Ix
    pts = list(zip(xg.tolist(), np.abs(ratios - 1.0).tolist()))
    step = None
    reasons = []
    G = I.G
    jumps = G.jump_points()
    if jumps is not None:
        b = lag if lag is not None else getattr(G, "b", t)
        us = getattr(G, "window_points", None)
        jp = jumps[(jumps > float(I.f2(xg[0]))) & (jumps < float(I.f2(xg[-1])))]
        if len(jp):
            u = np.asarray(us)[np.isin(jumps, jp)] if us is not None and len(us) == len(jumps) \
                else np.atleast_1d(I.inverse_window(jp))
            probe = u + 0.25 * b
            d = 0.125 * b
            up = np.asarray(I(probe + d)) - np.asarray(I(probe))
            down = np.asarray(I(probe - b + d)) - np.asarray(I(probe - b))
            sr = down / up
            step = float(np.max(sr[len(sr) // 2:]))
            pr = np.asarray(I(probe + t)) / np.asarray(I(probe))
            pts.extend(zip(probe.tolist(), np.abs(pr - 1.0).tolist()))
    pts.sort()
    dev = np.array([v for _, v in pts])
    mono = bool(np.all(np.diff(dev) <= 1e-12 + 1e-9 * dev[:-1]))
    if not mono:
        reasons.append("ratio deviations are not monotone")
    if not dev[-1] <= tol:
        reasons.append(f"final deviation {dev[-1]:.3g} above {tol}")
    if step is not None and abs(step - 1.0) > step_tol:
        reasons.append(f"increment step ratio {step:.4g} differs from 1")
    half = xg[len(xg) // 2:]
    f2h = np.asarray(I.f2(half / 2.0), dtype=float)
    f2f = np.asarray(I.f2(half), dtype=float)
    a_G = float(np.min(G.tail(f2h) / G.tail(f2f)))
    b_f2 = float(np.min(f2h / f2f))
    return LongTailReport(rows=list(zip(xg.tolist(), ratios.tolist())), deviations=pts,
                          step_ratio=step, a_G=a_G, b_f2=b_f2, in_L0=not reasons, reasons=reasons)
