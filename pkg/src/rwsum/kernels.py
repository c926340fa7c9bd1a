"""Hot loops, each in a numba and a numpy flavour.

The kernels are model-agnostic: they turn simulated products Z = W * X into
thresholds t such that the conditional estimator is tail(t).  A threshold of
-inf means "already exceeded" and maps to probability one.
"""
import math

import numpy as np

from ._accel import dispatch, jit

NEG_INF = -math.inf


# ---------------------------------------------------------------------------
# crude indicators

@jit
def _exceed_nb(Z, x, ruin):
    m, n = Z.shape
    out = np.zeros(m, dtype=np.bool_)
    for r in range(m):
        s = 0.0
        best = -np.inf
        for k in range(n):
            s += Z[r, k]
            if s > best:
                best = s
        out[r] = (best > x) if ruin else (s > x)
    return out


def _exceed_np(Z, x, ruin):
    c = np.cumsum(Z, axis=1)
    if ruin:
        return c.max(axis=1) > x
    return c[:, -1] > x


exceed = dispatch(_exceed_nb, _exceed_np)


# ---------------------------------------------------------------------------
# last-coordinate conditioning: P(event | everything but X_n)

@jit
def _last_threshold_nb(Z, W, x, ruin):
    m, n = Z.shape
    out = np.empty(m)
    for r in range(m):
        s = 0.0
        done = False
        for k in range(n - 1):
            s += Z[r, k]
            if ruin and s > x:
                done = True
        out[r] = -np.inf if done else (x - s) / W[r, n - 1]
    return out


def _last_threshold_np(Z, W, x, ruin):
    n = Z.shape[1]
    if n == 1:
        return np.full(Z.shape[0], x) / W[:, 0]
    c = np.cumsum(Z[:, :-1], axis=1)
    t = (x - c[:, -1]) / W[:, -1]
    if ruin:
        t = np.where(c.max(axis=1) > x, NEG_INF, t)
    return t


last_threshold = dispatch(_last_threshold_nb, _last_threshold_np)


# ---------------------------------------------------------------------------
# max-conditioning (one term per coordinate being the largest)

@jit
def _ak_thresholds_nb(Z, W, x, ruin):
    m, n = Z.shape
    out = np.empty((m, n))
    pre = np.empty(n + 1)
    post = np.empty(n + 1)
    for r in range(m):
        # prefix sums and running max of the prefix
        pre[0] = 0.0
        for k in range(n):
            pre[k + 1] = pre[k] + Z[r, k]
        # post[k] = max(0, max_{m>k} sum_{k<j<=m} Z_j), built right to left
        post[n] = 0.0
        if n > 0:
            post[n - 1] = 0.0
        for k in range(n - 2, -1, -1):
            v = Z[r, k + 1] + post[k + 1]
            post[k] = v if v > 0.0 else 0.0
        # max of others via top-two
        b1 = -np.inf
        b2 = -np.inf
        i1 = -1
        for k in range(n):
            z = Z[r, k]
            if z > b1:
                b2 = b1
                b1 = z
                i1 = k
            elif z > b2:
                b2 = z
        run = -np.inf
        for k in range(n):
            mo = b2 if k == i1 else b1
            if ruin:
                if run > x:
                    thr = mo
                else:
                    rest = pre[k] + post[k]
                    thr = x - rest
                    if mo > thr:
                        thr = mo
            else:
                thr = x - (pre[n] - Z[r, k])
                if mo > thr:
                    thr = mo
            out[r, k] = thr / W[r, k]
            if pre[k + 1] > run:
                run = pre[k + 1]
    return out


def _ak_thresholds_np(Z, W, x, ruin):
    m, n = Z.shape
    pre = np.concatenate([np.zeros((m, 1)), np.cumsum(Z, axis=1)], axis=1)
    # max over others via sorted top two
    if n > 1:
        part = np.partition(Z, n - 2, axis=1)
        b1, b2 = part[:, -1], part[:, -2]
    else:
        b1 = Z[:, 0]
        b2 = np.full(m, NEG_INF)
    is_top = Z == b1[:, None]
    # ties at the maximum: only the first occurrence uses b2
    first = np.argmax(is_top, axis=1)
    mo = np.repeat(b1[:, None], n, axis=1)
    mo[np.arange(m), first] = b2
    if not ruin:
        thr = np.maximum(mo, x - (pre[:, -1:] - Z))
        return thr / W
    post = np.zeros((m, n))
    for k in range(n - 2, -1, -1):
        post[:, k] = np.maximum(Z[:, k + 1] + post[:, k + 1], 0.0)
    run = np.maximum.accumulate(pre[:, 1:], axis=1)
    prior = np.concatenate([np.full((m, 1), NEG_INF), run[:, :-1]], axis=1)
    thr = np.where(prior > x, mo, np.maximum(mo, x - (pre[:, :-1] + post)))
    return thr / W


ak_thresholds = dispatch(_ak_thresholds_nb, _ak_thresholds_np)


# ---------------------------------------------------------------------------
# stopped sums

@jit
def _stopped_nb(Z, W, tau, x):
    m, n = Z.shape
    hit = np.zeros(m, dtype=np.bool_)
    thr = np.empty(m)
    for r in range(m):
        t = tau[r]
        s = 0.0
        for k in range(t - 1):
            s += Z[r, k]
        thr[r] = (x - s) / W[r, t - 1]
        hit[r] = s + Z[r, t - 1] > x
    return hit, thr


def _stopped_np(Z, W, tau, x):
    m, n = Z.shape
    cols = np.arange(n)[None, :]
    t = tau[:, None]
    before = np.where(cols < t - 1, Z, 0.0).sum(axis=1)
    rows = np.arange(m)
    last = Z[rows, tau - 1]
    return before + last > x, (x - before) / W[rows, tau - 1]


stopped = dispatch(_stopped_nb, _stopped_np)


# ---------------------------------------------------------------------------
# log-scale expectation step used by the product-weight tail recursion
#
#   out[i] = sum_j wts[j] * psi(s_i - z[j])
#
# psi is tabulated as log values on a uniform grid s0 + h*k; below the grid it
# is clamped to left_val, above it log psi is extended linearly.

@jit
def _grid_expect_nb(logpsi, s0, h, z, wts, left_val, s_eval):
    K = logpsi.shape[0]
    slope = (logpsi[K - 1] - logpsi[K - 2]) / h
    out = np.empty(s_eval.shape[0])
    for i in range(s_eval.shape[0]):
        acc = 0.0
        for j in range(z.shape[0]):
            u = (s_eval[i] - z[j] - s0) / h
            if u <= 0.0:
                v = left_val
            elif u >= K - 1:
                v = math.exp(logpsi[K - 1] + slope * (u - (K - 1)) * h)
            else:
                k = int(u)
                f = u - k
                v = math.exp(logpsi[k] * (1.0 - f) + logpsi[k + 1] * f)
            acc += wts[j] * v
        out[i] = acc
    return out


def _grid_expect_np(logpsi, s0, h, z, wts, left_val, s_eval, chunk=256):
    K = logpsi.shape[0]
    slope = (logpsi[K - 1] - logpsi[K - 2]) / h
    out = np.empty(s_eval.shape[0])
    for a in range(0, s_eval.shape[0], chunk):
        u = (s_eval[a:a + chunk, None] - z[None, :] - s0) / h
        k = np.clip(np.floor(u).astype(np.int64), 0, K - 2)
        f = u - k
        lv = logpsi[k] * (1.0 - f) + logpsi[k + 1] * f
        lv = np.where(u >= K - 1, logpsi[K - 1] + slope * (u - (K - 1)) * h, lv)
        v = np.where(u <= 0.0, left_val, np.exp(lv))
        out[a:a + chunk] = v @ wts
    return out


grid_expect = dispatch(_grid_expect_nb, _grid_expect_np)
