"""Deterministic tail of an independent sum A + B.

The event {A + B > x} splits exactly into
    {A <= x/2, B > x - A}  +  {B <= x/2, A > x - B}  +  {A > x/2, B > x/2}.
The first two pieces are one-dimensional integrals which we evaluate in
quantile space: below the median with u = exp(-w)/2 and above it with
1 - u = exp(-v)/2, so both tails of the integrating law are resolved by a
uniform trapezoid grid.  The last piece is a product of closed-form tails.
"""
import math

import numpy as np

from ..errors import InvalidParameter, ResolutionError

W_SPAN = 45.0


def _trap(f, h):
    return h * (f.sum() - 0.5 * (f[0] + f[-1]))


def _half_integral(A, B, x, grid_n):
    """int_{a <= x/2} P(B > x - a) dF_A(a) and an error estimate."""
    half = 0.5 * x
    FA = float(A.cdf(half))
    if FA <= 0.0:
        return 0.0, 0.0
    total = 0.0
    err = 0.0
    # lower half of A's law
    w0 = -math.log(2.0 * min(FA, 0.5))
    # keep u above the float64 normal range; the integrand there is < 1e-300 anyway
    w = np.linspace(w0, max(min(w0 + W_SPAN, 690.0), w0 + 1.0), grid_n)
    u = 0.5 * np.exp(-w)
    a = A.quantile(u)
    f = B.tail(x - a) * u
    h = w[1] - w[0]
    fine = _trap(f, h)
    coarse = _trap(f[::2], 2 * h) if grid_n % 2 == 1 else _trap(f[:-1:2], 2 * h) + 0.5 * h * (f[-2] + f[-1])
    total += fine
    # mass below the grid is bounded by the last integrand value (monotone in u)
    err += abs(fine - coarse) / 3.0 + f[-1]
    if FA > 0.5:
        tA = float(A.tail(half))
        v1 = W_SPAN if tA <= 0.0 else min(-math.log(2.0 * tA), 745.0)
        if v1 > 0:
            v = np.linspace(0.0, v1, grid_n)
            s = 0.5 * np.exp(-v)
            a = A.isf(np.clip(s, 1e-300, 0.5))
            f = B.tail(x - a) * s
            h = v[1] - v[0]
            fine = _trap(f, h)
            coarse = _trap(f[::2], 2 * h) if grid_n % 2 == 1 else _trap(f[:-1:2], 2 * h) + 0.5 * h * (f[-2] + f[-1])
            total += fine
            err += abs(fine - coarse) / 3.0
    return total, err


def convolution_oracle(A, B, x, grid_n=1 << 15, lower=False, return_error=False):
    """P(A + B > x) for independent A, B.

    With ``lower=True`` returns P(A + B <= x).  Raises ResolutionError when the
    estimated discretization error exceeds 1e-3 of the result.
    """
    if grid_n < (1 << 14):
        raise InvalidParameter("grid_n must be at least 2**14")
    grid_n = int(grid_n) | 1  # odd count so the coarse grid shares endpoints
    ta, ea = _half_integral(A, B, x, grid_n)
    tb, eb = _half_integral(B, A, x, grid_n)
    both = float(A.tail(0.5 * x)) * float(B.tail(0.5 * x))
    res = (ta + tb) + both
    err = ea + eb
    if res > 0 and err > 1e-3 * res:
        raise ResolutionError(f"oracle error estimate {err / res:.2e} exceeds 1e-3 relative",
                              achieved=err / res)
    if lower:
        res = 1.0 - res
    if return_error:
        return res, err
    return res
