"""Integer-order Bessel functions of the first kind.

Backward (Miller) recurrence is the production path; the power series is kept
as an independent check valid for small arguments.
"""
import math

import numpy as np

_RESCALE = 1e250


def bessel_jn_miller(x, n_max):
    """Return J_0(x) .. J_{n_max}(x) as a float array using Miller's algorithm."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    out = np.zeros(n_max + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    sign = 1.0
    if x < 0:
        x, sign = -x, -1.0
    # start well above both the requested order and the turning point
    start = 2 * ((max(n_max, int(x)) + int(math.sqrt(40.0 * (max(n_max, x) + 10.0))) + 20) // 2)
    j_next, j_cur = 0.0, 1e-300
    vals = np.zeros(start + 1)
    vals[start] = j_cur
    for k in range(start, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        vals[k - 1] = j_cur
        if abs(j_cur) > _RESCALE:
            vals[k - 1:] /= _RESCALE
            j_next /= _RESCALE
            j_cur /= _RESCALE
    # J_0 + 2 * sum J_{2k} = 1
    norm = vals[0] + 2.0 * vals[2::2].sum()
    vals /= norm
    out[:] = vals[: n_max + 1]
    if sign < 0:
        out[1::2] *= -1.0
    return out


def bessel_jn_series(n, x, terms=40):
    """Power series J_n(x) = sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!)."""
    n = abs(int(n))
    half = 0.5 * x
    total = 0.0
    term = half**n / math.factorial(n)
    for k in range(terms):
        total += term
        term *= -(half * half) / ((k + 1) * (k + 1 + n))
    return total
