"""Numba-compiled blade kernels (the hot inner loops).

Every function here has a pure-numpy twin in `_kernels_np` with an identical
signature; `_backend` picks one of the two at import time.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def mul_into(out, x, y, pa, pb, po, ps):
    for k in range(pa.size):
        v = x[pa[k]] * y[pb[k]]
        if v != 0j:
            out[po[k]] += ps[k] * v


@njit(cache=True)
def mul_accumulate_rows(out, xrows, yrows, pa, pb, po, ps):
    n = xrows.shape[0]
    for k in range(pa.size):
        a = pa[k]
        b = pb[k]
        acc = 0j
        for i in range(n):
            acc += xrows[i, a] * yrows[i, b]
        if acc != 0j:
            out[po[k]] += ps[k] * acc


@njit(cache=True)
def left_mult_matrix(out, x, pa, pb, po, ps):
    for k in range(pa.size):
        v = x[pa[k]]
        if v != 0j:
            out[po[k], pb[k]] += ps[k] * v


@njit(cache=True)
def right_mult_matrix(out, x, pa, pb, po, ps):
    for k in range(pa.size):
        v = x[pb[k]]
        if v != 0j:
            out[po[k], pa[k]] += ps[k] * v
