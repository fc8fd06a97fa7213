"""Pure-numpy fallbacks for the hot blade kernels.

Same signatures as `_kernels`; selected via SUPERGRASS_BACKEND=numpy.
"""

from __future__ import annotations

import numpy as np


def mul_into(out, x, y, pa, pb, po, ps):
    np.add.at(out, po, ps * x[pa] * y[pb])


def mul_accumulate_rows(out, xrows, yrows, pa, pb, po, ps):
    # out[m] += sum_i sum_pairs sign * xrows[i, a] * yrows[i, b]
    prods = np.einsum("ip,ip->p", xrows[:, pa], yrows[:, pb])
    np.add.at(out, po, ps * prods)


def left_mult_matrix(out, x, pa, pb, po, ps):
    # out[a|b, b] += sign * x[a]; multiplying column vectors by x on the left
    np.add.at(out, (po, pb), ps * x[pa])


def right_mult_matrix(out, x, pa, pb, po, ps):
    # out[a|b, a] += sign * x[b]
    np.add.at(out, (po, pa), ps * x[pb])
