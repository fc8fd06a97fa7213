"""Precomputed blade tables for finite Grassmann algebras.

Blades are encoded as bitmasks: bit j-1 set means generator e_j is present.
The product of two canonical blades E_a * E_b is sign(a,b) * E_{a|b} when the
masks are disjoint and zero otherwise; the sign counts the transpositions
needed to merge the two ordered generator lists.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_ORDER = 10


def product_sign(a: int, b: int) -> int:
    """Sign of E_a * E_b for disjoint masks a, b."""
    count = 0
    a >>= 1
    while a:
        count += bin(a & b).count("1")
        a >>= 1
    return -1 if count & 1 else 1


class BladeTables:
    """All per-order lookup tables, built once and cached."""

    def __init__(self, order: int):
        if not 1 <= order <= MAX_ORDER:
            raise ValueError(f"order must be in 1..{MAX_ORDER}, got {order}")
        self.order = order
        self.dim = 1 << order
        masks = np.arange(self.dim, dtype=np.int64)
        self.levels = np.array([bin(m).count("1") for m in masks], dtype=np.int64)
        # star: B0 - B1, i.e. (-1)^level
        self.star_signs = np.where(self.levels % 2 == 0, 1.0, -1.0)
        # adjoint: conjugate coefficients, odd blades pick up -i
        self.adjoint_factors = np.where(self.levels % 2 == 0, 1.0 + 0j, -1j)
        self.even_mask = self.levels % 2 == 0

        pa, pb, po, ps = [], [], [], []
        for a in range(self.dim):
            for b in range(self.dim):
                if a & b:
                    continue
                pa.append(a)
                pb.append(b)
                po.append(a | b)
                ps.append(product_sign(a, b))
        self.pair_a = np.array(pa, dtype=np.int64)
        self.pair_b = np.array(pb, dtype=np.int64)
        self.pair_out = np.array(po, dtype=np.int64)
        self.pair_sign = np.array(ps, dtype=np.float64)

    @lru_cache(maxsize=MAX_ORDER)
    def berezin_table(self, j: int):
        """Index arrays for right Berezin integration over e_j (1-based).

        Returns (src, dst, sign): for each mask containing bit j-1, the mask
        with e_j removed and the sign of moving e_j to the rightmost slot.
        """
        bit = 1 << (j - 1)
        src, dst, sgn = [], [], []
        for m in range(self.dim):
            if not m & bit:
                continue
            above = bin(m >> j).count("1")
            src.append(m)
            dst.append(m & ~bit)
            sgn.append(-1.0 if above & 1 else 1.0)
        return (
            np.array(src, dtype=np.int64),
            np.array(dst, dtype=np.int64),
            np.array(sgn, dtype=np.float64),
        )


@lru_cache(maxsize=MAX_ORDER)
def tables_for(order: int) -> BladeTables:
    return BladeTables(order)
