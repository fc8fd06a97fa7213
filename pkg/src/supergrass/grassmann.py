"""Arithmetic in the finite complex Grassmann algebra CB_L.

Elements are stored as dense complex vectors over the 2^L blade basis
(bit j-1 of the index <=> generator e_j present).  All ring operations are
exact up to double-precision roundoff: products of nilpotents terminate,
no epsilon pruning is applied inside arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import kernels
from ._tables import MAX_ORDER, tables_for
from .errors import ConfigurationError, DomainError, NotInvertible, ParityError

__all__ = [
    "Algebra",
    "GrassmannElement",
    "involution",
    "decompose",
    "inverse",
    "analytic_even",
    "berezin_integrate",
    "even_norm",
]


class Algebra:
    """Session configuration: number of generators plus tolerances.

    Every element carries a reference to its algebra; elements from algebras
    of different order never mix.
    """

    def __init__(self, order: int = 6, tolerance: float = 1e-10,
                 prune_threshold: float = 0.0):
        if not 1 <= order <= MAX_ORDER:
            raise ConfigurationError(
                f"algebra order must be in 1..{MAX_ORDER}, got {order}")
        if tolerance <= 0:
            raise ConfigurationError("tolerance must be positive")
        if prune_threshold < 0:
            raise ConfigurationError("prune_threshold must be nonnegative")
        self.order = order
        self.tolerance = tolerance
        self.prune_threshold = prune_threshold
        self.tables = tables_for(order)
        self.dim = self.tables.dim

    # -- constructors ------------------------------------------------------

    def zero(self) -> "GrassmannElement":
        return GrassmannElement(self, np.zeros(self.dim, dtype=np.complex128))

    def one(self) -> "GrassmannElement":
        return self.scalar(1.0)

    def scalar(self, c: complex) -> "GrassmannElement":
        v = np.zeros(self.dim, dtype=np.complex128)
        v[0] = c
        return GrassmannElement(self, v)

    def generator(self, j: int) -> "GrassmannElement":
        """e_j for 1 <= j <= order."""
        if not 1 <= j <= self.order:
            raise ConfigurationError(
                f"generator index {j} out of range 1..{self.order}")
        v = np.zeros(self.dim, dtype=np.complex128)
        v[1 << (j - 1)] = 1.0
        return GrassmannElement(self, v)

    def element(self, blades: dict[int, complex]) -> "GrassmannElement":
        v = np.zeros(self.dim, dtype=np.complex128)
        for mask, coeff in blades.items():
            if not 0 <= mask < self.dim:
                raise ConfigurationError(
                    f"blade mask {mask} out of range for order {self.order}")
            v[mask] += coeff
        return GrassmannElement(self, v)

    def from_vector(self, vec: np.ndarray) -> "GrassmannElement":
        v = np.asarray(vec, dtype=np.complex128)
        if v.shape != (self.dim,):
            raise ConfigurationError(
                f"expected vector of shape ({self.dim},), got {v.shape}")
        return GrassmannElement(self, v.copy())

    def coerce(self, x) -> "GrassmannElement":
        if isinstance(x, GrassmannElement):
            self.check_same(x.algebra)
            return x
        if isinstance(x, (int, float, complex, np.number)):
            return self.scalar(complex(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to GrassmannElement")

    def check_same(self, other: "Algebra"):
        if other.order != self.order:
            raise ConfigurationError(
                f"mixing algebras of order {self.order} and {other.order}")

    def __repr__(self):
        return f"Algebra(order={self.order}, tolerance={self.tolerance})"


def _blade_str(mask: int) -> str:
    if mask == 0:
        return "1"
    return "^".join(f"e{j + 1}" for j in range(mask.bit_length()) if mask >> j & 1)


def _coeff_str(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:g}"
    if c.real == 0:
        return f"{c.imag:g}i"
    return f"({c.real:g}{c.imag:+g}i)"


class GrassmannElement:
    """One element of CB_L; immutable after construction."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: Algebra, coeffs: np.ndarray):
        self.algebra = algebra
        if algebra.prune_threshold > 0:
            coeffs = np.where(
                np.abs(coeffs) <= algebra.prune_threshold, 0.0, coeffs)
        coeffs.flags.writeable = False
        self.coeffs = coeffs

    # -- ring operations ---------------------------------------------------

    def _binary(self, other):
        if isinstance(other, GrassmannElement):
            self.algebra.check_same(other.algebra)
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return self.algebra.scalar(complex(other))
        return None

    def __add__(self, other):
        other = self._binary(other)
        if other is None:
            return NotImplemented
        return GrassmannElement(self.algebra, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._binary(other)
        if other is None:
            return NotImplemented
        return GrassmannElement(self.algebra, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        other = self._binary(other)
        if other is None:
            return NotImplemented
        return GrassmannElement(self.algebra, other.coeffs - self.coeffs)

    def __neg__(self):
        return GrassmannElement(self.algebra, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return GrassmannElement(self.algebra, self.coeffs * complex(other))
        if not isinstance(other, GrassmannElement):
            return NotImplemented
        self.algebra.check_same(other.algebra)
        t = self.algebra.tables
        out = np.zeros(self.algebra.dim, dtype=np.complex128)
        kernels.mul_into(out, self.coeffs, other.coeffs,
                         t.pair_a, t.pair_b, t.pair_out, t.pair_sign)
        return GrassmannElement(self.algebra, out)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return GrassmannElement(self.algebra, self.coeffs * complex(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return GrassmannElement(self.algebra, self.coeffs / complex(other))
        other = self._binary(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        acc = self.algebra.one()
        base = self
        k = n
        while k:
            if k & 1:
                acc = acc * base
            base = base * base if k > 1 else base
            k >>= 1
        return acc

    # -- involutions and parts ---------------------------------------------

    def star(self) -> "GrassmannElement":
        """B0 - B1: flips the sign of odd-level blades."""
        return GrassmannElement(
            self.algebra, self.coeffs * self.algebra.tables.star_signs)

    def bar(self) -> "GrassmannElement":
        """Complex conjugation of all coefficients (blades treated as real)."""
        return GrassmannElement(self.algebra, np.conj(self.coeffs))

    def adjoint(self) -> "GrassmannElement":
        """Conjugate coefficients; odd-level blades pick up -i."""
        return GrassmannElement(
            self.algebra,
            np.conj(self.coeffs) * self.algebra.tables.adjoint_factors)

    @property
    def body(self) -> complex:
        return complex(self.coeffs[0])

    def body_element(self) -> "GrassmannElement":
        return self.algebra.scalar(self.body)

    def soul(self) -> "GrassmannElement":
        v = self.coeffs.copy()
        v[0] = 0.0
        return GrassmannElement(self.algebra, v)

    def even(self) -> "GrassmannElement":
        return GrassmannElement(
            self.algebra,
            np.where(self.algebra.tables.even_mask, self.coeffs, 0.0))

    def odd(self) -> "GrassmannElement":
        return GrassmannElement(
            self.algebra,
            np.where(self.algebra.tables.even_mask, 0.0, self.coeffs))

    def is_even(self, tol: float | None = None) -> bool:
        return self.odd().max_abs() <= (tol if tol is not None else 0.0)

    def is_odd(self, tol: float | None = None) -> bool:
        return self.even().max_abs() <= (tol if tol is not None else 0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    # -- inverse and analytic functions --------------------------------------

    def inverse(self) -> "GrassmannElement":
        """Ring inverse b^-1 * sum_k (-s/b)^k; needs an invertible body."""
        b = self.body
        if abs(b) <= self.algebra.tolerance:
            raise NotInvertible(f"element has zero body: {self!r}")
        s_over_b = self.soul() * (-1.0 / b)
        acc = self.algebra.one()
        term = self.algebra.one()
        for _ in range(self.algebra.order):
            term = term * s_over_b
            if term.is_zero():
                break
            acc = acc + term
        return acc * (1.0 / b)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def blades(self) -> dict[int, complex]:
        return {int(m): complex(c)
                for m, c in enumerate(self.coeffs) if c != 0}

    # -- misc ----------------------------------------------------------------

    def approx_eq(self, other, tol: float | None = None) -> bool:
        other = self.algebra.coerce(other)
        if tol is None:
            tol = self.algebra.tolerance
        return float(np.max(np.abs(self.coeffs - other.coeffs))) <= tol

    def __repr__(self):
        terms = []
        for m, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if m == 0:
                terms.append(_coeff_str(c))
            elif c == 1:
                terms.append(_blade_str(m))
            else:
                terms.append(f"{_coeff_str(c)}*{_blade_str(m)}")
        return " + ".join(terms) if terms else "0"


# -- spec-level operation surface ---------------------------------------------

def involution(x: GrassmannElement, kind: str) -> GrassmannElement:
    try:
        return {"star": x.star, "bar": x.bar, "adjoint": x.adjoint}[kind]()
    except KeyError:
        raise ConfigurationError(f"unknown involution kind {kind!r}") from None


def decompose(x: GrassmannElement, part: str) -> GrassmannElement:
    try:
        return {"body": x.body_element, "soul": x.soul,
                "even": x.even, "odd": x.odd}[part]()
    except KeyError:
        raise ConfigurationError(f"unknown part {part!r}") from None


def inverse(x: GrassmannElement) -> GrassmannElement:
    return x.inverse()


def _taylor_about_body(x: GrassmannElement, derivs) -> GrassmannElement:
    """sum_k f^(k)(body)/k! * soul^k; exact because soul^(L+1) = 0.

    `derivs(k)` returns f^(k)(body). Everything lives in the commutative
    subalgebra C[x], so the series is unambiguous for any parity of x.
    """
    alg = x.algebra
    acc = alg.scalar(derivs(0))
    soul = x.soul()
    power = alg.one()
    for k in range(1, alg.order + 1):
        power = power * soul
        if power.is_zero():
            break
        acc = acc + power * (derivs(k) / math.factorial(k))
    return acc


def g_sqrt(x: GrassmannElement) -> GrassmannElement:
    """Principal square root; requires an invertible body."""
    b = x.body
    if abs(b) <= x.algebra.tolerance:
        raise NotInvertible("sqrt needs a nonzero body")
    root = complex(np.sqrt(np.complex128(b)))

    def derivs(k):
        c = 1.0
        for i in range(k):
            c *= 0.5 - i
        return c * root / b**k

    return _taylor_about_body(x, derivs)


def g_exp(x: GrassmannElement) -> GrassmannElement:
    eb = complex(np.exp(np.complex128(x.body)))
    return _taylor_about_body(x, lambda k: eb)


def g_cosh(x: GrassmannElement) -> GrassmannElement:
    b = np.complex128(x.body)
    ch, sh = complex(np.cosh(b)), complex(np.sinh(b))
    return _taylor_about_body(x, lambda k: ch if k % 2 == 0 else sh)


def g_sinh(x: GrassmannElement) -> GrassmannElement:
    b = np.complex128(x.body)
    ch, sh = complex(np.cosh(b)), complex(np.sinh(b))
    return _taylor_about_body(x, lambda k: sh if k % 2 == 0 else ch)


def _series_function(x: GrassmannElement, coeff_fn, name: str,
                     max_terms: int = 4000) -> GrassmannElement:
    """Evaluate sum_k coeff_fn(k) x^k for an infinite series, term by term."""
    alg = x.algebra
    acc = alg.zero()
    power = alg.one()
    quiet = 0
    for k in range(max_terms):
        c = coeff_fn(k)
        if c != 0:
            term = power * c
            acc = acc + term
            if term.max_abs() < 1e-18 * max(1.0, acc.max_abs()):
                quiet += 1
                if quiet > alg.order + 2:
                    return acc
            else:
                quiet = 0
        power = power * x
        if power.is_zero():
            return acc
        if power.max_abs() > 1e12:
            raise DomainError(f"series {name} diverges at body {x.body}")
    raise DomainError(f"series {name} did not converge in {max_terms} terms")


def analytic_even(x: GrassmannElement, f: str,
                  coefficients=None) -> GrassmannElement:
    """Analytic function of an even element (sqrt, exp, cosh, sinh, series)."""
    if not x.is_even():
        raise ParityError(f"analytic_even needs an even element, got {x!r}")
    if f == "sqrt":
        return g_sqrt(x)
    if f == "exp":
        return g_exp(x)
    if f == "cosh":
        return g_cosh(x)
    if f == "sinh":
        return g_sinh(x)
    if f == "series":
        if coefficients is None:
            raise ConfigurationError("series needs explicit coefficients")
        coefficients = list(coefficients)
        return _series_function(
            x, lambda k: coefficients[k] if k < len(coefficients) else 0.0,
            "series")
    raise ConfigurationError(f"unknown analytic function {f!r}")


def entire_series(x: GrassmannElement, coeff_fn, name: str) -> GrassmannElement:
    """sum_k coeff_fn(k) x^k for series convergent at the body of x."""
    return _series_function(x, coeff_fn, name)


def berezin_integrate(x: GrassmannElement, j: int) -> GrassmannElement:
    """Right Berezin integral: int x de_j.

    Each blade is put in canonical order with e_j factored to the rightmost
    position; blades without e_j contribute zero.
    """
    alg = x.algebra
    if not 1 <= j <= alg.order:
        raise ConfigurationError(
            f"Berezin index {j} out of range 1..{alg.order}")
    src, dst, sgn = alg.tables.berezin_table(j)
    out = np.zeros(alg.dim, dtype=np.complex128)
    out[dst] = sgn * x.coeffs[src]
    return GrassmannElement(alg, out)


def berezin_integrate_left(x: GrassmannElement, j: int) -> GrassmannElement:
    """Left-measure integral int de_j x, with de_j anticommuting past blades."""
    alg = x.algebra
    if not 1 <= j <= alg.order:
        raise ConfigurationError(
            f"Berezin index {j} out of range 1..{alg.order}")
    src, dst, sgn = alg.tables.berezin_table(j)
    # sign (-1)^(level+1) of the remainder blade, from moving de_j through it
    rem_levels = alg.tables.levels[dst]
    extra = np.where(rem_levels % 2 == 0, -1.0, 1.0)
    out = np.zeros(alg.dim, dtype=np.complex128)
    out[dst] = sgn * extra * x.coeffs[src]
    return GrassmannElement(alg, out)


def even_norm(x: GrassmannElement) -> GrassmannElement:
    """sqrt(x * adjoint(x)) for even x with nonnegative real body."""
    if not x.is_even():
        raise ParityError("even_norm needs an even element")
    p = x * x.adjoint()
    b = p.body
    tol = x.algebra.tolerance
    if b.real < -tol or abs(b.imag) > max(tol, 1e-9 * abs(b.real)):
        raise DomainError(
            f"x * adjoint(x) has non-admissible body {b} for even_norm")
    return g_sqrt(p)
