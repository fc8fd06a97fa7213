"""Truncated graded Fock space for the Heisenberg-Weyl superalgebra.

Basis kets |n;-> (even) and |n;+> (odd) with n = 0..cutoff.  Grassmann
coefficients stand to the LEFT of kets; when an odd letter (b or b-dagger)
passes a coefficient it replaces it by its star conjugate.  That single
convention reproduces every recurrence this package solves.

Operators therefore act semilinearly.  A realized operator is stored as a
pair of blade-indexed matrix dictionaries (even-word part, odd-word part):
the action on a coefficient array v is  M_e v + M_o star(v).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._backend import kernels
from ._tables import tables_for
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DegenerateStateError,
)
from .grassmann import Algebra, GrassmannElement, g_sqrt

MINUS, PLUS = 0, 1
SECTOR_NAMES = {MINUS: "-", PLUS: "+"}
LETTERS = ("a", "ad", "b", "bd")
ODD_LETTERS = frozenset(("b", "bd"))


class FockSpace:
    """Truncation context: algebra, boson cutoff N_max and guard band G."""

    def __init__(self, algebra: Algebra, cutoff: int = 32, guard: int = 8):
        if cutoff < 2:
            raise ConfigurationError("cutoff must be at least 2")
        if not 0 <= guard < cutoff:
            raise ConfigurationError("guard must satisfy 0 <= G < cutoff")
        self.algebra = algebra
        self.cutoff = cutoff
        self.guard = guard
        self.dim = 2 * (cutoff + 1)

    def index(self, n: int, sector: int) -> int:
        if not 0 <= n <= self.cutoff or sector not in (MINUS, PLUS):
            raise ConfigurationError(f"bad basis label ({n}, {sector})")
        return 2 * n + sector

    def basis(self, n: int, sector: int) -> "SuperState":
        data = np.zeros((self.dim, self.algebra.dim), dtype=np.complex128)
        data[self.index(n, sector), 0] = 1.0
        return SuperState(self, data)

    def zero_state(self) -> "SuperState":
        return SuperState(
            self, np.zeros((self.dim, self.algebra.dim), dtype=np.complex128))

    def state(self, coeffs: dict[tuple[int, int], GrassmannElement]) -> "SuperState":
        data = np.zeros((self.dim, self.algebra.dim), dtype=np.complex128)
        for (n, sector), elem in coeffs.items():
            self.algebra.check_same(elem.algebra)
            data[self.index(n, sector)] += elem.coeffs
        return SuperState(self, data)

    def from_rails(self, minus, plus) -> "SuperState":
        """Build a state from coefficient sequences C_n (minus) and D_n (plus)."""
        data = np.zeros((self.dim, self.algebra.dim), dtype=np.complex128)
        for n, elem in enumerate(minus or []):
            if elem is not None:
                data[2 * n + MINUS] = elem.coeffs
        for n, elem in enumerate(plus or []):
            if elem is not None:
                data[2 * n + PLUS] = elem.coeffs
        return SuperState(self, data)

    def guard_row_limit(self) -> int:
        # first row index excluded from guarded comparisons
        return 2 * (self.cutoff - self.guard) + 2

    def check_same(self, other: "FockSpace"):
        self.algebra.check_same(other.algebra)
        if other.cutoff != self.cutoff:
            raise ConfigurationError("mixing Fock spaces of different cutoff")

    def __repr__(self):
        return (f"FockSpace(order={self.algebra.order}, cutoff={self.cutoff},"
                f" guard={self.guard})")


@lru_cache(maxsize=32)
def _letter_matrices(cutoff: int):
    """Real scalar matrices of a, ad, b, bd on the doubled basis."""
    dim = 2 * (cutoff + 1)
    a = np.zeros((dim, dim))
    ad = np.zeros((dim, dim))
    b = np.zeros((dim, dim))
    bd = np.zeros((dim, dim))
    for n in range(cutoff + 1):
        for s in (MINUS, PLUS):
            if n > 0:
                a[2 * (n - 1) + s, 2 * n + s] = np.sqrt(n)
            if n < cutoff:
                ad[2 * (n + 1) + s, 2 * n + s] = np.sqrt(n + 1)
        b[2 * n + MINUS, 2 * n + PLUS] = 1.0
        bd[2 * n + PLUS, 2 * n + MINUS] = 1.0
    return {"a": a, "ad": ad, "b": b, "bd": bd}


class SuperState:
    """Grassmann-coefficient vector over the truncated graded basis."""

    __slots__ = ("space", "data", "truncated")

    def __init__(self, space: FockSpace, data: np.ndarray,
                 truncated: bool = False):
        self.space = space
        self.data = data
        self.truncated = truncated

    @property
    def algebra(self) -> Algebra:
        return self.space.algebra

    def coefficient(self, n: int, sector: int) -> GrassmannElement:
        return GrassmannElement(
            self.algebra, self.data[self.space.index(n, sector)].copy())

    def __add__(self, other: "SuperState") -> "SuperState":
        self.space.check_same(other.space)
        return SuperState(self.space, self.data + other.data,
                          self.truncated or other.truncated)

    def __sub__(self, other: "SuperState") -> "SuperState":
        self.space.check_same(other.space)
        return SuperState(self.space, self.data - other.data,
                          self.truncated or other.truncated)

    def __neg__(self) -> "SuperState":
        return SuperState(self.space, -self.data, self.truncated)

    def scale(self, c: complex) -> "SuperState":
        return SuperState(self.space, self.data * complex(c), self.truncated)

    def star(self) -> "SuperState":
        return SuperState(
            self.space, self.data * self.algebra.tables.star_signs[None, :],
            self.truncated)

    def left_mul(self, elem: GrassmannElement) -> "SuperState":
        """Multiply every coefficient by elem from the left."""
        self.algebra.check_same(elem.algebra)
        return SuperState(self.space, self.data @ _mult_matrix(elem, "left").T,
                          self.truncated)

    def right_mul(self, elem: GrassmannElement) -> "SuperState":
        """Append a constant to the right of the ket: |n;-> c and |n;+> c.

        Passing the constant left past an odd ket stars it, so the plus rail
        is multiplied by star(elem).
        """
        self.algebra.check_same(elem.algebra)
        out = np.empty_like(self.data)
        out[0::2] = self.data[0::2] @ _mult_matrix(elem, "right").T
        out[1::2] = self.data[1::2] @ _mult_matrix(elem.star(), "right").T
        return SuperState(self.space, out, self.truncated)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    def max_abs_below_guard(self) -> float:
        lim = self.space.guard_row_limit()
        return float(np.max(np.abs(self.data[:lim])))

    def zero_guard_band(self) -> "SuperState":
        out = self.data.copy()
        out[self.space.guard_row_limit():] = 0.0
        return SuperState(self.space, out, self.truncated)

    def copy(self) -> "SuperState":
        return SuperState(self.space, self.data.copy(), self.truncated)

    def __repr__(self):
        nz = int(np.count_nonzero(np.abs(self.data).sum(axis=1)))
        return (f"SuperState({self.space!r}, {nz} nonzero components,"
                f" truncated={self.truncated})")


def _mult_matrix(elem: GrassmannElement, side: str) -> np.ndarray:
    """Matrix of left/right ring multiplication by elem on blade vectors."""
    t = elem.algebra.tables
    out = np.zeros((elem.algebra.dim, elem.algebra.dim), dtype=np.complex128)
    if side == "left":
        kernels.left_mult_matrix(out, elem.coeffs, t.pair_a, t.pair_b,
                                 t.pair_out, t.pair_sign)
    else:
        kernels.right_mult_matrix(out, elem.coeffs, t.pair_a, t.pair_b,
                                  t.pair_out, t.pair_sign)
    return out


# ---------------------------------------------------------------------------
# Operator expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    coeff: GrassmannElement
    word: tuple[str, ...]

    @property
    def word_parity(self) -> int:
        return sum(1 for l in self.word if l in ODD_LETTERS) % 2


class SuperOperatorExpr:
    """Formal sum of (left coefficient, operator word) terms.

    Words over {a, ad, b, bd} are stored verbatim; the identity is the empty
    word.  Multiplication concatenates words and passes the right factor's
    coefficient through the left factor's word (star per odd letter).
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: Algebra, terms):
        self.algebra = algebra
        self.terms = tuple(t for t in terms if not t.coeff.is_zero())

    # constructors --------------------------------------------------------

    @staticmethod
    def letter(algebra: Algebra, name: str) -> "SuperOperatorExpr":
        if name == "I":
            return SuperOperatorExpr(algebra, [Term(algebra.one(), ())])
        if name not in LETTERS:
            raise ConfigurationError(f"unknown letter {name!r}")
        return SuperOperatorExpr(algebra, [Term(algebra.one(), (name,))])

    @staticmethod
    def zero(algebra: Algebra) -> "SuperOperatorExpr":
        return SuperOperatorExpr(algebra, [])

    @staticmethod
    def identity(algebra: Algebra) -> "SuperOperatorExpr":
        return SuperOperatorExpr.letter(algebra, "I")

    # algebra ----------------------------------------------------------------

    def _coerce_coeff(self, c) -> GrassmannElement:
        return self.algebra.coerce(c)

    def __add__(self, other: "SuperOperatorExpr") -> "SuperOperatorExpr":
        self.algebra.check_same(other.algebra)
        return SuperOperatorExpr(self.algebra, self.terms + other.terms)

    def __sub__(self, other: "SuperOperatorExpr") -> "SuperOperatorExpr":
        return self + (-other)

    def __neg__(self) -> "SuperOperatorExpr":
        return SuperOperatorExpr(
            self.algebra, [Term(-t.coeff, t.word) for t in self.terms])

    def left_scale(self, c) -> "SuperOperatorExpr":
        c = self._coerce_coeff(c)
        return SuperOperatorExpr(
            self.algebra, [Term(c * t.coeff, t.word) for t in self.terms])

    def __rmul__(self, c) -> "SuperOperatorExpr":
        return self.left_scale(c)

    def __mul__(self, other) -> "SuperOperatorExpr":
        if not isinstance(other, SuperOperatorExpr):
            # right scalar: pass it through this expression's words
            c = self._coerce_coeff(other)
            out = []
            for t in self.terms:
                passed = c.star() if t.word_parity else c
                out.append(Term(t.coeff * passed, t.word))
            return SuperOperatorExpr(self.algebra, out)
        self.algebra.check_same(other.algebra)
        out = []
        for t1 in self.terms:
            for t2 in other.terms:
                passed = t2.coeff.star() if t1.word_parity else t2.coeff
                out.append(Term(t1.coeff * passed, t1.word + t2.word))
        return SuperOperatorExpr(self.algebra, out)

    def adjoint(self) -> "SuperOperatorExpr":
        """Formal adjoint: reverse the word, swap a<->ad and b<->bd, adjoint
        the coefficient and star it once per odd letter passed."""
        swap = {"a": "ad", "ad": "a", "b": "bd", "bd": "b"}
        out = []
        for t in self.terms:
            word = tuple(swap[l] for l in reversed(t.word))
            coeff = t.coeff.adjoint()
            if t.word_parity:
                coeff = coeff.star()
            out.append(Term(coeff, word))
        return SuperOperatorExpr(self.algebra, out)

    def word_parities(self) -> set[int]:
        return {t.word_parity for t in self.terms}

    def max_word_len(self) -> int:
        return max((len(t.word) for t in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "0"
        def fmt(t):
            w = "*".join(t.word) if t.word else "I"
            return f"({t.coeff!r})*{w}"
        return " + ".join(fmt(t) for t in self.terms)


def letters(algebra: Algebra):
    """Convenience tuple (a, ad, b, bd, I) of elementary expressions."""
    return tuple(SuperOperatorExpr.letter(algebra, n)
                 for n in ("a", "ad", "b", "bd", "I"))


# ---------------------------------------------------------------------------
# Applying expressions to states
# ---------------------------------------------------------------------------

def _apply_letter(space: FockSpace, name: str, data: np.ndarray):
    """Apply one letter to a coefficient array; returns (array, dropped)."""
    mats = _letter_matrices(space.cutoff)
    signs = space.algebra.tables.star_signs
    dropped = 0.0
    if name in ODD_LETTERS:
        data = data * signs[None, :]
    if name == "ad":
        top = float(np.max(np.abs(data[-2:]))) if data.size else 0.0
        if top > 0.0:
            dropped = top * np.sqrt(space.cutoff + 1)
    return mats[name] @ data, dropped


def apply_word(expr: SuperOperatorExpr, psi: SuperState) -> SuperState:
    """Act with an operator expression on a state (letters right-to-left)."""
    psi.algebra.check_same(expr.algebra)
    space = psi.space
    out = np.zeros_like(psi.data)
    truncated = psi.truncated
    for term in expr.terms:
        cur = psi.data
        for letter in reversed(term.word):
            cur, dropped = _apply_letter(space, letter, cur)
            if dropped > 0.0:
                truncated = True
        out += cur @ _mult_matrix(term.coeff, "left").T
    return SuperState(space, out, truncated)


# ---------------------------------------------------------------------------
# Realized operators
# ---------------------------------------------------------------------------

class OperatorMatrix:
    """Blade-indexed realization of an operator on the truncation.

    `even` and `odd` map blade masks to complex (dim x dim) blocks; the
    action on coefficients v is  sum_m E_m blade_m v + sum_m O_m blade_m star(v).
    """

    __slots__ = ("space", "even", "odd", "provenance")

    def __init__(self, space: FockSpace, even=None, odd=None, provenance=None):
        self.space = space
        self.even = dict(even or {})
        self.odd = dict(odd or {})
        self.provenance = provenance

    # constructors ---------------------------------------------------------

    @staticmethod
    def identity(space: FockSpace) -> "OperatorMatrix":
        return OperatorMatrix(
            space, {0: np.eye(space.dim, dtype=np.complex128)}, {}, "I")

    @staticmethod
    def zero(space: FockSpace) -> "OperatorMatrix":
        return OperatorMatrix(space, {}, {}, "0")

    # helpers ----------------------------------------------------------------

    def _prune(self):
        for d in (self.even, self.odd):
            for m in [m for m, blk in d.items() if not np.any(blk)]:
                del d[m]
        return self

    def copy(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space,
                              {m: blk.copy() for m, blk in self.even.items()},
                              {m: blk.copy() for m, blk in self.odd.items()},
                              self.provenance)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self.space.check_same(other.space)
        out = self.copy()
        for src, dst in ((other.even, out.even), (other.odd, out.odd)):
            for m, blk in src.items():
                if m in dst:
                    dst[m] = dst[m] + blk
                else:
                    dst[m] = blk.copy()
        return out._prune()

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "OperatorMatrix":
        return OperatorMatrix(
            self.space,
            {m: blk * c for m, blk in self.even.items()},
            {m: blk * c for m, blk in self.odd.items()},
            self.provenance)

    def _star_blades(self, d):
        signs = self.space.algebra.tables.star_signs
        return {m: blk * signs[m] for m, blk in d.items()}

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        """Composition (self after other) in the semilinear pair algebra."""
        self.space.check_same(other.space)
        sign_of = _pair_sign_lookup(self.space.algebra)
        out = OperatorMatrix(self.space, {}, {})

        def accumulate(dst, left, right):
            for ma, A in left.items():
                for mb, B in right.items():
                    if ma & mb:
                        continue
                    m = ma | mb
                    blk = sign_of(ma, mb) * (A @ B)
                    if m in dst:
                        dst[m] += blk
                    else:
                        dst[m] = blk

        accumulate(out.even, self.even, other.even)
        accumulate(out.even, self.odd, self._star_blades(other.odd))
        accumulate(out.odd, self.even, other.odd)
        accumulate(out.odd, self.odd, self._star_blades(other.even))
        return out._prune()

    def left_mul(self, elem: GrassmannElement) -> "OperatorMatrix":
        """Scale by a Grassmann constant from the left."""
        sign_of = _pair_sign_lookup(self.space.algebra)
        out = OperatorMatrix(self.space, {}, {})
        for src, dst in ((self.even, out.even), (self.odd, out.odd)):
            for me, c in elem.blades().items():
                for m, blk in src.items():
                    if me & m:
                        continue
                    key = me | m
                    piece = sign_of(me, m) * c * blk
                    if key in dst:
                        dst[key] += piece
                    else:
                        dst[key] = piece
        return out._prune()

    def apply(self, psi: SuperState) -> SuperState:
        psi.space.check_same(self.space)
        alg = self.space.algebra
        t = alg.tables
        out = np.zeros_like(psi.data)
        for part, source in ((self.even, psi.data),
                             (self.odd, psi.data * t.star_signs[None, :])):
            for m, blk in part.items():
                mixed = blk @ source
                b_idx, o_idx, signs = _rows_for_mask(alg, m)
                out[:, o_idx] += signs[None, :] * mixed[:, b_idx]
        return SuperState(self.space, out, psi.truncated)

    def body(self) -> tuple[np.ndarray, np.ndarray]:
        z = np.zeros((self.space.dim, self.space.dim), dtype=np.complex128)
        return self.even.get(0, z), self.odd.get(0, z)

    def max_abs(self) -> float:
        vals = [np.max(np.abs(blk)) for blk in (*self.even.values(),
                                                *self.odd.values())]
        return float(max(vals)) if vals else 0.0

    def max_abs_below_guard(self, extra_guard: int = 0) -> float:
        lim = 2 * (self.space.cutoff - self.space.guard - extra_guard) + 2
        vals = [np.max(np.abs(blk[:lim, :lim]))
                for blk in (*self.even.values(), *self.odd.values())]
        return float(max(vals)) if vals else 0.0

    def blade_count(self) -> int:
        return len(self.even) + len(self.odd)


@lru_cache(maxsize=16)
def _pair_sign_cache(order: int):
    t = tables_for(order)
    table = np.zeros((t.dim, t.dim))
    table[t.pair_a, t.pair_b] = t.pair_sign
    return table


def _pair_sign_lookup(algebra: Algebra):
    table = _pair_sign_cache(algebra.order)

    def sign_of(a: int, b: int) -> float:
        return table[a, b]

    return sign_of


@lru_cache(maxsize=4096)
def _rows_for_mask_cached(order: int, mask: int):
    t = tables_for(order)
    sel = t.pair_a == mask
    return t.pair_b[sel], t.pair_out[sel], t.pair_sign[sel]


def _rows_for_mask(algebra: Algebra, mask: int):
    return _rows_for_mask_cached(algebra.order, mask)


def realize_matrix(expr: SuperOperatorExpr, space: FockSpace) -> OperatorMatrix:
    """Column k of the result is apply_word(expr, basis state k)."""
    space.algebra.check_same(expr.algebra)
    mats = _letter_matrices(space.cutoff)
    out = OperatorMatrix(space, {}, {}, provenance=expr)
    for term in expr.terms:
        w = np.eye(space.dim)
        for letter in term.word:
            w = w @ mats[letter]
        target = out.odd if term.word_parity else out.even
        for m, c in term.coeff.blades().items():
            blk = c * w
            if m in target:
                target[m] = target[m] + blk
            else:
                target[m] = blk.astype(np.complex128)
    return out._prune()


def operator_exp(expr_or_matrix, space: FockSpace | None = None,
                 tol: float | None = None,
                 max_terms: int | None = None) -> OperatorMatrix:
    """Taylor series with scaling-and-squaring driven by the body norm.

    Soul-only exponents terminate exactly by nilpotency; the body part is
    scaled so the series converges like exp of a sub-unit-norm matrix.
    """
    if isinstance(expr_or_matrix, SuperOperatorExpr):
        if space is None:
            raise ConfigurationError("operator_exp needs a Fock space")
        M = realize_matrix(expr_or_matrix, space)
    else:
        M = expr_or_matrix
        space = M.space
    tol = tol if tol is not None else space.algebra.tolerance
    be, bo = M.body()
    body_norm = float(np.linalg.norm(be, 2) + np.linalg.norm(bo, 2))
    squarings = max(0, int(np.ceil(np.log2(body_norm)))) + 1 if body_norm > 0.5 else 0
    X = M.scale(0.5**squarings)
    acc = OperatorMatrix.identity(space)
    term = OperatorMatrix.identity(space)
    if max_terms is None:
        max_terms = 2 * space.dim + 80
    quiet = 0
    for k in range(1, max_terms + 1):
        term = term @ X
        term = term.scale(1.0 / k)
        tmax = term.max_abs()
        if tmax == 0.0:
            break
        acc = acc + term
        if tmax < tol * 1e-4 * max(1.0, acc.max_abs()):
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    else:
        raise ConvergenceError(
            "operator exponential did not converge",
            {"terms": max_terms, "squarings": squarings,
             "last_term": term.max_abs(), "body_norm": body_norm})
    for _ in range(squarings):
        acc = acc @ acc
    acc.provenance = ("exp", getattr(M, "provenance", None))
    return acc


# ---------------------------------------------------------------------------
# Inner products, norms, residuals
# ---------------------------------------------------------------------------

def inner_product(phi: SuperState, psi: SuperState) -> GrassmannElement:
    """sum over the basis of adjoint(c_phi) * c_psi."""
    phi.space.check_same(psi.space)
    alg = phi.algebra
    t = alg.tables
    left = np.conj(phi.data) * t.adjoint_factors[None, :]
    out = np.zeros(alg.dim, dtype=np.complex128)
    kernels.mul_accumulate_rows(out, left, psi.data, t.pair_a, t.pair_b,
                                t.pair_out, t.pair_sign)
    return GrassmannElement(alg, out)


def norm_element(psi: SuperState) -> GrassmannElement:
    ip = inner_product(psi, psi)
    if ip.body.real <= psi.algebra.tolerance:
        raise DegenerateStateError(
            f"state norm has non-invertible body {ip.body}")
    return g_sqrt(ip)


def normalize(psi: SuperState) -> SuperState:
    return psi.right_mul(norm_element(psi).inverse())


def residual(expr: SuperOperatorExpr, z, psi: SuperState) -> float:
    """Max blade magnitude of (expr - z I) psi below the guard band."""
    z = psi.algebra.coerce(z)
    res = apply_word(expr, psi) - psi.left_mul(z)
    return res.max_abs_below_guard()


# ---------------------------------------------------------------------------
# Superalgebra relation checks
# ---------------------------------------------------------------------------

def _bracket(x: OperatorMatrix, y: OperatorMatrix, px: int, py: int):
    xy = x @ y
    yx = y @ x
    return xy + yx if (px and py) else xy - yx


def check_relations(space: FockSpace) -> dict[str, float]:
    """Deviations of the defining relations and the graded Jacobi identity.

    All checks exclude the guard band; they are exact there because only the
    top cutoff rows feel the truncation.
    """
    alg = space.algebra
    a, ad, b, bd, one = (realize_matrix(SuperOperatorExpr.letter(alg, n), space)
                         for n in ("a", "ad", "b", "bd", "I"))
    parity = {"a": 0, "ad": 0, "b": 1, "bd": 1, "I": 0}
    mats = {"a": a, "ad": ad, "b": b, "bd": bd, "I": one}

    report: dict[str, float] = {}
    report["[a,ad]-I"] = (_bracket(a, ad, 0, 0) - one).max_abs_below_guard()
    report["{b,bd}-I"] = (_bracket(b, bd, 1, 1) - one).max_abs_below_guard()
    report["[a,b]"] = _bracket(a, b, 0, 1).max_abs_below_guard()
    report["[a,bd]"] = _bracket(a, bd, 0, 1).max_abs_below_guard()
    report["[ad,b]"] = _bracket(ad, b, 0, 1).max_abs_below_guard()
    report["[ad,bd]"] = _bracket(ad, bd, 0, 1).max_abs_below_guard()
    report["b^2"] = (b @ b).max_abs_below_guard()
    report["bd^2"] = (bd @ bd).max_abs_below_guard()
    report["{b,b}"] = _bracket(b, b, 1, 1).max_abs_below_guard()

    worst = 0.0
    names = ("a", "ad", "b", "bd", "I")
    for nx in names:
        for ny in names:
            for nz in names:
                px, py, pz = parity[nx], parity[ny], parity[nz]
                x, y, z = mats[nx], mats[ny], mats[nz]
                j1 = _bracket(x, _bracket(y, z, py, pz), px, (py + pz) % 2)
                j2 = _bracket(y, _bracket(z, x, pz, px), py, (pz + px) % 2)
                j3 = _bracket(z, _bracket(x, y, px, py), pz, (px + py) % 2)
                total = (j1.scale((-1.0) ** (px * pz))
                         + j2.scale((-1.0) ** (py * px))
                         + j3.scale((-1.0) ** (pz * py)))
                worst = max(worst, total.max_abs_below_guard())
    report["graded-jacobi"] = worst
    return report
