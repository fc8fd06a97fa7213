"""Eigenvalue-equation solvers for Grassmann-coefficient generator
combinations, plus the independent grade-filtered nullspace oracle.

Each solver returns families of states built from explicit coefficient
recurrences; the oracle solves the same truncated linear problem by lifting
the numeric body nullspace order-by-order in blade level, which is how the
imposed eigenvalue conditions are discovered independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    ConfigurationError,
    DomainError,
    EigenvalueConstraintViolated,
    NoSolutionAtLevel,
    ParityError,
    UnsupportedRegime,
)
from .grassmann import Algebra, GrassmannElement
from .states import (
    gen_supersqueezed_reduction,
    o_apply_zpow,
    squeeze,
    squeeze_normalization,
    supersqueeze,
)
from .superfock import (
    MINUS,
    PLUS,
    FockSpace,
    SuperOperatorExpr,
    SuperState,
    letters,
    realize_matrix,
    residual,
)

__all__ = [
    "GeneratorCoefficients",
    "ReducedCoefficients",
    "SolutionFamily",
    "solve_sh22",
    "solve_scaled_boson",
    "solve_boson_squeezed",
    "solve_fermion_scaled",
    "solve_fermion_squeezed",
    "solve_super_coherent",
    "solve_a_gamma_delta",
    "solve_general",
    "oracle_nullspace_lift",
    "OracleResult",
    "OracleFamily",
    "match_up_to_right_constant",
    "b2_combinatorial_sum",
    "b2_brute_sum",
    "brute_multisum",
]


@dataclass(frozen=True)
class GeneratorCoefficients:
    a_minus: GrassmannElement
    a_plus: GrassmannElement
    a_3: GrassmannElement
    b_minus: GrassmannElement
    b_plus: GrassmannElement
    z: GrassmannElement

    @staticmethod
    def make(alg: Algebra, a_minus=0, a_plus=0, a_3=0, b_minus=0, b_plus=0, z=0):
        c = alg.coerce
        return GeneratorCoefficients(c(a_minus), c(a_plus), c(a_3),
                                     c(b_minus), c(b_plus), c(z))


@dataclass(frozen=True)
class ReducedCoefficients:
    beta: GrassmannElement
    gamma: GrassmannElement
    delta: GrassmannElement
    z: GrassmannElement

    @property
    def beta0(self):
        return self.beta.even()

    @property
    def beta1(self):
        return self.beta.odd()

    @property
    def gamma0(self):
        return self.gamma.even()

    @property
    def gamma1(self):
        return self.gamma.odd()

    @property
    def delta0(self):
        return self.delta.even()

    @property
    def delta1(self):
        return self.delta.odd()

    @property
    def z0(self):
        return self.z.even()

    @property
    def z1(self):
        return self.z.odd()


@dataclass
class SolutionFamily:
    label: str                 # minus-rooted | plus-rooted | special tag
    method: str
    state: SuperState
    expr: SuperOperatorExpr
    eigenvalue: GrassmannElement
    c: list | None = None      # minus-rail coefficients
    d: list | None = None      # plus-rail coefficients
    c0: GrassmannElement | None = None
    d0: GrassmannElement | None = None
    conditions: list = field(default_factory=list)
    record: dict = field(default_factory=dict)
    residual: float = float("nan")

    def compute_residual(self) -> float:
        self.residual = residual(self.expr, self.eigenvalue, self.state)
        return self.residual


def _finish(space, fam: SolutionFamily) -> SolutionFamily:
    fam.compute_residual()
    return fam


def _rails_state(space, c=None, d=None) -> SuperState:
    return space.from_rails(c, d)


# ---------------------------------------------------------------------------
# Scaled boson problem (coefficient on the lowering operator alone)
# ---------------------------------------------------------------------------

def solve_scaled_boson(a_minus: GrassmannElement, z_val: GrassmannElement,
                       space: FockSpace) -> list[SolutionFamily]:
    """Solve A a|psi> = Z|psi> on one boson rail (returned on both sectors).

    Invertible A: coherent family with z = A^-1 Z.  Body-zero A: imposes
    Z_phi = 0, solves the blade-level linear system A C1 = Z C0 with C0 = 1,
    and reports the scalar-eigenvalue coherent specialization when Z = alpha A.
    """
    alg = space.algebra
    a, ad, b, bd, one = letters(alg)
    tol = alg.tolerance
    n_max = space.cutoff
    fams = []
    if abs(a_minus.body) > tol:
        z = a_minus.inverse() * z_val
        coeffs = [z ** n * (1.0 / math.sqrt(math.factorial(n)))
                  for n in range(n_max + 1)]
        for sector, label in ((MINUS, "minus-rooted"), (PLUS, "plus-rooted")):
            st = _rails_state(space, coeffs if sector == MINUS else None,
                              coeffs if sector == PLUS else None)
            fams.append(_finish(space, SolutionFamily(
                label, "coherent", st, a_minus * a, z_val,
                c=coeffs if sector == MINUS else None,
                d=coeffs if sector == PLUS else None,
                c0=alg.one() if sector == MINUS else None,
                d0=alg.one() if sector == PLUS else None,
                record={"z": z})))
        return fams

    # degenerate branch: A has zero body
    if a_minus.is_zero(tol):
        raise UnsupportedRegime("A_minus vanishes identically")
    if abs(z_val.body) > tol:
        raise EigenvalueConstraintViolated("Z_phi = 0",
                                           f"body(Z) = {z_val.body}")
    # solve A C1 = Z for C1 (C0 = 1); least-squares over blade coefficients
    from .superfock import _mult_matrix

    mat = _mult_matrix(a_minus, "left")
    rhs = z_val.coeffs
    c1_vec, res, _, _ = np.linalg.lstsq(mat, rhs, rcond=None)
    if np.max(np.abs(mat @ c1_vec - rhs)) > 10 * tol:
        raise EigenvalueConstraintViolated(
            "A C1 = Z C0 solvable", "no C1 exists for the given A, Z")
    c1 = alg.from_vector(c1_vec)
    coeffs = [c1 ** n * (1.0 / math.sqrt(math.factorial(n)))
              for n in range(n_max + 1)]
    conds = ["Z_phi = 0"]
    fams.append(_finish(space, SolutionFamily(
        "minus-rooted", "degenerate-scaled-boson",
        _rails_state(space, coeffs, None), a_minus * a, z_val,
        c=coeffs, c0=alg.one(), conditions=conds, record={"c1": c1})))
    fams.append(_finish(space, SolutionFamily(
        "plus-rooted", "degenerate-scaled-boson",
        _rails_state(space, None, coeffs), a_minus * a, z_val,
        d=coeffs, d0=alg.one(), conditions=conds, record={"c1": c1})))

    # standard-coherent specialization when Z = alpha * A
    denom = float(np.vdot(a_minus.coeffs, a_minus.coeffs).real)
    alpha = complex(np.vdot(a_minus.coeffs, z_val.coeffs)) / denom
    if (z_val - a_minus * alpha).max_abs() <= 10 * tol:
        cc = [alg.scalar(alpha ** n / math.sqrt(math.factorial(n)))
              for n in range(n_max + 1)]
        fams.append(_finish(space, SolutionFamily(
            "minus-rooted", "standard-coherent",
            _rails_state(space, cc, None), a_minus * a, z_val,
            c=cc, c0=alg.one(),
            conditions=conds + ["Z = alpha A_minus"],
            record={"alpha": alpha})))
    return fams


# ---------------------------------------------------------------------------
# Squeezed boson problem  a + beta ad
# ---------------------------------------------------------------------------

def squeezed_reduced_coefficients(z_hat: GrassmannElement,
                                  beta1_hat: GrassmannElement,
                                  n_max: int) -> list[GrassmannElement]:
    """C_n of the reduced problem a + beta1_hat ad at eigenvalue z_hat."""
    alg = z_hat.algebra
    out = [alg.one()]
    zs = z_hat.star()
    for n in range(1, n_max + 1):
        acc = z_hat ** n
        corr = alg.zero()
        for k in range(0, n - 1):
            corr = corr + (z_hat ** (n - 2 - k)) * (zs ** k) * float(k + 1)
        acc = acc - corr * beta1_hat
        out.append(acc * (1.0 / math.sqrt(math.factorial(n))))
    return out


def solve_boson_squeezed(beta: GrassmannElement, z_val: GrassmannElement,
                         space: FockSpace) -> list[SolutionFamily]:
    """Solve (a + beta ad)|psi> = z|psi> via the squeeze reduction."""
    alg = space.algebra
    a, ad, b, bd, one = letters(alg)
    red = gen_supersqueezed_reduction(beta, z_val)
    zh, bh = red["z_hat"], red["beta1_hat"]
    coeffs = squeezed_reduced_coefficients(zh, bh, space.cutoff)
    smat = squeeze(red["x0"]).matrix(space)
    fams = []
    for sector, label in ((MINUS, "minus-rooted"), (PLUS, "plus-rooted")):
        phi = _rails_state(space, coeffs if sector == MINUS else None,
                           coeffs if sector == PLUS else None)
        st = smat.apply(phi)
        rec = dict(red)
        rec["normalization"] = squeeze_normalization(zh, bh)
        fams.append(_finish(space, SolutionFamily(
            label, "squeeze-reduction", st, a + beta * ad, z_val,
            c=coeffs if sector == MINUS else None,
            d=coeffs if sector == PLUS else None,
            c0=alg.one() if sector == MINUS else None,
            d0=alg.one() if sector == PLUS else None,
            record=rec)))
    return fams


# ---------------------------------------------------------------------------
# Fermionic problems (two-dimensional, exact)
# ---------------------------------------------------------------------------

def _solve_linear(alg: Algebra, lhs: GrassmannElement, rhs: GrassmannElement,
                  label: str) -> GrassmannElement:
    """Solve lhs * x = rhs for x by least squares over blade coefficients."""
    from .superfock import _mult_matrix

    mat = _mult_matrix(lhs, "left")
    x, *_ = np.linalg.lstsq(mat, rhs.coeffs, rcond=None)
    if np.max(np.abs(mat @ x - rhs.coeffs)) > 10 * alg.tolerance:
        raise EigenvalueConstraintViolated(label, "linear system inconsistent")
    return alg.from_vector(x)


def solve_fermion_scaled(b_coeff: GrassmannElement, z_val: GrassmannElement,
                         space: FockSpace) -> list[SolutionFamily]:
    """Full case dispatch for B b|psi> = Z|psi> on the fermionic doublet."""
    alg = space.algebra
    a, ad, b, bd, one = letters(alg)
    tol = alg.tolerance
    expr = b_coeff * b
    zero = alg.zero()

    def family(c, d, method, conds, record=None):
        st = space.state({(0, MINUS): c, (0, PLUS): d})
        return _finish(space, SolutionFamily(
            "fermion", method, st, expr, z_val, c=[c], d=[d], c0=c, d0=d,
            conditions=conds, record=record or {}))

    b0, b1 = b_coeff.even(), b_coeff.odd()
    z0, z1 = z_val.even(), z_val.odd()

    if abs(b_coeff.body) > tol:
        if z_val.is_zero(tol):
            return [family(alg.one(), zero, "vacuum", [])]
        if abs(z_val.body) > tol:
            raise EigenvalueConstraintViolated("Z_phi = 0",
                                               f"body(Z) = {z_val.body}")
        z = b_coeff.inverse() * z_val
        conds = ["Z_phi = 0", "z0^2 = 0", "z0 Z1 = z1 Z0"]
        ze, zo = z.even(), z.odd()
        if (ze * ze).max_abs() > 10 * tol:
            raise EigenvalueConstraintViolated("z0^2 = 0")
        if (ze * z_val.odd() - zo * z_val.even()).max_abs() > 10 * tol:
            raise EigenvalueConstraintViolated("z0 Z1 = z1 Z0")
        # D = z* C* with C = 1
        return [family(alg.one(), z.star(), "b-saes", conds, {"z": z})]

    # body-zero branches
    if b_coeff.is_zero(tol):
        if z_val.is_zero(tol):
            return [family(alg.one(), zero, "trivial-zero", []),
                    family(zero, alg.one(), "trivial-zero", [])]
        raise EigenvalueConstraintViolated("B = 0 needs Z = 0")

    if z_val.is_zero(tol):
        if b0.is_zero(tol):
            # B = B1 pure odd: |-> +/- B1 |+>
            return [family(alg.one(), b1, "odd-B-vacuum", [], {"sign": +1}),
                    family(alg.one(), -b1, "odd-B-vacuum", [], {"sign": -1})]
        return [family(alg.one(), zero, "vacuum", [])]

    conds = []
    if not b0.is_zero(tol) and not (b0 * b0).is_zero(tol):
        ca = z0 * (2.0 * b1 * z1 - b0 * z0)
        cb = b1 * z0 * z0
        if ca.max_abs() > 10 * tol:
            raise EigenvalueConstraintViolated("Z0 (2 B1 Z1 - B0 Z0) = 0")
        if cb.max_abs() > 10 * tol:
            raise EigenvalueConstraintViolated("B1 Z0^2 = 0")
        conds = ["Z0 (2 B1 Z1 - B0 Z0) = 0", "B1 Z0^2 = 0"]
        rhs = b_coeff * z_val.star()  # B Z* C* with C = 1
        d = _solve_linear(alg, b0 * b0, rhs, "B0^2 D = B Z* C*")
        return [family(alg.one(), d, "body-zero-B0-invertible-square", conds)]
    if b0.is_zero(tol) and not b1.is_zero(tol):
        if (z0 * z0).max_abs() > 10 * tol:
            raise EigenvalueConstraintViolated("Z0^2 = 0")
        if (z0 * z1).max_abs() > 10 * tol:
            raise EigenvalueConstraintViolated("Z0 Z1 = 0")
        conds = ["Z0^2 = 0", "Z0 Z1 = 0"]
        d = _solve_linear(alg, b1, -(z_val.star()), "B1 D = -Z* C*")
        return [family(alg.one(), d, "body-zero-B1", conds)]
    if not b0.is_zero(tol) and b1.is_zero(tol):
        if (z0 * z0).max_abs() > 10 * tol:
            raise EigenvalueConstraintViolated("Z0^2 = 0")
        conds = ["Z0^2 = 0"]
        d = _solve_linear(alg, b0, z_val.star(), "B0 D = Z* C*")
        return [family(alg.one(), d, "body-zero-B0", conds)]
    raise UnsupportedRegime("B0 with nilpotent square and B1 both nonzero")


def solve_fermion_squeezed(delta: GrassmannElement, z_val: GrassmannElement,
                           space: FockSpace) -> list[SolutionFamily]:
    """Solve (b + delta bd)|psi> = z|psi>; imposes z0^2 = delta."""
    alg = space.algebra
    a, ad, b, bd, one = letters(alg)
    tol = alg.tolerance
    if not delta.is_even():
        raise ParityError("delta must be even (z z* = z0^2 forces it)")
    z0, z1 = z_val.even(), z_val.odd()
    expr = b + delta * bd

    def family(zval, method, conds, record=None):
        d = zval.star()  # z* C* with C = 1
        st = space.state({(0, MINUS): alg.one(), (0, PLUS): d})
        return _finish(space, SolutionFamily(
            "fermion", method, st, expr, zval, c=[alg.one()], d=[d],
            c0=alg.one(), d0=d, conditions=conds, record=record or {}))

    conds = ["z0^2 = delta"]
    if not z0.is_zero(tol):
        if (z0 * z0 - delta).max_abs() > 10 * tol:
            raise EigenvalueConstraintViolated(
                "z0^2 = delta", f"mismatch {(z0 * z0 - delta).max_abs():.2e}")
        return [family(z_val, "fermion-squeezed", conds)]
    if delta.is_zero(tol):
        return [family(z_val, "b-eigenstate-limit", conds)]
    if abs(delta.body) > tol:
        from .grassmann import g_sqrt

        root = g_sqrt(delta)
        return [family(root + z1, "fermion-squeezed", conds, {"sign": +1}),
                family(-root + z1, "fermion-squeezed", conds, {"sign": -1})]
    raise EigenvalueConstraintViolated(
        "z0^2 = delta", "soul-only delta has no square root")


# ---------------------------------------------------------------------------
# Supercoherent problem  a + gamma b
# ---------------------------------------------------------------------------

def solve_super_coherent(gamma: GrassmannElement, z_val: GrassmannElement,
                         space: FockSpace) -> list[SolutionFamily]:
    """Solve (a + gamma b)|psi> = z|psi>: coherent rail plus the plus-rooted
    generalized family; the orthonormalized closed form rides in the record."""
    alg = space.algebra
    a, ad, b, bd, one = letters(alg)
    expr = a + gamma * b
    n_max = space.cutoff
    z = z_val
    z0, z1 = z.even(), z.odd()
    gamma0, gamma1 = gamma.even(), gamma.odd()

    fact = [1.0 / math.sqrt(math.factorial(n)) for n in range(n_max + 1)]
    coh = [z ** n * fact[n] for n in range(n_max + 1)]
    fams = [_finish(space, SolutionFamily(
        "minus-rooted", "supercoherent", _rails_state(space, coh, None),
        expr, z, c=coh, c0=alg.one()))]

    d_rail = list(coh)
    c_rail = [alg.zero()]
    for n in range(1, n_max + 1):
        # C_n = -n (gamma0 z0^(n-1) + z^(n-1) gamma1) D0* / sqrt(n!)
        c_rail.append(-(gamma0 * z0 ** (n - 1) + z ** (n - 1) * gamma1)
                      * float(n) * fact[n])
    fams.append(_finish(space, SolutionFamily(
        "plus-rooted", "supercoherent", _rails_state(space, c_rail, d_rail),
        expr, z, c=c_rail, d=d_rail, c0=alg.zero(), d0=alg.one())))
    return fams


# ---------------------------------------------------------------------------
# a + gamma b + delta bd
# ---------------------------------------------------------------------------

def agd_coefficients(gamma: GrassmannElement, delta: GrassmannElement,
                     z: GrassmannElement, n_max: int,
                     c0: GrassmannElement, d0: GrassmannElement):
    """Compact coefficient forms built from the alternating-word operators."""
    alg = gamma.algebra
    z1 = z.odd()
    f_const = (c0, d0.star())
    g_const = (d0, c0.star())
    c_out, d_out = [], []
    for n in range(n_max + 1):
        invf = 1.0 / math.sqrt(math.factorial(n))
        cn = alg.zero()
        dn = alg.zero()
        for ell in range(0, n + 1):
            sign = (-1.0) ** ell
            fc = f_const[ell % 2]
            gc = g_const[ell % 2]
            if not fc.is_zero():
                cn = cn + o_apply_zpow(ell, gamma, delta.star(), z1, z, n) * sign * invf * fc
            if not gc.is_zero():
                dn = dn + o_apply_zpow(ell, delta, gamma.star(), z1, z, n) * sign * invf * gc
        c_out.append(cn)
        d_out.append(dn)
    return c_out, d_out


def solve_a_gamma_delta(gamma: GrassmannElement, delta: GrassmannElement,
                        z_val: GrassmannElement,
                        space: FockSpace) -> list[SolutionFamily]:
    """Solve (a + gamma b + delta bd)|psi> = z|psi> (both rooted families)."""
    alg = space.algebra
    a, ad, b, bd, one = letters(alg)
    expr = a + gamma * b + delta * bd
    fams = []
    for label, c0, d0 in (("minus-rooted", alg.one(), alg.zero()),
                          ("plus-rooted", alg.zero(), alg.one())):
        c, d = agd_coefficients(gamma, delta, z_val, space.cutoff, c0, d0)
        fams.append(_finish(space, SolutionFamily(
            label, "alternating-word", _rails_state(space, c, d),
            expr, z_val, c=c, d=d, c0=c0, d0=d0)))
    return fams


# ---------------------------------------------------------------------------
# The general case  a + beta ad + gamma b + delta bd
# ---------------------------------------------------------------------------

def general_reduced_coefficients(gamma0, delta0, beta1_hat, z, n_max,
                                 c0, d0, compact=False):
    """Coefficients of the reduced problem a + beta1_hat ad + g0 b + d0 bd.

    The canonical path evaluates the explicit finite sums (valid for any
    gamma0 delta0); the compact path multiplies the alternating-word
    operators by (gamma0 delta0)^-1 and exists only when that inverse does.
    """
    alg = gamma0.algebra
    z0, z1 = z.even(), z.odd()
    gd = gamma0 * delta0
    base_c, base_d = agd_coefficients(gamma0, delta0, z, n_max, c0, d0)
    c_out, d_out = [], []
    if compact:
        gd_inv = gd.inverse()
        half = 0.5 * (beta1_hat * gd_inv)
    for n in range(n_max + 1):
        invf = 1.0 / math.sqrt(math.factorial(n))
        if compact:
            even_acc = alg.zero()
            odd_acc = alg.zero()
            even_acc_d = alg.zero()
            odd_acc_d = alg.zero()
            for ell in range(2, n + 1, 2):
                even_acc = even_acc + o_apply_zpow(ell, gamma0, delta0, z1, z, n) * float(ell)
                even_acc_d = even_acc_d + o_apply_zpow(ell, delta0, gamma0, z1, z, n) * float(ell)
            for ell in range(3, n + 1, 2):
                odd_acc = odd_acc + o_apply_zpow(ell, gamma0, delta0, z1, z, n) * float(ell - 1)
                odd_acc_d = odd_acc_d + o_apply_zpow(ell, delta0, gamma0, z1, z, n) * float(ell - 1)
            cn = base_c[n] - half * even_acc * invf * c0 + half * odd_acc * invf * d0.star()
            dn = base_d[n] - half * even_acc_d * invf * d0 + half * odd_acc_d * invf * c0.star()
        else:
            even_acc = alg.zero()
            odd_acc = alg.zero()
            for ell in range(2, n + 1, 2):
                w = Fraction(math.factorial(n),
                             math.factorial(n - ell) * math.factorial(ell - 1))
                zpart = z0 ** (n - ell)
                if n - ell >= 1:
                    zpart = zpart + z0 ** (n - ell - 1) * z1 * (float(n - ell) / (ell + 1))
                even_acc = even_acc + zpart * (gd ** ((ell - 2) // 2)) * float(w)
            for ell in range(3, n + 1, 2):
                w = Fraction((ell - 1) * math.factorial(n),
                             math.factorial(n - ell) * math.factorial(ell))
                odd_acc = odd_acc + (z0 ** (n - ell)) * (gd ** ((ell - 3) // 2)) * float(w)
            half_b = 0.5 * beta1_hat
            cn = (base_c[n] - half_b * even_acc * invf * c0
                  + half_b * odd_acc * gamma0 * invf * d0.star())
            dn = (base_d[n] - half_b * even_acc * invf * d0
                  + half_b * odd_acc * delta0 * invf * c0.star())
        c_out.append(cn)
        d_out.append(dn)
    return c_out, d_out


def solve_general(beta: GrassmannElement, gamma: GrassmannElement,
                  delta: GrassmannElement, z_val: GrassmannElement,
                  space: FockSpace, compact: bool = False) -> list[SolutionFamily]:
    """Solve (a + beta ad + gamma b + delta bd)|psi> = z|psi>.

    Conjugates by the standard supersqueeze, solves the reduced problem with
    beta1_hat = beta1 + delta0 gamma1 + gamma0 delta1, and maps back.
    """
    alg = space.algebra
    a, ad, b, bd, one = letters(alg)
    beta0, beta1 = beta.even(), beta.odd()
    gamma0, gamma1 = gamma.even(), gamma.odd()
    delta0, delta1 = delta.even(), delta.odd()
    beta1_hat = beta1 + delta0 * gamma1 + gamma0 * delta1
    expr = a + beta * ad + gamma * b + delta * bd
    reduced_expr = a + beta1_hat * ad + gamma0 * b + delta0 * bd
    gmat = supersqueeze(beta0, gamma1, delta1).matrix(space)
    fams = []
    for label, c0, d0 in (("minus-rooted", alg.one(), alg.zero()),
                          ("plus-rooted", alg.zero(), alg.one())):
        c, d = general_reduced_coefficients(gamma0, delta0, beta1_hat, z_val,
                                            space.cutoff, c0, d0,
                                            compact=compact)
        phi = _rails_state(space, c, d)
        red_res = residual(reduced_expr, z_val, phi)
        st = gmat.apply(phi)
        fams.append(_finish(space, SolutionFamily(
            label, "supersqueeze-conjugation" + ("-compact" if compact else ""),
            st, expr, z_val, c=c, d=d, c0=c0, d0=d0,
            record={"beta1_hat": beta1_hat, "reduced_residual": red_res,
                    "reduced_expr": reduced_expr, "phi": phi})))
    return fams


# ---------------------------------------------------------------------------
# Top-level dispatch
# ---------------------------------------------------------------------------

def solve_sh22(coeffs: GeneratorCoefficients,
               space: FockSpace) -> list[SolutionFamily]:
    """Dispatch the full five-generator eigenproblem by coefficient pattern."""
    alg = space.algebra
    tol = alg.tolerance
    am, ap, a3 = coeffs.a_minus, coeffs.a_plus, coeffs.a_3
    bm, bp, z = coeffs.b_minus, coeffs.b_plus, coeffs.z
    z_eff = z - a3

    if abs(am.body) > tol:
        inv = am.inverse()
        red = ReducedCoefficients(inv * ap, inv * bm, inv * bp, inv * z_eff)
        beta_z = not red.beta.is_zero(tol)
        gamma_z = not red.gamma.is_zero(tol)
        delta_z = not red.delta.is_zero(tol)
        if not (beta_z or gamma_z or delta_z):
            return solve_scaled_boson(am, z_eff, space)
        if beta_z and not gamma_z and not delta_z:
            return solve_boson_squeezed(red.beta, red.z, space)
        if not beta_z and gamma_z and not delta_z:
            return solve_super_coherent(red.gamma, red.z, space)
        if not beta_z:
            return solve_a_gamma_delta(red.gamma, red.delta, red.z, space)
        return solve_general(red.beta, red.gamma, red.delta, red.z, space)

    bosonic_rest = ap.is_zero(tol) and bm.is_zero(tol) and bp.is_zero(tol)
    if not am.is_zero(tol) and bosonic_rest:
        return solve_scaled_boson(am, z_eff, space)
    pure_fermion = am.is_zero(tol) and ap.is_zero(tol)
    if pure_fermion and not bm.is_zero(tol):
        if abs(bm.body) > tol and not bp.is_zero(tol):
            inv = bm.inverse()
            return solve_fermion_squeezed(inv * bp, inv * z_eff, space)
        if bp.is_zero(tol):
            return solve_fermion_scaled(bm, z_eff, space)
    raise UnsupportedRegime(
        "body-zero leading coefficient with extra generators is only "
        "implemented for the scaled-boson and scaled-fermion branches")


# ---------------------------------------------------------------------------
# Combinatorial sums (closed forms and brute force)
# ---------------------------------------------------------------------------

B2_KINDS = ("one", "odd-sum", "odd-sum-squared", "even-sum", "even-sum-squared")


def b2_combinatorial_sum(n: int, ell: int, kind: str) -> int:
    """Closed form of the nested index sums of the long recurrences."""
    if kind not in B2_KINDS:
        raise DomainError(f"unknown kind {kind!r}")
    if not 2 <= ell <= n:
        raise DomainError(f"need 2 <= ell <= n, got ell={ell}, n={n}")
    if kind in ("odd-sum", "odd-sum-squared") and ell % 2:
        raise DomainError(f"{kind} needs even ell")
    if kind in ("even-sum", "even-sum-squared") and ell % 2 == 0:
        raise DomainError(f"{kind} needs odd ell")
    if kind == "one":
        val = Fraction(math.factorial(n - 1),
                       math.factorial(n - ell) * math.factorial(ell - 1))
    elif n - ell - 1 < 0:
        val = Fraction(0)
    elif kind == "odd-sum":
        val = Fraction(math.factorial(n - 1),
                       2 * math.factorial(n - ell - 1) * math.factorial(ell - 1))
    elif kind == "odd-sum-squared":
        val = (Fraction(ell * math.factorial(n - 1),
                        2 * math.factorial(n - ell - 1) * math.factorial(ell + 1))
               * ((n - ell) + Fraction(ell, 2) * (n - ell + 1)))
    elif kind == "even-sum":
        val = Fraction((ell - 1) * math.factorial(n - 1),
                       2 * math.factorial(n - ell - 1) * math.factorial(ell))
    else:  # even-sum-squared
        val = Fraction((ell - 1) * (n - ell + 1) * math.factorial(n - 1),
                       4 * math.factorial(n - ell - 1) * math.factorial(ell))
    if val.denominator != 1:
        raise DomainError(f"closed form not integral for n={n}, ell={ell}, {kind}")
    return int(val)


def _compositions(total_max: int, parts: int):
    """All tuples (k1..k_parts) with k1 + ... <= total_max, nested bounds."""
    if parts == 0:
        yield ()
        return
    for k in range(total_max + 1):
        for rest in _compositions(total_max - k, parts - 1):
            yield (k,) + rest


def b2_brute_sum(n: int, ell: int, kind: str) -> int:
    if kind not in B2_KINDS:
        raise DomainError(f"unknown kind {kind!r}")
    total = 0
    for ks in _compositions(n - ell, ell - 1):
        if kind == "one":
            total += 1
        elif kind in ("odd-sum", "odd-sum-squared"):
            s = sum(ks[i] for i in range(0, len(ks), 2))  # k1 + k3 + ...
            total += s * s if kind.endswith("squared") else s
        else:
            s = sum(ks[i] for i in range(1, len(ks), 2))  # k2 + k4 + ...
            total += s * s if kind.endswith("squared") else s
    return total


def brute_multisum(n: int, ell: int, first: GrassmannElement,
                   second: GrassmannElement,
                   z: GrassmannElement) -> GrassmannElement:
    """Brute-force nested multiple summation with alternating star powers.

    The i-th inserted factor (from the left) is `first` for odd i and
    `second` for even i; the power following factor i uses z* for odd i and
    z for even i, with exponent k_(ell - i + 1).
    """
    alg = first.algebra
    zs = z.star()
    acc = alg.zero()
    for ks in _compositions(n - ell, ell):
        term = z ** (n - ell - sum(ks))
        for i in range(1, ell + 1):
            term = term * (first if i % 2 else second)
            base = zs if i % 2 else z
            term = term * base ** ks[ell - i]
        acc = acc + term
    return acc


# ---------------------------------------------------------------------------
# The grade-filtered nullspace-lift oracle
# ---------------------------------------------------------------------------

@dataclass
class OracleFamily:
    seed_index: int
    components: dict          # blade mask -> complex vector over kept columns
    inconsistent_level: int | None = None
    lift_residual: float = 0.0

    def to_state(self, space: FockSpace, cols: int) -> SuperState:
        data = np.zeros((space.dim, space.algebra.dim), dtype=np.complex128)
        for mask, vec in self.components.items():
            data[:cols, mask] = vec
        return SuperState(space, data)


@dataclass
class OracleResult:
    families: list
    pin_rows: np.ndarray
    kernel_dim: int
    cols: int
    inconsistent: bool = False

    def states(self, space: FockSpace) -> list[SuperState]:
        return [f.to_state(space, self.cols)
                for f in self.families if f.inconsistent_level is None]


def _kernel_of(mat, svd_tol):
    u, s, vh = np.linalg.svd(mat)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > svd_tol * scale))
    return vh[rank:].conj().T  # columns span the kernel


def oracle_nullspace_lift(expr: SuperOperatorExpr, z_val,
                          space: FockSpace,
                          raise_on_inconsistency: bool = False,
                          svd_tol: float = 1e-9) -> OracleResult:
    """Independent eigen-solver: numeric body nullspace, lifted blade by blade.

    Works below the guard band: unknowns are the components with n <= N-G,
    equations the rows with n <= N-G-1 (exact under a length-one word).
    Each lifted family is pinned so the root rows carry the level-0 seed and
    vanish at every higher blade level, making representatives unique.
    Kernel directions supported only on the unconstrained top column are
    truncation artifacts and are dropped.
    """
    alg = space.algebra
    z_elem = alg.coerce(z_val)
    a, ad, b, bd, one = letters(alg)
    full = realize_matrix(expr - z_elem * one, space)
    nc = space.cutoff - space.guard
    if _has_boson_letters(expr):
        rows, cols = 2 * nc, 2 * (nc + 1)
    else:
        # pure fermionic action is block diagonal in n: one block suffices
        rows = cols = 2
    even = {m: blk[:rows, :cols] for m, blk in full.even.items()}
    odd = {m: blk[:rows, :cols] for m, blk in full.odd.items()}
    zero_blk = np.zeros((rows, cols), dtype=np.complex128)
    be = even.get(0, zero_blk)
    bo = odd.get(0, zero_blk)
    a_even_level = be + bo        # star(x) = +x on even blade levels
    a_odd_level = be - bo

    k_even = _kernel_of(a_even_level, svd_tol)
    k_odd = _kernel_of(a_odd_level, svd_tol)
    # drop truncation artifacts living only on the top (row-free) column pair
    if cols > rows and k_even.shape[1]:
        junk = _kernel_of(k_even[:rows, :], svd_tol)
        if junk.shape[1]:
            keep = _kernel_of(junk.conj().T, svd_tol)
            k_even = k_even @ keep
    kdim = k_even.shape[1]
    if kdim == 0:
        return OracleResult([], np.array([], dtype=int), 0, cols,
                            inconsistent=True)

    # pin rows: prefer the n = 0 root rows when they identify the kernel
    pin = None
    if kdim <= 2:
        cand = np.array([0, 1][:kdim] if kdim < 2 else [0, 1], dtype=int)
        if np.linalg.matrix_rank(k_even[cand, :], tol=1e-8) == kdim:
            pin = cand
    if pin is None:
        pin = _pivot_rows(k_even)
    pin_even = k_even[pin, :]
    pin_odd = k_odd[pin, :]

    # seeds: kernel combinations that are unit vectors on the pin rows
    seeds = k_even @ np.linalg.solve(pin_even, np.eye(kdim, dtype=np.complex128))

    masks = sorted(range(alg.dim), key=lambda m: (int(alg.tables.levels[m]), m))
    blade_masks = sorted((set(even) | set(odd)) - {0})
    sign_table = np.zeros((alg.dim, alg.dim))
    t = alg.tables
    sign_table[t.pair_a, t.pair_b] = t.pair_sign
    levels = t.levels

    families = []
    any_bad = False
    for idx in range(kdim):
        comps = {0: seeds[:, idx]}
        bad_level = None
        worst = 0.0
        for m in masks:
            if m == 0 or bad_level is not None:
                continue
            rhs = np.zeros(rows, dtype=np.complex128)
            touched = False
            for mu in blade_masks:
                if mu == 0 or (mu & m) != mu:
                    continue
                nu = m ^ mu
                if nu not in comps:
                    continue
                blk = np.zeros((rows, cols), dtype=np.complex128)
                if mu in even:
                    blk = blk + even[mu]
                if mu in odd:
                    blk = blk + ((-1.0) ** levels[nu]) * odd[mu]
                rhs -= sign_table[mu, nu] * (blk @ comps[nu])
                touched = True
            if not touched:
                continue
            a_mat = a_even_level if levels[m] % 2 == 0 else a_odd_level
            x, *_ = np.linalg.lstsq(a_mat, rhs, rcond=None)
            res = float(np.max(np.abs(a_mat @ x - rhs))) if rhs.size else 0.0
            scale = max(1.0, float(np.max(np.abs(rhs))))
            if res > svd_tol * scale:
                bad_level = int(levels[m])
                worst = res
                break
            kmat = k_even if levels[m] % 2 == 0 else k_odd
            if kmat.shape[1]:
                pin_k = pin_even if levels[m] % 2 == 0 else pin_odd
                alpha, *_ = np.linalg.lstsq(pin_k, -x[pin], rcond=None)
                x = x + kmat @ alpha
            if np.max(np.abs(x)) > svd_tol * 1e-3:
                comps[m] = x
        families.append(OracleFamily(idx, comps, bad_level, worst))
        if bad_level is not None:
            any_bad = True
    if any_bad and raise_on_inconsistency:
        bad = next(f for f in families if f.inconsistent_level is not None)
        raise NoSolutionAtLevel(bad.inconsistent_level, bad.lift_residual)
    return OracleResult(families, pin, kdim, cols, inconsistent=any_bad)


def _pivot_rows(kernel: np.ndarray) -> np.ndarray:
    """Greedy choice of kernel rows forming a well-conditioned square block."""
    work = kernel.T.astype(np.complex128).copy()  # (kdim, rows)
    kdim = work.shape[0]
    piv: list[int] = []
    for _ in range(kdim):
        norms = np.linalg.norm(work, axis=0)
        for used in piv:
            norms[used] = -1.0
        j = int(np.argmax(norms))
        if norms[j] <= 0:
            break
        piv.append(j)
        col = work[:, j] / norms[j]
        work = work - np.outer(col, col.conj() @ work)
    return np.array(sorted(piv), dtype=int)


def _has_boson_letters(expr: SuperOperatorExpr) -> bool:
    return any(l in ("a", "ad") for t in expr.terms for l in t.word)


@dataclass
class DenseOracle:
    """Exact kernel of the full blade-blocked linear system (small problems).

    Unknown layout is mask-major: coordinate (mask, col) -> mask * cols + col.
    """

    kernel: np.ndarray
    rows: int
    cols: int
    blade_dim: int

    @property
    def dim(self) -> int:
        return self.kernel.shape[1]

    def state_vector(self, psi: SuperState) -> np.ndarray:
        data = psi.data[: self.cols, :]
        return data.T.reshape(-1)  # mask-major

    def distance(self, psi: SuperState) -> float:
        """Max-abs residual of the best kernel-span approximation of psi."""
        vec = self.state_vector(psi)
        if self.dim == 0:
            return float(np.max(np.abs(vec)))
        coef, *_ = np.linalg.lstsq(self.kernel, vec, rcond=None)
        return float(np.max(np.abs(self.kernel @ coef - vec)))

    def root_reachable(self, row: int, mask: int = 0) -> bool:
        """Can some solution have a nonzero (mask, row) coordinate?"""
        if self.dim == 0:
            return False
        idx = mask * self.cols + row
        return bool(np.linalg.norm(self.kernel[idx, :]) > 1e-9)


def oracle_dense(expr: SuperOperatorExpr, z_val, space: FockSpace,
                 n_limit: int | None = None,
                 svd_tol: float = 1e-9) -> DenseOracle:
    """Solve the whole blade-coupled system at once (for degenerate branches
    where the body matrix vanishes and the level-by-level lift cannot run)."""
    alg = space.algebra
    z_elem = alg.coerce(z_val)
    a, ad, b, bd, one = letters(alg)
    full = realize_matrix(expr - z_elem * one, space)
    if n_limit is None:
        n_limit = 0 if not _has_boson_letters(expr) else space.cutoff - space.guard
    if _has_boson_letters(expr):
        rows, cols = 2 * n_limit, 2 * (n_limit + 1)
    else:
        rows = cols = 2 * (n_limit + 1)
    even = {m: blk[:rows, :cols] for m, blk in full.even.items()}
    odd = {m: blk[:rows, :cols] for m, blk in full.odd.items()}
    t = alg.tables
    sign_table = np.zeros((alg.dim, alg.dim))
    sign_table[t.pair_a, t.pair_b] = t.pair_sign
    big = np.zeros((alg.dim * rows, alg.dim * cols), dtype=np.complex128)
    for mo in range(alg.dim):
        for mu in set(even) | set(odd):
            if (mu & mo) != mu:
                continue
            mi = mo ^ mu
            blk = np.zeros((rows, cols), dtype=np.complex128)
            if mu in even:
                blk = blk + even[mu]
            if mu in odd:
                blk = blk + ((-1.0) ** t.levels[mi]) * odd[mu]
            big[mo * rows:(mo + 1) * rows, mi * cols:(mi + 1) * cols] += (
                sign_table[mu, mi] * blk)
    kernel = _kernel_of(big, svd_tol)
    return DenseOracle(kernel, rows, cols, alg.dim)


def match_up_to_right_constant(target: SuperState, reference: SuperState,
                               rows: int | None = None):
    """Best right-multiplier c with reference . c ~ target.

    Right multiplication is linear in the blades of c, so this is a least
    squares problem; returns (c, max-abs error).
    """
    alg = target.algebra
    n_rows = rows if rows is not None else target.space.dim
    cols = []
    for m in range(alg.dim):
        probe = np.zeros(alg.dim, dtype=np.complex128)
        probe[m] = 1.0
        basis = reference.right_mul(GrassmannElement(alg, probe))
        cols.append(basis.data[:n_rows].ravel())
    mat = np.array(cols).T
    rhs = target.data[:n_rows].ravel()
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    err = float(np.max(np.abs(mat @ sol - rhs)))
    return GrassmannElement(alg, sol), err
