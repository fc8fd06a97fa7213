"""Closed-form state and operator constructors.

Superunitary factories (displacement, fermionic displacement, squeeze,
supersqueeze, OSp and spin rotations), the alternating-word raising
operators used by the mixed bosonic-fermionic eigenproblems, every named
state family, the density-of-algebra identities and the sector combiner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, ParityError
from .grassmann import (
    Algebra,
    GrassmannElement,
    berezin_integrate,
    berezin_integrate_left,
    entire_series,
    g_sqrt,
)
from .superfock import (
    MINUS,
    PLUS,
    FockSpace,
    OperatorMatrix,
    SuperOperatorExpr,
    SuperState,
    apply_word,
    inner_product,
    letters,
    norm_element,
    operator_exp,
    realize_matrix,
    residual,
)

__all__ = [
    "ExpProduct",
    "UnitaryParams",
    "unitary",
    "displacement",
    "fermion_displacement",
    "squeeze",
    "supersqueeze",
    "osp_unitary",
    "spin_unitary",
    "squeeze_parameter",
    "o_word_operator",
    "o_apply_zpow",
    "construct_family",
    "FamilyResult",
    "combine_sectors",
    "density_of_algebra",
    "bogoliubov_check",
    "FAMILY_NAMES",
]


# ---------------------------------------------------------------------------
# Operator products with a recipe (so inverse and adjoint stay exact)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpProduct:
    """Ordered product of operator exponentials exp(X1) exp(X2) ..."""

    exponents: tuple[SuperOperatorExpr, ...]

    def matrix(self, space: FockSpace) -> OperatorMatrix:
        acc = OperatorMatrix.identity(space)
        for x in self.exponents:
            acc = acc @ operator_exp(x, space)
        return acc

    def inverse(self) -> "ExpProduct":
        return ExpProduct(tuple(-x for x in reversed(self.exponents)))

    def adjoint(self) -> "ExpProduct":
        return ExpProduct(tuple(x.adjoint() for x in reversed(self.exponents)))

    def apply(self, psi: SuperState) -> SuperState:
        for x in reversed(self.exponents):
            psi = operator_exp(x, psi.space).apply(psi)
        return psi


def displacement(z: GrassmannElement) -> ExpProduct:
    """D(z) = exp(z ad - z^ddag a)."""
    alg = z.algebra
    a, ad, b, bd, one = letters(alg)
    return ExpProduct((z * ad - z.adjoint() * a,))


def fermion_displacement(z: GrassmannElement) -> ExpProduct:
    """T(z) = exp(bd z - z^ddag b); bd passes z, so the coefficient is star(z)."""
    alg = z.algebra
    a, ad, b, bd, one = letters(alg)
    return ExpProduct((z.star() * bd - z.adjoint() * b,))


def squeeze(x0: GrassmannElement) -> ExpProduct:
    """S(X0) = exp(X0 ad^2/2 - X0^ddag a^2/2); X0 must be even."""
    if not x0.is_even():
        raise ParityError("squeeze parameter must be even")
    alg = x0.algebra
    a, ad, b, bd, one = letters(alg)
    return ExpProduct(((0.5 * x0) * (ad * ad) - (0.5 * x0.adjoint()) * (a * a),))


def supersqueeze(beta0: GrassmannElement, gamma1: GrassmannElement,
                 delta1: GrassmannElement) -> ExpProduct:
    """Standard supersqueeze G(beta0, gamma1, delta1), three factors."""
    if not beta0.is_even():
        raise ParityError("beta0 must be even")
    if not gamma1.is_odd() or not delta1.is_odd():
        raise ParityError("gamma1 and delta1 must be odd")
    alg = beta0.algebra
    a, ad, b, bd, one = letters(alg)
    return ExpProduct((
        (-0.5 * (beta0 + gamma1 * delta1)) * (ad * ad),
        -(delta1 * (ad * bd)),
        -(gamma1 * (ad * b)),
    ))


def osp_unitary(x0: GrassmannElement, gamma1: GrassmannElement,
                delta1: GrassmannElement) -> ExpProduct:
    """OSp(2/2) superunitary with squeeze plus odd rotation terms."""
    if not x0.is_even():
        raise ParityError("x0 must be even")
    if not gamma1.is_odd() or not delta1.is_odd():
        raise ParityError("odd parameters required")
    alg = x0.algebra
    a, ad, b, bd, one = letters(alg)
    expo = ((0.5 * x0) * (ad * ad) - (0.5 * x0.adjoint()) * (a * a)
            + gamma1 * (ad * bd) + gamma1.adjoint() * (a * b)
            + delta1 * (ad * b) + delta1.adjoint() * (a * bd))
    return ExpProduct((expo,))


def spin_unitary(z0: GrassmannElement, gamma0: GrassmannElement,
                 delta0: GrassmannElement) -> ExpProduct:
    """exp[z0 (g0^ddag bd + d0^ddag b) - z0^ddag (g0 b + d0 bd)]."""
    if not (gamma0.is_even() and delta0.is_even() and z0.is_even()):
        raise ParityError("spin unitary parameters must be even")
    alg = z0.algebra
    a, ad, b, bd, one = letters(alg)
    expo = ((z0 * gamma0.adjoint()) * bd + (z0 * delta0.adjoint()) * b
            - (z0.adjoint() * gamma0) * b - (z0.adjoint() * delta0) * bd)
    return ExpProduct((expo,))


@dataclass(frozen=True)
class UnitaryParams:
    kind: str  # D, T, S, G, U_osp, U_spin
    params: dict


def unitary(params: UnitaryParams, space: FockSpace) -> OperatorMatrix:
    """Realize one of the named superunitary/normalizer factories."""
    p = params.params
    builders = {
        "D": lambda: displacement(p["z"]),
        "T": lambda: fermion_displacement(p["z"]),
        "S": lambda: squeeze(p["x0"]),
        "G": lambda: supersqueeze(p["beta0"], p["gamma1"], p["delta1"]),
        "U_osp": lambda: osp_unitary(p["x0"], p["gamma1"], p["delta1"]),
        "U_spin": lambda: spin_unitary(p["z0"], p["gamma0"], p["delta0"]),
    }
    if params.kind not in builders:
        raise ConfigurationError(f"unknown unitary kind {params.kind!r}")
    return builders[params.kind]().matrix(space)


# ---------------------------------------------------------------------------
# Even-calculus helpers shared with the squeeze reduction
# ---------------------------------------------------------------------------

def _cosh_of_norm(u2: GrassmannElement) -> GrassmannElement:
    # cosh(sqrt(t)) = sum t^k / (2k)!
    return entire_series(u2, lambda k: 1.0 / math.factorial(2 * k), "cosh-norm")


def _sinhc_of_norm(u2: GrassmannElement) -> GrassmannElement:
    # sinh(sqrt(t))/sqrt(t) = sum t^k / (2k+1)!
    return entire_series(u2, lambda k: 1.0 / math.factorial(2 * k + 1),
                         "sinhc-norm")


def squeeze_parameter(beta0: GrassmannElement) -> GrassmannElement:
    """X0 solving the squeeze balance for a + beta0 ad.

    X0 = -beta0 * artanh(s)/s evaluated at s^2 = beta0 beta0^ddag, which is
    analytic in s^2 and therefore defined for soul-only beta0 as well.
    Requires |body(beta0)| < 1.
    """
    if not beta0.is_even():
        raise ParityError("beta0 must be even")
    if abs(beta0.body) >= 1.0:
        raise DomainError(
            f"no bounded squeeze parameter: |body(beta0)| = {abs(beta0.body)} >= 1")
    t = beta0 * beta0.adjoint()
    g = entire_series(t, lambda k: 1.0 / (2 * k + 1), "artanh-over-s")
    return -beta0 * g


# ---------------------------------------------------------------------------
# Alternating-word raising operators
# ---------------------------------------------------------------------------

def _alt_factors(length: int, first: GrassmannElement,
                 second: GrassmannElement) -> list[GrassmannElement]:
    return [first if i % 2 == 0 else second for i in range(length)]


def _word_product(alg: Algebra, factors) -> GrassmannElement:
    acc = alg.one()
    for f in factors:
        acc = acc * f
    return acc


def o_word_operator(ell: int, first: GrassmannElement,
                    second: GrassmannElement,
                    z1: GrassmannElement) -> SuperOperatorExpr:
    """The raising-operator word O(ell, first, second, z1).

    (1/ell!) { W_ell (ad^ell - z1 ad^(ell+1))
               + 1/(ell+1) sum_j (-1)^(j+ell) W_(ell-j) z1 W'_j ad^(ell+1) }
    where W alternates first, second, ... and the z1 insertion continues the
    global alternation.
    """
    if ell < 0:
        raise ConfigurationError("ell must be nonnegative")
    alg = first.algebra
    a, ad, b, bd, one = letters(alg)
    factors = _alt_factors(ell, first, second)
    w_full = _word_product(alg, factors)

    def ad_pow(k):
        expr = SuperOperatorExpr.identity(alg)
        for _ in range(k):
            expr = expr * ad
        return expr

    inv_fact = 1.0 / math.factorial(ell)
    expr = (w_full * inv_fact) * ad_pow(ell)
    expr = expr + ((-(w_full * z1)) * inv_fact) * ad_pow(ell + 1)
    for j in range(ell + 1):
        head = _word_product(alg, factors[: ell - j])
        tail = _word_product(alg, factors[ell - j:])
        coeff = head * z1 * tail * ((-1.0) ** (j + ell) * inv_fact / (ell + 1))
        expr = expr + coeff * ad_pow(ell + 1)
    return expr


def o_apply_zpow(ell: int, first: GrassmannElement, second: GrassmannElement,
                 z1: GrassmannElement, z: GrassmannElement,
                 n: int) -> GrassmannElement:
    """Coefficient action of O on z^n (derivatives replaced by falling powers)."""
    alg = first.algebra
    factors = _alt_factors(ell, first, second)
    w_full = _word_product(alg, factors)

    def dpow(k):
        if k > n:
            return alg.zero()
        return z ** (n - k) * float(math.perm(n, k))

    acc = w_full * dpow(ell) * (1.0 / math.factorial(ell))
    acc = acc - w_full * z1 * dpow(ell + 1) * (1.0 / math.factorial(ell))
    for j in range(ell + 1):
        head = _word_product(alg, factors[: ell - j])
        tail = _word_product(alg, factors[ell - j:])
        acc = acc + (head * z1 * tail * dpow(ell + 1)
                     * ((-1.0) ** (j + ell) / (math.factorial(ell) * (ell + 1))))
    return acc


# ---------------------------------------------------------------------------
# Family constructors
# ---------------------------------------------------------------------------

@dataclass
class FamilyResult:
    name: str
    state: SuperState
    expr: SuperOperatorExpr
    eigenvalue: GrassmannElement
    record: dict = field(default_factory=dict)
    residual: float = float("nan")

    def compute_residual(self) -> float:
        self.residual = residual(self.expr, self.eigenvalue, self.state)
        return self.residual


def _exp_ad_poly(alg: Algebra, coeff_by_power: dict[int, GrassmannElement],
                 space: FockSpace) -> OperatorMatrix:
    """exp of sum_k coeff_k ad^k (raising-only, exact on the truncation)."""
    a, ad, b, bd, one = letters(alg)
    expr = SuperOperatorExpr.zero(alg)
    for k, c in coeff_by_power.items():
        term = SuperOperatorExpr.identity(alg)
        for _ in range(k):
            term = term * ad
        expr = expr + c * term
    return operator_exp(expr, space)


def _exp_za(z: GrassmannElement, space: FockSpace) -> OperatorMatrix:
    alg = z.algebra
    a, ad, b, bd, one = letters(alg)
    return operator_exp(z * ad, space)


def gen_supersqueezed_reduction(beta: GrassmannElement, z: GrassmannElement):
    """Squeeze reduction for a + beta ad: returns a dict with X0, the even
    reduction factors, beta1_hat and z_hat (computed with full ring inverses,
    which the residual checks validate)."""
    alg = beta.algebra
    beta0, beta1 = beta.even(), beta.odd()
    x0 = squeeze_parameter(beta0)
    u2 = x0 * x0.adjoint()
    cosh_u = _cosh_of_norm(u2)
    sinhc = _sinhc_of_norm(u2)
    p_sinh = x0 * sinhc            # sqrt(X0)(sqrt(X0^ddag))^-1 sinh||X0||
    pinv_sinh = x0.adjoint() * sinhc
    g_full = cosh_u + beta * pinv_sinh
    g_even = cosh_u + beta0 * pinv_sinh
    g_inv = g_full.inverse()
    beta1_hat = g_inv * beta1 * cosh_u
    z_hat = g_inv * z
    return {
        "x0": x0,
        "cosh": cosh_u,
        "p_sinh": p_sinh,
        "pinv_sinh": pinv_sinh,
        "g_factor": g_even,
        "beta1_hat": beta1_hat,
        "z_hat": z_hat,
    }


def squeeze_normalization(z_hat: GrassmannElement,
                          beta1_hat: GrassmannElement):
    """Normalization data (Gamma, Omega, C_hat) of the reduced squeezed family."""
    alg = z_hat.algebra
    zh = z_hat
    zd = z_hat.adjoint()
    z1 = z_hat.odd()
    z0 = z_hat.even()
    bh = beta1_hat
    bd_ = beta1_hat.adjoint()
    gamma = (alg.one()
             - 0.5 * (zd ** 2 * bh + bd_ * zh ** 2)
             - (1.0 / 3.0) * (zd ** 3 * z1 * bh + bd_ * z1.adjoint() * zh ** 3))
    omega = (((1.0 / 6.0) * (zd ** 3 * z1 * zh ** 2 + zd ** 2 * z1.adjoint() * zh ** 3)
              + (zd ** 2 * z1 * zh + zd * z1 + zd * z1.adjoint() * zh ** 2
                 + z1.adjoint() * zh)
              - 0.25 * (zd ** 2 * zh ** 2 + 4.0 * zd * zh + 2.0))
             * (bd_ * bh))
    omega = omega - (1.0 / 9.0) * ((zd ** 3 * zh ** 3 + 9.0 * zd ** 2 * zh ** 2
                                    + 24.0 * zd * zh + 6.0)
                                   * (z1.adjoint() * z1) * (bd_ * bh))
    omega = omega - (z0.adjoint() ** 2 * bh + bd_ * z0 ** 2) * (z1.adjoint() * z1)
    sqrt_gamma_inv = g_sqrt(gamma).inverse()
    c_hat = sqrt_gamma_inv * (alg.one()
                              + 0.5 * sqrt_gamma_inv * omega * sqrt_gamma_inv)
    return {"Gamma": gamma, "Omega": omega, "C_hat": c_hat}


def _family_gen_coherent(alg, space, params):
    z = params["z"]
    a, ad, b, bd, one = letters(alg)
    st = displacement(z.even()).matrix(space) @ displacement(z.odd()).matrix(space)
    state = st.apply(space.basis(0, MINUS))
    return FamilyResult("gen_coherent", state, a, z)


def _family_gen_supersqueezed(alg, space, params):
    beta, z = params["beta"], params["z"]
    a, ad, b, bd, one = letters(alg)
    red = gen_supersqueezed_reduction(beta, z)
    zh, bh = red["z_hat"], red["beta1_hat"]
    norm = squeeze_normalization(zh, bh)
    zh0, zh1 = zh.even(), zh.odd()
    pre = _exp_ad_poly(alg, {2: -0.5 * bh, 3: (-1.0 / 3.0) * (zh1 * bh)}, space)
    core = (displacement(zh0).matrix(space)
            @ displacement(zh1).matrix(space)).apply(space.basis(0, MINUS))
    state = squeeze(red["x0"]).matrix(space).apply(pre.apply(core))
    state = state.right_mul(norm["C_hat"])
    rec = dict(norm)
    rec.update({k: red[k] for k in ("x0", "beta1_hat", "z_hat", "g_factor")})
    return FamilyResult("gen_supersqueezed", state, a + beta * ad, z, rec)


def _family_b_saes(alg, space, params):
    z0, z1 = params["z0"], params["z1"]
    a, ad, b, bd, one = letters(alg)
    m = (fermion_displacement(z1).matrix(space)
         @ fermion_displacement(z0).matrix(space))
    state = m.apply(space.basis(0, MINUS))
    return FamilyResult("b_saes", state, b, z0 + z1)


def _family_fermion_squeezed(alg, space, params):
    delta0, z1 = params["delta0"], params["z1"]
    sign = float(params.get("sign", 1.0))
    if not delta0.is_even():
        raise ParityError("delta0 must be even")
    a, ad, b, bd, one = letters(alg)
    root = g_sqrt(delta0) if abs(delta0.body) > alg.tolerance else None
    if root is None:
        if not delta0.is_zero(alg.tolerance):
            raise DomainError("soul-only nonzero delta0 has no square root")
        root = alg.zero()
    z0 = root * sign
    # exp(bd z1 - z1^ddag b) exp[ +/- sqrt(delta0)(bd + z1^ddag) ]|0;-> N
    inner = operator_exp(z0 * bd + (z0 * z1.adjoint()) * one, space)
    state = fermion_displacement(z1).matrix(space).apply(
        inner.apply(space.basis(0, MINUS)))
    f_script = g_sqrt(alg.one() + root * root.adjoint())
    f_inv = f_script.inverse()
    n_pm = f_inv * (alg.one() - 0.5 * sign * f_inv
                    * (root * z1.adjoint() + root.adjoint() * z1
                       - sign * (root * root.adjoint() * (z1.adjoint() * z1)))
                    * f_inv)
    state = state.right_mul(n_pm)
    rec = {"F_script": f_script, "N_pm": n_pm, "z0": z0}
    return FamilyResult("fermion_squeezed", state, b + delta0 * bd, z0 + z1, rec)


def _family_az_supercoherent(alg, space, params):
    z0, gamma0 = params["z0"], params["gamma0"]
    if not gamma0.is_even():
        raise ParityError("gamma0 must be even for the Aragone-Zypman form")
    a, ad, b, bd, one = letters(alg)
    inner = space.basis(0, PLUS) - apply_word(gamma0 * ad, space.basis(0, MINUS))
    state = displacement(z0).matrix(space).apply(inner)
    pref = g_sqrt(alg.one() + gamma0.adjoint() * gamma0).inverse()
    state = state.left_mul(pref)
    return FamilyResult("az_supercoherent", state, a + gamma0 * b, z0,
                        {"prefactor": pref})


def _family_gen_super_cohe(alg, space, params):
    z0, z1 = params["z0"], params["z1"]
    gamma0, gamma1 = params["gamma0"], params["gamma1"]
    a, ad, b, bd, one = letters(alg)
    z = z0 + z1
    gamma = gamma0 + gamma1
    zz = z1.adjoint() * z1
    ezzd = alg.one() + z1 * z0.adjoint()   # exp(z1 z0^ddag), nilpotent
    # operator bracket acting on |0;->
    t1 = displacement(-z1).matrix(space).apply(
        apply_word((ad + z0.adjoint() * one) * (gamma0 * ezzd),
                   space.basis(0, MINUS)))
    t1 = t1.left_mul(alg.one() - 0.5 * zz)
    t2 = apply_word(((alg.one() + zz) * gamma1) * ad, space.basis(0, MINUS))
    t3 = space.basis(0, MINUS).left_mul(
        (alg.one() - zz) * z.adjoint() * gamma0 * ezzd).scale(-1.0)
    bracket = t1 + t2 + t3
    inner = space.basis(0, PLUS) - bracket
    state = (displacement(z0).matrix(space)
             @ displacement(z1).matrix(space)).apply(inner)
    b_script = g_sqrt(alg.one() + gamma.adjoint() * gamma)
    b_inv = b_script.inverse()
    n_const = b_inv * (alg.one() - b_inv
                       * (gamma1.adjoint() * gamma1
                          - gamma0.adjoint() * gamma0
                          * (z0.adjoint() * z0) ** 2)
                       * (z1.adjoint() * z1) * b_inv)
    state = state.right_mul(n_const)
    rec = {"N": n_const, "B_script": b_script}
    return FamilyResult("gen_super_cohe", state, a + gamma * b, z, rec)


def _family_susy_standard(alg, space, params):
    z0, theta1 = params["z0"], params["theta1"]
    a, ad, b, bd, one = letters(alg)
    state = (displacement(z0).matrix(space)
             @ fermion_displacement(theta1).matrix(space)).apply(
                 space.basis(0, MINUS))
    return FamilyResult("susy_standard", state, a, z0)


def _family_odd(alg, space, params, sector):
    gamma1, delta1, z = params["gamma1"], params["delta1"], params["z"]
    if not gamma1.is_odd() or not delta1.is_odd():
        raise ParityError("odd-case family needs odd gamma and delta")
    a, ad, b, bd, one = letters(alg)
    if sector == MINUS:
        pre = _exp_ad_poly(alg, {2: -0.5 * (gamma1 * delta1)}, space)
        mid = operator_exp(-(delta1 * (ad * bd)), space)
    else:
        pre = _exp_ad_poly(alg, {2: -0.5 * (delta1 * gamma1)}, space)
        mid = operator_exp(-(gamma1 * (ad * b)), space)
    state = pre @ mid @ _exp_za(z, space)
    state = state.apply(space.basis(0, sector))
    name = "odd_minus" if sector == MINUS else "odd_plus"
    return FamilyResult(name, state, a + gamma1 * b + delta1 * bd, z)


def _family_spin_half(alg, space, params, sector):
    gamma0, delta0, z0 = params["gamma0"], params["delta0"], params["z0"]
    for x, nm in ((gamma0, "gamma0"), (delta0, "delta0")):
        if not x.is_even() or abs(x.body) <= alg.tolerance:
            raise ParityError(f"{nm} must be even with invertible body")
    a, ad, b, bd, one = letters(alg)
    root_gd = g_sqrt(gamma0 * delta0)
    if sector == MINUS:
        ferm = g_sqrt(gamma0).inverse() * g_sqrt(delta0)
        expo = root_gd * ad - ferm * bd
    else:
        ferm = g_sqrt(delta0).inverse() * g_sqrt(gamma0)
        expo = root_gd * ad - ferm * b
    state = (operator_exp(expo, space) @ _exp_za(z0, space)).apply(
        space.basis(0, sector))
    name = "spin_half" if sector == MINUS else "spin_half_plus"
    return FamilyResult(name, state, a + gamma0 * b + delta0 * bd, z0,
                        {"root_gd": root_gd, "ferm": ferm})


def _unipotent_inverse(m: OperatorMatrix) -> OperatorMatrix:
    """(I + N)^-1 for nilpotent N in the pair algebra."""
    space = m.space
    n_part = m - OperatorMatrix.identity(space)
    acc = OperatorMatrix.identity(space)
    term = OperatorMatrix.identity(space)
    for _ in range(2 * space.dim + 2):
        term = term @ n_part
        term = term.scale(-1.0)
        if term.max_abs() == 0.0:
            return acc
        acc = acc + term
    raise ConfigurationError("matrix is not unipotent")


def _cosh_op(x: OperatorMatrix) -> OperatorMatrix:
    return (operator_exp(x) + operator_exp(x.scale(-1.0))).scale(0.5)


def _sinh_op(x: OperatorMatrix) -> OperatorMatrix:
    return (operator_exp(x) - operator_exp(x.scale(-1.0))).scale(0.5)


def _family_spin_half_z1(alg, space, params, sector):
    gamma0, delta0, z = params["gamma0"], params["delta0"], params["z"]
    z0, z1 = z.even(), z.odd()
    a, ad, b, bd, one = letters(alg)
    root_gd = g_sqrt(gamma0 * delta0)
    ad_m = realize_matrix(root_gd * ad, space)
    cosh_r = _cosh_op(ad_m)
    th = _unipotent_inverse(cosh_r) @ _sinh_op(ad_m)
    ad_plain = realize_matrix(ad, space)
    inner_shift = ad_plain - th.left_mul(root_gd.inverse())
    pre = OperatorMatrix.identity(space) + inner_shift.left_mul(-z1)
    ferm_letter = bd if sector == MINUS else b
    ferm_coeff = (g_sqrt(gamma0).inverse() * g_sqrt(delta0) if sector == MINUS
                  else g_sqrt(delta0).inverse() * g_sqrt(gamma0))
    bracket = (OperatorMatrix.identity(space)
               + (ad_plain.scale(2.0) - th.left_mul(root_gd.inverse()))
               .left_mul(z1))
    arg = ad_m - (bracket @ realize_matrix(ferm_letter, space)).left_mul(ferm_coeff)
    state = (pre @ _cosh_op(arg) @ _exp_za(z, space)).apply(
        space.basis(0, sector))
    name = "spin_half_z1" if sector == MINUS else "spin_half_z1_plus"
    return FamilyResult(name, state, a + gamma0 * b + delta0 * bd, z)


def _family_general(alg, space, params, sector):
    """Closed forms for a + beta1_hat ad + gamma0 b + delta0 bd (reduced)."""
    gamma0, delta0 = params["gamma0"], params["delta0"]
    beta1_hat, z = params["beta1_hat"], params["z"]
    if not beta1_hat.is_odd():
        raise ParityError("beta1_hat must be odd")
    z0, z1 = z.even(), z.odd()
    a, ad, b, bd, one = letters(alg)
    minus = g_sqrt(gamma0 * delta0 - beta1_hat)
    plus = g_sqrt(gamma0 * delta0 + beta1_hat)
    expr = a + beta1_hat * ad + gamma0 * b + delta0 * bd
    if z1.is_zero():
        # z1 = 0 compact forms with the exp(-(1/2) c^-1 beta1_hat ad ferm) prefix
        if sector == MINUS:
            pre = operator_exp((-0.5 * (gamma0.inverse() * beta1_hat))
                               * (ad * bd), space)
            arg = minus * ad - (gamma0.inverse() * plus) * bd
        else:
            pre = operator_exp((-0.5 * (delta0.inverse() * beta1_hat))
                               * (ad * b), space)
            arg = minus * ad - (delta0.inverse() * plus) * b
        state = (pre @ _cosh_op(realize_matrix(arg, space))
                 @ _exp_za(z0, space)).apply(space.basis(0, sector))
    else:
        ad_m = realize_matrix(minus * ad, space)
        th = _unipotent_inverse(_cosh_op(ad_m)) @ _sinh_op(ad_m)
        scalar_mz1 = OperatorMatrix.identity(space).left_mul(minus * z1)
        head = OperatorMatrix.identity(space) + th @ scalar_mz1
        tail = _exp_za(-z1, space) @ _exp_za(z, space)
        ferm = gamma0.inverse() if sector == MINUS else delta0.inverse()
        scalar_plus = OperatorMatrix.identity(space).left_mul(plus)
        osc = (_cosh_op(ad_m) @ head @ tail).apply(space.basis(0, sector))
        other = PLUS if sector == MINUS else MINUS
        swap = ((_sinh_op(ad_m) @ scalar_plus @ tail)
                .apply(space.basis(0, other))).left_mul(ferm)
        state = osc - swap
    name = "general_minus" if sector == MINUS else "general_plus"
    return FamilyResult(name, state, expr, z)


FAMILY_NAMES = (
    "gen_coherent",
    "gen_supersqueezed",
    "b_saes",
    "fermion_squeezed",
    "az_supercoherent",
    "gen_super_cohe",
    "susy_standard",
    "odd_minus",
    "odd_plus",
    "spin_half",
    "spin_half_plus",
    "spin_half_z1",
    "spin_half_z1_plus",
    "general_minus",
    "general_plus",
)


def construct_family(name: str, params: dict, space: FockSpace) -> FamilyResult:
    """Assemble one printed closed-form family and compute its residual."""
    alg = space.algebra
    dispatch = {
        "gen_coherent": lambda: _family_gen_coherent(alg, space, params),
        "gen_supersqueezed": lambda: _family_gen_supersqueezed(alg, space, params),
        "b_saes": lambda: _family_b_saes(alg, space, params),
        "fermion_squeezed": lambda: _family_fermion_squeezed(alg, space, params),
        "az_supercoherent": lambda: _family_az_supercoherent(alg, space, params),
        "gen_super_cohe": lambda: _family_gen_super_cohe(alg, space, params),
        "susy_standard": lambda: _family_susy_standard(alg, space, params),
        "odd_minus": lambda: _family_odd(alg, space, params, MINUS),
        "odd_plus": lambda: _family_odd(alg, space, params, PLUS),
        "spin_half": lambda: _family_spin_half(alg, space, params, MINUS),
        "spin_half_plus": lambda: _family_spin_half(alg, space, params, PLUS),
        "spin_half_z1": lambda: _family_spin_half_z1(alg, space, params, MINUS),
        "spin_half_z1_plus": lambda: _family_spin_half_z1(alg, space, params, PLUS),
        "general_minus": lambda: _family_general(alg, space, params, MINUS),
        "general_plus": lambda: _family_general(alg, space, params, PLUS),
    }
    if name not in dispatch:
        raise ConfigurationError(f"unknown family {name!r}; "
                                 f"known: {', '.join(FAMILY_NAMES)}")
    result = dispatch[name]()
    result.compute_residual()
    return result


def combine_sectors(rho: GrassmannElement, tau: GrassmannElement,
                    z: GrassmannElement, space: FockSpace) -> SuperState:
    """rho |z;-> + tau |z;+>, requiring rho1 z1 = tau1 z1 = 0."""
    alg = space.algebra
    z1 = z.odd()
    for c, nm in ((rho, "rho"), (tau, "tau")):
        if (c.odd() * z1).max_abs() > alg.tolerance:
            from .errors import EigenvalueConstraintViolated

            raise EigenvalueConstraintViolated(f"{nm}1 z1 = 0")
    dmat = (displacement(z.even()).matrix(space)
            @ displacement(z1).matrix(space))
    minus = dmat.apply(space.basis(0, MINUS)).left_mul(rho)
    plus = dmat.apply(space.basis(0, PLUS)).left_mul(tau)
    return minus + plus


# ---------------------------------------------------------------------------
# Density of algebra
# ---------------------------------------------------------------------------

def _matrix_berezin(m: OperatorMatrix, j: int, side: str) -> OperatorMatrix:
    """Berezin-integrate the blade coefficients of a realized operator.

    Only valid when no odd letter separates the measure from the blades,
    which holds for the word-even operators used by the density checks.
    """
    if m.odd:
        raise ConfigurationError("matrix Berezin integral needs word-even operator")
    alg = m.space.algebra
    out = {}
    for mask, blk in m.even.items():
        probe = np.zeros(alg.dim, dtype=np.complex128)
        probe[mask] = 1.0
        elem = GrassmannElement(alg, probe)
        integ = (berezin_integrate(elem, j) if side == "right"
                 else berezin_integrate_left(elem, j))
        for mm, cc in integ.blades().items():
            if mm in out:
                out[mm] = out[mm] + cc * blk
            else:
                out[mm] = cc * blk
    return OperatorMatrix(m.space, out, {}, ("berezin", j, m.provenance))


def density_of_algebra(space: FockSpace, z1_index: int | None = None,
                       conj_index: int | None = None,
                       w: float = 1.0) -> dict[str, float]:
    """Verify the linear-density identities for the annihilation operator.

    The odd variable z1 and its conjugate are represented by two reserved
    generators treated as independent coordinates of the Berezin calculus
    (a single self-conjugate generator would make every double integral
    vanish identically, contradicting the recovered commutator identities).
    Densities: A_minus = z1^ddag a and A_plus = -z1 ad.
    """
    alg = space.algebra
    if z1_index is None:
        z1_index = alg.order - 1
    if conj_index is None:
        conj_index = z1_index + 1
    if conj_index == z1_index or not (
            1 <= z1_index <= alg.order and 1 <= conj_index <= alg.order):
        raise ConfigurationError("need two distinct reserved generators")
    a, ad, b, bd, one = letters(alg)
    z1 = alg.generator(z1_index)
    z1c = alg.generator(conj_index)  # stands for z1^ddag

    m_minus = realize_matrix(z1c * a, space)
    m_plus = realize_matrix(-(z1 * ad), space)
    a_m = realize_matrix(a, space)
    ad_m = realize_matrix(ad, space)
    ident = OperatorMatrix.identity(space)

    report: dict[str, float] = {}
    report["a = int A- dz1!"] = (
        _matrix_berezin(m_minus, conj_index, "right") - a_m
    ).max_abs_below_guard()
    report["ad = int dz1 A+"] = (
        _matrix_berezin(m_plus, z1_index, "left") - ad_m
    ).max_abs_below_guard()

    anti = m_minus @ m_plus + m_plus @ m_minus
    comm = m_minus @ m_plus - m_plus @ m_minus
    double_anti = _matrix_berezin(
        _matrix_berezin(anti, conj_index, "right"), z1_index, "right")
    double_comm = _matrix_berezin(
        _matrix_berezin(comm, conj_index, "right"), z1_index, "right")
    report["[a,ad] = int {A-,A+}"] = (
        double_anti - (a_m @ ad_m - ad_m @ a_m)).max_abs_below_guard()
    report["{a,ad} = int [A-,A+]"] = (
        double_comm - (a_m @ ad_m + ad_m @ a_m)).max_abs_below_guard()

    ident_density = ident.left_mul(z1 * z1c)
    report["I-density = z1 z1!"] = (anti - ident_density).max_abs_below_guard()

    anticomm_aad = a_m @ ad_m + ad_m @ a_m
    h_target = anticomm_aad.left_mul(z1 * z1c)
    report["H-density shape (w=2)"] = (comm - h_target).max_abs_below_guard()
    report["H-density (given w)"] = (
        comm - h_target.scale(w / 2.0)).max_abs_below_guard()

    alpha = 0.3
    coh = operator_exp((ad - a).left_scale(alpha), space).apply(
        space.basis(0, MINUS))
    res = m_minus.apply(coh) - coh.left_mul(alpha * z1c)
    report["A- eigenrelation on coherent"] = res.max_abs_below_guard()
    return report


# ---------------------------------------------------------------------------
# Bogoliubov identity
# ---------------------------------------------------------------------------

def bogoliubov_check(x0: GrassmannElement, space: FockSpace) -> dict[str, float]:
    """Compare S^ddag a S against cosh||X0|| a + phase sinh||X0|| ad."""
    if not x0.is_even():
        raise ParityError("X0 must be even")
    alg = space.algebra
    a, ad, b, bd, one = letters(alg)
    s = squeeze(x0)
    s_m = s.matrix(space)
    s_adj = s.adjoint().matrix(space)
    lhs = s_adj @ realize_matrix(a, space) @ s_m
    u2 = x0 * x0.adjoint()
    rhs = realize_matrix(_cosh_of_norm(u2) * a + (x0 * _sinhc_of_norm(u2)) * ad,
                         space)
    report = {"bogoliubov": (lhs - rhs).max_abs_below_guard()}
    if abs(x0.body) > alg.tolerance:
        # cross-check the sqrt-quotient phase form printed for invertible X0
        phase = g_sqrt(x0) * g_sqrt(x0.adjoint()).inverse()
        norm = g_sqrt(u2)
        from .grassmann import g_cosh, g_sinh

        rhs2 = realize_matrix(g_cosh(norm) * a + (phase * g_sinh(norm)) * ad,
                              space)
        report["bogoliubov-sqrt-form"] = (lhs - rhs2).max_abs_below_guard()
    return report
