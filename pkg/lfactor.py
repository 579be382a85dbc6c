"""
Builders for local L-factor denominators.

Symmetric-power factors, the spin product over beta exponents in its
automorphic and classical normalizations, the closed-form genus 1, 2 and 4
polynomials, and the standard L-factor of a lift.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import config
from combinat import beta_table
from exactalg import KExp, LaurentAQ, PolyX, q_power, substitute_scale

logger = logging.getLogger(__name__)

# An integer weight, or one affine in k (KExp(base, k_mult) meaning base + k_mult*k)
Weight = Union[int, KExp]

# The Saito-Kurokawa lift of a weight-2k form has weight k + 1
SK_LIFT_WEIGHT = KExp(1, 1)

# p**(2k-1) as a q-power
GENUS4_SCALE = KExp(-2, 4)

GENUS2_VARIANTS = ("printed", "corrected")
FACTOR_KINDS = ("spin-automorphic", "spin-classical", "standard", "sym-power")


def p_power(weight: Weight, mult: int, shift: int) -> LaurentAQ:
    """p**(mult*weight + shift) as a q-monomial."""
    return q_power(KExp.of(weight) * (2 * mult) + 2 * shift)


@dataclass(frozen=True)
class LiftSpec:
    """
    Ikeda lift of genus 2n from an elliptic form of weight 2k.

    k is None for the generic weight symbol; the lift exists only when
    n and k have the same parity, which is checked at evaluation time.
    """

    n: int
    k: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")

    @property
    def genus(self) -> int:
        return 2 * self.n

    @property
    def parity_ok(self) -> Optional[bool]:
        return None if self.k is None else (self.n - self.k) % 2 == 0

    @property
    def classical_scale(self) -> KExp:
        """q-exponent 2nk - n of the automorphic-to-classical rescaling."""
        return KExp(-self.n, 2 * self.n)


@dataclass(frozen=True)
class LocalFactor:
    """A local L-factor, stored as the polynomial whose reciprocal it is."""

    inverse_poly: PolyX
    kind: str
    expected_degree: int

    def __post_init__(self):
        if self.kind not in FACTOR_KINDS:
            raise ValueError(f"Unknown factor kind {self.kind!r}")
        if self.inverse_poly[0] != LaurentAQ.one():
            raise ValueError(f"{self.kind} factor must have constant term 1")
        if self.inverse_poly.degree != self.expected_degree:
            raise ValueError(
                f"{self.kind} factor has degree {self.inverse_poly.degree}, "
                f"expected {self.expected_degree}"
            )


def sym_power_roots(m: int, half_shift: int) -> List[LaurentAQ]:
    """Roots a**(2i-m) * q**(-half_shift), i = 0..m."""
    if m < 0:
        raise ValueError(f"Symmetric power must be non-negative, got {m}")
    return [LaurentAQ.monomial(1, 2 * i - m, -half_shift) for i in range(m + 1)]


def sym_power_factor(m: int, half_shift: int) -> PolyX:
    """prod_{i=0}^{m} (1 - a**(2i-m) q**(-r) x), the inverse of L_p(s + r/2, Sym^m)."""
    poly = PolyX.one()
    for root in sym_power_roots(m, half_shift):
        poly = poly.times_linear(root)
    return poly


def spin_roots(n: int) -> List[Tuple[LaurentAQ, int]]:
    """Automorphic spin roots with multiplicity, read off the beta table."""
    roots: dict = {}
    for r, j, b in beta_table(n).nonzero():
        if b < 0:
            raise ValueError(f"beta({r},{j},{n}) = {b} is negative; the spin product is not a polynomial")
        for root in sym_power_roots(n - j, r):
            roots[root] = roots.get(root, 0) + b
    return sorted(roots.items(), key=lambda kv: kv[0].render())


def automorphic_spin_Q(spec: LiftSpec, max_degree: Optional[int] = None) -> PolyX:
    """
    Inverse of the spin L-factor in the automorphic normalization.

    Args:
        spec: lift parameters (only n is used)
        max_degree: truncate the product above this x-degree

    Returns:
        prod over j, r of Sym^(n-j) factors at shift r raised to beta(r, j, n)
    """
    ceiling = getattr(config, "SPIN_Q_MAX_N", 3)
    if spec.n > ceiling:
        raise ValueError(f"Spin polynomial of degree 4**{spec.n} exceeds the n <= {ceiling} ceiling")
    poly = PolyX.one()
    for root, mult in spin_roots(spec.n):
        for _ in range(mult):
            poly = poly.times_linear(root, max_degree)
    logger.debug(f"Automorphic spin Q for n={spec.n}: degree {poly.degree}")
    return poly


def classical_spin_Q(spec: LiftSpec, max_degree: Optional[int] = None) -> PolyX:
    """Spin Q with x rescaled by p**(nk - n/2); weight fixed when spec.k is set."""
    poly = substitute_scale(automorphic_spin_Q(spec, max_degree), q_power(spec.classical_scale))
    return poly if spec.k is None else poly.fix_weight(spec.k)


def sk_lift_Q(k: Optional[int] = None) -> PolyX:
    """Spin Q of the Saito-Kurokawa lift (genus 2)."""
    return classical_spin_Q(LiftSpec(1, k))


# Factors (1 - a**m p**(2k-1) p**(h/2) x) exactly as listed for genus 4: (m, h)
_GENUS4_PRINTED = (
    (1, 1), (-1, 1), (1, -1), (-1, -1),
    (1, 3), (-1, 3), (1, -3), (-1, -3),
    (0, 4), (0, 2),
    (2, 0), (-2, 0), (0, -2), (0, -4),
    (0, 0), (0, 0),
)


def genus4_Q_closed() -> Tuple[PolyX, List[LaurentAQ]]:
    """
    The closed-form genus-4 spin Q and its 16 roots divided by p**(2k-1).

    Returns:
        (Q, roots) with the double root 1 listed twice
    """
    roots = [LaurentAQ.monomial(1, m, h) for m, h in _GENUS4_PRINTED]
    poly = PolyX.one()
    for root in roots:
        poly = poly.times_linear(root * q_power(GENUS4_SCALE))
    return poly, roots


def genus1_Q(lam_p, weight: Weight) -> PolyX:
    """1 - lambda x + p**(weight-1) x**2."""
    return PolyX([1, -LaurentAQ.coerce(lam_p), p_power(weight, 1, -1)])


def genus1_P() -> PolyX:
    return PolyX.one()


def genus2_Q(lam_p, lam_p2, weight: Weight) -> PolyX:
    lam = LaurentAQ.coerce(lam_p)
    lam2 = LaurentAQ.coerce(lam_p2)
    return PolyX([
        1,
        -lam,
        lam * lam - lam2 - p_power(weight, 2, -4),
        -lam * p_power(weight, 2, -3),
        p_power(weight, 4, -6),
    ])


def genus2_P(weight: Weight, variant: str = "corrected") -> PolyX:
    """
    Genus-2 numerator 1 - p**e x**2.

    variant "printed" keeps the printed exponent e = 4w + 2; "corrected" uses
    e = 2w - 4, the only choice consistent with the x**2 coefficient of P/Q.
    """
    if variant == "printed":
        return PolyX([1, 0, -p_power(weight, 4, 2)])
    if variant == "corrected":
        return PolyX([1, 0, -p_power(weight, 2, -4)])
    raise ValueError(f"Unknown genus-2 numerator variant {variant!r}; choose from {GENUS2_VARIANTS}")


def standard_L_local(spec: LiftSpec) -> PolyX:
    """(1 - x) prod_{i=1}^{2n} (1 - a p**((2k-1)/2 - (k+n-i)) x)(1 - a**-1 ...)."""
    poly = PolyX([1, -1])
    satake_scale = KExp(-1, 2)
    for i in range(1, 2 * spec.n + 1):
        shift = satake_scale + KExp(2 * i - 2 * spec.n, -2)
        for a_exp in (1, -1):
            poly = poly.times_linear(LaurentAQ.monomial(1, a_exp, shift))
    return poly if spec.k is None else poly.fix_weight(spec.k)


def local_factor(kind: str, spec: Optional[LiftSpec] = None, m: int = 0, half_shift: int = 0) -> LocalFactor:
    """Build and validate a LocalFactor of the given kind."""
    if kind == "sym-power":
        return LocalFactor(sym_power_factor(m, half_shift), kind, m + 1)
    if spec is None:
        raise ValueError(f"{kind} factor needs a LiftSpec")
    if kind == "spin-automorphic":
        return LocalFactor(automorphic_spin_Q(spec), kind, 4 ** spec.n)
    if kind == "spin-classical":
        return LocalFactor(classical_spin_Q(spec), kind, 4 ** spec.n)
    if kind == "standard":
        return LocalFactor(standard_L_local(spec), kind, 4 * spec.n + 1)
    raise ValueError(f"Unknown factor kind {kind!r}")
