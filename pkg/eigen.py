"""
Hecke eigenvalues of Ikeda lifts at p and their signs.

lambda(p) is read off the spin Q by Vieta and, independently, from the
closed beta-sum formula. The sum is split by powers of sqrt(p) to get an
explicit prime beyond which lambda(p) > 0, and for genus 4 the eigenvalue
is analysed exactly as a quadratic in u = a + 1/a.
"""

import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache, partial
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy

import config
from combinat import beta
from exactalg import (
    KExp,
    LaurentAQ,
    PolyX,
    UPolynomial,
    horner,
    q_power,
    to_u_poly,
)
from lfactor import GENUS4_SCALE, genus4_Q_closed
from utils.expressions import parse_expression
from utils.parallel import parallel_map
from utils.surd import Surd

logger = logging.getLogger(__name__)


# ============================================================================
# Types
# ============================================================================


@dataclass(frozen=True)
class LambdaP:
    """Symbolic lambda(p) at generic weight."""

    expr: LaurentAQ

    @property
    def is_symmetric(self) -> bool:
        return self.expr.is_a_symmetric()

    def u_poly(self) -> UPolynomial:
        return to_u_poly(self.expr)


@dataclass(frozen=True)
class CrTable:
    """Coefficients c_r of q**r in lambda(p) / p**(nk - n/2), r in [-n**2, n**2]."""

    n: int
    entries: Dict[int, LaurentAQ]

    def rebuild(self) -> LaurentAQ:
        total = LaurentAQ()
        for r, c in sorted(self.entries.items()):
            total = total + c * q_power(r)
        return total * q_power(KExp(-self.n, 2 * self.n))

    def at_unit(self, sign: int = 1) -> Dict[int, int]:
        """Integer values of every c_r at a = sign."""
        out = {}
        for r, c in self.entries.items():
            out[r] = sum(coeff * (sign ** (a % 2)) for a, _, coeff in c.terms())
        return out


@dataclass(frozen=True)
class QuadraticInU:
    """prefactor * (u2*u**2 + u1*u + u0) at a fixed prime."""

    p: int
    prefactor: LaurentAQ
    u2: Surd
    u1: Surd
    u0: Surd

    def value(self, u) -> Surd:
        return horner([self.u0, self.u1, self.u2], u, self.p)

    @property
    def vertex(self) -> Surd:
        return -self.u1 / (2 * self.u2)

    def minimum(self) -> Tuple[Surd, Surd]:
        """(u, bracket value) minimizing the bracket over u in [-2, 2]."""
        vertex = self.vertex
        if self.u2 > 0 and -2 <= vertex <= 2:
            return vertex, self.value(vertex)
        lo, hi = Surd(-2, 0, self.p), Surd(2, 0, self.p)
        lo_value, hi_value = self.value(lo), self.value(hi)
        return (lo, lo_value) if lo_value <= hi_value else (hi, hi_value)

    @property
    def positive(self) -> bool:
        return self.minimum()[1] > 0

    def split_bound_holds(self) -> Optional[bool]:
        """
        Two-part lower bound valid for p >= 5.

        p**(3/2)(sqrt(p) + u) + u/sqrt(p) is increasing in u, so its minimum
        is at u = -2; every other summand is positive once sqrt(p) > 2.
        """
        if self.p < 5:
            return None
        root = Surd.sqrt(self.p)
        first = Surd.q_power(self.p, 3) * (root - 2) - 2 / root
        return first > 0 and root - 2 > 0


@dataclass(frozen=True)
class HeckeEigenvalues:
    """lambda at T(p) and at the generators T1, T2, T3 of the Hecke algebra at p**2."""

    t_p: LaurentAQ
    t1_p2: LaurentAQ
    t2_p2: LaurentAQ
    t3_p2: LaurentAQ
    flags: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    as_printed: Dict[str, str] = field(default_factory=dict)

    def items(self) -> List[Tuple[str, LaurentAQ]]:
        return [("T(p)", self.t_p), ("T1(p^2)", self.t1_p2), ("T2(p^2)", self.t2_p2), ("T3(p^2)", self.t3_p2)]

    def trusted(self) -> List[Tuple[str, LaurentAQ]]:
        """Entries whose transcription is unambiguous."""
        return [(name, value) for name, value in self.items() if "unbalanced" not in self.flags.get(name, ())]


@dataclass(frozen=True)
class SignRow:
    """One scanned point; value is None and sign may be None when decided numerically."""

    p: int
    u: object
    value: Optional[Surd]
    sign: Optional[int]


# ============================================================================
# lambda(p)
# ============================================================================


def lambda_p_from_Q(Q: PolyX) -> LambdaP:
    """lambda(p) = -[x**1] Q."""
    if Q[0] != LaurentAQ.one():
        raise ValueError(f"Q must have constant term 1, got {Q[0].render()}")
    return LambdaP(-Q[1])


@lru_cache(maxsize=None)
def lambda_p_formula(n: int) -> LaurentAQ:
    """
    Closed form p**(nk - n/2) * sum_j sum_i a**(2i+j-n) * sum_r p**(-r/2) beta(r, j, n).
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    total = LaurentAQ()
    for j in range(n + 1):
        inner = LaurentAQ()
        for r in range(j * (j - 2 * n), j * (2 * n - j) + 1, 2):
            b = beta(r, j, n)
            if b:
                inner = inner + LaurentAQ.monomial(b, 0, -r)
        for i in range(n - j + 1):
            total = total + inner * LaurentAQ.monomial(1, 2 * i + j - n, 0)
    return total * q_power(KExp(-n, 2 * n))


def c_coefficients(n: int) -> CrTable:
    """c_r = sum_j sum_{i=0}^{n-j} a**(2i+j-n) beta(-r, j, n)."""
    entries = {}
    for r in range(-n * n, n * n + 1):
        c = LaurentAQ()
        for j in range(n + 1):
            b = beta(-r, j, n)
            if b:
                for i in range(n - j + 1):
                    c = c + LaurentAQ.monomial(b, 2 * i + j - n, 0)
        entries[r] = c
    return CrTable(n, entries)


def crude_bounds(n: int) -> Dict[int, int]:
    """B_r = sum_j (n-j+1) |beta(-r, j, n)| >= |c_r| on the unit circle, for r < n**2."""
    return {
        r: sum((n - j + 1) * abs(beta(-r, j, n)) for j in range(n + 1))
        for r in range(-n * n, n * n)
    }


def _dominates(n: int, bounds: Dict[int, int], p: int) -> bool:
    lead = Surd.q_power(p, n * n)
    tail = Surd(0, 0, p)
    for r, b in bounds.items():
        if b:
            tail = tail + Surd.q_power(p, r) * b
    return lead > tail


def first_sign_threshold(n: int) -> int:
    """
    Smallest prime p0 with p**(n**2/2) > sum_{r<n**2} B_r p**(r/2) for all p >= p0.

    t**(2n**2) - sum B_r t**(r+n**2) has one sign change, hence one positive
    root, so the first prime past it works for every larger prime.
    """
    bounds = crude_bounds(n)
    ceiling = getattr(config, "THRESHOLD_PRIME_CEILING", 10 ** 7)
    p = 2
    while p <= ceiling:
        if _dominates(n, bounds, p):
            logger.info(f"Sign threshold for n={n}: p0 = {p}")
            return p
        p = sympy.nextprime(p)
    raise RuntimeError(f"No sign threshold below {ceiling} for n={n}")


def lambda_p_value(n: int, k: int, p: int, u) -> Surd:
    """Exact lambda(p) for the genus-2n lift at concrete (k, p, u)."""
    return to_u_poly(lambda_p_formula(n).fix_weight(k)).evaluate(p, k, u)


def scan_u_poly(
    poly: UPolynomial,
    k: int,
    u_values: Optional[Sequence],
    u_by_prime: Optional[Dict[int, Surd]],
    p: int,
) -> List[SignRow]:
    """Exact values and signs of a polynomial in u at one prime."""
    coeffs = poly.coefficients_at(p, k)
    points = [u_by_prime[p]] if u_by_prime is not None else u_values
    rows = []
    for u in points:
        value = horner(coeffs, u, p)
        rows.append(SignRow(p, u, value, value.sign()))
    return rows


def sign_scan(
    n: int,
    k: int,
    primes: Sequence[int],
    u_values: Optional[Sequence] = None,
    u_by_prime: Optional[Dict[int, Surd]] = None,
    workers: Optional[int] = None,
) -> List[SignRow]:
    """
    Exact signs of lambda(p) over primes and u values.

    Args:
        n: half the genus
        k: weight parameter
        primes: primes to scan
        u_values: grid used at every prime
        u_by_prime: one u per prime (eigenform data), overrides the grid

    Returns:
        Rows ordered by prime, then u
    """
    poly = to_u_poly(lambda_p_formula(n).fix_weight(k))
    scan_prime = partial(scan_u_poly, poly, k, u_values, u_by_prime)
    per_prime = parallel_map(scan_prime, primes, workers, desc=f"lambda(p) n={n}")
    rows = [row for chunk in per_prime for row in chunk]
    negatives = sum(1 for row in rows if row.sign < 0)
    logger.info(f"Scanned {len(rows)} points for n={n}, k={k}: {negatives} negative")
    return rows


# ============================================================================
# Genus 4
# ============================================================================


def hecke_eigenvalue_formulas(path: Optional[Path] = None) -> HeckeEigenvalues:
    """Load the transcribed genus-4 eigenvalue formulas."""
    path = Path(path or getattr(config, "EIGENVALUE_FORMULAS_FILE"))
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    values, flags, printed = {}, {}, {}
    for entry in data["entries"]:
        name = entry["name"]
        values[name] = parse_expression(entry["scale"]) * parse_expression(entry["body"])
        flags[name] = tuple(entry.get("flags", ()))
        printed[name] = entry.get("as_printed", "")
    logger.debug(f"Loaded {len(values)} eigenvalue formulas from {path}")
    return HeckeEigenvalues(
        t_p=values["T(p)"],
        t1_p2=values["T1(p^2)"],
        t2_p2=values["T2(p^2)"],
        t3_p2=values["T3(p^2)"],
        flags=flags,
        as_printed=printed,
    )


@lru_cache(maxsize=1)
def _genus4_lambda_body() -> UPolynomial:
    Q, _ = genus4_Q_closed()
    body = lambda_p_from_Q(Q).expr * q_power(-GENUS4_SCALE)
    if not body.is_k_free():
        raise ValueError("lambda(p) / p**(2k-1) should not depend on k")
    return to_u_poly(body)


def lambda_quadratic_in_u(p: int) -> QuadraticInU:
    """
    Genus-4 lambda(p) = p**(2k-1) * (u**2 + u1 u + u0) at a fixed prime.

    The coefficients come from the spin Q, not from a transcription.
    """
    if not sympy.isprime(p):
        raise ValueError(f"p = {p} is not a prime")
    poly = _genus4_lambda_body()
    if poly.degree != 2:
        raise ValueError(f"Expected a quadratic in u, got degree {poly.degree}")
    u0, u1, u2 = poly.coefficients_at(p, 0)
    if u2 != 1:
        raise ValueError(f"Leading u coefficient should be 1, got {u2}")
    return QuadraticInU(p, q_power(GENUS4_SCALE), u2, u1, u0)


def quadratic_scan(primes: Iterable[int]) -> Dict[int, bool]:
    """Positivity verdict of the genus-4 quadratic at each prime."""
    return {p: lambda_quadratic_in_u(p).positive for p in primes}
