"""
lambda(p**r) through partial fractions of 1/Q.

1/Q is decomposed over its roots in the rescaled variable X (x times the
classical scale), g(r) is the X**r coefficient rebuilt from residues, and
lambda(p**r) is assembled from g and the numerator coefficients e_i of the
rationality theorem. The transcribed genus-4 residue table is verified
against the decomposition, and the positive factor D(r) that clears the
denominator of lambda(p**r) is built and certified here.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
import sympy

import config
from eigen import SignRow, scan_u_poly
from exactalg import (
    DegenerateSatakeValue,
    EvalPoint,
    FracAQ,
    KExp,
    LaurentAQ,
    certified_sign,
    evaluate_exact,
    q_power,
    to_u_poly,
    u_grid,
)
from lfactor import GENUS4_SCALE, SK_LIFT_WEIGHT, LiftSpec, genus2_P, genus4_Q_closed, spin_roots
from utils.expressions import ExpressionParseError, parse_expression
from utils.numeric import PrecisionExhausted, evaluate_terms, relative_error
from utils.parallel import parallel_map
from utils.surd import Surd

logger = logging.getLogger(__name__)

__all__ = [
    "RootDatum", "PFTerm", "NumeratorData", "DrFactor", "DrFactorization",
    "AppendixRow", "AppendixCheck", "LeadingTerm", "CrReport",
    "NumeratorDataRequired", "AppendixParseError", "DegenerateSatakeValue",
    "genus4_roots", "lift_roots", "partial_fraction", "g_of_r", "lambda_pr",
    "genus2_numerator", "load_numerator", "appendix_terms", "verify_appendix",
    "reconstruction_check", "d_factor", "leading_coefficient_identity",
    "numerator_leading_term", "lambda_pr_sign_scan", "threshold_c_r",
]


class NumeratorDataRequired(LookupError):
    """Numerator coefficients for the requested genus are not available."""


class AppendixParseError(ValueError):
    """A row of the residue table could not be read."""


# ============================================================================
# Types
# ============================================================================


@dataclass(frozen=True)
class RootDatum:
    """A root rho of Q in the rescaled variable, with multiplicity 1 or 2."""

    rho: LaurentAQ
    multiplicity: int = 1

    def __post_init__(self):
        if not self.rho.is_monomial():
            raise ValueError(f"Root {self.rho.render()} is not a monomial")
        if self.multiplicity not in (1, 2):
            raise ValueError(f"Multiplicity must be 1 or 2, got {self.multiplicity}")


@dataclass(frozen=True)
class PFTerm:
    """coeff / (1 - rho X)**order."""

    root: RootDatum
    order: int
    coeff: FracAQ


@dataclass(frozen=True)
class NumeratorData:
    """Coefficients e_0..e_d of the numerator P in sum lambda(p**r) x**r = P/Q."""

    genus: int
    coefficients: Tuple[LaurentAQ, ...]
    provenance: str = ""

    def __post_init__(self):
        if not self.coefficients or self.coefficients[0] != LaurentAQ.one():
            raise ValueError("Numerator data must start with e_0 = 1")
        expected = _NUMERATOR_DEGREE.get(self.genus)
        if expected is not None and len(self.coefficients) - 1 > expected:
            raise ValueError(
                f"Genus-{self.genus} numerator has degree {len(self.coefficients) - 1}, "
                f"at most {expected} allowed"
            )

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def from_json(cls, data: Mapping) -> "NumeratorData":
        """
        Build from {"genus": g, "e": [{"xpow": i, "terms": [...]}], "provenance": s}.

        Each term is {"a_exp", "q_base", "q_kmult", "num", "den"} and stands
        for num/den * a**a_exp * q**(q_base + q_kmult*k).
        """
        try:
            genus = int(data["genus"])
            by_power: Dict[int, LaurentAQ] = {}
            for entry in data["e"]:
                terms = {}
                for t in entry["terms"]:
                    key = (int(t["a_exp"]), int(t["q_base"]), int(t.get("q_kmult", 0)))
                    terms[key] = terms.get(key, 0) + Fraction(int(t["num"]), int(t.get("den", 1)))
                by_power[int(entry["xpow"])] = LaurentAQ(terms)
        except (KeyError, TypeError, ValueError) as e:
            raise NumeratorDataRequired(f"Malformed numerator data: {e}") from e
        top = max(by_power, default=-1)
        coefficients = tuple(by_power.get(i, LaurentAQ()) for i in range(top + 1))
        return cls(genus, coefficients, str(data.get("provenance", "")))

    def to_json(self) -> Dict:
        entries = []
        for i, coeff in enumerate(self.coefficients):
            terms = [
                {
                    "a_exp": a,
                    "q_base": b,
                    "q_kmult": kk,
                    "num": Fraction(c).numerator,
                    "den": Fraction(c).denominator,
                }
                for (a, b, kk), c in coeff.items()
            ]
            entries.append({"xpow": i, "terms": terms})
        return {"genus": self.genus, "provenance": self.provenance, "e": entries}


@dataclass(frozen=True)
class DrFactor:
    """
    One factor of D(r).

    kind "cyclotomic" is a polynomial in p alone; kind "unit-quadratic" is
    p**m + sign*(mu + 1/mu)*p**(m/2) + 1 with mu = a**mu_exp.
    """

    expr: LaurentAQ
    exponent: int
    kind: str
    m: int = 0
    mu_exp: int = 0
    sign: int = 0

    def lower_bound(self, p: int) -> Surd:
        """Value at p valid for every unit-circle a."""
        if self.kind == "cyclotomic":
            return _exact_at(self.expr, p, 0, 2)
        root = Surd.q_power(p, self.m)
        return (root - 1) * (root - 1)


@dataclass(frozen=True)
class DrFactorization:
    r: int
    power: KExp
    factors: Tuple[DrFactor, ...]

    def expand(self) -> LaurentAQ:
        total = q_power(self.power)
        for factor in self.factors:
            total = total * factor.expr ** factor.exponent
        return total

    def value(self, p: int, k: int, u) -> Surd:
        """Exact D(r) at concrete (p, k, u)."""
        total = Surd.q_power(p, self.power.at(k))
        for factor in self.factors:
            total = total * _exact_at(factor.expr, p, k, u) ** factor.exponent
        return total

    def perfect_square_bound(self, p: int) -> bool:
        """Every factor is bounded below by a positive number at p, for all unit-circle a."""
        return all(factor.lower_bound(p) > 0 for factor in self.factors)

    def positive_at(self, p: int, k: int, u) -> bool:
        return self.value(p, k, u) > 0


@dataclass(frozen=True)
class AppendixRow:
    """One transcribed residue: coeff / (-b + c X)**order."""

    index: int
    b: LaurentAQ
    c: LaurentAQ
    order: int
    coeff: FracAQ
    method: str = "symbolic"
    flags: Tuple[str, ...] = ()

    @property
    def rho(self) -> LaurentAQ:
        return self.c * self.b.monomial_inverse()

    @property
    def pole(self) -> str:
        return f"-({self.b.render()}) + ({self.c.render()})*X"

    def as_pf_term(self) -> PFTerm:
        """Same term written as A / (1 - rho X)**order."""
        scale = FracAQ.from_factors(-1 if self.order % 2 else 1, [(self.b, self.order)])
        multiplicity = 2 if self.rho == LaurentAQ.one() else 1
        return PFTerm(RootDatum(self.rho, multiplicity), self.order, self.coeff * scale)


@dataclass(frozen=True)
class AppendixCheck:
    index: int
    pole: str
    order: int
    method: str
    status: str
    max_rel_error: Optional[float] = None

    @property
    def matched(self) -> bool:
        return self.status == "match"


@dataclass(frozen=True)
class LeadingTerm:
    """Top sqrt(p)-power term of D(r) * lambda(p**r) at fixed k."""

    r: int
    k: int
    q_exponent: int
    coefficient: LaurentAQ
    printed_q_exponent: int


@dataclass(frozen=True)
class CrReport:
    """Empirical sign scan of lambda(p**r) over primes and a u-grid."""

    r: int
    k: int
    prime_hi: int
    grid_size: int
    last_negative: Optional[int]
    negative_points: int
    indeterminate: Tuple[Tuple[int, str], ...] = field(default_factory=tuple)

    @property
    def verdict(self) -> str:
        if self.last_negative is None:
            return "none found"
        return f"negative up to p = {self.last_negative}"

    def to_dict(self) -> Dict:
        return {
            "r": self.r,
            "k": self.k,
            "prime_hi": self.prime_hi,
            "u_grid": self.grid_size,
            "empirical": True,
            "verdict": self.verdict,
            "last_negative_prime": self.last_negative,
            "negative_points": self.negative_points,
            "indeterminate": [{"p": p, "u": u} for p, u in self.indeterminate],
        }


# Highest power of x in P by genus
_NUMERATOR_DEGREE = {2: 2, 4: 14}


# ============================================================================
# Roots and partial fractions
# ============================================================================


def genus4_roots() -> List[RootDatum]:
    """The 16 genus-4 roots divided by p**(2k-1); 1 is the double root."""
    _, roots = genus4_Q_closed()
    counts: Dict[LaurentAQ, int] = {}
    for rho in roots:
        counts[rho] = counts.get(rho, 0) + 1
    return [RootDatum(rho, mult) for rho, mult in sorted(counts.items(), key=lambda kv: kv[0].render())]


def lift_roots(genus: int) -> Tuple[List[RootDatum], KExp]:
    """Roots of the spin Q in the rescaled variable and the q-exponent of the scale."""
    if genus == 4:
        return genus4_roots(), GENUS4_SCALE
    if genus == 2:
        roots = [RootDatum(rho, mult) for rho, mult in spin_roots(1)]
        return roots, LiftSpec(1).classical_scale
    raise ValueError(f"Partial fractions are available for genus 2 and 4, not {genus}")


def _ratio(num: LaurentAQ, den: LaurentAQ) -> LaurentAQ:
    return num * den.monomial_inverse()


def partial_fraction(roots: Sequence[RootDatum]) -> List[PFTerm]:
    """
    Decompose 1 / prod(1 - rho X)**m over the given roots.

    A simple root gets A = 1/prod_{j != i}(1 - rho_j/rho_i)**m_j. A double
    root rho_0 gets B2 = 1/prod(1 - rho'_j)**m_j with rho' = rho_j/rho_0,
    and B1 = -B2 * sum m_j rho'_j / (1 - rho'_j).

    Raises:
        DegenerateSatakeValue: two roots coincide
    """
    seen = set()
    for root in roots:
        if root.rho in seen:
            raise DegenerateSatakeValue(f"Root {root.rho.render()} is listed twice")
        seen.add(root.rho)

    terms: List[PFTerm] = []
    for i, root in enumerate(roots):
        others = [(_ratio(other.rho, root.rho), other.multiplicity) for j, other in enumerate(roots) if j != i]
        lead = FracAQ.from_factors(1, [(LaurentAQ.one() - ratio, mult) for ratio, mult in others])
        if root.multiplicity == 1:
            terms.append(PFTerm(root, 1, lead))
            continue
        log_derivative = FracAQ(LaurentAQ())
        for ratio, mult in others:
            log_derivative = log_derivative + FracAQ.from_factors(ratio * mult, [(LaurentAQ.one() - ratio, 1)])
        terms.append(PFTerm(root, 2, lead))
        terms.append(PFTerm(root, 1, -(lead * log_derivative.reduce())))
    logger.debug(f"Partial fractions over {len(roots)} roots: {len(terms)} terms")
    return terms


@dataclass(frozen=True)
class _CommonForm:
    factors: Tuple[Tuple[LaurentAQ, int], ...]
    numerators: Tuple[Tuple[PFTerm, LaurentAQ], ...]


@lru_cache(maxsize=8)
def _common_form(pf: Tuple[PFTerm, ...]) -> _CommonForm:
    """Every coefficient over the least common denominator, expanded once."""
    common: Dict[LaurentAQ, int] = {}
    for term in pf:
        for base, exp in term.coeff.factors.items():
            common[base] = max(common.get(base, 0), exp)
    ordered = tuple(sorted(common.items(), key=lambda kv: (len(kv[0]), kv[0].render())))
    den = LaurentAQ.one()
    for base, exp in ordered:
        den = den * base ** exp
    numerators = []
    for term in pf:
        cofactor = den
        for base, exp in term.coeff.factors.items():
            for _ in range(exp):
                cofactor = cofactor.divide_exact(base)
        numerators.append((term, term.coeff.num * cofactor))
    logger.debug(f"Common denominator with {len(ordered)} factors and {len(den)} terms")
    return _CommonForm(ordered, tuple(numerators))


def residue_sum(pf: Sequence[PFTerm], r: int) -> LaurentAQ:
    """X**r coefficient of sum coeff/(1 - rho X)**order, as a Laurent polynomial."""
    form = _common_form(tuple(pf))
    total = LaurentAQ()
    for term, numer in form.numerators:
        power = term.root.rho ** r
        total = total + numer * (power if term.order == 1 else power * (r + 1))
    for base, exp in form.factors:
        for _ in range(exp):
            quotient = total.divide_exact(base)
            if quotient is None:
                raise ArithmeticError(f"Residue sum at r={r} is not divisible by {base.render()}")
            total = quotient
    return total


def g_of_r(pf: Sequence[PFTerm], r: int, scale: KExp = GENUS4_SCALE) -> LaurentAQ:
    """
    x**r coefficient of 1/Q, rebuilt from residues.

    g(r) = q**(scale*r) * (sum A_i rho_i**r + B2 (r+1) rho_0**r + B1 rho_0**r);
    g(r) = 0 for negative r.
    """
    if r < 0:
        return LaurentAQ()
    return q_power(scale * r) * residue_sum(pf, r)


@lru_cache(maxsize=None)
def lift_partial_fraction(genus: int) -> Tuple[Tuple[PFTerm, ...], KExp]:
    roots, scale = lift_roots(genus)
    return tuple(partial_fraction(roots)), scale


def lambda_pr(numerator: Optional[NumeratorData], r: int, genus: Optional[int] = None) -> LaurentAQ:
    """
    lambda(p**r) = sum_i e_i g(r - i).

    Args:
        numerator: e-coefficients of the lift
        r: power of p, r >= 0
        genus: expected genus, checked against the data when given

    Raises:
        NumeratorDataRequired: no data, or data for another genus
    """
    if numerator is None:
        raise NumeratorDataRequired(f"Numerator data required for genus {genus or 4}")
    if genus is not None and numerator.genus != genus:
        raise NumeratorDataRequired(f"Numerator data is for genus {numerator.genus}, not {genus}")
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    pf, scale = lift_partial_fraction(numerator.genus)
    total = LaurentAQ()
    for i, e_i in enumerate(numerator.coefficients[: r + 1]):
        if not e_i.is_zero():
            total = total + e_i * g_of_r(pf, r - i, scale)
    return total


def genus2_numerator(variant: str = "corrected") -> NumeratorData:
    """Numerator 1 - p**e x**2 of the Saito-Kurokawa lift."""
    poly = genus2_P(SK_LIFT_WEIGHT, variant)
    return NumeratorData(2, poly.coeffs, provenance=f"genus-2 {variant} numerator")


def load_numerator(path: Optional[Union[str, Path]] = None, genus: int = 4) -> NumeratorData:
    """Read numerator data; the genus-4 file is external and may be missing."""
    path = Path(path or getattr(config, "NUMERATOR_GENUS4_FILE"))
    if not path.exists():
        raise NumeratorDataRequired(f"Numerator data file {path} not found")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise NumeratorDataRequired(f"{path}: line {e.lineno}: {e.msg}") from e
    numerator = NumeratorData.from_json(data)
    if numerator.genus != genus:
        raise NumeratorDataRequired(f"{path} holds genus-{numerator.genus} data, expected genus {genus}")
    logger.info(f"Loaded genus-{genus} numerator of degree {numerator.degree} from {path}")
    return numerator


# ============================================================================
# Residue table
# ============================================================================


def _parse(text: str, index: int, what: str) -> LaurentAQ:
    try:
        return parse_expression(text)
    except ExpressionParseError as e:
        raise AppendixParseError(f"Row a_{index}: cannot read {what}: {e}") from e


def appendix_terms(source: Optional[Union[str, Path, Mapping]] = None) -> List[AppendixRow]:
    """Parse the residue table from a path or an already loaded mapping."""
    if not isinstance(source, Mapping):
        path = Path(source or getattr(config, "APPENDIX_DATA_FILE"))
        with open(path, "r", encoding="utf-8") as f:
            source = json.load(f)
    rows = []
    for raw in source["rows"]:
        index = raw.get("index", "?")
        try:
            b = _parse(raw["pole"]["b"], index, "pole b")
            c = _parse(raw["pole"]["c"], index, "pole c")
            order = int(raw["order"])
            num = _parse(raw["numerator"], index, "numerator")
            factors = [(_parse(text, index, "denominator"), int(exp)) for text, exp in raw["denominator"]]
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, AppendixParseError):
                raise
            raise AppendixParseError(f"Row a_{index}: {e}") from e
        if not (b.is_monomial() and c.is_monomial()):
            raise AppendixParseError(f"Row a_{index}: pole coefficients must be monomials")
        rows.append(AppendixRow(
            index=int(index),
            b=b,
            c=c,
            order=order,
            coeff=FracAQ.from_factors(num, factors),
            method=raw.get("method", "symbolic"),
            flags=tuple(raw.get("flags", ())),
        ))
    logger.info(f"Parsed {len(rows)} residue table rows")
    return rows


def _rational_unit(t: Fraction) -> complex:
    """(1 - t**2 + 2it) / (1 + t**2), a rational point on the unit circle."""
    den = 1 + t * t
    re, im = (1 - t * t) / den, 2 * t / den
    return mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator, mpmath.mpf(im.numerator) / im.denominator)


def evaluation_points(count: Optional[int] = None, seed: Optional[int] = None) -> List[Tuple[int, int, Fraction]]:
    """
    Seeded (p, k, t) triples; a is the rational unit-circle point of t.
    """
    count = count or getattr(config, "VERIFY_POINTS", 5)
    seed = getattr(config, "RANDOM_SEED", 0) if seed is None else seed
    primes = getattr(config, "VERIFY_PRIMES", (5, 7, 11))
    weights = getattr(config, "VERIFY_WEIGHTS", (6, 8))
    rng = np.random.default_rng(seed)
    points = []
    for i in range(count):
        t = Fraction(int(rng.integers(1, 1000)), int(rng.integers(1, 1000)))
        points.append((primes[i % len(primes)], weights[i % len(weights)], t))
    return points


def _numeric_gap(lhs: FracAQ, rhs: FracAQ, points, bits: int) -> float:
    worst = mpmath.mpf(0)
    with mpmath.workprec(bits):
        for p, k, t in points:
            a = _rational_unit(t)
            gap = relative_error(lhs.evaluate_numeric(p, k, a, bits), rhs.evaluate_numeric(p, k, a, bits))
            worst = max(worst, gap)
    return float(worst)


def verify_appendix(
    source: Optional[Union[str, Path, Mapping]] = None,
    points: Optional[int] = None,
) -> List[AppendixCheck]:
    """
    Compare every transcribed residue with the computed decomposition.

    Symbolic rows are decided by exact cross-multiplication; numeric rows
    by relative agreement at seeded rational unit-circle points. The
    numeric gap is reported for every row.
    """
    rows = appendix_terms(source)
    computed = {(term.root.rho, term.order): term.coeff for term in partial_fraction(genus4_roots())}
    bits = getattr(config, "VERIFY_PRECISION_BITS", 256)
    tolerance = getattr(config, "VERIFY_REL_TOLERANCE", 1e-25)
    sample = evaluation_points(points)
    checks = []
    for row in rows:
        term = row.as_pf_term()
        expected = computed.get((term.root.rho, row.order))
        if expected is None:
            checks.append(AppendixCheck(row.index, row.pole, row.order, row.method, "no-such-pole"))
            continue
        gap = _numeric_gap(term.coeff, expected, sample, bits)
        if row.method == "numeric":
            ok = gap < tolerance
        else:
            ok = term.coeff == expected
        status = "match" if ok else "mismatch"
        logger.debug(f"a_{row.index}: {status} (relative gap {gap:.3e})")
        checks.append(AppendixCheck(row.index, row.pole, row.order, row.method, status, gap))
    matched = sum(1 for check in checks if check.matched)
    logger.info(f"Residue table: {matched}/{len(checks)} rows match")
    return checks


def reconstruction_check(
    terms: Iterable[Union[PFTerm, AppendixRow]],
    roots: Sequence[RootDatum],
    points: Optional[int] = None,
) -> float:
    """
    Largest relative gap between sum coeff/(1 - rho X)**order and 1/Q.

    Evaluated at seeded (p, a, X) points with X a small rational.
    """
    pf_terms = [t.as_pf_term() if isinstance(t, AppendixRow) else t for t in terms]
    bits = getattr(config, "VERIFY_PRECISION_BITS", 256)
    worst = mpmath.mpf(0)
    with mpmath.workprec(bits):
        for p, k, t in evaluation_points(points):
            a = _rational_unit(t)
            x = mpmath.mpf(t.denominator) / (t.denominator + 7 * t.numerator) / p ** 5

            def at(rho: LaurentAQ):
                value, _ = evaluate_terms(rho.weighted_terms(k), p, a, bits)
                return value

            total = mpmath.mpc(0)
            for term in pf_terms:
                total += term.coeff.evaluate_numeric(p, k, a, bits) / (1 - at(term.root.rho) * x) ** term.order
            inverse = mpmath.mpc(1)
            for root in roots:
                inverse *= (1 - at(root.rho) * x) ** root.multiplicity
            worst = max(worst, relative_error(total, 1 / inverse))
    return float(worst)


# ============================================================================
# D(r) and the leading term
# ============================================================================


def _u_factor(m: int, sign: int, mu_exp: int) -> LaurentAQ:
    """p**m + sign*(a**mu + a**-mu)*p**(m/2) + 1."""
    middle = LaurentAQ.monomial(sign, mu_exp, m) + LaurentAQ.monomial(sign, -mu_exp, m)
    return LaurentAQ.monomial(1, 0, 2 * m) + middle + LaurentAQ.one()


def _p_poly(coeffs: Sequence[int]) -> LaurentAQ:
    """sum coeffs[i] p**i."""
    return LaurentAQ({(0, 2 * i, 0): c for i, c in enumerate(coeffs) if c})


# (m, sign, mu exponent, exponent) in display order; p**3 + u p**(3/2) + 1 is listed twice
_DR_UNIT_FACTORS = (
    (1, 1, 1, 1),
    (1, -1, 1, 2),
    (1, -1, 3, 1),
    (3, -1, 1, 3),
    (3, 1, 1, 1),
    (4, -1, 2, 1),
    (3, -1, 3, 3),
    (3, 1, 1, 1),
    (5, -1, 1, 1),
    (7, -1, 1, 1),
)

_DR_CYCLOTOMIC = (
    ((-1, 1), 5),
    ((1, 1), 3),
    ((1, 0, 1), 1),
    ((1, 1, 1), 1),
)


def d_factor(r: int) -> DrFactorization:
    """D(r) = p**(6k+2r+14) times the cyclotomic and unit-quadratic factors."""
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    factors = [DrFactor(_p_poly(coeffs), exp, "cyclotomic") for coeffs, exp in _DR_CYCLOTOMIC]
    for m, sign, mu_exp, exp in _DR_UNIT_FACTORS:
        factors.append(DrFactor(_u_factor(m, sign, mu_exp), exp, "unit-quadratic", m, mu_exp, sign))
    return DrFactorization(r, KExp(4 * r + 28, 12), tuple(factors))


def leading_coefficient_identity() -> bool:
    """a**17 (a**2-1)**3 (a**2+1) == a**25 - 2a**23 + 2a**19 - a**17, and the quotient is 1."""
    a = LaurentAQ.monomial(1, 1, 0)
    a2 = a ** 2
    product = a ** 17 * (a2 - 1) ** 3 * (a2 + 1)
    printed = a ** 25 - 2 * a ** 23 + 2 * a ** 19 - a ** 17
    if product != printed:
        return False
    for r in (0, 1, 2):
        quotient = (a ** (2 * r) * printed).divide_exact(a ** (2 * r) * product)
        if quotient != LaurentAQ.one():
            return False
    return True


def numerator_leading_term(numerator: NumeratorData, r: int, k: int) -> LeadingTerm:
    """Top q-power term of D(r) * lambda(p**r) at weight k."""
    value = (d_factor(r).expand() * lambda_pr(numerator, r)).fix_weight(k)
    if value.is_zero():
        raise ValueError(f"D({r}) * lambda(p**{r}) vanishes identically")
    top = max(q for _, q, _ in value.weighted_terms(k))
    coefficient = LaurentAQ({(a, 0, 0): c for a, q, c in value.weighted_terms(k) if q == top})
    return LeadingTerm(r, k, top, coefficient, 2 * (61 + 6 * k + 3 * r + 2 * k * r))


# ============================================================================
# Sign scans
# ============================================================================


def _exact_at(expr: LaurentAQ, p: int, k: int, u) -> Surd:
    return evaluate_exact(expr, p, k, u)


def _scan_certified(
    expr: LaurentAQ,
    r: int,
    k: int,
    precision_bits: int,
    u_values: Optional[Sequence],
    u_by_prime: Optional[Dict[int, Surd]],
    p: int,
) -> List[SignRow]:
    points = [u_by_prime[p]] if u_by_prime is not None else u_values
    rows = []
    for u in points:
        try:
            sign = certified_sign(expr, EvalPoint(p, k, u=u, precision=precision_bits))
        except PrecisionExhausted:
            logger.warning(f"Sign of lambda(p^{r}) undecided at p={p}, u={u}")
            sign = None
        rows.append(SignRow(p, u, None, sign))
    return rows


def lambda_pr_sign_scan(
    numerator: NumeratorData,
    r: int,
    k: int,
    primes: Sequence[int],
    u_values: Optional[Sequence] = None,
    u_by_prime: Optional[Dict[int, Surd]] = None,
    workers: Optional[int] = None,
) -> List[SignRow]:
    """
    Signs of lambda(p**r) over primes and u values.

    Exact when lambda(p**r) is a function of u; otherwise certified
    numerically, with sign None when the precision runs out.
    """
    expr = lambda_pr(numerator, r).fix_weight(k)
    if expr.is_a_symmetric():
        scan_prime = partial(scan_u_poly, to_u_poly(expr), k, u_values, u_by_prime)
    else:
        bits = getattr(config, "DEFAULT_PRECISION_BITS", 128)
        scan_prime = partial(_scan_certified, expr, r, k, bits, u_values, u_by_prime)
    per_prime = parallel_map(scan_prime, primes, workers, desc=f"lambda(p^{r})")
    return [row for chunk in per_prime for row in chunk]


def threshold_c_r(
    r: int,
    k: int,
    numerator: NumeratorData,
    prime_hi: int,
    u_grid_size: Optional[int] = None,
    workers: Optional[int] = None,
) -> CrReport:
    """
    Largest prime up to prime_hi where lambda(p**r) < 0 at some grid u.

    The report is empirical: it covers a finite u-grid only.
    """
    if prime_hi < 3:
        raise ValueError(f"prime_hi must be at least 3, got {prime_hi}")
    grid_size = u_grid_size or getattr(config, "DEFAULT_U_GRID", 101)
    primes = list(sympy.primerange(2, prime_hi + 1))
    rows = lambda_pr_sign_scan(numerator, r, k, primes, u_grid(grid_size), workers=workers)
    negatives = [row for row in rows if row.sign is not None and row.sign < 0]
    undecided = tuple((row.p, str(row.u)) for row in rows if row.sign is None)
    last = max((row.p for row in negatives), default=None)
    report = CrReport(r, k, prime_hi, grid_size, last, len(negatives), undecided)
    logger.info(f"C_r scan r={r}, k={k}, p <= {prime_hi}: {report.verdict}")
    return report
