"""
Exact symbolic ring for local L-factor computations.

Laurent polynomials in the Satake symbol a and q = p**(1/2) with rational
coefficients, where every q-exponent is affine in the weight symbol k.
Polynomials in x = p**(-s) over that ring, their power-series quotients,
and rational functions with factored denominators are built on top.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath
import sympy

import config
from utils.numeric import PrecisionExhausted, evaluate_terms, interval_sign, unit_from_u
from utils.surd import Surd

logger = logging.getLogger(__name__)

Rat = Union[int, Fraction]
Key = Tuple[int, int, int]  # (a_exp, q_base, q_kmult)

__all__ = [
    "Rat", "KExp", "LaurentAQ", "FracAQ", "PolyX", "EvalPoint", "UPolynomial",
    "PrecisionExhausted", "NonMonomialScale", "SeriesError", "InvalidEvalPoint",
    "DegenerateSatakeValue", "canonicalize", "evaluate", "evaluate_exact",
    "certified_sign", "poly_add", "poly_mul", "poly_scale", "substitute_scale",
    "series_quotient", "to_u_poly", "u_grid", "factor_one_minus",
]


class NonMonomialScale(ValueError):
    """substitute_scale was handed a scale with more than one term."""


class SeriesError(ValueError):
    """Power-series division needs a denominator with constant term 1."""


class InvalidEvalPoint(ValueError):
    """Evaluation point violates its preconditions."""


class DegenerateSatakeValue(ZeroDivisionError):
    """Two roots coincide, or a pole is hit, at the requested Satake value."""


def normalize_rat(value) -> Rat:
    """Return an int when the rational is integral, else a Fraction."""
    if isinstance(value, int):
        return value
    if not isinstance(value, Fraction):
        value = Fraction(value)
    return value.numerator if value.denominator == 1 else value


# ============================================================================
# Weight-affine exponents
# ============================================================================


@dataclass(frozen=True, order=True)
class KExp:
    """Affine exponent base + k_mult*k. As a q-exponent it stands for p**((base + k_mult*k)/2)."""

    base: int = 0
    k_mult: int = 0

    @classmethod
    def of(cls, value) -> "KExp":
        if isinstance(value, KExp):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        base, k_mult = value
        return cls(int(base), int(k_mult))

    def at(self, k: int) -> int:
        return self.base + self.k_mult * k

    @property
    def is_constant(self) -> bool:
        return self.k_mult == 0

    def __add__(self, other):
        other = KExp.of(other)
        return KExp(self.base + other.base, self.k_mult + other.k_mult)

    __radd__ = __add__

    def __neg__(self):
        return KExp(-self.base, -self.k_mult)

    def __sub__(self, other):
        return self + (-KExp.of(other))

    def __rsub__(self, other):
        return KExp.of(other) - self

    def __mul__(self, factor: int):
        return KExp(self.base * factor, self.k_mult * factor)

    __rmul__ = __mul__

    def __str__(self):
        if self.k_mult == 0:
            return str(self.base)
        k_part = {1: "k", -1: "-k"}.get(self.k_mult, f"{self.k_mult}*k")
        if self.base == 0:
            return k_part
        return f"{k_part}{self.base:+d}"


# ============================================================================
# Laurent polynomials in a and q
# ============================================================================


class LaurentAQ:
    """
    Sparse Laurent polynomial sum c * a**m * q**(base + k_mult*k).

    Stored as a dict keyed by (m, base, k_mult). Zero coefficients are
    never stored, so equality is structural.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Key, Rat]] = None):
        cleaned: Dict[Key, Rat] = {}
        if terms:
            for key, coeff in terms.items():
                if coeff:
                    cleaned[key] = normalize_rat(coeff)
        self._terms = cleaned
        self._hash = None

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls) -> "LaurentAQ":
        return cls()

    @classmethod
    def one(cls) -> "LaurentAQ":
        return cls({(0, 0, 0): 1})

    @classmethod
    def constant(cls, value) -> "LaurentAQ":
        return cls({(0, 0, 0): value})

    @classmethod
    def monomial(cls, coeff=1, a_exp: int = 0, q_exp=0) -> "LaurentAQ":
        q_exp = KExp.of(q_exp)
        return cls({(a_exp, q_exp.base, q_exp.k_mult): coeff})

    @classmethod
    def coerce(cls, value) -> "LaurentAQ":
        if isinstance(value, LaurentAQ):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.constant(value)
        raise TypeError(f"Cannot convert {type(value).__name__} to LaurentAQ")

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------

    def items(self) -> List[Tuple[Key, Rat]]:
        """Terms in canonical (sorted key) order."""
        return sorted(self._terms.items())

    def terms(self) -> List[Tuple[int, KExp, Rat]]:
        return [(key[0], KExp(key[1], key[2]), c) for key, c in self.items()]

    def raw(self) -> Dict[Key, Rat]:
        return self._terms

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and (0, 0, 0) in self._terms)

    def constant_value(self) -> Rat:
        if not self.is_constant():
            raise ValueError(f"{self.render()} is not a constant")
        return self._terms.get((0, 0, 0), 0)

    def is_k_free(self) -> bool:
        return all(key[2] == 0 for key in self._terms)

    def is_a_free(self) -> bool:
        return all(key[0] == 0 for key in self._terms)

    def leading(self) -> Tuple[Key, Rat]:
        key = max(self._terms)
        return key, self._terms[key]

    def min_exponents(self) -> Key:
        keys = self._terms.keys()
        return tuple(min(key[i] for key in keys) for i in range(3))

    def max_exponents(self) -> Key:
        keys = self._terms.keys()
        return tuple(max(key[i] for key in keys) for i in range(3))

    def coefficient_of_a(self, m: int) -> "LaurentAQ":
        """a-free Laurent polynomial multiplying a**m."""
        return LaurentAQ({(0, b, kk): c for (a, b, kk), c in self._terms.items() if a == m})

    def a_exponents(self) -> List[int]:
        return sorted({key[0] for key in self._terms})

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentAQ.constant(other)
        if not isinstance(other, LaurentAQ):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentAQ.constant(other)
        if not isinstance(other, LaurentAQ):
            return NotImplemented
        out = dict(self._terms)
        for key, coeff in other._terms.items():
            out[key] = out.get(key, 0) + coeff
        return LaurentAQ(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentAQ({key: -c for key, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentAQ.constant(other)
        if not isinstance(other, LaurentAQ):
            return NotImplemented
        out = dict(self._terms)
        for key, coeff in other._terms.items():
            out[key] = out.get(key, 0) - coeff
        return LaurentAQ(out)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor: Rat) -> "LaurentAQ":
        if not factor:
            return LaurentAQ()
        return LaurentAQ({key: c * factor for key, c in self._terms.items()})

    def shift(self, key: Key, coeff: Rat = 1) -> "LaurentAQ":
        """Multiply by the monomial coeff * a**key[0] * q**(key[1] + key[2]*k)."""
        da, db, dk = key
        return LaurentAQ(
            {(a + da, b + db, kk + dk): c * coeff for (a, b, kk), c in self._terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, LaurentAQ):
            return NotImplemented
        if not self._terms or not other._terms:
            return LaurentAQ()
        if len(other._terms) == 1:
            (key, coeff), = other._terms.items()
            return self.shift(key, coeff)
        if len(self._terms) == 1:
            (key, coeff), = self._terms.items()
            return other.shift(key, coeff)
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        out: Dict[Key, Rat] = {}
        get = out.get
        for (a1, b1, k1), c1 in small._terms.items():
            for (a2, b2, k2), c2 in large._terms.items():
                key = (a1 + a2, b1 + b2, k1 + k2)
                out[key] = get(key, 0) + c1 * c2
        return LaurentAQ(out)

    __rmul__ = __mul__

    def monomial_inverse(self) -> "LaurentAQ":
        if not self.is_monomial():
            raise ValueError(f"{self.render()} is not a monomial")
        (key, coeff), = self._terms.items()
        return LaurentAQ({tuple(-e for e in key): Fraction(1) / coeff})

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.monomial_inverse() ** (-exponent)
        if self.is_monomial():
            (key, coeff), = self._terms.items()
            return LaurentAQ({tuple(e * exponent for e in key): Fraction(coeff) ** exponent})
        result = LaurentAQ.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # ------------------------------------------------------------------
    # Substitutions
    # ------------------------------------------------------------------

    def swap_a(self) -> "LaurentAQ":
        """Substitute a -> 1/a."""
        return LaurentAQ({(-a, b, kk): c for (a, b, kk), c in self._terms.items()})

    def is_a_symmetric(self) -> bool:
        return self == self.swap_a()

    def fix_weight(self, k: int) -> "LaurentAQ":
        """Substitute an integer value for the weight symbol k."""
        out: Dict[Key, Rat] = {}
        for (a, b, kk), c in self._terms.items():
            key = (a, b + kk * k, 0)
            out[key] = out.get(key, 0) + c
        return LaurentAQ(out)

    def weighted_terms(self, k: int) -> Iterator[Tuple[int, int, Rat]]:
        """(a_exp, integer q_exp, coeff) with k fixed."""
        for (a, b, kk), c in self.items():
            yield a, b + kk * k, c

    # ------------------------------------------------------------------
    # Exact division
    # ------------------------------------------------------------------

    def divide_exact(self, divisor: "LaurentAQ") -> Optional["LaurentAQ"]:
        """Return self / divisor when the quotient is a Laurent polynomial, else None."""
        divisor = LaurentAQ.coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("Division by the zero Laurent polynomial")
        if self.is_zero():
            return LaurentAQ()
        if divisor.is_monomial():
            return self * divisor.monomial_inverse()
        known = _CYCLOTOMIC_FACTORS.get(divisor)
        if known is not None:
            return _divide_cyclotomic(self, *known)
        if len(divisor) == 2:
            (k_lo, c_lo), (k_hi, c_hi) = divisor.items()
            step = tuple(h - l for h, l in zip(k_hi, k_lo))
            inner = self.shift(tuple(-e for e in k_lo), Fraction(1) / c_lo)
            quotient = _divide_one_minus(inner._terms, step, Fraction(-c_hi) / c_lo)
            return None if quotient is None else LaurentAQ(quotient)
        return _long_divide(self, divisor)

    # ------------------------------------------------------------------
    # Rendering
    # ------------------------------------------------------------------

    def render(self) -> str:
        """Deterministic text that the expression parser reads back."""
        if not self._terms:
            return "0"
        parts = []
        ordered = sorted(self._terms.items(), key=lambda kv: (-kv[0][2], -kv[0][1], -kv[0][0]))
        for (a, b, kk), coeff in ordered:
            factors = []
            if a:
                factors.append("a" if a == 1 else f"a**{a}" if a > 0 else f"a**({a})")
            q_exp = KExp(b, kk)
            if q_exp != KExp():
                text = str(q_exp)
                factors.append("q" if text == "1" else f"q**{text}" if text.isdigit() else f"q**({text})")
            magnitude = abs(coeff)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(magnitude)] + factors)
            parts.append(("-" if coeff < 0 else "+", body))
        head_sign, head = parts[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"LaurentAQ({self.render()})"


def canonicalize(raw_terms: Iterable[Tuple[int, object, Rat]]) -> LaurentAQ:
    """
    Merge raw (a_exp, q_exp, coeff) triples into a LaurentAQ.

    q_exp may be a KExp, an int or a (base, k_mult) pair. Duplicate keys
    are summed and zero coefficients dropped.
    """
    out: Dict[Key, Rat] = {}
    for a_exp, q_exp, coeff in raw_terms:
        q_exp = KExp.of(q_exp)
        key = (int(a_exp), q_exp.base, q_exp.k_mult)
        out[key] = out.get(key, 0) + normalize_rat(coeff)
    return LaurentAQ(out)


A = LaurentAQ.monomial(1, 1, 0)
A_INV = LaurentAQ.monomial(1, -1, 0)
Q = LaurentAQ.monomial(1, 0, 1)


def q_power(exponent) -> LaurentAQ:
    """q**exponent for an int or KExp exponent."""
    return LaurentAQ.monomial(1, 0, exponent)


# ============================================================================
# Division helpers
# ============================================================================


def _divide_one_minus(terms: Mapping[Key, Rat], step: Key, ratio: Rat) -> Optional[Dict[Key, Rat]]:
    """Solve terms = (1 - ratio * X**step) * h along each step-chain."""
    pivot = next(i for i, s in enumerate(step) if s)
    chains: Dict[Key, Dict[int, Rat]] = {}
    for key, coeff in terms.items():
        t = key[pivot] // step[pivot]
        rep = tuple(e - t * s for e, s in zip(key, step))
        chains.setdefault(rep, {})[t] = coeff
    out: Dict[Key, Rat] = {}
    for rep, line in chains.items():
        lo, hi = min(line), max(line)
        acc: Rat = 0
        for t in range(lo, hi + 1):
            acc = acc * ratio + line.get(t, 0)
            if t == hi:
                if acc:
                    return None
            elif acc:
                out[tuple(e + t * s for e, s in zip(rep, step))] = acc
    return out


def _long_divide(dividend: LaurentAQ, divisor: LaurentAQ) -> Optional[LaurentAQ]:
    """Lex leading-term division after shifting both operands to polynomials."""
    f_shift = dividend.min_exponents()
    g_shift = divisor.min_exponents()
    rem = {tuple(e - s for e, s in zip(key, f_shift)): c for key, c in dividend.raw().items()}
    g_terms = {tuple(e - s for e, s in zip(key, g_shift)): c for key, c in divisor.raw().items()}
    g_lead = max(g_terms)
    g_coeff = g_terms[g_lead]
    quotient: Dict[Key, Rat] = {}
    while rem:
        lead = max(rem)
        q_key = tuple(x - y for x, y in zip(lead, g_lead))
        if min(q_key) < 0:
            return None
        q_coeff = Fraction(rem[lead]) / g_coeff
        quotient[q_key] = q_coeff
        for key, coeff in g_terms.items():
            target = tuple(x + y for x, y in zip(key, q_key))
            value = rem.get(target, 0) - q_coeff * coeff
            if value:
                rem[target] = value
            else:
                rem.pop(target, None)
    offset = tuple(f - g for f, g in zip(f_shift, g_shift))
    return LaurentAQ(quotient).shift(offset)


@lru_cache(maxsize=None)
def _cofactor_coefficients(d: int) -> Tuple[int, ...]:
    """Coefficients (lowest first) of (x**d - 1) / cyclotomic_d(x)."""
    x = sympy.Symbol("x")
    cofactor = sympy.quo(x ** d - 1, sympy.cyclotomic_poly(d, x), x)
    return tuple(int(c) for c in reversed(sympy.Poly(cofactor, x).all_coeffs()))


@lru_cache(maxsize=None)
def _cyclotomic_coefficients(d: int) -> Tuple[int, ...]:
    x = sympy.Symbol("x")
    return tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(d, x), x).all_coeffs()))


# canonical factor -> (d, mu exponent key, unit) with cyclotomic_d(mu) = unit * factor
_CYCLOTOMIC_FACTORS: Dict[LaurentAQ, Tuple[int, Key, LaurentAQ]] = {}


def _divide_cyclotomic(dividend: LaurentAQ, d: int, mu: Key, unit: LaurentAQ) -> Optional[LaurentAQ]:
    cofactor = LaurentAQ(
        {tuple(i * e for e in mu): c for i, c in enumerate(_cofactor_coefficients(d)) if c}
    )
    widened = dividend * cofactor
    step = tuple(d * e for e in mu)
    quotient = _divide_one_minus(widened.raw(), step, 1)
    if quotient is None:
        return None
    # dividend / cyclotomic_d(mu) = -widened / (1 - mu**d)
    return -(LaurentAQ(quotient) * unit)


def canonical_factor(poly: LaurentAQ) -> Tuple[LaurentAQ, LaurentAQ]:
    """
    Split poly = unit * factor.

    The unit is a monomial; the factor has minimum exponent 0 in each of
    a, q and q**k and its lex-leading coefficient equals 1.
    """
    if poly.is_zero():
        raise ZeroDivisionError("Zero has no canonical factor")
    low = poly.min_exponents()
    shifted = poly.shift(tuple(-e for e in low))
    _, lead = shifted.leading()
    factor = shifted.scale(Fraction(1) / lead)
    unit = LaurentAQ({low: lead})
    return unit, factor


@lru_cache(maxsize=4096)
def factor_one_minus(mono: LaurentAQ) -> Tuple[LaurentAQ, Tuple[Tuple[LaurentAQ, int], ...]]:
    """
    Factor 1 - mono into a monomial unit times canonical factors.

    For mono = +-mu**g with mu primitive the binomial splits into
    cyclotomic polynomials in mu; otherwise it is a single factor.
    """
    if not mono.is_monomial():
        raise ValueError(f"{mono.render()} is not a monomial")
    (key, coeff), = mono.raw().items()
    if key == (0, 0, 0):
        if coeff == 1:
            raise DegenerateSatakeValue("1 - 1 vanishes: coincident roots")
        return LaurentAQ.constant(1 - coeff), ()
    if coeff not in (1, -1):
        unit, factor = canonical_factor(LaurentAQ.one() - mono)
        return unit, ((factor, 1),)
    g = gcd(gcd(abs(key[0]), abs(key[1])), abs(key[2]))
    mu = tuple(e // g for e in key)
    if coeff == 1:
        unit = LaurentAQ.constant(-1)
        orders = [d for d in sympy.divisors(g)]
    else:
        unit = LaurentAQ.one()
        orders = [d for d in sympy.divisors(2 * g) if g % d]
    factors = []
    for d in orders:
        cyclo = LaurentAQ(
            {tuple(i * e for e in mu): c for i, c in enumerate(_cyclotomic_coefficients(d)) if c}
        )
        part_unit, canon = canonical_factor(cyclo)
        _CYCLOTOMIC_FACTORS.setdefault(canon, (d, mu, part_unit))
        unit = unit * part_unit
        factors.append((canon, 1))
    return unit, tuple(factors)


def split_factor(poly: LaurentAQ) -> Tuple[LaurentAQ, List[Tuple[LaurentAQ, int]]]:
    """Monomial unit and canonical factors of an arbitrary nonzero polynomial."""
    if poly.is_monomial():
        return poly, []
    if len(poly) == 2:
        (k_lo, c_lo), (k_hi, c_hi) = poly.items()
        lead = LaurentAQ({k_lo: c_lo})
        ratio = LaurentAQ({tuple(h - l for h, l in zip(k_hi, k_lo)): Fraction(-c_hi) / c_lo})
        unit, factors = factor_one_minus(ratio)
        return lead * unit, list(factors)
    unit, factor = canonical_factor(poly)
    return unit, [(factor, 1)]


# ============================================================================
# Rational functions with factored denominators
# ============================================================================


class FracAQ:
    """
    num / prod(factor**exp) with every factor canonical.

    Keeping the denominator factored lets sums use the least common
    multiple of the factor multisets and lets reduce() cancel factor by
    factor. den is the expanded product.
    """

    __slots__ = ("num", "factors", "_hash")

    def __init__(self, num, factors: Optional[Mapping[LaurentAQ, int]] = None):
        self.num = LaurentAQ.coerce(num)
        self.factors: Dict[LaurentAQ, int] = {
            base: exp for base, exp in (factors or {}).items() if exp
        }
        self._hash = None

    @classmethod
    def from_factors(cls, num, factors: Iterable[Tuple[LaurentAQ, int]]) -> "FracAQ":
        """num / prod(base**exp) for arbitrary nonzero bases, canonicalized."""
        num = LaurentAQ.coerce(num)
        collected: Dict[LaurentAQ, int] = {}
        for base, exp in factors:
            base = LaurentAQ.coerce(base)
            if base.is_zero():
                raise DegenerateSatakeValue("Zero factor in a denominator")
            unit, parts = split_factor(base)
            num = num * unit.monomial_inverse() ** exp
            for canon, mult in parts:
                collected[canon] = collected.get(canon, 0) + mult * exp
        return cls(num, collected)

    @classmethod
    def from_parts(cls, num, den=1) -> "FracAQ":
        return cls.from_factors(num, [(LaurentAQ.coerce(den), 1)])

    @property
    def den(self) -> LaurentAQ:
        result = LaurentAQ.one()
        for base, exp in self.sorted_factors():
            result = result * base ** exp
        return result

    def sorted_factors(self) -> List[Tuple[LaurentAQ, int]]:
        return sorted(self.factors.items(), key=lambda kv: (len(kv[0]), kv[0].render()))

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    @staticmethod
    def _coerce(value) -> "FracAQ":
        if isinstance(value, FracAQ):
            return value
        return FracAQ(LaurentAQ.coerce(value))

    def __add__(self, other):
        try:
            other = FracAQ._coerce(other)
        except TypeError:
            return NotImplemented
        common = dict(self.factors)
        for base, exp in other.factors.items():
            common[base] = max(common.get(base, 0), exp)
        return FracAQ(self._lift(common) + other._lift(common), common)

    __radd__ = __add__

    def __neg__(self):
        return FracAQ(-self.num, self.factors)

    def __sub__(self, other):
        return self + (-FracAQ._coerce(other))

    def __rsub__(self, other):
        return FracAQ._coerce(other) - self

    def __mul__(self, other):
        try:
            other = FracAQ._coerce(other)
        except TypeError:
            return NotImplemented
        merged = dict(self.factors)
        for base, exp in other.factors.items():
            merged[base] = merged.get(base, 0) + exp
        return FracAQ(self.num * other.num, merged)

    __rmul__ = __mul__

    def _lift(self, common: Mapping[LaurentAQ, int]) -> LaurentAQ:
        """Numerator over the common denominator."""
        lifted = self.num
        for base, exp in sorted(common.items(), key=lambda kv: kv[0].render()):
            missing = exp - self.factors.get(base, 0)
            if missing:
                lifted = lifted * base ** missing
        return lifted

    def reduce(self) -> "FracAQ":
        """Cancel denominator factors that divide the numerator exactly."""
        num = self.num
        remaining: Dict[LaurentAQ, int] = {}
        for base, exp in self.sorted_factors():
            while exp and not num.is_zero():
                quotient = num.divide_exact(base)
                if quotient is None:
                    break
                num, exp = quotient, exp - 1
            if num.is_zero():
                return FracAQ(LaurentAQ())
            if exp:
                remaining[base] = exp
        return FracAQ(num, remaining)

    def as_laurent(self) -> Optional[LaurentAQ]:
        reduced = self if not self.factors else self.reduce()
        return reduced.num if not reduced.factors else None

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, LaurentAQ)):
            other = FracAQ._coerce(other)
        if not isinstance(other, FracAQ):
            return NotImplemented
        lhs, rhs = self.num, other.num
        for base in set(self.factors) | set(other.factors):
            diff = self.factors.get(base, 0) - other.factors.get(base, 0)
            if diff > 0:
                rhs = rhs * base ** diff
            elif diff < 0:
                lhs = lhs * base ** (-diff)
        return lhs == rhs

    def __hash__(self):
        # Leading terms multiply under the lex order on keys, so the leading
        # term of num over those of the factors is invariant under __eq__.
        if self._hash is None:
            if self.num.is_zero():
                self._hash = hash((FracAQ, 0))
            else:
                key, coeff = self.num.leading()
                shift = list(key)
                scale = Fraction(coeff)
                for base, exp in self.factors.items():
                    base_key, base_coeff = base.leading()
                    shift = [s - exp * b for s, b in zip(shift, base_key)]
                    scale /= Fraction(base_coeff) ** exp
                self._hash = hash((FracAQ, tuple(shift), scale))
        return self._hash

    def swap_a(self) -> "FracAQ":
        return FracAQ.from_factors(
            self.num.swap_a(), [(base.swap_a(), exp) for base, exp in self.factors.items()]
        )

    def fix_weight(self, k: int) -> "FracAQ":
        return FracAQ.from_factors(
            self.num.fix_weight(k), [(base.fix_weight(k), exp) for base, exp in self.factors.items()]
        )

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def evaluate_numeric(self, p: int, k: int, a, precision_bits: int = None):
        """Complex value at concrete (p, k, a); raises DegenerateSatakeValue at a pole."""
        precision_bits = precision_bits or getattr(config, "DEFAULT_PRECISION_BITS", 128)
        with mpmath.workprec(precision_bits):
            value, _ = evaluate_terms(self.num.weighted_terms(k), p, a, precision_bits)
            for base, exp in self.sorted_factors():
                den, bound = evaluate_terms(base.weighted_terms(k), p, a, precision_bits)
                if abs(den) <= bound:
                    raise DegenerateSatakeValue(
                        f"Denominator factor {base.render()} vanishes at p={p}, a={a}"
                    )
                value /= den ** exp
            return +value

    def render(self) -> str:
        if not self.factors:
            return self.num.render()
        den = " * ".join(
            f"({base.render()})" + (f"**{exp}" if exp != 1 else "")
            for base, exp in self.sorted_factors()
        )
        return f"({self.num.render()}) / ({den})"

    def __repr__(self):
        return f"FracAQ({self.render()})"


# ============================================================================
# Polynomials in x
# ============================================================================


class PolyX:
    """Polynomial sum coeffs[j] * x**j with LaurentAQ coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        values = [LaurentAQ.coerce(c) for c in coeffs]
        while values and values[-1].is_zero():
            values.pop()
        self.coeffs: Tuple[LaurentAQ, ...] = tuple(values)

    @classmethod
    def one(cls) -> "PolyX":
        return cls([1])

    @classmethod
    def linear(cls, root) -> "PolyX":
        """The factor 1 - root * x."""
        return cls([1, -LaurentAQ.coerce(root)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, j: int) -> LaurentAQ:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return LaurentAQ()

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, PolyX):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        return poly_add(self, other)

    def __sub__(self, other):
        return poly_add(self, -other)

    def __neg__(self):
        return PolyX([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, PolyX):
            return poly_mul(self, other)
        return poly_scale(self, other)

    __rmul__ = __mul__

    def times_linear(self, root: LaurentAQ, max_degree: Optional[int] = None) -> "PolyX":
        """Multiply by 1 - root * x, optionally truncating above max_degree."""
        top = self.degree + 1 if max_degree is None else min(self.degree + 1, max_degree)
        out = [self[j] - root * self[j - 1] if j else self[0] for j in range(top + 1)]
        return PolyX(out)

    def truncate(self, max_degree: int) -> "PolyX":
        return PolyX(self.coeffs[: max_degree + 1])

    def swap_a(self) -> "PolyX":
        return PolyX([c.swap_a() for c in self.coeffs])

    def fix_weight(self, k: int) -> "PolyX":
        return PolyX([c.fix_weight(k) for c in self.coeffs])

    def is_a_symmetric(self) -> bool:
        return all(c.is_a_symmetric() for c in self.coeffs)

    def render_rows(self) -> List[Tuple[int, str]]:
        return [(j, c.render()) for j, c in enumerate(self.coeffs)]

    def evaluate_exact(self, p: int, k: int, u) -> List["Surd"]:
        """Coefficients of x at concrete (p, k, u); every coefficient must be a <-> 1/a symmetric."""
        return [evaluate_exact(c, p, k, u) for c in self.coeffs]

    def __repr__(self):
        return "PolyX(" + ", ".join(c.render() for c in self.coeffs) + ")"


def poly_add(lhs: PolyX, rhs: PolyX) -> PolyX:
    size = max(len(lhs.coeffs), len(rhs.coeffs))
    return PolyX([lhs[j] + rhs[j] for j in range(size)])


def poly_mul(lhs: PolyX, rhs: PolyX, max_degree: Optional[int] = None) -> PolyX:
    if not lhs.coeffs or not rhs.coeffs:
        return PolyX()
    top = lhs.degree + rhs.degree
    if max_degree is not None:
        top = min(top, max_degree)
    out = [LaurentAQ() for _ in range(top + 1)]
    for i, left in enumerate(lhs.coeffs[: top + 1]):
        if left.is_zero():
            continue
        for j, right in enumerate(rhs.coeffs[: top + 1 - i]):
            if not right.is_zero():
                out[i + j] = out[i + j] + left * right
    return PolyX(out)


def poly_scale(poly: PolyX, scalar) -> PolyX:
    scalar = LaurentAQ.coerce(scalar)
    return PolyX([c * scalar for c in poly.coeffs])


def substitute_scale(poly: PolyX, scale: LaurentAQ) -> PolyX:
    """x -> scale * x for a monomial scale."""
    scale = LaurentAQ.coerce(scale)
    if not scale.is_monomial():
        raise NonMonomialScale(f"Scale must be a single monomial, got {scale.render()}")
    return PolyX([c * scale ** j for j, c in enumerate(poly.coeffs)])


def series_quotient(numer: PolyX, denom: PolyX, order: int) -> List[LaurentAQ]:
    """
    Coefficients c_0..c_order of numer/denom as a power series in x.

    Args:
        numer: numerator P
        denom: denominator Q with Q(0) = 1
        order: highest power R returned

    Returns:
        List c with sum(c_r x**r) * Q = P mod x**(R+1)
    """
    if denom[0] != LaurentAQ.one():
        raise SeriesError(f"Denominator constant term must be 1, got {denom[0].render()}")
    if order < 0:
        raise SeriesError(f"Series order must be non-negative, got {order}")
    coeffs: List[LaurentAQ] = []
    for r in range(order + 1):
        value = numer[r]
        for i in range(1, min(r, denom.degree) + 1):
            if not denom[i].is_zero():
                value = value - denom[i] * coeffs[r - i]
        coeffs.append(value)
    return coeffs


# ============================================================================
# The u = a + 1/a parametrization
# ============================================================================


@lru_cache(maxsize=None)
def _v_polynomial(m: int) -> Tuple[int, ...]:
    """Integer coefficients (lowest first) of V_m with a**m + a**-m = V_m(a + 1/a)."""
    if m == 0:
        return (2,)
    if m == 1:
        return (0, 1)
    prev, cur = _v_polynomial(m - 2), _v_polynomial(m - 1)
    out = [0] * (m + 1)
    for i, c in enumerate(cur):
        out[i + 1] += c
    for i, c in enumerate(prev):
        out[i] -= c
    return tuple(out)


class UPolynomial:
    """sum coeffs[j] * u**j with a-free LaurentAQ coefficients, u = a + 1/a."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[LaurentAQ]):
        values = list(coeffs)
        while values and values[-1].is_zero():
            values.pop()
        self.coeffs: Tuple[LaurentAQ, ...] = tuple(values)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, j: int) -> LaurentAQ:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else LaurentAQ()

    def fix_weight(self, k: int) -> "UPolynomial":
        return UPolynomial([c.fix_weight(k) for c in self.coeffs])

    def coefficients_at(self, p: int, k: int) -> List[Surd]:
        return [_exact_value(c, p, k, 1) for c in self.coeffs]

    def evaluate(self, p: int, k: int, u) -> Surd:
        return horner(self.coefficients_at(p, k), u, p)

    def to_laurent(self) -> LaurentAQ:
        u = A + A_INV
        total = LaurentAQ()
        for j, c in enumerate(self.coeffs):
            total = total + c * u ** j
        return total


def horner(coeffs: Sequence[Surd], u, p: int) -> Surd:
    result = Surd(0, 0, p)
    for c in reversed(coeffs):
        result = result * u + c
    return result


def to_u_poly(expr: LaurentAQ) -> UPolynomial:
    """Rewrite an a <-> 1/a symmetric expression as a polynomial in u = a + 1/a."""
    if not expr.is_a_symmetric():
        raise ValueError("Expression is not invariant under a -> 1/a")
    top = max((abs(m) for m in expr.a_exponents()), default=0)
    coeffs = [LaurentAQ() for _ in range(top + 1)]
    coeffs[0] = expr.coefficient_of_a(0)
    for m in range(1, top + 1):
        c_m = expr.coefficient_of_a(m)
        if c_m.is_zero():
            continue
        for j, v in enumerate(_v_polynomial(m)):
            if v:
                coeffs[j] = coeffs[j] + c_m.scale(v)
    return UPolynomial(coeffs)


def u_grid(size: int) -> List[Fraction]:
    """size equally spaced exact points from -2 to 2."""
    if size < 2:
        raise ValueError(f"u-grid needs at least 2 points, got {size}")
    return [Fraction(-2) + Fraction(4 * i, size - 1) for i in range(size)]


# ============================================================================
# Evaluation
# ============================================================================


@dataclass(frozen=True)
class EvalPoint:
    """
    Concrete (p, k, Satake value) for evaluation.

    Exactly one of a (unit-modulus complex) or u = a + 1/a in [-2, 2]
    is given. u may be rational or a Surd over the same p.
    """

    p: int
    k: int
    a: Optional[complex] = None
    u: Optional[Union[int, Fraction, Surd]] = None
    precision: int = field(default_factory=lambda: getattr(config, "DEFAULT_PRECISION_BITS", 128))

    def __post_init__(self):
        if not isinstance(self.p, int) or not sympy.isprime(self.p):
            raise InvalidEvalPoint(f"p = {self.p} is not a prime")
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidEvalPoint(f"k = {self.k} must be a positive integer")
        if (self.a is None) == (self.u is None):
            raise InvalidEvalPoint("Give exactly one of a and u")
        if self.u is not None:
            u = self.exact_u
            if u < -2 or u > 2:
                raise InvalidEvalPoint(f"u = {u} lies outside [-2, 2]")
        else:
            with mpmath.workprec(self.precision):
                tolerance = mpmath.ldexp(1, -(self.precision - getattr(config, "PRECISION_MARGIN_BITS", 16)))
                if abs(abs(mpmath.mpc(self.a)) - 1) > tolerance:
                    raise InvalidEvalPoint(f"|a| = {abs(self.a)} is not 1")

    @property
    def exact_u(self) -> Optional[Surd]:
        if self.u is None:
            return None
        return self.u if isinstance(self.u, Surd) else Surd(self.u, 0, self.p)

    @property
    def real_unit(self) -> Optional[int]:
        """+1 or -1 when a is real (u = +-2), else None."""
        if self.u is not None:
            u = self.exact_u
            return 1 if u == 2 else -1 if u == -2 else None
        if self.a == 1:
            return 1
        if self.a == -1:
            return -1
        return None

    def a_value(self):
        with mpmath.workprec(self.precision):
            if self.a is not None:
                return mpmath.mpc(self.a)
            return unit_from_u(self.exact_u)


def _exact_value(expr: LaurentAQ, p: int, k: int, sign: int) -> Surd:
    total = Surd(0, 0, p)
    for a_exp, q_exp, coeff in expr.weighted_terms(k):
        term = Surd.q_power(p, q_exp) * coeff
        total = total + (term if sign == 1 or a_exp % 2 == 0 else -term)
    return total


def evaluate(expr: LaurentAQ, pt: EvalPoint):
    """
    Value of expr at pt.

    Returns an exact Surd when a = +-1, otherwise an mpmath complex at
    pt.precision bits.
    """
    unit = pt.real_unit
    if unit is not None:
        return _exact_value(expr, pt.p, pt.k, unit)
    value, _ = evaluate_terms(expr.weighted_terms(pt.k), pt.p, pt.a_value(), pt.precision)
    return value


def evaluate_exact(expr: LaurentAQ, p: int, k: int, u) -> Surd:
    """Exact value of a symmetric expression at rational or Q(sqrt(p)) u."""
    if not sympy.isprime(p):
        raise InvalidEvalPoint(f"p = {p} is not a prime")
    return to_u_poly(expr).evaluate(p, k, u)


def certified_sign(expr: LaurentAQ, pt: EvalPoint) -> int:
    """
    Sign of the real value of expr at pt.

    Exact whenever possible; otherwise an outward-rounded interval
    enclosure must exclude zero, with precision doubled up to
    MAX_PRECISION_BITS before PrecisionExhausted is raised.
    """
    unit = pt.real_unit
    if unit is not None:
        return _exact_value(expr, pt.p, pt.k, unit).sign()
    if pt.u is not None and expr.is_a_symmetric():
        return evaluate_exact(expr, pt.p, pt.k, pt.exact_u).sign()
    x = pt.exact_u * Fraction(1, 2) if pt.u is not None else mpmath.mpc(pt.a).real
    logger.debug(f"Interval sign at p={pt.p}, Re(a)={x}")
    return interval_sign(expr.weighted_terms(pt.k), pt.p, x, pt.precision)
