"""
Arbitrary-precision evaluation of Laurent sums in a and q.

Terms arrive as (a_exponent, q_exponent, coefficient) triples with the
weight already fixed, q = sqrt(p) and a on the unit circle.
evaluate_terms gives a floating value with a rounding estimate;
enclose_real_part and interval_sign give outward-rounded enclosures
of the real part that sign decisions can rely on.
"""

import logging
import threading
from fractions import Fraction
from typing import Iterable, List, Tuple

import mpmath
from mpmath import iv

import config

logger = logging.getLogger(__name__)

# iv.prec is global to the interval context
_IV_LOCK = threading.Lock()


class PrecisionExhausted(ArithmeticError):
    """A sign decision fell inside the rounding error bound."""


def _mpf_rational(value) -> "mpmath.mpf":
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def unit_from_u(u) -> "mpmath.mpc":
    """Return a = u/2 + i*sqrt(1 - u**2/4), the upper-half-plane root of a + 1/a = u."""
    u = u.to_mpf(mpmath.mp.prec) if hasattr(u, "to_mpf") else _mpf_rational(u)
    if abs(u) > 2:
        raise ValueError(f"u = {u} lies outside [-2, 2]")
    return mpmath.mpc(u / 2, mpmath.sqrt(max(mpmath.mpf(0), 1 - u * u / 4)))


def evaluate_terms(
    terms: Iterable[Tuple[int, int, object]],
    p: int,
    a,
    precision_bits: int = None,
) -> Tuple["mpmath.mpc", "mpmath.mpf"]:
    """
    Evaluate sum(c * a**m * q**e) at q = sqrt(p).

    Args:
        terms: (a_exponent, q_exponent, rational coefficient) triples
        p: prime
        a: complex value of modulus one
        precision_bits: working precision; defaults to config

    Returns:
        (value, bound); bound is a rounding estimate, not an enclosure
    """
    precision_bits = precision_bits or getattr(config, "DEFAULT_PRECISION_BITS", 128)
    margin = getattr(config, "PRECISION_MARGIN_BITS", 16)
    with mpmath.workprec(precision_bits):
        q = mpmath.sqrt(p)
        a = mpmath.mpc(a)
        a_inv = 1 / a
        total = mpmath.mpc(0)
        magnitude = mpmath.mpf(0)
        for a_exp, q_exp, coeff in terms:
            scale = _mpf_rational(coeff) * q ** q_exp
            power = a ** a_exp if a_exp >= 0 else a_inv ** (-a_exp)
            total += scale * power
            magnitude += abs(scale) * max(1, abs(power))
        bound = magnitude * mpmath.ldexp(1, -(precision_bits - margin))
        return +total, bound


def relative_error(lhs, rhs) -> "mpmath.mpf":
    scale = max(abs(lhs), abs(rhs))
    if scale == 0:
        return mpmath.mpf(0)
    return abs(lhs - rhs) / scale


# ============================================================================
# Interval enclosures
# ============================================================================


def _iv_rational(value) -> "iv.mpf":
    value = Fraction(value)
    if value.denominator == 1:
        return iv.mpf(value.numerator)
    return iv.mpf(value.numerator) / value.denominator


def _iv_real(value) -> "iv.mpf":
    """Enclosure of a rational, an r0 + r1*sqrt(p) surd, or a binary float."""
    if hasattr(value, "radical"):
        return _iv_rational(value.rational) + _iv_rational(value.radical) * iv.sqrt(value.p)
    if isinstance(value, (int, Fraction)):
        return _iv_rational(value)
    return iv.mpf(value)


def _chebyshev(x, top: int) -> List["iv.mpf"]:
    """T_0(x) .. T_top(x); T_m(Re a) = Re(a**m) = Re(a**-m) when |a| = 1."""
    values = [iv.mpf(1), x]
    for _ in range(2, top + 1):
        values.append(2 * x * values[-1] - values[-2])
    return values[: top + 1]


def enclose_real_part(
    terms: Iterable[Tuple[int, int, object]],
    p: int,
    x,
    precision_bits: int = None,
) -> "iv.mpf":
    """
    Interval containing Re(sum(c * a**m * q**e)) for |a| = 1 and Re(a) = x.

    x is rational, a surd over p, or a float taken as exact. Every
    operation rounds outward, so the true value lies in the result.
    """
    precision_bits = precision_bits or getattr(config, "DEFAULT_PRECISION_BITS", 128)
    terms = list(terms)
    with _IV_LOCK:
        saved = iv.prec
        iv.prec = precision_bits
        try:
            x = _iv_real(x)
            q = iv.sqrt(p)
            top = max((abs(a_exp) for a_exp, _, _ in terms), default=0)
            cheb = _chebyshev(x, top)
            total = iv.mpf(0)
            for a_exp, q_exp, coeff in terms:
                scale = q ** q_exp if q_exp >= 0 else 1 / q ** (-q_exp)
                total += _iv_rational(coeff) * scale * cheb[abs(a_exp)]
            return total
        finally:
            iv.prec = saved


def interval_sign(
    terms: Iterable[Tuple[int, int, object]],
    p: int,
    x,
    precision_bits: int = None,
) -> int:
    """
    Certified sign of the real part, doubling precision until the
    enclosure excludes zero.

    Raises:
        PrecisionExhausted: zero is still enclosed at MAX_PRECISION_BITS
    """
    bits = precision_bits or getattr(config, "DEFAULT_PRECISION_BITS", 128)
    ceiling = max(bits, getattr(config, "MAX_PRECISION_BITS", 2048))
    terms = list(terms)
    while True:
        enclosure = enclose_real_part(terms, p, x, bits)
        if enclosure.a > 0:
            return 1
        if enclosure.b < 0:
            return -1
        if bits >= ceiling:
            raise PrecisionExhausted(
                f"Sign undecided at {bits} bits: enclosure {iv.nstr(enclosure, 5)} contains zero"
            )
        logger.debug(f"Enclosure {iv.nstr(enclosure, 5)} contains zero at {bits} bits; retrying")
        bits = min(2 * bits, ceiling)
