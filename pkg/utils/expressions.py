"""
sympy bridge for transcribed formulas.

Data files store expressions as sympy-readable text in the symbols a, p,
q (= sqrt(p)) and k. They are parsed here into LaurentAQ values.
"""

import logging
from fractions import Fraction
from typing import Dict

import sympy

logger = logging.getLogger(__name__)

SYMBOL_A = sympy.Symbol("a")
SYMBOL_Q = sympy.Symbol("q", positive=True)
SYMBOL_K = sympy.Symbol("k", integer=True)

_LOCALS: Dict[str, object] = {
    "a": SYMBOL_A,
    "q": SYMBOL_Q,
    "p": SYMBOL_Q ** 2,
    "k": SYMBOL_K,
    "sqrt": sympy.sqrt,
}


class ExpressionParseError(ValueError):
    """Text is not a Laurent polynomial in a and q with k-affine q-exponents."""


def _rational(value) -> Fraction:
    value = sympy.nsimplify(value) if not value.is_Rational else value
    if not value.is_Rational:
        raise ExpressionParseError(f"Coefficient {value} is not rational")
    return Fraction(int(value.p), int(value.q))


def _integer(value, what: str) -> int:
    value = sympy.nsimplify(value)
    if not value.is_Integer:
        raise ExpressionParseError(f"{what} {value} is not an integer")
    return int(value)


def parse_expression(text: str):
    """
    Parse text into a LaurentAQ.

    Args:
        text: expression such as "p**(2*k-1)*(a + 1/a + sqrt(p))"

    Returns:
        The expanded LaurentAQ
    """
    from exactalg import LaurentAQ

    try:
        expr = sympy.sympify(text, locals=_LOCALS)
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ExpressionParseError(f"Cannot parse {text!r}: {e}") from e
    stray = expr.free_symbols - {SYMBOL_A, SYMBOL_Q, SYMBOL_K}
    if stray:
        raise ExpressionParseError(f"Unknown symbols {sorted(map(str, stray))} in {text!r}")

    terms: Dict[tuple, Fraction] = {}
    for term in sympy.Add.make_args(sympy.expand(expr)):
        coeff, rest = term.as_coeff_Mul()
        a_exp, q_base, q_kmult = 0, 0, 0
        for base, exponent in rest.as_powers_dict().items():
            if base == 1:
                continue
            if base == SYMBOL_A:
                a_exp += _integer(exponent, "a-exponent")
            elif base == SYMBOL_Q:
                exponent = sympy.expand(exponent)
                k_part = exponent.coeff(SYMBOL_K)
                q_kmult += _integer(k_part, "k-multiplier")
                q_base += _integer(exponent - k_part * SYMBOL_K, "q-exponent")
            else:
                raise ExpressionParseError(f"Unsupported factor {base}**{exponent} in {text!r}")
        key = (a_exp, q_base, q_kmult)
        terms[key] = terms.get(key, 0) + _rational(coeff)
    return LaurentAQ(terms)
