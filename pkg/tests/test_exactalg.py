import pytest
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
from hypothesis import given, settings, strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from exactalg import (
    A, A_INV, DegenerateSatakeValue, EvalPoint, FracAQ, InvalidEvalPoint, KExp, LaurentAQ,
    NonMonomialScale, PolyX, Q, SeriesError, UPolynomial, canonicalize, certified_sign, evaluate,
    evaluate_exact, factor_one_minus, horner, poly_add, poly_mul, q_power, series_quotient, substitute_scale,
    to_u_poly, u_grid,
)
from utils.expressions import parse_expression
from utils.numeric import PrecisionExhausted
from utils.surd import Surd

U = A + A_INV


class TestKExp:
    """Weight-affine exponents."""

    def test_arithmetic(self):
        """Sums, scalings and evaluation at k."""
        assert KExp(-2, 4).at(6) == 22
        assert KExp.of(3) == KExp(3, 0)
        assert KExp.of((1, 2)) == KExp(1, 2)
        assert KExp(1, 1) * 2 == KExp(2, 2)
        assert KExp(1, 1) + 3 == KExp(4, 1)
        assert 3 - KExp(1, 1) == KExp(2, -1)

    def test_str(self):
        """k-part first, then the signed constant."""
        assert str(KExp(-2, 4)) == "4*k-2"
        assert str(KExp(0, 1)) == "k"
        assert str(KExp(5, 0)) == "5"


class TestLaurentAQ:
    """Sparse Laurent polynomials in a and q."""

    def test_structural_equality(self):
        """Zero coefficients vanish; ints compare as constants."""
        assert (A - A).is_zero()
        assert U * U == A ** 2 + 2 + A_INV ** 2
        assert LaurentAQ.constant(Fraction(6, 3)) == 2

    def test_monomial_inverse_and_negative_power(self):
        """(2 a q)**-1 = a**-1 q**-1 / 2."""
        mono = LaurentAQ.monomial(2, 1, 1)
        assert mono ** -1 == LaurentAQ.monomial(Fraction(1, 2), -1, -1)
        assert mono * mono.monomial_inverse() == 1
        with pytest.raises(ValueError):
            U.monomial_inverse()

    def test_fix_weight(self):
        """q**(4k-2) at k = 6 is q**22."""
        assert q_power(KExp(-2, 4)).fix_weight(6) == q_power(22)
        assert not q_power(KExp(-2, 4)).is_k_free()

    def test_swap_a(self):
        """a -> 1/a fixes u and moves a."""
        assert U.is_a_symmetric()
        assert (A + Q).swap_a() == A_INV + Q
        assert not (A + Q).is_a_symmetric()

    def test_divide_exact_binomial(self):
        """(1 - a**2 q**2) / (1 - a q) = 1 + a q."""
        aq = A * Q
        assert (1 - aq * aq).divide_exact(1 - aq) == 1 + aq
        assert (1 + aq).divide_exact(1 - aq) is None

    def test_divide_exact_general(self):
        """Long division by a three-term divisor."""
        divisor = 1 + A + Q
        assert (divisor * (1 + A * A)).divide_exact(divisor) == 1 + A * A
        with pytest.raises(ZeroDivisionError):
            A.divide_exact(LaurentAQ())

    def test_render_round_trip(self):
        """Rendered text parses back to the same polynomial."""
        expr = A - 2 * q_power(KExp(-2, 4)) + Fraction(1, 3) * A_INV * Q
        assert expr.render() == "-2*q**(4*k-2) + 1/3*a**(-1)*q + a"
        assert parse_expression(expr.render()) == expr

    def test_canonicalize(self):
        """Duplicate keys merge and cancel."""
        merged = canonicalize([(1, 0, 1), (1, KExp(0, 0), -1), (0, (1, 1), 2)])
        assert merged == LaurentAQ.monomial(2, 0, KExp(1, 1))

    @given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-4, 4), st.integers(-5, 5)), max_size=6))
    def test_to_u_poly_round_trip(self, raw):
        """Symmetric expressions are polynomials in u = a + 1/a."""
        expr = canonicalize([(m, e, c) for m, e, c in raw] + [(-m, e, c) for m, e, c in raw])
        assert to_u_poly(expr).to_laurent() == expr


class TestFactorization:
    """Canonical factors of binomials."""

    def test_cyclotomic_split(self):
        """1 - a**2 = unit * (a - 1)(a + 1)."""
        unit, factors = factor_one_minus(A * A)
        assert len(factors) == 2
        product = unit
        for base, exp in factors:
            product = product * base ** exp
        assert product == 1 - A * A

    def test_coincident_roots(self):
        """1 - 1 has no factorization."""
        with pytest.raises(DegenerateSatakeValue):
            factor_one_minus(LaurentAQ.one())


class TestFracAQ:
    """Rational functions with factored denominators."""

    def test_sum_reduces_to_one(self):
        """1/(1 - aq) - aq/(1 - aq) = 1."""
        aq = A * Q
        total = FracAQ.from_parts(1, 1 - aq) + FracAQ.from_parts(-aq, 1 - aq)
        assert total == 1
        assert total.as_laurent() == 1

    def test_swap_a(self):
        """1/(1 - 1/a) = -a/(1 - a)."""
        assert FracAQ.from_parts(1, 1 - A).swap_a() == FracAQ.from_parts(-A, 1 - A)

    def test_zero_denominator(self):
        """A zero factor is rejected."""
        with pytest.raises(DegenerateSatakeValue):
            FracAQ.from_factors(1, [(LaurentAQ(), 1)])

    def test_hash_of_equal_forms(self):
        """A sum that reduces to 1 hashes like 1 and collapses in a set."""
        aq = A * Q
        total = FracAQ.from_parts(1, 1 - aq) + FracAQ.from_parts(-aq, 1 - aq)
        one = FracAQ(LaurentAQ.one())
        assert hash(total) == hash(one)
        assert len({total, one, total.reduce()}) == 1

    def test_evaluate_numeric(self):
        """1/(1 - aq) at p = 4, a = 1 is -1; a pole raises."""
        value = FracAQ.from_parts(1, 1 - A * Q).evaluate_numeric(4, 1, 1, 128)
        assert abs(value + 1) < mpmath.mpf(2) ** -100
        with pytest.raises(DegenerateSatakeValue):
            FracAQ.from_parts(1, 1 - A).evaluate_numeric(3, 1, 1, 128)


class TestPolyX:
    """Polynomials in x and power series."""

    def test_times_linear(self):
        """(1 - a x)(1 - x/a) = 1 - u x + x**2."""
        poly = PolyX.one().times_linear(A).times_linear(A_INV)
        assert poly == PolyX([1, -U, 1])
        assert poly.is_a_symmetric()
        assert poly.truncate(1) == PolyX([1, -U])

    def test_substitute_scale(self):
        """x -> q x scales the j-th coefficient by q**j; binomials are rejected."""
        poly = PolyX([1, A, 1])
        assert substitute_scale(poly, Q) == PolyX([1, A * Q, q_power(2)])
        with pytest.raises(NonMonomialScale):
            substitute_scale(poly, 1 + Q)

    def test_series_quotient(self):
        """1/(1 - x) = sum x**r; 1/(1 - a x) = sum a**r x**r."""
        assert series_quotient(PolyX.one(), PolyX.linear(1), 4) == [LaurentAQ.one()] * 5
        assert series_quotient(PolyX.one(), PolyX.linear(A), 3)[3] == A ** 3
        with pytest.raises(SeriesError):
            series_quotient(PolyX.one(), PolyX([2, 1]), 2)

    def test_evaluate_exact(self):
        """Coefficients of (1 - a x)(1 - x/a) at u = 1."""
        poly = PolyX.one().times_linear(A).times_linear(A_INV)
        assert poly.evaluate_exact(2, 1, Fraction(1)) == [1, -1, 1]


class TestUPolynomial:
    """The u = a + 1/a rewriting."""

    def test_chebyshev_like(self):
        """a**2 + a**-2 = u**2 - 2."""
        poly = to_u_poly(A ** 2 + A_INV ** 2)
        assert poly.coeffs == (LaurentAQ.constant(-2), LaurentAQ(), LaurentAQ.one())
        with pytest.raises(ValueError):
            to_u_poly(A)

    def test_evaluate(self):
        """(u + q) at u = 1/2, p = 2."""
        assert evaluate_exact(U + Q, 2, 1, Fraction(1, 2)) == Surd(Fraction(1, 2), 1, 2)
        assert UPolynomial([Q, LaurentAQ.one()]).evaluate(3, 1, 1) == Surd(1, 1, 3)

    def test_horner(self):
        """2 + 3u + u**2 at u = sqrt 2."""
        assert horner([Surd(2, 0, 2), Surd(3, 0, 2), Surd(1, 0, 2)], Surd.sqrt(2), 2) == Surd(4, 3, 2)

    def test_u_grid(self):
        """Equally spaced from -2 to 2."""
        assert u_grid(5) == [-2, -1, 0, 1, 2]
        with pytest.raises(ValueError):
            u_grid(1)


class TestEvalPoint:
    """Validation and certified signs."""

    @pytest.mark.parametrize("kwargs", [
        {"p": 4, "k": 1, "u": 0},
        {"p": 3, "k": 0, "u": 0},
        {"p": 3, "k": 1},
        {"p": 3, "k": 1, "a": 1, "u": 0},
        {"p": 3, "k": 1, "u": 3},
        {"p": 3, "k": 1, "a": 2},
    ])
    def test_invalid(self, kwargs):
        """Non-primes, bad weights, missing or out-of-range Satake values."""
        with pytest.raises(InvalidEvalPoint):
            EvalPoint(**kwargs)

    def test_real_units_are_exact(self):
        """u = -2 means a = -1."""
        assert evaluate(A + 1, EvalPoint(3, 1, u=-2)) == 0
        assert evaluate(A * Q, EvalPoint(3, 1, u=2)) == Surd.sqrt(3)

    def test_symmetric_sign(self):
        """q u - 1 at u = 1, p = 3 is sqrt 3 - 1."""
        assert certified_sign(Q * U - 1, EvalPoint(3, 1, u=1)) == 1
        assert certified_sign(U, EvalPoint(3, 1, u=0)) == 0

    def test_non_symmetric_at_u(self):
        """a + q a at u = 1, p = 3 has real part (1 + sqrt 3)/2."""
        assert certified_sign(A + Q * A, EvalPoint(3, 1, u=1)) == 1
        assert certified_sign(A * A - Q, EvalPoint(3, 1, u=Surd(0, 1, 3))) == -1

    def test_numeric_sign(self):
        """Non-symmetric expressions at a = i."""
        assert certified_sign(A + 2, EvalPoint(3, 1, a=1j)) == 1
        with pytest.raises(PrecisionExhausted):
            certified_sign(A * A + 1, EvalPoint(3, 1, a=1j))


coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4)
laurents = st.dictionaries(
    st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-1, 1)), coefficients, max_size=4,
).map(LaurentAQ)
polys = st.lists(laurents, max_size=4).map(PolyX)
monomials = st.builds(
    LaurentAQ.monomial,
    coefficients.filter(bool),
    st.integers(-3, 3),
    st.builds(KExp, st.integers(-3, 3), st.integers(-1, 1)),
)


class TestRingLaws:
    """Algebraic identities over random elements."""

    @settings(max_examples=60, deadline=None)
    @given(laurents, laurents, laurents)
    def test_laurent_ring_axioms(self, f, g, h):
        """Associativity, commutativity and distributivity."""
        assert (f * g) * h == f * (g * h)
        assert (f + g) + h == f + (g + h)
        assert f * g == g * f
        assert f * (g + h) == f * g + f * h

    @settings(max_examples=40, deadline=None)
    @given(polys, polys, polys)
    def test_poly_ring_axioms(self, f, g, h):
        """The same laws for polynomials in x."""
        assert poly_mul(poly_mul(f, g), h) == poly_mul(f, poly_mul(g, h))
        assert poly_mul(f, poly_add(g, h)) == poly_add(poly_mul(f, g), poly_mul(f, h))

    @settings(max_examples=40, deadline=None)
    @given(laurents, laurents, st.sampled_from([-2, 2]))
    def test_evaluate_multiplicative_exact(self, f, g, u):
        """At a = +-1 evaluation is an exact ring map."""
        pt = EvalPoint(3, 2, u=u)
        assert evaluate(f * g, pt) == evaluate(f, pt) * evaluate(g, pt)
        assert evaluate(f + g, pt) == evaluate(f, pt) + evaluate(g, pt)

    @settings(max_examples=40, deadline=None)
    @given(laurents, laurents, st.integers(-15, 15))
    def test_evaluate_multiplicative_numeric(self, f, g, eighths):
        """On the unit circle the product agrees to working precision."""
        pt = EvalPoint(5, 3, u=Fraction(eighths, 8))
        lhs, left, right = evaluate(f * g, pt), evaluate(f, pt), evaluate(g, pt)
        scale = 1 + abs(left) * abs(right)
        assert abs(lhs - left * right) <= scale * mpmath.mpf(2) ** -100

    @settings(max_examples=40, deadline=None)
    @given(polys, monomials)
    def test_substitute_scale_round_trip(self, poly, scale):
        """x -> m x followed by x -> x/m is the identity."""
        there = substitute_scale(poly, scale)
        assert substitute_scale(there, scale.monomial_inverse()) == poly

    @settings(max_examples=60, deadline=None)
    @given(st.lists(
        st.tuples(st.integers(-3, 3), st.tuples(st.integers(-3, 3), st.integers(-1, 1)), coefficients),
        max_size=8,
    ))
    def test_canonicalize_idempotent(self, raw):
        """Canonical terms canonicalize to themselves."""
        once = canonicalize(raw)
        assert canonicalize(once.terms()) == once
        assert canonicalize(raw + raw) == 2 * once

    @settings(max_examples=40, deadline=None)
    @given(laurents, st.sampled_from([1 - A * Q, A - 1, 1 + A * q_power(KExp(-1, 1))]), st.integers(1, 3))
    def test_frac_hash_matches_equality(self, num, den, power):
        """Equal fractions in different forms share a hash."""
        plain = FracAQ.from_parts(num, den)
        base, exp = next(iter(plain.factors.items()))
        padded = FracAQ(plain.num * base ** power, {base: exp + power})
        assert padded == plain
        assert hash(padded) == hash(plain)
