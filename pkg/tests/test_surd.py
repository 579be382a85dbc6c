import pytest
import sys
from fractions import Fraction
from pathlib import Path

from hypothesis import given, strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from utils.surd import Surd

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=20)


def surds(p=3):
    return st.builds(lambda r0, r1: Surd(r0, r1, p), fractions, fractions)


class TestSurdArithmetic:
    """Exact arithmetic in Q(sqrt(p))."""

    def test_sqrt_squares_to_p(self):
        """sqrt(p)**2 is p."""
        assert Surd.sqrt(7) * Surd.sqrt(7) == 7

    def test_q_power(self):
        """Half-integral powers of p."""
        assert Surd.q_power(2, 3) == Surd(0, 2, 2)
        assert Surd.q_power(3, 4) == 9
        assert Surd.q_power(5, -1) == Surd(0, Fraction(1, 5), 5)

    def test_division_by_conjugate(self):
        """(1 + sqrt 2) / (1 - sqrt 2) = -3 - 2 sqrt 2."""
        assert Surd(1, 1, 2) / Surd(1, -1, 2) == Surd(-3, -2, 2)

    def test_division_by_zero(self):
        """Zero has no inverse."""
        with pytest.raises(ZeroDivisionError):
            Surd(0, 0, 3).inverse()

    def test_mixed_radicands_rejected(self):
        """sqrt 2 and sqrt 3 do not share a field."""
        with pytest.raises(ValueError):
            Surd.sqrt(2) + Surd.sqrt(3)

    def test_rationals_combine_across_radicands(self):
        """A rational surd works with any p."""
        assert Surd(2, 0, 5) + Surd.sqrt(3) == Surd(2, 1, 3)

    @given(surds(), surds(), surds())
    def test_ring_axioms(self, x, y, z):
        """Associativity and distributivity."""
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z

    @given(surds())
    def test_inverse(self, x):
        """x * (1/x) = 1 for nonzero x."""
        if x:
            assert x * x.inverse() == 1


class TestSurdOrder:
    """Exact signs and comparisons."""

    def test_sign_of_mixed_terms(self):
        """4 - 2 sqrt 3 > 0 and 1 - sqrt 2 < 0."""
        assert Surd(4, -2, 3).sign() == 1
        assert Surd(1, -1, 2).sign() == -1
        assert Surd(0, 0, 2).sign() == 0

    def test_comparisons(self):
        """sqrt 5 lies between 2 and 3."""
        root = Surd.sqrt(5)
        assert 2 < root < 3
        assert abs(-root) == root

    @given(surds(5))
    def test_sign_matches_float(self, x):
        """Exact sign agrees with a 200-bit evaluation away from zero."""
        value = x.to_mpf(200)
        if abs(value) > 1e-30:
            assert x.sign() == (1 if value > 0 else -1)


class TestSurdRendering:
    """Text and decimal output."""

    def test_str(self):
        """Rational part first, then the radical."""
        assert str(Surd(Fraction(43, 4), Fraction(-15, 2), 2)) == "43/4 - 15/2*sqrt(2)"
        assert str(Surd(0, 3, 7)) == "3*sqrt(7)"
        assert str(Surd(5, 0, 7)) == "5"

    def test_decimal_digits(self):
        """Fixed significant digits."""
        text = Surd.sqrt(2).decimal(10)
        assert text.startswith("1.41421356")
        assert len(text.replace(".", "")) == 10
