"""
Exact arithmetic in the real quadratic field Q(sqrt(p)).

Every half-integral power of a prime p lives in this field, so sign
decisions at a concrete prime never need floating point.
"""

from fractions import Fraction
from numbers import Rational
from typing import Union

import mpmath

Number = Union[int, Fraction, "Surd"]


def _fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"Cannot use {type(value).__name__} as an exact rational")


def _sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


class Surd:
    """
    Number r0 + r1*sqrt(p) with rational r0, r1 and p > 1 not a square.

    Values with r1 == 0 are plain rationals and combine with surds over
    any p.
    """

    __slots__ = ("rational", "radical", "p")

    def __init__(self, rational=0, radical=0, p: int = 2):
        if p < 2:
            raise ValueError(f"Radicand must be at least 2, got {p}")
        self.rational = _fraction(rational)
        self.radical = _fraction(radical)
        self.p = int(p)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def sqrt(cls, p: int) -> "Surd":
        return cls(0, 1, p)

    @classmethod
    def q_power(cls, p: int, exponent: int) -> "Surd":
        """Return p**(exponent/2) exactly."""
        half, odd = divmod(exponent, 2)
        scale = Fraction(p) ** half
        if odd:
            return cls(0, scale, p)
        return cls(scale, 0, p)

    # ------------------------------------------------------------------
    # Coercion
    # ------------------------------------------------------------------

    def _coerce(self, other) -> "Surd":
        if isinstance(other, Surd):
            if other.p == self.p or other.radical == 0:
                return other if other.p == self.p else Surd(other.rational, 0, self.p)
            if self.radical == 0:
                return other
            raise ValueError(
                f"Cannot combine sqrt({self.p}) and sqrt({other.p}) surds"
            )
        return Surd(_fraction(other), 0, self.p)

    def _common_p(self, other: "Surd") -> int:
        return other.p if self.radical == 0 and other.radical != 0 else self.p

    # ------------------------------------------------------------------
    # Ring operations
    # ------------------------------------------------------------------

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Surd(
            self.rational + other.rational,
            self.radical + other.radical,
            self._common_p(other),
        )

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.rational, -self.radical, self.p)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        p = self._common_p(other)
        return Surd(
            self.rational * other.rational + self.radical * other.radical * p,
            self.rational * other.radical + self.radical * other.rational,
            p,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "Surd":
        return Surd(self.rational, -self.radical, self.p)

    def norm(self) -> Fraction:
        return self.rational ** 2 - self.radical ** 2 * self.p

    def inverse(self) -> "Surd":
        norm = self.norm()
        if norm == 0:
            raise ZeroDivisionError("Surd division by zero")
        conj = self.conjugate()
        return Surd(conj.rational / norm, conj.radical / norm, self.p)

    def __truediv__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Surd(1, 0, self.p)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # ------------------------------------------------------------------
    # Order
    # ------------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign, comparing r0**2 against r1**2 * p when they disagree."""
        s0, s1 = _sign(self.rational), _sign(self.radical)
        if s1 == 0 or s0 == s1:
            return s0 or s1
        if s0 == 0:
            return s1
        lhs = self.rational ** 2
        rhs = self.radical ** 2 * self.p
        if lhs > rhs:
            return s0
        if lhs < rhs:
            return s1
        return 0

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.rational == other.rational and self.radical == other.radical

    def __hash__(self):
        if self.radical == 0:
            return hash(self.rational)
        return hash((self.rational, self.radical, self.p))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return bool(self.rational) or bool(self.radical)

    # ------------------------------------------------------------------
    # Rendering
    # ------------------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.radical == 0

    def to_mpf(self, precision_bits: int = 128):
        with mpmath.workprec(precision_bits):
            value = mpmath.mpf(self.rational.numerator) / self.rational.denominator
            if self.radical:
                root = mpmath.sqrt(self.p)
                value += root * self.radical.numerator / self.radical.denominator
            return +value

    def __float__(self):
        return float(self.to_mpf(64))

    def decimal(self, digits: int = 30) -> str:
        """Fixed significant-digit decimal rendering."""
        bits = int(digits * 3.33) + 32
        with mpmath.workprec(bits):
            return mpmath.nstr(self.to_mpf(bits), digits, strip_zeros=False)

    def __str__(self):
        if self.radical == 0:
            return str(self.rational)
        radical = f"{self.radical}*sqrt({self.p})"
        if self.rational == 0:
            return radical
        if self.radical < 0:
            return f"{self.rational} - {-self.radical}*sqrt({self.p})"
        return f"{self.rational} + {radical}"

    def __repr__(self):
        return f"Surd({self.rational!r}, {self.radical!r}, p={self.p})"
