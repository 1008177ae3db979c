"""
Exact arithmetic in the real quadratic field Q(sqrt d).

A QuadScalar is a + b*sqrt(d) with rational a, b and a square-free d >= 1.
d = 1 is the rational field and always has b = 0.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Union

from sympy import factorint

from pointspectra.errors import MixedFieldError, NotASquareError, ScalarDivisionError

Rational = Union[int, Fraction]

_SCALAR_PATTERN = re.compile(
    r"""^\s*
    (?:(?P<a>[+-]?\d+(?:/\d+)?)(?=\s*(?:[+-]|$)))?      # rational part
    \s*
    (?:(?P<bsign>[+-])?\s*(?:(?P<b>\d+(?:/\d+)?)\s*\*\s*)?sqrt\(\s*(?P<d>\d+)\s*\))?
    \s*$""",
    re.VERBOSE,
)


@lru_cache(maxsize=256)
def is_square_free(d: int) -> bool:
    if d < 1:
        return False
    return all(exponent == 1 for exponent in factorint(d).values())


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@total_ordering
class QuadScalar:
    __slots__ = ("a", "b", "d")

    def __init__(self, a: Rational = 0, b: Rational = 0, d: int = 1):
        if not is_square_free(d):
            raise ValueError(f"sqrt base must be a square-free positive integer, got {d}")
        a, b = Fraction(a), Fraction(b)
        if d == 1:
            a, b = a + b, Fraction(0)
        self.a = a
        self.b = b
        self.d = d

    # construction -----------------------------------------------------

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, d: int) -> QuadScalar:
        # operands already validated; skips the square-free check
        value = object.__new__(cls)
        value.a, value.b, value.d = a, b, d
        return value

    @classmethod
    def zero(cls, d: int = 1) -> QuadScalar:
        return cls(0, 0, d)

    @classmethod
    def one(cls, d: int = 1) -> QuadScalar:
        return cls(1, 0, d)

    @classmethod
    def coerce(cls, value: "QuadScalar | Rational | str", d: int = 1) -> QuadScalar:
        if isinstance(value, QuadScalar):
            if value.d != d and not (value.b == 0 and value.d == 1):
                raise MixedFieldError(f"scalar {value} does not belong to Q(sqrt {d})")
            return value if value.d == d else cls(value.a, 0, d)
        if isinstance(value, str):
            return parse_scalar(value, d)
        if isinstance(value, (int, Fraction)):
            return cls(value, 0, d)
        raise TypeError(f"cannot interpret {value!r} as an exact scalar")

    def _lift(self, other) -> QuadScalar:
        if isinstance(other, QuadScalar):
            if other.d != self.d:
                if not other.b:
                    return QuadScalar._raw(other.a, Fraction(0), self.d)
                raise MixedFieldError(
                    f"cannot combine elements of Q(sqrt {self.d}) and Q(sqrt {other.d})"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QuadScalar._raw(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    # arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return QuadScalar._raw(self.a + other.a, self.b + other.b, self.d)

    __radd__ = __add__

    def __neg__(self) -> QuadScalar:
        return QuadScalar._raw(-self.a, -self.b, self.d)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return QuadScalar._raw(self.a - other.a, self.b - other.b, self.d)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not self.b and not other.b:
            return QuadScalar._raw(self.a * other.a, Fraction(0), self.d)
        return QuadScalar._raw(
            self.a * other.a + self.d * self.b * other.b,
            self.a * other.b + self.b * other.a,
            self.d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ScalarDivisionError(f"division of {self} by zero")
        if not other.b:
            return QuadScalar._raw(self.a / other.a, self.b / other.a, self.d)
        norm = other.norm()
        numerator = self * other.conjugate()
        return QuadScalar._raw(numerator.a / norm, numerator.b / norm, self.d)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, exponent: int) -> QuadScalar:
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("only non-negative integer powers are supported")
        result, base = QuadScalar.one(self.d), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def square(self) -> QuadScalar:
        return self * self

    def conjugate(self) -> QuadScalar:
        return QuadScalar._raw(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def is_rational(self) -> bool:
        return not self.b

    def sqrt(self) -> QuadScalar:
        """Non-negative square root inside the same field."""
        if self.sign() < 0:
            raise NotASquareError(f"{self} is negative")
        if not self.b:
            root = rational_sqrt(self.a)
            if root is not None:
                return QuadScalar(root, 0, self.d)
            if self.d > 1:
                root = rational_sqrt(self.a / self.d)
                if root is not None:
                    return QuadScalar(0, root, self.d)
            raise NotASquareError(f"{self} is not a square in Q(sqrt {self.d})")
        # (p + q sqrt d)^2 = p^2 + d q^2 + 2 p q sqrt d
        s = rational_sqrt(self.norm())
        if s is not None:
            for t in ((self.a + s) / 2, (self.a - s) / 2):
                p = rational_sqrt(t) if t > 0 else None
                if p is None:
                    continue
                root = QuadScalar(p, self.b / (2 * p), self.d)
                if root * root == self:
                    return root if root.sign() >= 0 else -root
        raise NotASquareError(f"{self} is not a square in Q(sqrt {self.d})")

    # ordering ---------------------------------------------------------

    def sign(self) -> int:
        a_sign = (self.a > 0) - (self.a < 0)
        b_sign = (self.b > 0) - (self.b < 0)
        if not b_sign:
            return a_sign
        if not a_sign or a_sign == b_sign:
            return b_sign
        # opposite signs: compare a^2 with d b^2, never equal for square-free d > 1
        return a_sign if self.a * self.a > self.d * self.b * self.b else b_sign

    def compare(self, other) -> int:
        """-1, 0 or 1 as in the real embedding."""
        other = self._lift(other)
        if other is NotImplemented:
            raise TypeError(f"cannot compare {self!r} with {other!r}")
        return (self - other).sign()

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadScalar):
            if other.d != self.d:
                if self.b or other.b:
                    return False
                return self.a == other.a
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return not self.b and self.a == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __hash__(self) -> int:
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __abs__(self) -> QuadScalar:
        return -self if self.sign() < 0 else self

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    # text -------------------------------------------------------------

    def __str__(self) -> str:
        if not self.b:
            return _format_rational(self.a)
        magnitude = abs(self.b)
        b_text = "" if magnitude == 1 else f"{_format_rational(magnitude)}*"
        root = f"{b_text}sqrt({self.d})"
        if not self.a:
            return root if self.b > 0 else f"-{root}"
        sign = "+" if self.b > 0 else "-"
        return f"{_format_rational(self.a)}{sign}{root}"

    def __repr__(self) -> str:
        return f"QuadScalar({self})"


def parse_scalar(text: str, d: int = 1) -> QuadScalar:
    """
    Parse the canonical form "p/q+r/s*sqrt(d)" and its shorthands
    ("7", "-3/4", "sqrt(2)", "6*sqrt(2)", "1-sqrt(2)").
    """
    match = _SCALAR_PATTERN.match(text)
    if match is None or not text.strip():
        raise ValueError(f"malformed scalar {text!r}")
    a = Fraction(match.group("a")) if match.group("a") else Fraction(0)
    if match.group("d") is None:
        return QuadScalar(a, 0, d)
    base = int(match.group("d"))
    if base != d:
        raise MixedFieldError(f"scalar {text!r} uses sqrt({base}) but the field is Q(sqrt {d})")
    if match.group("a") and not match.group("bsign"):
        raise ValueError(f"malformed scalar {text!r}")
    b = Fraction(match.group("b")) if match.group("b") else Fraction(1)
    if match.group("bsign") == "-":
        b = -b
    return QuadScalar(a, b, d)
