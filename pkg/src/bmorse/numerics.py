"""Exact rationals and certified rational enclosures.

Rationals are plain :class:`fractions.Fraction` values; this module adds the
normalising constructor, the ``"num/den"`` wire format and the
:class:`Enclosure` interval type used for values of the limit function.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Fraction
RationalLike = Union[int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def normalize(num: int, den: int) -> Fraction:
    """Reduced fraction ``num/den`` with a positive denominator."""
    if den == 0:
        raise ValueError("zero denominator")
    return Fraction(num, den)


def as_rational(value: RationalLike | str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"not an exact rational: {value!r}")


def fmt(q: Fraction) -> str:
    """Serialise as ``"num/den"`` (integers keep the ``/1``)."""
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer literal. Decimals are rejected."""
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            return normalize(int(num), int(den))
        except ValueError as exc:
            raise ValueError(f"malformed rational {text!r}") from exc
    try:
        return Fraction(int(text))
    except ValueError as exc:
        raise ValueError(f"malformed rational {text!r}") from exc


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval ``[lo, hi]`` certified to hold a real value."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, q: RationalLike) -> "Enclosure":
        q = as_rational(q)
        return cls(q, q)

    @classmethod
    def spanning(cls, p: Fraction, q: Fraction) -> "Enclosure":
        return cls(p, q) if p <= q else cls(q, p)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, item) -> bool:
        if isinstance(item, Enclosure):
            return self.lo <= item.lo and item.hi <= self.hi
        return self.lo <= item <= self.hi

    def intersects(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __add__(self, other: "Enclosure | RationalLike") -> "Enclosure":
        if isinstance(other, Enclosure):
            return Enclosure(self.lo + other.lo, self.hi + other.hi)
        return Enclosure(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other: "Enclosure | RationalLike") -> "Enclosure":
        if isinstance(other, Enclosure):
            return Enclosure(self.lo - other.hi, self.hi - other.lo)
        return Enclosure(self.lo - other, self.hi - other)

    def scale(self, k: RationalLike) -> "Enclosure":
        return Enclosure.spanning(self.lo * k, self.hi * k)

    def __str__(self) -> str:
        return f"[{fmt(self.lo)}, {fmt(self.hi)}]"


def hull(a: Enclosure, b: Enclosure) -> Enclosure:
    """Smallest enclosure containing both arguments."""
    return Enclosure(min(a.lo, b.lo), max(a.hi, b.hi))
