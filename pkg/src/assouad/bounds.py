"""Certified enclosures [lo, hi].

Exact when both ends are Fractions (or ints); floats are rounded outward by one
ulp after every arithmetic step so the true value stays inside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

__all__ = ["Bounds", "is_exact", "down", "up", "to_exact"]


def is_exact(v) -> bool:
    return isinstance(v, Rational)


def down(v):
    if is_exact(v):
        return v
    return math.nextafter(v, -math.inf)


def up(v):
    if is_exact(v):
        return v
    return math.nextafter(v, math.inf)


def to_exact(v):
    """Fraction for ints/Fractions/strings like ``"1/3"``; floats pass through."""
    if isinstance(v, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    return v


@dataclass(frozen=True)
class Bounds:
    lo: object
    hi: object

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v) -> "Bounds":
        return cls(v, v)

    @property
    def exact(self) -> bool:
        return is_exact(self.lo) and is_exact(self.hi)

    @property
    def width(self):
        return self.hi - self.lo

    def mid(self):
        if self.exact:
            return (self.lo + self.hi) / 2
        return 0.5 * (float(self.lo) + float(self.hi))

    def contains(self, v) -> bool:
        return self.lo <= v <= self.hi

    def subset_of(self, other: "Bounds") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "Bounds") -> "Bounds":
        return Bounds(max(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other: "Bounds") -> "Bounds":
        return Bounds(min(self.lo, other.lo), max(self.hi, other.hi))

    def __add__(self, other):
        if not isinstance(other, Bounds):
            other = Bounds.point(other)
        return Bounds(down(self.lo + other.lo), up(self.hi + other.hi))

    __radd__ = __add__

    def __mul__(self, other):
        if not isinstance(other, Bounds):
            other = Bounds.point(other)
        c = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return Bounds(down(min(c)), up(max(c)))

    __rmul__ = __mul__

    def scale(self, c) -> "Bounds":
        return self * c

    def as_float(self) -> tuple:
        if self.exact:
            lo, hi = float(self.lo), float(self.hi)
            return (lo if Fraction(lo) <= self.lo else down(lo),
                    hi if Fraction(hi) >= self.hi else up(hi))
        return float(self.lo), float(self.hi)

    def to_json(self):
        return {"lo": _num_json(self.lo), "hi": _num_json(self.hi)}

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def _num_json(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v.numerator)
    if isinstance(v, int):
        return v
    return float(v)
