"""Exact atomic example measures and the weak-tangent point sets.

Two built-in families:

* ``two_sided_geometric``: sum over n >= 0 of 3^-n at -2^-n and 2^-n at 2^-n.
  Pointwise doubling everywhere but not doubling.
* ``sparse_doubling``: mass 2^-n / n at each x_{n,k} = 2^(-2^n) + k 4^(-2^n),
  0 <= k < n.  Supported on a set of Assouad dimension 1 yet of pointwise
  Assouad dimension 0 everywhere.

Levels up to a truncation M are realized atom by atom.  Everything beyond is
a tail whose mass has a closed form and whose atoms lie in a known hull
accumulating at 0; a ball query extends the realized levels until each tail
is inside or outside the ball, so answers are exact rationals unless the cap
``max_level`` is hit, in which case the unresolved tail mass is returned as
the error bound.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .bounds import Bounds

__all__ = [
    "GalleryMeasure",
    "GalleryBall",
    "two_sided_geometric",
    "sparse_doubling",
    "gallery_by_id",
    "GALLERY_IDS",
    "gallery_ball_measure",
    "weak_tangent_snapshot",
    "weak_tangent_direct",
    "hausdorff_distance_to_unit_interval",
    "doubling_witness_ratio",
]


@dataclass(frozen=True)
class _Tail:
    lo: Fraction
    hi: Fraction
    mass: Fraction
    accumulation: Fraction  # an end of [lo, hi] that is a limit, not an atom


@dataclass(frozen=True)
class GalleryBall:
    value: Fraction       # exact mass of the atoms resolved inside the ball
    tail_bound: Fraction  # mass of tails that straddle the ball (0 when exact)
    levels: int           # realized levels used

    @property
    def exact(self) -> bool:
        return self.tail_bound == 0

    def bounds(self) -> Bounds:
        return Bounds(self.value, self.value + self.tail_bound)


class GalleryMeasure:
    kind = "atomic"
    exact = True
    default_depth = 0

    def __init__(self, gid: str, first_level: int, level_atoms: Callable, tails: Callable,
                 total: Fraction, truncation: int, max_level: int, params: dict):
        self.id = gid
        self.name = gid
        self.first_level = first_level
        self._level_atoms = level_atoms
        self._tails = tails
        self._total = total
        self.truncation = truncation
        self.max_level = max(max_level, truncation)
        self.params = params
        self._cache: dict = {}
        self._realize(truncation)

    def _realize(self, n: int):
        if n in self._cache:
            return self._cache[n]
        atoms = []
        for m in range(self.first_level, n + 1):
            atoms.extend(self._level_atoms(m))
        atoms.sort()
        locs = [a for a, _ in atoms]
        cum = [Fraction(0)]
        for _, mass in atoms:
            cum.append(cum[-1] + mass)
        self._cache[n] = (atoms, locs, cum)
        return self._cache[n]

    @property
    def total(self) -> Fraction:
        return self._total

    @property
    def atoms(self) -> list:
        return self._realize(self.truncation)[0]

    @property
    def locations(self) -> list:
        return self._realize(self.truncation)[1]

    @property
    def support_hull(self):
        locs = self.locations
        return (min(locs[0], Fraction(0)), max(locs[-1], Fraction(0)))

    def mass_at(self, x) -> Fraction:
        x = Fraction(x)
        if x == 0:
            return Fraction(0)
        n = self.truncation
        while True:
            atoms, locs, _ = self._realize(n)
            i = bisect.bisect_left(locs, x)
            if i < len(locs) and locs[i] == x:
                return atoms[i][1]
            if all(not (t.lo <= x <= t.hi) for t in self._tails(n)) or n >= self.max_level:
                return Fraction(0)
            n += 1

    def interval_measure(self, a, b) -> GalleryBall:
        """Mass of the closed interval [a, b]."""
        a, b = Fraction(a), Fraction(b)
        n = self.truncation
        while True:
            atoms, locs, cum = self._realize(n)
            i = bisect.bisect_left(locs, a)
            j = bisect.bisect_right(locs, b)
            value = cum[j] - cum[i] if j > i else Fraction(0)
            open_mass = Fraction(0)
            for t in self._tails(n):
                state = _tail_state(t, a, b)
                if state == "inside":
                    value += t.mass
                elif state == "partial":
                    open_mass += t.mass
            if open_mass == 0 or n >= self.max_level:
                return GalleryBall(value, open_mass, n)
            n += 1

    def ball(self, x, r) -> GalleryBall:
        if r <= 0:
            raise ValueError("radius must be positive")
        x, r = Fraction(x), Fraction(r)
        return self.interval_measure(x - r, x + r)

    def ball_measure(self, x, r, depth=None) -> Bounds:
        return self.ball(x, r).bounds()

    def cylinder_measure(self, w):
        raise TypeError("cylinders are undefined for atomic measures")

    def __repr__(self):
        return f"GalleryMeasure({self.id}, M={self.truncation})"


def _tail_state(t: _Tail, a: Fraction, b: Fraction) -> str:
    if a <= t.lo and t.hi <= b:
        return "inside"
    if b < t.lo or a > t.hi:
        return "outside"
    # meeting only at the accumulation point, which carries no mass
    if (b == t.lo == t.accumulation) or (a == t.hi == t.accumulation):
        return "outside"
    return "partial"


def two_sided_geometric(truncation: int = 24, max_level: int = 4096) -> GalleryMeasure:
    def level(n):
        x = Fraction(1, 2 ** n)
        return [(-x, Fraction(1, 3 ** n)), (x, Fraction(1, 2 ** n))]

    def tails(n):
        h = Fraction(1, 2 ** (n + 1))
        return [_Tail(-h, Fraction(0), Fraction(1, 2 * 3 ** n), Fraction(0)),
                _Tail(Fraction(0), h, Fraction(1, 2 ** n), Fraction(0))]

    return GalleryMeasure("two_sided_geometric", 0, level, tails, Fraction(7, 2),
                          truncation, max_level, {"truncation": truncation})


def _sparse_point(n: int, k: int) -> Fraction:
    e = 2 ** n
    return Fraction(1, 2 ** e) + Fraction(k, 4 ** e)


def sparse_doubling(truncation: int = 5, max_level: int = 14) -> GalleryMeasure:
    def level(n):
        return [(_sparse_point(n, k), Fraction(1, n * 2 ** n)) for k in range(n)]

    def tails(n):
        # levels m > n sit in (0, x_{n+1,n}]; the largest atom is on level n+1
        return [_Tail(Fraction(0), _sparse_point(n + 1, n), Fraction(1, 2 ** n), Fraction(0))]

    return GalleryMeasure("sparse_doubling", 1, level, tails, Fraction(1),
                          truncation, max_level, {"truncation": truncation})


GALLERY_IDS = {
    "two_sided_geometric": two_sided_geometric,
    "sparse_doubling": sparse_doubling,
}


def gallery_by_id(gid: str, **params) -> GalleryMeasure:
    try:
        factory = GALLERY_IDS[gid]
    except KeyError:
        raise ValueError(f"unknown gallery measure {gid!r}; known: {sorted(GALLERY_IDS)}") from None
    return factory(**params)


def gallery_ball_measure(g: GalleryMeasure, x, r) -> GalleryBall:
    if hasattr(g, "ball"):
        return g.ball(x, r)
    b = g.ball_measure(x, r)
    return GalleryBall(b.lo, b.hi - b.lo, 0)


def doubling_witness_ratio(g: GalleryMeasure, k: int) -> Fraction:
    """mu(B(y_k, 2 r_k)) / mu(B(y_k, r_k)) at y_k = -2^-k, r_k = 2^-k."""
    y, r = -Fraction(1, 2 ** k), Fraction(1, 2 ** k)
    num, den = g.ball(y, 2 * r), g.ball(y, r)
    if not (num.exact and den.exact):
        raise ArithmeticError("ball masses not resolved exactly")
    return num.value / den.value


# --- weak tangents -----------------------------------------------------------

def _snapshot_exclusions_hold(n: int) -> bool:
    """Exponent inequalities showing T_n sends every other level outside [0,1].

    Levels m > n lie below 2^{1-2^m} < 2^{-2^n}, so T_n is negative there.
    Levels m < n lie above 2^{-2^{n-1}}, where T_n exceeds
    2^{2^(n+1) - 2^(n-1) - 1} / n > 1.
    """
    below = 1 - 2 ** (n + 1) + 2 ** n < 0
    above = True
    if n >= 2:
        bits = 2 ** (n + 1) - 2 ** (n - 1) - 1
        above = bits > n.bit_length()
    return below and above


def weak_tangent_snapshot(n: int) -> list:
    """T_n(X) cap [0,1] with T_n(x) = 4^(2^n) (x - 2^(-2^n)) / n: the set {k/n}."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not _snapshot_exclusions_hold(n):
        raise ArithmeticError("level exclusion inequality failed")
    return [Fraction(k, n) for k in range(n)]


def weak_tangent_direct(n: int, levels: Optional[int] = None) -> list:
    """Brute-force T_n image of the realized levels 1..levels, kept in [0,1].

    Only feasible for small n (the scale is 4^(2^n)).
    """
    levels = levels or n + 2
    scale = Fraction(4 ** (2 ** n), n)
    shift = Fraction(1, 2 ** (2 ** n))
    pts = [Fraction(0)] + [_sparse_point(m, k) for m in range(1, levels + 1) for k in range(m)]
    out = sorted({scale * (x - shift) for x in pts})
    return [v for v in out if 0 <= v <= 1]


def hausdorff_distance_to_unit_interval(points) -> Fraction:
    """Hausdorff distance between a finite subset of [0,1] and [0,1]."""
    pts = sorted({Fraction(p) for p in points})
    if not pts:
        raise ValueError("empty point set")
    if pts[0] < 0 or pts[-1] > 1:
        raise ValueError("points must lie in [0,1]")
    best = max(pts[0], 1 - pts[-1])
    for a, b in zip(pts, pts[1:]):
        best = max(best, (b - a) / 2)
    return best
