"""Bernoulli, Gibbs (place-dependent) and atomic measures.

Cylinder masses come with certified enclosures and ball masses are bounded by
branch-and-bound over the cylinder tree.  For place-dependent weights the
cylinder mass satisfies

    mu(phi_w F) = integral of prod_k p_{w_k}(phi_{w_{k+1} .. w_n}(y)) dmu(y),

so evaluating each factor over the interval phi_{w_{k+1} .. w_n}(conv F)
encloses it without knowing any Gibbs constant.
"""
from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .bounds import Bounds, down, up, to_exact
from .systems import IfsSpec, _mat_mul, _mob, _mob_image, _IDENTITY
from .symbolic import SymbolWord

__all__ = [
    "ConstantWeights",
    "LinearWeights",
    "SoftmaxWeights",
    "IfsMeasure",
    "AtomicMeasure",
    "cylinder_measure",
    "ball_measure",
    "quasi_bernoulli_defect",
    "sample_typical_points",
    "support_point_near",
    "make_rng",
]


def make_rng(seed, index: int = 0) -> np.random.Generator:
    """Counter-based stream: the same (seed, index) always gives the same draws."""
    bg = np.random.Philox(key=int(seed) & ((1 << 64) - 1))
    if index:
        bg = bg.jumped(int(index))
    return np.random.Generator(bg)


# --- weights -------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantWeights:
    p: tuple

    def __post_init__(self):
        p = tuple(Fraction(to_exact(v)) for v in self.p)
        if any(not 0 < v < 1 for v in p):
            raise ValueError("probabilities must lie in (0,1)")
        if sum(p) != 1:
            raise ValueError(f"probabilities sum to {sum(p)}, not 1")
        object.__setattr__(self, "p", p)

    is_constant = True

    @property
    def size(self) -> int:
        return len(self.p)

    def value(self, i, x):
        return self.p[i]

    def range(self, i, lo, hi):
        return self.p[i], self.p[i]

    def validate(self, hull):
        pass

    def to_json(self):
        return {"kind": "constant", "p": [str(v) for v in self.p]}


@dataclass(frozen=True)
class LinearWeights:
    """p_i(x) = a_i + b_i x with sum a = 1 and sum b = 0, so the sum is identically 1."""

    a: tuple
    b: tuple

    def __post_init__(self):
        a = tuple(Fraction(to_exact(v)) for v in self.a)
        b = tuple(Fraction(to_exact(v)) for v in self.b)
        if len(a) != len(b):
            raise ValueError("coefficient vectors differ in length")
        if sum(a) != 1 or sum(b) != 0:
            raise ValueError("linear weights must satisfy sum a = 1, sum b = 0")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def size(self) -> int:
        return len(self.a)

    @property
    def is_constant(self) -> bool:
        return all(v == 0 for v in self.b)

    def value(self, i, x):
        return self.a[i] + self.b[i] * x

    def range(self, i, lo, hi):
        u, v = self.value(i, lo), self.value(i, hi)
        return (u, v) if u <= v else (v, u)

    def validate(self, hull):
        lo, hi = hull
        for i in range(self.size):
            u, v = self.range(i, lo, hi)
            if u <= 0 or v >= 1:
                raise ValueError(f"weight {i} leaves (0,1) on the hull")

    def to_json(self):
        return {"kind": "linear", "a": [str(v) for v in self.a], "b": [str(v) for v in self.b]}


@dataclass(frozen=True)
class SoftmaxWeights:
    """p_i(x) = c_i exp(d_i x) / sum_j c_j exp(d_j x); evaluated in floats."""

    c: tuple
    d: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.c)
        d = tuple(float(v) for v in self.d)
        if len(c) != len(d) or any(v <= 0 for v in c):
            raise ValueError("softmax weights need positive c and matching d")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @property
    def size(self) -> int:
        return len(self.c)

    @property
    def is_constant(self) -> bool:
        return len(set(self.d)) == 1

    def value(self, i, x):
        x = float(x)
        e = [c * math.exp(d * x) for c, d in zip(self.c, self.d)]
        return e[i] / sum(e)

    def range(self, i, lo, hi):
        # p_i = 1 / sum_j (c_j / c_i) exp((d_j - d_i) x); bound each term over [lo, hi]
        lo, hi = float(lo), float(hi)
        smin = smax = 0.0
        for c, d in zip(self.c, self.d):
            k = d - self.d[i]
            t1, t2 = math.exp(k * lo), math.exp(k * hi)
            r = c / self.c[i]
            smin = down(smin + down(r * down(min(t1, t2))))
            smax = up(smax + up(r * up(max(t1, t2))))
        return down(1.0 / smax), min(1.0, up(1.0 / smin))

    def validate(self, hull):
        pass

    def to_json(self):
        return {"kind": "softmax", "c": list(self.c), "d": list(self.d)}


# --- IFS measures --------------------------------------------------------------

class IfsMeasure:
    """Self-conformal measure: Bernoulli for constant weights, Gibbs otherwise."""

    def __init__(self, ifs: IfsSpec, weights, name: str = ""):
        if ifs.is_sponge:
            raise TypeError("use sponge.SpongeMeasure for sponge systems")
        if weights.size != ifs.size:
            raise ValueError("weight count differs from map count")
        weights.validate(ifs.hull)
        self.ifs = ifs
        self.weights = weights
        self.name = name
        self.support_hull = ifs.attractor_hull

    @property
    def kind(self) -> str:
        return "bernoulli" if isinstance(self.weights, ConstantWeights) else "gibbs"

    @property
    def exact(self) -> bool:
        return not isinstance(self.weights, SoftmaxWeights)

    @property
    def total(self):
        return Fraction(1)

    @property
    def default_depth(self) -> int:
        return 24 if self.exact else 40

    def __repr__(self):
        return f"IfsMeasure({self.name or self.kind}, size={self.ifs.size})"

    def _word(self, w) -> SymbolWord:
        if isinstance(w, SymbolWord):
            return w
        return SymbolWord.of(w, self.ifs.size)

    def cylinder_measure(self, w) -> Bounds:
        w = self._word(w)
        if isinstance(self.weights, ConstantWeights):
            out = Fraction(1)
            for i in w:
                out *= self.weights.p[i]
            return Bounds(out, out)
        basic = self._basic_cylinder(w.symbols)
        if len(w) == 0 or self.partition_level == 0:
            return basic
        return self._lp_cylinder(w.symbols).intersect(basic)

    partition_level = 4

    def _mul(self, a, b, rounding):
        return a * b if self.exact else rounding(a * b)

    def _basic_cylinder(self, word) -> Bounds:
        lo, hi = self.support_hull
        mlo = mhi = Fraction(1) if self.exact else 1.0
        mats = self.ifs.matrices
        for i in reversed(word):
            u, v = self.weights.range(i, lo, hi)
            mlo, mhi = self._mul(mlo, u, down), self._mul(mhi, v, up)
            lo, hi = _mob_image(mats[i], lo, hi)
        return Bounds(mlo, min(mhi, 1) if self.exact else min(mhi, 1.0))

    @cached_property
    def _partition(self):
        """Level-L cylinders v with hulls and mass enclosures; sum of masses is 1."""
        from itertools import product

        L = self.partition_level
        mats = self.ifs.matrices
        out = []
        for v in product(range(self.ifs.size), repeat=L):
            mat = _IDENTITY
            for i in v:
                mat = _mat_mul(mat, mats[i])
            b = self._basic_cylinder(v)
            out.append((v, _mob_image(mat, *self.support_hull), b.lo, b.hi))
        # one bootstrap pass: tighten each level-L mass using the others
        first = out
        out = []
        for v, hull, mlo, mhi in first:
            b = self._lp_with(v, first).intersect(Bounds(mlo, mhi))
            out.append((v, hull, b.lo, b.hi))
        return out

    def _lp_cylinder(self, word) -> Bounds:
        return self._lp_with(word, self._partition)

    def _lp_with(self, word, partition) -> Bounds:
        # mu(phi_w F) = sum_v integral over phi_v F of g_w, with g_w the product of
        # weights along w; bound g_w on each phi_v(conv F) and optimize over the
        # admissible level-L mass vectors (box constraints, total 1)
        mats = self.ifs.matrices
        n = len(word)
        tail = min(n, 8)
        # letters w_1 .. w_{n-tail} see tiny intervals; bound them once over conv F
        lo, hi = self.support_hull
        for i in reversed(word[n - tail:]):
            lo, hi = _mob_image(mats[i], lo, hi)
        plo = phi = Fraction(1) if self.exact else 1.0
        for i in reversed(word[:n - tail]):
            u, v = self.weights.range(i, lo, hi)
            plo, phi = self._mul(plo, u, down), self._mul(phi, v, up)
            lo, hi = _mob_image(mats[i], lo, hi)
        glo, ghi, mlo, mhi = [], [], [], []
        for _, (a, b), lo_v, hi_v in partition:
            gl, gh = plo, phi
            for i in reversed(word[n - tail:]):
                u, v = self.weights.range(i, a, b)
                gl, gh = self._mul(gl, u, down), self._mul(gh, v, up)
                a, b = _mob_image(mats[i], a, b)
            glo.append(gl)
            ghi.append(gh)
            mlo.append(lo_v)
            mhi.append(hi_v)
        return Bounds(_lp_extreme(glo, mlo, mhi, False, self.exact),
                      _lp_extreme(ghi, mlo, mhi, True, self.exact))

    def word_hull(self, w) -> tuple:
        from .systems import word_matrix

        mat = word_matrix(self.ifs, self._word(w))
        return _mob_image(mat, *self.support_hull)

    def needed_depth(self, r) -> int:
        """Smallest n with rho^n diam(conv F) <= r."""
        rho = float(self.ifs.contraction)
        lo, hi = self.support_hull
        diam = float(hi - lo)
        r = float(r)
        if r >= diam:
            return 1
        return max(1, math.ceil(math.log(r / diam) / math.log(rho)))

    def ball_measure(self, x, r, depth: Optional[int] = None, extra: int = 8) -> Bounds:
        """Enclosure of mu(B(x, r)) for the closed ball.

        Without ``depth`` the tree is searched to the level where cylinders
        are smaller than ``r`` plus ``extra`` more levels.
        """
        if r <= 0:
            raise ValueError("radius must be positive")
        if depth is None:
            depth = max(self.default_depth, self.needed_depth(r) + extra)
        if depth < 1:
            raise ValueError("depth must be at least 1")
        if not isinstance(x, float) and not isinstance(r, float):
            x, r = Fraction(x), Fraction(r)
        bl, bh = x - r, x + r
        strict = self.ifs.separation is not None and self.ifs.separation.kind == "OSC"
        mats = self.ifs.matrices
        n = self.ifs.size
        exact = self.exact and not isinstance(x, float) and not isinstance(r, float)
        zero = Fraction(0) if exact else 0.0
        const = isinstance(self.weights, ConstantWeights)
        p = self.weights.p if const else None

        def visit(word, mat, mass, level):
            hlo, hhi = _mob_image(mat, *self.support_hull)
            # disjoint, or meeting the ball in a single point (no atoms)
            if hhi <= bl or hlo >= bh:
                return zero, zero
            mlo, mhi = (mass, mass) if const else (mass.lo, mass.hi)
            inside = (bl < hlo and hhi < bh) if strict else (bl <= hlo and hhi <= bh)
            if inside:
                return mlo, mhi
            if level >= depth:
                return zero, mhi
            lo_sum, hi_sum = zero, zero
            for j in range(n):
                cw = word + (j,)
                cmat = _mat_mul(mat, mats[j])
                cm = mass * p[j] if const else self.cylinder_measure(SymbolWord(cw, n))
                a, b = visit(cw, cmat, cm, level + 1)
                if exact:
                    lo_sum, hi_sum = lo_sum + a, hi_sum + b
                else:
                    lo_sum, hi_sum = down(lo_sum + a), up(hi_sum + b)
            return lo_sum, min(hi_sum, mhi)

        root_mass = Fraction(1) if const else Bounds(Fraction(1), Fraction(1))
        lo, hi = visit((), _IDENTITY, root_mass, 0)
        return Bounds(lo, hi)


def _lp_extreme(g, mlo, mhi, maximize, exact):
    """Extreme of sum g_v m_v over mlo <= m <= mhi, sum m = 1 (greedy)."""
    rd = (lambda v: v) if exact else (up if maximize else down)
    total = Fraction(0) if exact else 0.0
    rest = 1
    for gv, lv in zip(g, mlo):
        total = rd(total + rd(gv * lv))
        rest -= lv
    order = sorted(range(len(g)), key=lambda k: g[k], reverse=maximize)
    for k in order:
        if rest <= 0:
            break
        t = min(rest, mhi[k] - mlo[k])
        total = rd(total + rd(g[k] * t))
        rest -= t
    return total


# --- atomic measures -----------------------------------------------------------

class AtomicMeasure:
    """Finite sum of point masses with exact rational locations and masses."""

    def __init__(self, atoms: Iterable, name: str = ""):
        pts = []
        for loc, mass in atoms:
            loc, mass = Fraction(to_exact(loc)), Fraction(to_exact(mass))
            if mass <= 0:
                raise ValueError("atom masses must be positive")
            pts.append((loc, mass))
        if not pts:
            raise ValueError("an atomic measure needs at least one atom")
        pts.sort()
        merged = []
        for loc, mass in pts:
            if merged and merged[-1][0] == loc:
                merged[-1] = (loc, merged[-1][1] + mass)
            else:
                merged.append((loc, mass))
        self.atoms = merged
        self.locations = [a for a, _ in merged]
        self._cum = [Fraction(0)]
        for _, m in merged:
            self._cum.append(self._cum[-1] + m)
        self.name = name
        self.support_hull = (self.locations[0], self.locations[-1])

    kind = "atomic"
    exact = True
    default_depth = 0

    @classmethod
    def from_csv(cls, path, name: str = "") -> "AtomicMeasure":
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        if rows and rows[0][0].strip().lower() == "location":
            rows = rows[1:]
        return cls(((r[0], r[1]) for r in rows), name=name)

    @property
    def total(self) -> Fraction:
        return self._cum[-1]

    def mass_at(self, x) -> Fraction:
        x = Fraction(x)
        i = bisect.bisect_left(self.locations, x)
        if i < len(self.locations) and self.locations[i] == x:
            return self.atoms[i][1]
        return Fraction(0)

    def interval_mass(self, a, b) -> Fraction:
        """Mass of the closed interval [a, b]."""
        i = bisect.bisect_left(self.locations, a)
        j = bisect.bisect_right(self.locations, b)
        return self._cum[j] - self._cum[i] if j > i else Fraction(0)

    def ball_measure(self, x, r, depth=None) -> Bounds:
        if r <= 0:
            raise ValueError("radius must be positive")
        x, r = Fraction(x), Fraction(r)
        v = self.interval_mass(x - r, x + r)
        return Bounds(v, v)

    def cylinder_measure(self, w):
        raise TypeError("cylinders are undefined for atomic measures")

    def __repr__(self):
        return f"AtomicMeasure({self.name or len(self.atoms)} atoms)"


# --- dispatch and helpers -------------------------------------------------------

def cylinder_measure(m, w) -> Bounds:
    return m.cylinder_measure(w)


def ball_measure(m, x, r, depth: Optional[int] = None) -> Bounds:
    if depth is not None and depth < 1:
        raise ValueError("depth must be at least 1")
    return m.ball_measure(x, r, depth)


def quasi_bernoulli_defect(m: IfsMeasure, trials: int = 200, max_len: int = 8, seed=0) -> float:
    """Largest observed max(nu[ij] / (nu[i] nu[j]), nu[i] nu[j] / nu[ij]).

    A lower bound for the quasi-Bernoulli constant, from enclosure midpoints.
    """
    if not isinstance(m, IfsMeasure):
        raise TypeError("quasi_bernoulli_defect needs an IFS-backed measure")
    rng = make_rng(seed)
    n = m.ifs.size
    worst = 1.0
    for _ in range(trials):
        li, lj = rng.integers(1, max_len + 1, size=2)
        wi = tuple(int(v) for v in rng.integers(0, n, size=li))
        wj = tuple(int(v) for v in rng.integers(0, n, size=lj))
        a = m.cylinder_measure(wi).mid()
        b = m.cylinder_measure(wj).mid()
        c = m.cylinder_measure(wi + wj).mid()
        q = c / (a * b)
        worst = max(worst, float(q), float(1 / q))
    return worst


def sample_typical_points(m: IfsMeasure, count: int, seed=0, length: int = 48,
                          prefix: Sequence = ()) -> list:
    """Exact points phi_prefix(y) of F with y drawn by a chain of ``length`` steps.

    The chain x <- phi_i(x), i ~ p_i(x), starts at the left end of conv F (a
    point of F), so every returned point lies in F.  With an empty prefix the
    law is the chain's ``length``-step distribution, which approximates mu;
    a prefix conditions on the cylinder [prefix], a law equivalent to mu
    restricted to that cylinder.
    """
    rng = make_rng(seed)
    n = m.ifs.size
    maps = m.ifs.maps
    out = []
    for _ in range(count):
        x = m.support_hull[0]
        u = rng.random(length)
        for k in range(length):
            probs = [float(m.weights.value(i, x)) for i in range(n)]
            i = int(np.searchsorted(np.cumsum(probs), u[k] * sum(probs), side="right"))
            x = maps[min(i, n - 1)](x)
        for i in reversed(tuple(prefix)):
            x = maps[i](x)
        out.append(x)
    return out


def support_point_near(m: IfsMeasure, t, depth: int = 40):
    """A point of F close to t: greedy descent through nearest cylinder hulls."""
    if isinstance(m, AtomicMeasure):
        i = bisect.bisect_left(m.locations, t)
        cands = m.locations[max(0, i - 1):i + 1]
        return min(cands, key=lambda v: abs(v - t))
    mats = m.ifs.matrices
    mat = _IDENTITY
    a, b = m.support_hull

    def dist(iv):
        lo, hi = iv
        return max(lo - t, t - hi, 0)

    for _ in range(depth):
        best = None
        for j, mj in enumerate(mats):
            cm = _mat_mul(mat, mj)
            d = dist(_mob_image(cm, a, b))
            if best is None or d < best[0]:
                best = (d, cm)
        mat = best[1]
    u, v = _mob(mat, a), _mob(mat, b)
    return u if abs(u - t) <= abs(v - t) else v
