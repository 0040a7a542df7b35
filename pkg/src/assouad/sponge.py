"""Bedford-McMullen sponges: level indices, conditional probabilities, VSSC,
approximate cubes and the sponge Bernoulli measure.

Axes are 1-based in the public functions (q = 1..d), matching the usual
indexing of the bases n_1 < ... < n_d.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Optional

from .bounds import Bounds, to_exact
from .symbolic import SymbolWord

__all__ = [
    "SpongeSpec",
    "ApproximateCube",
    "CubeSandwich",
    "SpongeMeasure",
    "level_index",
    "conditional_prob",
    "check_vssc",
    "approx_cube",
    "approx_cube_measure",
    "ball_vs_cube_bounds",
    "enumerate_cubes",
    "reference_carpet",
    "parse_digit",
    "format_digit",
    "sandwich_check",
]

MAX_DIM = 8
MAX_LEVEL = 64


@dataclass(frozen=True)
class SpongeSpec:
    bases: tuple
    digits: tuple
    probs: tuple

    def __post_init__(self):
        bases = tuple(int(n) for n in self.bases)
        digits = tuple(tuple(int(v) for v in dv) for dv in self.digits)
        probs = tuple(Fraction(to_exact(p)) for p in self.probs)
        d = len(bases)
        if not 2 <= d <= MAX_DIM:
            raise ValueError(f"sponge dimension must be in 2..{MAX_DIM}")
        if bases[0] < 2 or any(b2 <= b1 for b1, b2 in zip(bases, bases[1:])):
            raise ValueError("bases must be strictly increasing integers >= 2")
        if not digits:
            raise ValueError("digit set is empty")
        if len(set(digits)) != len(digits):
            raise ValueError("duplicate digits")
        if len(probs) != len(digits):
            raise ValueError("one probability per digit is required")
        for dv in digits:
            if len(dv) != d or any(not 0 <= i < n for i, n in zip(dv, bases)):
                raise ValueError(f"digit {dv} does not fit bases {bases}")
        if any(not 0 < p <= 1 for p in probs) or sum(probs) != 1:
            raise ValueError("probabilities must be positive and sum to exactly 1")
        if len(digits) > 1 and any(p == 1 for p in probs):
            raise ValueError("probabilities must lie in (0,1)")
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "probs", probs)

    @property
    def dim(self) -> int:
        return len(self.bases)

    @property
    def size(self) -> int:
        return len(self.digits)

    def prob(self, digit) -> Fraction:
        return dict(zip(self.digits, self.probs)).get(tuple(digit), Fraction(0))

    @classmethod
    def from_ifs(cls, ifs, probs=None) -> "SpongeSpec":
        digits = [m.digits for m in ifs.maps]
        probs = probs or [Fraction(1, len(digits))] * len(digits)
        return cls(ifs.maps[0].bases, tuple(digits), tuple(probs))

    def to_ifs(self):
        from .systems import IfsSpec, SpongeAffine

        maps = tuple(SpongeAffine(dv, self.bases) for dv in self.digits)
        return IfsSpec(maps, ())

    def to_json(self):
        return {"bases": list(self.bases), "digits": [format_digit(d) for d in self.digits],
                "probs": [str(p) for p in self.probs]}


def reference_carpet() -> SpongeSpec:
    """Carpet with bases (3, 4), digits (0,0), (0,3), (2,0), probabilities 1/8, 5/8, 1/4."""
    return SpongeSpec((3, 4), ((0, 0), (0, 3), (2, 0)),
                      (Fraction(1, 8), Fraction(5, 8), Fraction(1, 4)))


def parse_digit(text: str) -> tuple:
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    return tuple(int(v) for v in t.split(","))


def format_digit(dv) -> str:
    return "(" + ",".join(str(v) for v in dv) + ")"


def _check_axis(spec: SpongeSpec, q: int):
    if not 1 <= q <= spec.dim:
        raise ValueError(f"axis {q} outside 1..{spec.dim}")


def level_index(spec: SpongeSpec, q: int, k: int) -> int:
    """The unique L with n_q^L <= n_1^k < n_q^(L+1), by integer comparison."""
    _check_axis(spec, q)
    if k < 0:
        raise ValueError("level must be nonnegative")
    if k > MAX_LEVEL:
        raise ValueError(f"level capped at {MAX_LEVEL}")
    target = spec.bases[0] ** k
    n = spec.bases[q - 1]
    L, power = 0, n
    while power <= target:
        L += 1
        power *= n
    return L


def conditional_prob(spec: SpongeSpec, digit, q: int) -> Fraction:
    """p(i_q | i_1, ..., i_{q-1}) as an exact rational; 0 if no digit matches."""
    _check_axis(spec, q)
    digit = tuple(digit)
    num = sum((p for dv, p in zip(spec.digits, spec.probs) if dv[:q] == digit[:q]), Fraction(0))
    if num == 0:
        return Fraction(0)
    den = sum((p for dv, p in zip(spec.digits, spec.probs) if dv[:q - 1] == digit[:q - 1]), Fraction(0))
    return num / den


def check_vssc(spec: SpongeSpec):
    """(True, None) or (False, violating pair)."""
    for a_idx, a in enumerate(spec.digits):
        for b in spec.digits[a_idx + 1:]:
            for ia, ib in zip(a, b):
                if ia != ib:
                    if abs(ia - ib) <= 1:
                        return False, (a, b)
                    break
    return True, None


@dataclass(frozen=True)
class ApproximateCube:
    prefix: tuple      # the digits of omega that matter, length L_1(k) = k
    level: int
    constraints: tuple  # per axis, the fixed digits (length L_q(k))
    box: tuple         # per axis, (lo, hi)

    @property
    def sides(self) -> tuple:
        return tuple(hi - lo for lo, hi in self.box)

    def contains_word(self, word) -> bool:
        return all(tuple(dv[q] for dv in word[:len(c)]) == c
                   for q, c in enumerate(self.constraints))


def _as_digits(spec: SpongeSpec, omega) -> tuple:
    if isinstance(omega, SymbolWord):
        return tuple(spec.digits[i] for i in omega)
    out = []
    for v in omega:
        if isinstance(v, int):
            out.append(spec.digits[v])
        else:
            dv = tuple(v)
            if dv not in spec.digits:
                raise ValueError(f"{dv} is not a digit of the sponge")
            out.append(dv)
    return tuple(out)


def approx_cube(spec: SpongeSpec, omega, k: int) -> ApproximateCube:
    word = _as_digits(spec, omega)
    if len(word) < k:
        raise ValueError(f"word of length {len(word)} cannot fix a level-{k} cube")
    cons, box = [], []
    for q in range(spec.dim):
        L = level_index(spec, q + 1, k)
        n = spec.bases[q]
        c = tuple(dv[q] for dv in word[:L])
        lo = sum((Fraction(i, n ** (t + 1)) for t, i in enumerate(c)), Fraction(0))
        cons.append(c)
        box.append((lo, lo + Fraction(1, n ** L)))
    return ApproximateCube(word[:k], k, tuple(cons), tuple(box))


def approx_cube_measure(spec: SpongeSpec, omega, k: int) -> Fraction:
    """prod over axes q and j < L_q(k) of p_q(sigma^j omega)."""
    word = _as_digits(spec, omega)
    if len(word) < level_index(spec, 1, k):
        raise ValueError("word too short to determine the cube digits")
    out = Fraction(1)
    for q in range(1, spec.dim + 1):
        for j in range(level_index(spec, q, k)):
            out *= conditional_prob(spec, word[j], q)
    return out


def enumerate_cubes(spec: SpongeSpec, k: int) -> list:
    """One representative word per distinguishable level-k cube."""
    levels = [level_index(spec, q, k) for q in range(1, spec.dim + 1)]
    choices = []
    for t in range(1, k + 1):
        qt = max(q for q in range(1, spec.dim + 1) if levels[q - 1] >= t)
        reps = {}
        for dv in spec.digits:
            reps.setdefault(dv[:qt], dv)
        choices.append(list(reps.values()))
    return [tuple(w) for w in product(*choices)]


def _sponge_point(spec: SpongeSpec, word) -> tuple:
    """pi(word followed by the first digit repeated forever)."""
    tail = spec.digits[0]
    coords = []
    for q, n in enumerate(spec.bases):
        base = Fraction(tail[q], n - 1)
        x = base
        for dv in reversed(word):
            x = (x + dv[q]) / n
        coords.append(x)
    return tuple(coords)


@dataclass(frozen=True)
class CubeSandwich:
    cube: ApproximateCube
    center: tuple
    inner: Optional[Fraction]
    outer: Fraction
    cube_measure: Fraction


def ball_vs_cube_bounds(spec: SpongeSpec, omega, k: int) -> CubeSandwich:
    """Radii with B(pi w, inner) cap F inside pi(Q_k(w)) inside B(pi w, outer).

    The inner radius needs VSSC and is None without it.
    """
    word = _as_digits(spec, omega)
    cube = approx_cube(spec, word, k)
    scale = Fraction(1, spec.bases[0] ** k)
    ok, _ = check_vssc(spec)
    inner = scale / 2 if ok else None
    outer = sum(spec.bases) * scale
    return CubeSandwich(cube, _sponge_point(spec, word), inner, outer,
                        approx_cube_measure(spec, word, k))


class SpongeMeasure:
    """Bernoulli measure on a sponge; balls are Euclidean and closed."""

    kind = "sponge"
    exact = True
    default_depth = 12

    def __init__(self, spec: SpongeSpec, name: str = ""):
        self.spec = spec
        self.name = name

    @property
    def total(self):
        return Fraction(1)

    @cached_property
    def attractor_box(self) -> tuple:
        out = []
        for q, n in enumerate(self.spec.bases):
            col = [dv[q] for dv in self.spec.digits]
            out.append((Fraction(min(col), n - 1), Fraction(max(col), n - 1)))
        return tuple(out)

    def cylinder_measure(self, w) -> Bounds:
        out = Fraction(1)
        for i in w:
            out *= self.spec.probs[i]
        return Bounds(out, out)

    def point(self, word) -> tuple:
        return _sponge_point(self.spec, _as_digits(self.spec, word))

    def needed_depth(self, r) -> int:
        k, side = 0, Fraction(1)
        while side > r and k < MAX_LEVEL:
            k += 1
            side /= self.spec.bases[0]
        return max(k, 1)

    def ball_measure(self, x, r, depth: Optional[int] = None, extra: int = 4) -> Bounds:
        if r <= 0:
            raise ValueError("radius must be positive")
        x = tuple(Fraction(v) for v in x)
        r = Fraction(r)
        if depth is None:
            depth = max(self.default_depth, self.needed_depth(r) + extra)
        if depth < 1:
            raise ValueError("depth must be at least 1")
        r2 = r * r
        spec = self.spec
        atomless = spec.size > 1

        def dist2(box):
            lo_d = hi_d = Fraction(0)
            for c, (a, b) in zip(x, box):
                near = a - c if c < a else (c - b if c > b else 0)
                far = max(abs(c - a), abs(c - b))
                lo_d += near * near
                hi_d += far * far
            return lo_d, hi_d

        A = self.attractor_box

        def visit(off, scale, mass, level):
            # cylinder box phi_w(A): axis q is off_q + scale_q * A_q
            box = tuple((o + s * a, o + s * b) for o, s, (a, b) in zip(off, scale, A))
            near, far = dist2(box)
            if near > r2 or (atomless and near == r2):
                return Fraction(0), Fraction(0)
            if far <= r2:
                return mass, mass
            if level >= depth:
                return Fraction(0), mass
            lo_s = hi_s = Fraction(0)
            child_scale = tuple(s / n for s, n in zip(scale, spec.bases))
            for dv, p in zip(spec.digits, spec.probs):
                child_off = tuple(o + cs * i for o, cs, i in zip(off, child_scale, dv))
                a, b = visit(child_off, child_scale, mass * p, level + 1)
                lo_s += a
                hi_s += b
            return lo_s, hi_s

        d = spec.dim
        lo, hi = visit((Fraction(0),) * d, (Fraction(1),) * d, Fraction(1), 0)
        return Bounds(lo, hi)


def sandwich_check(m: SpongeMeasure, omega, k: int) -> dict:
    """Certified check mu(B(c, inner)) <= mu(Q_k) <= mu(B(c, outer)) at c = pi(omega).

    Uses the upper enclosure for the inner ball and the lower one for the
    outer ball, so ``ok`` is a proof, not an estimate.
    """
    s = ball_vs_cube_bounds(m.spec, omega, k)
    outer = m.ball_measure(s.center, s.outer)
    inner = m.ball_measure(s.center, s.inner) if s.inner is not None else None
    ok = outer.lo >= s.cube_measure and (inner is None or inner.hi <= s.cube_measure)
    return {"k": k, "center": s.center, "cube": s.cube_measure, "inner": inner,
            "outer": outer, "ok": ok}
