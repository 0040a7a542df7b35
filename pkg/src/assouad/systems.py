"""Contraction maps, iterated function systems and separation certificates.

One-dimensional maps are stored as exact 2x2 Moebius matrices over the
rationals; a similarity is the special case with no pole.  Float parameters
are converted to the binary rationals they denote, so compositions, interval
images and derivative enclosures are exact.  Only irrational quantities
(Moebius fixed points, distortion constants) fall back to floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .bounds import Bounds, to_exact
from .symbolic import SymbolWord

__all__ = [
    "Similarity1D",
    "Moebius1D",
    "SpongeAffine",
    "IfsSpec",
    "SeparationCertificate",
    "SscRefutation",
    "SscIndeterminate",
    "apply_word",
    "derivative_norm_along",
    "sup_derivative_norm",
    "fixed_point",
    "check_ssc",
    "declare_osc",
    "word_matrix",
    "cantor_system",
    "similarity_system",
    "moebius_system",
]


def _q(v) -> Fraction:
    v = to_exact(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("map parameters must be finite")
        return Fraction(v)
    return Fraction(v)


# 2x2 matrices as tuples (a, b, c, d) acting by x -> (a x + b) / (c x + d)

def _mat_mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


_IDENTITY = (Fraction(1), Fraction(0), Fraction(0), Fraction(1))


def _mob(m, x):
    a, b, c, d = m
    return (a * x + b) / (c * x + d)


def _mob_deriv_abs(m, x):
    a, b, c, d = m
    return abs(a * d - b * c) / (c * x + d) ** 2


def _mob_image(m, lo, hi):
    u, v = _mob(m, lo), _mob(m, hi)
    return (u, v) if u <= v else (v, u)


def _mob_deriv_range(m, lo, hi):
    # |c x + d| is affine without sign change on the interval, so the extremes sit at the ends
    u, v = _mob_deriv_abs(m, lo), _mob_deriv_abs(m, hi)
    return (u, v) if u <= v else (v, u)


def _pole_in(m, lo, hi) -> bool:
    _, _, c, d = m
    if c == 0:
        return False
    p = -d / c
    return lo <= p <= hi


@dataclass(frozen=True)
class Similarity1D:
    """x -> sign * ratio * x + translation."""

    ratio: Fraction
    sign: int = 1
    translation: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "ratio", _q(self.ratio))
        object.__setattr__(self, "translation", _q(self.translation))
        if not 0 < self.ratio < 1:
            raise ValueError(f"similarity ratio must lie in (0,1), got {self.ratio}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def matrix(self):
        return (self.sign * self.ratio, self.translation, Fraction(0), Fraction(1))

    @property
    def is_similarity(self) -> bool:
        return True

    def __call__(self, x):
        return self.sign * self.ratio * x + self.translation

    def to_json(self):
        return {"kind": "similarity", "ratio": str(self.ratio), "sign": self.sign,
                "translation": str(self.translation)}


@dataclass(frozen=True)
class Moebius1D:
    """x -> (a x + b) / (c x + d) on a closed domain interval avoiding the pole."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    domain: tuple = (Fraction(0), Fraction(1))

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, _q(getattr(self, name)))
        lo, hi = (_q(v) for v in self.domain)
        if lo >= hi:
            raise ValueError("domain must be a nondegenerate interval")
        object.__setattr__(self, "domain", (lo, hi))
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Moebius map (ad - bc = 0)")
        if _pole_in(self.matrix, lo, hi):
            raise ValueError("Moebius pole lies in the closed domain")

    @property
    def matrix(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def is_similarity(self) -> bool:
        return self.c == 0

    def __call__(self, x):
        return _mob(self.matrix, x)

    def to_json(self):
        return {"kind": "moebius", "a": str(self.a), "b": str(self.b), "c": str(self.c),
                "d": str(self.d), "domain": [str(v) for v in self.domain]}


@dataclass(frozen=True)
class SpongeAffine:
    """Grid map x_q -> (x_q + i_q) / n_q on the unit cube."""

    digits: tuple
    bases: tuple

    def __post_init__(self):
        digits = tuple(int(v) for v in self.digits)
        bases = tuple(int(v) for v in self.bases)
        if len(digits) != len(bases):
            raise ValueError("digit vector and bases differ in dimension")
        if any(n < 2 for n in bases) or any(b2 <= b1 for b1, b2 in zip(bases, bases[1:])):
            raise ValueError("sponge bases must be strictly increasing integers >= 2")
        for i, n in zip(digits, bases):
            if not 0 <= i < n:
                raise ValueError(f"digit {i} outside 0..{n - 1}")
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "bases", bases)

    def __call__(self, x):
        return tuple((Fraction(xq) + i) / n for xq, i, n in zip(x, self.digits, self.bases))

    @property
    def is_similarity(self) -> bool:
        return False

    def to_json(self):
        return {"kind": "sponge", "digits": list(self.digits), "bases": list(self.bases)}


@dataclass(frozen=True)
class SeparationCertificate:
    kind: str  # "SSC", "OSC" (declared) or "VSSC"
    delta: Optional[Bounds] = None
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    witness: object = None

    def __post_init__(self):
        if self.kind not in ("SSC", "OSC", "VSSC"):
            raise ValueError(f"unknown separation kind {self.kind!r}")
        if self.kind == "SSC" and (self.delta is None or self.delta.lo <= 0):
            raise ValueError("an SSC certificate needs a positive gap")
        if min(self.c1, self.c2, self.c3) < 1:
            raise ValueError("distortion constants are at least 1")

    @property
    def holds(self) -> bool:
        return True

    def to_json(self):
        return {"kind": self.kind, "delta": self.delta.to_json() if self.delta else None,
                "c1": self.c1, "c2": self.c2, "c3": self.c3}


@dataclass(frozen=True)
class SscRefutation:
    """Two first-level images of the attractor that share ``point``."""

    pair: tuple
    point: object

    @property
    def holds(self) -> bool:
        return False


@dataclass(frozen=True)
class SscIndeterminate:
    reason: str
    depth: int

    @property
    def holds(self) -> bool:
        return False


@dataclass(frozen=True)
class IfsSpec:
    maps: tuple
    hull: tuple
    separation: Optional[SeparationCertificate] = None
    name: str = ""

    def __post_init__(self):
        maps = tuple(self.maps)
        if len(maps) < 2:
            raise ValueError("an IFS needs at least two maps")
        kinds = {type(m) if not isinstance(m, (Similarity1D, Moebius1D)) else "1d" for m in maps}
        if len(kinds) != 1:
            raise ValueError("all maps must share kind and ambient dimension")
        object.__setattr__(self, "maps", maps)
        if self.is_sponge:
            bases = {m.bases for m in maps}
            if len(bases) != 1:
                raise ValueError("sponge maps must share bases")
            d = len(maps[0].bases)
            object.__setattr__(self, "hull", tuple((Fraction(0), Fraction(1)) for _ in range(d)))
            return
        lo, hi = (_q(v) for v in self.hull)
        if lo >= hi:
            raise ValueError("hull must be a nondegenerate interval")
        object.__setattr__(self, "hull", (lo, hi))
        for i, m in enumerate(maps):
            if isinstance(m, Moebius1D):
                dlo, dhi = m.domain
                if not (dlo <= lo and hi <= dhi):
                    raise ValueError(f"map {i}: hull not inside the Moebius domain")
            if _pole_in(m.matrix, lo, hi):
                raise ValueError(f"map {i}: pole inside the hull")
            ilo, ihi = _mob_image(m.matrix, lo, hi)
            if ilo < lo or ihi > hi:
                raise ValueError(f"map {i} does not send the hull into itself")
            if _mob_deriv_range(m.matrix, lo, hi)[1] >= 1:
                raise ValueError(f"map {i} is not a contraction on the hull")

    @property
    def size(self) -> int:
        return len(self.maps)

    @property
    def is_sponge(self) -> bool:
        return isinstance(self.maps[0], SpongeAffine)

    @property
    def is_similarity(self) -> bool:
        return all(m.is_similarity for m in self.maps)

    @property
    def matrices(self):
        return tuple(m.matrix for m in self.maps)

    def with_separation(self, cert) -> "IfsSpec":
        return IfsSpec(self.maps, self.hull, cert, self.name)

    @cached_property
    def attractor_hull(self) -> tuple:
        """Outer enclosure of conv F; exact for similarity systems."""
        if self.is_sponge:
            raise TypeError("attractor_hull is defined for 1-D systems")
        if self.is_similarity:
            got = _exact_similarity_hull(self.matrices)
            if got is not None:
                return got
        return _iterated_hull(self.matrices, self.hull)

    @cached_property
    def contraction(self) -> Fraction:
        lo, hi = self.hull
        return max(_mob_deriv_range(m, lo, hi)[1] for m in self.matrices)

    def to_json(self):
        return {"maps": [m.to_json() for m in self.maps],
                "hull": [str(v) for v in self.hull] if not self.is_sponge else None,
                "separation": self.separation.to_json() if self.separation else None}


def _exact_similarity_hull(mats):
    # conv F = [a, b] solves a = min_i min(phi_i(a), phi_i(b)), b = max_i max(...);
    # try every assignment of attaining map and endpoint, keep the consistent one
    for i, mi in enumerate(mats):
        for ei in (0, 1):
            for j, mj in enumerate(mats):
                for ej in (0, 1):
                    sol = _solve_endpoints(mi, ei, mj, ej)
                    if sol is None:
                        continue
                    a, b = sol
                    if a > b:
                        continue
                    imgs = [_mob_image(m, a, b) for m in mats]
                    if min(u for u, _ in imgs) == a and max(v for _, v in imgs) == b:
                        return (a, b)
    return None


def _solve_endpoints(mi, ei, mj, ej):
    # a = s_i * e_i + t_i, b = s_j * e_j + t_j with e in {a, b}
    si, ti = mi[0], mi[1]
    sj, tj = mj[0], mj[1]
    # unknowns (a, b): rows  a - si*[ei==0]a - si*[ei==1]b = ti
    r1 = [1 - (si if ei == 0 else 0), -(si if ei == 1 else 0), ti]
    r2 = [-(sj if ej == 0 else 0), 1 - (sj if ej == 1 else 0), tj]
    det = r1[0] * r2[1] - r1[1] * r2[0]
    if det == 0:
        return None
    a = (r1[2] * r2[1] - r1[1] * r2[2]) / det
    b = (r1[0] * r2[2] - r1[2] * r2[0]) / det
    return a, b


_HULL_BITS = 96


def _round_out(lo: Fraction, hi: Fraction):
    s = 1 << _HULL_BITS
    return (Fraction(math.floor(lo * s), s), Fraction(math.ceil(hi * s), s))


def _iterated_hull(mats, hull, max_iter=400):
    lo, hi = hull
    for _ in range(max_iter):
        imgs = [_mob_image(m, lo, hi) for m in mats]
        nlo, nhi = min(u for u, _ in imgs), max(v for _, v in imgs)
        nlo, nhi = _round_out(nlo, nhi)
        nlo, nhi = max(nlo, hull[0]), min(nhi, hull[1])
        if (nlo, nhi) == (lo, hi):
            break
        lo, hi = nlo, nhi
    return (lo, hi)


def _as_word(ifs: IfsSpec, w) -> SymbolWord:
    if isinstance(w, SymbolWord):
        if w.alphabet_size != ifs.size:
            raise ValueError("word alphabet does not match the IFS")
        return w
    return SymbolWord.of(w, ifs.size)


def _check_in_hull(ifs: IfsSpec, x):
    lo, hi = ifs.hull
    if not lo <= x <= hi:
        raise ValueError(f"point {x} outside the hull [{lo}, {hi}]")


def word_matrix(ifs: IfsSpec, w) -> tuple:
    """Matrix of phi_w = phi_{w_1} o ... o phi_{w_n}."""
    m = _IDENTITY
    mats = ifs.matrices
    for i in _as_word(ifs, w):
        m = _mat_mul(m, mats[i])
    return m


def apply_word(ifs: IfsSpec, w, x):
    """phi_{w_1} o ... o phi_{w_n} (x): the last letter acts first."""
    w = _as_word(ifs, w)
    if ifs.is_sponge:
        for i in reversed(w.symbols):
            x = ifs.maps[i](x)
        return x
    _check_in_hull(ifs, x)
    for i in reversed(w.symbols):
        x = ifs.maps[i](x)
    return x


def derivative_norm_along(ifs: IfsSpec, w, x):
    """|phi_w'(x)| by the chain rule along the orbit of x."""
    if ifs.is_sponge:
        raise TypeError("sponge maps are not conformal")
    w = _as_word(ifs, w)
    _check_in_hull(ifs, x)
    out = 1 if not isinstance(x, float) else 1.0
    for i in reversed(w.symbols):
        m = ifs.matrices[i]
        if isinstance(x, float):
            a, b, c, d = (float(v) for v in m)
            out *= abs(a * d - b * c) / (c * x + d) ** 2
            x = (a * x + b) / (c * x + d)
        else:
            out *= _mob_deriv_abs(m, x)
            x = _mob(m, x)
    return out


def sup_derivative_norm(ifs: IfsSpec, w) -> Bounds:
    """Enclosure of sup over the hull of |phi_w'|, by products over nested images."""
    if ifs.is_sponge:
        raise TypeError("sponge maps are not conformal")
    w = _as_word(ifs, w)
    lo_int, hi_int = ifs.hull
    lo = hi = Fraction(1)
    for i in reversed(w.symbols):
        m = ifs.matrices[i]
        dlo, dhi = _mob_deriv_range(m, lo_int, hi_int)
        lo *= dlo
        hi *= dhi
        lo_int, hi_int = _mob_image(m, lo_int, hi_int)
    return Bounds(lo, hi)


def fixed_point(ifs: IfsSpec, w, tol=1e-15):
    """Fixed point of phi_w.

    Exact for similarity systems; Banach iteration from the hull center
    otherwise, stopped once the a-priori bound rho^k diam <= tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = _as_word(ifs, w)
    if len(w) == 0:
        raise ValueError("fixed point of the empty word is not unique")
    if ifs.is_sponge:
        return _sponge_fixed_point(ifs, w)
    m = word_matrix(ifs, w)
    a, b, c, d = m
    if c == 0:
        # x = (a x + b) / d
        return b / (d - a)
    lo, hi = ifs.hull
    rho = float(sup_derivative_norm(ifs, w).hi)
    diam = float(hi - lo)
    n_iter = max(1, math.ceil(math.log(tol / diam) / math.log(rho))) if tol < diam else 1
    af, bf, cf, df = (float(v) for v in m)
    x = float(lo + hi) / 2
    for _ in range(n_iter):
        x = (af * x + bf) / (cf * x + df)
    return x


def _sponge_fixed_point(ifs, w):
    d = len(ifs.maps[0].bases)
    coords = []
    for q in range(d):
        # x = sum_k i_{k,q} n^{-k} + n^{-len} x
        n = ifs.maps[0].bases[q]
        s = sum(Fraction(ifs.maps[i].digits[q], n ** (k + 1)) for k, i in enumerate(w.symbols))
        coords.append(s / (1 - Fraction(1, n ** len(w))))
    return tuple(coords)


# --- separation ---------------------------------------------------------------

_MAX_COMPONENTS = 1 << 14


def _merge(intervals):
    intervals = sorted(intervals)
    out = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [tuple(v) for v in out]


def _set_gap(a, b):
    """Distance between two sorted interval unions; 0 when they meet."""
    best = None
    i = j = 0
    while i < len(a) and j < len(b):
        (alo, ahi), (blo, bhi) = a[i], b[j]
        if ahi < blo:
            g = blo - ahi
            i += 1
        elif bhi < alo:
            g = alo - bhi
            j += 1
        else:
            return Fraction(0), (max(alo, blo))
        if best is None or g < best[0]:
            best = (g, None)
    return best


def _distortion(ifs: IfsSpec):
    if ifs.is_similarity:
        lo, hi = ifs.attractor_hull
        diam = float(hi - lo)
        return 1.0, 1.0, max(1.0, 1.0 / diam, diam)
    lo, hi = ifs.hull
    k = 0.0
    for a, b, c, d in ifs.matrices:
        if c != 0:
            k = max(k, 2 * abs(float(c)) / min(abs(float(c * lo + d)), abs(float(c * hi + d))))
    rho = float(ifs.contraction)
    c1 = math.nextafter(math.exp(k * float(hi - lo) / (1 - rho)), math.inf)
    # two distinct points of F bound diam F from below
    x0 = fixed_point(ifs, (0,), 1e-15)
    x1 = fixed_point(ifs, (ifs.size - 1,), 1e-15)
    diam_lo = max(abs(x1 - x0) - 1e-12, 1e-300)
    alo, ahi = ifs.attractor_hull
    c3 = max(1.0, c1 / diam_lo, float(ahi - alo))
    return c1, c1, c3


def check_ssc(ifs: IfsSpec, max_depth: int = 40):
    """Certify or refute strong separation of the first-level images of F.

    Iterates S_{k+1} = U_j phi_j(S_k) from conv F.  Every endpoint of a
    component of S_k is a point of F, so a positive gap between the branch
    unions equals the true gap delta.  Returns a SeparationCertificate, an
    SscRefutation with a shared point, or SscIndeterminate.
    """
    if ifs.is_sponge:
        from .sponge import SpongeSpec, check_vssc

        spec = SpongeSpec.from_ifs(ifs)
        ok, witness = check_vssc(spec)
        if ok:
            return SeparationCertificate("VSSC")
        return SscRefutation(witness, None)
    mats = ifs.matrices
    level = [ifs.attractor_hull]
    exact_hull = ifs.is_similarity and _exact_similarity_hull(mats) is not None
    for depth in range(max_depth + 1):
        branches = [_merge([_mob_image(m, lo, hi) for lo, hi in level]) for m in mats]
        gaps = {}
        touching = None
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                g, where = _set_gap(branches[i], branches[j])
                if g == 0:
                    touching = (i, j, where)
                    break
                gaps[(i, j)] = g
            if touching:
                break
        if touching is None:
            delta = min(gaps.values())
            c1, c2, c3 = _distortion(ifs)
            pair = min(gaps, key=gaps.get)
            if exact_hull:
                dbounds = Bounds(delta, delta)
            else:
                dbounds = Bounds(delta, max(delta, _inner_gap(ifs, depth)))
            return SeparationCertificate("SSC", dbounds, c1, c2, c3, witness=pair)
        i, j, _ = touching
        shared = _shared_endpoint(branches[i], branches[j])
        if exact_hull and shared is not None:
            return SscRefutation((i, j), shared)
        nxt = _merge([iv for b in branches for iv in b])
        if exact_hull and nxt == level:
            # S_k is invariant, hence equal to F, and the branch images truly overlap
            return SscRefutation((i, j), touching[2])
        if len(nxt) > _MAX_COMPONENTS:
            return SscIndeterminate("component budget exhausted", depth)
        level = nxt
    return SscIndeterminate("branch enclosures still meet at maximum depth", max_depth)


def _inner_gap(ifs: IfsSpec, depth: int):
    # same iteration from the hull of two approximate points of F; an estimate
    # of the gap from above, not certified
    pts = [Fraction(fixed_point(ifs, (i,), 1e-15)) for i in range(ifs.size)]
    level = [(min(pts), max(pts))]
    for _ in range(depth):
        level = _merge([_mob_image(m, lo, hi) for m in ifs.matrices for lo, hi in level])
    branches = [_merge([_mob_image(m, lo, hi) for lo, hi in level]) for m in ifs.matrices]
    return min(_set_gap(branches[i], branches[j])[0]
               for i in range(ifs.size) for j in range(i + 1, ifs.size))


def _shared_endpoint(a, b):
    ends_a = {v for iv in a for v in iv}
    for iv in b:
        for v in iv:
            if v in ends_a:
                return v
    return None


def declare_osc(ifs: IfsSpec) -> IfsSpec:
    """Attach a user-declared open set condition (not verified)."""
    return ifs.with_separation(SeparationCertificate("OSC"))


# --- factories ----------------------------------------------------------------

def similarity_system(ratios: Sequence, translations: Sequence, signs: Sequence = None,
                      hull=(0, 1), certify=True, name="") -> IfsSpec:
    signs = signs or [1] * len(ratios)
    maps = [Similarity1D(r, s, t) for r, s, t in zip(ratios, signs, translations)]
    ifs = IfsSpec(tuple(maps), tuple(hull), None, name)
    if certify:
        cert = check_ssc(ifs)
        if isinstance(cert, SeparationCertificate):
            ifs = ifs.with_separation(cert)
    return ifs


def cantor_system() -> IfsSpec:
    return similarity_system([Fraction(1, 3)] * 2, [0, Fraction(2, 3)], name="cantor")


def moebius_system(coeffs: Sequence, hull=(0, 1), certify=True, name="") -> IfsSpec:
    """Moebius IFS from (a, b, c, d) tuples on the given hull."""
    lo, hi = hull
    maps = [Moebius1D(a, b, c, d, (lo, hi)) for a, b, c, d in coeffs]
    ifs = IfsSpec(tuple(maps), (lo, hi), None, name)
    if certify:
        cert = check_ssc(ifs)
        if isinstance(cert, SeparationCertificate):
            ifs = ifs.with_separation(cert)
    return ifs
