"""Closed-form Assouad dimensions and finite-scale estimators.

Closed forms return exact prime-log expressions alongside floats.  The
estimators work on a geometric scale grid R = b^-a, r = b^-(a+g) (b = 2 by
default) and build every exponent from certified ball enclosures: an upper
exponent uses hi(R) over lo(r), a lower one lo(R) over hi(r).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence

from . import exact as ex
from .bounds import Bounds
from .errors import DoublingGuardError, ResolutionError, SeparationError
from .measures import ConstantWeights, IfsMeasure, support_point_near
from .sponge import SpongeSpec, check_vssc, conditional_prob, reference_carpet
from .symbolic import enumerate_periodic
from .systems import (IfsSpec, SscRefutation, check_ssc, derivative_norm_along,
                      fixed_point)

__all__ = [
    "DimReport",
    "ProfileEntry",
    "ScaleProfile",
    "LocalDims",
    "DoublingScan",
    "assouad_selfsimilar_formula",
    "selfsimilar_formula_for",
    "assouad_place_dependent",
    "bm_assouad_formula",
    "bm_minkowski_formula",
    "estimate_pointwise_assouad",
    "estimate_local_dims",
    "doubling_scan",
    "osc_guard",
    "minkowski_upper_estimate",
]


@dataclass
class DimReport:
    value: float
    method: str
    enclosure: Optional[Bounds] = None
    witness: object = None
    parameters: dict = field(default_factory=dict)
    exact: Optional[str] = None
    extras: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        from .errors import _jsonable

        return {
            "value": self.value,
            "enclosure": None if self.enclosure is None else
            {"lo": float(self.enclosure.lo), "hi": float(self.enclosure.hi)},
            "witness": _jsonable(self.witness),
            "method": self.method,
            "parameters": _jsonable(self.parameters),
            "exact": self.exact,
            "extras": _jsonable(self.extras),
            "flags": list(self.flags),
            "trace": _jsonable(self.trace),
        }


def _log2(q) -> float:
    if isinstance(q, Fraction):
        return math.log2(q.numerator) - math.log2(q.denominator)
    if isinstance(q, int):
        return math.log2(q)
    return math.log2(float(q))


def _argmax_log_ratio(pairs):
    """Index of the largest log(a)/log(b), ties to the first."""
    best = 0
    for i in range(1, len(pairs)):
        if ex.compare_log_ratios(*pairs[i], *pairs[best]) > 0:
            best = i
    return best


def _exact_str(a, b) -> Optional[str]:
    try:
        return ex.display(ex.log_ratio(a, b))
    except (OverflowError, ValueError):
        return None


# --- self-similar ------------------------------------------------------------

def assouad_selfsimilar_formula(p: Sequence, r: Sequence) -> DimReport:
    """max_i log p_i / log r_i with its arg-max letter."""
    if len(p) != len(r):
        raise ValueError("probability and ratio vectors differ in length")
    p = [Fraction(v) if not isinstance(v, float) else v for v in p]
    r = [Fraction(v) if not isinstance(v, float) else v for v in r]
    for pi, ri in zip(p, r):
        if not (0 < pi < 1 and 0 < ri < 1):
            raise ValueError("p_i and r_i must lie in (0,1)")
    exact = all(isinstance(v, Fraction) for v in p + r)
    if exact:
        if sum(p) != 1:
            raise ValueError("probabilities must sum to 1")
        i = _argmax_log_ratio(list(zip(p, r)))
        expr = ex.log_ratio(p[i], r[i])
        return DimReport(ex.evaluate(expr), "selfsimilar_formula", witness={"letter": i},
                         parameters={"p": p, "r": r}, exact=ex.display(expr))
    vals = [math.log(pi) / math.log(ri) for pi, ri in zip(p, r)]
    i = max(range(len(vals)), key=lambda k: (vals[k], -k))
    return DimReport(vals[i], "selfsimilar_formula", witness={"letter": i}, parameters={"p": p, "r": r})


def _junction_points(ifs: IfsSpec) -> list:
    cert = check_ssc(ifs)
    if isinstance(cert, SscRefutation) and cert.point is not None:
        return [cert.point]
    lo, hi = ifs.attractor_hull
    return [(lo + hi) / 2]


def osc_guard(m: IfsMeasure, depth: int = 24, start: int = 8, window: int = 4,
              threshold: float = 1.4, samples=None) -> "DoublingScan":
    """Doubling scan near the junction of first-level images; raises on growth."""
    samples = samples if samples is not None else _junction_points(m.ifs)
    scan = doubling_scan(m, samples, depth, start=start, window=window, threshold=threshold)
    if scan.trend == "growth":
        raise DoublingGuardError(
            "doubling scan shows unbounded growth; the self-similar formula does not apply",
            witness=scan.witness, min_growth=scan.min_growth, max_ratio=scan.max_ratio)
    return scan


def selfsimilar_formula_for(m: IfsMeasure, guard_depth: int = 24, guard_start: int = 8,
                            threshold: float = 1.4) -> DimReport:
    """Formula for a Bernoulli measure on a similarity system.

    SSC systems get the value directly; OSC-declared systems must first pass
    the doubling guard.
    """
    ifs = m.ifs
    if not ifs.is_similarity or not isinstance(m.weights, ConstantWeights):
        raise TypeError("the self-similar formula needs constant weights on similarities")
    sep = ifs.separation
    if sep is None:
        raise SeparationError("no separation certificate (SSC or declared OSC) attached")
    ratios = [abs(mat[0]) for mat in ifs.matrices]
    params = {}
    if sep.kind == "OSC":
        scan = osc_guard(m, guard_depth, guard_start, threshold=threshold)
        params["guard"] = {"max_ratio": scan.max_ratio, "min_growth": scan.min_growth}
    rep = assouad_selfsimilar_formula(m.weights.p, ratios)
    rep.method = "selfsimilar_formula_" + sep.kind.lower()
    rep.parameters.update(params)
    return rep


# --- place-dependent weights -------------------------------------------------

def assouad_place_dependent(ifs: IfsSpec, weights, max_period: int) -> DimReport:
    """s_N = max over periodic words of minimal period <= N of log pbar_w / log |phi_w'|.

    pbar_w = prod_k p_{w_k}(pi(sigma^k w)); orbit points are fixed points of
    the rotated blocks.  The report trace lists s_1 <= ... <= s_N.
    """
    if max_period < 1:
        raise ValueError("max_period must be at least 1")
    if ifs.separation is None or ifs.separation.kind != "SSC":
        raise SeparationError("the periodic-orbit formula needs an SSC certificate")
    if weights.size != ifs.size:
        raise ValueError("weight count differs from map count")
    exact = ifs.is_similarity and not isinstance(weights.value(0, Fraction(0)), float)
    tol = 1e-15
    best = None  # (pbar, deriv, word)
    best_val = None
    trace, pairs = [], []
    words = enumerate_periodic(ifs.size, max_period)
    idx = 0
    for N in range(1, max_period + 1):
        while idx < len(words) and words[idx].period == N:
            w = words[idx]
            idx += 1
            n = w.period
            orbit = [fixed_point(ifs, w.rotate(k).block, tol) for k in range(n)]
            pbar = Fraction(1) if exact else 1.0
            for k in range(n):
                # letter w_{k+1} (0-based k) is weighted at pi(sigma^{k+1} w)
                pbar *= weights.value(w.block[k], orbit[(k + 1) % n])
            deriv = derivative_norm_along(ifs, w.block, orbit[0])
            if exact:
                if best is None or ex.compare_log_ratios(pbar, deriv, best[0], best[1]) > 0:
                    best = (pbar, deriv, w)
            else:
                v = math.log(float(pbar)) / math.log(float(deriv))
                if best_val is None or v > best_val:
                    best_val = v
                    best = (pbar, deriv, w)
        if exact:
            trace.append(_float_log_ratio(best[0], best[1]))
            pairs.append((best[0], best[1], str(best[2])))
        else:
            trace.append(best_val)
    pbar, deriv, w = best
    rep = DimReport(trace[-1], "place_dependent_periodic", witness={"word": str(w)},
                    parameters={"max_period": max_period, "words": len(words)},
                    trace=trace)
    if exact:
        rep.extras["pbar"] = pbar
        rep.extras["derivative"] = deriv
        rep.extras["trace_pairs"] = pairs
        rep.exact = _exact_str(pbar, deriv)
    return rep


def _float_log_ratio(a, b) -> float:
    import mpmath

    with mpmath.workdps(40):
        a, b = Fraction(a), Fraction(b)
        v = mpmath.log(mpmath.mpf(a.numerator) / a.denominator) / mpmath.log(mpmath.mpf(b.numerator) / b.denominator)
        return float(v)


# --- Bedford-McMullen ----------------------------------------------------------

def _require_vssc(spec: SpongeSpec):
    ok, witness = check_vssc(spec)
    if not ok:
        raise SeparationError("very strong separation fails", witness=witness)


def bm_assouad_formula(spec: SpongeSpec) -> DimReport:
    """sum over axes q of max over digits of -log p_q(i) / log n_q."""
    _require_vssc(spec)
    total = 0
    witnesses = []
    for q in range(1, spec.dim + 1):
        n = spec.bases[q - 1]
        cands = [(conditional_prob(spec, dv, q), Fraction(1, n)) for dv in spec.digits]
        # -log p / log n = log p / log(1/n)
        i = _argmax_log_ratio(cands)
        witnesses.append({"axis": q, "digit": spec.digits[i], "p_q": cands[i][0]})
        total = total + ex.log_ratio(cands[i][0], Fraction(1, n))
    rep = DimReport(ex.evaluate(total), "bm_assouad_formula", witness=witnesses,
                    parameters={"bases": spec.bases}, exact=ex.display(total))
    rep.extras["expr"] = total
    if spec.dim == 2:
        alt = _bm_display_literal(spec)
        rep.extras["display_literal"] = {"value": ex.evaluate(alt), "exact": ex.display(alt)}
        if not ex.exact_equal(alt, total):
            rep.flags.append("display_literal_differs")
    return rep


def _neglog_over(p: Fraction, n: int):
    return ex.log_ratio(p, Fraction(1, n))


def _max_expr(exprs):
    vals = [ex.evaluate(e, 40) for e in exprs]
    i = max(range(len(vals)), key=lambda k: (vals[k], -k))
    return exprs[i], i


def _bm_display_literal(spec: SpongeSpec):
    # the two-axis display with n_1, n_2 substituted as given:
    # max (-log p_i + log p_1(i)) / log n_1 + max -log p_1(i) / log n_2
    n1, n2 = spec.bases
    first = [(-ex.log_expr(spec.probs[k]) + ex.log_expr(conditional_prob(spec, dv, 1))) / ex.log_expr(n1)
             for k, dv in enumerate(spec.digits)]
    second = [_neglog_over(conditional_prob(spec, dv, 1), n2) for dv in spec.digits]
    return _max_expr(first)[0] + _max_expr(second)[0]


MINKOWSKI_REFERENCE = "1 + log(2)/log(3)"


def bm_minkowski_formula(spec: SpongeSpec) -> DimReport:
    """Upper Minkowski dimension of a carpet measure (d = 2).

    value: max_i -log p_i / log n_2 + max_i -log p_1(i) (1/log n_1 - 1/log n_2),
    the worst-case approximate-cube exponent; it is the displayed formula
    with its larger base read as the finer axis.  Both parses of the display
    with the bases substituted literally are reported as variants and flagged
    when they disagree with the value.
    """
    if spec.dim != 2:
        raise ValueError("the Minkowski formula is implemented for carpets (d = 2)")
    _require_vssc(spec)
    n1, n2 = spec.bases
    L1, L2 = ex.log_expr(n1), ex.log_expr(n2)
    p1 = [conditional_prob(spec, dv, 1) for dv in spec.digits]
    full = [-ex.log_expr(p) for p in spec.probs]
    col = [-ex.log_expr(p) for p in p1]
    value, i_full = _max_expr([f / L2 for f in full])
    second, i_col = _max_expr([c * (1 / L1 - 1 / L2) for c in col])
    value = value + second
    # literal parses
    a_first, _ = _max_expr([f / L1 for f in full])
    parse_a = a_first + _max_expr([-c * (1 / L1 - 1 / L2) for c in col])[0]
    parse_b = (a_first + _max_expr([-c / L1 for c in col])[0]
               + _max_expr([c / L2 for c in col])[0])
    rep = DimReport(ex.evaluate(value), "bm_minkowski_formula",
                    witness={"full": spec.digits[i_full], "column": spec.digits[i_col]},
                    parameters={"bases": spec.bases}, exact=ex.display(value))
    rep.extras["expr"] = value
    for name, e in (("parse_literal_joint", parse_a), ("parse_literal_split", parse_b)):
        rep.extras[name] = {"value": ex.evaluate(e), "exact": ex.display(e)}
        if not ex.exact_equal(e, value):
            rep.flags.append(f"{name}_differs")
    if spec == reference_carpet():
        ref = 1 + ex.log_ratio(2, 3)
        rep.extras["reference"] = {"value": ex.evaluate(ref), "exact": MINKOWSKI_REFERENCE}
        if not ex.exact_equal(ref, value):
            rep.flags.append("reference_differs")
    return rep


# --- estimators ----------------------------------------------------------------

@dataclass(frozen=True)
class ProfileEntry:
    g: int
    theta_lo: float
    theta_hi: float
    a_lo: int
    a_hi: int


@dataclass
class ScaleProfile:
    entries: List[ProfileEntry]
    base: object = 2

    def __getitem__(self, g) -> ProfileEntry:
        for e in self.entries:
            if e.g == g:
                return e
        raise KeyError(g)

    @property
    def max_gap(self) -> int:
        return self.entries[-1].g

    def csv_rows(self):
        yield ("g", "theta_lo", "theta_hi", "witness_a_lo", "witness_a_hi")
        for e in self.entries:
            yield (e.g, repr(e.theta_lo), repr(e.theta_hi), e.a_lo, e.a_hi)


def _map(fn, items, threads):
    items = list(items)
    if threads and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(v) for v in items]


def _ball_profile(m, x, depth, base, threads=None) -> list:
    base = Fraction(base) if not isinstance(base, float) else base

    def one(j):
        r = Fraction(1, 1) / base ** j if isinstance(base, Fraction) else base ** (-j)
        return m.ball_measure(x, r)

    return _map(one, range(depth + 1), threads)


def _ratio_log(num, den) -> float:
    if isinstance(num, Fraction) and isinstance(den, Fraction):
        return _log2(num / den)
    return _log2(num) - _log2(den)


def estimate_pointwise_assouad(m, x, depth: int, min_gap: int, base=2, threads=None):
    """Scale profile of ratio exponents at x and the report at the largest gap.

    theta_hi(g) = max_a log_b(hi(b^-a) / lo(b^-(a+g))) / g and theta_lo(g)
    swaps the roles of lo and hi.  The report value is theta_lo at g = depth,
    its enclosure top theta_hi there; ``extras['theta_hi_tail']`` is the
    largest theta_hi over the last quarter of gaps.
    """
    if not depth > min_gap >= 1:
        raise ValueError("need depth > min_gap >= 1")
    balls = _ball_profile(m, x, depth, base, threads)
    zero = [j for j, b in enumerate(balls) if b.lo == 0]
    if zero:
        raise ResolutionError("ball lower bound is 0; measure resolution exhausted",
                              point=x, scales=zero)
    lb = _log2(Fraction(base)) if not isinstance(base, float) else math.log2(base)
    entries = []
    for g in range(min_gap, depth + 1):
        hi_best = lo_best = None
        for a in range(0, depth - g + 1):
            up_ = _ratio_log(balls[a].hi, balls[a + g].lo) / (g * lb)
            dn_ = _ratio_log(balls[a].lo, balls[a + g].hi) / (g * lb)
            if hi_best is None or up_ > hi_best[0]:
                hi_best = (up_, a)
            if lo_best is None or dn_ > lo_best[0]:
                lo_best = (dn_, a)
        entries.append(ProfileEntry(g, lo_best[0], hi_best[0], lo_best[1], hi_best[1]))
    profile = ScaleProfile(entries, base)
    last = entries[-1]
    k = max(1, math.ceil(len(entries) / 4))
    tail = entries[-k:]
    rep = DimReport(last.theta_lo, "pointwise_assouad_estimate",
                    enclosure=Bounds(last.theta_lo, last.theta_hi),
                    witness={"point": x, "a": last.a_lo, "g": last.g},
                    parameters={"depth": depth, "min_gap": min_gap, "base": base})
    rep.extras["theta_hi_tail"] = max(e.theta_hi for e in tail)
    rep.extras["theta_lo_tail"] = max(e.theta_lo for e in tail)
    return profile, rep


class LocalDims(NamedTuple):
    lower: float
    upper: float
    sequence: list


def estimate_local_dims(m, x, depth: int, tail: float = 0.25, threads=None) -> LocalDims:
    """q_k = log mu(B(x, 2^-k)) / log 2^-k from enclosure midpoints; min and
    max over the last ``tail`` fraction of k = 1..depth."""
    if depth < 4:
        raise ValueError("depth must be at least 4")
    balls = _ball_profile(m, x, depth, 2, threads)
    seq = []
    for k in range(1, depth + 1):
        mid = balls[k].mid()
        if mid == 0:
            raise ResolutionError("zero-measure ball", point=x, k=k)
        seq.append(-_log2(mid) / k)
    n = max(1, math.ceil(depth * tail))
    last = seq[-n:]
    return LocalDims(min(last), max(last), seq)


@dataclass
class DoublingScan:
    rows: list              # (center, k, ratio_lo, ratio_hi)
    levels: list            # (k, best ratio_lo, best ratio_hi, arg center)
    max_ratio: object
    witness: dict
    growth: list            # (k, C(k + window) / C(k))
    min_growth: Optional[float]
    trend: str
    parameters: dict

    def csv_rows(self):
        yield ("center", "k", "r", "ratio_lo", "ratio_hi")
        for c, k, lo, hi in self.rows:
            yield (str(c), k, f"1/{2 ** k}", str(lo), str(hi))


def _stencil(m, x, r) -> list:
    if not isinstance(m, IfsMeasure):
        return [x]
    pts = [x]
    for s in (-1, 1, Fraction(-1, 2), Fraction(1, 2)):
        c = support_point_near(m, x + s * r)
        if c not in pts:
            pts.append(c)
    return pts


def doubling_scan(m, sample_points, depth: int, start: int = 1, window: int = 4,
                  threshold: float = 1.4, stencil=None, threads=None) -> DoublingScan:
    """mu(B(c, 2r)) / mu(B(c, r)) over centers c and r = 2^-k, start <= k <= depth.

    For IFS measures each sample x also probes points of F near x +- r and
    x +- r/2 (the ratio at x itself can stay bounded while nearby centers
    blow up).  C(k) is the running maximum of the certified lower ratio; the
    trend is "growth" when C(k + window) / C(k) >= threshold throughout.
    """
    samples = list(sample_points)
    if not samples:
        raise ValueError("need at least one sample point")
    if stencil is None:
        stencil = isinstance(m, IfsMeasure)

    def level(k):
        r = Fraction(1, 2 ** k)
        out = []
        for x in samples:
            centers = _stencil(m, x, r) if stencil else [x]
            for c in centers:
                big, small = m.ball_measure(c, 2 * r), m.ball_measure(c, r)
                lo = big.lo / small.hi if small.hi > 0 else math.inf
                hi = big.hi / small.lo if small.lo > 0 else math.inf
                out.append((c, k, lo, hi))
        return out

    rows = [row for rs in _map(level, range(start, depth + 1), threads) for row in rs]
    levels = []
    for k in range(start, depth + 1):
        rs = [row for row in rows if row[1] == k]
        best = max(rs, key=lambda t: t[2])
        levels.append((k, best[2], max(t[3] for t in rs), best[0]))
    running, cur = [], None
    for k, lo, _, c in levels:
        if cur is None or lo > cur[0]:
            cur = (lo, c, k)
        running.append(cur)
    growth = []
    for i in range(len(levels) - window):
        a, b = running[i][0], running[i + window][0]
        growth.append((levels[i][0], float(b / a) if a else math.inf))
    min_growth = min((f for _, f in growth), default=None)
    trend = "growth" if growth and min_growth >= threshold else "plateau"
    top = running[-1]
    return DoublingScan(rows, levels, top[0], {"center": top[1], "k": top[2]}, growth,
                        min_growth, trend,
                        {"depth": depth, "start": start, "window": window, "threshold": threshold})


def minkowski_upper_estimate(m, samples, depth: int, tail: float = 0.25, threads=None) -> DimReport:
    """max over samples and the last ``tail`` of k of -log2 lo(mu(B(x, 2^-k))) / k."""
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample point")
    n = max(1, math.ceil(depth * tail))
    ks = list(range(depth - n + 1, depth + 1))
    best = None

    def one(x):
        out = []
        for k in ks:
            lo = m.ball_measure(x, Fraction(1, 2 ** k)).lo
            if lo == 0:
                raise ResolutionError("zero lower bound for a ball mass", point=x, k=k)
            out.append((-_log2(lo) / k, x, k))
        return out

    for vals in _map(one, samples, threads):
        for v in vals:
            if best is None or v[0] > best[0]:
                best = v
    return DimReport(best[0], "minkowski_upper_estimate", witness={"point": best[1], "k": best[2]},
                     parameters={"depth": depth, "tail": tail, "samples": len(samples)})
