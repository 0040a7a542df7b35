"""Pinned experiments for the headline claims, each with a reference and tolerance.

``run_target(name)`` returns a ``TargetResult`` whose ``passed`` flag compares
the computed value with the recorded reference.  Every target is
deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict

from . import exact as ex
from .dims import (assouad_place_dependent, assouad_selfsimilar_formula, bm_assouad_formula,
                   doubling_scan, estimate_local_dims, estimate_pointwise_assouad,
                   selfsimilar_formula_for)
from .errors import DoublingGuardError
from .gallery import (doubling_witness_ratio, hausdorff_distance_to_unit_interval,
                      sparse_doubling, two_sided_geometric, weak_tangent_snapshot)
from .measures import (ConstantWeights, IfsMeasure, LinearWeights, make_rng,
                       sample_typical_points)
from .ruelle import chaos_game_sample, ruelle_iterate
from .sponge import (SpongeMeasure, approx_cube_measure, check_vssc, enumerate_cubes,
                     reference_carpet, sandwich_check)
from .systems import cantor_system, declare_osc, moebius_system, similarity_system

__all__ = ["TargetResult", "TARGETS", "run_target", "builtin_measures", "random_ssc_system",
           "gibbs_cantor", "typical_points", "nesting_queries"]


@dataclass
class TargetResult:
    target: str
    passed: bool
    value: object
    reference: object
    tolerance: object
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {"target": self.target, "passed": self.passed, "value": self.value,
                "reference": self.reference, "tolerance": self.tolerance,
                "details": self.details}


# --- shared fixtures -----------------------------------------------------------

def gibbs_cantor() -> IfsMeasure:
    """Cantor-1/3 with p_0(x) = 2/5 + x/5, p_1(x) = 3/5 - x/5."""
    w = LinearWeights((Fraction(2, 5), Fraction(3, 5)), (Fraction(1, 5), Fraction(-1, 5)))
    return IfsMeasure(cantor_system(), w, name="gibbs_cantor")


def halves_osc(p=(Fraction(1, 3), Fraction(2, 3))) -> IfsMeasure:
    ifs = declare_osc(similarity_system([Fraction(1, 2)] * 2, [0, Fraction(1, 2)], certify=False))
    return IfsMeasure(ifs, ConstantWeights(tuple(p)), name="halves")


def builtin_measures() -> dict:
    cantor = cantor_system()
    gauss = moebius_system([(0, 1, 1, 2), (0, 1, 1, 3)], hull=(0, 1), name="moebius")
    return {
        "cantor_uniform": IfsMeasure(cantor, ConstantWeights((Fraction(1, 2),) * 2), "cantor_uniform"),
        "cantor_biased": IfsMeasure(cantor, ConstantWeights((Fraction(1, 4), Fraction(3, 4))), "cantor_biased"),
        "gibbs_cantor": gibbs_cantor(),
        "moebius": IfsMeasure(gauss, ConstantWeights((Fraction(1, 2),) * 2), "moebius"),
        "halves_uniform": halves_osc((Fraction(1, 2), Fraction(1, 2))),
        "reference_carpet": SpongeMeasure(reference_carpet(), "reference_carpet"),
        "two_sided_geometric": two_sided_geometric(),
        "sparse_doubling": sparse_doubling(),
    }


def random_ssc_system(seed: int):
    """A random similarity system with rational data, certified SSC, and rational weights."""
    rng = make_rng(seed)
    while True:
        n = int(rng.integers(2, 4))
        ratios = [Fraction(1, int(rng.integers(n + 1, 3 * n + 2))) for _ in range(n)]
        slack = 1 - sum(ratios)
        if slack <= 0:
            continue
        # n + 1 gaps with positive rational shares
        shares = [int(v) for v in rng.integers(1, 6, size=n - 1)]
        gaps = [slack * Fraction(s, sum(shares)) for s in shares]
        trans, pos = [], Fraction(0)
        for i, r in enumerate(ratios):
            trans.append(pos)
            pos += r + (gaps[i] if i < n - 1 else 0)
        ifs = similarity_system(ratios, trans)
        if ifs.separation is None:
            continue
        raw = [int(v) for v in rng.integers(1, 10, size=n)]
        p = tuple(Fraction(v, sum(raw)) for v in raw)
        return ifs, p


def typical_points(m: IfsMeasure, count: int, depth: int, seed: int = 0) -> list:
    """mu-typical points conditioned on the cylinder [0^m], m = ceil(depth log 2 / log(1/r_0)).

    The cylinder is about as wide as the smallest dyadic scale, so the gap
    of ``depth`` levels spans the ball where the extreme letter dominates.
    """
    r0 = abs(m.ifs.matrices[0][0] / m.ifs.matrices[0][3])
    mlen = math.ceil(depth * math.log(2) / -math.log(float(r0)))
    return sample_typical_points(m, count, seed, prefix=(0,) * mlen)


# --- targets -----------------------------------------------------------------------

def _doubling_refutation():
    g = two_sided_geometric()
    bad = []
    for k in range(1, 21):
        q = doubling_witness_ratio(g, k)
        if q != 1 + Fraction(4, 9) * Fraction(3, 2) ** k:
            bad.append(k)
    return TargetResult("doubling-refutation", not bad, {"mismatches": bad},
                        "1 + (4/9)(3/2)^k for k = 1..20", 0)


def _pointwise_doubling_zero():
    g = two_sided_geometric()
    ratios = []
    for j in range(0, 25):
        r = Fraction(1, 2 ** j)
        a, b = g.ball(0, 2 * r), g.ball(0, r)
        if not (a.exact and b.exact):
            return TargetResult("pointwise-doubling-zero", False, None, 8, 0, {"unresolved": j})
        ratios.append(a.value / b.value)
    return TargetResult("pointwise-doubling-zero", max(ratios) <= 8, max(ratios), 8, 0)


def _ssc_formula():
    cantor = cantor_system()
    p = (Fraction(1, 4), Fraction(3, 4))
    m = IfsMeasure(cantor, ConstantWeights(p))
    rep = selfsimilar_formula_for(m)
    s_ref = ex.log_ratio(4, 3)
    exact_ok = ex.exact_equal(rep_expr(rep, p, m), s_ref)
    s = ex.evaluate(s_ref)
    rows = []
    ok = exact_ok
    for x in typical_points(m, 5, 30, seed=3):
        _, pr = estimate_pointwise_assouad(m, x, 30, 10)
        lo, hi = pr.enclosure.lo, pr.enclosure.hi
        rows.append({"theta_lo": lo, "theta_hi": hi})
        ok &= lo >= s - 0.08 and hi <= s + 0.08
    return TargetResult("ssc-formula", ok, {"formula": rep.exact, "estimates": rows},
                        "log(4)/log(3)", 0.08)


def rep_expr(rep, p, m):
    i = rep.witness["letter"]
    return ex.log_ratio(p[i], abs(m.ifs.matrices[i][0]))


def _osc_guard():
    m = halves_osc()
    scan = doubling_scan(m, [Fraction(1, 2)], 24, start=8, window=4, threshold=1.4)
    refused = False
    try:
        selfsimilar_formula_for(m)
    except DoublingGuardError:
        refused = True
    ok = scan.trend == "growth" and refused
    return TargetResult("osc-guard", ok, {"min_growth": scan.min_growth, "refused": refused},
                        "growth >= 1.4 per 4 levels and refusal", 1.4)


def _constant_weight_reduction():
    ok = True
    details = []
    for seed in range(3):
        ifs, p = random_ssc_system(seed)
        ratios = [abs(mm[0]) for mm in ifs.matrices]
        ref = assouad_selfsimilar_formula(p, ratios)
        i = ref.witness["letter"]
        target = ex.log_ratio(p[i], ratios[i])
        rep = assouad_place_dependent(ifs, ConstantWeights(p), 8)
        eq = [ex.exact_equal(ex.log_ratio(P, R), target) for P, R, _ in rep.extras["trace_pairs"]]
        ok &= all(eq)
        details.append({"ratios": ratios, "p": p, "formula": ref.exact, "all_equal": all(eq)})
    return TargetResult("constant-weight-reduction", ok, details, "max_i log p_i / log r_i", 0)


def _bm_example():
    spec = reference_carpet()
    rep = bm_assouad_formula(spec)
    ref = 2 + ex.log_ratio(2, 3)
    vssc, _ = check_vssc(spec)
    same = ex.exact_equal(rep.extras["expr"], ref)
    return TargetResult("bm-example", same and vssc,
                        {"value": rep.exact, "float": rep.value, "vssc": vssc,
                         "flags": rep.flags},
                        "2 + log(2)/log(3)", 0,
                        {"reference_float": ex.evaluate(ref)})


def _cube_partition():
    spec = reference_carpet()
    m = SpongeMeasure(spec)
    sums = {}
    for k in range(4):
        sums[k] = sum((approx_cube_measure(spec, w, k) for w in enumerate_cubes(spec, k)), Fraction(0))
    rng = make_rng(11)
    checks = []
    for _ in range(10):
        w = tuple(int(v) for v in rng.integers(0, spec.size, size=16))
        for k in range(4):
            checks.append(sandwich_check(m, w, k)["ok"])
    ok = all(v == 1 for v in sums.values()) and all(checks)
    return TargetResult("cube-partition", ok, {"sums": sums, "sandwiches_ok": all(checks)}, 1, 0)


def _ruelle_consistency():
    m = gibbs_cantor()
    res = ruelle_iterate(m.ifs, m.weights, lambda x: x, tol=1e-9)
    cg = chaos_game_sample(m.ifs, m.weights, 10 ** 6, seed=2024, depth=2)
    z = abs(cg.mean - res.value) / (cg.stderr + res.error)
    mono = all(b <= a for a, b in zip(res.trace, res.trace[1:]))
    return TargetResult("ruelle-consistency", z <= 3 and mono,
                        {"ruelle": res.value, "chaos": cg.mean, "combined_errors": z,
                         "trace_nonincreasing": mono}, "agreement within 3 errors", 3)


def brute_force_supremum(m: IfsMeasure, max_len: int) -> float:
    """max over all blocks of length <= max_len (not only Lyndon words),
    each fixed point solved from x = r x + t exactly."""
    from itertools import product

    ifs = m.ifs
    best = -math.inf
    for n in range(1, max_len + 1):
        for block in product(range(ifs.size), repeat=n):
            # orbit points: fixed points of every rotation
            orbit = []
            for k in range(n):
                rot = block[k:] + block[:k]
                a, b = Fraction(1), Fraction(0)  # composite x -> a x + b, last letter first
                for i in reversed(rot):
                    ma = ifs.matrices[i]
                    ri, ti = ma[0] / ma[3], ma[1] / ma[3]
                    a, b = ri * a, ri * b + ti
                orbit.append(b / (1 - a))
            pbar = Fraction(1)
            deriv = Fraction(1)
            for k in range(n):
                pbar *= m.weights.value(block[k], orbit[(k + 1) % n])
                deriv *= abs(ifs.matrices[block[k]][0] / ifs.matrices[block[k]][3])
            best = max(best, math.log(pbar) / math.log(deriv))
    return best


def _periodic_supremum():
    m = gibbs_cantor()
    rep = assouad_place_dependent(m.ifs, m.weights, 8)
    tr = rep.trace
    oracle = brute_force_supremum(m, 6)
    mono = all(b >= a for a, b in zip(tr, tr[1:]))
    ok = mono and tr[7] - tr[5] <= 0.01 and abs(tr[5] - oracle) <= 1e-12
    return TargetResult("periodic-supremum", ok, {"trace": tr, "oracle_s6": oracle}, "s_8 - s_6 <= 0.01", 1e-12)


def _weak_tangent():
    bad = [n for n in range(1, 65)
           if hausdorff_distance_to_unit_interval(weak_tangent_snapshot(n)) != Fraction(1, n)]
    return TargetResult("weak-tangent", not bad, {"mismatches": bad}, "1/n for n = 1..64", 0)


def chain_points(name, m, count=3, seed=0):
    if isinstance(m, IfsMeasure):
        return sample_typical_points(m, count, seed)
    if isinstance(m, SpongeMeasure):
        rng = make_rng(seed)
        return [m.point(tuple(int(v) for v in rng.integers(0, m.spec.size, size=40)))
                for _ in range(count)]
    # atomic gallery measures: the accumulation point and two atoms
    return [Fraction(0)] + [loc for loc, _ in m.atoms[-count + 1:]]


def _dimension_chain(depth=20, tol_local=0.02, tol_theta=0.04):
    rows = []
    ok = True
    for name, m in builtin_measures().items():
        for x in chain_points(name, m):
            ld = estimate_local_dims(m, x, depth)
            _, rep = estimate_pointwise_assouad(m, x, depth, depth // 4)
            theta = rep.extras["theta_hi_tail"]
            good = ld.lower <= ld.upper + tol_local <= theta + tol_theta
            ok &= good
            rows.append({"measure": name, "lower": ld.lower, "upper": ld.upper, "theta_hi": theta,
                         "ok": good})
    nested = nesting_queries(100, seed=17)
    ok &= all(nested)
    return TargetResult("dimension-chain", ok, rows, "lower <= upper + 0.02 <= theta + 0.04",
                        [tol_local, tol_theta], {"nesting_queries": len(nested),
                                                 "nesting_ok": all(nested)})


def nesting_queries(count: int, seed: int = 0) -> list:
    """Random (measure, center, radius, depth) queries; True where depth d+1 nests in d."""
    ms = [m for m in builtin_measures().values() if isinstance(m, (IfsMeasure, SpongeMeasure))]
    rng = make_rng(seed)
    out = []
    for q in range(count):
        m = ms[q % len(ms)]
        r = Fraction(1, int(rng.integers(2, 2 ** 10)))
        d = int(rng.integers(1, 10))
        if isinstance(m, SpongeMeasure):
            x = tuple(Fraction(int(rng.integers(0, 1024)), 1024) for _ in range(m.spec.dim))
        else:
            lo, hi = m.support_hull
            x = lo + (hi - lo) * Fraction(int(rng.integers(0, 1024)), 1024)
        a, b = m.ball_measure(x, r, depth=d), m.ball_measure(x, r, depth=d + 1)
        out.append(b.subset_of(a))
    return out


TARGETS: Dict[str, Callable[[], TargetResult]] = {
    "doubling-refutation": _doubling_refutation,
    "pointwise-doubling-zero": _pointwise_doubling_zero,
    "ssc-formula": _ssc_formula,
    "osc-guard": _osc_guard,
    "constant-weight-reduction": _constant_weight_reduction,
    "bm-example": _bm_example,
    "cube-partition": _cube_partition,
    "ruelle-consistency": _ruelle_consistency,
    "periodic-supremum": _periodic_supremum,
    "weak-tangent": _weak_tangent,
    "dimension-chain": _dimension_chain,
}


def run_target(name: str) -> TargetResult:
    try:
        fn = TARGETS[name]
    except KeyError:
        raise KeyError(f"unknown target {name!r}; known: {sorted(TARGETS)}") from None
    return fn()
