"""Command execution for parsed configs.

Each command returns a JSON payload and a mapping of CSV file names to row
iterables; the CLI decides where they go.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import dims
from .bounds import to_exact
from .config import ExperimentConfig, _nums
from .gallery import (GalleryMeasure, doubling_witness_ratio, hausdorff_distance_to_unit_interval,
                      weak_tangent_snapshot)
from .measures import ConstantWeights, IfsMeasure, make_rng, sample_typical_points
from .ruelle import chaos_game_sample, ruelle_iterate
from .sponge import (SpongeMeasure, approx_cube_measure, check_vssc, enumerate_cubes,
                     sandwich_check)

__all__ = ["execute", "sample_points"]


def sample_points(m, count: int, seed: int, length: int = 48, prefix=()) -> list:
    if isinstance(m, IfsMeasure):
        return sample_typical_points(m, count, seed, length, prefix)
    if isinstance(m, SpongeMeasure):
        rng = make_rng(seed)
        n = m.spec.size
        return [m.point(tuple(int(v) for v in rng.integers(0, n, size=length))) for _ in range(count)]
    raise TypeError("sampling needs an IFS or sponge measure; give explicit points")


def _points(cfg: ExperimentConfig):
    p = cfg.params
    if "points" in p:
        pts = _nums(p["points"], "command.points")
        if isinstance(cfg.measure, SpongeMeasure):
            d = cfg.sponge.dim
            if len(pts) % d:
                raise ValueError("sponge points: flat list of coordinates, d per point")
            pts = [tuple(pts[i:i + d]) for i in range(0, len(pts), d)]
        return pts
    return sample_points(cfg.measure, p["samples"], p["seed"], p.get("sample_length", 48),
                         tuple(p.get("prefix", ())))


def _formula(cfg: ExperimentConfig, threads):
    p = cfg.params
    if cfg.sponge is not None:
        out = {"assouad": dims.bm_assouad_formula(cfg.sponge).to_json()}
        if cfg.sponge.dim == 2:
            out["minkowski"] = dims.bm_minkowski_formula(cfg.sponge).to_json()
        return out, {}
    m = cfg.measure
    if isinstance(m.weights, ConstantWeights) and m.ifs.is_similarity:
        rep = dims.selfsimilar_formula_for(m, p.get("guard_depth", 24), p.get("guard_start", 8),
                                           p.get("threshold", 1.4))
    else:
        rep = dims.assouad_place_dependent(m.ifs, m.weights, p.get("max_period", 8))
    return rep.to_json(), {}


def _scale_base(m, spec):
    """2 by default; 'natural' is 1/r for an SSC similarity system with one common ratio."""
    if spec != "natural":
        return Fraction(to_exact(spec))
    ifs = getattr(m, "ifs", None)
    if ifs is None or not ifs.is_similarity or ifs.separation is None or ifs.separation.kind != "SSC":
        raise ValueError("scale_base 'natural' needs an SSC similarity system")
    ratios = {abs(Fraction(mat[0]) / Fraction(mat[3])) for mat in ifs.matrices}
    if len(ratios) != 1:
        raise ValueError("scale_base 'natural' needs a common contraction ratio")
    return 1 / ratios.pop()


def _estimate(cfg: ExperimentConfig, threads):
    p = cfg.params
    m = cfg.measure
    depth = p.get("depth", 24)
    min_gap = p.get("min_gap", max(1, depth // 3))
    tail = p.get("tail", 0.25)
    pts = _points(cfg)
    base = _scale_base(m, p.get("scale_base", 2))
    rows, csvs = [], {}
    for i, x in enumerate(pts):
        prof, rep = dims.estimate_pointwise_assouad(m, x, depth, min_gap, base, threads=threads)
        ld = dims.estimate_local_dims(m, x, depth, tail, threads=threads)
        rows.append({"point": x, "pointwise": rep.to_json(),
                     "local_lower": ld.lower, "local_upper": ld.upper})
        csvs[f"profile_{i:03d}.csv"] = list(prof.csv_rows())
    out = {"command": "estimate", "depth": depth, "min_gap": min_gap, "scale_base": base,
           "points": rows}
    if p.get("minkowski"):
        out["minkowski"] = dims.minkowski_upper_estimate(m, pts, depth, tail, threads).to_json()
    return out, csvs


def _scan(cfg: ExperimentConfig, threads):
    p = cfg.params
    m = cfg.measure
    depth = p.get("depth", 20)
    if isinstance(m, GalleryMeasure) and "points" not in p and m.id == "two_sided_geometric":
        # the non-doubling witnesses y_k = -2^-k at r_k = 2^-k
        start = max(1, p.get("start", 1))
        rows = [("center", "k", "r", "ratio")]
        ratios = []
        for k in range(start, depth + 1):
            q = doubling_witness_ratio(m, k)
            ratios.append(q)
            rows.append((str(-Fraction(1, 2 ** k)), k, f"1/{2 ** k}", str(q)))
        out = {"command": "scan", "mode": "witness", "max_ratio": max(ratios),
               "ratios": {str(k): q for k, q in zip(range(start, depth + 1), ratios)},
               "trend": "growth" if all(b > a for a, b in zip(ratios, ratios[1:])) else "plateau"}
        return out, {"scan.csv": rows}
    if "points" in p:
        pts = _points(cfg)
    elif isinstance(m, IfsMeasure):
        pts = dims._junction_points(m.ifs)
    else:
        pts = [Fraction(0)]
    scan = dims.doubling_scan(m, pts, depth, start=p.get("start", 1), window=p.get("window", 4),
                              threshold=p.get("threshold", 1.4), threads=threads)
    out = {"command": "scan", "mode": "points", "points": pts, "max_ratio": scan.max_ratio,
           "witness": scan.witness, "trend": scan.trend, "min_growth": scan.min_growth,
           "levels": [{"k": k, "ratio_lo": lo, "ratio_hi": hi, "center": c}
                      for k, lo, hi, c in scan.levels],
           "parameters": scan.parameters}
    return out, {"scan.csv": list(scan.csv_rows())}


def _polynomial(coeffs):
    cs = [float(c) for c in coeffs]

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in reversed(cs):
            out = out * x + c
        return out
    return f


def _ruelle(cfg: ExperimentConfig, threads):
    p = cfg.params
    fspec = p.get("f", "identity")
    coeffs = [0, 1] if fspec == "identity" else _nums(fspec, "command.f")
    f = _polynomial(coeffs)
    res = ruelle_iterate(cfg.ifs, cfg.weights, f, p.get("tol", 1e-9), p.get("max_iter", 10_000),
                         p.get("grid", 4097))
    out = {"command": "ruelle", "f": [str(c) for c in coeffs], "ruelle": res.to_json()}
    csvs = {}
    if p.get("chaos"):
        cg = chaos_game_sample(cfg.ifs, cfg.weights, p.get("count", 10 ** 5), p.get("burn_in", 1000),
                               p["seed"], p.get("cylinder_depth", 2), f)
        z = abs(cg.mean - res.value) / (cg.stderr + res.error)
        out["chaos"] = {"mean": cg.mean, "stderr": cg.stderr, "frequencies": cg.frequency_json(),
                        "parameters": cg.parameters}
        out["agreement"] = {"combined_errors": z, "within_3": bool(z <= 3)}
        if p.get("write_points"):
            csvs["points.csv"] = [("x",)] + [(repr(float(v)),) for v in cg.points]
    return out, csvs


def _sponge(cfg: ExperimentConfig, threads):
    p = cfg.params
    spec = cfg.sponge
    m = cfg.measure
    levels = p.get("levels", 3)
    ok, witness = check_vssc(spec)
    out = {"command": "sponge", "vssc": ok, "vssc_witness": witness}
    if ok:
        out["assouad"] = dims.bm_assouad_formula(spec).to_json()
        if spec.dim == 2:
            out["minkowski"] = dims.bm_minkowski_formula(spec).to_json()
    sums = {}
    for k in range(levels + 1):
        cubes = enumerate_cubes(spec, k)
        sums[str(k)] = {"cubes": len(cubes),
                        "total": sum((approx_cube_measure(spec, w, k)
                                      for w in cubes), Fraction(0))}
    out["cube_partition"] = sums
    centers = p.get("centers", 0)
    if centers:
        rng = make_rng(p.get("seed", 0))
        checks = []
        for _ in range(centers):
            w = tuple(int(v) for v in rng.integers(0, spec.size, size=levels + 12))
            for k in range(levels + 1):
                checks.append(sandwich_check(m, w, k))
        out["sandwich"] = {"checks": len(checks), "all_ok": all(c["ok"] for c in checks)}
    return out, {}


def _gallery(cfg: ExperimentConfig, threads):
    p = cfg.params
    m = cfg.measure
    out = {"command": "gallery", "id": m.id, "total": m.total}
    csvs = {}
    if m.id == "two_sided_geometric":
        K = p.get("max_k", 20)
        rows = [("k", "ratio", "closed_form")]
        match = True
        for k in range(1, K + 1):
            q = doubling_witness_ratio(m, k)
            ref = 1 + Fraction(4, 9) * Fraction(3, 2) ** k
            match &= q == ref
            rows.append((k, str(q), str(ref)))
        out["doubling_witness"] = {"max_k": K, "matches_closed_form": match}
        depth = p.get("depth", 24)
        at0 = [m.ball(0, 2 * Fraction(1, 2 ** j)).value / m.ball(0, Fraction(1, 2 ** j)).value
               for j in range(depth + 1)]
        out["pointwise_doubling_at_0"] = {"max_ratio": max(at0), "depth": depth}
        csvs["doubling.csv"] = rows
    else:
        N = p.get("max_n", 16)
        dists = {str(n): hausdorff_distance_to_unit_interval(weak_tangent_snapshot(n))
                 for n in range(1, N + 1)}
        out["weak_tangent"] = {"max_n": N, "distances": dists,
                               "all_equal_1_over_n": all(Fraction(d) == Fraction(1, int(n))
                                                         for n, d in dists.items())}
    return out, csvs


_DISPATCH = {"formula": _formula, "estimate": _estimate, "scan": _scan, "ruelle": _ruelle,
             "sponge": _sponge, "gallery": _gallery}


def execute(cfg: ExperimentConfig, threads=None):
    return _DISPATCH[cfg.command](cfg, threads)
