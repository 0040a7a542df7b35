"""Transfer operator (Tf)(x) = sum_i p_i(x) f(phi_i(x)) and chaos-game sampling.

Both work in floats on one-dimensional systems.  Functions live on a uniform
grid over the hull and are interpolated linearly.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .errors import InconclusiveError
from .measures import ConstantWeights, LinearWeights, SoftmaxWeights, make_rng
from .systems import IfsSpec

__all__ = [
    "GridFunction",
    "ruelle_apply",
    "ruelle_iterate",
    "RuelleResult",
    "chaos_game_sample",
    "ChaosGameResult",
    "DEFAULT_GRID",
]

DEFAULT_GRID = 4097


@dataclass
class GridFunction:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if len(self.grid) < 2 or np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing with at least 2 points")

    @classmethod
    def on_hull(cls, hull, f: Callable, size: int = DEFAULT_GRID) -> "GridFunction":
        lo, hi = float(hull[0]), float(hull[1])
        grid = np.linspace(lo, hi, size)
        vals = np.asarray(f(grid), dtype=float)
        if vals.ndim == 0:
            vals = np.full_like(grid, float(vals))
        return cls(grid, vals)

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)

    @property
    def oscillation(self) -> float:
        return float(self.values.max() - self.values.min())

    def covers(self, lo, hi) -> bool:
        return self.grid[0] <= lo and hi <= self.grid[-1]


def _float_maps(ifs: IfsSpec):
    if ifs.is_sponge:
        raise TypeError("the transfer operator is implemented for 1-d systems")
    return [tuple(float(v) for v in m) for m in ifs.matrices]


def _apply_map(m, x):
    a, b, c, d = m
    if c == 0:
        return (a * x + b) / d
    return (a * x + b) / (c * x + d)


def weight_table(weights, xs: np.ndarray) -> np.ndarray:
    """Array of shape (n, len(xs)) with p_i(xs)."""
    xs = np.asarray(xs, dtype=float)
    if isinstance(weights, ConstantWeights):
        return np.repeat(np.array([float(p) for p in weights.p])[:, None], xs.size, axis=1).reshape(
            (weights.size,) + xs.shape)
    if isinstance(weights, LinearWeights):
        a = np.array([float(v) for v in weights.a])
        b = np.array([float(v) for v in weights.b])
        return a.reshape((-1,) + (1,) * xs.ndim) + b.reshape((-1,) + (1,) * xs.ndim) * xs
    if isinstance(weights, SoftmaxWeights):
        c = np.array(weights.c).reshape((-1,) + (1,) * xs.ndim)
        d = np.array(weights.d).reshape((-1,) + (1,) * xs.ndim)
        z = np.log(c) + d * xs
        z -= z.max(axis=0)
        e = np.exp(z)
        return e / e.sum(axis=0)
    raise TypeError(f"unsupported weights {type(weights).__name__}")


def ruelle_apply(ifs: IfsSpec, weights, f: GridFunction) -> GridFunction:
    maps = _float_maps(ifs)
    if weights.size != len(maps):
        raise ValueError("weight count differs from map count")
    x = f.grid
    p = weight_table(weights, x)
    out = np.zeros_like(x)
    for i, m in enumerate(maps):
        y = _apply_map(m, x)
        if not f.covers(float(y.min()), float(y.max())):
            raise ValueError(f"grid does not cover the image of map {i}")
        out += p[i] * f(y)
    return GridFunction(x, out)


@dataclass
class RuelleResult:
    value: float
    iterations: int
    trace: list
    error: float
    discretization: float

    def to_json(self):
        return {"value": self.value, "iterations": self.iterations, "error": self.error,
                "discretization": self.discretization, "trace": list(self.trace)}


def _iterate(ifs, weights, f, tol, max_iter):
    trace = [f.oscillation]
    n = 0
    while trace[-1] > tol:
        if n >= max_iter:
            raise InconclusiveError("ruelle iteration budget spent", iterations=n,
                                    oscillation=trace[-1])
        f = ruelle_apply(ifs, weights, f)
        n += 1
        trace.append(f.oscillation)
    mid = float(f.values.max() + f.values.min()) / 2
    return mid, n, trace


def ruelle_iterate(ifs: IfsSpec, weights, f: Union[Callable, GridFunction], tol: float = 1e-9,
                   max_iter: int = 10_000, grid_size: int = DEFAULT_GRID) -> RuelleResult:
    """Iterate T until the oscillation is at most ``tol``; the midpoint estimates the integral.

    ``error`` adds half the final oscillation to a discretization term, the
    difference against the same iteration on a grid of half the resolution.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not isinstance(f, GridFunction):
        g = GridFunction.on_hull(ifs.hull, f, grid_size)
        coarse = GridFunction.on_hull(ifs.hull, f, (grid_size - 1) // 2 + 1)
    else:
        g = f
        coarse = GridFunction(f.grid[::2], f.values[::2]) if len(f.grid) > 4 else f
    value, n, trace = _iterate(ifs, weights, g, tol, max_iter)
    cvalue, _, _ = _iterate(ifs, weights, coarse, tol, max_iter)
    disc = abs(value - cvalue)
    return RuelleResult(value, n, trace, trace[-1] / 2 + disc, disc)


@dataclass
class ChaosGameResult:
    points: np.ndarray
    frequencies: dict       # word (most recent letter first) -> Fraction
    depth: int
    mean: Optional[float] = None
    stderr: Optional[float] = None
    parameters: dict = field(default_factory=dict)

    def frequency_json(self) -> dict:
        return {",".join(map(str, w)): str(q) for w, q in sorted(self.frequencies.items())}

    def write_points(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x"])
            for v in self.points:
                w.writerow([repr(float(v))])


def chaos_game_sample(ifs: IfsSpec, weights, count: int, burn_in: int = 1000, seed=0,
                      depth: int = 2, f: Optional[Callable] = np.asarray, chains: int = 100,
                      keep_points: bool = True) -> ChaosGameResult:
    """Points of ``chains`` independent chains x <- phi_i(x), i ~ p_i(x).

    Chain j draws from the stream (seed, j).  Each kept point x_t lies in the
    cylinder of its last ``depth`` letters (most recent first), which gives the
    frequency table.  ``mean``/``stderr`` of f use batch means over chains.
    """
    if count <= 0:
        raise ValueError("count must be positive")
    if burn_in < 0 or depth < 0:
        raise ValueError("burn_in and depth must be nonnegative")
    maps = _float_maps(ifs)
    n = len(maps)
    chains = max(1, min(chains, count))
    steps = -(-count // chains)
    rngs = [make_rng(seed, j) for j in range(chains)]
    lo, hi = ifs.hull
    x = np.full(chains, float(lo + hi) / 2)
    hist = np.zeros((depth, chains), dtype=np.int64)
    pts = np.empty((steps, chains))
    codes = np.empty((steps, chains), dtype=np.int64)
    A = np.array([m[0] for m in maps]); B = np.array([m[1] for m in maps])
    C = np.array([m[2] for m in maps]); D = np.array([m[3] for m in maps])
    total = burn_in + steps
    u_all = np.stack([r.random(total) for r in rngs], axis=1)
    for t in range(total):
        p = weight_table(weights, x)
        cum = np.cumsum(p, axis=0)
        i = (u_all[t] * cum[-1] >= cum).sum(axis=0)
        i = np.minimum(i, n - 1)
        x = (A[i] * x + B[i]) / (C[i] * x + D[i])
        if depth:
            hist = np.roll(hist, 1, axis=0)
            hist[0] = i
        if t >= burn_in:
            k = t - burn_in
            pts[k] = x
            code = np.zeros(chains, dtype=np.int64)
            for q in range(depth):
                code = code * n + hist[q]
            codes[k] = code
    # chain-major order, trimmed to count
    pts = pts.T.reshape(-1)[:count]
    codes = codes.T.reshape(-1)[:count]
    freq = {}
    vals, cnt = np.unique(codes, return_counts=True)
    for v, c in zip(vals.tolist(), cnt.tolist()):
        w = []
        for _ in range(depth):
            w.append(v % n)
            v //= n
        freq[tuple(reversed(w))] = Fraction(c, count)
    mean = stderr = None
    if f is not None:
        fv = np.asarray(f(pts), dtype=float)
        mean = float(fv.mean())
        per = np.array([fv[j * steps:(j + 1) * steps].mean() for j in range(chains)
                        if fv[j * steps:(j + 1) * steps].size])
        stderr = float(per.std(ddof=1) / math.sqrt(len(per))) if len(per) > 1 else math.inf
    return ChaosGameResult(pts if keep_points else np.empty(0), freq, depth, mean, stderr,
                           {"count": count, "burn_in": burn_in, "seed": seed, "chains": chains})
