from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from assouad.errors import InconclusiveError
from assouad.measures import ConstantWeights, LinearWeights, SoftmaxWeights
from assouad.ruelle import (GridFunction, chaos_game_sample, ruelle_apply, ruelle_iterate,
                            weight_table)
from assouad.systems import cantor_system, similarity_system


def _grid(ifs, f, size=257):
    return GridFunction.on_hull(ifs.hull, f, size)


def test_constant_is_fixed(cantor, gibbs):
    for w in (gibbs.weights, ConstantWeights((F(1, 4), F(3, 4)))):
        out = ruelle_apply(cantor, w, _grid(cantor, lambda x: np.ones_like(x)))
        assert np.allclose(out.values, 1.0, atol=1e-15)


def test_linear_slope_bernoulli():
    ifs = similarity_system([F(1, 3), F(1, 4)], [0, F(3, 4)], signs=[1, -1])
    p = ConstantWeights((F(2, 5), F(3, 5)))
    out = ruelle_apply(ifs, p, _grid(ifs, lambda x: x))
    slope = np.diff(out.values) / np.diff(out.grid)
    assert np.allclose(slope, 0.4 / 3 - 0.6 / 4, atol=1e-12)


def test_constant_input_needs_no_iterations(cantor, gibbs):
    res = ruelle_iterate(cantor, gibbs.weights, lambda x: np.full_like(x, 2.5))
    assert res.iterations == 0 and res.value == 2.5


def test_cantor_identity_integral(cantor, gibbs):
    # symmetric measures (and the Gibbs measure, by x -> 1-x symmetry of the weights)
    for w in (ConstantWeights((F(1, 2),) * 2), gibbs.weights):
        res = ruelle_iterate(cantor, w, lambda x: x, tol=1e-10)
        assert res.value == pytest.approx(0.5, abs=1e-9)
        assert res.error < 1e-9


def test_bernoulli_mean_closed_form(cantor):
    # integral of x under Bernoulli(p) on the Cantor set is p_1 (fixed point of E = E/3 + 2 p_1 / 3)
    res = ruelle_iterate(cantor, ConstantWeights((F(1, 4), F(3, 4))), lambda x: x, tol=1e-11)
    assert res.value == pytest.approx(0.75, abs=1e-9)


def test_oscillation_trace_nonincreasing(cantor, gibbs):
    res = ruelle_iterate(cantor, gibbs.weights, lambda x: np.sin(7 * x), tol=1e-8)
    assert all(b <= a + 1e-15 for a, b in zip(res.trace, res.trace[1:]))


def test_grid_must_cover_images(cantor):
    g = GridFunction(np.linspace(0.5, 1.0, 9), np.zeros(9))
    with pytest.raises(ValueError):
        ruelle_apply(cantor, ConstantWeights((F(1, 2),) * 2), g)
    with pytest.raises(ValueError):
        GridFunction(np.array([0.0, 0.0]), np.array([1.0, 2.0]))


def test_budget_raises_inconclusive(cantor):
    with pytest.raises(InconclusiveError):
        ruelle_iterate(cantor, ConstantWeights((F(1, 2),) * 2), lambda x: x, tol=1e-12, max_iter=3)
    with pytest.raises(ValueError):
        ruelle_iterate(cantor, ConstantWeights((F(1, 2),) * 2), lambda x: x, tol=0)


def test_weight_table_columns_sum_to_one(gibbs):
    xs = np.linspace(0, 1, 11)
    for w in (gibbs.weights, ConstantWeights((F(1, 3), F(2, 3))), SoftmaxWeights((1.0, 3.0), (0.2, -0.4))):
        assert np.allclose(weight_table(w, xs).sum(axis=0), 1.0)


def test_chaos_frequencies_exact_sum(cantor, gibbs):
    res = chaos_game_sample(cantor, gibbs.weights, 5000, burn_in=50, seed=3, depth=3)
    assert sum(res.frequencies.values(), F(0)) == 1
    assert all(isinstance(q, F) for q in res.frequencies.values())
    assert len(res.points) == 5000


def test_chaos_bernoulli_frequencies(cantor):
    p = (F(1, 4), F(3, 4))
    res = chaos_game_sample(cantor, ConstantWeights(p), 200_000, burn_in=20, seed=11, depth=2)
    for w, q in res.frequencies.items():
        assert float(q) == pytest.approx(float(p[w[0]] * p[w[1]]), abs=0.005)


def test_chaos_points_in_cylinders(cantor):
    res = chaos_game_sample(cantor, ConstantWeights((F(1, 2),) * 2), 2000, burn_in=30, seed=1, depth=0)
    x = res.points
    # every point sits in the level-1 cylinders [0,1/3] or [2/3,1]
    assert np.all((x <= 1 / 3 + 1e-12) | (x >= 2 / 3 - 1e-12))


def test_chaos_deterministic(cantor, gibbs):
    a = chaos_game_sample(cantor, gibbs.weights, 3000, burn_in=10, seed=9)
    b = chaos_game_sample(cantor, gibbs.weights, 3000, burn_in=10, seed=9)
    c = chaos_game_sample(cantor, gibbs.weights, 3000, burn_in=10, seed=10)
    assert np.array_equal(a.points, b.points) and a.frequencies == b.frequencies
    assert not np.array_equal(a.points, c.points)


def test_chaos_agrees_with_ruelle(cantor, gibbs):
    f = lambda x: x ** 2  # noqa: E731
    res = ruelle_iterate(cantor, gibbs.weights, f, tol=1e-10)
    mc = chaos_game_sample(cantor, gibbs.weights, 200_000, burn_in=100, seed=4, f=f)
    assert abs(mc.mean - res.value) <= 4 * mc.stderr + res.error


def test_chaos_argument_errors(cantor):
    with pytest.raises(ValueError):
        chaos_game_sample(cantor, ConstantWeights((F(1, 2),) * 2), 0)
    with pytest.raises(ValueError):
        chaos_game_sample(cantor, ConstantWeights((F(1, 2),) * 2), 10, burn_in=-1)


# --- properties ------------------------------------------------------------------

coef = st.lists(st.floats(-3, 3), min_size=1, max_size=4)


@given(coef, st.fractions(F(1, 10), F(9, 10), max_denominator=20), st.fractions(F(-1, 10), F(1, 10), max_denominator=20))
def test_positivity(c, a0, b0):
    if not (0 < a0 + b0 < 1 and 0 < a0 < 1):
        return
    ifs = cantor_system()
    w = LinearWeights((a0, 1 - a0), (b0, -b0))
    f = _grid(ifs, lambda x: np.polyval(c, x), 129)
    out = ruelle_apply(ifs, w, f)
    assert out.values.min() >= f.values.min() - 1e-12
    assert out.values.max() <= f.values.max() + 1e-12


@given(coef)
def test_oscillation_contracts(c):
    ifs = cantor_system()
    f = _grid(ifs, lambda x: np.polyval(c, x), 129)
    out = ruelle_apply(ifs, ConstantWeights((F(1, 3), F(2, 3))), f)
    assert out.oscillation <= f.oscillation + 1e-12
