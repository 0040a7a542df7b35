import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from assouad.symbolic import SymbolWord
from assouad.systems import (IfsSpec, Moebius1D, SeparationCertificate, Similarity1D,
                             SscRefutation, apply_word, cantor_system, check_ssc, declare_osc,
                             derivative_norm_along, fixed_point, moebius_system,
                             similarity_system, sup_derivative_norm, word_matrix)


@pytest.fixture(scope="module")
def gauss():
    return moebius_system([(0, 1, 1, 2), (0, 1, 1, 3)], hull=(0, 1))


def test_apply_word_examples(cantor):
    assert apply_word(cantor, (0,), 0) == 0
    assert apply_word(cantor, (1, 0), 0) == F(2, 3)
    assert apply_word(cantor, (), F(1, 5)) == F(1, 5)
    with pytest.raises(ValueError):
        apply_word(cantor, (0,), F(3, 2))


def test_derivative_examples(cantor, gauss):
    assert derivative_norm_along(cantor, (0, 1), F(1, 7)) == F(1, 9)
    assert derivative_norm_along(cantor, (0, 1), 0.3) == pytest.approx(1 / 9)
    assert derivative_norm_along(gauss, (0,), F(0)) == F(1, 4)


def test_sup_derivative_examples(cantor, gauss):
    b = sup_derivative_norm(cantor, (0, 1, 1))
    assert b.lo == b.hi == F(1, 27)
    g = sup_derivative_norm(gauss, (0,))
    assert (g.lo, g.hi) == (F(1, 9), F(1, 4))
    assert sup_derivative_norm(gauss, ()).lo == 1


def test_fixed_point_examples(cantor, gauss):
    assert fixed_point(cantor, (0,)) == 0
    assert fixed_point(cantor, (1,)) == 1
    assert fixed_point(cantor, (0, 1)) == F(1, 4)
    x = fixed_point(gauss, (0,))
    assert x == pytest.approx(math.sqrt(2) - 1, abs=1e-14)
    with pytest.raises(ValueError):
        fixed_point(cantor, (0,), tol=0)
    with pytest.raises(ValueError):
        fixed_point(cantor, ())


def test_check_ssc_examples(cantor):
    cert = check_ssc(cantor)
    assert isinstance(cert, SeparationCertificate) and cert.kind == "SSC"
    assert cert.delta.lo == cert.delta.hi == F(1, 3)
    ref = check_ssc(similarity_system([F(1, 2)] * 2, [0, F(1, 2)], certify=False))
    assert isinstance(ref, SscRefutation) and ref.point == F(1, 2) and not ref.holds
    # conv F = [0, 3/8]; first-level hulls [0, 1/8] and [1/4, 3/8]
    third = check_ssc(similarity_system([F(1, 3)] * 2, [0, F(1, 4)], certify=False))
    assert third.delta.lo == third.delta.hi == F(1, 8)
    overlap = check_ssc(similarity_system([F(2, 3)] * 2, [0, F(1, 3)], certify=False))
    assert not overlap.holds


def test_moebius_ssc(gauss):
    cert = gauss.separation
    assert cert is not None and cert.kind == "SSC"
    assert cert.delta.lo > 0
    assert min(cert.c1, cert.c2, cert.c3) >= 1


def test_similarity_distortion_is_one(cantor):
    cert = cantor.separation
    assert cert.c1 == cert.c2 == cert.c3 == 1


def test_declared_osc_is_not_verified():
    ifs = declare_osc(similarity_system([F(1, 2)] * 2, [0, F(1, 2)], certify=False))
    assert ifs.separation.kind == "OSC"


def test_ifs_validation():
    with pytest.raises(ValueError):
        IfsSpec((Similarity1D(F(1, 2)),), (0, 1))
    with pytest.raises(ValueError):
        IfsSpec((Similarity1D(F(1, 2), 1, F(3, 4)), Similarity1D(F(1, 2))), (0, 1))
    with pytest.raises(ValueError):
        Similarity1D(F(3, 2))
    with pytest.raises(ValueError):
        IfsSpec((Moebius1D(1, 0, 1, F(-1, 2)), Moebius1D(0, 1, 1, 2)), (0, 1))


def test_word_matrix_convention(cantor):
    # phi_w = phi_{w_1} o ... o phi_{w_n}, so the matrix is M_{w_1} ... M_{w_n}
    a, b, c, d = word_matrix(cantor, (1, 0))
    assert (a * 0 + b) / (c * 0 + d) == F(2, 3)


# --- properties ----------------------------------------------------------------

small_words = st.lists(st.integers(0, 1), min_size=1, max_size=6)


@given(small_words, small_words)
def test_chain_submultiplicative_gauss(i, j):
    ifs = moebius_system([(0, 1, 1, 2), (0, 1, 1, 3)], hull=(0, 1))
    c1 = ifs.separation.c1
    si, sj, sij = (sup_derivative_norm(ifs, w).hi for w in (i, j, i + j))
    assert sij <= si * sj
    # lower direction through certified lower ends
    li, lj = sup_derivative_norm(ifs, i).hi, sup_derivative_norm(ifs, j).hi
    assert float(sup_derivative_norm(ifs, i + j).hi) >= float(li * lj) / c1 / (1 + 1e-12)


@given(small_words, small_words)
def test_chain_equality_similarity(i, j):
    ifs = cantor_system()
    assert sup_derivative_norm(ifs, i + j).hi == sup_derivative_norm(ifs, i).hi * sup_derivative_norm(ifs, j).hi


@given(small_words, st.integers(1, 4))
def test_power_law_exact(w, k):
    ifs = similarity_system([F(1, 3), F(1, 5)], [0, F(4, 5)])
    x = fixed_point(ifs, w)
    assert derivative_norm_along(ifs, w * k, x) == derivative_norm_along(ifs, w, x) ** k


@given(st.lists(st.integers(0, 1), min_size=1, max_size=4), st.integers(1, 3))
def test_power_law_moebius(w, k):
    ifs = moebius_system([(0, 1, 1, 2), (0, 1, 1, 3)], hull=(0, 1))
    x = fixed_point(ifs, w)
    a = derivative_norm_along(ifs, w * k, x)
    b = derivative_norm_along(ifs, w, x) ** k
    assert a == pytest.approx(b, rel=1e-10)


@given(small_words)
def test_fixed_point_rotation_conjugacy(w):
    for ifs in (cantor_system(), moebius_system([(0, 1, 1, 2), (0, 1, 1, 3)], hull=(0, 1))):
        rot = w[1:] + w[:1]
        x = fixed_point(ifs, rot)
        y = apply_word(ifs, (w[0],), x)
        assert y == pytest.approx(fixed_point(ifs, w), abs=1e-12)


@given(small_words, st.integers(0, 1))
def test_sup_derivative_antitone(w, j):
    ifs = moebius_system([(0, 1, 1, 2), (0, 1, 1, 3)], hull=(0, 1))
    assert sup_derivative_norm(ifs, w + [j]).hi <= sup_derivative_norm(ifs, w).hi


def test_fixed_point_iteration_budget(gauss):
    # the returned point satisfies the a-priori tolerance
    for w in [(0,), (1,), (0, 1, 1)]:
        x = fixed_point(gauss, w, tol=1e-12)
        assert abs(float(apply_word(gauss, w, x)) - x) <= 1e-12


def test_symbolword_input_accepted(cantor):
    assert apply_word(cantor, SymbolWord.of((1, 0), 2), 0) == F(2, 3)
