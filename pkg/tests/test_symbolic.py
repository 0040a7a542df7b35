from itertools import product

import pytest
from hypothesis import given, strategies as st

from assouad.symbolic import (PeriodicWord, SymbolWord, contains_substring, covers_all_words,
                              cylinder_contains, enumerate_periodic, is_primitive,
                              lyndon_representative, parse_word, shift)


def W(*s, n=3):
    return SymbolWord.of(s, n)


def test_shift_examples():
    assert shift(W(0, 1, 2), 1) == W(1, 2)
    assert shift(PeriodicWord.of((0, 1), 2), 1) == PeriodicWord.of((1, 0), 2)
    assert shift(W(0, 1, 2), 3) == SymbolWord.empty(3)
    with pytest.raises(ValueError):
        shift(W(0, 1), 3)


def test_cylinder_examples():
    p = PeriodicWord.of((0, 1), 2)
    assert cylinder_contains(SymbolWord.of((0, 1), 2), p)
    assert not cylinder_contains(SymbolWord.of((1,), 2), p)
    assert cylinder_contains(SymbolWord.of((0, 0), 2), SymbolWord.of((0, 0, 1), 2))
    with pytest.raises(ValueError):
        cylinder_contains(SymbolWord.of((0, 0, 1), 2), SymbolWord.of((0,), 2))


def test_substring_examples():
    assert contains_substring(SymbolWord.of((0, 1, 0, 0), 2), SymbolWord.of((1, 0), 2))
    assert not contains_substring(SymbolWord.of((0, 0, 0), 2), SymbolWord.of((1,), 2))
    assert contains_substring(SymbolWord.of((0, 1), 2), SymbolWord.empty(2))


def test_symbol_range_checked():
    with pytest.raises(ValueError):
        SymbolWord.of((0, 2), 2)
    with pytest.raises(ValueError):
        PeriodicWord(SymbolWord.empty(2))


def test_enumerate_small():
    assert [str(w) for w in enumerate_periodic(2, 1)] == ["(0)^inf", "(1)^inf"]
    assert [w.block.symbols for w in enumerate_periodic(2, 2)] == [(0,), (1,), (0, 1)]
    assert len(enumerate_periodic(3, 1)) == 3


def _necklace_oracle(k, n):
    # brute-force dedup of all blocks by primitive root and rotation
    reps = set()
    for m in range(1, n + 1):
        for block in product(range(k), repeat=m):
            root = block
            for d in range(1, m + 1):
                if m % d == 0 and block[:d] * (m // d) == block:
                    root = block[:d]
                    break
            reps.add(min(root[i:] + root[:i] for i in range(len(root))))
    return reps


@pytest.mark.parametrize("k,n", [(2, 6), (3, 4), (4, 3)])
def test_enumerate_matches_bruteforce(k, n):
    got = [w.block.symbols for w in enumerate_periodic(k, n)]
    assert len(got) == len(set(got))
    assert set(got) == _necklace_oracle(k, n)


def test_cumulative_necklace_counts():
    # aperiodic necklaces over 2 letters: 2, 1, 2, 3, 6, 9
    counts = [len(enumerate_periodic(2, n)) for n in range(1, 7)]
    assert counts == [2, 3, 5, 8, 14, 23]


words = st.lists(st.integers(0, 2), max_size=12).map(lambda s: SymbolWord.of(s, 3))
blocks = st.lists(st.integers(0, 2), min_size=1, max_size=8)


@given(words, st.integers(0, 12), st.integers(0, 12))
def test_shift_composes(w, a, b):
    if a + b <= len(w):
        assert shift(shift(w, a), b) == shift(w, a + b)


@given(blocks)
def test_periodic_shift_by_period(b):
    p = PeriodicWord.of(b, 3)
    assert shift(p, p.period) == p


@given(blocks, st.integers(0, 20), st.integers(0, 20))
def test_periodic_shift_composes(b, x, y):
    p = PeriodicWord.of(b, 3)
    assert shift(shift(p, x), y) == shift(p, x + y)


@given(words, words, words)
def test_substring_monotone_under_extension(w, pat, ext):
    if contains_substring(w, pat):
        assert contains_substring(w + ext, pat)


@given(st.integers(1, 3), st.integers(1, 6))
def test_enumeration_has_no_rotations_or_powers(k, n):
    seen = set()
    for w in enumerate_periodic(k, n):
        b = w.block.symbols
        assert is_primitive(b)
        assert lyndon_representative(b) == b
        rots = {b[i:] + b[:i] for i in range(len(b))}
        assert not (rots & seen)
        seen |= rots


@given(blocks)
def test_lyndon_representative_is_rotation_invariant(b):
    t = tuple(b)
    r = lyndon_representative(t)
    for i in range(len(t)):
        assert lyndon_representative(t[i:] + t[:i]) == r


def test_serialization_roundtrip():
    w = W(0, 1, 1)
    assert str(w) == "0,1,1"
    assert parse_word("0,1,1", 3) == w
    p = PeriodicWord.of((0, 1), 2)
    assert str(p) == "(0,1)^inf"
    assert parse_word("(0,1)^inf", 2) == p
    assert parse_word("", 2) == SymbolWord.empty(2)


def test_covers_all_words():
    # de Bruijn sequence for length 2 over {0, 1}, plus wraparound letter
    assert covers_all_words(SymbolWord.of((0, 0, 1, 1, 0), 2), 2)
    assert not covers_all_words(SymbolWord.of((0, 1, 0, 1), 2), 2)
