import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bkcheck.errors import PreconditionError, ResourceError
from bkcheck.rootsys import build_root_system
from bkcheck.weyl import (WeylGroup, bits, classical_order, enumerate_group, is_biconvex,
                          mask_of, popcount)

ORDERS = {"A1": 2, "A2": 6, "B2": 8, "G2": 12, "A3": 24, "B3": 48, "C3": 48,
          "D4": 192, "F4": 1152, "A1xA2": 12}


@pytest.mark.parametrize("label,n", sorted(ORDERS.items()))
def test_group_orders(label, n):
    G = enumerate_group(label)
    assert G.order == n == classical_order(G.R)


def test_bfs_order_and_longest_element():
    G = enumerate_group("B3")
    assert G.identity == 0 and G.length(0) == 0
    assert list(G.lengths) == sorted(G.lengths)
    assert G.length(G.w0) == G.N
    assert G.inv[G.w0] == G.R.full_mask


@pytest.mark.parametrize("label", ["A3", "B3", "G2"])
def test_words_roundtrip(label):
    G = enumerate_group(label)
    for w in range(G.order):
        word = G.reduced_word(w)
        assert len(word) == G.length(w) == popcount(G.inv[w])
        assert G.from_word(word) == w


def test_multiplication_and_inverse():
    G = enumerate_group("C3")
    T = G.multiplication_table()
    for a in range(0, G.order, 5):
        for b in range(0, G.order, 7):
            assert T[a, b] == G.mul(a, b)
        assert G.mul(a, int(G.inverse[a])) == 0


def test_inversion_set_definition():
    G = enumerate_group("B3")
    R = G.R
    for w in range(G.order):
        neg = mask_of(k for k in range(R.n_pos) if G.act(w, k) >= R.n_pos)
        # Phi(w) = positive roots sent negative by w^-1
        assert G.inv[int(G.inverse[w])] == neg or G.inv[w] == neg


def test_length_additivity_on_descents():
    G = enumerate_group("A3")
    for w in range(G.order):
        for i in range(G.rank):
            sw = int(G.left[i, w])
            assert abs(G.length(sw) - G.length(w)) == 1


@pytest.mark.parametrize("label", ["A2", "B2", "G2", "A3", "B3", "C3", "A1xA2"])
def test_biconvex_subsets_are_exactly_inversion_sets(label):
    G = enumerate_group(label)
    R = G.R
    inv = set(G.inv)
    count = 0
    for S in range(1 << R.n_pos):
        b = is_biconvex(R, S)
        count += b
        assert b == (S in inv)
    assert count == G.order


def test_peeling_recovers_elements():
    G = enumerate_group("B3")
    for w in range(G.order):
        assert G.biconvex_to_weyl(G.inv[w]) == w
    assert G.biconvex_to_weyl(0b110) is None


def test_cone_certificates():
    G = enumerate_group("G2")
    for w in range(G.order):
        assert G.cone_disjointness(G.inv[w]).verified
    with pytest.raises(PreconditionError):
        G.cone_disjointness(0b11)


@pytest.mark.parametrize("label", ["A3", "B3", "G2"])
def test_bruhat_matches_cover_closure(label):
    G = enumerate_group(label)
    L = G.cover_closure_leq()
    for u in range(G.order):
        ideal = G.bruhat_ideal(u)
        for w in range(G.order):
            assert L[w, u] == ideal[w] == G.bruhat_leq(w, u)


def test_bruhat_subword_property_a2():
    G = enumerate_group("A2")
    s1, s2 = G.from_word([0]), G.from_word([1])
    s12 = G.from_word([0, 1])
    assert G.bruhat_leq(s1, s12) and G.bruhat_leq(s2, s12)
    assert not G.bruhat_leq(s12, G.from_word([1, 0]))


def test_covers_below_are_reflections():
    G = enumerate_group("C3")
    for w in range(G.order):
        for v, k in G.covers_below(w):
            assert G.mul(w, G.reflection(k)) == v
            assert G.length(v) == G.length(w) - 1


def test_decompositions():
    G = enumerate_group("B3")
    for w in range(G.order):
        xs, ys = G.decompositions(w)
        for x, y in zip(xs.tolist(), ys.tolist()):
            assert G.inv[x] & G.inv[y] == 0 and G.inv[x] | G.inv[y] == G.inv[w]


def test_weak_order_and_descents():
    G = enumerate_group("A3")
    assert G.left_weak_leq(0, G.w0)
    assert G.d(0) == 0 and G.d(G.w0) == G.rank


def test_json_and_pickle_roundtrip():
    import pickle
    G = enumerate_group("G2")
    H = WeylGroup.from_json(G.to_json())
    assert H.order == G.order and list(H.inv) == list(G.inv)
    P = pickle.loads(pickle.dumps(G))
    assert list(P.inv) == list(G.inv)


def test_json_version_check():
    doc = enumerate_group("A2").to_json()
    doc["format_version"] = 99
    with pytest.raises(ValueError):
        WeylGroup.from_json(doc)


def test_cap_raises_resource_error():
    with pytest.raises(ResourceError):
        WeylGroup(build_root_system("B4"), cap=100)


def test_element_wrapper():
    G = enumerate_group("A2")
    e = G.element(G.from_word([0, 1]))
    assert e.length == 2 and e.word == (0, 1)
    assert (e * e.inverse()).index == 0


@given(st.integers(min_value=0, max_value=(1 << 40) - 1))
def test_bits_and_mask_roundtrip(m):
    assert mask_of(bits(m)) == m
    assert popcount(m) == len(list(bits(m)))


@given(st.lists(st.integers(0, 2), max_size=12))
def test_from_word_is_homomorphism(word):
    G = enumerate_group("B3")
    w = G.from_word(word)
    acc = 0
    for i in word:
        acc = G.mul(acc, G.from_word([i]))
    assert acc == w
