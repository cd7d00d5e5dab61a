from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bkcheck.errors import InvariantError, PreconditionError
from bkcheck.posetdet import (ChainMatrix, FinitePoset, boolean_lattice, bruhat_poset,
                              chain_expansion_det, chain_poset, chain_sum, direct_det,
                              interval_chain_matrix, mobius_bruteforce, mobius_selftest,
                              mobius_via_det, random_chain_matrix, random_poset)
from bkcheck.weyl import enumerate_group

F = Fraction


def test_k1_is_single_entry():
    P = chain_poset(2)
    M = ChainMatrix(P, (0, 1), ((F(7, 3),),))
    assert chain_expansion_det(P, M) == F(7, 3)


def test_two_chain_with_unit_entries():
    P = chain_poset(3)
    M = ChainMatrix(P, (0, 1, 2), ((F(1), F(1)), (F(1), F(1))))
    assert direct_det(M) == 0
    assert chain_expansion_det(P, M) == 0


def test_two_chain_general_entries():
    P = chain_poset(3)
    a, b, c = F(2), F(-3, 2), F(5)
    M = ChainMatrix(P, (0, 1, 2), ((a, b), (F(1), c)))
    assert chain_sum(M) == a * c - b


def test_mobius_basics():
    P = chain_poset(4)
    assert mobius_bruteforce(P, 0, 0) == 1
    assert mobius_bruteforce(P, 0, 1) == -1
    assert mobius_bruteforce(P, 0, 2) == 0 == mobius_bruteforce(P, 0, 3)
    assert mobius_via_det(P, 0, 1) == -1
    assert mobius_via_det(P, 0, 3) == 0


@pytest.mark.parametrize("rank,mu", [(1, -1), (2, 1), (3, -1), (4, 1)])
def test_boolean_lattice(rank, mu):
    B = boolean_lattice(rank)
    top = (1 << rank) - 1
    assert mobius_bruteforce(B, 0, top) == mu == mobius_via_det(B, 0, top)


def test_bruhat_interval_a2():
    G = enumerate_group("A2")
    P = bruhat_poset(G)
    s12 = G.from_word([0, 1])
    assert mobius_via_det(P, 0, s12) == mobius_bruteforce(P, 0, s12) == 1


@pytest.mark.parametrize("label", ["A2", "B2", "A3"])
def test_bruhat_intervals(label):
    G = enumerate_group(label)
    P = bruhat_poset(G)
    for a, b in P.comparable_pairs():
        if a != b:
            mu = mobius_bruteforce(P, a, b)
            assert mu == mobius_via_det(P, a, b) == (-1) ** (G.length(b) - G.length(a))


@given(st.integers(2, 8), st.integers(0, 2**31))
def test_random_posets_agree(n, seed):
    P = random_poset(n, seed)
    rng = np.random.default_rng(seed)
    for a, b in P.comparable_pairs():
        if a != b:
            assert mobius_via_det(P, a, b) == mobius_bruteforce(P, a, b)
            M = random_chain_matrix(P, a, b, rng)
            assert chain_expansion_det(P, M) == direct_det(M)


def test_linear_extension_is_valid():
    for seed in range(20):
        P = random_poset(8, seed)
        for a, b in P.comparable_pairs():
            assert P.position[a] <= P.position[b]


def test_poset_validation():
    with pytest.raises(PreconditionError):
        FinitePoset((0, 1), np.array([[1, 1], [1, 1]], dtype=bool))
    with pytest.raises(PreconditionError):
        FinitePoset((0, 1), np.zeros((2, 2), dtype=bool))
    bad = np.eye(3, dtype=bool)
    bad[0, 1] = bad[1, 2] = True
    with pytest.raises(PreconditionError):
        FinitePoset((0, 1, 2), bad)


def test_chain_matrix_validation():
    P = chain_poset(3)
    M = ChainMatrix(P, (0, 1, 2), ((F(1), F(1)), (F(2), F(1))))
    with pytest.raises(InvariantError):
        chain_expansion_det(P, M)
    Q = FinitePoset.from_relations((0, 1, 2), [(0, 1), (0, 2)])
    M = ChainMatrix(Q, (0, 1, 2), ((F(1), F(1)), (F(1), F(3))))
    with pytest.raises(InvariantError):
        chain_expansion_det(Q, M)


def test_mobius_preconditions():
    P = FinitePoset.from_relations((0, 1), [])
    with pytest.raises(PreconditionError):
        mobius_bruteforce(P, 0, 1)
    with pytest.raises(PreconditionError):
        mobius_via_det(P, 0, 0)
    with pytest.raises(PreconditionError):
        random_poset(9, 0)


def test_incidence_matrix_entries():
    B = boolean_lattice(2)
    M = interval_chain_matrix(B, 0, 3)
    assert M.k == 3 and direct_det(M) == -1


def test_selftest_summary():
    res = mobius_selftest(50, 7)
    assert res["ok"] and res["intervals"] > 100
    assert set(res["bruhat"]) == {"A2", "B2", "A3"}
