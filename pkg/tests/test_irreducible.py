import pytest

from bkcheck.errors import PreconditionError, ResourceError
from bkcheck.irreducible import (SUM_CONDITIONS, candidate_triples, check_thetax,
                                 decomposition_bound, enumerate_irreducible, hyperplane_table,
                                 is_reducible, is_reducible_lp, killing_trichotomy,
                                 orbit_key, verify_combi)
from bkcheck.rootsys import build_root_system
from bkcheck.weyl import enumerate_group

COUNTS = {"G2": 3, "B3": 5, "C3": 4, "B4": 7, "C4": 6}


@pytest.mark.parametrize("label,n", sorted(COUNTS.items()))
def test_counts_small_rank(label, n):
    assert len(enumerate_irreducible(build_root_system(label), "gamma+beta")) == n


@pytest.mark.parametrize("label", ["A2", "A3", "A4", "D4"])
def test_simply_laced_small_rank_counts(label):
    # no irreducible triples in type A; D4 has six, one orbit under triality
    R = build_root_system(label)
    ts = enumerate_irreducible(R, "gamma+beta")
    if label == "D4":
        assert len(ts) == 6
        assert len({orbit_key(R, t) for t in ts}) < 6
    else:
        assert ts == []


@pytest.mark.parametrize("label", ["G2", "B3", "C3", "A3"])
@pytest.mark.parametrize("cond", ["gamma+beta", "gamma+phi"])
def test_hyperplane_test_agrees_with_lp_oracle(label, cond):
    R = build_root_system(label)
    for t in candidate_triples(R, cond):
        assert (is_reducible(R, t) is not None) == is_reducible_lp(R, t)


def test_witnesses_verify():
    R = build_root_system("B3")
    for t in candidate_triples(R, "gamma+beta"):
        wit = is_reducible(R, t)
        if wit is not None:
            assert wit.verify(R, t)


def test_candidates_are_chains():
    R = build_root_system("C3")
    for t in candidate_triples(R, "gamma+beta"):
        assert R.lt(t.beta, t.phi) and R.lt(t.phi, t.gamma)
        assert t.flags(R)["gamma+beta"]


def test_g2_triples_explicit():
    R = build_root_system("G2")
    got = sorted(t.coords(R) for t in enumerate_irreducible(R))
    assert len(got) == 3
    assert all(len(c) == 3 for c in got)


def test_hyperplanes_are_codimension_one():
    R = build_root_system("B3")
    from bkcheck.linalg import rank
    from bkcheck.weyl import bits
    tab = hyperplane_table(R)
    assert len(tab.masks) > 0
    for m in tab.masks:
        assert rank([list(R.coords[k]) for k in bits(int(m))]) == R.rank - 1


def test_rank_limit():
    with pytest.raises(ResourceError):
        enumerate_irreducible(build_root_system("A8"), max_rank=7)


def test_sum_conditions():
    assert set(SUM_CONDITIONS) == {"gamma+beta", "gamma+phi", "rank7"}


@pytest.mark.parametrize("label", ["A2", "B2", "G2", "A3", "B3", "C3", "A1xA2"])
def test_theorem_two_small(label):
    res = verify_combi(enumerate_group(label))
    assert res["violations"] == [] and res["thetax_failures"] == []


def test_thetax_precondition():
    G = enumerate_group("A2")
    with pytest.raises(PreconditionError):
        check_thetax(G.R, 0, 0, 0, 0, 1)


def test_killing_trichotomy_d4():
    R = build_root_system("D4")
    for a in range(R.n_roots):
        for b in range(R.n_roots):
            if a != b and a != R.neg(b):
                assert killing_trichotomy(R, a, b) in (-1, 0, 1)
    with pytest.raises(PreconditionError):
        killing_trichotomy(build_root_system("B2"), 0, 1)


def test_decomposition_bound_d4():
    R = build_root_system("D4")
    for b in range(R.n_pos):
        for g in range(R.n_pos):
            if R.leq(b, g):
                assert decomposition_bound(R, b, g)
