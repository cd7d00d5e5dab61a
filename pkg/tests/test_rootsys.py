from fractions import Fraction

import pytest

from bkcheck.errors import ValidationError
from bkcheck.rootsys import build_root_system, cartan_matrix, parse_type

POSITIVE = {"A1": 1, "A3": 6, "B2": 4, "B3": 9, "C3": 9, "D4": 12, "G2": 6,
            "F4": 24, "E6": 36, "E7": 63, "B5": 25, "A1xA2": 4}


@pytest.mark.parametrize("label,n", sorted(POSITIVE.items()))
def test_positive_root_counts(label, n):
    assert build_root_system(label).n_pos == n


@pytest.mark.parametrize("label", ["A3", "B3", "C3", "G2", "F4", "D4", "E6"])
def test_fundamental_weights_are_dual_to_coroots(label):
    R = build_root_system(label)
    for i, om in enumerate(R.fundamental_weights):
        for j in range(R.rank):
            assert R.coroot_pairing(om, j) == (1 if i == j else 0)


def test_b3_first_fundamental_weight():
    assert build_root_system("B3").fundamental_weights[0] == (1, 1, 1)


@pytest.mark.parametrize("label", ["B3", "G2", "F4", "C4"])
def test_roots_sorted_by_height(label):
    R = build_root_system(label)
    h = R.heights[:R.n_pos]
    assert list(h) == sorted(h)
    assert all(R.heights[R.neg(k)] == -R.heights[k] for k in range(R.n_pos))


def test_highest_roots():
    assert build_root_system("G2").coords[build_root_system("G2").highest_roots[0]] == (3, 2)
    R = build_root_system("F4")
    assert R.coords[R.highest_roots[0]] == (2, 3, 4, 2)
    R = build_root_system("A1xA2")
    assert len(R.highest_roots) == 2


def test_cartan_convention_b2():
    # a[i][j] = <alpha_i^vee, alpha_j>; alpha_2 is short in B2
    R = build_root_system("B2")
    assert R.is_long(0) and not R.is_long(1)
    assert R.coroot_pairing(R.coords[1], 0) == R.cartan[0][1]


def test_add_table_matches_coordinates():
    R = build_root_system("B3")
    for i in range(R.n_roots):
        for j in range(R.n_roots):
            k = R.add_table[i, j]
            s = tuple(a + b for a, b in zip(R.coords[i], R.coords[j]))
            assert (k >= 0) == (s in R.index)


def test_rho_pairs_to_one_with_simple_coroots():
    R = build_root_system("F4")
    assert all(R.coroot_pairing(R.rho, i) == 1 for i in range(R.rank))


def test_parse_type_variants():
    assert parse_type("b3") == [("B", 3)]
    assert parse_type("A1xA2") == [("A", 1), ("A", 2)]
    assert parse_type(("G", 2)) == [("G", 2)]


@pytest.mark.parametrize("bad", ["Q3", "", "G3", "D2", "E9", "B1x"])
def test_parse_type_rejects(bad):
    with pytest.raises(ValidationError):
        parse_type(bad)


def test_cartan_rejects_bad_rank():
    with pytest.raises(ValidationError):
        cartan_matrix("F", 3)


def test_json_roundtrip():
    R = build_root_system("C3")
    from bkcheck.rootsys import RootSystem
    assert RootSystem.from_json(R.to_json()).coords == R.coords


def test_form_is_symmetric_and_normalized():
    R = build_root_system("G2")
    for i in range(R.n_pos):
        for j in range(R.n_pos):
            assert R.form(i, j) == R.form(j, i)
    assert max(R.norm_sq_coords(R.coords[k]) for k in range(R.n_pos)) == Fraction(2)
