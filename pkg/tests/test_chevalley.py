import numpy as np
import pytest

from bkcheck.chevalley import build_chevalley
from bkcheck.rootsys import build_root_system

TYPES = ["A1", "A2", "B2", "G2", "A3", "B3", "C3", "D4", "A1xA2"]


@pytest.mark.parametrize("label", TYPES)
def test_jacobi_and_antisymmetry(label):
    A = build_chevalley(build_root_system(label))
    assert A.jacobi_defect() == 0
    assert A.antisymmetry_defect() == 0


@pytest.mark.parametrize("label", TYPES)
def test_string_lengths(label):
    assert build_chevalley(build_root_system(label)).string_length_defect() == 0


@pytest.mark.parametrize("label,m", [("A2", 1), ("B2", 2), ("G2", 3), ("F4", 2)])
def test_max_constant(label, m):
    assert build_chevalley(build_root_system(label)).max_abs_constant() == m


def test_a2_simple_pair():
    R = build_root_system("A2")
    A = build_chevalley(R)
    assert abs(A.N(0, 1)) == 1
    assert A.N(0, 1) == -A.N(1, 0)


@pytest.mark.parametrize("label", ["B3", "G2"])
def test_root_pairs_give_coroots(label):
    R = build_root_system(label)
    A = build_chevalley(R)
    P = R.n_pos
    for k in range(P):
        ea = np.zeros(A.dim, dtype=object)
        eb = np.zeros(A.dim, dtype=object)
        ea[k] = 1
        eb[R.neg(k)] = 1
        br = A.bracket(ea, eb)
        assert list(br[2 * P:]) == list(R.coroots[k])
        assert not any(br[:2 * P])


def test_cartan_action():
    R = build_root_system("C3")
    A = build_chevalley(R)
    C = A.structure_tensor
    P = R.n_pos
    for i in range(R.rank):
        for j in range(R.rank):
            assert C[2 * P + i, j, j] == R.cartan[i][j]


def test_negative_pairs_sign_rule():
    R = build_root_system("B3")
    A = build_chevalley(R)
    for a in range(R.n_pos):
        for b in range(R.n_pos):
            assert A.N(R.neg(a), R.neg(b)) == -A.N(a, b)


def test_ad_matrix_columns():
    R = build_root_system("A2")
    A = build_chevalley(R)
    x = [0] * A.dim
    x[0] = 1
    ad = A.ad(x)
    for b in range(A.dim):
        e = [0] * A.dim
        e[b] = 1
        assert list(ad[:, b]) == list(A.bracket(x, e))


def test_memoized():
    R = build_root_system("G2")
    assert build_chevalley(R) is build_chevalley(R)
