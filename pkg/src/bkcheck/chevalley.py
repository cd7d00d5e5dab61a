"""Chevalley basis with explicit structure constants.

Signs follow the extraspecial-pair convention: for each non-simple positive
root ``xi`` the pair ``(a, b)`` with ``a + b = xi`` and ``a`` of smallest
index gets ``N_{a,b} = +(p + 1)``.  All other constants follow from

* ``N_{r,s} = -N_{s,r}`` and ``N_{-r,-s} = -N_{r,s}``;
* ``N_{r,s}/(t,t) = N_{s,t}/(r,r) = N_{t,r}/(s,s)`` when ``r + s + t = 0``;
* the four-root relation used to propagate from extraspecial pairs.

Basis order: ``e_phi`` for every root index, then ``h_1..h_r`` (simple coroots).
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .rootsys import RootSystem


class ChevalleyAlgebra:
    def __init__(self, R: RootSystem):
        self.R = R
        self.N_pos = R.n_pos
        self.dim = 2 * R.n_pos + R.rank
        self._pos: dict[tuple[int, int], int] = {}
        self._build()
        self._table = self._full_table()

    # -- construction ---------------------------------------------------------

    def _sq(self, k: int) -> Fraction:
        return self.R.norm_sq_coords(self.R.coords[k])

    def _p(self, a: int, b: int) -> int:
        """Largest ``p`` with ``phi_b - p phi_a`` a root."""
        R = self.R
        ca, cb = R.coords[a], R.coords[b]
        p = 0
        while tuple(y - (p + 1) * x for x, y in zip(ca, cb)) in R.index:
            p += 1
        return p

    def _build(self):
        R = self.R
        N = R.n_pos
        A = R.add_table
        by_height = sorted(range(N), key=lambda k: (R.heights[k], k))
        self.extraspecial = {}
        for xi in by_height:
            pairs = [(a, b) for a in range(N) for b in range(a + 1, N) if A[a, b] == xi]
            if not pairs:
                continue
            a0, b0 = min(pairs)
            self.extraspecial[xi] = (a0, b0)
            self._pos[(a0, b0)] = self._p(a0, b0) + 1
            n0 = self._pos[(a0, b0)]
            for a, b in pairs:
                if (a, b) == (a0, b0):
                    continue
                # four-root relation with r=a, s=b, t=-a0, u=-b0
                ma0, mb0 = R.neg(a0), R.neg(b0)
                total = Fraction(0)
                k1 = int(A[b, ma0])
                if k1 >= 0:
                    total += Fraction(self.N(b, ma0) * self.N(a, mb0)) / self._sq(k1)
                k2 = int(A[ma0, a])
                if k2 >= 0:
                    total += Fraction(self.N(ma0, a) * self.N(b, mb0)) / self._sq(k2)
                # N_{a,b} N_{-a0,-b0} / (xi,xi) + total = 0, N_{-a0,-b0} = -n0
                val = total * self._sq(xi) / n0
                if val.denominator != 1:
                    raise AssertionError("non-integral structure constant")
                self._pos[(a, b)] = int(val)

    def N(self, r: int, s: int) -> int:
        """Structure constant ``N_{r,s}`` (0 when ``r + s`` is not a root)."""
        R = self.R
        P = self.N_pos
        if R.add_table[r, s] < 0:
            return 0
        rp, sp = r < P, s < P
        if rp and sp:
            return self._pos[(r, s)] if r < s else -self._pos[(s, r)]
        if not rp and not sp:
            return -self.N(R.neg(r), R.neg(s))
        if not rp:
            return -self.N(s, r)
        # r positive, s negative; t = -(r + s) so that r + s + t = 0
        t = R.neg(int(R.add_table[r, s]))
        if t >= P:
            # r + s positive: N_{r,s} = (t,t)/(r,r) N_{s,t}, both s, t negative
            val = self._sq(t) / self._sq(r) * self.N(s, t)
        else:
            # r + s negative: N_{r,s} = (t,t)/(s,s) N_{t,r}, both t, r positive
            val = self._sq(t) / self._sq(s) * self.N(t, r)
        if val.denominator != 1:
            raise AssertionError("non-integral structure constant")
        return int(val)

    def _full_table(self) -> np.ndarray:
        """Dense structure tensor ``C[a, b, c]`` with ``[x_a, x_b] = sum_c C[a,b,c] x_c``."""
        R = self.R
        P = self.N_pos
        d = self.dim
        r = R.rank
        C = np.zeros((d, d, d), dtype=np.int64)
        for a in range(2 * P):
            for b in range(2 * P):
                k = int(R.add_table[a, b])
                if k >= 0:
                    C[a, b, k] = self.N(a, b)
                elif b == R.neg(a):
                    sign = 1 if a < P else -1
                    cor = R.coroots[a if a < P else b]
                    for i in range(r):
                        C[a, b, 2 * P + i] = sign * cor[i]
            for i in range(r):
                # [h_i, e_a] = <phi_a, alpha_i^vee> e_a
                val = sum(R.coords[a][j] * R.cartan[i][j] for j in range(r))
                C[2 * P + i, a, a] = val
                C[a, 2 * P + i, a] = -val
        return C

    # -- queries ---------------------------------------------------------------

    @property
    def structure_tensor(self) -> np.ndarray:
        return self._table

    def bracket(self, x, y):
        """Bracket of two coefficient vectors (integers or Fractions)."""
        C = self._table
        x = np.asarray(x, dtype=object)
        y = np.asarray(y, dtype=object)
        return np.einsum("a,b,abc->c", x, y, C.astype(object))

    def ad(self, x) -> np.ndarray:
        """Matrix of ``ad x`` (columns are images of basis vectors)."""
        C = self._table.astype(object)
        x = np.asarray(x, dtype=object)
        return np.einsum("a,abc->cb", x, C)

    def jacobi_defect(self) -> int:
        """Number of basis triples where the Jacobi identity fails."""
        C = self._table
        # [[a,b],j] vs [a,[b,j]] - [b,[a,j]]
        lhs = np.einsum("abc,cjd->abjd", C, C)
        rhs = np.einsum("bjk,akd->abjd", C, C) - np.einsum("ajk,bkd->abjd", C, C)
        return int(np.any(lhs != rhs, axis=3).sum())

    def antisymmetry_defect(self) -> int:
        C = self._table
        return int(np.any(C + C.transpose(1, 0, 2) != 0, axis=2).sum())

    def string_length_defect(self) -> int:
        """Pairs with ``|N_{r,s}| != p + 1``."""
        R = self.R
        bad = 0
        for a in range(R.n_roots):
            for b in range(R.n_roots):
                if R.add_table[a, b] >= 0 and abs(self.N(a, b)) != self._p(a, b) + 1:
                    bad += 1
        return bad

    def max_abs_constant(self) -> int:
        R = self.R
        return max((abs(self.N(a, b)) for a in range(R.n_roots) for b in range(R.n_roots)),
                   default=0)


_ALG: dict[str, ChevalleyAlgebra] = {}


def build_chevalley(R: RootSystem) -> ChevalleyAlgebra:
    if R.label not in _ALG:
        _ALG[R.label] = ChevalleyAlgebra(R)
    return _ALG[R.label]
