"""Belkale-Kumar triples and the combinatorial corollaries attached to them.

A triple ``(u, v, w)`` satisfies ``Phi(u) & Phi(v) = Phi(w)`` and
``Phi(u) | Phi(v) = Phi+``.  Its symmetric form is
``(w1, w2, w3) = (w0 w, u, v)``, for which ``Phi+`` is the disjoint union of
the three sets ``Phi(w0 w_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .errors import PreconditionError
from .lp import feasible_point
from .weyl import WeylGroup, bits, popcount


@dataclass(frozen=True, order=True)
class BKTriple:
    u: int
    v: int
    w: int

    def symmetric(self, G: WeylGroup) -> tuple[int, int, int]:
        return (G.dual(self.w), self.u, self.v)


@dataclass(frozen=True)
class WeightTriple:
    """Three weights in fundamental-weight coordinates."""

    lambdas: tuple[tuple[Fraction, ...], tuple[Fraction, ...], tuple[Fraction, ...]]

    @property
    def strictly_dominant(self) -> bool:
        return all(c > 0 for lam in self.lambdas for c in lam)


def enumerate_bk_triples(G: WeylGroup) -> Iterator[BKTriple]:
    """Stream all BK triples ordered by ``(u, v)``; never materializes ``W x W``."""
    A = G.inv_arr
    full = np.uint64(G.R.full_mask)
    lengths = G.lengths
    N = G.N
    for u in range(G.order):
        mu = A[u]
        # l(u) + l(v) >= N is necessary for the union to be everything
        cand = np.nonzero((lengths >= N - lengths[u]) & ((A | mu) == full))[0]
        if not len(cand):
            continue
        ws = G.lookup_masks(A[cand] & mu)
        for v, w in zip(cand[ws >= 0].tolist(), ws[ws >= 0].tolist()):
            yield BKTriple(u, v, w)


def is_bk(G: WeylGroup, u: int, v: int, w: int) -> bool:
    return (G.inv[u] & G.inv[v]) == G.inv[w] and (G.inv[u] | G.inv[v]) == G.R.full_mask


def bk_constant(G: WeylGroup, u: int, v: int, w: int,
                cup: Callable[[int, int, int], Fraction]) -> Fraction:
    """``c~_uv^w``: the cup constant when the BK condition holds, else 0."""
    if not is_bk(G, u, v, w):
        return Fraction(0)
    return Fraction(cup(u, v, w))


def check_length_identity(G: WeylGroup, t: BKTriple) -> bool:
    return G.length(t.u) + G.length(t.v) == G.length(t.w) + G.length(G.w0)


def check_partition(G: WeylGroup, t: BKTriple) -> bool:
    """``Phi+`` is the disjoint union of the three ``Phi(w_i^vee)``."""
    sets = [G.inv[G.dual(x)] for x in t.symmetric(G)]
    return (sets[0] | sets[1] | sets[2]) == G.R.full_mask and \
        sum(popcount(s) for s in sets) == G.N


def check_bruhat_corollary(G: WeylGroup, t: BKTriple) -> bool:
    """The only ``x`` with ``w_i x <= w_i`` for all three ``i`` is ``e``."""
    T = G.multiplication_table()
    ok = np.ones(G.order, dtype=bool)
    for wi in t.symmetric(G):
        ok &= G.bruhat_ideal(wi)[T[wi]]
    return bool(ok[0]) and int(ok.sum()) == 1


def simultaneous_descent_set(G: WeylGroup, t: BKTriple) -> list[int]:
    T = G.multiplication_table()
    ok = np.ones(G.order, dtype=bool)
    for wi in t.symmetric(G):
        ok &= G.bruhat_ideal(wi)[T[wi]]
    return np.nonzero(ok)[0].tolist()


def check_descent_identities(G: WeylGroup, t: BKTriple) -> bool:
    ws = t.symmetric(G)
    r = G.rank
    return (sum(G.d(x) for x in ws) == 2 * r
            and sum(G.d(G.dual(x)) for x in ws) == r)


def descent_question_holds(G: WeylGroup, a: int, b: int) -> bool:
    lhs = G.d(G.dual(a)) + G.d(G.dual(b))
    ab = G.mul(a, int(G.inverse[b]))
    ba = G.mul(b, int(G.inverse[a]))
    return lhs == G.d(ab) or lhs == G.d(ba)


def check_descent_question(G: WeylGroup, t: BKTriple) -> bool:
    """The disjunction for each of the three index pairs of the symmetric form."""
    w1, w2, w3 = t.symmetric(G)
    return all(descent_question_holds(G, a, b) for a, b in ((w1, w2), (w1, w3), (w2, w3)))


# -- rho products --------------------------------------------------------------------


def rho_products(G: WeylGroup) -> list[Fraction]:
    """``prod over Phi(x^-1) of <rho, alpha>`` for every element ``x``."""
    if not hasattr(G, "_rho_products"):
        R = G.R
        vals = [R.pairing(R.rho, k) for k in range(R.n_pos)]
        out = []
        for x in range(G.order):
            p = Fraction(1)
            for k in bits(G.inv[int(G.inverse[x])]):
                p *= vals[k]
            out.append(p)
        G._rho_products = out
    return G._rho_products


def check_rho_product(G: WeylGroup, w: int, w1: int, w2: int) -> bool:
    a, b, c = G.inv[w], G.inv[w1], G.inv[w2]
    if b & c or (b | c) != a:
        raise PreconditionError("Phi(w) is not the disjoint union of Phi(w1) and Phi(w2)")
    P = rho_products(G)
    return P[w] == P[w1] * P[w2]


# -- regular faces -------------------------------------------------------------------


def _face_blocks(G: WeylGroup, t: BKTriple):
    """Matrices ``w_i^-1 Omega`` (root coordinates) for the three weights."""
    R = G.R
    r = R.rank
    omega = R.fundamental_weights
    blocks = []
    for wi in t.symmetric(G):
        m = G.matrix(int(G.inverse[wi]))
        cols = [[sum(m[i][k] * omega[j][k] for k in range(r)) for i in range(r)]
                for j in range(r)]
        blocks.append(cols)
    return blocks


def face_residual(G: WeylGroup, t: BKTriple, wt: WeightTriple) -> tuple[Fraction, ...]:
    """``w1^-1 l1 + w2^-1 l2 + w3^-1 l3`` in root coordinates."""
    r = G.rank
    blocks = _face_blocks(G, t)
    out = [Fraction(0)] * r
    for cols, lam in zip(blocks, wt.lambdas):
        for j in range(r):
            for i in range(r):
                out[i] += cols[j][i] * lam[j]
    return tuple(out)


def face_witness(G: WeylGroup, t: BKTriple) -> WeightTriple | None:
    """Strictly dominant ``(l1, l2, l3)`` with ``sum w_i^-1 l_i = 0``, or ``None``.

    The equation is homogeneous, so a strictly dominant solution exists iff
    one exists with every coordinate at least 1; writing ``c = 1 + mu`` turns
    this into an LP feasibility question for ``mu >= 0``.
    """
    r = G.rank
    blocks = _face_blocks(G, t)
    A = [[blocks[b][j][i] for b in range(3) for j in range(r)] for i in range(r)]
    rhs = [-sum(row) for row in A]
    mu = feasible_point(A, rhs)
    if mu is None:
        return None
    c = [1 + m for m in mu]
    wt = WeightTriple(tuple(tuple(c[b * r:(b + 1) * r]) for b in range(3)))
    if any(face_residual(G, t, wt)) or not wt.strictly_dominant:
        raise AssertionError("face witness failed re-substitution")
    return wt


# -- batch ---------------------------------------------------------------------------

CHECKS = {
    "length": lambda G, t: check_length_identity(G, t),
    "partition": lambda G, t: check_partition(G, t),
    "descents": check_descent_identities,
    "question": check_descent_question,
    "bruhat": check_bruhat_corollary,
    "face": lambda G, t: face_witness(G, t) is not None,
}


def run_checks(G: WeylGroup, names, triples=None) -> dict:
    """Apply named checks to every triple; returns counts and failing triples."""
    triples = enumerate_bk_triples(G) if triples is None else triples
    total = 0
    fails: dict[str, list[BKTriple]] = {n: [] for n in names}
    for t in triples:
        total += 1
        for n in names:
            if not CHECKS[n](G, t):
                fails[n].append(t)
    return {"triples": total, "failures": fails}


def verify_rho(G: WeylGroup) -> dict:
    """ρ-product identity over every decomposition ``Phi(w) = Phi(w1) u Phi(w2)``."""
    count = 0
    bad = []
    for w in range(G.order):
        xs, ys = G.decompositions(w)
        for x, y in zip(xs.tolist(), ys.tolist()):
            count += 1
            if not check_rho_product(G, w, x, y):
                bad.append((w, x, y))
    return {"decompositions": count, "violations": bad}


def sample_triples(G: WeylGroup, k: int, seed: int) -> list[BKTriple]:
    """``k`` distinct BK triples chosen uniformly by a seeded generator (sorted)."""
    allt = list(enumerate_bk_triples(G))
    if k >= len(allt):
        return allt
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(allt), size=k, replace=False)
    return sorted(allt[i] for i in pick)
