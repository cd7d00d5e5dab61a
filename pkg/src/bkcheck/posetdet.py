"""Chain expansion of almost-triangular determinants and the Möbius function.

For an interval ``phi_0 < ... < phi_k`` (numbered along a linear extension)
and a ``k x k`` matrix with rows ``phi_0..phi_{k-1}``, columns
``phi_1..phi_k``, unit entries ``m_ii`` for ``0 < i < k`` and
``m_ij != 0 => phi_i <= phi_j``,

    det M = sum over chains phi_0 < phi_j0 < ... < phi_js < phi_k  (s >= -1)
            of (-1)^(k+s) m_{0 j0} m_{j0 j1} ... m_{js k}.

The term ``s = -1`` is the chain without interior elements, ``m_{0k}``.
With the 0/1 incidence matrix this gives ``mu(phi_0, phi_k) = (-1)^k det M``.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterator, Sequence

import numpy as np

from .errors import InvariantError, PreconditionError
from .linalg import det as exact_det


class FinitePoset:
    """Partial order given by a reflexive, transitive, antisymmetric bit matrix."""

    def __init__(self, elements: Sequence[Hashable], leq: np.ndarray):
        leq = np.asarray(leq, dtype=bool)
        n = len(elements)
        if leq.shape != (n, n):
            raise PreconditionError("relation matrix has the wrong shape")
        if not leq.diagonal().all():
            raise PreconditionError("relation is not reflexive")
        if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
            raise PreconditionError("relation is not antisymmetric")
        if n and ((leq.astype(np.int64) @ leq.astype(np.int64) > 0) & ~leq).any():
            raise PreconditionError("relation is not transitive")
        self.elements = tuple(elements)
        self.leq = leq
        self.leq.setflags(write=False)
        self.order = self._linear_extension()
        self.position = {a: i for i, a in enumerate(self.order)}

    @classmethod
    def from_relations(cls, elements: Sequence[Hashable],
                       relations: Sequence[tuple[int, int]]) -> "FinitePoset":
        """Transitive closure of ``a <= b`` for the given index pairs."""
        n = len(elements)
        m = np.eye(n, dtype=bool)
        for a, b in relations:
            m[a, b] = True
        for k in range(n):
            m |= m[:, k:k + 1] & m[k:k + 1, :]
        return cls(elements, m)

    def _linear_extension(self) -> tuple[int, ...]:
        """Topological order; ties broken by smallest index."""
        n = len(self.elements)
        strict = self.leq & ~np.eye(n, dtype=bool)
        indeg = strict.sum(axis=0).tolist()
        heap = [i for i in range(n) if indeg[i] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            a = heapq.heappop(heap)
            out.append(a)
            for b in np.nonzero(strict[a])[0].tolist():
                indeg[b] -= 1
                if indeg[b] == 0:
                    heapq.heappush(heap, b)
        return tuple(out)

    def __len__(self):
        return len(self.elements)

    def le(self, a: int, b: int) -> bool:
        return bool(self.leq[a, b])

    def lt(self, a: int, b: int) -> bool:
        return a != b and bool(self.leq[a, b])

    def interval(self, a: int, b: int) -> tuple[int, ...]:
        """Elements of ``[a; b]`` in linear-extension order (``a`` first, ``b`` last)."""
        if not self.le(a, b):
            raise PreconditionError("interval endpoints are not comparable")
        return tuple(c for c in self.order if self.leq[a, c] and self.leq[c, b])

    def comparable_pairs(self) -> Iterator[tuple[int, int]]:
        for a in self.order:
            for b in self.order:
                if self.leq[a, b]:
                    yield a, b


@dataclass(frozen=True)
class ChainMatrix:
    """Rows ``chain[0..k-1]``, columns ``chain[1..k]``; ``entries[i][j-1] = m_ij``."""

    poset: FinitePoset
    chain: tuple[int, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def k(self) -> int:
        return len(self.chain) - 1

    def m(self, i: int, j: int) -> Fraction:
        return self.entries[i][j - 1]

    def validate(self) -> None:
        P, c, k = self.poset, self.chain, self.k
        if k < 1:
            raise PreconditionError("need at least two elements")
        if len(self.entries) != k or any(len(r) != k for r in self.entries):
            raise PreconditionError("matrix must be k x k")
        for i, j in zip(c, c[1:]):
            if P.position[j] <= P.position[i]:
                raise PreconditionError("labels are not numbered along a linear extension")
        for i in range(1, k):
            if self.m(i, i) != 1:
                raise InvariantError(f"m_{i}{i} is not 1")
        for i in range(k):
            for j in range(1, k + 1):
                if self.m(i, j) and not P.le(c[i], c[j]):
                    raise InvariantError(f"m_{i}{j} is nonzero but phi_{i} is not below phi_{j}")


def interval_chain_matrix(P: FinitePoset, a: int, b: int, entries=None) -> ChainMatrix:
    """Chain matrix on ``[a; b]``; the 0/1 incidence matrix when ``entries`` is None."""
    chain = P.interval(a, b)
    k = len(chain) - 1
    if entries is None:
        entries = [[Fraction(int(P.le(chain[i], chain[j]))) for j in range(1, k + 1)]
                   for i in range(k)]
    return ChainMatrix(P, chain, tuple(tuple(Fraction(x) for x in r) for r in entries))


def random_chain_matrix(P: FinitePoset, a: int, b: int, rng: np.random.Generator) -> ChainMatrix:
    """Random rational entries on the allowed pattern, unit diagonal."""
    chain = P.interval(a, b)
    k = len(chain) - 1
    rows = []
    for i in range(k):
        row = []
        for j in range(1, k + 1):
            if i == j:
                row.append(Fraction(1))
            elif P.le(chain[i], chain[j]):
                row.append(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))))
            else:
                row.append(Fraction(0))
        rows.append(tuple(row))
    return ChainMatrix(P, chain, tuple(rows))


def chain_sum(M: ChainMatrix) -> Fraction:
    """The signed sum over strict chains from ``phi_0`` to ``phi_k``."""
    P, c, k = M.poset, M.chain, M.k
    total = Fraction(0)
    # stack of (last index, product so far, number of interior elements)
    stack = [(0, Fraction(1), 0)]
    while stack:
        i, prod, n = stack.pop()
        if P.lt(c[i], c[k]):
            val = prod * M.m(i, k)
            if val:
                # s = n - 1 interior elements beyond the first
                total += val if (k + n - 1) % 2 == 0 else -val
        for j in range(i + 1, k):
            if P.lt(c[i], c[j]):
                mij = M.m(i, j)
                if mij:
                    stack.append((j, prod * mij, n + 1))
    return total


def direct_det(M: ChainMatrix) -> Fraction:
    return Fraction(exact_det([list(r) for r in M.entries]))


def chain_expansion_det(P: FinitePoset, M: ChainMatrix) -> Fraction:
    """Determinant by chain expansion, asserted equal to the direct determinant."""
    if M.poset is not P:
        raise PreconditionError("matrix belongs to another poset")
    M.validate()
    a = chain_sum(M)
    b = direct_det(M)
    if a != b:
        raise InvariantError(f"chain expansion {a} differs from determinant {b}")
    return a


def mobius_bruteforce(P: FinitePoset, a: int, b: int) -> int:
    """``mu(a, b)`` from ``mu(a, a) = 1`` and ``sum_{a <= c <= b} mu(a, c) = 0``."""
    if not P.le(a, b):
        raise PreconditionError("a is not below b")
    chain = P.interval(a, b)
    mu: dict[int, int] = {}
    for c in chain:
        if c == a:
            mu[c] = 1
        else:
            mu[c] = -sum(mu[z] for z in mu if P.le(z, c))
    return mu[b]


def mobius_via_det(P: FinitePoset, a: int, b: int) -> int:
    """``(-1)^k det M`` for the incidence chain matrix of ``[a; b]``."""
    if a == b:
        raise PreconditionError("interval needs at least two elements")
    M = interval_chain_matrix(P, a, b)
    d = chain_expansion_det(P, M)
    if d.denominator != 1:
        raise InvariantError("incidence determinant is not an integer")
    return int(d) * (-1) ** M.k


# -- generators ----------------------------------------------------------------------


def random_poset(n: int, seed: int, density: float = 0.35) -> FinitePoset:
    """Seeded random DAG on ``n`` nodes, transitively closed, labels shuffled."""
    if n > 8:
        raise PreconditionError("random posets are limited to 8 elements")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    rel = [(int(perm[i]), int(perm[j])) for i in range(n) for j in range(i + 1, n)
           if rng.random() < density]
    return FinitePoset(tuple(range(n)), _closure(n, rel))


def _closure(n, rel):
    m = np.eye(n, dtype=bool)
    for a, b in rel:
        m[a, b] = True
    for k in range(n):
        m |= m[:, k:k + 1] & m[k:k + 1, :]
    return m


def boolean_lattice(rank: int) -> FinitePoset:
    n = 1 << rank
    m = np.array([[(i & j) == i for j in range(n)] for i in range(n)], dtype=bool)
    return FinitePoset(tuple(range(n)), m)


def chain_poset(n: int) -> FinitePoset:
    return FinitePoset(tuple(range(n)), np.triu(np.ones((n, n), dtype=bool)))


def bruhat_poset(G) -> FinitePoset:
    """The whole Weyl group under Bruhat order."""
    m = np.zeros((G.order, G.order), dtype=bool)
    for w in range(G.order):
        m[:, w] = G.bruhat_ideal(w)
    return FinitePoset(tuple(range(G.order)), m)


# -- sweeps --------------------------------------------------------------------------


def check_poset(P: FinitePoset, rng: np.random.Generator) -> dict:
    """Möbius and random chain-matrix checks on every interval with two or more elements."""
    intervals = mismatches = dets = 0
    for a, b in P.comparable_pairs():
        if a == b:
            continue
        intervals += 1
        if mobius_via_det(P, a, b) != mobius_bruteforce(P, a, b):
            mismatches += 1
        M = random_chain_matrix(P, a, b, rng)
        chain_expansion_det(P, M)
        dets += 1
    return {"intervals": intervals, "mobius_mismatches": mismatches, "determinants": dets}


def mobius_selftest(posets: int = 50, seed: int = 7, groups: Sequence[str] = ("A2", "B2", "A3")) -> dict:
    from .weyl import enumerate_group

    rng = np.random.default_rng(seed)
    out = {"posets": posets, "seed": seed, "intervals": 0, "determinants": 0,
           "mobius_mismatches": 0, "determinant_mismatches": 0, "bruhat": {}}
    for i in range(posets):
        n = int(rng.integers(2, 9))
        P = random_poset(n, int(rng.integers(0, 2**32)))
        try:
            r = check_poset(P, rng)
        except InvariantError:
            out["determinant_mismatches"] += 1
            continue
        for k in ("intervals", "determinants", "mobius_mismatches"):
            out[k] += r[k]
    for label in groups:
        G = enumerate_group(label)
        P = bruhat_poset(G)
        try:
            r = check_poset(P, rng)
        except InvariantError:
            out["determinant_mismatches"] += 1
            continue
        # Verma: mu(u, w) = (-1)^(l(w) - l(u)) on Bruhat intervals
        verma = sum(1 for a, b in P.comparable_pairs() if a != b and
                    mobius_bruteforce(P, a, b) != (-1) ** (G.length(b) - G.length(a)))
        r["verma_mismatches"] = verma
        out["bruhat"][label] = r
    out["ok"] = (out["mobius_mismatches"] == 0 and out["determinant_mismatches"] == 0
                 and all(r["mobius_mismatches"] == 0 and r["verma_mismatches"] == 0
                         for r in out["bruhat"].values()))
    return out
