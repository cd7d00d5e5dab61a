"""Theorem-2 brute force, reduction subspaces and irreducible triples.

Reducibility of a triple ``beta < phi < gamma`` asks for a proper subspace
``F`` containing ``beta`` such that ``phi - beta`` and ``gamma - phi`` are
non-negative combinations of roots in ``F``.  Such an ``F`` may always be
enlarged to a hyperplane spanned by roots: it only gains roots.  For a
root-spanned hyperplane ``H`` the roots ``H & Phi+`` form a positive system
of the subsystem ``H & Phi``, so their cone is simplicial on its simple
roots.  Membership therefore reduces to solving one square system and
checking signs, vectorized over all hyperplanes at once.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterator, Sequence

import numpy as np

from .errors import PreconditionError, ResourceError
from .linalg import inverse, matmul, nullspace, rank
from .lp import feasible_point
from .rootsys import RootSystem
from .weyl import WeylGroup

log = logging.getLogger(__name__)

SUM_CONDITIONS = ("gamma+beta", "gamma+phi", "rank7")


@dataclass(frozen=True, order=True)
class Triple:
    beta: int
    phi: int
    gamma: int

    def flags(self, R: RootSystem) -> dict[str, bool]:
        A = R.add_table
        return {
            "gamma+beta": bool(A[self.gamma, self.beta] >= 0),
            "gamma+phi": bool(A[self.gamma, self.phi] >= 0),
            "phi+beta": bool(A[self.phi, self.beta] >= 0),
        }

    def coords(self, R: RootSystem) -> tuple[tuple[int, ...], ...]:
        return (R.coords[self.beta], R.coords[self.phi], R.coords[self.gamma])


@dataclass(frozen=True)
class ReductionWitness:
    """Subspace ``F`` (root basis) with non-negative certificates for
    ``phi - beta`` and ``gamma - phi`` over roots of ``F``."""

    basis: tuple[tuple[int, ...], ...]
    roots: tuple[int, ...]
    coeffs_lower: tuple[Fraction, ...]
    coeffs_upper: tuple[Fraction, ...]

    def verify(self, R: RootSystem, t: Triple) -> bool:
        r = R.rank
        if rank([list(b) for b in self.basis]) >= r:
            return False
        span_rank = rank([list(b) for b in self.basis])
        if rank([list(b) for b in self.basis] + [list(R.coords[t.beta])]) != span_rank:
            return False
        for k in self.roots:
            if rank([list(b) for b in self.basis] + [list(R.coords[k])]) != span_rank:
                return False
        for coeffs, lo, hi in ((self.coeffs_lower, t.beta, t.phi),
                               (self.coeffs_upper, t.phi, t.gamma)):
            if any(c < 0 for c in coeffs):
                return False
            total = [sum((c * R.coords[k][i] for c, k in zip(coeffs, self.roots)), Fraction(0))
                     for i in range(r)]
            if total != [R.coords[hi][i] - R.coords[lo][i] for i in range(r)]:
                return False
        return True


# -- candidates ------------------------------------------------------------------------


def candidate_triples(R: RootSystem, sum_condition: str = "gamma+beta") -> Iterator[Triple]:
    """All ``beta < phi < gamma`` in ``Phi+`` passing the sum filter, sorted."""
    if sum_condition not in SUM_CONDITIONS:
        raise PreconditionError(f"unknown sum condition {sum_condition!r}")
    N = R.n_pos
    L = R.leq_matrix
    A = R.add_table
    for b in range(N):
        for g in range(N):
            if g == b or not L[b, g]:
                continue
            if sum_condition in ("gamma+beta", "rank7") and A[g, b] < 0:
                continue
            for p in range(N):
                if p in (b, g) or not (L[b, p] and L[p, g]):
                    continue
                if sum_condition == "gamma+phi" and A[g, p] < 0:
                    continue
                if sum_condition == "rank7" and (A[p, b] < 0 or A[p, g] < 0):
                    continue
                yield Triple(b, p, g)


# -- root-spanned flats ------------------------------------------------------------------


def _int_normals(R: RootSystem, basis: Sequence[int]) -> np.ndarray:
    rows = [list(R.coords[k]) for k in basis]
    ns = nullspace(rows, R.rank)
    out = []
    for v in ns:
        m = lcm(*(x.denominator for x in v))
        out.append([int(x * m) for x in v])
    return np.array(out, dtype=np.int64).reshape(len(out), R.rank)


def _mask_from_bool(b: np.ndarray) -> int:
    return int(sum(1 << int(k) for k in np.nonzero(b)[0]))


def _restrict_normals(normals: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Integer basis of ``{n in span(normals) : n . vec = 0}``."""
    vals = normals @ vec
    nz = np.nonzero(vals)[0]
    if not len(nz):
        return normals
    p = nz[0]
    rows = [vals[p] * normals[i] - vals[i] * normals[p] for i in range(len(normals)) if i != p]
    out = []
    for row in rows:
        g = np.gcd.reduce(np.abs(row))
        out.append(row // g if g > 1 else row)
    return np.array(out, dtype=np.int64).reshape(len(out), normals.shape[1])


def root_flats(R: RootSystem, rank_: int, budget: int = 5_000_000) -> dict[int, tuple[int, ...]]:
    """Root-spanned subspaces of dimension ``rank_``, keyed by the bitmask of
    positive roots they contain, with an independent root basis.

    Each flat carries an integer basis of its annihilator; adding a root
    cuts that basis down by one integer elimination step.
    """
    pos = R.array[: R.n_pos]
    eye = np.eye(R.rank, dtype=np.int64)
    flats = {}
    for k in range(R.n_pos):
        nm = _restrict_normals(eye, pos[k])
        flats[_mask_from_bool(np.all(pos @ nm.T == 0, axis=1))] = ((k,), nm)
    work = 0
    for _ in range(1, rank_):
        nxt: dict[int, tuple] = {}
        for mask, (basis, nm) in flats.items():
            covered = mask
            for j in range(R.n_pos):
                if (covered >> j) & 1:
                    continue
                nm2 = _restrict_normals(nm, pos[j])
                inside = np.all(pos @ nm2.T == 0, axis=1) if len(nm2) else \
                    np.ones(R.n_pos, dtype=bool)
                m2 = _mask_from_bool(inside)
                covered |= m2
                if m2 not in nxt:
                    nxt[m2] = (basis + (j,), nm2)
                work += 1
                if work > budget:
                    raise ResourceError(f"flat enumeration for {R.label} exceeds budget {budget}")
        flats = nxt
    return {m: b for m, (b, _) in flats.items()}


@dataclass
class HyperplaneTable:
    """Vectorized data for all root-spanned hyperplanes of a root system."""

    masks: list[int]
    bases: list[tuple[int, ...]]
    simple: list[tuple[int, ...]]        # simple roots of H & Phi+
    normals: np.ndarray                  # (nH, r) integer normals
    coord_maps: np.ndarray               # (nH, dim, r) scaled integer left inverses
    scale: np.ndarray                    # (nH,) positive denominators


def simple_roots_of(R: RootSystem, mask: int) -> tuple[int, ...]:
    """Indecomposable elements of the positive roots in ``mask``."""
    inside = [k for k in range(R.n_pos) if (mask >> k) & 1]
    A = R.add_table
    decomposable = set()
    for i in inside:
        for j in inside:
            k = int(A[i, j])
            if k >= 0 and (mask >> k) & 1:
                decomposable.add(k)
    return tuple(k for k in inside if k not in decomposable)


def hyperplane_table(R: RootSystem, dim: int | None = None) -> HyperplaneTable:
    """Root-spanned subspaces of dimension ``dim`` (default ``rank - 1``)."""
    key = (R.label, dim)
    if key in _HCACHE:
        return _HCACHE[key]
    r = R.rank
    dim = r - 1 if dim is None else dim
    if dim < 1:
        raise PreconditionError("rank-1 systems have no proper root-spanned subspace")
    flats = root_flats(R, dim)
    masks, bases, simples, normals, maps, scales = [], [], [], [], [], []
    for mask in sorted(flats):
        basis = flats[mask]
        simple = simple_roots_of(R, mask)
        if len(simple) != dim:
            raise AssertionError("simple system of a flat has the wrong size")
        B = [[R.coords[k][i] for k in simple] for i in range(r)]  # r x dim
        Bt = [list(x) for x in zip(*B)]
        C = matmul(inverse(matmul(Bt, B)), Bt)                     # dim x r
        m = lcm(*(x.denominator for row in C for x in row))
        masks.append(mask)
        bases.append(basis)
        simples.append(simple)
        normals.append(_int_normals(R, simple))
        maps.append([[int(x * m) for x in row] for row in C])
        scales.append(m)
    tab = HyperplaneTable(masks, bases, simples,
                          np.array(normals, dtype=np.int64).reshape(len(masks), -1, r),
                          np.array(maps, dtype=np.int64), np.array(scales, dtype=np.int64))
    _HCACHE[key] = tab
    return tab


_HCACHE: dict = {}


def _reducing_hyperplanes(R: RootSystem, tab: HyperplaneTable, t: Triple) -> np.ndarray:
    arr = R.array
    vecs = np.stack([arr[t.beta], arr[t.phi], arr[t.gamma]])          # 3 x r
    contain = np.all(np.einsum("hkr,vr->hkv", tab.normals, vecs) == 0, axis=(1, 2))
    d1 = arr[t.phi] - arr[t.beta]
    d2 = arr[t.gamma] - arr[t.phi]
    c1 = tab.coord_maps @ d1
    c2 = tab.coord_maps @ d2
    ok = contain & np.all(c1 >= 0, axis=1) & np.all(c2 >= 0, axis=1)
    return np.nonzero(ok)[0]


def is_reducible(R: RootSystem, t: Triple, maxdim: int | None = None) -> ReductionWitness | None:
    """Witness subspace for a reducible triple, or ``None`` if irreducible.

    Only subspaces of dimension ``maxdim`` (default ``rank - 1``) spanned by
    roots are inspected; every smaller valid subspace lies inside one.
    """
    if R.rank < 2:
        return None
    tab = hyperplane_table(R, maxdim)
    hits = _reducing_hyperplanes(R, tab, t)
    if not len(hits):
        return None
    h = int(hits[0])
    simple = tab.simple[h]
    C = tab.coord_maps[h]
    m = int(tab.scale[h])
    arr = R.array
    lower = tuple(Fraction(int(v), m) for v in C @ (arr[t.phi] - arr[t.beta]))
    upper = tuple(Fraction(int(v), m) for v in C @ (arr[t.gamma] - arr[t.phi]))
    wit = ReductionWitness(tuple(R.coords[k] for k in simple), simple, lower, upper)
    if not wit.verify(R, t):
        raise AssertionError("reduction witness failed re-substitution")
    return wit


def is_reducible_lp(R: RootSystem, t: Triple, maxdim: int | None = None) -> bool:
    """Oracle: spans of ``{beta} u T`` with exact LP cone membership (small ranks)."""
    r = R.rank
    maxdim = r - 1 if maxdim is None else maxdim
    pos = range(R.n_pos)
    seen = set()
    for size in range(0, maxdim):
        for T in itertools.combinations(pos, size):
            basis = [list(R.coords[t.beta])] + [list(R.coords[k]) for k in T]
            if rank(basis) != len(basis):
                continue
            inside = tuple(k for k in pos if rank(basis + [list(R.coords[k])]) == len(basis))
            if inside in seen:
                continue
            seen.add(inside)
            ok = True
            for lo, hi in ((t.beta, t.phi), (t.phi, t.gamma)):
                A = [[R.coords[k][i] for k in inside] for i in range(r)]
                b = [R.coords[hi][i] - R.coords[lo][i] for i in range(r)]
                if feasible_point(A, b) is None:
                    ok = False
                    break
            if ok:
                return True
    return False


def orbit_key(R: RootSystem, t: Triple) -> tuple:
    return min(tuple(R.coords[R.apply_automorphism(p, k)] for k in (t.beta, t.phi, t.gamma))
               for p in R.automorphisms)


def enumerate_irreducible(R: RootSystem, sum_condition: str = "gamma+beta",
                          up_to_aut: bool = False, max_rank: int = 7) -> list[Triple]:
    if R.rank > max_rank:
        raise ResourceError(f"irreducible-triple search limited to rank <= {max_rank}")
    if R.rank < 2:
        return []
    tab = hyperplane_table(R)
    out = [t for t in candidate_triples(R, sum_condition)
           if not len(_reducing_hyperplanes(R, tab, t))]
    if up_to_aut:
        reps = {}
        for t in out:
            reps.setdefault(orbit_key(R, t), t)
        out = sorted(reps.values(), key=lambda t: orbit_key(R, t))
    return out


# -- decomposition brute force -----------------------------------------------------------


def _sum_pairs(R: RootSystem):
    """Ordered pairs ``(beta, gamma)`` of positive roots with ``beta + gamma`` a root."""
    A = R.add_table
    N = R.n_pos
    return [(b, g, int(A[b, g])) for b in range(N) for g in range(N) if A[b, g] >= 0]


def hypothesis_instances(G: WeylGroup):
    """Arrays ``(w, x, y)`` with ``Phi(w) = Phi(x) u Phi(y)`` disjointly."""
    ws, xs, ys = [], [], []
    for w in range(G.order):
        x, y = G.decompositions(w)
        ws.append(np.full(len(x), w, dtype=np.int64))
        xs.append(x)
        ys.append(y)
    return np.concatenate(ws), np.concatenate(xs), np.concatenate(ys)


def verify_combi(G: WeylGroup) -> dict:
    """Exhaustive check that ``Phi2 & [beta; gamma]`` is empty under the hypotheses.

    Also records instances where ``gamma + beta`` is not in ``Phi1``."""
    R = G.R
    ws, xs, ys = hypothesis_instances(G)
    A = G.inv_arr
    P1, P2, P3 = A[xs], A[ys], A[ws]
    one = np.uint64(1)
    checked = 0
    violations = []
    thetax_fail = []
    for b, g, k in _sum_pairs(R):
        sel = (((P1 >> np.uint64(b)) & one) == one) & (((P3 >> np.uint64(g)) & one) == 0) \
            & (((P3 >> np.uint64(k)) & one) == one)
        n = int(sel.sum())
        if not n:
            continue
        checked += n
        iv = np.uint64(R.interval(b, g))
        bad = np.nonzero(sel & ((P2 & iv) != 0))[0]
        violations.extend((int(ws[i]), int(xs[i]), int(ys[i]), b, g) for i in bad)
        tx = np.nonzero(sel & (((P1 >> np.uint64(k)) & one) == 0))[0]
        thetax_fail.extend((int(ws[i]), int(xs[i]), int(ys[i]), b, g) for i in tx)
    return {"instances": int(len(ws)), "checked": checked,
            "violations": sorted(violations), "thetax_failures": sorted(thetax_fail)}


def check_thetax(R: RootSystem, P1: int, P2: int, P3: int, beta: int, gamma: int) -> bool:
    """``gamma + beta`` lies in ``Phi1`` under the Theorem-2 hypotheses."""
    k = int(R.add_table[beta, gamma])
    if (P1 & P2) or (P1 | P2) != P3 or not (P1 >> beta) & 1 or (P3 >> gamma) & 1 \
            or k < 0 or not (P3 >> k) & 1:
        raise PreconditionError("Theorem-2 hypotheses do not hold")
    return bool((P1 >> k) & 1)


# -- simply-laced helpers -------------------------------------------------------------


def _require_ade(R: RootSystem):
    if any(s not in "ADE" for s, _ in R.components):
        raise PreconditionError(f"{R.label} is not simply laced")


def killing_trichotomy(R: RootSystem, a: int, b: int) -> int:
    """``(beta, alpha)`` in ``{-1, 0, 1}`` with the sum/difference pattern verified."""
    _require_ade(R)
    if a == b or a == R.neg(b):
        raise PreconditionError("roots must be distinct and not opposite")
    val = R.form(b, a)
    ca, cb = R.coords[a], R.coords[b]
    diff = tuple(y - x for x, y in zip(ca, cb)) in R.index
    summ = tuple(x + y for x, y in zip(ca, cb)) in R.index
    expected = {1: (True, False), 0: (False, False), -1: (False, True)}
    if val not in expected or expected[int(val)] != (diff, summ):
        raise AssertionError(f"trichotomy fails for roots {ca}, {cb}")
    return int(val)


def min_positive_summands(R: RootSystem, vec: Sequence[int], limit: int) -> int | None:
    """Fewest positive roots summing to ``vec`` (searching up to ``limit``)."""
    vec = tuple(vec)
    pos = R.coords[: R.n_pos]
    frontier = {vec}
    for s in range(limit + 1):
        if any(all(v == 0 for v in x) for x in frontier):
            return s
        nxt = set()
        for x in frontier:
            for c in pos:
                y = tuple(a - b for a, b in zip(x, c))
                if all(v >= 0 for v in y):
                    nxt.add(y)
        frontier = nxt
    return None


def decomposition_bound(R: RootSystem, beta: int, gamma: int) -> bool:
    """``gamma - beta`` is a sum of at most ``2 - (gamma, beta)`` positive roots."""
    _require_ade(R)
    if not R.leq(beta, gamma) or beta >= R.n_pos or gamma >= R.n_pos:
        raise PreconditionError("need positive roots beta <= gamma")
    bound = 2 - int(R.form(gamma, beta))
    d = [y - x for x, y in zip(R.coords[beta], R.coords[gamma])]
    return min_positive_summands(R, d, bound) is not None
