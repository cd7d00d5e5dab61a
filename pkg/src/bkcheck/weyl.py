"""Weyl groups as permutation tables on the root system.

An element ``w`` is stored through the permutation it induces on root
indices (``perms[w, k]`` is the index of ``w(phi_k)``).  Its identity is the
integer matrix of its action on simple-root coordinates, whose columns are
the images of the simple roots; the first ``rank`` entries of the
permutation determine that matrix, so they serve as the hash key.
"""
from __future__ import annotations

import builtins
import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import PreconditionError, ResourceError
from .rootsys import RootSystem, build_root_system

log = logging.getLogger(__name__)

DEFAULT_CAP = 200_000
FORMAT_VERSION = 1


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for k in indices:
        m |= 1 << k
    return m


@dataclass(frozen=True, eq=False)
class WeylElement:
    """Group element with its cached length, inversion set and reduced word."""

    group: "WeylGroup" = field(repr=False)
    index: int

    @property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        return self.group.matrix(self.index)

    @property
    def length(self) -> int:
        return int(self.group.lengths[self.index])

    @property
    def inversions(self) -> int:
        return self.group.inv[self.index]

    @property
    def word(self) -> tuple[int, ...]:
        return self.group.reduced_word(self.index)

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.matrix == other.matrix

    def __hash__(self):
        return hash(np.asarray(self.matrix, dtype=np.int64).tobytes())

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(self.group, self.group.mul(self.index, other.index))

    def inverse(self) -> "WeylElement":
        return WeylElement(self.group, int(self.group.inverse[self.index]))

    def __repr__(self):
        w = "".join(f"s{i + 1}" for i in self.word) or "e"
        return f"WeylElement({w})"


class WeylGroup:
    """Complete element table of the Weyl group of a root system.

    Elements are numbered in breadth-first order from the identity, so
    index 0 is ``e`` and lengths are non-decreasing along the table.
    """

    def __init__(self, R: RootSystem, cap: int = DEFAULT_CAP, *, _tables=None):
        self.R = R
        self.rank = R.rank
        self.N = R.n_pos
        self._bruhat_memo: OrderedDict = OrderedDict()
        self.bruhat_memo_budget = 1 << 20
        self._ideal_cache: dict[int, np.ndarray] = {}
        if _tables is None:
            self._enumerate(cap)
        else:
            self.perms, self.lengths = _tables
        self._index_tables()

    # -- construction -----------------------------------------------------------

    def _enumerate(self, cap: int):
        R, r = self.R, self.rank
        gens = [R.reflection_perms[i] for i in range(r)]
        ident = np.arange(2 * self.N, dtype=np.int32)
        perms = [ident]
        lengths = [0]
        seen = {ident[:r].tobytes(): 0}
        frontier = [0]
        depth = 0
        while frontier:
            depth += 1
            nxt = []
            for idx in frontier:
                p = perms[idx]
                for g in gens:
                    q = g[p].astype(np.int32)
                    key = q[:r].tobytes()
                    if key not in seen:
                        if len(perms) >= cap:
                            raise ResourceError(
                                f"Weyl group of {R.label} exceeds the element cap {cap}"
                            )
                        seen[key] = len(perms)
                        perms.append(q)
                        lengths.append(depth)
                        nxt.append(seen[key])
            frontier = nxt
        self.perms = np.stack(perms)
        self.lengths = np.array(lengths, dtype=np.int64)

    def _index_tables(self):
        r, N = self.rank, self.N
        P = self.perms
        self.order = len(P)
        self._key_index = {P[i, :r].tobytes(): i for i in range(self.order)}
        neg = P[:, :N] >= N
        self.inv = [int("".join("1" if b else "0" for b in row[::-1]), 2) if row.any() else 0
                    for row in neg]
        if N <= 63:
            weights = np.left_shift(np.uint64(1), np.arange(N, dtype=np.uint64))
            self.inv_arr = (neg.astype(np.uint64) * weights).sum(axis=1).astype(np.uint64)
        else:
            self.inv_arr = None
        self.mask_index = {m: i for i, m in builtins.enumerate(self.inv)}
        gens = [self.R.reflection_perms[i] for i in range(r)]
        self.left = np.empty((r, self.order), dtype=np.int64)
        self.right = np.empty((r, self.order), dtype=np.int64)
        for i, g in builtins.enumerate(gens):
            for w in range(self.order):
                self.left[i, w] = self._key_index[g[P[w, :r]].astype(np.int32).tobytes()]
                self.right[i, w] = self._key_index[P[w][g[:r]].tobytes()]
        inverse = np.empty(self.order, dtype=np.int64)
        ident = np.arange(2 * N)
        for w in range(self.order):
            q = np.empty(2 * N, dtype=np.int32)
            q[P[w]] = ident
            inverse[w] = self._key_index[q[:r].tobytes()]
        self.inverse = inverse
        self.w0 = int(np.argmax(self.lengths))
        ld = np.zeros(self.order, dtype=np.int64)
        rd = np.zeros(self.order, dtype=np.int64)
        for i in range(r):
            ld |= (self.lengths[self.left[i]] < self.lengths).astype(np.int64) << i
            rd |= (self.lengths[self.right[i]] < self.lengths).astype(np.int64) << i
        self.left_descent_masks = ld
        self.right_descent_masks = rd
        # reduced words via a left-multiplication spanning tree
        self._parent = np.full(self.order, -1, dtype=np.int64)
        self._parent_gen = np.full(self.order, -1, dtype=np.int64)
        for w in range(1, self.order):
            i = (int(ld[w]) & -int(ld[w])).bit_length() - 1
            self._parent[w] = self.left[i, w]
            self._parent_gen[w] = i

    # -- element access ------------------------------------------------------------

    @property
    def identity(self) -> int:
        return 0

    def __len__(self):
        return self.order

    def __iter__(self):
        return (WeylElement(self, i) for i in range(self.order))

    def element(self, i: int) -> WeylElement:
        return WeylElement(self, int(i))

    def index_of_perm(self, perm) -> int:
        return self._key_index[np.asarray(perm, dtype=np.int32)[: self.rank].tobytes()]

    def matrix(self, w: int) -> tuple[tuple[int, ...], ...]:
        cols = [self.R.coords[int(self.perms[w, j])] for j in range(self.rank)]
        return tuple(tuple(cols[j][i] for j in range(self.rank)) for i in range(self.rank))

    def from_matrix(self, m) -> int:
        cols = [tuple(int(m[i][j]) for i in range(self.rank)) for j in range(self.rank)]
        key = np.array([self.R.index[c] for c in cols], dtype=np.int32).tobytes()
        return self._key_index[key]

    def from_word(self, word: Sequence[int]) -> int:
        """Element ``s_{word[0]} s_{word[1]} ...`` (0-based generator indices)."""
        w = 0
        for i in reversed(word):
            w = int(self.left[i, w])
        return w

    def reduced_word(self, w: int) -> tuple[int, ...]:
        out = []
        while w != 0:
            out.append(int(self._parent_gen[w]))
            w = int(self._parent[w])
        return tuple(out)

    def word_str(self, w: int) -> str:
        return "".join(f"s{i + 1}" for i in self.reduced_word(w)) or "e"

    def mul(self, a: int, b: int) -> int:
        P = self.perms
        return self._key_index[P[a][P[b, : self.rank]].tobytes()]

    def left_mul_all(self, a: int) -> np.ndarray:
        """Index array ``x -> a x`` over all ``x`` (built along reduced words)."""
        out = np.empty(self.order, dtype=np.int64)
        out[0] = a
        for x in range(1, self.order):
            out[x] = self.right[self._parent_gen_right(x), out[self._parent_right(x)]]
        return out

    def _parent_gen_right(self, x):
        if not hasattr(self, "_rpar"):
            rpar = np.full(self.order, -1, dtype=np.int64)
            rgen = np.full(self.order, -1, dtype=np.int64)
            rd = self.right_descent_masks
            for y in range(1, self.order):
                i = (int(rd[y]) & -int(rd[y])).bit_length() - 1
                rpar[y] = self.right[i, y]
                rgen[y] = i
            self._rpar, self._rgen = rpar, rgen
        return self._rgen[x]

    def _parent_right(self, x):
        return self._rpar[x]

    def reflection(self, k: int) -> int:
        """Group index of the reflection ``s_{phi_k}`` for a positive root index."""
        if not hasattr(self, "_refl"):
            self._refl = [self.index_of_perm(self.R.reflection_perms[j]) for j in range(self.N)]
        return self._refl[k]

    def act(self, w: int, k: int) -> int:
        return int(self.perms[w, k])

    def act_vector(self, w: int, x: Sequence) -> list:
        m = self.matrix(w)
        return [sum(m[i][j] * x[j] for j in range(self.rank)) for i in range(self.rank)]

    # -- combinatorics ---------------------------------------------------------------

    def inversion_set(self, w: int) -> int:
        return self.inv[w]

    def length(self, w: int) -> int:
        return int(self.lengths[w])

    def left_descents(self, w: int) -> int:
        """Bitmask of simple indices ``i`` with ``l(s_i w) < l(w)``."""
        return int(self.left_descent_masks[w])

    def d(self, w: int) -> int:
        return popcount(self.left_descents(w))

    def dual(self, w: int) -> int:
        """Poincare dual ``w0 w``."""
        return self.mul(self.w0, w)

    def left_weak_leq(self, u: int, w: int) -> bool:
        return self.inv[u] & ~self.inv[w] == 0

    def bruhat_leq(self, u: int, w: int) -> bool:
        """Strong Bruhat order through the lifting property, memoized."""
        lu, lw = self.lengths[u], self.lengths[w]
        if lu > lw:
            return False
        if u == w:
            return True
        if lu == lw or w == 0:
            return False
        if u == 0:
            return True
        key = (u, w)
        memo = self._bruhat_memo
        if key in memo:
            memo.move_to_end(key)
            return memo[key]
        dw = int(self.left_descent_masks[w])
        s = (dw & -dw).bit_length() - 1
        sw = int(self.left[s, w])
        if (int(self.left_descent_masks[u]) >> s) & 1:
            res = self.bruhat_leq(int(self.left[s, u]), sw)
        else:
            res = self.bruhat_leq(u, sw)
        memo[key] = res
        if len(memo) > self.bruhat_memo_budget:
            memo.popitem(last=False)
        return res

    def bruhat_ideal(self, w: int) -> np.ndarray:
        """Boolean array of the lower interval ``[e, w]``.

        Uses ``[e, w] = [e, sw] u s[e, sw]`` for a left descent ``s``.
        """
        cache = self._ideal_cache
        if w in cache:
            return cache[w]
        chain = []
        x = w
        while x not in cache and x != 0:
            chain.append(x)
            dx = int(self.left_descent_masks[x])
            x = int(self.left[(dx & -dx).bit_length() - 1, x])
        if x == 0 and 0 not in cache:
            base = np.zeros(self.order, dtype=bool)
            base[0] = True
            cache[0] = base
        cur = cache[x]
        for y in reversed(chain):
            dy = int(self.left_descent_masks[y])
            s = (dy & -dy).bit_length() - 1
            nxt = cur.copy()
            nxt[self.left[s][cur]] = True
            cache[y] = nxt
            cur = nxt
        return cur

    def covers_below(self, w: int) -> list[tuple[int, int]]:
        """Pairs ``(v, k)`` with ``v = w s_{phi_k}`` and ``l(v) = l(w) - 1``."""
        out = []
        for k in range(self.N):
            v = self.mul(w, self.reflection(k))
            if self.lengths[v] == self.lengths[w] - 1:
                out.append((v, k))
        return out

    def cover_closure_leq(self) -> np.ndarray:
        """Bruhat order as the transitive closure of covers (oracle; small groups)."""
        n = self.order
        leq = np.eye(n, dtype=bool)
        for w in np.argsort(self.lengths, kind="stable"):
            for v, _ in self.covers_below(int(w)):
                leq[:, w] |= leq[:, v]
        return leq

    # -- biconvexity -----------------------------------------------------------------

    def is_biconvex(self, S: int) -> bool:
        return is_biconvex(self.R, S)

    def biconvex_to_weyl(self, S: int) -> int | None:
        """Element with inversion set ``S`` found by peeling simple roots, or ``None``."""
        R = self.R
        r = self.rank
        if S & ~R.full_mask:
            raise PreconditionError("subset is not contained in the positive roots")
        word = []
        cur = S
        refl = R.reflection_perms
        while cur:
            low = cur & ((1 << r) - 1)
            if not low:
                return None
            i = (low & -low).bit_length() - 1
            rest = cur & ~(1 << i)
            cur = mask_of(int(refl[i, k]) for k in bits(rest))
            word.append(i)
        # S = Phi(w) with w = s_{i_m} ... s_{i_1}
        w = self.from_word(list(reversed(word)))
        if self.inv[w] != S:
            raise AssertionError("peeling produced an inconsistent element")
        return w

    def cone_disjointness(self, S: int) -> "ConeCertificate":
        """Certificate that ``Q+ S`` and ``Q+ (Phi+ - S)`` meet only in 0."""
        w = self.mask_index.get(S)
        if w is None:
            raise PreconditionError("subset is not biconvex")
        R = self.R
        winv = int(self.inverse[w])
        functional = tuple(self.act_vector(winv, R.rho))
        values = tuple(R.form_coords(functional, R.coords[k]) for k in range(R.n_pos))
        ok = all((v < 0) == bool((S >> k) & 1) and v != 0 for k, v in builtins.enumerate(values))
        return ConeCertificate(S, w, functional, values, ok)

    # -- vectorized inversion-set queries -------------------------------------------

    def _sorted_masks(self):
        if not hasattr(self, "_sm"):
            if self.inv_arr is None:
                raise ResourceError(f"{self.R.label}: more than 63 positive roots")
            order = np.argsort(self.inv_arr, kind="stable")
            self._sm = (self.inv_arr[order], order)
        return self._sm

    def lookup_masks(self, masks: np.ndarray) -> np.ndarray:
        """Element index for each inversion-set mask, ``-1`` where none exists."""
        keys, order = self._sorted_masks()
        masks = np.asarray(masks, dtype=np.uint64)
        pos = np.searchsorted(keys, masks)
        pos = np.minimum(pos, len(keys) - 1)
        hit = keys[pos] == masks
        return np.where(hit, order[pos], -1)

    def decompositions(self, w: int) -> tuple[np.ndarray, np.ndarray]:
        """Arrays ``(x, y)`` of all pairs with ``Phi(w) = Phi(x) u Phi(y)`` disjointly."""
        A = self.inv_arr
        mw = A[w]
        xs = np.nonzero((A & ~mw) == 0)[0]
        ys = self.lookup_masks(mw ^ A[xs])
        keep = ys >= 0
        return xs[keep], ys[keep]

    def multiplication_table(self) -> np.ndarray:
        """Full table ``T[a, b] = index of a b`` (memory ``|W|^2``; small groups)."""
        if not hasattr(self, "_mult"):
            n = self.order
            if n > 5000:
                raise ResourceError(f"multiplication table of {self.R.label} too large")
            T = np.empty((n, n), dtype=np.int64)
            T[:, 0] = np.arange(n)
            self._parent_gen_right(0)
            for b in range(1, n):
                T[:, b] = self.right[self._rgen[b], T[:, self._rpar[b]]]
            self._mult = T
        return self._mult

    # -- serialization -----------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "type": self.R.label,
            "order": self.order,
            "matrices": [[list(row) for row in self.matrix(w)] for w in range(self.order)],
            "lengths": [int(v) for v in self.lengths],
            "inversions": [format(m, "x") for m in self.inv],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "WeylGroup":
        if doc.get("format_version") != FORMAT_VERSION:
            raise ValueError("unsupported WeylGroup cache format_version")
        R = build_root_system(doc["type"])
        r = R.rank
        perms = []
        for m in doc["matrices"]:
            cols = [tuple(m[i][j] for i in range(r)) for j in range(r)]
            perms.append(_perm_from_simple_images(R, [R.index[c] for c in cols]))
        G = cls(R, _tables=(np.stack(perms), np.array(doc["lengths"], dtype=np.int64)))
        if [format(x, "x") for x in G.inv] != doc["inversions"]:
            raise ValueError("cached inversion sets disagree with matrices")
        return G

    def __repr__(self):
        return f"WeylGroup({self.R.label}, order={self.order})"

    def __reduce__(self):
        return (enumerate_group, (self.R.label,))


@dataclass(frozen=True)
class ConeCertificate:
    subset: int
    element: int
    functional: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    verified: bool


def _perm_from_simple_images(R: RootSystem, images: Sequence[int]) -> np.ndarray:
    cols = [R.coords[k] for k in images]
    out = np.empty(2 * R.n_pos, dtype=np.int32)
    for k, c in builtins.enumerate(R.coords):
        img = tuple(sum(c[j] * cols[j][i] for j in range(R.rank)) for i in range(R.rank))
        out[k] = R.index[img]
    return out


def positive_sum_triples(R: RootSystem) -> list[tuple[int, int, int]]:
    """All ``(i, j, k)`` of positive indices with ``i < j`` and ``phi_i + phi_j = phi_k``."""
    out = []
    A = R.add_table
    for i in range(R.n_pos):
        for j in range(i + 1, R.n_pos):
            k = int(A[i, j])
            if k >= 0:
                out.append((i, j, k))
    return out


def is_convex(R: RootSystem, S: int) -> bool:
    for i, j, k in _sum_triples(R):
        if (S >> i) & 1 and (S >> j) & 1 and not (S >> k) & 1:
            return False
    return True


def is_biconvex(R: RootSystem, S: int) -> bool:
    return is_convex(R, S) and is_convex(R, R.full_mask & ~S)


_TRIPLES: dict[str, list] = {}


def _sum_triples(R):
    if R.label not in _TRIPLES:
        _TRIPLES[R.label] = positive_sum_triples(R)
    return _TRIPLES[R.label]


_GROUPS: dict[str, WeylGroup] = {}


def enumerate_group(R: RootSystem | str, cap: int = DEFAULT_CAP) -> WeylGroup:
    """Enumerate (memoized per type) the Weyl group of ``R``.

    >>> len(enumerate_group("A2"))
    6
    """
    if isinstance(R, str):
        R = build_root_system(R)
    if R.label not in _GROUPS:
        _GROUPS[R.label] = WeylGroup(R, cap)
    return _GROUPS[R.label]


enumerate = enumerate_group  # short alias; shadows the builtin only inside this module


def classical_order(R: RootSystem) -> int:
    from math import factorial

    total = 1
    for s, n in R.components:
        total *= {
            "A": lambda: factorial(n + 1),
            "B": lambda: 2 ** n * factorial(n),
            "C": lambda: 2 ** n * factorial(n),
            "D": lambda: 2 ** (n - 1) * factorial(n),
            "E": lambda: {6: 51840, 7: 2903040, 8: 696729600}[n],
            "F": lambda: 1152,
            "G": lambda: 12,
        }[s]()
    return total
