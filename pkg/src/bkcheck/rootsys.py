"""Finite crystallographic root systems in simple-root coordinates.

Everything is exact: root coordinates are integers, the invariant form,
rho and the fundamental weights are ``Fraction`` vectors.  Simple roots
follow Bourbaki's numbering.

Root indexing: positive roots occupy indices ``0..N-1`` sorted by height,
ties broken so that a larger coefficient on an earlier simple root comes
first (this puts alpha_1, ..., alpha_r at indices 0..r-1).  Index ``N + k``
holds the negative of positive root ``k``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

FORMAT_VERSION = 1

_TYPE_RE = re.compile(r"^([A-Ga-g])(\d+)$")


def _chain(n):
    c = [[0] * n for _ in range(n)]
    for i in range(n):
        c[i][i] = 2
    for i in range(n - 1):
        c[i][i + 1] = c[i + 1][i] = -1
    return c


def cartan_matrix(series: str, rank: int) -> list[list[int]]:
    """Cartan matrix ``a[i][j] = <alpha_i^vee, alpha_j>`` (Bourbaki numbering)."""
    s = series.upper()
    n = rank
    if s == "A" and n >= 1:
        return _chain(n)
    if s == "B" and n >= 2:
        c = _chain(n)
        c[n - 1][n - 2] = -2
        return c
    if s == "C" and n >= 2:
        c = _chain(n)
        c[n - 2][n - 1] = -2
        return c
    if s == "D" and n >= 4:
        c = _chain(n)
        c[n - 2][n - 1] = c[n - 1][n - 2] = 0
        c[n - 3][n - 1] = c[n - 1][n - 3] = -1
        return c
    if s == "E" and n in (6, 7, 8):
        c = [[0] * n for _ in range(n)]
        for i in range(n):
            c[i][i] = 2
        edges = [(1, 3), (3, 4), (4, 5), (5, 6), (2, 4)]
        edges += [(6, 7)] if n >= 7 else []
        edges += [(7, 8)] if n >= 8 else []
        for i, j in edges:
            c[i - 1][j - 1] = c[j - 1][i - 1] = -1
        return c
    if s == "F" and n == 4:
        c = _chain(4)
        c[2][1] = -2
        return c
    if s == "G" and n == 2:
        return [[2, -3], [-1, 2]]
    raise ValidationError(f"invalid Cartan type {series}{rank}")


def parse_type(label: str | Sequence) -> list[tuple[str, int]]:
    """Parse ``"B3"``, ``"A1xA2"``, ``("G", 2)`` or a list of such pairs."""
    if isinstance(label, tuple) and len(label) == 2 and isinstance(label[0], str):
        parts = [(label[0].upper(), int(label[1]))]
    elif isinstance(label, str):
        parts = []
        for piece in re.split(r"[x×+*]", label.strip()):
            m = _TYPE_RE.match(piece.strip())
            if not m:
                raise ValidationError(f"cannot parse root system type {label!r}")
            parts.append((m.group(1).upper(), int(m.group(2))))
    else:
        parts = []
        for item in label:
            parts.extend(parse_type(item))
    if not parts:
        raise ValidationError("empty root system type")
    for s, n in parts:
        cartan_matrix(s, n)  # raises on invalid pairs
    return parts


@dataclass(frozen=True)
class Root:
    """A root given by its index in a :class:`RootSystem` table."""

    index: int
    coords: tuple[int, ...]

    @property
    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.coords)

    @property
    def height(self) -> int:
        return sum(self.coords)

    def __str__(self):
        return " ".join(str(c) for c in self.coords)


class RootSystem:
    """Immutable table of a (possibly reducible) finite root system."""

    def __init__(self, components: Sequence[tuple[str, int]]):
        self.components = tuple(components)
        self.label = "x".join(f"{s}{n}" for s, n in self.components)
        blocks = [cartan_matrix(s, n) for s, n in self.components]
        r = sum(len(b) for b in blocks)
        cartan = [[0] * r for _ in range(r)]
        self.component_of = []
        off = 0
        for ci, b in enumerate(blocks):
            for i, row in enumerate(b):
                for j, v in enumerate(row):
                    cartan[off + i][off + j] = v
                self.component_of.append(ci)
            off += len(b)
        self.component_of = tuple(self.component_of)
        self.rank = r
        self.cartan = tuple(tuple(row) for row in cartan)
        self._build_form()
        self._build_roots()
        self._build_tables()

    # -- construction -------------------------------------------------------

    def _build_form(self):
        r, a = self.rank, self.cartan
        # d_i = (alpha_i, alpha_i) / 2 with d_i a_ij = d_j a_ji
        d: list[Fraction | None] = [None] * r
        for start in range(r):
            if d[start] is not None:
                continue
            d[start] = Fraction(1)
            stack, comp = [start], [start]
            while stack:
                i = stack.pop()
                for j in range(r):
                    if j != i and a[i][j] != 0 and d[j] is None:
                        d[j] = d[i] * a[i][j] / a[j][i]
                        stack.append(j)
                        comp.append(j)
            top = max(d[i] for i in comp)
            for i in comp:
                d[i] = d[i] / top
        self.half_sq = tuple(d)
        self.form_matrix = tuple(
            tuple(d[i] * a[i][j] for j in range(r)) for i in range(r)
        )

    def _build_roots(self):
        r, a = self.rank, self.cartan
        simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
        found = set(simple)
        layer = list(simple)
        while layer:
            nxt = []
            for phi in layer:
                for i in range(r):
                    # alpha_i-string through phi: q = p - <phi, alpha_i^vee>
                    p = 0
                    x = list(phi)
                    while True:
                        x[i] -= 1
                        if tuple(x) in found:
                            p += 1
                        else:
                            break
                    pairing = sum(phi[j] * a[i][j] for j in range(r))
                    if p - pairing > 0:
                        y = list(phi)
                        y[i] += 1
                        y = tuple(y)
                        if y not in found:
                            found.add(y)
                            nxt.append(y)
            layer = nxt
        pos = sorted(found, key=lambda c: (sum(c), tuple(-v for v in c)))
        self.n_pos = len(pos)
        neg = [tuple(-v for v in c) for c in pos]
        self.coords = tuple(pos + neg)
        self.index = {c: k for k, c in enumerate(self.coords)}

    def _build_tables(self):
        N, r = self.n_pos, self.rank
        self.heights = tuple(sum(c) for c in self.coords)
        arr = np.array(self.coords, dtype=np.int64)
        arr.setflags(write=False)
        self.array = arr
        add = np.full((2 * N, 2 * N), -1, dtype=np.int64)
        for i, ci in enumerate(self.coords):
            for j, cj in enumerate(self.coords):
                k = self.index.get(tuple(x + y for x, y in zip(ci, cj)))
                if k is not None:
                    add[i, j] = k
        add.setflags(write=False)
        self.add_table = add
        # coroot coordinates in the simple-coroot basis
        cor = []
        for c in self.coords:
            sq = self.norm_sq_coords(c)
            cor.append(tuple(int(c[i] * 2 * self.half_sq[i] / sq) for i in range(r)))
        self.coroots = tuple(cor)

    # -- basic queries ------------------------------------------------------

    @property
    def n_roots(self) -> int:
        return 2 * self.n_pos

    def root(self, k: int) -> Root:
        return Root(k, self.coords[k])

    def simple(self, i: int) -> Root:
        return self.root(i)

    def find(self, coords: Iterable[int]) -> Root:
        c = tuple(int(v) for v in coords)
        if c not in self.index:
            raise ValidationError(f"{c} is not a root of {self.label}")
        return self.root(self.index[c])

    def neg(self, k: int) -> int:
        return k + self.n_pos if k < self.n_pos else k - self.n_pos

    def is_positive(self, k: int) -> bool:
        return k < self.n_pos

    def height(self, k: int) -> int:
        return self.heights[k]

    @property
    def positive_indices(self) -> range:
        return range(self.n_pos)

    @property
    def full_mask(self) -> int:
        return (1 << self.n_pos) - 1

    @cached_property
    def highest_roots(self) -> tuple[int, ...]:
        """Highest root of each irreducible component."""
        out = []
        for ci in range(len(self.components)):
            best = max(
                (k for k in range(self.n_pos) if self.component(k) == ci),
                key=lambda k: self.heights[k],
            )
            out.append(best)
        return tuple(out)

    def component(self, k: int) -> int:
        c = self.coords[k]
        for i, v in enumerate(c):
            if v:
                return self.component_of[i]
        raise AssertionError("zero vector in root table")

    # -- form ------------------------------------------------------------------

    def form_coords(self, x: Sequence, y: Sequence) -> Fraction:
        B = self.form_matrix
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                row = B[i]
                for j, yj in enumerate(y):
                    if yj and row[j]:
                        total += xi * yj * row[j]
        return total

    def norm_sq_coords(self, x: Sequence) -> Fraction:
        return self.form_coords(x, x)

    def form(self, i: int, j: int) -> Fraction:
        """``(phi_i, phi_j)`` for two root indices."""
        return self.form_coords(self.coords[i], self.coords[j])

    def pairing(self, x: Sequence, phi: Root | int) -> Fraction:
        """Value of the normalized invariant form on a rational vector and a root."""
        k = phi.index if isinstance(phi, Root) else phi
        return self.form_coords(x, self.coords[k])

    def coroot_pairing(self, x: Sequence, phi: Root | int) -> Fraction:
        """``<x, phi^vee> = 2 (x, phi) / (phi, phi)``."""
        k = phi.index if isinstance(phi, Root) else phi
        c = self.coords[k]
        return 2 * self.form_coords(x, c) / self.norm_sq_coords(c)

    def is_long(self, k: int) -> bool:
        return self.norm_sq_coords(self.coords[k]) == 2

    @cached_property
    def rho(self) -> tuple[Fraction, ...]:
        tot = [Fraction(0)] * self.rank
        for k in range(self.n_pos):
            for i, v in enumerate(self.coords[k]):
                tot[i] += v
        return tuple(t / 2 for t in tot)

    @cached_property
    def fundamental_weights(self) -> tuple[tuple[Fraction, ...], ...]:
        """``omega_i`` in simple-root coordinates: ``<omega_i, alpha_j^vee> = delta_ij``."""
        r = self.rank
        # omega_i = sum_k M[i][k] alpha_k with sum_k M[i][k] a[j][k] = delta_ij
        from .linalg import inverse

        at = [[Fraction(self.cartan[j][k]) for j in range(r)] for k in range(r)]
        inv = inverse(at)  # (a^T)^{-1}
        return tuple(tuple(inv[i][k] for k in range(r)) for i in range(r))

    # -- combinatorics -----------------------------------------------------------

    def root_sum(self, phi: Root | int, psi: Root | int) -> Root | None:
        i = phi.index if isinstance(phi, Root) else phi
        j = psi.index if isinstance(psi, Root) else psi
        k = int(self.add_table[i, j])
        return None if k < 0 else self.root(k)

    def leq(self, i: int, j: int) -> bool:
        """Dominance order: ``phi_j - phi_i`` has non-negative coordinates."""
        return all(b >= a for a, b in zip(self.coords[i], self.coords[j]))

    def lt(self, i: int, j: int) -> bool:
        return i != j and self.leq(i, j)

    @cached_property
    def leq_matrix(self) -> np.ndarray:
        A = self.array
        m = np.all(A[None, :, :] >= A[:, None, :], axis=2)
        m.setflags(write=False)
        return m

    def interval(self, phi: Root | int, psi: Root | int, *, open_left=False,
                 open_right=False) -> int:
        """Bitmask over positive-root indices of ``[phi; psi]`` (or open variants)."""
        i = phi.index if isinstance(phi, Root) else phi
        j = psi.index if isinstance(psi, Root) else psi
        mask = 0
        L = self.leq_matrix
        for k in range(self.n_pos):
            if L[i, k] and L[k, j]:
                if (open_left and k == i) or (open_right and k == j):
                    continue
                mask |= 1 << k
        return mask

    def reflect(self, k: int, x: Sequence) -> tuple:
        """``s_phi(x) = x - <x, phi^vee> phi`` for a coordinate vector ``x``."""
        c = self.coords[k]
        t = self.coroot_pairing(x, k)
        out = tuple(xi - t * ci for xi, ci in zip(x, c))
        if all(isinstance(v, int) or v.denominator == 1 for v in out):
            return tuple(int(v) for v in out)
        return out

    @cached_property
    def reflection_perms(self) -> np.ndarray:
        """Row ``k`` is the permutation of root indices induced by ``s_{phi_k}``
        for positive ``k``."""
        N = self.n_pos
        out = np.empty((N, 2 * N), dtype=np.int64)
        for k in range(N):
            c = self.coords[k]
            cor = self.coroots[k]
            for j, x in enumerate(self.coords):
                t = sum(x[i] * sum(cor[m] * self.cartan[m][i] for m in range(self.rank))
                        for i in range(self.rank))
                out[k, j] = self.index[tuple(xi - t * ci for xi, ci in zip(x, c))]
        out.setflags(write=False)
        return out

    def coroot_value(self, j: int, k: int) -> int:
        """``<phi_j, phi_k^vee>`` as an integer."""
        return int(self.coroot_pairing(self.coords[j], k))

    @cached_property
    def automorphisms(self) -> tuple[tuple[int, ...], ...]:
        """Diagram automorphisms as permutations of the simple roots."""
        r, a = self.rank, self.cartan
        out = []
        for perm in itertools.permutations(range(r)):
            if all(a[perm[i]][perm[j]] == a[i][j] for i in range(r) for j in range(r)):
                out.append(perm)
        return tuple(out)

    def apply_automorphism(self, perm: Sequence[int], k: int) -> int:
        c = self.coords[k]
        new = [0] * self.rank
        for i, v in enumerate(c):
            new[perm[i]] = v
        return self.index[tuple(new)]

    # -- serialization -------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "type": self.label,
            "rank": self.rank,
            "cartan": [list(r) for r in self.cartan],
            "roots": [list(c) for c in self.coords],
            "n_positive": self.n_pos,
            "heights": list(self.heights),
            "form": [[str(v) for v in row] for row in self.form_matrix],
            "rho": [str(v) for v in self.rho],
            "fundamental_weights": [[str(v) for v in w] for w in self.fundamental_weights],
            "automorphisms": [list(p) for p in self.automorphisms],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RootSystem":
        if doc.get("format_version") != FORMAT_VERSION:
            raise ValidationError("unsupported root system format_version")
        R = build_root_system(doc["type"])
        if [list(c) for c in R.coords] != doc["roots"]:
            raise ValidationError("root table in document does not match construction")
        return R

    def __repr__(self):
        return f"RootSystem({self.label}, rank={self.rank}, |Phi+|={self.n_pos})"

    def __reduce__(self):
        return (build_root_system, (self.label,))


_REGISTRY: dict[tuple, RootSystem] = {}


def build_root_system(series, rank: int | None = None) -> RootSystem:
    """Build (or fetch the memoized) root system for a type.

    >>> build_root_system("G", 2).n_pos
    6
    >>> build_root_system("A1xA1").rank
    2
    """
    if rank is not None:
        parts = parse_type((str(series), int(rank)))
    else:
        parts = parse_type(series)
    key = tuple(parts)
    if key not in _REGISTRY:
        _REGISTRY[key] = RootSystem(parts)
    return _REGISTRY[key]


CLASSICAL_POSITIVE_COUNTS = {
    "A": lambda n: n * (n + 1) // 2,
    "B": lambda n: n * n,
    "C": lambda n: n * n,
    "D": lambda n: n * (n - 1),
    "E": lambda n: {6: 36, 7: 63, 8: 120}[n],
    "F": lambda n: 24,
    "G": lambda n: 6,
}
