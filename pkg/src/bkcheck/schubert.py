"""Schubert classes of ``G/B`` as polynomials, via divided differences.

Variables ``x_1..x_r`` are the fundamental weights, so a simple reflection
acts by ``x_i -> x_i - alpha_i`` (integer coefficients) and fixes the other
variables.  Polynomials are ``fmpz_mpoly`` objects from python-flint; a
:class:`SchubertPoly` carries one integer denominator on top.

``P_w0 = prod(alpha) / |W|`` and ``P_w = d_{w^-1 w0} P_w0``; ``P_w`` has
degree ``l(w)`` and represents the class of ``X_{w0 w}``.  In the notation
``[X_u]`` for the class of the Schubert variety of dimension ``l(u)``,
``[X_u] = P_{w0 u}`` and

    c_uv^w = d_w0(P_{w0 u} P_{w0 v} P_w).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import flint

from .errors import InvariantError
from .weyl import WeylGroup


@dataclass(frozen=True)
class SchubertPoly:
    """``poly / denom`` with ``poly`` an integer polynomial."""

    poly: flint.fmpz_mpoly
    denom: int = 1

    @property
    def degree(self) -> int:
        return -1 if self.poly.is_zero() else self.poly.total_degree()

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def to_dict(self) -> dict[tuple[int, ...], Fraction]:
        return {tuple(int(e) for e in k): Fraction(int(v), self.denom)
                for k, v in self.poly.to_dict().items()}

    def __mul__(self, other: "SchubertPoly") -> "SchubertPoly":
        return SchubertPoly(self.poly * other.poly, self.denom * other.denom)

    def __add__(self, other: "SchubertPoly") -> "SchubertPoly":
        d = self.denom * other.denom
        return SchubertPoly(self.poly * other.denom + other.poly * self.denom, d)

    def __sub__(self, other: "SchubertPoly") -> "SchubertPoly":
        d = self.denom * other.denom
        return SchubertPoly(self.poly * other.denom - other.poly * self.denom, d)

    def __eq__(self, other):
        if not isinstance(other, SchubertPoly):
            return NotImplemented
        return self.poly * other.denom == other.poly * self.denom

    def __hash__(self):
        return hash(tuple(sorted(self.to_dict().items())))

    def constant(self) -> Fraction:
        d = self.poly.to_dict()
        if any(sum(k) for k in d):
            raise ValueError("polynomial is not constant")
        return Fraction(sum(int(v) for v in d.values()), self.denom)


class SchubertCalculus:
    """Divided differences and Schubert polynomials for one Weyl group."""

    def __init__(self, G: WeylGroup):
        self.G = G
        R = G.R
        self.R = R
        r = R.rank
        self.rank = r
        self.ctx = flint.fmpz_mpoly_ctx.get(("x", r), "degrevlex")
        self.x = self.ctx.gens()
        self._one = self.ctx.from_dict({(0,) * r: 1})
        self.alpha = [self.root_form(k) for k in range(R.n_pos)]
        self._subs = []
        for i in range(r):
            img = list(self.x)
            img[i] = self.x[i] - self.alpha[i]
            self._subs.append(img)
        self._table: dict[int, flint.fmpz_mpoly] | None = None
        self._w0_word = G.reduced_word(G.w0)

    # -- polynomial primitives -------------------------------------------------

    def root_form(self, k: int) -> flint.fmpz_mpoly:
        """Root ``phi_k`` as a linear form in the fundamental weights."""
        R, r = self.R, self.rank
        c = R.coords[k]
        coeffs = [sum(c[j] * R.cartan[m][j] for j in range(r)) for m in range(r)]
        return self.ctx.from_dict({tuple(int(m == n) for n in range(r)): v
                                   for m, v in enumerate(coeffs) if v})

    def poly(self, data: Mapping[tuple[int, ...], int] | int) -> flint.fmpz_mpoly:
        if isinstance(data, int):
            return self._one * data
        return self.ctx.from_dict({tuple(k): int(v) for k, v in data.items()})

    def reflect(self, i: int, f: flint.fmpz_mpoly) -> flint.fmpz_mpoly:
        return f.compose(*self._subs[i])

    def _dd(self, i: int, f: flint.fmpz_mpoly) -> flint.fmpz_mpoly:
        q, rem = divmod(f - self.reflect(i, f), self.alpha[i])
        if not rem.is_zero():
            raise InvariantError("divided difference left a remainder")
        return q

    def divided_difference(self, i: int, f: SchubertPoly) -> SchubertPoly:
        """``(f - s_i f) / alpha_i``."""
        return SchubertPoly(self._dd(i, f.poly), f.denom)

    def divided_difference_word(self, word: Iterable[int], f: SchubertPoly) -> SchubertPoly:
        """``d_{i1} d_{i2} ... d_{ik} f`` for ``word = (i1, ..., ik)``."""
        p = f.poly
        for i in reversed(tuple(word)):
            if p.is_zero():
                break
            p = self._dd(i, p)
        return SchubertPoly(p, f.denom)

    def d_w0(self, f: SchubertPoly) -> Fraction:
        """Top divided difference evaluated to a rational number."""
        return self.constant(self.divided_difference_word(self._w0_word, f))

    @staticmethod
    def constant(f: SchubertPoly) -> Fraction:
        try:
            return f.constant()
        except ValueError as exc:
            raise InvariantError("expected a constant polynomial") from exc

    # -- Schubert polynomials ----------------------------------------------------

    def _build_table(self):
        G = self.G
        top = self._one
        for a in self.alpha:
            top = top * a
        table = {G.w0: top}
        for w in sorted(range(G.order), key=lambda w: (-G.length(w), w)):
            if w in table:
                continue
            for i in range(self.rank):
                ws = int(G.right[i, w])
                if G.length(ws) > G.length(w):
                    table[w] = self._dd(i, table[ws])
                    break
        self._table = table

    def schubert_poly(self, w: int) -> SchubertPoly:
        if self._table is None:
            self._build_table()
        return SchubertPoly(self._table[w], self.G.order)

    def schubert_poly_via_word(self, w: int, word: Iterable[int]) -> SchubertPoly:
        """``d_{word} P_w0`` for a reduced word of ``w^-1 w0`` (reduced-word oracle)."""
        G = self.G
        word = tuple(word)
        target = G.mul(int(G.inverse[w]), G.w0)
        if G.from_word(word) != target or len(word) != G.length(target):
            raise ValueError("word is not a reduced word of w^-1 w0")
        return self.divided_difference_word(word, self.schubert_poly(G.w0))

    def load_table(self, table: Mapping[int, Mapping]):
        self._table = {int(w): self.poly(d) for w, d in table.items()}

    def table_json(self) -> dict:
        if self._table is None:
            self._build_table()
        return {str(w): {",".join(map(str, k)): str(int(v)) for k, v in p.to_dict().items()}
                for w, p in sorted(self._table.items())}

    @staticmethod
    def table_from_json(doc: Mapping) -> dict[int, dict]:
        return {int(w): {tuple(int(e) for e in k.split(",")) if k else (): int(v)
                         for k, v in d.items()} for w, d in doc.items()}

    # -- structure constants -----------------------------------------------------

    def pairing(self, u: int, v: int) -> Fraction:
        """``d_w0(P_u P_v)``; equals 1 iff ``v = w0 u`` in complementary degrees."""
        if self.G.length(u) + self.G.length(v) != self.G.length(self.G.w0):
            return Fraction(0)
        return self.d_w0(self.schubert_poly(u) * self.schubert_poly(v))

    def cup_constant(self, u: int, v: int, w: int) -> Fraction:
        """Coefficient of ``[X_w]`` in ``[X_u] [X_v]``."""
        G = self.G
        if G.length(u) + G.length(v) != G.length(w) + G.length(G.w0):
            return Fraction(0)
        P = self.schubert_poly
        c = self.d_w0(P(G.dual(u)) * P(G.dual(v)) * P(w))
        if c.denominator != 1 or c < 0:
            raise InvariantError(f"structure constant {c} is not a non-negative integer")
        return c

    def cup_constant_descent(self, u: int, v: int, w: int) -> Fraction:
        """Same constant as ``d_{w0 w}(P_{w0 u} P_{w0 v})`` (cross-check)."""
        G = self.G
        if G.length(u) + G.length(v) != G.length(w) + G.length(G.w0):
            return Fraction(0)
        P = self.schubert_poly
        prod = P(G.dual(u)) * P(G.dual(v))
        return self.constant(self.divided_difference_word(G.reduced_word(G.dual(w)), prod))

    def expand(self, f: SchubertPoly) -> dict[int, Fraction]:
        """Coefficients of ``f`` in the basis ``P_z`` (``z`` with ``l(z) = deg f``)."""
        G = self.G
        out = {}
        deg = f.degree
        for z in range(G.order):
            if G.length(z) != deg:
                continue
            c = self.d_w0(f * self.schubert_poly(G.dual(z)))
            if c:
                out[z] = c
        return out

    def chevalley_multiply(self, i: int, cls: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """``sigma_{s_i} * cls`` in the basis ``sigma_w = P_w`` by the Chevalley rule."""
        return chevalley_multiply(self.G, i, cls)

    def verify_main(self, triples) -> dict:
        """Cup constants of the given BK triples; the theorem predicts all equal 1."""
        total = 0
        bad = []
        for t in triples:
            total += 1
            c = self.cup_constant(t.u, t.v, t.w)
            if c != 1:
                bad.append((t, c))
        return {"triples": total, "violations": bad}


def chevalley_multiply(G: WeylGroup, i: int, cls: Mapping[int, Fraction]) -> dict[int, Fraction]:
    """``sigma_{s_i} sigma_w = sum <omega_i, beta^vee> sigma_{w s_beta}`` over
    positive ``beta`` with ``l(w s_beta) = l(w) + 1``."""
    R = G.R
    out: dict[int, Fraction] = {}
    for w, c in cls.items():
        if not c:
            continue
        lw = G.length(w)
        for k in range(R.n_pos):
            m = R.coroots[k][i]
            if not m:
                continue
            z = G.mul(w, G.reflection(k))
            if G.length(z) == lw + 1:
                out[z] = out.get(z, Fraction(0)) + c * m
    return {z: c for z, c in out.items() if c}


_CALC: dict[str, SchubertCalculus] = {}


def calculus(G: WeylGroup) -> SchubertCalculus:
    """Memoized :class:`SchubertCalculus` per type."""
    if G.R.label not in _CALC:
        _CALC[G.R.label] = SchubertCalculus(G)
    return _CALC[G.R.label]


def schubert_poly(G: WeylGroup, w: int) -> SchubertPoly:
    return calculus(G).schubert_poly(w)


def cup_constant(G: WeylGroup, u: int, v: int, w: int) -> Fraction:
    return calculus(G).cup_constant(u, v, w)


def divided_difference(G: WeylGroup, i: int, f: SchubertPoly) -> SchubertPoly:
    return calculus(G).divided_difference(i, f)
