"""The matrix ``M(v, w, x, y, g_x, g_y)`` and its block structure.

Fixtures: ``xi_phi = e_{-phi}`` and ``xi^phi`` is the dual basis functional.
An element ``g = exp(x)`` of ``U`` with ``x = sum c_phi e_phi`` acts on the
negative nilradical modulo ``b``; only that action matters for the entries,
because ``ad e_phi`` for positive ``phi`` never maps ``h`` or ``n+`` back into
``n-``.  The entry in row ``beta`` and column ``gamma`` is the coefficient of
``e_{-beta}`` in ``exp(ad(-x)) e_{-gamma}``, with ``g = g_x`` when
``beta`` lies in ``Phi(x)`` and ``g = g_y`` otherwise.

Rows are ``Phi(w)`` and columns ``Phi(v)``, both in root-index order, which
is nondecreasing in height.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

import flint
import numpy as np

from .chevalley import ChevalleyAlgebra, build_chevalley
from .errors import PreconditionError
from .rootsys import RootSystem
from .weyl import WeylGroup, bits, enumerate_group, popcount


def _fq(x) -> flint.fmpq:
    x = Fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


def _frac(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


# -- unipotent elements ------------------------------------------------------------


_TERMS: dict[str, list[tuple[int, int, int, int]]] = {}


def _nminus_terms(A: ChevalleyAlgebra) -> list[tuple[int, int, int, int]]:
    """``(phi, beta, gamma, N_{phi,-gamma})`` with ``phi - gamma = -beta``, all positive."""
    R = A.R
    if R.label not in _TERMS:
        P = R.n_pos
        out = []
        for phi in range(P):
            for gamma in range(P):
                k = int(R.add_table[phi, R.neg(gamma)])
                if k >= P:
                    out.append((phi, R.neg(k), gamma, A.N(phi, R.neg(gamma))))
        _TERMS[R.label] = out
    return _TERMS[R.label]


def _nilpotent_exp(X: flint.fmpq_mat, n: int, bound: int) -> flint.fmpq_mat:
    E = flint.fmpq_mat(n, n, [int(i == j) for i in range(n) for j in range(n)])
    zero = flint.fmpq_mat(n, n)
    term = E
    for k in range(1, bound + 2):
        term = (term * X) * flint.fmpq(1, k)
        if term == zero:
            return E
        E = E + term
    raise AssertionError("ad(x) is not nilpotent within the height bound")


class UnipotentElement:
    """``g = exp(x)`` with ``x = sum c_phi e_phi`` over the positive roots."""

    def __init__(self, algebra: ChevalleyAlgebra, coeffs: Sequence, seed_info: str = ""):
        if len(coeffs) != algebra.R.n_pos:
            raise PreconditionError("one coefficient per positive root is required")
        self.algebra = algebra
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        self.seed_info = seed_info

    @classmethod
    def identity(cls, algebra: ChevalleyAlgebra) -> "UnipotentElement":
        return cls(algebra, [0] * algebra.R.n_pos, "identity")

    @classmethod
    def random(cls, algebra: ChevalleyAlgebra, key: str, seed: int) -> "UnipotentElement":
        """Coefficients ``n/d`` with ``n`` in [-9, 9] and ``d`` in [1, 4]; the
        stream is derived from ``(key, seed)`` so instances are independent."""
        digest = hashlib.sha256(f"{key}|{seed}".encode()).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
        P = algebra.R.n_pos
        nums = rng.integers(-9, 10, size=P)
        dens = rng.integers(1, 5, size=P)
        return cls(algebra, [Fraction(int(a), int(b)) for a, b in zip(nums, dens)],
                   f"{key}|{seed}")

    @property
    def is_identity(self) -> bool:
        return not any(self.coeffs)

    def lie_vector(self) -> list[Fraction]:
        """``x`` in the full basis of the algebra."""
        out = [Fraction(0)] * self.algebra.dim
        for k, c in enumerate(self.coeffs):
            out[k] = c
        return out

    @cached_property
    def inverse_action(self) -> flint.fmpq_mat:
        """``exp(ad(-x))`` restricted to ``n-``: entry ``[beta, gamma]`` is the
        coefficient of ``e_{-beta}`` in the image of ``e_{-gamma}``."""
        A = self.algebra
        P = A.R.n_pos
        X = [[Fraction(0)] * P for _ in range(P)]
        for phi, beta, gamma, n in _nminus_terms(A):
            c = self.coeffs[phi]
            if c:
                X[beta][gamma] -= c * n
        Xm = flint.fmpq_mat(P, P, [_fq(v) for row in X for v in row])
        return _nilpotent_exp(Xm, P, max(A.R.heights))

    def adjoint(self) -> flint.fmpq_mat:
        """``Ad(g) = exp(ad x)`` on the whole algebra (columns are images)."""
        A = self.algebra
        d = A.dim
        ad = A.ad(self.lie_vector())
        X = flint.fmpq_mat(d, d, [_fq(ad[i, j]) for i in range(d) for j in range(d)])
        return _nilpotent_exp(X, d, 2 * max(A.R.heights) + 1)


def adjoint_coefficient(A: ChevalleyAlgebra, g: UnipotentElement, beta: int, gamma: int) -> Fraction:
    """Coefficient of ``e_{-beta}`` in ``g^{-1} e_{-gamma}``."""
    return _frac(g.inverse_action[beta, gamma])


def bracket_preservation_defect(g: UnipotentElement, pairs: Sequence[tuple[int, int]]) -> int:
    """Number of basis pairs ``(a, b)`` with ``Ad(g)[a,b] != [Ad(g)a, Ad(g)b]``."""
    A = g.algebra
    d = A.dim
    Ad = g.adjoint()
    cols = [[_frac(Ad[i, j]) for i in range(d)] for j in range(d)]
    bad = 0
    for a, b in pairs:
        ea = [0] * d
        eb = [0] * d
        ea[a] = 1
        eb[b] = 1
        ab = A.bracket(ea, eb)
        lhs = [sum(cols[j][i] * ab[j] for j in range(d) if ab[j]) for i in range(d)]
        rhs = A.bracket(cols[a], cols[b])
        if any(Fraction(x) != Fraction(y) for x, y in zip(lhs, rhs)):
            bad += 1
    return bad


# -- the matrix M --------------------------------------------------------------------


@dataclass
class RamificationMatrix:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    mat: flint.fmpq_mat
    provenance: dict = field(default_factory=dict)

    @cached_property
    def _row_pos(self):
        return {b: i for i, b in enumerate(self.rows)}

    @cached_property
    def _col_pos(self):
        return {g: j for j, g in enumerate(self.cols)}

    def entry(self, beta: int, gamma: int) -> Fraction:
        return _frac(self.mat[self._row_pos[beta], self._col_pos[gamma]])

    def row(self, beta: int) -> list[Fraction]:
        i = self._row_pos[beta]
        return [_frac(self.mat[i, j]) for j in range(len(self.cols))]

    def rank(self) -> int:
        if not self.rows or not self.cols:
            return 0
        return self.mat.rank()

    def kernel_dim(self) -> int:
        return len(self.cols) - self.rank()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> flint.fmpq_mat:
        rp, cp = self._row_pos, self._col_pos
        return flint.fmpq_mat(len(rows), len(cols),
                              [self.mat[rp[b], cp[g]] for b in rows for g in cols])

    def to_lists(self) -> list[list[Fraction]]:
        return [self.row(b) for b in self.rows]

    def rescaled(self, row_scale: Sequence, col_scale: Sequence) -> "RamificationMatrix":
        m, n = len(self.rows), len(self.cols)
        entries = [self.mat[i, j] * _fq(row_scale[i]) * _fq(col_scale[j])
                   for i in range(m) for j in range(n)]
        return RamificationMatrix(self.rows, self.cols, flint.fmpq_mat(m, n, entries),
                                  dict(self.provenance, rescaled=True))


def _cover_root(G: WeylGroup, v: int, w: int) -> int:
    """Positive root ``beta`` with ``w = v s_beta`` and ``l(w) = l(v) + 1``."""
    if G.length(w) != G.length(v) + 1:
        raise PreconditionError("v is not covered by w: lengths differ by more than one")
    for k in range(G.N):
        if G.mul(v, G.reflection(k)) == w:
            return k
    raise PreconditionError("v is not covered by w: v^-1 w is not a reflection")


def build_M(G: WeylGroup, v: int, w: int, x: int, y: int,
            g_x: UnipotentElement, g_y: UnipotentElement) -> RamificationMatrix:
    mx, my, mw = G.inv[x], G.inv[y], G.inv[w]
    if mx & my or (mx | my) != mw:
        raise PreconditionError("Phi(w) is not the disjoint union of Phi(x) and Phi(y)")
    _cover_root(G, v, w)
    mv = G.inv[v]
    if not mv & ~mw:
        raise PreconditionError("Phi(v) is contained in Phi(w)")
    rows = tuple(bits(mw))
    cols = tuple(bits(mv))
    Ex = g_x.inverse_action if mx else None
    Ey = g_y.inverse_action if my else None
    entries = []
    for b in rows:
        E = Ex if (mx >> b) & 1 else Ey
        entries.extend(E[b, g] for g in cols)
    mat = flint.fmpq_mat(len(rows), len(cols), entries)
    prov = {"type": G.R.label, "v": v, "w": w, "x": x, "y": y,
            "g_x": g_x.seed_info, "g_y": g_y.seed_info}
    return RamificationMatrix(rows, cols, mat, prov)


# -- cover profile -------------------------------------------------------------------


@dataclass(frozen=True)
class CoverProfile:
    v: int
    w: int
    beta0: int
    case: str  # "interleaved" or "triangular"
    failure: tuple[str, int] | None  # hypothesis that failed and the height witnessing it
    betas: tuple[int, ...]
    gammas: tuple[int, ...]
    ks: tuple[int, ...]
    phi_minus: tuple[tuple[int, ...], ...]
    phi_plus: tuple[tuple[int, ...], ...]
    invariants: dict

    @property
    def s(self) -> int:
        return len(self.betas) - 1

    @property
    def t(self) -> int:
        return len(self.gammas) - 1

    @property
    def interleaved(self) -> bool:
        return self.case == "interleaved"

    @property
    def invariants_hold(self) -> bool:
        return all(self.invariants.values())

    def plus_rows(self, i: int) -> tuple[int, ...]:
        return tuple(sorted(self.phi_plus[i] + (self.betas[i],)))

    def plus_cols(self, i: int) -> tuple[int, ...]:
        extra = (self.gammas[i],) if i < self.s else ()
        return tuple(sorted(self.phi_plus[i] + extra))


def _multiple(R: RootSystem, diff: Sequence[int], base: int) -> int | None:
    """``k`` with ``diff = k * phi_base``, or ``None``."""
    b = R.coords[base]
    ratios = {Fraction(d, c) for d, c in zip(diff, b) if c}
    if len(ratios) != 1 or any(d for d, c in zip(diff, b) if not c):
        return None
    k = ratios.pop()
    return int(k) if k.denominator == 1 else None


def hypotheses(R: RootSystem, mv: int, mw: int) -> tuple[str, int] | None:
    """First failure of (H1) or (H2), as ``(name, h)``, or ``None``.

    (H2) is checked from ``h = 0`` on, i.e. in its strict-inequality form:
    equal counts below height ``h`` force ``Phi(v)_h`` into ``Phi(w)``.
    """
    H = R.heights
    top = max(H[:R.n_pos])
    cv = cw = 0
    for h in range(0, top + 1):
        layer = [k for k in range(R.n_pos) if H[k] == h]
        cv += sum((mv >> k) & 1 for k in layer)
        cw += sum((mw >> k) & 1 for k in layer)
        if cv > cw:
            return ("H1", h)
        if cv == cw and h < top:
            nxt = [k for k in range(R.n_pos) if H[k] == h + 1]
            if any((mv >> k) & 1 and not (mw >> k) & 1 for k in nxt):
                return ("H2", h)
    return None


def cover_profile(G: WeylGroup, v: int, w: int) -> CoverProfile:
    R = G.R
    beta = _cover_root(G, v, w)
    mv, mw = G.inv[v], G.inv[w]
    H = R.heights
    betas = tuple(bits(mw & ~mv))
    gammas = tuple(bits(mv & ~mw))
    fail = hypotheses(R, mv, mw)
    if fail is not None:
        return CoverProfile(v, w, beta, "triangular", fail, betas, gammas, (), (), (), {})
    s = len(betas) - 1
    inv = {"cover_root": betas[0] == beta, "s_eq_t_plus_1": len(betas) == len(gammas) + 1}
    seq = [betas[0]]
    for i in range(len(gammas)):
        seq += [gammas[i], betas[i + 1]] if i + 1 < len(betas) else [gammas[i]]
    inv["interleaving"] = inv["s_eq_t_plus_1"] and all(
        H[a] < H[b] for a, b in zip(seq, seq[1:]))
    ks = []
    if inv["s_eq_t_plus_1"]:
        for i, g in enumerate(gammas):
            diff = [a - b for a, b in zip(R.coords[betas[i + 1]], R.coords[g])]
            ks.append(_multiple(R, diff, betas[0]))
    inv["multipliers"] = inv["s_eq_t_plus_1"] and all(k is not None and k >= 1 for k in ks)
    common = [k for k in bits(mv & mw)]
    inf = float("inf")

    def hg(i):
        if i < 0:
            return 0
        return H[gammas[i]] if i < len(gammas) else inf

    minus, plus = [], []
    for i in range(s + 1):
        hb = H[betas[i]]
        minus.append(tuple(k for k in common if hg(i - 1) <= H[k] <= hb))
        plus.append(tuple(k for k in common if hb < H[k] < hg(i)))
    flat = [k for blk in minus + plus for k in blk]
    inv["partition"] = sorted(flat) == common
    return CoverProfile(v, w, beta, "interleaved", None, betas, gammas,
                        tuple(k if k is not None else 0 for k in ks),
                        tuple(minus), tuple(plus), inv)


# -- block structure -----------------------------------------------------------------


def block_positions(p: CoverProfile) -> tuple[dict[int, int], dict[int, int]]:
    """Position of each row and column label in the order ``M_0-, M_0+, M_1-, ...``."""
    rpos, cpos = {}, {}
    for i in range(p.s + 1):
        for k in p.phi_minus[i]:
            rpos[k] = cpos[k] = 2 * i
        for k in p.phi_plus[i]:
            rpos[k] = cpos[k] = 2 * i + 1
        rpos[p.betas[i]] = 2 * i + 1
        if i < p.s:
            cpos[p.gammas[i]] = 2 * i + 1
    return rpos, cpos


def is_block_triangular(M: RamificationMatrix, p: CoverProfile) -> bool:
    """Zero below the diagonal blocks, and each ``M_i-`` unit upper triangular."""
    rpos, cpos = block_positions(p)
    for b in M.rows:
        for g in M.cols:
            if cpos[g] < rpos[b] and M.entry(b, g):
                return False
    for blk in p.phi_minus:
        for a in blk:
            if M.entry(a, a) != 1:
                return False
            if any(M.entry(a, b) for b in blk if b < a):
                return False
    return True


def plus_block(M: RamificationMatrix, p: CoverProfile, i: int) -> flint.fmpq_mat:
    return M.submatrix(p.plus_rows(i), p.plus_cols(i))


def block_determinants(M: RamificationMatrix, p: CoverProfile) -> list[Fraction]:
    """``det M_i+`` for ``i < s``."""
    return [_frac(plus_block(M, p, i).det()) for i in range(p.s)]


def block_kernel_criterion(M: RamificationMatrix, p: CoverProfile) -> bool:
    """Whether ``ker M != 0`` agrees with ``exists i < s: det M_i+ = 0``."""
    if not p.interleaved:
        raise PreconditionError("block criterion needs an interleaved profile")
    lhs = M.kernel_dim() > 0
    rhs = any(d == 0 for d in block_determinants(M, p))
    return lhs == rhs


def proportional_row_pairs(M: RamificationMatrix) -> list[tuple[int, int]]:
    """Pairs of nonzero rows spanning a line."""
    out = []
    rows = M.rows
    for i, a in enumerate(rows):
        for b in rows[i + 1:]:
            sub = M.submatrix((a, b), M.cols)
            if sub.rank() == 1 and any(M.row(a)) and any(M.row(b)):
                out.append((a, b))
    return out


# -- sweeps --------------------------------------------------------------------------


def eligible_instances(G: WeylGroup) -> Iterator[tuple[int, int, int, int]]:
    """All ``(v, w, x, y)`` with ``v`` covered by ``w``, ``Phi(v)`` not inside
    ``Phi(w)`` and ``Phi(w) = Phi(x) u Phi(y)``, in increasing order."""
    for w in range(G.order):
        covers = sorted(v for v, _ in G.covers_below(w) if G.inv[v] & ~G.inv[w])
        if not covers:
            continue
        xs, ys = G.decompositions(w)
        pairs = sorted(zip(xs.tolist(), ys.tolist()))
        for v in covers:
            for x, y in pairs:
                yield v, w, x, y


def sample_pair(A: ChevalleyAlgebra, inst: tuple[int, int, int, int], sample: int,
                seed: int) -> tuple[UnipotentElement, UnipotentElement]:
    v, w, x, y = inst
    key = f"{A.R.label}|{v}|{w}|{x}|{y}|{sample}"
    return (UnipotentElement.random(A, key + "|x", seed),
            UnipotentElement.random(A, key + "|y", seed))


def kernel_records(G: WeylGroup, samples: int, seed: int) -> Iterator[dict]:
    """One record per ``(v, w, x, y, sample)``."""
    A = build_chevalley(G.R)
    profiles: dict[tuple[int, int], CoverProfile] = {}
    for inst in eligible_instances(G):
        v, w, x, y = inst
        p = profiles.get((v, w))
        if p is None:
            p = profiles[(v, w)] = cover_profile(G, v, w)
        for smp in range(samples):
            gx, gy = sample_pair(A, inst, smp, seed)
            M = build_M(G, v, w, x, y, gx, gy)
            kd = M.kernel_dim()
            rec = {"type": G.R.label, "v": G.word_str(v), "w": G.word_str(w),
                   "x": G.word_str(x), "y": G.word_str(y), "sample": smp, "seed": seed,
                   "case": p.case, "kernel_dim": kd}
            if p.interleaved:
                dets = block_determinants(M, p)
                rec["block_dets"] = [str(d) for d in dets]
                rec["kermi"] = (kd > 0) == any(d == 0 for d in dets)
                rec["block_triangular"] = is_block_triangular(M, p)
                rec["profile_invariants"] = p.invariants_hold
            yield rec


def verify_kernel_nonzero(G: WeylGroup, samples: int, seed: int) -> dict:
    out = {"type": G.R.label, "samples_per_instance": samples, "seed": seed,
           "instances": 0, "matrices": 0, "kernel_zero": [], "kermi_failures": [],
           "triangular_failures": [], "profile_failures": [], "cases": {}}
    seen = set()
    for rec in kernel_records(G, samples, seed):
        key = (rec["v"], rec["w"], rec["x"], rec["y"])
        if key not in seen:
            seen.add(key)
            out["instances"] += 1
            out["cases"][rec["case"]] = out["cases"].get(rec["case"], 0) + 1
        out["matrices"] += 1
        if rec["kernel_dim"] == 0:
            out["kernel_zero"].append(rec)
        if rec.get("kermi") is False:
            out["kermi_failures"].append(rec)
        if rec.get("block_triangular") is False:
            out["triangular_failures"].append(rec)
        if rec.get("profile_invariants") is False:
            out["profile_failures"].append(rec)
    return out


def verify_profiles(G: WeylGroup) -> dict:
    """Profile invariants for every cover ``v < w`` (including weak-order covers)."""
    total = interleaved = 0
    bad = []
    for w in range(G.order):
        for v, _ in G.covers_below(w):
            total += 1
            p = cover_profile(G, v, w)
            if p.interleaved:
                interleaved += 1
                if not p.invariants_hold:
                    bad.append((v, w, p.invariants))
    return {"type": G.R.label, "covers": total, "interleaved": interleaved, "violations": bad}


_STRINGS: dict[str, dict] = {}


def _string_mask(R: RootSystem, theta: int, beta: int) -> int:
    """Positive roots in ``theta + Z beta``."""
    cache = _STRINGS.setdefault(R.label, {})
    key = (theta, beta)
    if key not in cache:
        t, b = R.coords[theta], R.coords[beta]
        bound = 2 * max(R.heights) + 1
        mask = 0
        for m in range(-bound, bound + 1):
            k = R.index.get(tuple(x + m * y for x, y in zip(t, b)))
            if k is not None and k < R.n_pos:
                mask |= 1 << k
        cache[key] = mask
    return cache[key]


def inversions_cover_check(G: WeylGroup, w: int, beta: int) -> bool:
    """``#(theta + Z beta) & Phi(w) == #(theta + Z beta) & Phi(v)`` for
    ``v = w s_beta`` and every positive ``theta != beta``."""
    v = G.mul(w, G.reflection(beta))
    if G.length(v) != G.length(w) - 1:
        raise PreconditionError("w s_beta is not covered by w")
    R = G.R
    mv, mw = G.inv[v], G.inv[w]
    for theta in range(R.n_pos):
        if theta == beta:
            continue
        S = _string_mask(R, theta, beta)
        if popcount(S & mw) != popcount(S & mv):
            return False
    return True


def verify_inversions_cover(G: WeylGroup) -> dict:
    total = 0
    bad = []
    for w in range(G.order):
        for _, k in G.covers_below(w):
            total += 1
            if not inversions_cover_check(G, w, k):
                bad.append((w, k))
    return {"type": G.R.label, "covers": total, "violations": bad}


def poincare_transfer(G: WeylGroup, samples: int, seed: int) -> dict:
    """For each interleaved eligible cover, find the blocks ``i0`` whose
    determinant vanishes for every sampled ``g`` in the case ``(x, y) = (w, e)``;
    then check every decomposition ``(x, y)``: if all roots of ``Phi(w)`` in
    ``[beta_i0; gamma_i0]`` lie on one side, ``det M_i0+`` vanishes again."""
    A = build_chevalley(G.R)
    R = G.R
    e = G.identity
    ident = UnipotentElement.identity(A)
    covers = checked = routed = 0
    no_block = []
    bad = []
    for w in range(G.order):
        vs = sorted(v for v, _ in G.covers_below(w) if G.inv[v] & ~G.inv[w])
        if not vs:
            continue
        xs, ys = G.decompositions(w)
        pairs = sorted(zip(xs.tolist(), ys.tolist()))
        for v in vs:
            p = cover_profile(G, v, w)
            if not p.interleaved:
                continue
            covers += 1
            zero = set(range(p.s))
            for smp in range(samples):
                g, _ = sample_pair(A, (v, w, w, e), smp, seed)
                M = build_M(G, v, w, w, e, g, ident)
                dets = block_determinants(M, p)
                zero &= {i for i, d in enumerate(dets) if d == 0}
            if not zero:
                no_block.append((v, w))
                continue
            for x, y in pairs:
                for i0 in sorted(zero):
                    iv = R.interval(p.betas[i0], p.gammas[i0]) & G.inv[w]
                    if iv & G.inv[x] and iv & G.inv[y]:
                        continue
                    routed += 1
                    for smp in range(samples):
                        gx, gy = sample_pair(A, (v, w, x, y), smp, seed)
                        checked += 1
                        M = build_M(G, v, w, x, y, gx, gy)
                        if _frac(plus_block(M, p, i0).det()) != 0:
                            bad.append((v, w, x, y, i0, smp))
    return {"type": R.label, "covers": covers, "routed": routed, "checked": checked,
            "no_vanishing_block": no_block, "violations": bad}


# -- the worked D4 example -----------------------------------------------------------


def d4_worked_instance() -> tuple[WeylGroup, int, int]:
    """``w = s2 s3 s1 s2 s4 s2`` and ``v = w s2`` in type D4."""
    G = enumerate_group("D4")
    w = G.from_word([1, 2, 0, 1, 3, 1])
    v = G.mul(w, G.from_word([1]))
    return G, v, w
