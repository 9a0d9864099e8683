"""Lattice vertex superalgebras V_L for positive definite integral lattices.

States are pairs ``(boson, point)``: ``boson`` is a sorted tuple of
``(direction, mode)`` factors standing for ``alpha_direction(-mode)`` and
``point`` is the coordinate tuple of a lattice vector in the chosen basis.

The vertex operator of ``e^alpha`` acts by

    (e^alpha)_n (u x e^lam) = eps(alpha, lam) sum_{p - q = -n-1-(alpha,lam)} S^-_p S^+_q u x e^{lam+alpha}

where ``S^-_p`` and ``S^+_q`` are the coefficients of
``exp(sum_k alpha(-k) z^k / k)`` and ``exp(-sum_k alpha(k) z^-k / k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exact import Vector, vec_add, vec_scale
from .linalg import congruence_diagonalize, solve
from .voa import Generator, SparseOperator, TruncatedVOSA, descendant_mode

__all__ = [
    "IntegralLattice",
    "LatticeValidationError",
    "CocycleTable",
    "LatticeState",
    "synthesize_cocycle",
    "e_alpha_sign",
    "vertex_e_alpha_mode",
    "LatticeVOSA",
    "build_lattice_vosa",
    "boson_partitions",
]

Point = Tuple[int, ...]
Boson = Tuple[Tuple[int, int], ...]


class LatticeValidationError(ValueError):
    """Invalid lattice data; ``path`` points at the offending entry."""

    def __init__(self, message: str, path: Tuple = ()):
        self.path = tuple(path)
        super().__init__(message)


@dataclass(frozen=True)
class IntegralLattice:
    gram: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = self.gram
        if not rows:
            raise LatticeValidationError("gram must be a non-empty square matrix")
        d = len(rows)
        clean = []
        for i, row in enumerate(rows):
            if len(row) != d:
                raise LatticeValidationError(f"row {i} has length {len(row)}, expected {d}", (i,))
            out = []
            for j, x in enumerate(row):
                if isinstance(x, bool) or Fraction(x).denominator != 1:
                    raise LatticeValidationError(f"entry ({i},{j}) = {x} is not an integer", (i, j))
                out.append(int(x))
            clean.append(tuple(out))
        for i in range(d):
            for j in range(i + 1, d):
                if clean[i][j] != clean[j][i]:
                    raise LatticeValidationError(
                        f"gram is not symmetric: entry ({i},{j}) = {clean[i][j]} but ({j},{i}) = {clean[j][i]}",
                        (i, j),
                    )
        pivots, _ = congruence_diagonalize(clean)
        if any(p <= 0 for p in pivots):
            raise LatticeValidationError("gram is not positive definite")
        object.__setattr__(self, "gram", tuple(clean))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "IntegralLattice":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def pair(self, a: Sequence[int], b: Sequence[int]) -> int:
        g = self.gram
        return sum(a[i] * g[i][j] * b[j] for i in range(self.rank) for j in range(self.rank) if a[i] and b[j])

    def norm(self, a: Sequence[int]) -> int:
        return self.pair(a, a)

    def dual_gram(self) -> List[List[Fraction]]:
        d = self.rank
        cols = [solve(self.gram, [Fraction(int(i == j)) for i in range(d)]) for j in range(d)]
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def points(self, max_norm) -> List[Point]:
        """Lattice vectors with ``(l, l) <= max_norm``, sorted by norm then descending coordinates."""
        max_norm = Fraction(max_norm)
        if max_norm < 0:
            return []
        inv = self.dual_gram()
        # |l_i|^2 <= (l,l) * (G^-1)_ii
        bounds = [math.isqrt(math.floor(max_norm * inv[i][i])) for i in range(self.rank)]
        pts: List[Point] = []

        def rec(i, acc):
            if i == self.rank:
                if self.norm(acc) <= max_norm:
                    pts.append(tuple(acc))
                return
            for x in range(-bounds[i], bounds[i] + 1):
                acc.append(x)
                rec(i + 1, acc)
                acc.pop()

        rec(0, [])
        pts.sort(key=lambda p: (self.norm(p), tuple(-x for x in p)))
        return pts


def _basis_vector(d: int, i: int, s: int = 1) -> Point:
    return tuple(s if k == i else 0 for k in range(d))


@dataclass(frozen=True)
class CocycleTable:
    """Bimultiplicative sign ``eps`` given by its values on basis pairs."""

    lattice: IntegralLattice
    table: Tuple[Tuple[int, ...], ...]

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> int:
        e = 0
        d = self.lattice.rank
        for i in range(d):
            if not a[i]:
                continue
            for j in range(d):
                if b[j] and self.table[i][j] == -1:
                    e += a[i] * b[j]
        return -1 if e % 2 else 1

    def commutator_holds(self, a: Sequence[int], b: Sequence[int]) -> bool:
        L = self.lattice
        want = -1 if (L.pair(a, b) + L.norm(a) * L.norm(b)) % 2 else 1
        return self(a, b) * self(b, a) == want


def synthesize_cocycle(L: IntegralLattice) -> CocycleTable:
    """Ordered-basis cocycle.

    Off the diagonal: ``(-1)^{(a_i,a_j)+(a_i,a_i)(a_j,a_j)}`` for i > j and 1
    for i < j.  On the diagonal: ``(-1)^{((a_i,a_i)+(a_i,a_i)^2)/2}``, the
    value that makes ``eps(a, -a)`` agree with :func:`e_alpha_sign` (the
    commutator condition alone leaves the diagonal free).
    """
    g = L.gram
    d = L.rank
    table = []
    for i in range(d):
        row = []
        for j in range(d):
            if i > j:
                e = g[i][j] + g[i][i] * g[j][j]
            elif i == j:
                e = (g[i][i] + g[i][i] ** 2) // 2
            else:
                e = 0
            row.append(-1 if e % 2 else 1)
        table.append(tuple(row))
    return CocycleTable(L, tuple(table))


def e_alpha_sign(L: IntegralLattice, alpha: Sequence[int]) -> int:
    n = L.norm(alpha)
    return -1 if ((n + n * n) // 2) % 2 else 1


@dataclass(frozen=True)
class LatticeState:
    boson: Boson
    point: Point

    def weight(self, L: IntegralLattice) -> Fraction:
        return Fraction(sum(m for _, m in self.boson)) + Fraction(L.norm(self.point), 2)

    def __str__(self):
        b = "".join(f"a{i}(-{m})" for i, m in self.boson)
        if any(self.point):
            return (b + "e^" + str(list(self.point))) if b else "e^" + str(list(self.point))
        return (b + "1") if b else "1"


def boson_partitions(d: int, n: int) -> List[Boson]:
    """Multisets of ``(direction, mode)`` with total mode ``n``, canonically sorted."""
    atoms = [(i, m) for m in range(n, 0, -1) for i in range(d)]
    out: List[Boson] = []

    def rec(start, left, acc):
        if left == 0:
            out.append(tuple(acc))
            return
        for t in range(start, len(atoms)):
            a = atoms[t]
            if a[1] <= left:
                acc.append(a)
                rec(t, left - a[1], acc)
                acc.pop()

    rec(0, n, [])
    return out


def _bkey(f):
    return (-f[1], f[0])


def _insert(boson: Boson, f) -> Boson:
    lst = list(boson)
    k = 0
    while k < len(lst) and _bkey(lst[k]) <= _bkey(f):
        k += 1
    lst.insert(k, f)
    return tuple(lst)


def _remove_at(boson: Boson, k: int) -> Boson:
    return boson[:k] + boson[k + 1 :]


class _Boson:
    """Heisenberg action on boson monomials (vectors keyed by Boson tuples)."""

    def __init__(self, L: IntegralLattice):
        self.L = L
        self.g = L.gram
        self._smin: Dict = {}

    def create(self, i: int, m: int, vec: Vector) -> Vector:
        out: Vector = {}
        for b, c in vec.items():
            vec_add(out, {_insert(b, (i, m)): Fraction(1)}, c)
        return out

    def annihilate_dir(self, gi: Sequence[int], m: int, vec: Vector) -> Vector:
        """Apply ``x(m)``, m > 0, where ``gi[j] = (x, a_j)``."""
        out: Vector = {}
        for b, c in vec.items():
            seen = set()
            for k, (j, mm) in enumerate(b):
                if mm != m or not gi[j] or (j, mm) in seen:
                    continue
                seen.add((j, mm))
                mult = sum(1 for f in b if f == (j, mm))
                vec_add(out, {_remove_at(b, k): Fraction(1)}, c * mult * m * gi[j])
        return out

    def create_vec(self, alpha: Sequence[int], m: int, vec: Vector) -> Vector:
        out: Vector = {}
        for i, a in enumerate(alpha):
            if a:
                vec_add(out, self.create(i, m, vec), a)
        return out

    def s_minus(self, alpha: Point, p: int) -> Vector:
        """Coefficient of z^p in exp(sum_k alpha(-k) z^k / k) applied to 1."""
        key = (alpha, p)
        if key in self._smin:
            return self._smin[key]
        if p == 0:
            res = {(): Fraction(1)}
        else:
            res = {}
            for k in range(1, p + 1):
                prev = self.s_minus(alpha, p - k)
                if prev:
                    vec_add(res, self.create_vec(alpha, k, prev), Fraction(1, p))
        self._smin[key] = res
        return res

    def s_plus_all(self, alpha: Point, u: Vector, qmax: int) -> List[Vector]:
        """``[S^+_q u for q in 0..qmax]`` with S^+ from exp(-sum_k alpha(k) z^-k / k)."""
        gi = [sum(alpha[a] * self.g[a][j] for a in range(self.L.rank)) for j in range(self.L.rank)]
        out = [dict(u)]
        for q in range(1, qmax + 1):
            acc: Vector = {}
            for k in range(1, q + 1):
                prev = out[q - k]
                if prev:
                    vec_add(acc, self.annihilate_dir(gi, k, prev), Fraction(-1, q))
            out.append(acc)
        return out

    @staticmethod
    def multiply(poly: Vector, vec: Vector) -> Vector:
        out: Vector = {}
        for p, cp in poly.items():
            for b, cb in vec.items():
                key = b
                for f in p:
                    key = _insert(key, f)
                vec_add(out, {key: Fraction(1)}, cp * cb)
        return out


def _add(a: Point, b: Point, s: int = 1) -> Point:
    return tuple(x + s * y for x, y in zip(a, b))


def _neg(a: Point) -> Point:
    return tuple(-x for x in a)


class LatticeVOSA(TruncatedVOSA):
    """V_L truncated at ``cutoff``; labels are :class:`LatticeState`."""

    def __init__(self, L: IntegralLattice, cutoff, extra_generators: Sequence[Sequence[int]] = ()):
        self.lattice = L
        self.cocycle = synthesize_cocycle(L)
        self.bos = _Boson(L)
        d = L.rank
        self.name = "lattice(gram=" + str([list(r) for r in L.gram]) + ")"
        zero = tuple([0] * d)
        gens: List[Generator] = []
        for i in range(d):
            gens.append(Generator(f"a{i}", ((LatticeState(((i, 1),), zero), Fraction(1)),), Fraction(1), 0))
        self.e_index: Dict[Point, int] = {}
        points: List[Point] = []
        for i in range(d):
            points += [_basis_vector(d, i, 1), _basis_vector(d, i, -1)]
        for lam in extra_generators:
            lam = tuple(int(x) for x in lam)
            if len(lam) != d:
                raise LatticeValidationError(f"generator {list(lam)} has wrong length")
            if any(lam) and lam not in points:
                points.append(lam)
        for lam in points:
            self.e_index[lam] = len(gens)
            n = L.norm(lam)
            gens.append(
                Generator("e^" + str(list(lam)), ((LatticeState((), lam), Fraction(1)),), Fraction(n, 2), n % 2)
            )
        dual = L.dual_gram()
        omega: Vector = {}
        for i in range(d):
            for j in range(d):
                if dual[i][j]:
                    st = LatticeState(_insert(((i, 1),), (j, 1)), zero)
                    vec_add(omega, {st: Fraction(1)}, dual[i][j] / 2)
        super().__init__(cutoff, Fraction(d), gens, {LatticeState((), zero): Fraction(1)}, omega)
        if self.cutoff < 2:
            raise ValueError("cutoff must be at least 2")
        self.zero = zero
        self._points = L.points(2 * self.cutoff)
        self._basis: Dict[Fraction, List[LatticeState]] = {}
        self._form_cache: Dict = {}
        self._point_words: Dict[Point, List] = {}

    # ---- graded structure --------------------------------------------------

    def basis(self, w):
        w = Fraction(w)
        if w < 0 or w > self.cutoff or w.denominator > 2:
            return []
        if w not in self._basis:
            out = []
            for lam in self._points:
                rest = w - Fraction(self.lattice.norm(lam), 2)
                if rest < 0 or rest.denominator != 1:
                    continue
                out += [LatticeState(b, lam) for b in boson_partitions(self.lattice.rank, int(rest))]
            self._basis[w] = out
        return self._basis[w]

    def label_weight(self, label: LatticeState) -> Fraction:
        return label.weight(self.lattice)

    def label_parity(self, label: LatticeState) -> int:
        return self.lattice.norm(label.point) % 2

    def label_str(self, label):
        return str(label)

    # ---- modes -------------------------------------------------------------

    def heisenberg_mode(self, i: int, n: int, label: LatticeState) -> Vector:
        if n < 0:
            return {LatticeState(_insert(label.boson, (i, -n)), label.point): Fraction(1)}
        if n == 0:
            c = sum(self.lattice.gram[i][j] * label.point[j] for j in range(self.lattice.rank))
            return {label: Fraction(c)} if c else {}
        gi = self.lattice.gram[i]
        r = self.bos.annihilate_dir(gi, n, {label.boson: Fraction(1)})
        return {LatticeState(b, label.point): c for b, c in r.items()}

    def e_mode(self, alpha: Point, n: int, label: LatticeState) -> Vector:
        lam = label.point
        L = self.lattice
        shift = -n - 1 - L.pair(alpha, lam)  # p - q
        qmax = sum(m for _, m in label.boson)
        if shift + qmax < 0:
            return {}
        eps = self.cocycle(alpha, lam)
        target = _add(lam, alpha)
        splus = self.bos.s_plus_all(alpha, {label.boson: Fraction(1)}, qmax)
        out: Vector = {}
        for q in range(qmax + 1):
            p = shift + q
            if p < 0 or not splus[q]:
                continue
            vec_add(out, self.bos.multiply(self.bos.s_minus(alpha, p), splus[q]), eps)
        return {LatticeState(b, target): c for b, c in out.items()}

    def gen_mode_label(self, g, n, label):
        d = self.lattice.rank
        if g < d:
            return self.heisenberg_mode(g, n, label)
        gen = self.generators[g]
        (state, _), = gen.vector
        return self.e_mode(state.point, n, label)

    def _point_word(self, lam: Point):
        """Terms (coeff, word) with sum coeff * word(1) = e^lam."""
        if lam in self._point_words:
            return self._point_words[lam]
        if not any(lam):
            res = [(Fraction(1), ())]
        else:
            i = next(k for k, x in enumerate(lam) if x)
            step = _basis_vector(self.lattice.rank, i, 1 if lam[i] > 0 else -1)
            mu = _add(lam, step, -1)
            # (e^step)_{-(step,mu)-1} e^mu = eps(step, mu) e^lam
            n = -self.lattice.pair(step, mu) - 1
            c = Fraction(1, self.cocycle(step, mu))
            g = self.e_index[step]
            res = [(c * cm, ((g, n),) + wm) for cm, wm in self._point_word(mu)]
        self._point_words[lam] = res
        return res

    def word(self, label: LatticeState):
        bos = tuple((i, -m) for i, m in label.boson)
        return [(c, bos + w) for c, w in self._point_word(label.point)]

    # ---- form and involution ---------------------------------------------------

    def _boson_form(self, a: Boson, b: Boson) -> Fraction:
        if len(a) == 0:
            return Fraction(1) if not b else Fraction(0)
        key = (a, b)
        hit = self._form_cache.get(key)
        if hit is not None:
            return hit
        (i, m) = a[0]
        val = Fraction(0)
        for b2, c in self.bos.annihilate_dir(self.lattice.gram[i], m, {b: Fraction(1)}).items():
            val += c * self._boson_form(a[1:], b2)
        self._form_cache[key] = val
        return val

    def form_entry(self, a: LatticeState, b: LatticeState):
        if a.point != b.point:
            return Fraction(0)
        if sum(m for _, m in a.boson) != sum(m for _, m in b.boson):
            return Fraction(0)
        return self._boson_form(a.boson, b.boson)

    def phi_label(self, label: LatticeState):
        return (Fraction((-1) ** len(label.boson)), LatticeState(label.boson, _neg(label.point)))

    # ---- conveniences -------------------------------------------------------------

    def heisenberg_vector(self, alpha: Sequence[int]) -> Vector:
        """``alpha(-1) 1`` for a lattice vector given in basis coordinates."""
        out: Vector = {}
        for i, a in enumerate(alpha):
            if a:
                out[LatticeState(((i, 1),), self.zero)] = Fraction(a)
        return out

    def exp_vector(self, lam: Sequence[int]) -> Vector:
        return {LatticeState((), tuple(lam)): Fraction(1)}


def vertex_e_alpha_mode(V: LatticeVOSA, alpha: Sequence[int], n: int) -> SparseOperator:
    """The mode ``(e^alpha)_n`` on the truncated pieces."""
    return descendant_mode(V, V.exp_vector(alpha), n)


def build_lattice_vosa(L: IntegralLattice, cutoff, generators: Sequence[Sequence[int]] = ()) -> LatticeVOSA:
    return LatticeVOSA(L, cutoff, generators)
