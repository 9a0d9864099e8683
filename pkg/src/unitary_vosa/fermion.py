"""Free fermions: the Fock module of the Heisenberg superalgebra at level 1.

A basis monomial ``u^{i1}(-r1) ... u^{ik}(-rk) 1`` is stored as the tuple
``((i1, r1), ..., (ik, rk))`` with positive half-odd ``r``, ordered by
decreasing ``r`` and then increasing ``i``.  The odd generators
``u^i(-1/2) 1`` have vertex-operator modes ``u_n = u(n + 1/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .exact import Vector, parse_rational, vec_add
from .linalg import rank, solve
from .voa import Generator, TruncatedVOSA

__all__ = [
    "FermionSpace",
    "FermionMonomial",
    "fermion_basis",
    "fermion_apply",
    "FermionVOSA",
    "build_fermion_vosa",
]

HALF = Fraction(1, 2)

FermionMonomial = Tuple[Tuple[int, Fraction], ...]


def _key(f: Tuple[int, Fraction]):
    return (-f[1], f[0])


@dataclass(frozen=True)
class FermionSpace:
    n: int
    form: Tuple[Tuple[Fraction, ...], ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("n must be a positive integer")
        form = self.form or tuple(tuple(Fraction(int(i == j)) for j in range(self.n)) for i in range(self.n))
        form = tuple(tuple(parse_rational(x) for x in row) for row in form)
        if len(form) != self.n or any(len(r) != self.n for r in form):
            raise ValueError(f"form must be {self.n}x{self.n}")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if form[i][j] != form[j][i]:
                    raise ValueError(f"form is not symmetric at entry ({i},{j})")
        if rank(form) < self.n:
            raise ValueError("form is degenerate")
        object.__setattr__(self, "form", form)

    def inverse(self) -> List[List[Fraction]]:
        n = self.n
        cols = [solve(self.form, [Fraction(int(i == j)) for i in range(n)]) for j in range(n)]
        return [[cols[j][i] for j in range(n)] for i in range(n)]


def fermion_basis(F: FermionSpace, w) -> List[FermionMonomial]:
    """All canonical monomials of weight ``w``."""
    w = Fraction(w)
    if w < 0 or w.denominator > 2:
        return []
    # atoms u^i(-r) with r <= w
    top = math.floor(w + HALF)
    atoms = sorted(((i, Fraction(2 * k + 1, 2)) for k in range(top) for i in range(F.n)), key=_key)
    out: List[FermionMonomial] = []

    def rec(start: int, left: Fraction, acc: List):
        if left == 0:
            out.append(tuple(acc))
            return
        for t in range(start, len(atoms)):
            a = atoms[t]
            if a[1] <= left:
                acc.append(a)
                rec(t + 1, left - a[1], acc)
                acc.pop()

    rec(0, w, [])
    return out


def _apply_label(F: FermionSpace, i: int, r: Fraction, mono: FermionMonomial) -> Vector:
    if r < 0:
        f = (i, -r)
        if f in mono:
            return {}
        pos = sum(1 for g in mono if _key(g) < _key(f))
        new = mono[:pos] + (f,) + mono[pos:]
        return {new: Fraction((-1) ** pos)}
    out: Vector = {}
    for k, (j, s) in enumerate(mono):
        if s == r and F.form[i][j]:
            vec_add(out, {mono[:k] + mono[k + 1 :]: Fraction(1)}, (-1) ** k * F.form[i][j])
    return out


def fermion_apply(F: FermionSpace, mode: Tuple[int, Fraction], v: Vector) -> Vector:
    """Apply ``u^i(r)`` to a vector of monomials."""
    i, r = mode
    r = Fraction(r)
    if r.denominator != 2:
        raise ValueError(f"fermion modes are half-odd integers, got {r}")
    out: Vector = {}
    for mono, c in v.items():
        vec_add(out, _apply_label(F, i, r, mono), c)
    return out


def _fmt(mono: FermionMonomial) -> str:
    if not mono:
        return "1"
    return "".join(f"u{i}({-r})" for i, r in mono) + "1"


class FermionVOSA(TruncatedVOSA):
    def __init__(self, F: FermionSpace, cutoff):
        self.space = F
        self.name = f"fermion(n={F.n})"
        self._basis: Dict[Fraction, List[FermionMonomial]] = {}
        self._form_cache: Dict = {}
        gens = [Generator(f"u{i}", ((((i, HALF),), Fraction(1)),), HALF, 1) for i in range(F.n)]
        inv = F.inverse()
        omega: Vector = {}
        for i in range(F.n):
            for j in range(F.n):
                if inv[i][j]:
                    mono = ((i, Fraction(3, 2)), (j, HALF))
                    vec_add(omega, {mono: Fraction(1)}, inv[i][j] / 2)
        super().__init__(cutoff, Fraction(F.n, 2), gens, {(): Fraction(1)}, omega)
        if self.cutoff < 2:
            raise ValueError("cutoff must be at least 2 so that the conformal vector exists")

    def basis(self, w):
        w = Fraction(w)
        if w < 0 or w > self.cutoff or w.denominator > 2:
            return []
        if w not in self._basis:
            self._basis[w] = fermion_basis(self.space, w)
        return self._basis[w]

    def label_weight(self, label):
        return sum((r for _, r in label), Fraction(0))

    def label_parity(self, label):
        return len(label) % 2

    def gen_mode_label(self, g, n, label):
        return _apply_label(self.space, g, Fraction(n) + HALF, label)

    def word(self, label):
        return [(Fraction(1), tuple((i, int(-r - HALF)) for i, r in label))]

    def form_entry(self, a, b):
        if len(a) != len(b) or self.label_weight(a) != self.label_weight(b):
            return Fraction(0)
        key = (a, b)
        hit = self._form_cache.get(key)
        if hit is not None:
            return hit
        if not a:
            val = Fraction(1)
        else:
            # (u(-r) a', b) = (a', u(r) b)
            i, r = a[0]
            val = Fraction(0)
            for b2, c in _apply_label(self.space, i, r, b).items():
                val += c * self.form_entry(a[1:], b2)
        self._form_cache[key] = val
        return val

    def phi_label(self, label):
        return (Fraction((-1) ** len(label)), label)

    def label_str(self, label):
        return _fmt(label)


def build_fermion_vosa(F: FermionSpace, cutoff) -> FermionVOSA:
    return FermionVOSA(F, cutoff)
