"""Generic truncated vertex operator superalgebras.

An engine (Neveu-Schwarz, free fermion, lattice, or a sum/tensor of
those) subclasses :class:`TruncatedVOSA` and supplies

* a graded basis of labels up to the cutoff,
* exact actions of the *generator* modes on its (untruncated) carrier,
* for every basis label, a word of generator modes producing it from the
  vacuum,
* the Hermitian form on labels and the anti-linear involution.

Modes of arbitrary vectors are then derived from generator modes with the
iterate formula

    (a_m b)_n = sum_i (-1)^i C(m, i) [a_{m-i} b_{n+i}
                 - (-1)^m (-1)^{[a][b]} b_{m+n-i} a_i],

which terminates on every vector because weights are bounded below.
Intermediate vectors may sit above the cutoff; they live in the carrier,
and only final results are ever truncated.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

from .exact import (
    Vector,
    conj,
    fmt_rational,
    scalar_to_json,
    vec_add,
    vec_scale,
    vec_sub,
    weight as as_weight,
)
from .linalg import HermitianMatrix, is_symmetric

__all__ = [
    "CutoffExceeded",
    "SymmetryFailure",
    "Generator",
    "TruncatedVOSA",
    "SparseOperator",
    "CheckReport",
    "CommutatorResult",
    "binomial",
    "descendant_mode",
    "adjoint_mode",
    "adjoint_modes",
    "invariance_check",
    "commutator_check",
    "bilinear_from_hermitian",
    "corrupt_form",
    "half_integers",
    "CommutatorTuple",
    "random_commutator_tuples",
]


class CutoffExceeded(Exception):
    """A requested vector or mode needs data above the weight cutoff."""


class SymmetryFailure(Exception):
    """A bilinear form that should be symmetric is not."""


def binomial(m: int, i: int) -> Fraction:
    """Generalised binomial coefficient; ``m`` may be negative."""
    if i < 0:
        return Fraction(0)
    num = 1
    for t in range(i):
        num *= m - t
    return Fraction(num, math.factorial(i))


def half_integers(lo, hi) -> List[Fraction]:
    lo, hi = Fraction(lo), Fraction(hi)
    k = math.ceil(lo * 2)
    out = []
    while Fraction(k, 2) <= hi:
        out.append(Fraction(k, 2))
        k += 1
    return out


@dataclass(frozen=True)
class Generator:
    name: str
    vector: Tuple  # frozen items of a Vector
    weight: Fraction
    parity: int

    @property
    def vec(self) -> Vector:
        return dict(self.vector)


def _freeze(v: Vector) -> Tuple:
    return tuple(sorted(v.items(), key=lambda kv: repr(kv[0])))


class TruncatedVOSA:
    """Base class; see the module docstring for what subclasses provide."""

    name: str = "vosa"
    min_weight: Fraction = Fraction(0)

    def __init__(self, cutoff, central_charge, generators: Sequence[Generator], vacuum: Vector, conformal: Vector):
        self.cutoff = as_weight(cutoff)
        self.central_charge = central_charge
        self.generators: List[Generator] = list(generators)
        self.vacuum: Vector = dict(vacuum)
        self.conformal: Vector = dict(conformal)
        self._mode_cache: Dict = {}
        self._gen_cache: Dict = {}
        self._index_cache: Dict = {}
        self._gram_cache: Dict = {}

    # ---- engine hooks -------------------------------------------------

    def basis(self, w) -> List[Hashable]:
        raise NotImplementedError

    def label_weight(self, label) -> Fraction:
        raise NotImplementedError

    def label_parity(self, label) -> int:
        raise NotImplementedError

    def gen_mode_label(self, g: int, n: int, label) -> Vector:
        """Mode ``n`` of generator ``g`` applied to a carrier label."""
        raise NotImplementedError

    def word(self, label) -> List[Tuple[Any, Tuple[Tuple[int, int], ...]]]:
        """``label == sum(c * g1_{n1} g2_{n2} ... 1)`` over the returned terms."""
        raise NotImplementedError

    def form_entry(self, a, b):
        raise NotImplementedError

    def phi_label(self, label) -> Tuple[Any, Hashable]:
        raise NotImplementedError

    def coords(self, w, vec: Vector) -> List:
        """Coordinates of ``vec`` (homogeneous of weight ``w``) in ``basis(w)``."""
        idx = self.index(w)
        out = [Fraction(0)] * len(idx)
        for k, c in vec.items():
            if k not in idx:
                raise ValueError(f"label {k!r} is not a basis label at weight {w}")
            out[idx[k]] = c
        return out

    # ---- graded structure ----------------------------------------------

    def weights(self) -> List[Fraction]:
        return [w for w in half_integers(0, self.cutoff) if self.basis(w)]

    def dims(self) -> Dict[Fraction, int]:
        return {w: len(self.basis(w)) for w in half_integers(0, self.cutoff)}

    def index(self, w) -> Dict[Hashable, int]:
        w = Fraction(w)
        if w not in self._index_cache:
            self._index_cache[w] = {l: i for i, l in enumerate(self.basis(w))}
        return self._index_cache[w]

    def vec_weight(self, vec: Vector) -> Optional[Fraction]:
        ws = {self.label_weight(l) for l in vec}
        if not ws:
            return None
        if len(ws) > 1:
            raise ValueError("vector is not homogeneous")
        return ws.pop()

    def vec_parity(self, vec: Vector) -> int:
        ps = {self.label_parity(l) for l in vec}
        if len(ps) > 1:
            raise ValueError("vector is not parity-homogeneous")
        return ps.pop() if ps else 0

    def homogeneous_parts(self, vec: Vector) -> Dict[Fraction, Vector]:
        parts: Dict[Fraction, Vector] = {}
        for l, c in vec.items():
            parts.setdefault(self.label_weight(l), {})[l] = c
        return parts

    def project(self, vec: Vector) -> Dict[Fraction, List]:
        """Coordinates of every homogeneous part in the truncated basis."""
        out = {}
        for w, part in self.homogeneous_parts(vec).items():
            if w > self.cutoff:
                raise CutoffExceeded(f"vector has a component of weight {w} above cutoff {self.cutoff}")
            out[w] = self.coords(w, part)
        return out

    def is_zero_vector(self, vec: Vector) -> bool:
        """True iff ``vec`` vanishes in the truncated algebra (modulo any radical)."""
        return all(not any(c) for c in self.project(vec).values())

    def basis_vector(self, w, i) -> Vector:
        return {self.basis(w)[i]: Fraction(1)}

    def from_coords(self, w, coords: Sequence) -> Vector:
        out: Vector = {}
        for l, c in zip(self.basis(w), coords):
            if c:
                out[l] = c
        return out

    # ---- form and involution -------------------------------------------

    def inner(self, u: Vector, v: Vector):
        """Hermitian form, linear in ``u`` and conjugate-linear in ``v``."""
        s = Fraction(0)
        for a, ca in u.items():
            wa = self.label_weight(a)
            for b, cb in v.items():
                if self.label_weight(b) != wa:
                    continue
                e = self.form_entry(a, b)
                if e:
                    s = s + ca * conj(cb) * e
        return s

    def gram(self, w) -> HermitianMatrix:
        w = Fraction(w)
        if w not in self._gram_cache:
            b = self.basis(w)
            self._gram_cache[w] = HermitianMatrix(
                [[self.form_entry(x, y) for y in b] for x in b], check=True
            )
        return self._gram_cache[w]

    def phi(self, vec: Vector) -> Vector:
        out: Vector = {}
        for l, c in vec.items():
            s, l2 = self.phi_label(l)
            vec_add(out, {l2: s}, conj(c))
        return out

    # ---- modes ------------------------------------------------------------

    def gen_mode(self, g: int, n: int, vec: Vector) -> Vector:
        out: Vector = {}
        for l, c in vec.items():
            key = (g, n, l)
            r = self._gen_cache.get(key)
            if r is None:
                r = self.gen_mode_label(g, n, l)
                self._gen_cache[key] = r
            vec_add(out, r, c)
        return out

    def _word_weight_parity(self, word) -> Tuple[Fraction, int]:
        w, p = Fraction(0), 0
        for g, m in word:
            gen = self.generators[g]
            w += gen.weight - m - 1
            p += gen.parity
        return w, p % 2

    def _word_mode_label(self, word: Tuple, n: int, label) -> Vector:
        key = (word, n, label)
        hit = self._mode_cache.get(key)
        if hit is not None:
            return hit
        if not word:
            res = {label: Fraction(1)} if n == -1 else {}
            self._mode_cache[key] = res
            return res
        (g, m), rest = word[0], word[1:]
        if not rest:
            # modes of a_{-k-1} 1 = L(-1)^k a / k!
            if m >= 0:
                res = {}
            else:
                k = -m - 1
                res = vec_scale(self.gen_mode(g, n - k, {label: 1}), (-1) ** k * binomial(n, k))
            self._mode_cache[key] = res
            return res
        gen = self.generators[g]
        wb, pb = self._word_weight_parity(rest)
        wl = self.label_weight(label)
        if m >= 0:
            imax = m
        else:
            top = max(wl + wb - n - 1, wl + gen.weight - 1) - self.min_weight
            imax = math.floor(top)
        sign2 = -((-1) ** (m % 2)) * ((-1) ** (gen.parity * pb))
        res: Vector = {}
        for i in range(0, imax + 1):
            b = binomial(m, i) * (-1) ** i
            if not b:
                continue
            x = self._word_mode_label(rest, n + i, label)
            if x:
                vec_add(res, self.gen_mode(g, m - i, x), b)
            y = self.gen_mode(g, i, {label: 1})
            for l2, c2 in y.items():
                z = self._word_mode_label(rest, m + n - i, l2)
                if z:
                    vec_add(res, z, b * sign2 * c2)
        self._mode_cache[key] = res
        return res

    def mode(self, v: Vector, n: int, w: Vector) -> Vector:
        """``v_n w`` computed in the untruncated carrier."""
        out: Vector = {}
        for lv, cv in v.items():
            for cw_word, word in self.word(lv):
                coeff = cv * cw_word
                for lw, cw in w.items():
                    r = self._word_mode_label(tuple(word), n, lw)
                    if r:
                        vec_add(out, r, coeff * cw)
        return out

    def apply_mode(self, v: Vector, n: int, w: Vector) -> Vector:
        """Like :meth:`mode` but refuses results above the cutoff."""
        r = self.mode(v, n, w)
        for l in r:
            if self.label_weight(l) > self.cutoff:
                raise CutoffExceeded(
                    f"mode result has weight {self.label_weight(l)} above cutoff {self.cutoff}"
                )
        return r

    def L(self, n: int, w: Vector) -> Vector:
        return self.mode(self.conformal, n + 1, w)

    def describe(self) -> str:
        return self.name

    def label_str(self, label) -> str:
        return str(label)


def _vec_weight_or_raise(V: TruncatedVOSA, v: Vector) -> Fraction:
    w = V.vec_weight(v)
    if w is None:
        return Fraction(0)
    return w


@dataclass
class SparseOperator:
    """Mode action restricted to the truncated graded pieces.

    ``blocks[source_weight]`` maps source column index -> {target row: coeff}.
    """

    degree: Fraction
    blocks: Dict[Fraction, Dict[int, Dict[int, Any]]] = field(default_factory=dict)

    def block(self, ws) -> Dict[int, Dict[int, Any]]:
        return self.blocks.get(Fraction(ws), {})

    def matrix(self, V: TruncatedVOSA, ws) -> List[List]:
        ws = Fraction(ws)
        rows = len(V.basis(ws + self.degree))
        cols = len(V.basis(ws))
        m = [[Fraction(0)] * cols for _ in range(rows)]
        for j, col in self.block(ws).items():
            for i, c in col.items():
                m[i][j] = c
        return m

    def apply(self, V: TruncatedVOSA, vec: Vector) -> Vector:
        out: Vector = {}
        for ws, coords in V.project(vec).items():
            if ws not in self.blocks:
                continue
            wt = ws + self.degree
            tb = V.basis(wt)
            for j, cj in enumerate(coords):
                if not cj:
                    continue
                for i, c in self.blocks[ws].get(j, {}).items():
                    vec_add(out, {tb[i]: c}, cj)
        return out

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        out = SparseOperator(self.degree + other.degree)
        for ws, bcols in other.blocks.items():
            mid = ws + other.degree
            acols = self.blocks.get(mid)
            if acols is None:
                continue
            nb: Dict[int, Dict[int, Any]] = {}
            for j, col in bcols.items():
                acc: Dict[int, Any] = {}
                for k, ck in col.items():
                    for i, ci in acols.get(k, {}).items():
                        vec_add(acc, {i: ci}, ck)
                if acc:
                    nb[j] = acc
            out.blocks[ws] = nb
        return out

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        out = SparseOperator(self.degree, {k: {j: dict(c) for j, c in v.items()} for k, v in self.blocks.items()})
        for ws, cols in other.blocks.items():
            tgt = out.blocks.setdefault(ws, {})
            for j, col in cols.items():
                acc = tgt.setdefault(j, {})
                vec_add(acc, col)
                if not acc:
                    del tgt[j]
        return out

    def scaled(self, c) -> "SparseOperator":
        return SparseOperator(
            self.degree,
            {ws: {j: vec_scale(col, c) for j, col in cols.items() if c} for ws, cols in self.blocks.items()},
        )

    def same_action(self, other: "SparseOperator") -> bool:
        if self.degree != other.degree:
            return False
        keys = set(self.blocks) | set(other.blocks)
        for ws in keys:
            a = {j: c for j, c in self.block(ws).items() if c}
            b = {j: c for j, c in other.block(ws).items() if c}
            if a != b:
                return False
        return True


def _operator_from(V: TruncatedVOSA, degree: Fraction, fn) -> SparseOperator:
    op = SparseOperator(degree)
    for ws in V.weights():
        wt = ws + degree
        if wt < 0 or wt > V.cutoff or not V.basis(wt):
            continue
        cols: Dict[int, Dict[int, Any]] = {}
        for j, l in enumerate(V.basis(ws)):
            r = fn({l: Fraction(1)})
            if not r:
                continue
            coords = V.coords(wt, r)
            col = {i: c for i, c in enumerate(coords) if c}
            if col:
                cols[j] = col
        op.blocks[ws] = cols
    return op


def descendant_mode(V: TruncatedVOSA, v: Vector, n: int) -> SparseOperator:
    """The mode ``v_n`` as a block operator on the truncated pieces."""
    wv = _vec_weight_or_raise(V, v)
    if wv > V.cutoff:
        raise CutoffExceeded(f"vector of weight {wv} lies above cutoff {V.cutoff}")
    return _operator_from(V, wv - n - 1, lambda x: V.mode(v, n, x))


def _adjoint_chain(V: TruncatedVOSA, a: Vector) -> List[Vector]:
    chain = [dict(a)]
    while True:
        nxt = V.L(1, chain[-1])
        if not nxt or V.is_zero_vector(nxt):
            return chain
        chain.append(nxt)


def adjoint_mode(V: TruncatedVOSA, a: Vector, m: int, u: Vector, chain=None) -> Vector:
    """Coefficient of z^{-m-1} in Y(e^{zL(1)}(-1)^{L(0)+2L(0)^2} z^{-2L(0)} a, z^{-1}) u."""
    w = _vec_weight_or_raise(V, a)
    e = w + 2 * w * w
    if e.denominator != 1:
        raise ValueError(f"weight {w} is not a half-integer")
    sign = -1 if e.numerator % 2 else 1
    chain = chain if chain is not None else _adjoint_chain(V, a)
    out: Vector = {}
    for k, ak in enumerate(chain):
        n = 2 * w - 2 - m - k
        if n.denominator != 1:
            raise ValueError("non-integral mode index")
        vec_add(out, V.mode(ak, int(n), u), Fraction(sign, math.factorial(k)))
    return out


def adjoint_modes(V: TruncatedVOSA, a: Vector, modes=None) -> Dict[int, SparseOperator]:
    """Adjoint-transformed modes of ``a``; degree of mode m is ``m + 1 - wt(a)``."""
    w = _vec_weight_or_raise(V, a)
    if w > V.cutoff:
        raise CutoffExceeded(f"vector of weight {w} lies above cutoff {V.cutoff}")
    chain = _adjoint_chain(V, a)
    if modes is None:
        lo = math.floor(w - 1 - V.cutoff)
        hi = math.ceil(V.cutoff + w - 1)
        modes = range(lo, hi + 1)
    out = {}
    for m in modes:
        deg = m + 1 - w
        out[m] = _operator_from(V, deg, lambda x, m=m: adjoint_mode(V, a, m, x, chain))
    return out


@dataclass
class CheckReport:
    check: str
    instance: str
    cutoff: Fraction
    status: str
    witnesses: List[Dict] = field(default_factory=list)
    details: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> Dict:
        d = {
            "check": self.check,
            "instance": self.instance,
            "cutoff": fmt_rational(self.cutoff),
            "status": self.status,
            "witnesses": self.witnesses,
        }
        d.update(self.details)
        return d


def invariance_check(V: TruncatedVOSA, a, max_weight=None, limit_witnesses: int = 20) -> CheckReport:
    """Check the invariance identity for the generator ``a`` on all basis pairs.

    ``a`` is a generator index or the generator's vector.
    """
    if isinstance(a, int):
        gen = V.generators[a]
        avec, aname = gen.vec, gen.name
    else:
        avec, aname = dict(a), "a"
        for gen in V.generators:
            if gen.vec == avec:
                aname = gen.name
    w = _vec_weight_or_raise(V, avec)
    if max_weight is None:
        max_weight = V.cutoff - w
    max_weight = Fraction(max_weight)
    if max_weight > V.cutoff - w:
        raise CutoffExceeded(f"max_weight {max_weight} exceeds cutoff - wt(a) = {V.cutoff - w}")
    phia = V.phi(avec)
    chain = _adjoint_chain(V, avec)
    witnesses = []
    checked = 0
    failures = 0
    ws = [x for x in V.weights() if x <= max_weight]
    for wv in ws:
        bv = V.basis(wv)
        for wu in ws:
            m = wv + w - 1 - wu
            if m.denominator != 1:
                continue
            m = int(m)
            rhs_vecs = [V.mode(phia, m, {l: Fraction(1)}) for l in bv]
            for lu in V.basis(wu):
                u = {lu: Fraction(1)}
                left = adjoint_mode(V, avec, m, u, chain)
                for lv, rv in zip(bv, rhs_vecs):
                    v = {lv: Fraction(1)}
                    lhs = V.inner(left, v)
                    rhs = V.inner(u, rv)
                    checked += 1
                    if lhs != rhs:
                        failures += 1
                        if len(witnesses) < limit_witnesses:
                            witnesses.append(
                                {
                                    "a": aname,
                                    "m": m,
                                    "u": V.label_str(lu),
                                    "v": V.label_str(lv),
                                    "lhs": scalar_to_json(lhs),
                                    "rhs": scalar_to_json(rhs),
                                }
                            )
    return CheckReport(
        "invariance",
        V.describe(),
        V.cutoff,
        "pass" if failures == 0 else "fail",
        witnesses,
        {"generator": aname, "max_weight": fmt_rational(max_weight), "pairs_checked": checked, "failures": failures},
    )


@dataclass
class CommutatorResult:
    passed: bool
    lhs: Vector
    rhs: Vector


def commutator_check(V: TruncatedVOSA, u: Vector, v: Vector, m: int, n: int, w: Vector) -> CommutatorResult:
    """Compare ``u_m v_n w - (-1)^{[u][v]} v_n u_m w`` with ``sum_i C(m,i) (u_i v)_{m+n-i} w``."""
    pu, pv = V.vec_parity(u), V.vec_parity(v)
    lhs = V.mode(u, m, V.mode(v, n, w))
    vec_add(lhs, V.mode(v, n, V.mode(u, m, w)), -((-1) ** (pu * pv)))
    wu = _vec_weight_or_raise(V, u)
    wv = _vec_weight_or_raise(V, v)
    rhs: Vector = {}
    i = 0
    while wu + wv - i - 1 >= V.min_weight:
        uiv = V.mode(u, i, v)
        if uiv:
            vec_add(rhs, V.mode(uiv, m + n - i, w), binomial(m, i))
        i += 1
    diff = vec_sub(lhs, rhs)
    ok = not diff
    if not ok:
        # equality may hold only modulo the radical of the form
        try:
            ok = V.is_zero_vector(diff)
        except CutoffExceeded:
            ok = False
    return CommutatorResult(ok, lhs, rhs)


def bilinear_from_hermitian(V: TruncatedVOSA, sign: int = 1) -> Dict[Fraction, List[List]]:
    """Per-weight Gram matrices of ``<u, v> = sign * (u, phi(v))``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    out = {}
    for w in V.weights():
        b = V.basis(w)
        phis = [V.phi({l: Fraction(1)}) for l in b]
        m = [[sign * V.inner({x: Fraction(1)}, py) for py in phis] for x in b]
        bad = is_symmetric(m)
        if bad is not None:
            i, j = bad
            raise SymmetryFailure(f"weight {w}: entry ({i},{j}) = {m[i][j]} but ({j},{i}) = {m[j][i]}")
        out[w] = m
    return out


def corrupt_form(V: TruncatedVOSA, w=None, i: int = 0, j: int = 0) -> TruncatedVOSA:
    """Copy of ``V`` whose Gram entry (i, j) at weight ``w`` has flipped sign.

    Used to exercise failure paths; the Hermitian partner entry is flipped too.
    """
    if w is None:
        w = Fraction(2) if V.basis(2) else V.weights()[-1]
    w = Fraction(w)
    b = V.basis(w)
    target = {(b[i], b[j]), (b[j], b[i])}
    bad = copy.copy(V)
    bad._gram_cache = {}
    original = V.form_entry

    def form_entry(x, y):
        e = original(x, y)
        return -e if (x, y) in target else e

    bad.form_entry = form_entry
    bad.name = V.name + "[corrupted]"
    return bad


@dataclass
class CommutatorTuple:
    u: Vector
    v: Vector
    m: int
    n: int
    w: Vector


def _random_homogeneous(V: TruncatedVOSA, rng, weights) -> Vector:
    wt = rng.choice(weights)
    b = V.basis(wt)
    out: Vector = {}
    for _ in range(rng.randint(1, min(2, len(b)))):
        vec_add(out, {rng.choice(b): Fraction(1)}, Fraction(rng.choice([1, 2, -1, 3])))
    if not out:
        out = {b[0]: Fraction(1)}
    # keep parity homogeneous
    p = V.label_parity(next(iter(out)))
    return {l: c for l, c in out.items() if V.label_parity(l) == p}


def random_commutator_tuples(V: TruncatedVOSA, count: int, rng, max_field_weight=None) -> List[CommutatorTuple]:
    """Random ``(u, v, m, n, w)`` with every intermediate and final weight in ``[0, cutoff]``."""
    ws = [w for w in V.weights()]
    top = Fraction(max_field_weight) if max_field_weight is not None else min(V.cutoff, Fraction(2))
    field_ws = [w for w in ws if 0 < w <= top] or ws
    out: List[CommutatorTuple] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count + 1000:
            raise RuntimeError("could not sample enough in-range commutator tuples")
        u = _random_homogeneous(V, rng, field_ws)
        v = _random_homogeneous(V, rng, field_ws)
        w = _random_homogeneous(V, rng, ws)
        wu, wv, ww = V.vec_weight(u), V.vec_weight(v), V.vec_weight(w)
        # v_n w and u_m w within range
        ns = [n for n in range(math.floor(wv + ww - 1 - V.cutoff), math.floor(wv + ww - 1) + 1) if 0 <= wv + ww - n - 1 <= V.cutoff]
        ms = [m for m in range(math.floor(wu + ww - 1 - V.cutoff), math.floor(wu + ww - 1) + 1) if 0 <= wu + ww - m - 1 <= V.cutoff]
        if not ns or not ms:
            continue
        n = rng.choice(ns)
        ms = [m for m in ms if 0 <= wu + wv + ww - m - n - 2 <= V.cutoff]
        if not ms or wu + wv - 1 > V.cutoff:
            continue
        out.append(CommutatorTuple(u, v, rng.choice(ms), n, w))
    return out
