"""Neveu-Schwarz highest weight modules and the vertex superalgebra L(c, 0).

Modes are written ``("L", n)`` with integer ``n`` and ``("G", r)`` with
``r`` in 1/2 + Z.  Relations used by the rewriter::

    [L(m), L(n)]  = (m - n) L(m+n) + (m^3 - m)/12 delta_{m+n,0} c
    [L(m), G(r)]  = (m/2 - r) G(m+r)
    [G(r), G(s)]+ = 2 L(r+s) + (c/3)(r^2 - 1/4) delta_{r+s,0}
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .exact import Vector, parse_rational, vec_add, weight as as_weight
from .linalg import HermitianMatrix, column_basis, psd_verdict, rank, solve, Indefinite
from .voa import Generator, TruncatedVOSA, half_integers

Mode = Tuple[str, Fraction]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class NSParams:
    c: Fraction
    h: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "c", parse_rational(self.c))
        object.__setattr__(self, "h", parse_rational(self.h))


@dataclass(frozen=True, order=False)
class NSMonomial:
    """``L(-n1)...L(-nk) G(-r1)...G(-rj) v`` in canonical PBW order."""

    L_modes: Tuple[int, ...] = ()
    G_modes: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        if any(a < b for a, b in zip(self.L_modes, self.L_modes[1:])):
            raise ValueError("L modes must be weakly decreasing")
        if any(a <= b for a, b in zip(self.G_modes, self.G_modes[1:])):
            raise ValueError("G modes must be strictly decreasing")

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(self.L_modes)) + sum(self.G_modes, Fraction(0))

    @property
    def parity(self) -> int:
        return len(self.G_modes) % 2

    def factors(self) -> Tuple[Mode, ...]:
        return tuple(("L", Fraction(-n)) for n in self.L_modes) + tuple(("G", -r) for r in self.G_modes)

    def sort_key(self):
        keys = tuple((0, -Fraction(n)) for n in self.L_modes) + tuple((1, -r) for r in self.G_modes)
        return (len(keys), keys)

    def __str__(self):
        parts = [f"L({-n})" for n in self.L_modes] + [f"G({-r})" for r in self.G_modes]
        return "".join(parts) + "v" if parts else "v"

    def __repr__(self):
        return f"NSMonomial({self})"


EMPTY = NSMonomial()


def _is_creation(x: Mode) -> bool:
    return x[1] < 0


def _parity(x: Mode) -> int:
    return 1 if x[0] == "G" else 0


def _mode(kind: str, value) -> Mode:
    v = Fraction(value)
    if kind == "L":
        if v.denominator != 1:
            raise ValueError(f"L mode {v} must be an integer")
    elif kind == "G":
        if v.denominator != 2:
            raise ValueError(f"G mode {v} must lie in 1/2 + Z")
    else:
        raise ValueError(f"unknown mode kind {kind!r}")
    return (kind, v)


class NSModule:
    """Highest weight module of the NS algebra with exact normal ordering.

    With ``vacuum=True`` the module is the universal vacuum module: ``h``
    must be 0 and ``L(-1)v = G(-1/2)v = 0``.
    """

    def __init__(self, params: NSParams, vacuum: bool = False):
        self.params = params
        self.vacuum = vacuum
        if vacuum and params.h != 0:
            raise ValueError("the vacuum module needs h = 0")
        self._apply_cache: Dict = {}
        self._form_cache: Dict = {}

    # ---- relations --------------------------------------------------------

    def bracket(self, x: Mode, y: Mode) -> Tuple[List[Tuple[Fraction, Mode]], Fraction]:
        """Super bracket ``[x, y]`` as (list of (coeff, mode), central scalar)."""
        c = self.params.c
        (kx, a), (ky, b) = x, y
        a, b = Fraction(a), Fraction(b)
        if kx == "L" and ky == "L":
            terms = [(a - b, ("L", a + b))] if a != b else []
            central = (a ** 3 - a) / 12 * c if a + b == 0 else Fraction(0)
            return terms, central
        if kx == "L" and ky == "G":
            co = a / 2 - b
            return ([(co, ("G", a + b))] if co else []), Fraction(0)
        if kx == "G" and ky == "L":
            co = -(b / 2 - a)
            return ([(co, ("G", a + b))] if co else []), Fraction(0)
        central = c / 3 * (a * a - Fraction(1, 4)) if a + b == 0 else Fraction(0)
        return [(Fraction(2), ("L", a + b))], central

    def _creates(self, x: Mode) -> bool:
        if not _is_creation(x):
            return False
        if self.vacuum and x in (("L", Fraction(-1)), ("G", -HALF)):
            return False
        return True

    def _fits_before(self, x: Mode, y: Mode) -> bool:
        # canonical order: L(-n) weakly decreasing n, then G(-r) strictly decreasing r
        if x[0] == "L":
            return y[0] == "G" or -x[1] >= -y[1]
        return y[0] == "G" and -x[1] > -y[1]

    # ---- action ----------------------------------------------------------------

    def apply(self, x: Mode, mono: NSMonomial) -> Vector:
        key = (x, mono)
        hit = self._apply_cache.get(key)
        if hit is not None:
            return hit
        res = self._apply(x, mono)
        self._apply_cache[key] = res
        return res

    def _apply(self, x: Mode, mono: NSMonomial) -> Vector:
        kind, val = x
        if kind == "L" and val == 0:
            return {mono: self.params.h + mono.weight}
        if mono == EMPTY:
            if self._creates(x):
                return {_single(x): Fraction(1)}
            return {}
        facs = mono.factors()
        y, rest = facs[0], _from_factors(facs[1:])
        if self._creates(x):
            if x == y and kind == "G":
                # G(-r)^2 = L(-2r)
                return dict(self.apply(("L", 2 * val), rest))
            if self._fits_before(x, y):
                return {_from_factors((x,) + facs): Fraction(1)}
        out: Vector = {}
        sign = -1 if _parity(x) and _parity(y) else 1
        for m1, c1 in self.apply(x, rest).items():
            vec_add(out, self.apply(y, m1), sign * c1)
        terms, central = self.bracket(x, y)
        for co, z in terms:
            vec_add(out, self.apply(z, rest), co)
        if central:
            vec_add(out, {rest: Fraction(1)}, central)
        return out

    def apply_word(self, word: Sequence[Mode], vec: Vector) -> Vector:
        """Apply ``X1 X2 ... Xk`` (``Xk`` acts first) to ``vec``."""
        cur = dict(vec)
        for x in reversed(word):
            nxt: Vector = {}
            for m, c in cur.items():
                vec_add(nxt, self.apply(x, m), c)
            cur = nxt
        return cur

    # ---- basis and form ----------------------------------------------------------

    def basis(self, w) -> List[NSMonomial]:
        return pbw_basis(w, vacuum=self.vacuum)

    def form(self, a: NSMonomial, b: NSMonomial) -> Fraction:
        """Shapovalov form with L(n)^dagger = L(-n), G(r)^dagger = G(-r), (v, v) = 1."""
        if a.weight != b.weight:
            return Fraction(0)
        key = (a, b)
        hit = self._form_cache.get(key)
        if hit is not None:
            return hit
        if a == EMPTY:
            res = Fraction(1) if b == EMPTY else Fraction(0)
        else:
            facs = a.factors()
            x, rest = facs[0], _from_factors(facs[1:])
            adj = (x[0], -x[1])
            res = Fraction(0)
            for m, cm in self.apply(adj, b).items():
                res += cm * self.form(rest, m)
        self._form_cache[key] = res
        return res

    def gram(self, w) -> HermitianMatrix:
        b = self.basis(w)
        return HermitianMatrix([[self.form(x, y) for y in b] for x in b])


def _single(x: Mode) -> NSMonomial:
    return _from_factors((x,))


def _from_factors(facs: Sequence[Mode]) -> NSMonomial:
    Ls = tuple(int(-v) for k, v in facs if k == "L")
    Gs = tuple(-v for k, v in facs if k == "G")
    return NSMonomial(Ls, Gs)


def _partitions(n: int, max_part: int, min_part: int):
    if n == 0:
        yield ()
        return
    for p in range(min(n, max_part), min_part - 1, -1):
        for rest in _partitions(n - p, p, min_part):
            yield (p,) + rest


def _strict_half_partitions(two_w: int, max_two: int, min_two: int):
    # parts are odd integers (twice the half-odd modes), strictly decreasing
    if two_w == 0:
        yield ()
        return
    top = min(two_w, max_two)
    if top % 2 == 0:
        top -= 1
    for p in range(top, min_two - 1, -2):
        for rest in _strict_half_partitions(two_w - p, p - 2, min_two):
            yield (p,) + rest


def pbw_basis(w, vacuum: bool = False) -> List[NSMonomial]:
    w = as_weight(w)
    if w < 0:
        return []
    two_w = int(2 * w)
    lmin, gmin = (2, 3) if vacuum else (1, 1)
    out = []
    for two_g in range(two_w % 2, two_w + 1, 2):
        two_l = two_w - two_g
        for Ls in _partitions(two_l // 2, two_l // 2, lmin):
            for Gs in _strict_half_partitions(two_g, two_g, gmin):
                out.append(NSMonomial(Ls, tuple(Fraction(g, 2) for g in Gs)))
    out.sort(key=NSMonomial.sort_key)
    return out


# ---- public operations ------------------------------------------------------------


def verma_basis(p: NSParams, w) -> List[NSMonomial]:
    return pbw_basis(w, vacuum=False)


_modules: Dict[NSParams, NSModule] = {}


def verma_module(p: NSParams) -> NSModule:
    mod = _modules.get(p)
    if mod is None:
        mod = _modules[p] = NSModule(p)
    return mod


def normal_order_apply(p: NSParams, word: Sequence, m: NSMonomial) -> Vector:
    """Apply a word of modes (rightmost first) to a monomial of M(c, h)."""
    modes = [_mode(k, v) for k, v in word]
    return verma_module(p).apply_word(modes, {m: Fraction(1)})


def shapovalov_gram(p: NSParams, w) -> HermitianMatrix:
    return verma_module(p).gram(w)


def simple_quotient_dims(p: NSParams, cutoff) -> Dict[Fraction, int]:
    return {w: rank(shapovalov_gram(p, w)) for w in half_integers(0, as_weight(cutoff))}


@dataclass(frozen=True)
class DiscreteSeriesPoint:
    m: int
    r: int
    s: int
    c: Fraction
    h: Fraction
    pairs: Tuple[Tuple[int, int], ...] = ()


def discrete_series_c(m: int) -> Fraction:
    return Fraction(3, 2) * (1 - Fraction(8, (m + 2) * (m + 4)))


def discrete_series_h(m: int, r: int, s: int) -> Fraction:
    return Fraction(((m + 4) * r - (m + 2) * s) ** 2 - 4, 8 * (m + 2) * (m + 4))


def discrete_series(m: int) -> List[DiscreteSeriesPoint]:
    """Unitary points (c_m, h_{r,s}) with 1 <= s <= r <= m+1 and r - s even."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    c = discrete_series_c(m)
    by_h: Dict[Fraction, List[Tuple[int, int]]] = {}
    for r in range(1, m + 2):
        for s in range(1, r + 1):
            if (r - s) % 2:
                continue
            by_h.setdefault(discrete_series_h(m, r, s), []).append((r, s))
    out = []
    for h in sorted(by_h):
        pairs = tuple(by_h[h])
        r, s = pairs[0]
        out.append(DiscreteSeriesPoint(m, r, s, c, h, pairs))
    return out


@dataclass
class UnitarityReport:
    params: NSParams
    cutoff: Fraction
    verdicts: Dict[Fraction, object] = field(default_factory=dict)

    @property
    def consistent_with_unitary(self) -> bool:
        return not any(isinstance(v, Indefinite) for v in self.verdicts.values())

    @property
    def first_indefinite(self):
        for w in sorted(self.verdicts):
            if isinstance(self.verdicts[w], Indefinite):
                return w
        return None

    def rank(self, w) -> int:
        v = self.verdicts[Fraction(w)]
        if hasattr(v, "rank"):
            return v.rank
        return len(verma_basis(self.params, w)) if v.name == "positive_definite" else -1


def unitarity_check(p: NSParams, cutoff) -> UnitarityReport:
    rep = UnitarityReport(p, as_weight(cutoff))
    for w in half_integers(0, rep.cutoff):
        rep.verdicts[w] = psd_verdict(shapovalov_gram(p, w))
    return rep


# ---- the vertex operator superalgebra L(c, 0) ------------------------------------------


class NSVOSA(TruncatedVOSA):
    """L(c, 0) realised on the universal vacuum module modulo the form radical.

    Basis labels at each weight are PBW monomials forming a maximal set that
    is independent modulo the radical; mode results may involve any monomial
    and are reduced through the Gram matrix when coordinates are needed.
    """

    def __init__(self, c, cutoff):
        self.module = NSModule(NSParams(c, 0), vacuum=True)
        c = self.module.params.c
        self.name = f"NS(c={c})"
        self._basis: Dict[Fraction, List[NSMonomial]] = {}
        self._sel_gram: Dict[Fraction, List[List[Fraction]]] = {}
        omega = {NSMonomial((2,), ()): Fraction(1)}
        tau = {NSMonomial((), (Fraction(3, 2),)): Fraction(1)}
        gens = [
            Generator("omega", tuple(omega.items()), Fraction(2), 0),
            Generator("tau", tuple(tau.items()), Fraction(3, 2), 1),
        ]
        super().__init__(cutoff, c, gens, {EMPTY: Fraction(1)}, omega)
        self.verdicts = {}
        for w in half_integers(0, self.cutoff):
            full = self.module.basis(w)
            g = [[self.module.form(x, y) for y in full] for x in full]
            self.verdicts[w] = psd_verdict(g) if full else None
            keep = column_basis(g) if full else []
            self._basis[w] = [full[i] for i in keep]
            self._sel_gram[w] = [[g[i][j] for j in keep] for i in keep]
        bad = [w for w, v in self.verdicts.items() if isinstance(v, Indefinite)]
        if bad:
            warnings.warn(f"NS form at c={c} is indefinite at weights {bad}; building the quotient anyway")

    def basis(self, w):
        w = Fraction(w)
        if w < 0 or w > self.cutoff or w.denominator > 2:
            return []
        return self._basis[w]

    def label_weight(self, label: NSMonomial) -> Fraction:
        return label.weight

    def label_parity(self, label: NSMonomial) -> int:
        return label.parity

    def gen_mode_label(self, g, n, label):
        if g == 0:
            return self.module.apply(("L", Fraction(n - 1)), label)
        return self.module.apply(("G", Fraction(n) - HALF), label)

    def word(self, label: NSMonomial):
        w = []
        for k, v in label.factors():
            if k == "L":
                w.append((0, int(v) + 1))
            else:
                w.append((1, int(v + HALF)))
        return [(Fraction(1), tuple(w))]

    def form_entry(self, a, b):
        return self.module.form(a, b)

    def phi_label(self, label):
        return (Fraction(1), label)

    def coords(self, w, vec):
        w = Fraction(w)
        sel = self.basis(w)
        if not sel:
            return []
        idx = self.index(w)
        if all(k in idx for k in vec):
            out = [Fraction(0)] * len(sel)
            for k, c in vec.items():
                out[idx[k]] = c
            return out
        # (vec, b_i) = sum_j x_j (b_j, b_i); the Gram is real symmetric
        rhs = []
        for b in sel:
            s = Fraction(0)
            for k, c in vec.items():
                s += c * self.module.form(k, b)
            rhs.append(s)
        return solve(self._sel_gram[w], rhs)


def build_ns_vosa(c, cutoff) -> NSVOSA:
    return NSVOSA(parse_rational(c), cutoff)
