"""Direct sums, tensor products, decomposition and weight-one analysis."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from .exact import Gaussian, Vector, fmt_rational, scalar_to_json, vec_add, vec_sub
from .linalg import column_basis, matmul, nullspace, rank, solve
from .voa import CutoffExceeded, Generator, TruncatedVOSA, descendant_mode, half_integers

__all__ = [
    "CentralChargeMismatch",
    "NonSemisimpleWeightZero",
    "BasisNotOrthonormalizable",
    "DirectSum",
    "TensorProduct",
    "direct_sum",
    "tensor_product",
    "DecompositionReport",
    "Summand",
    "decompose",
    "WeightOneAlgebra",
    "weight_one_algebra",
    "ComparisonResult",
    "conformal_comparison",
]


class CentralChargeMismatch(ValueError):
    pass


class NonSemisimpleWeightZero(ValueError):
    pass


class BasisNotOrthonormalizable(ValueError):
    pass


# ---- direct sums ------------------------------------------------------------------


class DirectSum(TruncatedVOSA):
    """Orthogonal direct sum; labels are ``(k, label_k)``.

    Besides the summands' generators, each summand contributes its vacuum
    ``1_k`` as an even weight-zero generator acting by the projection onto
    summand k, so every summand vacuum has a word ``(1_k)_{-1} 1``.
    """

    def __init__(self, parts: Sequence[TruncatedVOSA]):
        if len(parts) < 1:
            raise ValueError("direct sum needs at least one summand")
        c0 = parts[0].central_charge
        for k, V in enumerate(parts):
            if V.central_charge != c0:
                raise CentralChargeMismatch(
                    f"summand {k} has central charge {V.central_charge}, summand 0 has {c0}"
                )
        self.parts = list(parts)
        self.name = "direct_sum(" + ", ".join(V.describe() for V in parts) + ")"
        self.min_weight = min(V.min_weight for V in parts)
        gens: List[Generator] = []
        self._gmap: List[Tuple[int, Optional[int]]] = []
        self._local: List[Dict[int, int]] = []
        self._idem: List[int] = []
        for k, V in enumerate(parts):
            loc = {}
            for g, gen in enumerate(V.generators):
                loc[g] = len(gens)
                self._gmap.append((k, g))
                vec = {(k, l): c for l, c in gen.vec.items()}
                gens.append(Generator(f"[{k}]{gen.name}", tuple(vec.items()), gen.weight, gen.parity))
            self._local.append(loc)
        for k, V in enumerate(parts):
            self._idem.append(len(gens))
            self._gmap.append((k, None))
            vec = {(k, l): c for l, c in V.vacuum.items()}
            gens.append(Generator(f"1_{k}", tuple(vec.items()), Fraction(0), 0))
        vac: Vector = {}
        omega: Vector = {}
        for k, V in enumerate(parts):
            vac.update({(k, l): c for l, c in V.vacuum.items()})
            omega.update({(k, l): c for l, c in V.conformal.items()})
        super().__init__(min(V.cutoff for V in parts), c0, gens, vac, omega)

    def basis(self, w):
        w = Fraction(w)
        if w > self.cutoff:
            return []
        return [(k, l) for k, V in enumerate(self.parts) for l in V.basis(w)]

    def label_weight(self, label):
        k, l = label
        return self.parts[k].label_weight(l)

    def label_parity(self, label):
        k, l = label
        return self.parts[k].label_parity(l)

    def label_str(self, label):
        k, l = label
        return f"[{k}]{self.parts[k].label_str(l)}"

    def gen_mode_label(self, g, n, label):
        j, l = label
        k, lg = self._gmap[g]
        if j != k:
            return {}
        if lg is None:
            return {label: Fraction(1)} if n == -1 else {}
        return {(k, x): c for x, c in self.parts[k].gen_mode(lg, n, {l: Fraction(1)}).items()}

    def word(self, label):
        k, l = label
        loc = self._local[k]
        out = []
        for c, w in self.parts[k].word(l):
            if w:
                out.append((c, tuple((loc[g], n) for g, n in w)))
            else:
                out.append((c, ((self._idem[k], -1),)))
        return out

    def form_entry(self, a, b):
        if a[0] != b[0]:
            return Fraction(0)
        return self.parts[a[0]].form_entry(a[1], b[1])

    def phi_label(self, label):
        k, l = label
        s, l2 = self.parts[k].phi_label(l)
        return s, (k, l2)

    def coords(self, w, vec):
        split: Dict[int, Vector] = {}
        for (k, l), c in vec.items():
            split.setdefault(k, {})[l] = c
        out = []
        for k, V in enumerate(self.parts):
            n = len(V.basis(w))
            out += V.coords(w, split[k]) if k in split and n else [Fraction(0)] * n
        return out


def direct_sum(parts: Sequence[TruncatedVOSA]) -> DirectSum:
    return DirectSum(parts)


# ---- tensor products ----------------------------------------------------------------


class TensorProduct(TruncatedVOSA):
    """Graded tensor product; labels are ``(a, b)``."""

    def __init__(self, A: TruncatedVOSA, B: TruncatedVOSA):
        self.A, self.B = A, B
        self.name = f"({A.describe()} x {B.describe()})"
        self.min_weight = A.min_weight + B.min_weight
        gens: List[Generator] = []
        self._na = len(A.generators)
        for gen in A.generators:
            vec = {(l, v): c * cv for l, c in gen.vec.items() for v, cv in B.vacuum.items()}
            gens.append(Generator(gen.name + "(x)1", tuple(vec.items()), gen.weight, gen.parity))
        for gen in B.generators:
            vec = {(v, l): c * cv for l, c in gen.vec.items() for v, cv in A.vacuum.items()}
            gens.append(Generator("1(x)" + gen.name, tuple(vec.items()), gen.weight, gen.parity))
        vac = {(a, b): ca * cb for a, ca in A.vacuum.items() for b, cb in B.vacuum.items()}
        omega: Vector = {}
        for l, c in A.conformal.items():
            for v, cv in B.vacuum.items():
                vec_add(omega, {(l, v): c * cv})
        for l, c in B.conformal.items():
            for v, cv in A.vacuum.items():
                vec_add(omega, {(v, l): c * cv})
        super().__init__(min(A.cutoff, B.cutoff), A.central_charge + B.central_charge, gens, vac, omega)
        self._single_coords: Dict = {}

    def _splits(self, w):
        w = Fraction(w)
        return [(wa, w - wa) for wa in half_integers(0, w) if self.A.basis(wa) and self.B.basis(w - wa)]

    def basis(self, w):
        w = Fraction(w)
        if w < 0 or w > self.cutoff:
            return []
        return [(a, b) for wa, wb in self._splits(w) for a in self.A.basis(wa) for b in self.B.basis(wb)]

    def label_weight(self, label):
        return self.A.label_weight(label[0]) + self.B.label_weight(label[1])

    def label_parity(self, label):
        return (self.A.label_parity(label[0]) + self.B.label_parity(label[1])) % 2

    def label_str(self, label):
        return f"{self.A.label_str(label[0])}(x){self.B.label_str(label[1])}"

    def gen_mode_label(self, g, n, label):
        a, b = label
        if g < self._na:
            return {(x, b): c for x, c in self.A.gen_mode(g, n, {a: Fraction(1)}).items()}
        gb = g - self._na
        sign = -1 if self.B.generators[gb].parity and self.A.label_parity(a) else 1
        return {(a, y): sign * c for y, c in self.B.gen_mode(gb, n, {b: Fraction(1)}).items()}

    def word(self, label):
        a, b = label
        out = []
        for ca, wa in self.A.word(a):
            for cb, wb in self.B.word(b):
                out.append((ca * cb, tuple(wa) + tuple((g + self._na, n) for g, n in wb)))
        return out

    def form_entry(self, x, y):
        fa = self.A.form_entry(x[0], y[0])
        if not fa:
            return Fraction(0)
        return fa * self.B.form_entry(x[1], y[1])

    def phi_label(self, label):
        sa, a = self.A.phi_label(label[0])
        sb, b = self.B.phi_label(label[1])
        return sa * sb, (a, b)

    def _coords1(self, V, w, l):
        key = (id(V), l)
        if key not in self._single_coords:
            self._single_coords[key] = V.coords(w, {l: Fraction(1)})
        return self._single_coords[key]

    def coords(self, w, vec):
        w = Fraction(w)
        offsets = {}
        pos = 0
        for wa, wb in self._splits(w):
            offsets[wa] = (pos, len(self.B.basis(wb)))
            pos += len(self.A.basis(wa)) * len(self.B.basis(wb))
        out = [Fraction(0)] * pos
        for (a, b), c in vec.items():
            wa = self.A.label_weight(a)
            wb = self.B.label_weight(b)
            if wa not in offsets:
                if self.A.basis(wa) or self.B.basis(wb):
                    # a or b vanishes modulo its radical
                    ca = self._coords1(self.A, wa, a) if self.A.basis(wa) else []
                    cb = self._coords1(self.B, wb, b) if self.B.basis(wb) else []
                    if any(ca) and any(cb):
                        raise ValueError("inconsistent tensor coordinates")
                continue
            start, nb = offsets[wa]
            ca = self._coords1(self.A, wa, a)
            cb = self._coords1(self.B, wb, b)
            for i, x in enumerate(ca):
                if not x:
                    continue
                for j, y in enumerate(cb):
                    if y:
                        out[start + i * nb + j] += c * x * y
        return out


def tensor_product(A: TruncatedVOSA, B: TruncatedVOSA) -> TensorProduct:
    return TensorProduct(A, B)


# ---- sympy bridge -------------------------------------------------------------------------


def _to_sympy(x):
    if isinstance(x, Gaussian):
        return sympy.Rational(x.re.numerator, x.re.denominator) + sympy.I * sympy.Rational(
            x.im.numerator, x.im.denominator
        )
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def _from_sympy(x):
    x = sympy.nsimplify(x)
    re, im = sympy.re(x), sympy.im(x)
    if not (re.is_rational and im.is_rational):
        raise ValueError(f"{x} is not a Gaussian rational")
    r = Fraction(int(sympy.numer(re)), int(sympy.denom(re)))
    if im == 0:
        return r
    return Gaussian(r, Fraction(int(sympy.numer(im)), int(sympy.denom(im))))


def _eigenvalues(m: List[List]) -> Dict:
    """Exact eigenvalues with algebraic multiplicities; raises ValueError if any is irrational."""
    ev = sympy.Matrix([[_to_sympy(x) for x in row] for row in m]).eigenvals()
    return {_from_sympy(k): int(v) for k, v in ev.items()}


# ---- decomposition ------------------------------------------------------------------------


@dataclass
class Summand:
    idempotent: Vector
    dims: Dict[Fraction, int]
    basis: Dict[Fraction, List[Vector]]
    conformal: Vector
    central_charge: Optional[Fraction]
    flags: Dict[str, bool]

    @property
    def strong_cft(self) -> bool:
        return all(self.flags.values())


@dataclass
class DecompositionReport:
    instance: str
    weight_zero_basis: List
    idempotents: List[Vector]
    summands: List[Summand]
    idempotents_sum_to_vacuum: bool
    conformal_sum_ok: bool
    _V: TruncatedVOSA = field(repr=False, default=None)

    @property
    def passed(self) -> bool:
        return self.idempotents_sum_to_vacuum and self.conformal_sum_ok and all(s.strong_cft for s in self.summands)

    def to_json(self) -> Dict:
        V = self._V

        def coords0(v):
            return [scalar_to_json(x) for x in V.coords(0, v)]

        return {
            "check": "decompose",
            "instance": self.instance,
            "cutoff": fmt_rational(V.cutoff),
            "status": "pass" if self.passed else "fail",
            "weight_zero_basis": [V.label_str(l) for l in self.weight_zero_basis],
            "idempotents_sum_to_vacuum": self.idempotents_sum_to_vacuum,
            "conformal_sum_ok": self.conformal_sum_ok,
            "summands": [
                {
                    "idempotent": coords0(s.idempotent),
                    "dims": {fmt_rational(w): d for w, d in s.dims.items()},
                    "central_charge": None if s.central_charge is None else scalar_to_json(s.central_charge),
                    "flags": s.flags,
                }
                for s in self.summands
            ],
        }


def _mult_matrix(V: TruncatedVOSA, x: Vector, w) -> List[List]:
    """Matrix of ``x_{-1}`` on the weight-w piece (x of weight zero)."""
    b = V.basis(w)
    cols = [V.coords(w, V.mode(x, -1, {l: Fraction(1)})) for l in b]
    return [[cols[j][i] for j in range(len(b))] for i in range(len(b))]


def _split_idempotents(V: TruncatedVOSA, mats: List[List[List]]) -> List[List]:
    k = len(mats)
    probes = [[Fraction(i + 1) for i in range(k)], [Fraction(3 ** i) for i in range(k)], [Fraction(i * i + 2) for i in range(k)]]
    vac = V.coords(0, V.vacuum)
    for probe in probes:
        mx = [[sum(probe[t] * mats[t][i][j] for t in range(k)) for j in range(k)] for i in range(k)]
        try:
            ev = _eigenvalues(mx)
        except ValueError:
            continue
        if len(ev) != k:
            continue
        lams = sorted(ev, key=lambda z: (Fraction(z.re) if isinstance(z, Gaussian) else z))
        out = []
        for lj in lams:
            # Lagrange interpolation polynomial in mx applied to the unit
            v = list(vac)
            for ll in lams:
                if ll == lj:
                    continue
                mv = [sum(mx[i][j] * v[j] for j in range(k)) for i in range(k)]
                v = [(mv[i] - ll * v[i]) / (lj - ll) for i in range(k)]
            out.append(v)
        return out
    raise NonSemisimpleWeightZero("could not split the weight-zero algebra into rational idempotents")


def decompose(V: TruncatedVOSA) -> DecompositionReport:
    """Split V along primitive orthogonal idempotents of its weight-zero algebra."""
    b0 = V.basis(0)
    k = len(b0)
    if k == 0:
        raise NonSemisimpleWeightZero("weight-zero space is empty")
    mats = [_mult_matrix(V, {l: Fraction(1)}, 0) for l in b0]
    for i in range(k):
        for j in range(k):
            # b_i b_j = b_j b_i
            if [r[j] for r in mats[i]] != [r[i] for r in mats[j]]:
                raise NonSemisimpleWeightZero("weight-zero product is not commutative")
    trace = [[sum(matmul(mats[i], mats[j])[t][t] for t in range(k)) for j in range(k)] for i in range(k)]
    if rank(trace) < k:
        raise NonSemisimpleWeightZero("trace form of the weight-zero algebra is degenerate (nilpotents present)")
    idem_coords = _split_idempotents(V, mats)
    idems = [V.from_coords(0, c) for c in idem_coords]
    total: Vector = {}
    for e in idems:
        vec_add(total, e)
    sum_ok = V.is_zero_vector(vec_sub(total, V.vacuum))
    summands = []
    omega_total: Vector = {}
    for e in idems:
        op = descendant_mode(V, e, -1)
        dims, bases = {}, {}
        for w in half_integers(0, V.cutoff):
            if not V.basis(w):
                dims[w] = 0
                bases[w] = []
                continue
            m = op.matrix(V, w)
            cols = [[m[i][j] for i in range(len(m))] for j in range(len(m[0]))]
            keep = column_basis(cols)
            dims[w] = len(keep)
            bases[w] = [V.from_coords(w, cols[j]) for j in keep]
        omega_i = V.L(-2, e)
        vec_add(omega_total, omega_i)
        cc = None
        top = V.L(2, omega_i)
        ce = V.coords(0, e)
        ct = V.coords(0, top)
        piv = next(t for t, x in enumerate(ce) if x)
        ratio = ct[piv] / ce[piv]
        if [ratio * x for x in ce] == ct:
            cc = 2 * ratio
        flags = {
            "weight_zero_one_dimensional": dims.get(Fraction(0), 0) == 1,
            "L1_kills_weight_one": all(V.is_zero_vector(V.L(1, u)) for u in bases.get(Fraction(1), [])),
            "L_minus1_kills_weight_zero": all(
                V.is_zero_vector(V.L(-1, u)) for u in bases.get(Fraction(0), [])
            ),
            "no_negative_weights": V.min_weight >= 0,
        }
        summands.append(Summand(e, dims, bases, omega_i, cc, flags))
    conformal_ok = V.is_zero_vector(vec_sub(omega_total, V.conformal))
    return DecompositionReport(V.describe(), list(b0), idems, summands, sum_ok, conformal_ok, V)


# ---- weight-one Lie algebra ------------------------------------------------------------------


@dataclass
class WeightOneAlgebra:
    dim: int
    labels: List
    bracket: List[List[List]]  # bracket[i][j] = coordinates of [b_i, b_j]
    form: Optional[List[List]]
    killing: List[List]
    checks: Dict[str, bool]
    killing_rank: int
    derived_dim: int
    radical_dim: Optional[int]
    radical_cap_derived: Optional[int]
    ideal_ratios: Optional[List[Tuple]]
    failures: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def ad(self, i: int) -> List[List]:
        d = self.dim
        return [[self.bracket[i][j][r] for j in range(d)] for r in range(d)]

    def to_json(self) -> Dict:
        m = lambda rows: [[scalar_to_json(x) for x in r] for r in rows]  # noqa: E731
        return {
            "dim": self.dim,
            "basis": self.labels,
            "bracket": [[[scalar_to_json(x) for x in c] for c in row] for row in self.bracket],
            "form": None if self.form is None else m(self.form),
            "killing": m(self.killing),
            "checks": self.checks,
            "killing_rank": self.killing_rank,
            "derived_dim": self.derived_dim,
            "radical_dim": self.radical_dim,
            "radical_cap_derived": self.radical_cap_derived,
            "ideal_ratios": None
            if self.ideal_ratios is None
            else [{"form_over_killing": scalar_to_json(r), "dim": d} for r, d in self.ideal_ratios],
            "failures": self.failures,
        }


def _span_dim(vectors: List[List]) -> int:
    return rank(vectors) if vectors else 0


def weight_one_form(V: TruncatedVOSA, u: Vector, v: Vector):
    """``<u, v>`` defined by ``u_1 v = <u, v> 1``; needs a one-dimensional weight-zero space."""
    if len(V.basis(0)) != 1:
        raise ValueError("the weight-one form needs a one-dimensional weight-zero space; decompose first")
    x = V.coords(0, V.mode(u, 1, v))
    vac = V.coords(0, V.vacuum)
    return x[0] / vac[0]


def weight_one_algebra(V: TruncatedVOSA) -> WeightOneAlgebra:
    if V.cutoff < 1:
        raise CutoffExceeded("weight one lies above the cutoff")
    labels = V.basis(1)
    d = len(labels)
    vecs = [{l: Fraction(1)} for l in labels]
    if d == 0:
        return WeightOneAlgebra(0, [], [], [], [], {}, 0, 0, 0, 0, [])
    br = [[V.coords(1, V.mode(vecs[i], 0, vecs[j])) for j in range(d)] for i in range(d)]
    ads = [[[br[i][j][r] for j in range(d)] for r in range(d)] for i in range(d)]
    killing = [[sum(matmul(ads[i], ads[j])[t][t] for t in range(d)) for j in range(d)] for i in range(d)]
    form = None
    if len(V.basis(0)) == 1:
        form = [[weight_one_form(V, vecs[i], vecs[j]) for j in range(d)] for i in range(d)]

    def lin(coords):
        return V.from_coords(1, coords)

    def brc(x: List, y: List) -> List:
        out = [Fraction(0)] * d
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if yj:
                    for r in range(d):
                        if br[i][j][r]:
                            out[r] += xi * yj * br[i][j][r]
        return out

    def bil(x: List, y: List):
        return sum(x[i] * form[i][j] * y[j] for i in range(d) for j in range(d) if x[i] and y[j])

    e = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    failures: List[Dict] = []
    anti = jac = inv = herm = True
    for i, j in itertools.product(range(d), repeat=2):
        if br[i][j] != [-x for x in br[j][i]]:
            anti = False
            failures.append({"check": "antisymmetry", "triple": [i, j]})
    phis = [V.phi(v) for v in vecs]
    for i, j, k in itertools.product(range(d), repeat=3):
        lhs = brc(e[i], br[j][k])
        rhs = [a + b for a, b in zip(brc(br[i][j], e[k]), brc(e[j], br[i][k]))]
        if lhs != rhs:
            jac = False
            failures.append({"check": "jacobi", "triple": [i, j, k]})
        if form is not None and bil(br[i][j], e[k]) != bil(e[i], br[j][k]):
            inv = False
            failures.append({"check": "form_invariance", "triple": [i, j, k]})
        # ([u, v], w) = -(v, [phi(u), w])
        left = V.inner(lin(br[i][j]), vecs[k])
        right = -V.inner(vecs[j], V.mode(phis[i], 0, vecs[k]))
        if left != right:
            herm = False
            failures.append(
                {"check": "hermitian_invariance", "triple": [i, j, k], "lhs": scalar_to_json(left), "rhs": scalar_to_json(right)}
            )
    checks = {"antisymmetry": anti, "jacobi": jac, "hermitian_invariance": herm}
    if form is not None:
        checks["form_invariance"] = inv
    derived = [br[i][j] for i in range(d) for j in range(d)]
    derived_dim = _span_dim(derived)
    radical_dim = radical_cap = None
    ratios = None
    if form is not None:
        rad = nullspace(form)
        radical_dim = len(rad)
        dkeep = [derived[t] for t in column_basis(derived)] if derived_dim else []
        radical_cap = len(rad) + len(dkeep) - _span_dim(rad + dkeep)
        checks["form_nondegenerate_on_derived"] = radical_cap == 0
        if dkeep:
            ratios = _ideal_ratios(dkeep, killing, form)
    return WeightOneAlgebra(
        d, [V.label_str(l) for l in labels], br, form, killing, checks, rank(killing), derived_dim, radical_dim, radical_cap, ratios, failures[:20]
    )


def _ideal_ratios(dbasis: List[List], killing, form):
    """Eigenvalues of K^{-1} F on the derived algebra with multiplicities.

    On a simple ideal the invariant form is a multiple of the Killing form,
    so each eigenvalue is that ideal's ratio; ideals with equal ratios share
    an eigenspace and are reported together.
    """
    P = [[v[i] for v in dbasis] for i in range(len(dbasis[0]))]
    Pt = [list(r) for r in zip(*P)]
    K = matmul(matmul(Pt, killing), P)
    F = matmul(matmul(Pt, form), P)
    if rank(K) < len(K):
        return None
    n = len(K)
    cols = [solve(K, [F[i][j] for i in range(n)]) for j in range(n)]
    M = [[cols[j][i] for j in range(n)] for i in range(n)]
    try:
        ev = _eigenvalues(M)
    except ValueError:
        return None
    return sorted(ev.items(), key=lambda kv: (Fraction(kv[0].re) if isinstance(kv[0], Gaussian) else kv[0]))


# ---- conformal vector comparison ---------------------------------------------------------------


@dataclass
class ComparisonResult:
    kind: str
    passed: bool
    omega_prime: Vector
    omega_double_prime: Vector
    norm: object
    method: str
    _V: TruncatedVOSA = field(repr=False, default=None)

    def to_json(self) -> Dict:
        V = self._V
        c = lambda v: [scalar_to_json(x) for x in V.coords(2, v)]  # noqa: E731
        return {
            "check": "conformal",
            "kind": self.kind,
            "instance": V.describe(),
            "cutoff": fmt_rational(V.cutoff),
            "status": "pass" if self.passed else "fail",
            "method": self.method,
            "omega_prime": c(self.omega_prime),
            "omega_double_prime": c(self.omega_double_prime),
            "norm_omega_double_prime": scalar_to_json(self.norm),
            "basis": [V.label_str(l) for l in V.basis(2)],
        }


def conformal_comparison(
    V: TruncatedVOSA,
    kind: str,
    level=None,
    dual_coxeter=None,
    basis: Optional[Sequence[Vector]] = None,
) -> ComparisonResult:
    """Compare ``omega`` with a Sugawara or Heisenberg candidate ``omega'``.

    Without a user basis the candidate uses the dual-basis expression
    ``sum g^{ij} a_i(-1) a_j(-1) 1`` which needs no square roots.  A user
    basis must be orthonormal for the relevant form.
    """
    if V.cutoff < 2:
        raise CutoffExceeded("weight two lies above the cutoff")
    if kind not in ("sugawara", "heisenberg"):
        raise ValueError(f"unknown comparison kind {kind!r}")
    if kind == "sugawara":
        if level is None or dual_coxeter is None:
            raise ValueError("sugawara comparison needs level and dual_coxeter")
        level, dual_coxeter = Fraction(level), Fraction(dual_coxeter)
        scale, pref = Fraction(1) / level, Fraction(1) / (2 * (level + dual_coxeter))
    else:
        scale, pref = Fraction(1), Fraction(1, 2)
    vecs = list(basis) if basis is not None else [{l: Fraction(1)} for l in V.basis(1)]
    d = len(vecs)
    g = [[scale * weight_one_form(V, vecs[i], vecs[j]) for j in range(d)] for i in range(d)]
    if basis is not None:
        ident = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
        if g != ident:
            raise BasisNotOrthonormalizable("supplied weight-one basis is not orthonormal for the normalized form")
        ginv, method = ident, "orthonormal_basis"
    else:
        if d and rank(g) < d:
            raise ValueError("weight-one form is degenerate")
        cols = [solve(g, [Fraction(int(i == j)) for i in range(d)]) for j in range(d)]
        ginv = [[cols[j][i] for j in range(d)] for i in range(d)]
        method = "dual_basis"
    omega_p: Vector = {}
    for i in range(d):
        for j in range(d):
            if ginv[i][j]:
                vec_add(omega_p, V.mode(vecs[i], -1, vecs[j]), pref * ginv[i][j])
    diff = vec_sub(V.conformal, omega_p)
    norm = V.inner(diff, diff)
    return ComparisonResult(kind, V.is_zero_vector(diff), omega_p, diff, norm, method, V)
