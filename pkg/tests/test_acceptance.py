"""Acceptance criteria; conftest prints one ACCEPTANCE line per criterion."""

import io
import json
import random
import sys
import time
from fractions import Fraction as F

import pytest

from oracles import ns_gram_oracle
from unitary_vosa.cli import main
from unitary_vosa.fermion import FermionSpace, build_fermion_vosa
from unitary_vosa.lattice import IntegralLattice, build_lattice_vosa
from unitary_vosa.linalg import Indefinite, PositiveSemidefinite, psd_verdict
from unitary_vosa.ns import NSParams, build_ns_vosa, discrete_series, shapovalov_gram, unitarity_check, verma_basis
from unitary_vosa.structure import conformal_comparison, decompose, direct_sum, weight_one_algebra, weight_one_form
from unitary_vosa.voa import commutator_check, half_integers, invariance_check, random_commutator_tuples

pytestmark = pytest.mark.acceptance


class Timer:
    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t


def det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def test_criterion_1_ns_gram_exactness():
    with Timer() as t:
        p0 = NSParams(F(7, 10), 0)
        assert [str(m) for m in verma_basis(p0, 2)] == ["L(-2)v", "L(-1)L(-1)v", "G(-3/2)G(-1/2)v"]
        g0 = shapovalov_gram(p0, 2)
        assert g0 == [[F(7, 20), 0, 0], [0, 0, 0], [0, 0, 0]]
        p1 = NSParams(F(7, 10), F(1, 10))
        g1 = shapovalov_gram(p1, F(3, 2))
        assert g1 == [[F(2, 3), F(2, 5)], [F(2, 5), F(6, 25)]]
        assert all(type(x) is F for r in g1.rows for x in r)
        assert det2(g1.rows) == 0
        assert psd_verdict(g1) == PositiveSemidefinite(1)
        for p, w, g in ((p0, 2, g0), (p1, F(3, 2), g1)):
            words = [list(m.factors()) for m in verma_basis(p, w)]
            assert g == ns_gram_oracle(words, p.c, p.h)
    assert t.elapsed < 1


def test_criterion_2_discrete_series_positivity():
    pts = [(p.c, p.h) for m in (1, 2) for p in discrete_series(m)]
    assert (F(7, 10), 0) in pts and (F(7, 10), F(1, 10)) in pts
    pts += [(F(3, 2), 0), (F(15, 2), 0)]
    with Timer() as t:
        for c, h in pts:
            rep = unitarity_check(NSParams(c, h), F(9, 2))
            assert rep.consistent_with_unitary, (c, h, rep.first_indefinite)
            assert set(rep.verdicts) == set(half_integers(0, F(9, 2)))
    assert t.elapsed < 60


def test_criterion_3_non_unitary_detection():
    rep = unitarity_check(NSParams(F(7, 20), 0), 4)
    assert not rep.consistent_with_unitary
    assert any(isinstance(v, Indefinite) for v in rep.verdicts.values())
    # frozen regression value from the exact scan
    assert rep.first_indefinite == 4
    w = rep.verdicts[F(4)]
    g = shapovalov_gram(NSParams(F(7, 20), 0), 4)
    n = len(w.witness)
    assert sum(w.witness[i] * g[i, j] * w.witness[j] for i in range(n) for j in range(n)) == w.value < 0


def test_criterion_4_fermion_construction():
    with Timer() as t:
        V = build_fermion_vosa(FermionSpace(1), F(9, 2))
        for w in V.weights():
            n = len(V.basis(w))
            assert V.gram(w).rows == [[int(i == j) for j in range(n)] for i in range(n)]
        assert [len(V.basis(w)) for w in half_integers(0, 4)] == [1, 1, 0, 1, 1, 1, 1, 1, 2]
        assert V.L(2, V.L(-2, V.vacuum)) == {(): F(1, 4)}
        assert V.central_charge == F(1, 2)
        rep = invariance_check(V, 0)
        assert rep.passed and rep.details["pairs_checked"] > 0
    assert t.elapsed < 10


def test_criterion_5_lattice_construction():
    with Timer() as t:
        # invariance up to weight 3 for weight-one generators needs cutoff 4
        V = build_lattice_vosa(IntegralLattice.from_rows([[2]]), 4)
        names = [g.name for g in V.generators]
        assert names == ["a0", "e^[1]", "e^[-1]"]
        for g in range(3):
            rep = invariance_check(V, g, max_weight=3)
            assert rep.passed, rep.witnesses[:2]
        alg = weight_one_algebra(V)
        assert alg.dim == 3 and alg.passed
        h = V.heisenberg_vector((1,))
        e = V.exp_vector((1,))
        f = {l: -c for l, c in V.exp_vector((-1,)).items()}
        br = lambda x, y: V.mode(x, 0, y)  # noqa: E731
        assert br(h, e) == {l: 2 * c for l, c in e.items()}
        assert br(h, f) == {l: -2 * c for l, c in f.items()}
        assert br(e, f) == h
        assert weight_one_form(V, h, h) == 2
        cmp = conformal_comparison(V, "sugawara", level=1, dual_coxeter=2)
        assert cmp.passed and cmp.omega_double_prime == {} and cmp.norm == 0
    assert t.elapsed < 30


def test_criterion_6_odd_lattice_fermion_consistency():
    Z = build_lattice_vosa(IntegralLattice.from_rows([[1]]), 4)
    f2 = build_fermion_vosa(FermionSpace(2), 4)
    for w in half_integers(0, 4):
        assert len(Z.basis(w)) == len(f2.basis(w)), w


def test_criterion_7_structure_round_trip():
    A = build_lattice_vosa(IntegralLattice.from_rows([[2]]), 3)
    Zl = build_lattice_vosa(IntegralLattice.from_rows([[1]]), 3)
    rep = decompose(direct_sum([A, Zl]))
    assert len(rep.summands) == 2
    assert rep.idempotents_sum_to_vacuum
    want = sorted(tuple(len(V.basis(w)) for w in half_integers(0, 3)) for V in (A, Zl))
    got = sorted(tuple(s.dims[w] for w in half_integers(0, 3)) for s in rep.summands)
    assert got == want
    for s in rep.summands:
        assert s.flags["weight_zero_one_dimensional"]
        assert s.flags["L1_kills_weight_one"]
        assert s.flags["no_negative_weights"]
        assert s.central_charge == 1


@pytest.mark.parametrize(
    "engine",
    ["ns", "fermion", "lattice"],
)
def test_criterion_8_commutator_formula(engine):
    build = {
        "ns": lambda: build_ns_vosa(F(7, 10), 3),
        "fermion": lambda: build_fermion_vosa(FermionSpace(2), 3),
        "lattice": lambda: build_lattice_vosa(IntegralLattice.from_rows([[2, -1], [-1, 2]]), 3),
    }[engine]
    with Timer() as t:
        V = build()
        tuples = random_commutator_tuples(V, 200, random.Random(2024))
        assert len(tuples) == 200
        for x in tuples:
            for wt in (V.vec_weight(x.u), V.vec_weight(x.v), V.vec_weight(x.w)):
                assert 0 <= wt <= V.cutoff
            r = commutator_check(V, x.u, x.v, x.m, x.n, x.w)
            assert r.passed
    assert t.elapsed < 60


def test_criterion_9_failure_path_integrity(capsys):
    spec = {"construction": "lattice", "parameters": {"gram": [[2]]}, "cutoff": "3", "checks": ["invariance"]}
    codes = {}
    for flags in ((), ("--corrupt-form",)):
        capsys.readouterr()
        old = sys.stdin
        sys.stdin = io.StringIO(json.dumps(spec))
        try:
            codes[flags] = main(["run", "-", *flags])
        finally:
            sys.stdin = old
        out = json.loads(capsys.readouterr().out)
    assert codes[()] == 0 and codes[("--corrupt-form",)] == 1
    wit = out["checks"][0]["witnesses"][0]
    assert all(wit[k] not in (None, "") for k in ("a", "m", "u", "v"))
    assert wit["lhs"] != wit["rhs"]
