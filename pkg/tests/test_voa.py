"""Generic engine behaviour, exercised on small instances of each family."""

import copy
import random
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from unitary_vosa.fermion import FermionSpace, build_fermion_vosa
from unitary_vosa.lattice import IntegralLattice, build_lattice_vosa
from unitary_vosa.ns import build_ns_vosa
from unitary_vosa.voa import (
    CutoffExceeded,
    SymmetryFailure,
    adjoint_modes,
    bilinear_from_hermitian,
    commutator_check,
    corrupt_form,
    descendant_mode,
    invariance_check,
    random_commutator_tuples,
)

H = F(1, 2)


@pytest.fixture(scope="module")
def fermion():
    return build_fermion_vosa(FermionSpace(1), 4)


@pytest.fixture(scope="module")
def a1():
    return build_lattice_vosa(IntegralLattice.from_rows([[2]]), 3)


@pytest.fixture(scope="module")
def ns():
    return build_ns_vosa(F(3, 2), 3)


def _identity_blocks(V, op):
    for w in V.weights():
        n = len(V.basis(w))
        if op.matrix(V, w) != [[int(i == j) for j in range(n)] for i in range(n)]:
            return False
    return True


@pytest.mark.parametrize("name", ["fermion", "a1", "ns"])
def test_vacuum_modes(name, request):
    V = request.getfixturevalue(name)
    assert _identity_blocks(V, descendant_mode(V, V.vacuum, -1))
    for n in (-3, -2, 0, 1, 2):
        op = descendant_mode(V, V.vacuum, n)
        assert all(not any(any(r) for r in op.matrix(V, w)) for w in V.weights() if V.basis(w + op.degree))


@pytest.mark.parametrize("name", ["fermion", "a1", "ns"])
def test_L0_is_grading(name, request):
    V = request.getfixturevalue(name)
    L0 = descendant_mode(V, V.conformal, 1)
    for w in V.weights():
        n = len(V.basis(w))
        assert L0.matrix(V, w) == [[w * int(i == j) for j in range(n)] for i in range(n)]


@pytest.mark.parametrize("name", ["fermion", "a1", "ns"])
def test_L_minus_one_derivative(name, request):
    V = request.getfixturevalue(name)
    for gen in V.generators:
        dg = V.L(-1, gen.vec)
        for n in range(-3, 4):
            lhs = descendant_mode(V, dg, n)
            rhs = descendant_mode(V, gen.vec, n - 1).scaled(F(-n))
            assert lhs.same_action(rhs)


def test_fermion_central_charge_through_modes(fermion):
    V = fermion
    L2 = descendant_mode(V, V.conformal, 3)
    Lm2 = descendant_mode(V, V.conformal, -1)
    assert (L2 @ Lm2).apply(V, V.vacuum) == {(): F(1, 4)}


def test_phi_fixes_vacuum_and_conformal_and_squares_to_identity(fermion, a1, ns):
    for V in (fermion, a1, ns):
        assert V.phi(V.vacuum) == V.vacuum
        assert V.phi(V.conformal) == V.conformal
        for w in V.weights():
            for l in V.basis(w):
                assert V.phi(V.phi({l: F(1)})) == {l: F(1)}


def test_forms_are_block_diagonal(a1):
    V = a1
    for w1 in V.weights():
        for w2 in V.weights():
            if w1 != w2:
                assert all(V.form_entry(x, y) == 0 for x in V.basis(w1) for y in V.basis(w2))


def test_adjoint_of_virasoro_modes(ns):
    V = ns
    adj = adjoint_modes(V, V.conformal, modes=range(-1, 5))
    for m, op in adj.items():
        # the adjoint of L(n) = omega_{n+1} is L(-n)
        n = m - 1
        direct = descendant_mode(V, V.conformal, -n + 1)
        assert op.same_action(direct)


def test_adjoint_of_g_modes(ns):
    V = ns
    tau = V.generators[1].vec
    adj = adjoint_modes(V, tau, modes=range(-2, 4))
    for m, op in adj.items():
        # tau_m = G(m - 1/2); adjoint is G(-m + 1/2) = tau_{1-m}
        assert op.same_action(descendant_mode(V, tau, 1 - m))


def test_adjoint_of_fermion_modes_carries_sign(fermion):
    V = fermion
    u = V.generators[0].vec
    for m, op in adjoint_modes(V, u, modes=range(-3, 4)).items():
        assert op.same_action(descendant_mode(V, u, -m - 1).scaled(-1))


def test_adjoint_of_weight_one_primaries(a1):
    # weight one, L(1)a = 0: adj(a_m) = -a_{-m}
    V = a1
    for a in (V.heisenberg_vector((1,)), V.exp_vector((1,)), V.exp_vector((-1,))):
        for m, op in adjoint_modes(V, a, modes=range(-3, 3)).items():
            assert op.same_action(descendant_mode(V, a, -m).scaled(-1))


def test_descendant_mode_degrees(a1):
    V = a1
    for w in V.weights():
        for l in V.basis(w):
            for n in range(-2, 3):
                op = descendant_mode(V, {l: F(1)}, n)
                assert op.degree == w - n - 1
                for ws in op.blocks:
                    assert V.basis(ws + op.degree)


@settings(max_examples=25, deadline=None)
@given(
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    st.integers(-3, 2),
    st.integers(0, 2),
    st.integers(0, 2),
)
def test_descendant_mode_is_linear(x, y, n, i, j):
    V = build_lattice_vosa(IntegralLattice.from_rows([[2]]), 2)
    b = V.basis(1)
    u, v = {b[i]: F(1)}, {b[j]: F(1)}
    combo = {}
    for l, c in u.items():
        combo[l] = combo.get(l, 0) + x * c
    for l, c in v.items():
        combo[l] = combo.get(l, 0) + y * c
    combo = {l: c for l, c in combo.items() if c}
    assume(combo)
    lhs = descendant_mode(V, combo, n)
    rhs = descendant_mode(V, u, n).scaled(x) + descendant_mode(V, v, n).scaled(y)
    assert lhs.same_action(rhs)


def test_descendant_mode_above_cutoff_raises(a1):
    with pytest.raises(CutoffExceeded):
        a1.apply_mode(a1.generators[0].vec, -5, a1.vacuum)


def test_invariance_precondition(a1):
    with pytest.raises(CutoffExceeded):
        invariance_check(a1, 0, max_weight=3)


def test_bilinear_examples(fermion, a1):
    assert bilinear_from_hermitian(a1, 1)[F(0)] == [[1]]
    assert bilinear_from_hermitian(a1, -1)[F(0)] == [[-1]]
    assert bilinear_from_hermitian(fermion, 1)[H] == [[-1]]
    with pytest.raises(ValueError):
        bilinear_from_hermitian(a1, 2)


def test_bilinear_symmetry_failure_is_reported(a1):
    bad = copy.copy(a1)
    bad._gram_cache = {}
    b = a1.basis(1)

    def lopsided(x, y):
        return a1.form_entry(x, y) + (1 if (x, y) == (b[0], b[1]) else 0)

    bad.form_entry = lopsided
    with pytest.raises(SymmetryFailure):
        bilinear_from_hermitian(bad)


def test_corrupted_form_breaks_invariance(a1):
    bad = corrupt_form(a1)
    rep = invariance_check(bad, 0)
    assert not rep.passed
    wit = rep.witnesses[0]
    assert set(wit) == {"a", "m", "u", "v", "lhs", "rhs"} and wit["lhs"] != wit["rhs"]
    assert invariance_check(a1, 0).passed


def test_commutator_examples(ns, fermion, a1):
    V = ns
    w = {V.basis(2)[0]: F(1)}
    # [L(2), L(-2)] = 4 L(0) + c/2 on L(-2)1
    r = commutator_check(V, V.conformal, V.conformal, 3, -1, w)
    assert r.passed
    assert r.lhs == {l: (8 + F(3, 4)) * c for l, c in w.items()}
    u = fermion.generators[0].vec
    for m in range(-3, 3):
        for n in range(-3, 3):
            r = commutator_check(fermion, u, u, m, n, fermion.vacuum)
            assert r.passed
            if m + n == -1:
                # anticommutator of u(m+1/2), u(n+1/2) is the identity on the vacuum
                assert r.lhs == fermion.vacuum
    h = a1.heisenberg_vector((1,))
    e = a1.exp_vector((1,))
    for n in range(-2, 2):
        for w in a1.basis(1):
            r = commutator_check(a1, h, e, 0, n, {w: F(1)})
            assert r.passed
            assert r.rhs == {k: 2 * c for k, c in a1.mode(e, n, {w: F(1)}).items()}


def test_commutator_check_detects_a_broken_engine():
    V = build_lattice_vosa(IntegralLattice.from_rows([[2]]), 3)
    original = V.heisenberg_mode

    def broken(i, n, label):
        r = original(i, n, label)
        return {k: 2 * c for k, c in r.items()} if n == 1 else r

    V.heisenberg_mode = broken
    rng = random.Random(1)
    tuples = random_commutator_tuples(V, 60, rng)
    assert any(not commutator_check(V, t.u, t.v, t.m, t.n, t.w).passed for t in tuples)
