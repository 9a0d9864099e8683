from fractions import Fraction as F

import pytest

from oracles import fermion_dims
from unitary_vosa.fermion import FermionSpace, build_fermion_vosa
from unitary_vosa.lattice import IntegralLattice, build_lattice_vosa
from unitary_vosa.ns import build_ns_vosa
from unitary_vosa.structure import (
    BasisNotOrthonormalizable,
    CentralChargeMismatch,
    NonSemisimpleWeightZero,
    conformal_comparison,
    decompose,
    direct_sum,
    tensor_product,
    weight_one_algebra,
    weight_one_form,
)
from unitary_vosa.voa import half_integers, invariance_check


def lattice(rows, cutoff):
    return build_lattice_vosa(IntegralLattice.from_rows(rows), cutoff)


def dims(V):
    return [len(V.basis(w)) for w in half_integers(0, V.cutoff)]


# ---- direct sums and tensor products --------------------------------------------------------


def test_direct_sum_dims_add():
    A, B = lattice([[2]], 3), lattice([[1]], 3)
    S = direct_sum([A, B])
    assert dims(S) == [a + b for a, b in zip(dims(A), dims(B))]
    assert S.central_charge == 1
    assert len(S.basis(0)) == 2


def test_direct_sum_rejects_mismatched_central_charge():
    with pytest.raises(CentralChargeMismatch):
        direct_sum([lattice([[2]], 2), build_fermion_vosa(FermionSpace(1), 2)])


def test_direct_sum_invariance():
    S = direct_sum([lattice([[2]], 3), build_fermion_vosa(FermionSpace(2), 3)])
    for g in range(len(S.generators)):
        rep = invariance_check(S, g, max_weight=min(2, S.cutoff - S.generators[g].weight))
        assert rep.passed, (S.generators[g].name, rep.witnesses[:2])


def test_tensor_of_fermions_matches_two_fermions():
    f1 = build_fermion_vosa(FermionSpace(1), 3)
    T = tensor_product(f1, f1)
    assert dims(T) == fermion_dims(2, 3)
    assert T.central_charge == 1
    for g in range(len(T.generators)):
        assert invariance_check(T, g).passed


def test_tensor_with_ns_and_lattice():
    T = tensor_product(build_ns_vosa(F(7, 10), 3), lattice([[2]], 3))
    assert T.central_charge == F(17, 10)
    for g in range(len(T.generators)):
        rep = invariance_check(T, g, max_weight=min(2, T.cutoff - T.generators[g].weight))
        assert rep.passed, (T.generators[g].name, rep.witnesses[:2])
    assert conformal_comparison(T, "heisenberg").passed is False


# ---- decomposition -----------------------------------------------------------------------


def test_decompose_simple_algebra_is_trivial():
    rep = decompose(lattice([[2]], 3))
    assert rep.passed
    assert len(rep.summands) == 1
    assert rep.summands[0].central_charge == 1


def test_decompose_recovers_summands():
    A, B = lattice([[2]], 3), lattice([[1]], 3)
    rep = decompose(direct_sum([A, B]))
    assert rep.passed and rep.idempotents_sum_to_vacuum and rep.conformal_sum_ok
    found = sorted(tuple(s.dims[w] for w in half_integers(0, 3)) for s in rep.summands)
    assert found == sorted([tuple(dims(A)), tuple(dims(B))])
    assert all(s.central_charge == 1 for s in rep.summands)
    assert all(s.strong_cft for s in rep.summands)


def test_decompose_three_fermion_copies():
    f = build_fermion_vosa(FermionSpace(2), 2)
    rep = decompose(direct_sum([f, f, f]))
    assert len(rep.summands) == 3
    assert rep.passed
    for s in rep.summands:
        assert [s.dims[w] for w in half_integers(0, 2)] == dims(f)


def test_decompose_json_shape():
    rep = decompose(direct_sum([lattice([[2]], 2), lattice([[2]], 2)]))
    j = rep.to_json()
    assert j["status"] == "pass" and len(j["summands"]) == 2
    assert all(s["flags"]["weight_zero_one_dimensional"] for s in j["summands"])


def test_decompose_rejects_empty_weight_zero():
    class Empty(type(lattice([[2]], 2))):
        def basis(self, w):
            return [] if w == 0 else super().basis(w)

    with pytest.raises(NonSemisimpleWeightZero):
        decompose(Empty(IntegralLattice.from_rows([[2]]), 2))


# ---- weight-one Lie algebra ----------------------------------------------------------------


def test_sl2_from_a1():
    V = lattice([[2]], 2)
    alg = weight_one_algebra(V)
    assert alg.dim == 3
    assert alg.passed and all(alg.checks.values())
    assert alg.killing_rank == 3 and alg.derived_dim == 3
    assert alg.radical_dim == 0 and alg.radical_cap_derived == 0
    # invariant form / Killing form on sl2: 2 / 8
    assert alg.ideal_ratios == [(F(1, 4), 3)]
    h, e = V.heisenberg_vector((1,)), V.exp_vector((1,))
    assert weight_one_form(V, h, h) == 2
    assert weight_one_form(V, e, V.exp_vector((-1,))) == -1


def test_so4_from_z2():
    alg = weight_one_algebra(lattice([[1, 0], [0, 1]], 2))
    assert alg.dim == 6 and alg.passed
    assert alg.derived_dim == 6 and alg.killing_rank == 6
    # two sl2 ideals with equal ratio share one eigenspace
    assert [m for _, m in alg.ideal_ratios] == [6]


def test_abelian_weight_one():
    alg = weight_one_algebra(lattice([[4, 0], [0, 4]], 2))
    assert alg.dim == 2 and alg.passed
    assert alg.derived_dim == 0 and alg.killing_rank == 0
    assert alg.ideal_ratios is None


def test_fermion_weight_one_is_empty_for_one_fermion():
    alg = weight_one_algebra(build_fermion_vosa(FermionSpace(1), 2))
    assert alg.dim == 0 and alg.passed


def test_weight_one_form_needs_simple_vacuum():
    S = direct_sum([lattice([[2]], 2), lattice([[2]], 2)])
    v = {S.basis(1)[0]: F(1)}
    with pytest.raises(ValueError):
        weight_one_form(S, v, v)


# ---- conformal vector comparison -----------------------------------------------------------


def test_sugawara_on_a1():
    V = lattice([[2]], 2)
    r = conformal_comparison(V, "sugawara", level=1, dual_coxeter=2)
    assert r.passed and r.method == "dual_basis"
    assert r.omega_double_prime == {} and r.norm == 0
    assert r.omega_prime == V.conformal
    bad = conformal_comparison(V, "sugawara", level=1, dual_coxeter=3)
    assert not bad.passed and bad.norm != 0


def test_heisenberg_comparisons():
    assert not conformal_comparison(lattice([[2]], 2), "heisenberg").passed
    assert conformal_comparison(lattice([[4, 0], [0, 4]], 2), "heisenberg").passed
    assert conformal_comparison(lattice([[1]], 2), "heisenberg").passed


def test_user_supplied_orthonormal_basis():
    V = lattice([[1]], 2)
    r = conformal_comparison(V, "heisenberg", basis=[V.heisenberg_vector((1,))])
    assert r.passed and r.method == "orthonormal_basis"
    W = lattice([[2]], 2)
    with pytest.raises(BasisNotOrthonormalizable):
        conformal_comparison(W, "heisenberg", basis=[W.heisenberg_vector((1,))])


def test_comparison_argument_validation():
    V = lattice([[2]], 2)
    with pytest.raises(ValueError):
        conformal_comparison(V, "sugawara")
    with pytest.raises(ValueError):
        conformal_comparison(V, "other")
