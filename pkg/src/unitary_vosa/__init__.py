"""Exact constructions and unitarity checks for vertex operator superalgebras."""

from .exact import Gaussian, fmt_rational, parse_rational
from .fermion import FermionSpace, build_fermion_vosa, fermion_apply, fermion_basis
from .lattice import (
    IntegralLattice,
    build_lattice_vosa,
    e_alpha_sign,
    synthesize_cocycle,
    vertex_e_alpha_mode,
)
from .linalg import (
    HermitianMatrix,
    Indefinite,
    PositiveDefinite,
    PositiveSemidefinite,
    congruence_diagonalize,
    psd_verdict,
    radical_basis,
)
from .ns import (
    NSMonomial,
    NSParams,
    build_ns_vosa,
    discrete_series,
    normal_order_apply,
    shapovalov_gram,
    simple_quotient_dims,
    unitarity_check,
    verma_basis,
)
from .structure import (
    BasisNotOrthonormalizable,
    CentralChargeMismatch,
    NonSemisimpleWeightZero,
    conformal_comparison,
    decompose,
    direct_sum,
    tensor_product,
    weight_one_algebra,
)
from .voa import (
    CutoffExceeded,
    SymmetryFailure,
    TruncatedVOSA,
    adjoint_modes,
    bilinear_from_hermitian,
    commutator_check,
    corrupt_form,
    descendant_mode,
    invariance_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
