"""Finite-dimensional superselection structure toolkit.

Decides whether a set of observables admits superselection sectors,
decomposes the state space into coherent blocks, checks for a maximal
abelian subalgebra (equivalently an abelian commutant), and carries three
worked case studies: permutation-invariant observables on tensor powers,
the mass multiplier of Galilei boosts, and asymptotic charge-flux
multipoles.
"""

from .numkernel import (
    ToleranceConfig,
    as_complex_matrix,
    gram_schmidt_hs,
    hermitian_eig,
    orthonormal_nullspace,
)
from .opalgebra import (
    DiracReport,
    OperatorAlgebra,
    OperatorSet,
    algebra_from_span,
    center,
    check_dirac,
    commutant,
    generated_algebra,
    is_abelian,
    operator_set,
)
from .sectors import (
    DensityState,
    SectorDecomposition,
    are_disjoint,
    central_decomposition,
    density_state,
    expectation_functional,
    extremal_decomposition,
    truncate,
)
from .diracsets import (
    Polynomial,
    cyclic_vector_for,
    has_simple_spectrum,
    interpolate_commuting,
    is_cyclic,
)

__version__ = "0.1.0"

__all__ = [
    "ToleranceConfig", "as_complex_matrix", "gram_schmidt_hs", "hermitian_eig",
    "orthonormal_nullspace",
    "DiracReport", "OperatorAlgebra", "OperatorSet", "algebra_from_span",
    "center", "check_dirac", "commutant", "generated_algebra", "is_abelian",
    "operator_set",
    "DensityState", "SectorDecomposition", "are_disjoint",
    "central_decomposition", "density_state", "expectation_functional",
    "extremal_decomposition", "truncate",
    "Polynomial", "cyclic_vector_for", "has_simple_spectrum",
    "interpolate_commuting", "is_cyclic",
]
