"""Exact coincidence Reidemeister/Nielsen numbers for nilmanifold targets."""

from .errors import (
    BoundExceededError,
    HomomorphismError,
    InfiniteResultError,
    NilcoError,
    ShapeError,
    UnsupportedClassError,
)
from .infra import CosetAction, InfraStructure, decide_infra, lift_pair, validate_infra
from .intmat import (
    CokernelStructure,
    IntMatrix,
    SmithDecomposition,
    cokernel,
    column_hermite,
    coset_representatives,
    determinant,
    kernel_basis,
    rank,
    reduce_to_canonical_rep,
    smith_normal_form,
)
from .lattice import (
    LatticeElement,
    LatticeHomomorphism,
    NilpotentLattice,
    apply_hom,
    identity_hom,
    validate_hom,
)
from .oracle import FiniteGroupTable, cokernel_oracle, twisted_orbits_finite
from .reidemeister import (
    FINITE,
    INFINITE,
    NO,
    UNKNOWN,
    YES,
    CoincidenceReport,
    GeneratorPairSystem,
    ReidemeisterResult,
    TwistedAction,
    TwistedOrbitEngine,
    coincidence_invariants,
    coincidence_invariants_from_pairs,
    decide_wecken,
    difference_map,
    fiber_deviation_rank,
    label_class,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
