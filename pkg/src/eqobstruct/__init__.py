"""Exact Bredon cohomology of finite G-CW-complexes and equivariant obstruction verdicts."""

from .bredon import (
    BredonCochain,
    BredonComplex,
    CohomologyReport,
    NotACoChainComplex,
    coboundary,
    cochain_complex,
    cohomology,
    expand,
    oracle_cohomology,
    submodule_oracle,
    yoneda_check,
)
from .coefficients import (
    CoefficientError,
    CoefficientSystem,
    CompatibleFamilyDecl,
    FunctorialityViolation,
    MissingMorphism,
    RelationViolation,
    constant_system,
    fixed_point_system,
    system_from_data,
)
from .complexes import BoundaryTerm, ChainComplex, GCWComplex, InvalidComplex, OrbitCell, make_term
from .groups import (
    FiniteGroup,
    NotAGroup,
    OrbitCategory,
    OrbitMorphism,
    Subgroup,
    SubgroupFamily,
    all_subgroups_family,
    close_family,
    compose,
    cyclic_group,
    group_from_permutations,
    group_from_table,
    hom_set,
    identity_morphism,
    orbit_morphism,
    subgroup_generated,
)
from .instance import Instance, ParseError, load_instance, parse_instance
from .obstruction import (
    Kind,
    ObstructionInput,
    Verdict,
    apply_modification,
    check_cocycle,
    decide,
    difference_identity,
    modification_verdict,
    strict_verdict,
)
from .zmodule import (
    GroupInvariants,
    NoSolution,
    PresentedAbelianGroup,
    Subquotient,
    smith,
    solve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
