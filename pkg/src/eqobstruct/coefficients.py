"""Coefficient systems: contravariant functors from the orbit category to abelian groups.

A system stores one presented group per subgroup of the family and one
integer matrix per orbit morphism. For ``a: G/H -> G/K`` the matrix of
``M(a): M(G/K) -> M(G/H)`` has ``M(G/H).gens`` rows and ``M(G/K).gens``
columns, so ``M(compose(f, g)) == M(f) @ M(g)`` modulo the relations of the
source's value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .groups import (
    OrbitCategory,
    OrbitMorphism,
    Subgroup,
    SubgroupFamily,
    compose,
    identity_morphism,
)
from .zmodule import (
    IntMatrix,
    PresentedAbelianGroup,
    block_diagonal,
    hstack,
    identity,
    matmul,
    preimage,
    solve,
    vstack,
    zeros,
)


class CoefficientError(ValueError):
    pass


class FunctorialityViolation(CoefficientError):
    def __init__(self, first: OrbitMorphism, second: OrbitMorphism | None, generator: int):
        self.first = first
        self.second = second
        self.generator = generator
        if second is None:
            msg = f"M({first.describe()}) is not the identity on generator {generator}"
        else:
            msg = (
                f"M({first.describe()} then {second.describe()}) differs from the composite "
                f"on generator {generator}"
            )
        super().__init__(msg)


class RelationViolation(CoefficientError):
    def __init__(self, morphism: OrbitMorphism, relator: int):
        self.morphism = morphism
        self.relator = relator
        super().__init__(f"M({morphism.describe()}) does not preserve relator {relator}")


class MissingMorphism(CoefficientError):
    pass


@dataclass(frozen=True)
class Defect:
    kind: str
    message: str
    morphisms: tuple[OrbitMorphism, ...] = ()
    generator: int | None = None

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


class CoefficientSystem:
    def __init__(
        self,
        family: SubgroupFamily,
        at: Mapping[Subgroup, PresentedAbelianGroup],
        act: Mapping[OrbitMorphism, IntMatrix],
        category: OrbitCategory | None = None,
    ):
        self.family = family
        self.category = category or OrbitCategory(family)
        missing = [h.label() for h in family if h not in at]
        if missing:
            raise CoefficientError(f"no value given for subgroups {missing}")
        self.at = {h: at[h] for h in family}
        self.act = dict(act)
        for f, mat in self.act.items():
            want = (self.at[f.source].gens, self.at[f.target].gens)
            if mat.shape != want:
                raise CoefficientError(f"M({f.describe()}) has shape {mat.shape}, expected {want}")

    def value(self, h: Subgroup) -> PresentedAbelianGroup:
        return self.at[h]

    def map(self, f: OrbitMorphism) -> IntMatrix:
        return self.act[f]

    def validate_functoriality(self) -> list[Defect]:
        """Exhaustive check over identities, relations and all composable pairs."""
        out: list[Defect] = []
        for f in self.category.morphisms:
            if f not in self.act:
                out.append(Defect("MissingMorphism", f"no matrix for {f.describe()}", (f,)))
        if out:
            return out
        for f in self.category.morphisms:
            src, tgt = self.at[f.source], self.at[f.target]
            image = matmul(self.act[f], tgt.relations)
            for j in src.nonzero_columns(image):
                out.append(Defect("RelationViolation", str(RelationViolation(f, j)), (f,), j))
        for h in self.family:
            idm = identity_morphism(h)
            diff = self.act[idm] - identity(self.at[h].gens)
            for j in self.at[h].nonzero_columns(diff):
                out.append(Defect("FunctorialityViolation", str(FunctorialityViolation(idm, None, j)), (idm,), j))
        for (f, g), fg in self.category.composition_table.items():
            diff = self.act[fg] - matmul(self.act[f], self.act[g])
            for j in self.at[f.source].nonzero_columns(diff):
                out.append(
                    Defect("FunctorialityViolation", str(FunctorialityViolation(f, g, j)), (f, g), j)
                )
        return out

    def require_functorial(self) -> None:
        defects = self.validate_functoriality()
        if defects:
            raise CoefficientError("; ".join(str(d) for d in defects))


def constant_system(family: SubgroupFamily, value: PresentedAbelianGroup) -> CoefficientSystem:
    cat = OrbitCategory(family)
    at = {h: value for h in family}
    act = {f: identity(value.gens) for f in cat.morphisms}
    return CoefficientSystem(family, at, act, cat)


def system_from_data(
    family: SubgroupFamily,
    groups: Mapping[Subgroup, PresentedAbelianGroup],
    morphism_matrices: Mapping[OrbitMorphism, IntMatrix],
) -> CoefficientSystem:
    """Build a system from matrices on a generating set of morphisms.

    Identities default to identity matrices and maps into or out of a group
    with no generators are forced. Every other morphism must be a composite
    of given ones; when two factorizations of the same morphism disagree a
    :class:`FunctorialityViolation` is raised. The finished system is
    checked exhaustively.
    """
    cat = OrbitCategory(family)
    for f, mat in morphism_matrices.items():
        want = (groups[f.source].gens, groups[f.target].gens)
        if mat.shape != want:
            raise CoefficientError(f"M({f.describe()}) has shape {mat.shape}, expected {want}")
        src, tgt = groups[f.source], groups[f.target]
        bad = src.nonzero_columns(matmul(mat, tgt.relations))
        if bad:
            raise RelationViolation(f, bad[0])

    known: dict[OrbitMorphism, IntMatrix] = {}
    for h in family:
        known[identity_morphism(h)] = identity(groups[h].gens)
    for f in cat.morphisms:
        if groups[f.source].gens == 0 or groups[f.target].gens == 0:
            known[f] = zeros(groups[f.source].gens, groups[f.target].gens)

    def record(f: OrbitMorphism, mat: IntMatrix, witness: tuple[OrbitMorphism, OrbitMorphism | None]) -> bool:
        if f in known:
            bad = groups[f.source].nonzero_columns(known[f] - mat)
            if bad:
                raise FunctorialityViolation(witness[0], witness[1], bad[0])
            return False
        known[f] = mat
        return True

    generators = sorted(morphism_matrices, key=OrbitMorphism.sort_key)
    for f in generators:
        record(f, morphism_matrices[f], (f, None))
    # breadth-first closure under composition with the given generators
    frontier = sorted(known, key=OrbitMorphism.sort_key)
    while frontier:
        fresh = []
        for f in frontier:
            for g in generators:
                if f.target == g.source:
                    fg = compose(f, g)
                    if record(fg, matmul(known[f], known[g]), (f, g)):
                        fresh.append(fg)
                if g.target == f.source:
                    gf = compose(g, f)
                    if record(gf, matmul(known[g], known[f]), (g, f)):
                        fresh.append(gf)
        frontier = sorted(set(fresh), key=OrbitMorphism.sort_key)

    missing = [f for f in cat.morphisms if f not in known]
    if missing:
        raise MissingMorphism(
            "cannot derive matrices for " + ", ".join(f.describe() for f in missing[:5])
            + (" ..." if len(missing) > 5 else "")
        )
    system = CoefficientSystem(family, groups, {f: known[f] for f in cat.morphisms}, cat)
    defects = system.validate_functoriality()
    if defects:
        d = defects[0]
        if d.kind == "RelationViolation":
            raise RelationViolation(d.morphisms[0], d.generator or 0)
        raise FunctorialityViolation(d.morphisms[0], d.morphisms[1] if len(d.morphisms) > 1 else None, d.generator or 0)
    return system


def fixed_point_system(
    family: SubgroupFamily,
    action: Sequence[IntMatrix],
    relations: IntMatrix | None = None,
) -> CoefficientSystem:
    """``M(G/H) = V^H`` for a G-module ``V = Z^r / relations``.

    ``action[g]`` is the matrix of ``g`` on ``Z^r``; it must preserve the
    relation lattice. ``M(a)`` sends ``v in V^K`` to ``a v in V^H``.
    """
    r = action[0].shape[0]
    rel = relations if relations is not None else zeros(r, 0)
    lattices: dict[Subgroup, IntMatrix] = {}
    groups: dict[Subgroup, PresentedAbelianGroup] = {}
    for h in family:
        moves = vstack([action[x] - identity(r) for x in h.elements], r)
        # x is H-fixed in V iff (h - 1) x lies in the relation lattice for every h
        fixed = preimage(moves, block_diagonal([rel] * h.order))
        lattices[h] = fixed
        groups[h] = PresentedAbelianGroup(fixed.shape[1], preimage(fixed, rel))
    cat = OrbitCategory(family)
    act: dict[OrbitMorphism, IntMatrix] = {}
    for f in cat.morphisms:
        src, tgt = lattices[f.source], lattices[f.target]
        span = hstack([src, rel], r)
        moved = matmul(action[f.coset_rep], tgt)
        mat = zeros(src.shape[1], tgt.shape[1])
        for j in range(moved.shape[1]):
            mat[:, j] = solve(span, moved[:, j : j + 1])[: src.shape[1], 0]
        act[f] = mat
    return CoefficientSystem(family, groups, act, cat)


@dataclass(frozen=True)
class CompatibleFamilyDecl:
    """Declared fibers ``F_H`` and the names of the H-equivalences between them.

    Metadata only: nothing here is checked beyond completeness.
    """

    labels: Mapping[Subgroup, str]
    equivalences: Mapping[tuple[Subgroup, Subgroup], str] = field(default_factory=dict)

    def missing(self, category: OrbitCategory) -> list[str]:
        out = [f"no fiber label for {h.label()}" for h in category.objects if h not in self.labels]
        for h in category.objects:
            for k in category.objects:
                if h != k and category.hom(h, k) and (h, k) not in self.equivalences:
                    out.append(f"no declared equivalence for {h.label()} -> {k.label()}")
        return out
