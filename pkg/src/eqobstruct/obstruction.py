"""Extension verdicts for user-supplied obstruction cochains.

The input is a Bredon complex with the coefficient system ``pi`` (the
``n``-th homotopy groups of the classifying spaces, entered as data) and a
cochain ``alpha`` of degree ``n + 1`` giving, per orbit ``(n+1)``-cell, the
class of the classifying map on its attaching sphere. Verdicts:

``ExtendsAsIs``
    ``alpha`` vanishes: the fibration over the ``n``-skeleton extends over
    the ``(n+1)``-skeleton.
``ExtendsAfterModification``
    ``alpha = delta d``: after redefining the fibration over the ``n``-cells
    by ``d`` (keeping it over the ``(n-1)``-skeleton) the new obstruction
    ``alpha - delta d`` vanishes.
``Blocked``
    ``[alpha] != 0`` in ``H^{n+1}``: the restriction to the ``(n-1)``-skeleton
    does not extend over the ``(n+1)``-skeleton.
``NotACocycle``
    ``delta alpha != 0``; such data cannot come from a fibration.

All verdicts are conditional on hypotheses about spaces that cannot be seen
in cochain data; they are listed in :data:`STANDING_ASSUMPTIONS`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .bredon import BredonCochain, BredonComplex
from .zmodule import GroupInvariants, NoSolution, hstack, matmul, solve

STANDING_ASSUMPTIONS = (
    "B^H is simply connected for every isotropy subgroup H (not verified)",
    "each fiber F_H is a finite H-CW-complex (not verified)",
    "total spaces have the G-homotopy type of G-CW-complexes (not verified)",
    "the coefficient system is pi_n of the classifying spaces BAut_H(F_H), as supplied (not verified)",
)


class DegreeMismatch(ValueError):
    pass


class Kind(str, enum.Enum):
    EXTENDS_AS_IS = "ExtendsAsIs"
    EXTENDS_AFTER_MODIFICATION = "ExtendsAfterModification"
    BLOCKED = "Blocked"
    NOT_A_COCYCLE = "NotACocycle"

    def __str__(self) -> str:
        return self.value


MEANING = {
    Kind.EXTENDS_AS_IS: "the fibration over the n-skeleton extends over the (n+1)-skeleton",
    Kind.EXTENDS_AFTER_MODIFICATION: (
        "after redefining over the n-cells by the certificate, the restriction to the "
        "(n-1)-skeleton extends over the (n+1)-skeleton"
    ),
    Kind.BLOCKED: "the restriction to the (n-1)-skeleton does not extend over the (n+1)-skeleton",
    Kind.NOT_A_COCYCLE: "the cochain is not a cocycle, so it is not the obstruction of any fibration",
}


@dataclass(frozen=True)
class ObstructionInput:
    complex: BredonComplex
    alpha: BredonCochain
    n: int | None = None

    def __post_init__(self) -> None:
        if self.n is None:
            object.__setattr__(self, "n", self.alpha.degree - 1)
        if self.alpha.degree != self.n + 1:
            raise DegreeMismatch(f"obstruction has degree {self.alpha.degree}, expected {self.n + 1}")

    @property
    def warnings(self) -> tuple[str, ...]:
        out = list(STANDING_ASSUMPTIONS)
        if self.n < 2:
            out.append(f"n = {self.n} < 2: the extension theorem assumes n >= 2")
        out.extend(f"declared: {a}" for a in self.complex.space.assertions)
        return tuple(out)


@dataclass(frozen=True)
class CocycleCheck:
    ok: bool
    coboundary: BredonCochain
    witness: str | None = None


@dataclass(frozen=True)
class Verdict:
    kind: Kind
    certificate: BredonCochain | None = None
    cohomology: GroupInvariants | None = None
    class_coordinates: tuple[int, ...] = ()
    diagnostics: tuple[str, ...] = ()
    assumptions: tuple[str, ...] = field(default=(), compare=False)

    @property
    def meaning(self) -> str:
        return MEANING[self.kind]


@dataclass(frozen=True)
class DifferenceCochain:
    """A difference cochain as supplied.

    The geometric difference cochain carries a factor ``(-1)^(n+1)``; values
    here are taken as already including it, and identities are checked on
    the values exactly as given.
    """

    d: BredonCochain
    includes_sign: bool = True


@dataclass(frozen=True)
class DifferenceCheck:
    holds: bool
    residual: BredonCochain
    cells: tuple[str, ...]


def check_cocycle(inp: ObstructionInput) -> CocycleCheck:
    cx = inp.complex
    delta = cx.coboundary(inp.alpha)
    bad = cx.nonzero_cells(delta)
    return CocycleCheck(ok=not bad, coboundary=delta, witness=bad[0] if bad else None)


def strict_verdict(inp: ObstructionInput) -> Verdict:
    """``ExtendsAsIs`` when alpha vanishes, otherwise the modification verdict."""
    if inp.complex.is_zero(inp.alpha):
        return Verdict(Kind.EXTENDS_AS_IS, assumptions=inp.warnings)
    return modification_verdict(inp)


def modification_verdict(inp: ObstructionInput) -> Verdict:
    """Solve ``delta d = alpha`` modulo relations, or locate ``[alpha]`` in cohomology."""
    cx = inp.complex
    n = inp.n
    target = cx.group(n + 1)
    delta = cx.coboundary_matrix(n)
    a = cx.vector(inp.alpha)
    system = hstack([delta, target.relations], target.gens)
    try:
        x = solve(system, a)
    except NoSolution as exc:
        quotient = cx.cohomology_quotient(n + 1)
        coords = quotient.class_of(a)
        return Verdict(
            Kind.BLOCKED,
            cohomology=quotient.invariants,
            class_coordinates=coords,
            diagnostics=(str(exc),),
            assumptions=inp.warnings,
        )
    d = cx.cochain(x[: delta.shape[1]], n)
    residual = cx.vector(inp.alpha) - matmul(delta, cx.vector(d))
    assert target.is_zero(residual)
    return Verdict(Kind.EXTENDS_AFTER_MODIFICATION, certificate=d, assumptions=inp.warnings)


def decide(inp: ObstructionInput) -> Verdict:
    check = check_cocycle(inp)
    if not check.ok:
        return Verdict(
            Kind.NOT_A_COCYCLE,
            diagnostics=(f"coboundary is nonzero on cell {check.witness}",),
            assumptions=inp.warnings,
        )
    return strict_verdict(inp)


def apply_modification(cx: BredonComplex, alpha: BredonCochain, d: BredonCochain) -> BredonCochain:
    """Obstruction of the fibration redefined by ``d``: ``alpha - delta d``."""
    if d.degree + 1 != alpha.degree:
        raise DegreeMismatch(f"cannot modify a degree {alpha.degree} obstruction by a degree {d.degree} cochain")
    return cx.cochain(cx.vector(alpha) - matmul(cx.coboundary_matrix(d.degree), cx.vector(d)), alpha.degree)


def difference_identity(
    cx: BredonComplex, alpha1: BredonCochain, alpha2: BredonCochain, d: BredonCochain
) -> DifferenceCheck:
    """Check ``delta d == alpha1 - alpha2`` modulo relations."""
    if alpha1.degree != alpha2.degree or d.degree + 1 != alpha1.degree:
        raise DegreeMismatch(
            f"degrees {alpha1.degree}, {alpha2.degree} and {d.degree} do not fit delta d = a1 - a2"
        )
    resid = matmul(cx.coboundary_matrix(d.degree), cx.vector(d)) - (cx.vector(alpha1) - cx.vector(alpha2))
    residual = cx.cochain(resid, alpha1.degree)
    cells = tuple(cx.nonzero_cells(residual))
    return DifferenceCheck(holds=not cells, residual=residual, cells=cells)
