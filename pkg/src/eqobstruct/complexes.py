"""Finite G-CW-complexes given by orbit cells and equivariant boundary data.

Each orbit cell ``sigma`` stands for the equivariant cell ``G x_{G_sigma} D^n``
and its boundary is recorded on the representative cell as
``d(sigma) = sum_i n_i a_i tau_i``. A term is only admissible if
``a_i tau_i`` is fixed by ``G_sigma``, i.e. ``G_sigma^{a_i} <= G_{tau_i}``.

The cells of the fixed set ``B^H`` are the translates ``b tau`` with
``H^b <= G_tau``, indexed by pairs ``(tau, b: G/H -> G/G_tau)``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .groups import (
    FiniteGroup,
    InvalidMorphism,
    OrbitCategory,
    OrbitMorphism,
    Subgroup,
    SubgroupFamily,
    UnknownSubgroup,
    canonical_rep,
    compose,
)
from .zmodule import IntMatrix, zeros


class InvalidComplex(ValueError):
    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class OrbitCell:
    id: str
    dim: int
    isotropy: Subgroup = field(compare=False)

    def sort_key(self) -> tuple[int, str]:
        return (self.dim, self.id)


@dataclass(frozen=True)
class BoundaryTerm:
    coeff: int
    translate: OrbitMorphism
    face: OrbitCell

    @property
    def element(self) -> int:
        return self.translate.coset_rep


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witness: tuple = ()

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class FixedBasis:
    subgroup: Subgroup
    dim: int
    basis: tuple[tuple[OrbitCell, OrbitMorphism], ...]

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def index(self) -> dict[tuple[str, int], int]:
        return {(cell.id, mor.coset_rep): i for i, (cell, mor) in enumerate(self.basis)}


class GCWComplex:
    def __init__(
        self,
        group: FiniteGroup,
        family: SubgroupFamily,
        cells: Iterable[OrbitCell],
        boundary: Mapping[str, Sequence[BoundaryTerm]],
        assertions: Sequence[str] = (),
    ):
        self.group = group
        self.family = family
        self.category = OrbitCategory(family)
        ordered = sorted(cells, key=OrbitCell.sort_key)
        ids = [c.id for c in ordered]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate cell ids")
        self.cells: dict[str, OrbitCell] = {c.id: c for c in ordered}
        self.boundary: dict[str, tuple[BoundaryTerm, ...]] = {
            c.id: tuple(
                sorted(boundary.get(c.id, ()), key=lambda t: (t.face.id, t.element, t.coeff))
            )
            for c in ordered
        }
        unknown = set(boundary) - set(self.cells)
        if unknown:
            raise ValueError(f"boundary given for unknown cells {sorted(unknown)}")
        self.assertions = tuple(assertions)
        self._bases: dict[tuple[Subgroup, int], FixedBasis] = {}
        self._boundaries: dict[tuple[Subgroup, int], IntMatrix] = {}

    @property
    def dimension(self) -> int:
        return max((c.dim for c in self.cells.values()), default=-1)

    def cells_of_dim(self, n: int) -> list[OrbitCell]:
        return [c for c in self.cells.values() if c.dim == n]

    # -- fixed point complexes ------------------------------------------------

    def fixed_basis(self, h: Subgroup, n: int) -> FixedBasis:
        if h not in self.family:
            raise UnknownSubgroup(h.label())
        key = (h, n)
        if key not in self._bases:
            basis = tuple(
                (tau, mor) for tau in self.cells_of_dim(n) for mor in self.category.hom(h, tau.isotropy)
            )
            self._bases[key] = FixedBasis(h, n, basis)
        return self._bases[key]

    def boundary_matrix(self, h: Subgroup, n: int) -> IntMatrix:
        """Cellular boundary ``C_n(B^H) -> C_{n-1}(B^H)``."""
        key = (h, n)
        if key in self._boundaries:
            return self._boundaries[key]
        src = self.fixed_basis(h, n)
        if n <= 0:
            mat = zeros(0, src.rank)
        else:
            dst = self.fixed_basis(h, n - 1)
            index = dst.index()
            mat = zeros(dst.rank, src.rank)
            for j, (tau, b) in enumerate(src.basis):
                for term in self.boundary[tau.id]:
                    c = compose(b, term.translate)
                    mat[index[(term.face.id, c.coset_rep)], j] += term.coeff
        self._boundaries[key] = mat
        return mat

    def translation_chain_map(self, h: Subgroup, k: Subgroup, a: OrbitMorphism, n: int) -> IntMatrix:
        """Matrix of ``x -> a x`` from ``C_n(B^K)`` to ``C_n(B^H)`` for ``a: G/H -> G/K``."""
        if a.source != h or a.target != k or not a.is_valid:
            raise InvalidMorphism(f"{a.describe()} is not a morphism {h.label()} -> {k.label()}")
        src = self.fixed_basis(k, n)
        dst = self.fixed_basis(h, n)
        index = dst.index()
        mat = zeros(dst.rank, src.rank)
        for j, (tau, b) in enumerate(src.basis):
            c = compose(a, b)
            mat[index[(tau.id, c.coset_rep)], j] = 1
        return mat

    def orbit_space_complex(self) -> "ChainComplex":
        """Cellular chain complex of ``B/G``: translates collapse onto their orbit cell."""
        dims = range(self.dimension + 1)
        cells = {n: [c.id for c in self.cells_of_dim(n)] for n in dims}
        mats = {}
        for n in dims:
            if n == 0:
                mats[n] = zeros(0, len(cells[0]))
                continue
            index = {cid: i for i, cid in enumerate(cells[n - 1])}
            mat = zeros(len(cells[n - 1]), len(cells[n]))
            for j, cid in enumerate(cells[n]):
                for term in self.boundary[cid]:
                    mat[index[term.face.id], j] += term.coeff
            mats[n] = mat
        return ChainComplex(cells, mats)

    # -- validation -------------------------------------------------------------

    def validate(self) -> list[Violation]:
        out: list[Violation] = []
        for cell in self.cells.values():
            if cell.dim < 0:
                out.append(Violation("NegativeDimension", f"cell {cell.id} has dimension {cell.dim}", (cell.id,)))
            if cell.isotropy not in self.family:
                out.append(
                    Violation(
                        "IsotropyNotInFamily",
                        f"isotropy {cell.isotropy.label()} of cell {cell.id} is not in the family",
                        (cell.id,),
                    )
                )
        for cell in self.cells.values():
            for term in self.boundary[cell.id]:
                face = term.face
                if face.id not in self.cells:
                    out.append(Violation("UnknownFace", f"cell {cell.id} refers to unknown face {face.id}", (cell.id, face.id)))
                    continue
                if face.dim != cell.dim - 1:
                    out.append(
                        Violation(
                            "DimensionMismatch",
                            f"face {face.id} of {cell.id} has dimension {face.dim}, expected {cell.dim - 1}",
                            (cell.id, face.id),
                        )
                    )
                if term.translate.source != cell.isotropy or term.translate.target != face.isotropy:
                    out.append(
                        Violation("IsotropyViolation", f"translate of {face.id} in d({cell.id}) has wrong endpoints", (cell.id, face.id))
                    )
                elif not term.translate.is_valid:
                    out.append(
                        Violation(
                            "IsotropyViolation",
                            f"{self.group.name(term.element)}{face.id} in d({cell.id}) is not fixed by "
                            f"{cell.isotropy.label()}",
                            (cell.id, face.id, self.group.name(term.element)),
                        )
                    )
        if any(v.kind in ("UnknownFace", "DimensionMismatch") for v in out):
            return out
        out.extend(self._boundary_square_violations())
        return out

    def _boundary_square_violations(self) -> list[Violation]:
        # d^2 on the representative (sigma, e) of every orbit; translates follow by equivariance
        out = []
        g = self.group
        for cell in self.cells.values():
            if cell.dim < 2:
                continue
            acc: dict[tuple[str, int], int] = defaultdict(int)
            for t1 in self.boundary[cell.id]:
                for t2 in self.boundary[t1.face.id]:
                    rep = canonical_rep(t2.face.isotropy, g.mul[t1.element][t2.element])
                    acc[(t2.face.id, rep)] += t1.coeff * t2.coeff
            bad = sorted((k, v) for k, v in acc.items() if v != 0)
            if bad:
                terms = ", ".join(f"{v}*{g.name(rep)}{fid}" for (fid, rep), v in bad)
                out.append(Violation("BoundarySquareNonzero", f"d(d({cell.id})) = {terms}", (cell.id,)))
        return out

    def require_valid(self) -> None:
        violations = self.validate()
        if violations:
            raise InvalidComplex(violations)


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """An ordinary finite chain complex of free abelian groups.

    ``boundaries[n]`` is the matrix ``C_n -> C_{n-1}`` (zero rows at ``n = 0``).
    """

    cells: dict[int, list[str]]
    boundaries: dict[int, IntMatrix]

    def rank(self, n: int) -> int:
        return len(self.cells.get(n, ()))

    def boundary(self, n: int) -> IntMatrix:
        if n in self.boundaries:
            return self.boundaries[n]
        return zeros(self.rank(n - 1), self.rank(n))


def make_term(coeff: int, source: Subgroup, face: OrbitCell, a: int) -> BoundaryTerm:
    """A boundary term ``coeff * a face`` for a cell with isotropy ``source``.

    The translate is canonicalized but not checked; :meth:`GCWComplex.validate`
    reports inadmissible translates.
    """
    return BoundaryTerm(int(coeff), OrbitMorphism(source, face.isotropy, canonical_rep(face.isotropy, a)), face)
