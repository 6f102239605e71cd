"""Bredon cochains, coboundary and cohomology.

Cochains are stored reduced: one element of ``M(G/G_sigma)`` per orbit cell
``sigma``. The family ``(f(H))_H`` of homomorphisms ``C_n(B^H) -> M(G/H)`` is
recovered by :func:`expand`; on the fixed cell ``b tau`` it takes the value
``M(b)(f[tau])``. Because ``C_n(B^-)`` is free on the orbit cells, this
direct sum is isomorphic to the group of compatible families, and
:func:`submodule_oracle` builds that group literally so the isomorphism can
be tested.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from .coefficients import CoefficientSystem
from .complexes import GCWComplex, OrbitCell
from .groups import Subgroup
from .zmodule import (
    GroupInvariants,
    IntMatrix,
    PresentedAbelianGroup,
    Subquotient,
    block_diagonal,
    column,
    direct_sum,
    hstack,
    matmul,
    outside_span,
    preimage,
    rank,
    vstack,
    zeros,
)


class NotACoChainComplex(ValueError):
    def __init__(self, degree: int, cell: str):
        self.degree = degree
        self.cell = cell
        super().__init__(f"coboundary squared is nonzero in degree {degree + 2} at cell {cell}")


@dataclass(frozen=True)
class BredonCochain:
    degree: int
    values: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", {k: tuple(int(x) for x in v) for k, v in sorted(self.values.items())}
        )

    def __add__(self, other: "BredonCochain") -> "BredonCochain":
        return self._combine(other, 1)

    def __sub__(self, other: "BredonCochain") -> "BredonCochain":
        return self._combine(other, -1)

    def __neg__(self) -> "BredonCochain":
        return BredonCochain(self.degree, {k: tuple(-x for x in v) for k, v in self.values.items()})

    def _combine(self, other: "BredonCochain", sign: int) -> "BredonCochain":
        if self.degree != other.degree:
            raise ValueError(f"cannot combine cochains of degree {self.degree} and {other.degree}")
        if self.values.keys() != other.values.keys():
            raise ValueError("cochains live on different cells")
        return BredonCochain(
            self.degree,
            {k: tuple(a + sign * b for a, b in zip(v, other.values[k])) for k, v in self.values.items()},
        )


@dataclass(frozen=True)
class CohomologyReport:
    degree: int
    invariants: GroupInvariants
    rank_in: int
    rank_out: int
    seconds: float = field(default=0.0, compare=False)

    def __str__(self) -> str:
        return f"H^{self.degree}: {self.invariants}"


class BredonComplex:
    """``C^*_H(B; M)`` in reduced form with coboundary matrices.

    Coordinates of ``C^n`` are the generators of ``M(G/G_sigma)`` for the
    orbit ``n``-cells ``sigma`` in canonical order.
    """

    def __init__(self, space: GCWComplex, system: CoefficientSystem):
        if space.family.members != system.family.members:
            raise ValueError("complex and coefficient system use different families")
        self.space = space
        self.system = system
        self._coboundaries: dict[int, IntMatrix] = {}

    @property
    def top(self) -> int:
        return self.space.dimension

    def cells(self, n: int) -> list[OrbitCell]:
        return self.space.cells_of_dim(n)

    def _value(self, cell: OrbitCell) -> PresentedAbelianGroup:
        return self.system.value(cell.isotropy)

    def offsets(self, n: int) -> dict[str, tuple[int, int]]:
        out = {}
        pos = 0
        for c in self.cells(n):
            g = self._value(c).gens
            out[c.id] = (pos, pos + g)
            pos += g
        return out

    def group(self, n: int) -> PresentedAbelianGroup:
        return direct_sum([self._value(c) for c in self.cells(n)])

    def coboundary_matrix(self, n: int) -> IntMatrix:
        """``delta^n: C^n -> C^{n+1}``; block ``(sigma, tau)`` is ``sum_i n_i M(a_i)``."""
        if n in self._coboundaries:
            return self._coboundaries[n]
        src = self.offsets(n)
        dst = self.offsets(n + 1)
        rows = self.group(n + 1).gens
        cols = self.group(n).gens
        mat = zeros(rows, cols)
        for sigma in self.cells(n + 1):
            r0, r1 = dst[sigma.id]
            for term in self.space.boundary[sigma.id]:
                c0, c1 = src[term.face.id]
                mat[r0:r1, c0:c1] += term.coeff * self.system.map(term.translate)
        self._coboundaries[n] = mat
        return mat

    # -- cochain <-> vector ----------------------------------------------------

    def vector(self, f: BredonCochain) -> IntMatrix:
        offs = self.offsets(f.degree)
        unknown = set(f.values) - set(offs)
        if unknown:
            raise ValueError(f"cochain of degree {f.degree} has values on unknown cells {sorted(unknown)}")
        out = zeros(self.group(f.degree).gens, 1)
        for cid, (a, b) in offs.items():
            v = f.values.get(cid, (0,) * (b - a))
            if len(v) != b - a:
                raise ValueError(f"value on {cid} has {len(v)} entries, expected {b - a}")
            out[a:b, 0] = list(v)
        return out

    def cochain(self, vec: IntMatrix, n: int) -> BredonCochain:
        return BredonCochain(
            n, {cid: tuple(int(x) for x in vec[a:b, 0]) for cid, (a, b) in self.offsets(n).items()}
        )

    def zero(self, n: int) -> BredonCochain:
        return self.cochain(zeros(self.group(n).gens, 1), n)

    def nonzero_cells(self, f: BredonCochain) -> list[str]:
        """Cells on which ``f`` is nonzero modulo the relations of the value group."""
        out = []
        for c in self.cells(f.degree):
            v = f.values.get(c.id)
            if v is not None and not self._value(c).is_zero(column(v)):
                out.append(c.id)
        return out

    def is_zero(self, f: BredonCochain) -> bool:
        return not self.nonzero_cells(f)

    # -- operations ---------------------------------------------------------------

    def coboundary(self, f: BredonCochain) -> BredonCochain:
        return self.cochain(matmul(self.coboundary_matrix(f.degree), self.vector(f)), f.degree + 1)

    def expand(self, f: BredonCochain, h: Subgroup) -> IntMatrix:
        """``f(H)`` as a ``M(G/H).gens x rank C_n(B^H)`` matrix."""
        basis = self.space.fixed_basis(h, f.degree)
        vec = self.vector(f)
        offs = self.offsets(f.degree)
        out = zeros(self.system.value(h).gens, basis.rank)
        for j, (tau, mor) in enumerate(basis.basis):
            a, b = offs[tau.id]
            out[:, j] = matmul(self.system.map(mor), vec[a:b])[:, 0]
        return out

    def check_square(self) -> None:
        for n in range(-1, self.top):
            prod = matmul(self.coboundary_matrix(n + 1), self.coboundary_matrix(n))
            offs = self.offsets(n + 2)
            for c in self.cells(n + 2):
                a, b = offs[c.id]
                grp = self._value(c)
                bad = grp.nonzero_columns(prod[a:b])
                if bad:
                    raise NotACoChainComplex(n, c.id)

    def cycles(self, n: int) -> IntMatrix:
        return preimage(self.coboundary_matrix(n), self.group(n + 1).relations)

    def boundaries(self, n: int) -> IntMatrix:
        grp = self.group(n)
        return hstack([self.coboundary_matrix(n - 1), grp.relations], grp.gens)

    def cohomology_quotient(self, n: int) -> Subquotient:
        return Subquotient(self.cycles(n), self.boundaries(n))

    def cohomology(self, n: int) -> CohomologyReport:
        start = time.perf_counter()
        inv = self.cohomology_quotient(n).invariants
        return CohomologyReport(
            degree=n,
            invariants=inv,
            rank_in=rank(self.coboundary_matrix(n - 1)),
            rank_out=rank(self.coboundary_matrix(n)),
            seconds=time.perf_counter() - start,
        )


def cochain_complex(space: GCWComplex, system: CoefficientSystem) -> BredonComplex:
    space.require_valid()
    system.require_functorial()
    cx = BredonComplex(space, system)
    cx.check_square()
    return cx


def coboundary(cx: BredonComplex, f: BredonCochain) -> BredonCochain:
    return cx.coboundary(f)


def expand(cx: BredonComplex, f: BredonCochain, h: Subgroup) -> IntMatrix:
    return cx.expand(f, h)


def cohomology(space: GCWComplex, system: CoefficientSystem, n: int) -> CohomologyReport:
    return cochain_complex(space, system).cohomology(n)


# ---------------------------------------------------------------------------
# literal compatible-family construction


@dataclass(frozen=True, eq=False)
class AmbientLayout:
    """Coordinates of ``prod_H Hom(C_n(B^H), M(G/H))``."""

    degree: int
    blocks: tuple[tuple[Subgroup, int, int, int], ...]  # (H, start, rank, gens)

    @cached_property
    def start(self) -> dict[Subgroup, int]:
        return {h: s for h, s, _, _ in self.blocks}

    @property
    def size(self) -> int:
        if not self.blocks:
            return 0
        _, s, r, g = self.blocks[-1]
        return s + r * g


@dataclass(frozen=True, eq=False)
class OracleGroup:
    """The compatible families in degree ``n``.

    ``lattice`` holds generators, in ambient coordinates, of the preimage of
    the compatible subgroup (it contains the ambient relations); ``group``
    presents the subgroup on those generators.
    """

    degree: int
    layout: AmbientLayout
    ambient: PresentedAbelianGroup
    lattice: IntMatrix
    group: PresentedAbelianGroup

    @property
    def embedding(self) -> IntMatrix:
        return self.lattice


def _layout(cx: BredonComplex, n: int) -> AmbientLayout:
    blocks = []
    pos = 0
    for h in cx.space.family:
        r = cx.space.fixed_basis(h, n).rank
        g = cx.system.value(h).gens
        blocks.append((h, pos, r, g))
        pos += r * g
    return AmbientLayout(n, tuple(blocks))


def _ambient_group(cx: BredonComplex, layout: AmbientLayout) -> PresentedAbelianGroup:
    parts = []
    for h, _, r, _ in layout.blocks:
        parts.extend([cx.system.value(h)] * r)
    return direct_sum(parts) if parts else PresentedAbelianGroup(0)


def _compatibility(cx: BredonComplex, n: int, layout: AmbientLayout) -> tuple[IntMatrix, IntMatrix]:
    """Matrix of ``f -> (f(H) o a_* - M(a) o f(K))_a`` and the target relations."""
    rows = []
    rels = []
    space, system = cx.space, cx.system
    for a in space.category.morphisms:
        h, k = a.source, a.target
        gh = system.value(h).gens
        rk = space.fixed_basis(k, n).rank
        if gh == 0 or rk == 0:
            continue
        trans = space.translation_chain_map(h, k, a, n)  # C_n(B^K) -> C_n(B^H)
        ma = system.map(a)
        block = zeros(rk * gh, layout.size)
        sh, sk = layout.start[h], layout.start[k]
        gk = system.value(k).gens
        for y in range(rk):
            r0 = y * gh
            for x in range(trans.shape[0]):
                t = trans[x, y]
                if t:
                    c0 = sh + x * gh
                    for i in range(gh):
                        block[r0 + i, c0 + i] += t
            c0 = sk + y * gk
            block[r0 : r0 + gh, c0 : c0 + gk] -= ma
        rows.append(block)
        rels.extend([system.value(h).relations] * rk)
    mat = vstack(rows, layout.size)
    return mat, block_diagonal(rels) if rels else zeros(0, 0)


def _ambient_coboundary(cx: BredonComplex, src: AmbientLayout, dst: AmbientLayout) -> IntMatrix:
    """``(delta f)(H)(y) = f(H)(dy)`` in ambient coordinates."""
    mat = zeros(dst.size, src.size)
    for (h, s0, r0, g), (_, d0, r1, _) in zip(src.blocks, dst.blocks):
        if g == 0:
            continue
        bd = cx.space.boundary_matrix(h, dst.degree)  # C_{n+1}(B^H) -> C_n(B^H)
        for y in range(r1):
            for x in range(r0):
                t = bd[x, y]
                if t:
                    for i in range(g):
                        mat[d0 + y * g + i, s0 + x * g + i] += t
    return mat


def _expansion(cx: BredonComplex, layout: AmbientLayout) -> IntMatrix:
    """Reduced ``C^n`` into ambient coordinates, ``f -> (f(H))_H``."""
    n = layout.degree
    offs = cx.offsets(n)
    mat = zeros(layout.size, cx.group(n).gens)
    for h, s, _, g in layout.blocks:
        for x, (tau, mor) in enumerate(cx.space.fixed_basis(h, n).basis):
            c0, c1 = offs[tau.id]
            mat[s + x * g : s + (x + 1) * g, c0:c1] = cx.system.map(mor)
    return mat


def submodule_oracle(cx: BredonComplex, n: int) -> OracleGroup:
    layout = _layout(cx, n)
    ambient = _ambient_group(cx, layout)
    compat, target_rel = _compatibility(cx, n, layout)
    if compat.shape[0]:
        lattice = preimage(compat, target_rel)
    else:
        lattice = preimage(zeros(0, layout.size), zeros(0, 0))
    group = PresentedAbelianGroup(lattice.shape[1], preimage(lattice, ambient.relations))
    return OracleGroup(n, layout, ambient, lattice, group)


def oracle_cohomology(cx: BredonComplex, n: int) -> GroupInvariants:
    """Cohomology computed entirely in the literal compatible-family complex."""
    here = _layout(cx, n)
    above = _layout(cx, n + 1)
    amb_here = _ambient_group(cx, here)
    amb_above = _ambient_group(cx, above)
    compat, target_rel = _compatibility(cx, n, here)
    delta = _ambient_coboundary(cx, here, above)
    stacked = vstack([compat, delta], here.size)
    rel = block_diagonal([target_rel, amb_above.relations])
    cycles = preimage(stacked, rel)
    if n > 0:
        below = submodule_oracle(cx, n - 1)
        incoming = matmul(_ambient_coboundary(cx, below.layout, here), below.lattice)
    else:
        incoming = zeros(here.size, 0)
    boundaries = hstack([incoming, amb_here.relations], here.size)
    return Subquotient(cycles, boundaries).invariants


@dataclass(frozen=True)
class YonedaCheck:
    degree: int
    reduced: GroupInvariants
    oracle: GroupInvariants
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures and self.reduced == self.oracle


def yoneda_check(cx: BredonComplex, n: int) -> YonedaCheck:
    """Compare reduced ``C^n`` with the literal compatible families.

    Checks that expansion lands in the compatible subgroup, is onto it modulo
    relations, is injective modulo relations, and intertwines the two
    coboundaries.
    """
    failures = []
    oracle = submodule_oracle(cx, n)
    amb = oracle.ambient
    E = _expansion(cx, oracle.layout)
    span = hstack([E, amb.relations], amb.gens)
    if outside_span(oracle.lattice, span):
        failures.append("expansion leaves the compatible subgroup")
    if outside_span(span, oracle.lattice):
        failures.append("expansion misses part of the compatible subgroup")
    reduced_group = cx.group(n)
    kernel = preimage(E, amb.relations)
    if outside_span(reduced_group.relations, kernel):
        failures.append("expansion is not injective modulo relations")
    above = _layout(cx, n + 1)
    E1 = _expansion(cx, above)
    lhs = matmul(_ambient_coboundary(cx, oracle.layout, above), E)
    rhs = matmul(E1, cx.coboundary_matrix(n))
    if _ambient_group(cx, above).nonzero_columns(lhs - rhs):
        failures.append("expansion does not intertwine the coboundaries")
    return YonedaCheck(n, reduced_group.invariants, oracle.group.invariants, tuple(failures))
