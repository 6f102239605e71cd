"""Exact linear algebra over the integers.

Matrices are numpy arrays of dtype ``object`` holding Python ints, so every
entry is arbitrary precision. Vectors act as columns: a homomorphism
``Z^n -> Z^m`` is an ``m x n`` matrix.

Two elimination routines live here. :func:`smith` is the full two-sided
Smith normal form and is used for invariants and for :func:`solve`.
:func:`column_echelon` only performs column operations; it is cheaper and
backs kernels, lattice bases and membership tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

IntMatrix = np.ndarray


class NoSolution(Exception):
    """Raised by :func:`solve` when ``A x = b`` has no integer solution.

    ``coordinate`` is the index of the offending entry of ``U b`` after Smith
    reduction ``U A V = D``, ``value`` that entry and ``divisor`` the diagonal
    entry of ``D`` it fails to be divisible by (0 past the rank).
    """

    def __init__(self, coordinate: int, value: int, divisor: int):
        self.coordinate = coordinate
        self.value = value
        self.divisor = divisor
        if divisor:
            why = f"is not divisible by {divisor}"
        else:
            why = "lies outside the column space"
        super().__init__(f"no integer solution: transformed coordinate {coordinate} = {value} {why}")


class NotAComplex(Exception):
    def __init__(self, generator: int, residue: Sequence[int]):
        self.generator = generator
        self.residue = tuple(residue)
        super().__init__(
            f"composite is nonzero on generator {generator}: {list(self.residue)}"
        )


# ---------------------------------------------------------------------------
# matrix helpers


def int_matrix(rows: Iterable[Iterable[int]] | np.ndarray, shape: tuple[int, int] | None = None) -> IntMatrix:
    """Build an object-dtype integer matrix. ``shape`` is needed for empty input."""
    if isinstance(rows, np.ndarray):
        if rows.ndim != 2:
            raise ValueError("expected a 2-dimensional array")
        out = zeros(*rows.shape)
        for (i, j), x in np.ndenumerate(rows):
            out[i, j] = int(x)
        return out
    data = [[int(x) for x in row] for row in rows]
    if not data:
        if shape is None:
            raise ValueError("shape is required for an empty matrix")
        return zeros(*shape)
    width = len(data[0])
    if any(len(row) != width for row in data):
        raise ValueError("ragged matrix")
    if shape is not None and shape != (len(data), width):
        raise ValueError(f"expected shape {shape}, got {(len(data), width)}")
    out = np.empty((len(data), width), dtype=object)
    for i, row in enumerate(data):
        for j, x in enumerate(row):
            out[i, j] = x
    return out


def zeros(rows: int, cols: int) -> IntMatrix:
    out = np.empty((rows, cols), dtype=object)
    out.fill(0)
    return out


def identity(n: int) -> IntMatrix:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def column(values: Sequence[int]) -> IntMatrix:
    return int_matrix([[int(v)] for v in values], shape=(len(values), 1))


def hstack(blocks: Sequence[IntMatrix], rows: int) -> IntMatrix:
    blocks = [b for b in blocks if b.shape[1]]
    if not blocks:
        return zeros(rows, 0)
    return np.concatenate(blocks, axis=1)


def vstack(blocks: Sequence[IntMatrix], cols: int) -> IntMatrix:
    blocks = [b for b in blocks if b.shape[0]]
    if not blocks:
        return zeros(0, cols)
    return np.concatenate(blocks, axis=0)


def block_diagonal(blocks: Sequence[IntMatrix]) -> IntMatrix:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    return a @ b


def is_zero_matrix(a: IntMatrix) -> bool:
    return not any(x != 0 for x in a.flat)


def to_lists(a: IntMatrix) -> list[list[int]]:
    return [[int(x) for x in row] for row in a.tolist()]


def determinant(a: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    m = [[int(x) for x in row] for row in a.tolist()]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True, eq=False)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal.

    ``U_inv`` is the exact inverse of ``U``; it is tracked alongside so that
    lattice bases can be read off without a second elimination.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix

    @cached_property
    def diagonal(self) -> tuple[int, ...]:
        k = min(self.D.shape)
        return tuple(int(self.D[i, i]) for i in range(k))

    @cached_property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _argmin_nonzero(sub: IntMatrix) -> tuple[int, int] | None:
    # first entry of least nonzero magnitude in row-major order
    mags = np.abs(sub)
    nonzero = mags != 0
    if not nonzero.any():
        return None
    masked = np.where(nonzero, mags, mags.max() + 1)
    flat = int(np.argmin(masked))
    return divmod(flat, sub.shape[1])


def smith(a: IntMatrix, transforms: bool = True) -> SmithDecomposition:
    """Smith normal form with transforms.

    Pivots are chosen as the nonzero entry of smallest magnitude in the
    remaining block, ties broken by lowest row and then lowest column. With
    ``transforms=False`` only ``D`` is meaningful; ``U``, ``V`` and ``U_inv``
    are left as identities.
    """
    m, n = a.shape
    D = a.copy()
    U = identity(m)
    U_inv = identity(m)
    V = identity(n)

    def swap_rows(i: int, j: int) -> None:
        if i == j:
            return
        D[[i, j]] = D[[j, i]]
        if transforms:
            U[[i, j]] = U[[j, i]]
            U_inv[:, [i, j]] = U_inv[:, [j, i]]

    def swap_cols(i: int, j: int) -> None:
        if i == j:
            return
        D[:, [i, j]] = D[:, [j, i]]
        if transforms:
            V[:, [i, j]] = V[:, [j, i]]

    def add_row(dst: int, src: int, q: int) -> None:
        # row_dst += q * row_src
        D[dst] += q * D[src]
        if transforms:
            U[dst] += q * U[src]
            U_inv[:, src] -= q * U_inv[:, dst]

    def add_col(dst: int, src: int, q: int) -> None:
        D[:, dst] += q * D[:, src]
        if transforms:
            V[:, dst] += q * V[:, src]

    for t in range(min(m, n)):
        while True:
            pos = _argmin_nonzero(D[t:, t:])
            if pos is None:
                break
            swap_rows(t, t + pos[0])
            swap_cols(t, t + pos[1])
            p = D[t, t]
            dirty = False
            for i in range(t + 1, m):
                if D[i, t] != 0:
                    q = D[i, t] // p
                    if q:
                        add_row(i, t, -q)
                    if D[i, t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if D[t, j] != 0:
                    q = D[t, j] // p
                    if q:
                        add_col(j, t, -q)
                    if D[t, j] != 0:
                        dirty = True
            if dirty:
                continue
            rest = D[t + 1 :, t + 1 :]
            if rest.size == 0:
                break
            offenders = np.nonzero((rest % p != 0).any(axis=1))[0]
            if offenders.size == 0:
                break
            add_row(t, t + 1 + int(offenders[0]), 1)
        if t < m and t < n and D[t, t] < 0:
            D[t] = -D[t]
            if transforms:
                U[t] = -U[t]
                U_inv[:, t] = -U_inv[:, t]
    return SmithDecomposition(U=U, D=D, V=V, U_inv=U_inv)


def invariant_factors(a: IntMatrix) -> tuple[int, ...]:
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    return tuple(d for d in smith(a, transforms=False).diagonal if d != 0)


def solve(a: IntMatrix, b: Sequence[int] | IntMatrix) -> IntMatrix:
    """Return an integer column ``x`` with ``a @ x == b``.

    Raises :class:`NoSolution` carrying the failing transformed coordinate.
    """
    b = _as_column(b)
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"right-hand side has {b.shape[0]} rows, matrix has {a.shape[0]}")
    snf = smith(a)
    ub = matmul(snf.U, b)
    y = zeros(a.shape[1], 1)
    diag = snf.diagonal
    for i in range(a.shape[0]):
        d = diag[i] if i < len(diag) else 0
        v = ub[i, 0]
        if d == 0:
            if v != 0:
                raise NoSolution(i, int(v), 0)
        elif v % d != 0:
            raise NoSolution(i, int(v), d)
        else:
            y[i, 0] = v // d
    x = matmul(snf.V, y)
    assert (matmul(a, x) == b).all()
    return x


def _as_column(b: Sequence[int] | IntMatrix) -> IntMatrix:
    if isinstance(b, np.ndarray):
        if b.ndim == 1:
            return column(list(b))
        return b
    return column(list(b))


# ---------------------------------------------------------------------------
# column echelon and lattices


@dataclass(frozen=True, eq=False)
class ColumnEchelon:
    """``A @ V == E`` with ``V`` unimodular.

    The first ``rank`` columns of ``E`` are in echelon form with pivot rows
    ``pivots`` (strictly increasing); the remaining columns are zero.
    """

    E: IntMatrix
    V: IntMatrix
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def kernel(self) -> IntMatrix:
        return self.V[:, self.rank :]

    def basis(self) -> IntMatrix:
        return self.E[:, : self.rank]


def column_echelon(a: IntMatrix) -> ColumnEchelon:
    m, n = a.shape
    E = a.copy()
    V = identity(n)
    pivots: list[int] = []
    piv = 0
    for i in range(m):
        if piv == n:
            break
        while True:
            row = E[i]
            best = None
            best_val = None
            count = 0
            for j in range(piv, n):
                x = row[j]
                if x != 0:
                    count += 1
                    ax = -x if x < 0 else x
                    if best_val is None or ax < best_val:
                        best_val, best = ax, j
            if count <= 1:
                break
            p = E[i, best]
            for j in range(piv, n):
                if j != best and E[i, j] != 0:
                    q = E[i, j] // p
                    E[:, j] -= q * E[:, best]
                    V[:, j] -= q * V[:, best]
        if best is None:
            continue
        if best != piv:
            E[:, [piv, best]] = E[:, [best, piv]]
            V[:, [piv, best]] = V[:, [best, piv]]
        pivots.append(i)
        piv += 1
    return ColumnEchelon(E=E, V=V, pivots=tuple(pivots))


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Columns form a basis of ``{x : a @ x == 0}``."""
    return column_echelon(a).kernel()


def rank(a: IntMatrix) -> int:
    return column_echelon(a).rank


def lattice_basis(gens: IntMatrix) -> IntMatrix:
    """Linearly independent columns spanning the same lattice as ``gens``."""
    return column_echelon(gens).basis()


def preimage(a: IntMatrix, target: IntMatrix) -> IntMatrix:
    """Generators of ``{x : a @ x in colspan(target)}``.

    The result contains the kernel of ``a``; columns are a lattice basis.
    """
    n = a.shape[1]
    stacked = hstack([a, target], a.shape[0])
    ker = kernel_basis(stacked)
    return lattice_basis(ker[:n])


def in_span(gens: IntMatrix, v: Sequence[int] | IntMatrix) -> bool:
    v = _as_column(v)
    if gens.shape[1] == 0:
        return is_zero_matrix(v)
    try:
        solve(gens, v)
    except NoSolution:
        return False
    return True


def outside_span(gens: IntMatrix, vectors: IntMatrix) -> list[int]:
    """Indices of the columns of ``vectors`` not in the lattice spanned by ``gens``."""
    ech = column_echelon(gens)
    return [j for j in range(vectors.shape[1]) if _echelon_coordinates(ech, vectors[:, j : j + 1]) is None]


def _echelon_coordinates(ech: ColumnEchelon, v: IntMatrix) -> IntMatrix | None:
    """Coordinates ``c`` with ``basis @ c == v`` or ``None`` when ``v`` is outside."""
    basis = ech.basis()
    r = ech.rank
    c = zeros(r, 1)
    resid = v.copy()
    for k, row in enumerate(ech.pivots):
        p = basis[row, k]
        x = resid[row, 0]
        if x % p != 0:
            return None
        q = x // p
        c[k, 0] = q
        if q:
            resid[:, 0] -= q * basis[:, k]
    if not is_zero_matrix(resid):
        return None
    return c


# ---------------------------------------------------------------------------
# presented abelian groups


@dataclass(frozen=True)
class GroupInvariants:
    """Isomorphism type ``Z^free_rank + Z/t_1 + ... + Z/t_k`` with ``t_1 | t_2 | ...``."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


def invariants_of_relations(gens: int, relations: IntMatrix) -> GroupInvariants:
    diag = invariant_factors(relations) if relations.size else ()
    return GroupInvariants(
        free_rank=gens - len(diag),
        torsion=tuple(d for d in diag if d != 1),
    )


@dataclass(frozen=True, eq=False)
class PresentedAbelianGroup:
    """``Z^gens / colspan(relations)``; ``relations`` has ``gens`` rows."""

    gens: int
    relations: IntMatrix = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.relations is None:
            object.__setattr__(self, "relations", zeros(self.gens, 0))
        if self.relations.shape[0] != self.gens:
            raise ValueError(
                f"relation matrix has {self.relations.shape[0]} rows for {self.gens} generators"
            )

    @classmethod
    def free(cls, rank: int) -> "PresentedAbelianGroup":
        return cls(rank)

    @classmethod
    def cyclic(cls, order: int) -> "PresentedAbelianGroup":
        return cls(1, int_matrix([[order]]))

    @classmethod
    def from_invariants(cls, free_rank: int, torsion: Sequence[int] = ()) -> "PresentedAbelianGroup":
        gens = free_rank + len(torsion)
        rel = zeros(gens, len(torsion))
        for k, t in enumerate(torsion):
            rel[free_rank + k, k] = t
        return cls(gens, rel)

    @cached_property
    def _relation_snf(self) -> SmithDecomposition:
        return smith(self.relations)

    @cached_property
    def invariants(self) -> GroupInvariants:
        return invariants_of_relations(self.gens, self.relations)

    def is_zero(self, v: Sequence[int] | IntMatrix) -> bool:
        v = _as_column(v)
        if self.relations.shape[1] == 0:
            return is_zero_matrix(v)
        snf = self._relation_snf
        uv = matmul(snf.U, v)
        diag = snf.diagonal
        for i in range(self.gens):
            d = diag[i] if i < len(diag) else 0
            x = uv[i, 0]
            if d == 0:
                if x != 0:
                    return False
            elif x % d != 0:
                return False
        return True

    def equal(self, u: Sequence[int] | IntMatrix, v: Sequence[int] | IntMatrix) -> bool:
        return self.is_zero(_as_column(u) - _as_column(v))

    def nonzero_columns(self, a: IntMatrix) -> list[int]:
        """Indices of columns of ``a`` that are nonzero modulo relations."""
        return [j for j in range(a.shape[1]) if not self.is_zero(a[:, j : j + 1])]


def direct_sum(groups: Sequence[PresentedAbelianGroup]) -> PresentedAbelianGroup:
    gens = sum(g.gens for g in groups)
    return PresentedAbelianGroup(gens, block_diagonal([g.relations for g in groups]))


@dataclass(frozen=True, eq=False)
class Homomorphism:
    """A homomorphism of presented groups given on generators."""

    matrix: IntMatrix
    source: PresentedAbelianGroup
    target: PresentedAbelianGroup

    def __post_init__(self) -> None:
        if self.matrix.shape != (self.target.gens, self.source.gens):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{self.source.gens} -> {self.target.gens}"
            )

    def relation_violations(self) -> list[int]:
        """Relators of the source whose image is nonzero in the target."""
        return self.target.nonzero_columns(matmul(self.matrix, self.source.relations))


@dataclass(frozen=True, eq=False)
class Subquotient:
    """``colspan(numerator) / colspan(denominator)`` with coordinates.

    ``class_of`` maps a vector of the numerator lattice to its coordinates
    against the cyclic decomposition reported by ``invariants``: one entry
    per torsion factor (reduced modulo it) followed by the free coordinates.
    """

    numerator: IntMatrix
    denominator: IntMatrix

    @cached_property
    def _echelon(self) -> ColumnEchelon:
        return column_echelon(self.numerator)

    @cached_property
    def _relations(self) -> IntMatrix:
        ech = self._echelon
        rel = zeros(ech.rank, self.denominator.shape[1])
        for j in range(self.denominator.shape[1]):
            c = _echelon_coordinates(ech, self.denominator[:, j : j + 1])
            if c is None:
                raise ValueError(f"denominator column {j} is not in the numerator lattice")
            rel[:, j] = c[:, 0]
        return rel

    @cached_property
    def _snf(self) -> SmithDecomposition:
        return smith(self._relations)

    @cached_property
    def invariants(self) -> GroupInvariants:
        return invariants_of_relations(self._echelon.rank, self._relations)

    def class_of(self, v: Sequence[int] | IntMatrix) -> tuple[int, ...]:
        c = _echelon_coordinates(self._echelon, _as_column(v))
        if c is None:
            raise ValueError("vector is not in the numerator lattice")
        snf = self._snf
        uc = matmul(snf.U, c)
        diag = snf.diagonal
        torsion = []
        free = []
        for i in range(uc.shape[0]):
            d = diag[i] if i < len(diag) else 0
            if d == 1:
                continue
            if d == 0:
                free.append(int(uc[i, 0]))
            else:
                torsion.append(int(uc[i, 0] % d))
        return tuple(torsion + free)


def homology_at(f: Homomorphism, g: Homomorphism) -> GroupInvariants:
    """Invariants of ``ker(g) / im(f)`` for ``X --f--> Y --g--> Z``.

    Raises :class:`NotAComplex` when ``g o f`` is nonzero modulo the
    relations of ``Z``.
    """
    if f.target.gens != g.source.gens:
        raise ValueError("f and g are not composable")
    y = g.source
    gf = matmul(g.matrix, f.matrix)
    for j in range(gf.shape[1]):
        if not g.target.is_zero(gf[:, j : j + 1]):
            raise NotAComplex(j, [int(x) for x in gf[:, j]])
    cycles = preimage(g.matrix, g.target.relations)
    boundaries = hstack([f.matrix, y.relations], y.gens)
    return subquotient_invariants(cycles, boundaries)


def subquotient_invariants(numerator: IntMatrix, denominator: IntMatrix) -> GroupInvariants:
    """Invariants of ``colspan(numerator) / colspan(denominator)``.

    Requires the denominator lattice to lie inside the numerator lattice.
    """
    return Subquotient(numerator, denominator).invariants
