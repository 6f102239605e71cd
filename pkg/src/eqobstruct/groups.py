"""Finite groups, subgroup families and the orbit category.

Elements are dense integer indices into a Cayley table. A morphism
``G/H -> G/K`` of the orbit category is the G-map sending ``H`` to ``aK``;
it exists iff ``a^-1 H a <= K`` and is stored with ``a`` replaced by the
smallest index in the coset ``aK``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class NotAGroup(ValueError):
    def __init__(self, axiom: str, witness: tuple[int, ...]):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"{axiom} fails at {witness}")


class CompositionMismatch(ValueError):
    pass


class InvalidMorphism(ValueError):
    pass


class UnknownSubgroup(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    order: int
    mul: tuple[tuple[int, ...], ...]
    identity: int
    inv: tuple[int, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.names:
            object.__setattr__(self, "names", tuple(f"g{i}" for i in range(self.order)))

    @property
    def elements(self) -> range:
        return range(self.order)

    def m(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def product(self, *xs: int) -> int:
        out = self.identity
        for x in xs:
            out = self.mul[out][x]
        return out

    def conj(self, h: int, a: int) -> int:
        """``a^-1 h a``."""
        return self.mul[self.mul[self.inv[a]][h]][a]

    def name(self, g: int) -> str:
        return self.names[g]

    @cached_property
    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, (self.identity,))

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(self.elements))

    @cached_property
    def subgroups(self) -> tuple["Subgroup", ...]:
        """All subgroups, canonically ordered."""
        found = {self.trivial_subgroup.elements: self.trivial_subgroup}
        queue = deque([self.trivial_subgroup])
        while queue:
            s = queue.popleft()
            members = set(s.elements)
            for g in self.elements:
                if g in members:
                    continue
                t = subgroup_generated(self, list(s.generators) + [g])
                if t.elements not in found:
                    found[t.elements] = t
                    queue.append(t)
        return tuple(sorted(found.values(), key=Subgroup.sort_key))


def group_from_table(mul_table: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> FiniteGroup:
    """Validate a Cayley table and derive identity and inverses."""
    n = len(mul_table)
    if n == 0:
        raise NotAGroup("nonempty", ())
    for i, row in enumerate(mul_table):
        if len(row) != n:
            raise NotAGroup("square table", (i,))
        for j, x in enumerate(row):
            if not 0 <= x < n:
                raise NotAGroup("closure", (i, j))
    mul = tuple(tuple(int(x) for x in row) for row in mul_table)
    for i in range(n):
        if len(set(mul[i])) != n:
            raise NotAGroup("latin rows", (i,))
        if len({mul[k][i] for k in range(n)}) != n:
            raise NotAGroup("latin columns", (i,))
    ident = next((e for e in range(n) if all(mul[e][x] == x and mul[x][e] == x for x in range(n))), None)
    if ident is None:
        raise NotAGroup("identity", ())
    inv = []
    for g in range(n):
        h = mul[g].index(ident)
        if mul[h][g] != ident:
            raise NotAGroup("inverse", (g,))
        inv.append(h)
    for a in range(n):
        ra = mul[a]
        for b in range(n):
            ab = ra[b]
            rb = mul[b]
            rab = mul[ab]
            for c in range(n):
                if rab[c] != ra[rb[c]]:
                    raise NotAGroup("associativity", (a, b, c))
    if names is not None and len(names) != n:
        raise ValueError("one name per element is required")
    return FiniteGroup(n, mul, ident, tuple(inv), tuple(names) if names else ())


def group_from_permutations(generators: Mapping[str, Sequence[int]]) -> FiniteGroup:
    """Generate a permutation group and lower it to a Cayley table.

    The product ``g*h`` is the permutation ``x -> g(h(x))``. Elements are
    numbered in breadth-first order from the identity, multiplying by the
    generators (sorted by name) on the right, and are named by the word that
    first reached them (``"e"`` for the identity, ``"r*s"`` and so on).
    """
    if not generators:
        return group_from_table([[0]], ["e"])
    degree = {len(p) for p in generators.values()}
    if len(degree) != 1:
        raise ValueError("generators act on sets of different sizes")
    (deg,) = degree
    gens = sorted(generators.items())
    for gname, perm in gens:
        if sorted(perm) != list(range(deg)):
            raise ValueError(f"generator {gname!r} is not a permutation of 0..{deg - 1}")
    ident = tuple(range(deg))
    index = {ident: 0}
    perms = [ident]
    names = ["e"]
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for gname, g in gens:
            q = tuple(p[g[x]] for x in range(deg))
            if q not in index:
                index[q] = len(perms)
                perms.append(q)
                word = gname if p == ident else f"{names[index[p]]}*{gname}"
                names.append(word)
                queue.append(q)
    table = [[index[tuple(p[q[x]] for x in range(deg))] for q in perms] for p in perms]
    return group_from_table(table, names)


def cyclic_group(n: int) -> FiniteGroup:
    return group_from_table([[(i + j) % n for j in range(n)] for i in range(n)])


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup = field(compare=False, repr=False)
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(sorted(set(self.elements))))

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in self._set

    def __le__(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def __lt__(self, other: "Subgroup") -> bool:
        return self._set < other._set

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.elements)

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily in index order."""
        gens: list[int] = []
        span = {self.parent.identity}
        for g in self.elements:
            if g not in span:
                gens.append(g)
                span = set(subgroup_generated(self.parent, gens).elements)
        return tuple(gens)

    def conjugate(self, a: int) -> "Subgroup":
        """``H^a = a^-1 H a``."""
        return Subgroup(self.parent, tuple(self.parent.conj(h, a) for h in self.elements))

    def sort_key(self) -> tuple:
        return (self.order, self.elements)

    def label(self) -> str:
        names = self.parent.names
        return "{" + ",".join(names[g] for g in self.elements) + "}"

    def is_subgroup(self) -> bool:
        g = self.parent
        if g.identity not in self:
            return False
        return all(g.mul[a][g.inv[b]] in self for a in self.elements for b in self.elements)


def subgroup_generated(group: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    gens = sorted(set(gens))
    seen = {group.identity}
    queue = deque([group.identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = group.mul[x][g]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return Subgroup(group, tuple(seen))


@dataclass(frozen=True)
class SubgroupFamily:
    members: tuple[Subgroup, ...]

    def __post_init__(self) -> None:
        uniq = {h.elements: h for h in self.members}
        object.__setattr__(self, "members", tuple(sorted(uniq.values(), key=Subgroup.sort_key)))

    def __contains__(self, h: Subgroup) -> bool:
        return h in self._set

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    @cached_property
    def _set(self) -> frozenset[Subgroup]:
        return frozenset(self.members)

    @property
    def group(self) -> FiniteGroup:
        return self.members[0].parent

    def closure_defects(self) -> list[tuple[str, Subgroup]]:
        """Conjugates and subgroups of members that are missing from the family."""
        out = []
        for h in self.members:
            for a in h.parent.elements:
                c = h.conjugate(a)
                if c not in self:
                    out.append(("conjugate", c))
            for s in h.parent.subgroups:
                if s <= h and s not in self:
                    out.append(("subgroup", s))
        return out


def close_family(group: FiniteGroup, seeds: Iterable[Subgroup]) -> SubgroupFamily:
    """Smallest family containing ``seeds`` closed under conjugation and subgroups."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("a family needs at least one seed subgroup")
    conjugates = {h.conjugate(a) for h in seeds for a in group.elements}
    members = {s for s in group.subgroups if any(s <= h for h in conjugates)}
    return SubgroupFamily(tuple(members))


def all_subgroups_family(group: FiniteGroup) -> SubgroupFamily:
    return SubgroupFamily(group.subgroups)


# ---------------------------------------------------------------------------
# orbit category


@dataclass(frozen=True)
class OrbitMorphism:
    """The G-map ``G/source -> G/target`` sending ``source`` to ``coset_rep * target``."""

    source: Subgroup
    target: Subgroup
    coset_rep: int

    @property
    def group(self) -> FiniteGroup:
        return self.source.parent

    @property
    def is_valid(self) -> bool:
        g = self.group
        a = self.coset_rep
        return all(g.conj(h, a) in self.target for h in self.source.elements)

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and self.coset_rep in self.target

    def sort_key(self) -> tuple:
        return (self.source.sort_key(), self.target.sort_key(), self.coset_rep)

    def describe(self) -> str:
        return f"{self.source.label()} -> {self.target.label()} via {self.group.name(self.coset_rep)}"


def canonical_rep(target: Subgroup, a: int) -> int:
    g = target.parent
    return min(g.mul[a][k] for k in target.elements)


def orbit_morphism(source: Subgroup, target: Subgroup, a: int, check: bool = True) -> OrbitMorphism:
    f = OrbitMorphism(source, target, canonical_rep(target, a))
    if check and not f.is_valid:
        raise InvalidMorphism(
            f"{source.parent.name(a)}^-1 {source.label()} {source.parent.name(a)} "
            f"is not contained in {target.label()}"
        )
    return f


def identity_morphism(h: Subgroup) -> OrbitMorphism:
    return OrbitMorphism(h, h, canonical_rep(h, h.parent.identity))


def hom_set(source: Subgroup, target: Subgroup) -> list[OrbitMorphism]:
    g = source.parent
    reps = set()
    for a in g.elements:
        if all(g.conj(h, a) in target for h in source.elements):
            reps.add(canonical_rep(target, a))
    return [OrbitMorphism(source, target, a) for a in sorted(reps)]


def compose(f: OrbitMorphism, g: OrbitMorphism) -> OrbitMorphism:
    """``f: G/H -> G/K`` followed by ``g: G/K -> G/L``; coset ``(a_f a_g) L``."""
    if f.target != g.source:
        raise CompositionMismatch(f"cannot compose {f.describe()} with {g.describe()}")
    grp = f.group
    return OrbitMorphism(f.source, g.target, canonical_rep(g.target, grp.mul[f.coset_rep][g.coset_rep]))


def conjugation_morphisms(h: Subgroup, a: int) -> tuple[OrbitMorphism, OrbitMorphism]:
    """The mutually inverse isomorphisms ``G/H -> G/H^a`` and ``G/H^a -> G/H``."""
    ha = h.conjugate(a)
    g = h.parent
    return orbit_morphism(h, ha, a), orbit_morphism(ha, h, g.inv[a])


class OrbitCategory:
    """Or_H(G) for a family H: finite, so hom-sets are enumerated eagerly on demand."""

    def __init__(self, family: SubgroupFamily):
        self.family = family
        self._homs: dict[tuple[Subgroup, Subgroup], list[OrbitMorphism]] = {}

    @property
    def objects(self) -> tuple[Subgroup, ...]:
        return self.family.members

    def hom(self, source: Subgroup, target: Subgroup) -> list[OrbitMorphism]:
        key = (source, target)
        if key not in self._homs:
            for h in key:
                if h not in self.family:
                    raise UnknownSubgroup(h.label())
            self._homs[key] = hom_set(source, target)
        return self._homs[key]

    @cached_property
    def morphisms(self) -> tuple[OrbitMorphism, ...]:
        return tuple(f for h in self.objects for k in self.objects for f in self.hom(h, k))

    @cached_property
    def composition_table(self) -> dict[tuple[OrbitMorphism, OrbitMorphism], OrbitMorphism]:
        table = {}
        by_source: dict[Subgroup, list[OrbitMorphism]] = {}
        for f in self.morphisms:
            by_source.setdefault(f.source, []).append(f)
        for f in self.morphisms:
            for g in by_source.get(f.target, ()):
                table[(f, g)] = compose(f, g)
        return table

    def composable_pairs(self) -> Iterable[tuple[OrbitMorphism, OrbitMorphism]]:
        return self.composition_table.keys()
