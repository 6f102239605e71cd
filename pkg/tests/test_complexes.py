import random
from pathlib import Path

import pytest

from eqobstruct import GCWComplex, OrbitCell, close_family, group_from_permutations, load_instance, make_term
from eqobstruct.complexes import InvalidComplex
from eqobstruct.groups import InvalidMorphism, orbit_morphism, subgroup_generated
from eqobstruct.zmodule import matmul
from oracles import lists
from random_instances import random_complex, random_family, random_group

INSTANCES = sorted((Path(__file__).parent.parent / "instances").glob("*.json"))


def z2():
    g = group_from_permutations({"s": [1, 0]})
    return g, close_family(g, [g.whole])


def kinds(space):
    return sorted(v.kind for v in space.validate())


@pytest.mark.parametrize("path", INSTANCES, ids=lambda p: p.stem)
def test_curated_complexes_are_valid(path):
    assert load_instance(path).complex.validate() == []


def test_reflection_circle_fixed_sets():
    space = load_instance(INSTANCES[[p.stem for p in INSTANCES].index("reflection_circle")]).complex
    g = space.group
    fixed0 = space.fixed_basis(g.whole, 0)
    assert [c.id for c, _ in fixed0.basis] == ["p", "q"]
    assert space.fixed_basis(g.whole, 1).rank == 0
    # the free edge contributes both of its translates to the underlying complex
    assert space.fixed_basis(g.trivial_subgroup, 1).rank == 2
    assert lists(space.boundary_matrix(g.trivial_subgroup, 1)) == [[-1, -1], [1, 1]]


def test_violation_kinds():
    g, fam = z2()
    one, whole = g.trivial_subgroup, g.whole
    p = OrbitCell("p", 0, whole)
    c = OrbitCell("c", 1, one)
    f = OrbitCell("f", 2, whole)
    assert kinds(GCWComplex(g, fam, [p, c], {"c": [make_term(1, one, p, 0)]})) == []
    # a cell fixed by G cannot have a free face
    bad_iso = GCWComplex(g, fam, [p, c, f], {"f": [make_term(1, whole, c, 0)]})
    assert "IsotropyViolation" in kinds(bad_iso)
    # faces must sit one dimension lower
    skip = GCWComplex(g, fam, [p, f], {"f": [make_term(1, whole, p, 0)]})
    assert kinds(skip) == ["DimensionMismatch"]
    # d(d(f)) = d(c) = p - s p  is nonzero in C_0
    e = OrbitCell("e", 2, one)
    sq = GCWComplex(g, fam, [p, c, e], {"c": [make_term(1, one, p, 0)], "e": [make_term(1, one, c, 0)]})
    assert kinds(sq) == ["BoundarySquareNonzero"]
    with pytest.raises(InvalidComplex):
        sq.require_valid()
    small = close_family(g, [one])
    outside = GCWComplex(g, small, [p], {})
    assert kinds(outside) == ["IsotropyNotInFamily"]


def test_duplicate_and_unknown_cells_rejected():
    g, fam = z2()
    p = OrbitCell("p", 0, g.whole)
    with pytest.raises(ValueError):
        GCWComplex(g, fam, [p, p], {})
    with pytest.raises(ValueError):
        GCWComplex(g, fam, [p], {"x": []})


@pytest.mark.parametrize("seed", range(15))
def test_fixed_point_boundaries_square_to_zero(seed):
    rng = random.Random(seed)
    g = random_group(rng)
    fam = random_family(rng, g)
    space = random_complex(rng, g, fam, max_cells=12)
    assert space.validate() == []
    for h in fam:
        for n in range(2, space.dimension + 1):
            prod = matmul(space.boundary_matrix(h, n - 1), space.boundary_matrix(h, n))
            assert all(x == 0 for row in lists(prod) for x in row)


@pytest.mark.parametrize("seed", range(15))
def test_translation_is_a_chain_map(seed):
    rng = random.Random(100 + seed)
    g = random_group(rng)
    fam = random_family(rng, g)
    space = random_complex(rng, g, fam, max_cells=10)
    morphisms = space.category.morphisms
    for f in rng.sample(morphisms, min(5, len(morphisms))):
        for n in range(1, space.dimension + 1):
            t_n = space.translation_chain_map(f.source, f.target, f, n)
            t_prev = space.translation_chain_map(f.source, f.target, f, n - 1)
            lhs = matmul(space.boundary_matrix(f.source, n), t_n)
            rhs = matmul(t_prev, space.boundary_matrix(f.target, n))
            assert lists(lhs) == lists(rhs)


def test_orbit_space_complex_collapses_translates():
    g = group_from_permutations({"r": [1, 2, 0]})
    fam = close_family(g, [g.whole])
    one = g.trivial_subgroup
    n_pole, s_pole = OrbitCell("N", 0, g.whole), OrbitCell("S", 0, g.whole)
    e = OrbitCell("e", 1, one)
    f = OrbitCell("f", 2, one)
    space = GCWComplex(
        g, fam, [n_pole, s_pole, e, f],
        {"e": [make_term(1, one, s_pole, 0), make_term(-1, one, n_pole, 0)],
         "f": [make_term(1, one, e, 0), make_term(-1, one, e, 1)]},
    )
    chain = space.orbit_space_complex()
    assert lists(chain.boundary(1)) == [[-1], [1]]
    assert lists(chain.boundary(2)) == [[0]]


def test_translation_rejects_foreign_morphism():
    g = group_from_permutations({"s": [1, 0, 2], "r": [1, 2, 0]})
    fam = close_family(g, [g.whole])
    space = GCWComplex(g, fam, [OrbitCell("p", 0, g.whole)], {})
    t = subgroup_generated(g, [2])
    f = orbit_morphism(g.trivial_subgroup, t, 0)
    with pytest.raises(InvalidMorphism):
        space.translation_chain_map(g.trivial_subgroup, g.whole, f, 0)
