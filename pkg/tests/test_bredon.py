import random
from pathlib import Path

import pytest

from eqobstruct import (
    BredonComplex,
    CoefficientError,
    GCWComplex,
    OrbitCell,
    close_family,
    cochain_complex,
    cohomology,
    constant_system,
    group_from_permutations,
    load_instance,
    make_term,
    oracle_cohomology,
    submodule_oracle,
    yoneda_check,
)
from eqobstruct.bredon import BredonCochain, NotACoChainComplex
from eqobstruct.coefficients import CoefficientSystem
from eqobstruct.complexes import InvalidComplex
from eqobstruct.zmodule import PresentedAbelianGroup, matmul
from oracles import lists
from random_instances import random_cochain, random_instance

INSTANCES = Path(__file__).parent.parent / "instances"

# [DERIVED] by hand from the cell structures; see the instance files
EXPECTED = {
    "point": ["Z"],
    "reflection_circle": ["Z", "0"],
    "antipodal_circle": ["Z", "Z"],
    "antipodal_circle_sign": ["0", "Z/2"],
    "rotation_sphere": ["Z", "0", "Z"],
    "s3_disk": ["Z", "0", "0"],
    "s3_disk_sign": ["0", "0", "0"],
}


def curated(name: str) -> BredonComplex:
    return load_instance(INSTANCES / f"{name}.json").bredon()


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_curated_cohomology(name):
    cx = curated(name)
    assert [str(cx.cohomology(n).invariants) for n in range(cx.top + 1)] == EXPECTED[name]
    # beyond the top dimension everything vanishes
    assert str(cx.cohomology(cx.top + 1).invariants) == "0"


def test_antipodal_sign_coboundary():
    cx = curated("antipodal_circle_sign")
    # delta f (c) = M(s) f(p) - f(p) = -2 f(p)
    assert lists(cx.coboundary_matrix(0)) == [[-2]]


def test_cochain_arithmetic_and_sparse_input():
    cx = curated("reflection_circle")
    f = BredonCochain(0, {"q": (1,)})
    assert cx.vector(f).shape == (2, 1)
    g = f + f - f
    assert cx.coboundary(g).values == cx.coboundary(f).values
    assert cx.coboundary(-f).values == {"c": (-1,)}
    with pytest.raises(ValueError):
        cx.vector(BredonCochain(0, {"zz": (1,)}))


def test_point_is_value_at_whole_group():
    cx = curated("point")
    assert cx.cohomology(0).invariants == cx.system.value(cx.space.group.whole).invariants


@pytest.mark.parametrize("seed", range(25))
def test_expand_intertwines_coboundary_and_boundary(seed):
    rng = random.Random(seed)
    cx = random_instance(rng, max_cells=10)
    for n in range(cx.top):
        f = random_cochain(rng, cx, n)
        df = cx.coboundary(f)
        for h in cx.space.family:
            lhs = cx.expand(df, h)
            rhs = matmul(cx.expand(f, h), cx.space.boundary_matrix(h, n + 1))
            assert cx.system.value(h).nonzero_columns(lhs - rhs) == []


@pytest.mark.parametrize("seed", range(25))
def test_delta_squared_vanishes(seed):
    rng = random.Random(1000 + seed)
    cx = random_instance(rng)
    for n in range(cx.top - 1):
        f = random_cochain(rng, cx, n)
        assert cx.is_zero(cx.coboundary(cx.coboundary(f)))
    cx.check_square()


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_yoneda_reduction_on_curated(name):
    cx = curated(name)
    for n in range(cx.top + 2):
        check = yoneda_check(cx, n)
        assert check.failures == ()
        assert check.reduced == check.oracle == submodule_oracle(cx, n).group.invariants
        assert oracle_cohomology(cx, n) == cx.cohomology(n).invariants


def test_cochain_complex_validates_inputs():
    inst = load_instance(INSTANCES / "antipodal_circle_sign.json")
    assert cohomology(inst.complex, inst.system, 1).invariants.torsion == (2,)
    bad = CoefficientSystem(inst.family, inst.system.at, {f: -inst.system.map(f) for f in inst.system.act})
    with pytest.raises(CoefficientError):
        cochain_complex(inst.complex, bad)


def test_cohomology_report_fields():
    cx = curated("rotation_sphere")
    rep = cx.cohomology(2)
    assert str(rep) == "H^2: Z"
    assert rep.rank_in == 0 and rep.rank_out == 0


def test_nonzero_square_is_rejected():
    g = group_from_permutations({"s": [1, 0]})
    fam = close_family(g, [g.whole])
    one = g.trivial_subgroup
    p = OrbitCell("p", 0, g.whole)
    c = OrbitCell("c", 1, one)
    e = OrbitCell("e", 2, one)
    space = GCWComplex(g, fam, [p, c, e], {"c": [make_term(1, one, p, 0)], "e": [make_term(1, one, c, 0)]})
    system = constant_system(fam, PresentedAbelianGroup.free(1))
    with pytest.raises(InvalidComplex):
        cochain_complex(space, system)
    with pytest.raises(NotACoChainComplex) as info:
        BredonComplex(space, system).check_square()
    assert info.value.cell == "e"
