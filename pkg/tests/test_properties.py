"""Property tests for the structural invariants of every module.

Random instances come from :mod:`random_instances`, driven by hypothesis so
failures shrink to a reproducible seed.
"""

import json

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from eqobstruct import (
    Kind,
    ObstructionInput,
    check_cocycle,
    close_family,
    constant_system,
    decide,
    fixed_point_system,
    group_from_permutations,
    load_instance,
    modification_verdict,
    parse_instance,
    strict_verdict,
    system_from_data,
)
from eqobstruct.groups import OrbitCategory, compose, conjugation_morphisms, hom_set
from eqobstruct.zmodule import (
    Homomorphism,
    NoSolution,
    homology_at,
    PresentedAbelianGroup,
    identity,
    int_matrix,
    invariant_factors,
    kernel_basis,
    matmul,
    solve,
)
from golden_cases import ROOT, render
from oracles import cellular_cohomology, lists, sympy_rank
from random_instances import (
    GROUPS,
    all_vectors,
    random_complex,
    random_family,
    random_group,
    random_instance,
    random_module,
    random_system,
)

INSTANCES = ROOT / "instances"
seeds = st.randoms(use_true_random=False)
group_names = st.sampled_from(sorted(GROUPS))


def random_matrix(rng, rows, cols, bound):
    return int_matrix([[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)], shape=(rows, cols))


# -- group_core ------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(group_names, seeds)
def test_closing_a_family_is_idempotent(name, rng):
    g = group_from_permutations(GROUPS[name])
    fam = random_family(rng, g)
    assert set(close_family(g, fam)) == set(fam)


@settings(max_examples=30, deadline=None)
@given(group_names, seeds)
def test_conjugate_sources_have_isomorphic_hom_sets(name, rng):
    g = group_from_permutations(GROUPS[name])
    h = rng.choice(g.subgroups)
    k = rng.choice(g.subgroups)
    a = rng.choice(list(g.elements))
    to_conj, from_conj = conjugation_morphisms(h, a)
    ha = to_conj.target
    homs = hom_set(h, k)
    # pre-composition with the conjugation isomorphism is a bijection
    moved = {compose(from_conj, f) for f in homs}
    assert len(moved) == len(homs) == len(hom_set(ha, k))
    assert moved == set(hom_set(ha, k))


# -- gcw_complex -----------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_fixed_basis_rank_at_trivial_subgroup(rng):
    g = random_group(rng)
    one = g.trivial_subgroup
    fam = close_family(g, [one] + rng.sample(g.subgroups, 1))
    space = random_complex(rng, g, fam, max_cells=12)
    for n in range(space.dimension + 1):
        expected = sum(g.order // c.isotropy.order for c in space.cells_of_dim(n))
        assert space.fixed_basis(one, n).rank == expected


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_boundary_squares_vanish_at_every_subgroup(rng):
    g = random_group(rng)
    fam = close_family(g, [g.trivial_subgroup] + rng.sample(g.subgroups, min(2, len(g.subgroups))))
    space = random_complex(rng, g, fam, max_cells=12)
    for h in fam:
        for n in range(2, space.dimension + 1):
            assert not matmul(space.boundary_matrix(h, n - 1), space.boundary_matrix(h, n)).any()


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_translation_respects_composition(rng):
    g = random_group(rng)
    fam = random_family(rng, g)
    space = random_complex(rng, g, fam, max_cells=10)
    cat = OrbitCategory(fam)
    pairs = list(cat.composable_pairs())
    for f, k in rng.sample(pairs, min(20, len(pairs))):
        for n in range(space.dimension + 1):
            whole = space.translation_chain_map(f.source, k.target, compose(f, k), n)
            first = space.translation_chain_map(f.source, f.target, f, n)
            second = space.translation_chain_map(k.source, k.target, k, n)
            assert lists(whole) == lists(matmul(first, second))


# B^G by hand: reflection circle and rotation sphere fix two points, the S3 disk one
FIXED_BY_WHOLE = {"reflection_circle": ["Z^2"], "rotation_sphere": ["Z^2", "0", "0"], "s3_disk": ["Z", "0", "0"]}


def test_fixed_point_complex_of_whole_group():
    for name, values in FIXED_BY_WHOLE.items():
        inst = load_instance(INSTANCES / f"{name}.json")
        space = inst.complex
        whole = inst.group.whole
        ranks = {n: space.fixed_basis(whole, n).rank for n in range(space.dimension + 1)}
        bds = {n: lists(space.boundary_matrix(whole, n)) for n in range(1, space.dimension + 1)}
        z = PresentedAbelianGroup.free(1).invariants
        got = [str(cellular_cohomology(ranks, bds, n, z)) for n in range(len(values))]
        assert got == values


# -- zmodule ---------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_divisors_survive_permutations(rng):
    a = random_matrix(rng, rng.randint(1, 7), rng.randint(1, 7), 20)
    rows = list(range(a.shape[0]))
    cols = list(range(a.shape[1]))
    rng.shuffle(rows)
    rng.shuffle(cols)
    assert invariant_factors(a[rows][:, cols]) == invariant_factors(a)


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_solve_matches_bounded_search(rng):
    a = random_matrix(rng, rng.randint(1, 3), rng.randint(1, 3), 3)
    b = random_matrix(rng, a.shape[0], 1, 4)
    box = np.array(list(all_vectors(a.shape[1], 3)), dtype=np.int64)
    target = np.array(lists(b), dtype=np.int64)[:, 0]
    found = ((box @ np.array(lists(a), dtype=np.int64).T) == target).all(axis=1).any()
    try:
        x = solve(a, b)
    except NoSolution:
        assert not found
    else:
        assert lists(matmul(a, x)) == lists(b)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_homology_rank_nullity_on_free_complexes(rng):
    y, z = rng.randint(1, 6), rng.randint(1, 5)
    g = random_matrix(rng, z, y, 4)
    ker = kernel_basis(g)
    x = rng.randint(1, 4)
    f = matmul(ker, random_matrix(rng, ker.shape[1], x, 3))
    free = PresentedAbelianGroup.free
    hom_f = Homomorphism(f, free(x), free(y))
    hom_g = Homomorphism(g, free(y), free(z))
    dim_ker = y - sympy_rank(lists(g))
    assert homology_at(hom_f, hom_g).free_rank == dim_ker - sympy_rank(lists(f))


# -- coeff_system ----------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(group_names, seeds, st.sampled_from([0, 1, 2, 4]))
def test_constant_systems_are_functorial(name, rng, order):
    g = group_from_permutations(GROUPS[name])
    fam = random_family(rng, g)
    value = PresentedAbelianGroup.free(1) if order == 0 else PresentedAbelianGroup.cyclic(order)
    assert constant_system(fam, value).validate_functoriality() == []


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_conjugation_morphisms_act_invertibly(rng):
    g = random_group(rng)
    fam = random_family(rng, g)
    m = random_system(rng, fam)
    for h in fam:
        a = rng.choice(list(g.elements))
        there, back = conjugation_morphisms(h, a)
        for first, second in ((there, back), (back, there)):
            value = m.value(first.source)
            prod = matmul(m.map(first), m.map(second)) - identity(value.gens)
            assert value.nonzero_columns(prod) == []


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_system_from_data_is_deterministic(rng):
    g = random_group(rng)
    fam = random_family(rng, g)
    action = random_module(rng, g)
    reference = fixed_point_system(fam, action)
    data = {f: reference.map(f) for f in reference.category.morphisms}
    groups = {h: reference.value(h) for h in fam}
    shuffled = list(data.items())
    rng.shuffle(shuffled)
    one = system_from_data(fam, groups, data)
    two = system_from_data(fam, groups, dict(shuffled))
    for f in reference.category.morphisms:
        assert lists(one.map(f)) == lists(two.map(f)) == lists(reference.map(f))


# -- obstruction -----------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_coboundaries_are_cocycles_and_zero_extends(rng):
    cx = random_instance(rng, max_cells=12)
    for n in range(cx.top):
        d = cx.cochain(random_matrix(rng, cx.group(n).gens, 1, 3), n)
        assert check_cocycle(ObstructionInput(cx, cx.coboundary(d))).ok
        zero = ObstructionInput(cx, cx.zero(n + 1))
        assert strict_verdict(zero).kind is Kind.EXTENDS_AS_IS
        v = modification_verdict(zero)
        assert v.kind is Kind.EXTENDS_AFTER_MODIFICATION
        assert cx.is_zero(cx.coboundary(v.certificate))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_blocked_exactly_when_the_class_is_nonzero(rng):
    cx = random_instance(rng, max_cells=10)
    for n in range(cx.top):
        quotient = cx.cohomology_quotient(n + 1)
        cycles = quotient.numerator
        coeffs = random_matrix(rng, cycles.shape[1], 1, 2)
        alpha = cx.cochain(matmul(cycles, coeffs), n + 1)
        v = decide(ObstructionInput(cx, alpha))
        blocked = any(quotient.class_of(cx.vector(alpha)))
        assert (v.kind is Kind.BLOCKED) == blocked
        target = cx.group(n + 1)
        if blocked and cx.group(n).gens <= 5 and not target.relations.any():
            delta = np.array(lists(cx.coboundary_matrix(n)), dtype=np.int64)
            box = np.array(list(all_vectors(delta.shape[1], 2)), dtype=np.int64)
            want = np.array(lists(cx.vector(alpha)), dtype=np.int64)[:, 0]
            assert not ((box @ delta.T) == want).all(axis=1).any()


def shuffled_document(doc, rng):
    out = json.loads(json.dumps(doc))
    rng.shuffle(out["complex"]["cells"])
    items = list(out["complex"].get("boundary", {}).items())
    rng.shuffle(items)
    out["complex"]["boundary"] = dict(items)
    for cochain in out.get("cochains", {}).values():
        values = list(cochain.get("values", {}).items())
        rng.shuffle(values)
        cochain["values"] = dict(values)
    return out


def drop_digest(text: str) -> list[str]:
    return [line for line in text.splitlines() if not line.startswith("instance")]


@settings(max_examples=15, deadline=None)
@given(name=st.sampled_from(sorted(p.name for p in INSTANCES.glob("*.json"))), rng=seeds)
def test_verdicts_ignore_cell_order(name, rng, tmp_path_factory):
    doc = json.loads((INSTANCES / name).read_text())
    moved = shuffled_document(doc, rng)
    a, b = parse_instance(doc), parse_instance(moved)
    ca, cb = a.bredon(), b.bredon()
    for n in range(ca.top + 2):
        assert ca.cohomology(n).invariants == cb.cohomology(n).invariants
    for key in a.cochains:
        va = decide(ObstructionInput(ca, a.cochains[key]))
        vb = decide(ObstructionInput(cb, b.cochains[key]))
        assert va.kind == vb.kind
        assert va.class_coordinates == vb.class_coordinates
        assert (va.certificate is None) == (vb.certificate is None)
        if va.certificate is not None:
            assert va.certificate.values == vb.certificate.values
    path = tmp_path_factory.mktemp("shuffled") / name
    path.write_text(json.dumps(moved))
    for argv in (["cohomology"], ["validate"]):
        assert drop_digest(render(argv + [str(INSTANCES / name)])[0]) == drop_digest(render(argv + [str(path)])[0])
    for key in a.cochains:
        plain = render(["obstruction", str(INSTANCES / name), "--cochain", key])[0]
        assert drop_digest(plain) == drop_digest(render(["obstruction", str(path), "--cochain", key])[0])
