import itertools

import pytest
from hypothesis import given, strategies as st

from condcc.anyons import Anyon, from_label, to_label
from condcc.cohomology import (
    CocycleClass,
    LagrangianSubgroup,
    Subgroup,
    all_cocycle_classes,
    cocycle_eval,
    enumerate_boundaries,
    enumerate_subgroups,
    fold_wall,
    indicator,
    lagrangian_from_spec,
    validate_lagrangian,
)


def anyon4(g, h):
    """Build a 4-layer anyon from magnetic/electric bit strings."""
    return Anyon(4, tuple(int(b) for b in h), tuple(int(b) for b in g))


PSI1 = CocycleClass(2, (1,))  # the pair-coupling cocycle on Z2 x Z2


def test_cocycle_eval_pair_coupling():
    assert cocycle_eval(PSI1, (1, 0), (0, 1)) == -1
    assert cocycle_eval(PSI1, (0, 1), (1, 0)) == 1
    assert cocycle_eval(PSI1, (1, 1), (1, 1)) == -1


def test_cocycle_normalised():
    for c in all_cocycle_classes(3):
        for b in itertools.product((0, 1), repeat=3):
            assert cocycle_eval(c, (0, 0, 0), b) == 1
            assert cocycle_eval(c, b, (0, 0, 0)) == 1


@given(
    st.integers(2, 4).flatmap(
        lambda k: st.tuples(
            st.integers(0, 2 ** (k * (k - 1) // 2) - 1),
            *([st.tuples(*([st.integers(0, 1)] * k))] * 3),
        ).map(lambda t: (k,) + t)
    )
)
def test_cocycle_identity(args):
    k, idx, a, b, c = args
    npairs = k * (k - 1) // 2
    bits = tuple((idx >> i) & 1 for i in range(npairs))
    psi = CocycleClass(k, bits)

    def add(u, v):
        return tuple(x ^ y for x, y in zip(u, v))

    lhs = cocycle_eval(psi, a, b) * cocycle_eval(psi, add(a, b), c)
    rhs = cocycle_eval(psi, b, c) * cocycle_eval(psi, a, add(b, c))
    assert lhs == rhs


def test_indicator_examples():
    N_triv = Subgroup.from_vectors(1, [])
    assert indicator(N_triv, CocycleClass.trivial(0), (0,), (1,)) == 1
    assert indicator(N_triv, CocycleClass.trivial(0), (1,), (0,)) == 0

    G2 = Subgroup.from_vectors(2, [(1, 0), (0, 1)])
    assert indicator(G2, PSI1, (1, 0), (0, 1)) == 1
    assert indicator(G2, PSI1, (1, 0), (1, 0)) == 0


def test_single_layer_boundaries():
    bounds = enumerate_boundaries(1)
    assert len(bounds) == 2
    lags = [lagrangian_from_spec(N, c) for N, c in bounds]
    sets = [L.gh_strings() for L in lags]
    assert ["(0|0)", "(0|1)"] in sets
    assert ["(0|0)", "(1|0)"] in sets


def test_two_layer_boundaries_count_and_eq15_map():
    bounds = enumerate_boundaries(2)
    assert len(bounds) == 6
    lags = [lagrangian_from_spec(N, c) for N, c in bounds]
    as_labels = [
        frozenset(to_label(Anyon(2, a.h, a.g)) for a in L.elements) for L in lags
    ]
    expected = [
        {"1", "rx", "ry", "rz"},
        {"1", "gx", "gy", "gz"},
        {"1", "bx", "by", "bz"},
        {"1", "rx", "gx", "bx"},
        {"1", "ry", "gy", "by"},
        {"1", "rz", "gz", "bz"},
    ]
    assert sorted(map(sorted, as_labels)) == sorted(map(sorted, expected))


def test_pair_coupling_class_on_full_group_matches_diagonal_exchange():
    G2 = Subgroup.from_vectors(2, [(1, 0), (0, 1)])
    L = lagrangian_from_spec(G2, PSI1)
    assert L.gh_strings() == ["(00|00)", "(01|10)", "(10|01)", "(11|11)"]


def test_four_layer_wall_count():
    bounds = enumerate_boundaries(4)
    assert len(bounds) == 270
    # spot check the Gaussian-binomial subgroup census behind the count
    by_k = {}
    for N, _ in bounds:
        by_k[N.k] = by_k.get(N.k, 0) + 1
    assert by_k == {0: 1, 1: 15, 2: 70, 3: 120, 4: 64}


def test_four_layer_lagrangians_distinct_and_valid():
    bounds = enumerate_boundaries(4)
    lags = [lagrangian_from_spec(N, c) for N, c in bounds]
    assert len({frozenset(L.elements) for L in lags}) == 270
    for L in lags:
        assert len(L.elements) == 16
    # full validation (bosonic, isotropic, maximal) on a deterministic sample
    for L in lags[::27]:
        validate_lagrangian(L)


def test_lagrangian_sizes_small_n():
    for n in (1, 2):
        for N, c in enumerate_boundaries(n):
            L = lagrangian_from_spec(N, c)
            assert len(L.elements) == 2 ** n
            validate_lagrangian(L)


def test_trivial_cocycle_factorizes():
    # condensable set = {g in N} x {h orthogonal to N}
    for n in (2, 3):
        for N in enumerate_subgroups(n):
            c = CocycleClass.trivial(N.k)
            L = lagrangian_from_spec(N, c)
            members = set(N.members())
            for g in itertools.product((0, 1), repeat=n):
                for h in itertools.product((0, 1), repeat=n):
                    ok = g in members and all(
                        sum(x * y for x, y in zip(h, l)) % 2 == 0 for l in members
                    )
                    assert (Anyon(n, h, g) in L.elements) == ok


# --- the worked 4-layer examples ------------------------------------------

N1 = Subgroup.from_vectors(4, [(1, 0, 0, 0)])
N2 = Subgroup.from_vectors(4, [(1, 0, 1, 0)])
N3 = Subgroup.from_vectors(4, [(1, 0, 0, 0), (0, 0, 1, 0)])
PSI_N3 = CocycleClass(2, (1,))


def closure(gens):
    from condcc.anyons import fuse, vacuum

    out = {vacuum(gens[0].n)}
    frontier = list(gens)
    while frontier:
        a = frontier.pop()
        added = ({fuse(a, b) for b in out} | {a}) - out
        out |= added
        frontier.extend(added)
    return out


def test_example_wall_n1_generators_and_opacity():
    L = lagrangian_from_spec(N1, CocycleClass.trivial(1))
    gens = [
        anyon4("1000", "0000"),  # magnetic, left layer 1
        anyon4("0000", "0100"),  # electric, left layer 2
        anyon4("0000", "0010"),  # electric, right layer 1
        anyon4("0000", "0001"),  # electric, right layer 2
    ]
    assert set(L.elements) == closure(gens)
    desc = fold_wall(L)
    assert desc.transparency == "opaque"
    assert not desc.tunneling


def test_example_wall_n2_semi_transparent():
    L = lagrangian_from_spec(N2, CocycleClass.trivial(1))
    gens = [
        anyon4("1010", "0000"),  # m1 on both sides
        anyon4("0000", "1010"),  # e1 on both sides
        anyon4("0000", "0100"),  # e2 left
        anyon4("0000", "0001"),  # e2 right
    ]
    assert set(L.elements) == closure(gens)
    desc = fold_wall(L)
    assert desc.transparency == "semi-transparent"
    cl = {a for a in desc.condensed_left}
    cr = {a for a in desc.condensed_right}
    assert cl == {Anyon(2, (0, 1), (0, 0))}  # e2 condenses on the left
    assert cr == {Anyon(2, (0, 1), (0, 0))}  # and on the right
    tunneled = {(l, r) for l, r in desc.tunneling}
    m1 = Anyon(2, (0, 0), (1, 0))
    e1 = Anyon(2, (1, 0), (0, 0))
    assert (m1, m1) in tunneled
    assert (e1, e1) in tunneled


def test_example_wall_n3_trivial_cocycle():
    L = lagrangian_from_spec(N3, CocycleClass.trivial(2))
    gens = [
        anyon4("1000", "0000"),  # m1 left
        anyon4("0010", "0000"),  # m1 right
        anyon4("0000", "0100"),  # e2 left
        anyon4("0000", "0001"),  # e2 right
    ]
    assert set(L.elements) == closure(gens)
    desc = fold_wall(L)
    assert desc.transparency == "opaque"


def test_example_wall_n3_twisted_cocycle():
    L = lagrangian_from_spec(N3, PSI_N3)
    gens = [
        anyon4("1000", "0010"),  # m1 left, dressed with e1 right
        anyon4("0010", "1000"),  # m1 right, dressed with e1 left
        anyon4("0000", "0100"),  # e2 left
        anyon4("0000", "0001"),  # e2 right
    ]
    assert set(L.elements) == closure(gens)
    desc = fold_wall(L)
    assert desc.transparency == "semi-transparent"
    m1 = Anyon(2, (0, 0), (1, 0))
    e1 = Anyon(2, (1, 0), (0, 0))
    tunneled = {(l, r) for l, r in desc.tunneling}
    assert (m1, e1) in tunneled or (e1, m1) in tunneled


def test_fold_wall_detects_invertible():
    # the transparent identity wall of one layer per side: <e1 e1', m1 m1'>
    gens = [
        Anyon(2, (1, 1), (0, 0)),
        Anyon(2, (0, 0), (1, 1)),
    ]
    L = LagrangianSubgroup(2, frozenset(closure(gens)))
    validate_lagrangian(L)
    desc = fold_wall(L)
    assert desc.transparency == "invertible"
    e = Anyon(1, (1,), (0,))
    m = Anyon(1, (0,), (1,))
    assert set(desc.tunneling) == {(e, e), (m, m)}


def test_subgroup_coords_roundtrip():
    N = Subgroup.from_vectors(3, [(1, 1, 0), (0, 1, 1)])
    for m in N.members():
        coords = N.coords_of(m)
        assert coords is not None
        rebuilt = [0, 0, 0]
        for c, b in zip(coords, N.basis):
            if c:
                rebuilt = [x ^ y for x, y in zip(rebuilt, b)]
        assert tuple(rebuilt) == m
    assert N.coords_of((1, 0, 0)) is None


def test_dependent_basis_rejected():
    with pytest.raises(ValueError):
        Subgroup.from_vectors(2, [(1, 0), (1, 0)])
