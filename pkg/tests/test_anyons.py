import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from condcc.anyons import (
    ALL_LABELS,
    BOSON_LABELS,
    FERMION_LABELS,
    Anyon,
    LayerMismatch,
    all_anyons,
    apply_automorphism,
    boson_table,
    bosons,
    enumerate_automorphisms,
    fermions,
    from_label,
    fuse,
    monodromy,
    spin,
    to_label,
    vacuum,
)


def anyon_strategy(n):
    bits = st.tuples(*([st.integers(0, 1)] * n))
    return st.builds(lambda h, g: Anyon(n, h, g), bits, bits)


def test_fuse_examples():
    assert fuse(from_label("rx"), from_label("rx")) == vacuum(2)
    assert fuse(from_label("bx"), from_label("by")) == from_label("bz")
    assert fuse(from_label("rx"), from_label("bz")) == from_label("f1")


def test_fermion_fusion_relations():
    # each fermion arises from boson pairs crossing color and Pauli labels
    relations = {
        "f1": [("rx", "bz")],
        "f2": [("rz", "bx")],
        "f3": [("bz", "gy"), ("gx", "rz"), ("bx", "ry")],
        "f4": [("rz", "gy"), ("gx", "bz"), ("rx", "by")],
        "f5": [("rx", "gy"), ("bx", "gz"), ("by", "rz")],
        "f6": [("bx", "gy"), ("rx", "gz"), ("ry", "bz")],
    }
    for f, pairs in relations.items():
        for a, b in pairs:
            assert fuse(from_label(a), from_label(b)) == from_label(f), (f, a, b)


def test_fuse_vacuum_identity():
    for a in all_anyons(2):
        assert fuse(a, vacuum(2)) == a
        assert fuse(a, a) == vacuum(2)


def test_fuse_layer_mismatch():
    with pytest.raises(LayerMismatch):
        fuse(vacuum(1), vacuum(2))


def test_spin_census():
    assert spin(vacuum(2)) == 1
    assert len(bosons(2)) == 9
    assert len(fermions(2)) == 6
    for lbl in BOSON_LABELS:
        assert spin(from_label(lbl)) == 1
    for lbl in FERMION_LABELS:
        assert spin(from_label(lbl)) == -1


def test_monodromy_examples():
    assert monodromy(from_label("rx"), from_label("ry")) == 1
    assert monodromy(from_label("gz"), from_label("bz")) == 1
    assert monodromy(from_label("gx"), from_label("rz")) == -1
    # odd/even fermion pairs braid non-trivially; frozen from the bilinear form
    assert monodromy(from_label("f3"), from_label("f5")) == -1


def test_monodromy_fermion_parity_pattern():
    # fermions with the same layer-index parity braid trivially, opposite
    # parity pairs do not
    odd = ["f1", "f3", "f5"]
    even = ["f2", "f4", "f6"]
    for a, b in itertools.combinations(odd, 2):
        assert monodromy(from_label(a), from_label(b)) == -1
    for a, b in itertools.combinations(even, 2):
        assert monodromy(from_label(a), from_label(b)) == -1
    for a in odd:
        for b in even:
            assert monodromy(from_label(a), from_label(b)) == 1


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(anyon_strategy(n), anyon_strategy(n))))
def test_monodromy_spin_identity(pair):
    a, b = pair
    assert monodromy(a, b) == spin(a) * spin(b) * spin(fuse(a, b))


def test_monodromy_spin_identity_exhaustive_n2():
    for a in all_anyons(2):
        for b in all_anyons(2):
            assert monodromy(a, b) == spin(a) * spin(b) * spin(fuse(a, b))


def test_boson_table_rows_columns_closed_and_trivially_braiding():
    table = boson_table()
    lines = table + [list(col) for col in zip(*table)]
    for line in lines:
        anyons = [from_label(l) for l in line]
        group = set(anyons) | {vacuum(2)}
        for a, b in itertools.product(group, repeat=2):
            assert fuse(a, b) in group
            assert monodromy(a, b) == 1


def test_label_bijection():
    assert len(ALL_LABELS) == 16
    seen = set()
    for lbl in ALL_LABELS:
        a = from_label(lbl)
        assert to_label(a) == lbl
        seen.add(a)
    assert seen == set(all_anyons(2))
    assert to_label(Anyon(2, (1, 1), (0, 1))) == "f3"
    assert to_label(Anyon(2, (1, 0), (0, 0))) == "rx"
    assert to_label(vacuum(2)) == "1"


def test_json_roundtrip():
    for a in all_anyons(2):
        assert Anyon.from_json(a.to_json()) == a
    blob = from_label("f3").to_json()
    assert blob == {"n": 2, "h": "11", "g": "01", "label": "f3"}


class TestAutomorphisms:
    def test_count_n2(self):
        assert len(enumerate_automorphisms(2)) == 72

    def test_count_n1(self):
        # toric code: identity and the electric/magnetic swap
        assert len(enumerate_automorphisms(1)) == 2

    def test_contains_identity(self):
        eye = tuple(tuple(int(i == j) for j in range(4)) for i in range(4))
        assert any(phi.matrix == eye for phi in enumerate_automorphisms(2))

    def test_layer_swap_present(self):
        # swapping the two layers exchanges the r and b columns
        autos = enumerate_automorphisms(2)
        want = {
            lbl: to_label(
                Anyon(2, (a.h[1], a.h[0]), (a.g[1], a.g[0]))
            )
            for lbl, a in ((l, from_label(l)) for l in ALL_LABELS)
        }
        assert want["rx"] == "bx" and want["rz"] == "bz"
        assert any(
            all(to_label(phi(from_label(l))) == want[l] for l in ALL_LABELS)
            for phi in autos
        )

    def test_documented_example_map_present(self):
        # the map sending the boson table rows [rx gx bx / ry gy by / rz gz bz]
        # to [gy gx gz / by bx bz / ry rx rz]
        image = {
            "rx": "gy", "gx": "gx", "bx": "gz",
            "ry": "by", "gy": "bx", "by": "bz",
            "rz": "ry", "gz": "rx", "bz": "rz",
        }
        autos = enumerate_automorphisms(2)
        assert any(
            all(to_label(phi(from_label(l))) == image[l] for l in image)
            for phi in autos
        )

    def test_row_swap_fixes_z_row(self):
        # an x<->y row swap leaves every z-row boson fixed
        autos = enumerate_automorphisms(2)
        goal = {"rx": "ry", "ry": "rx", "gx": "gy", "gy": "gx",
                "bx": "by", "by": "bx", "rz": "rz", "gz": "gz", "bz": "bz"}
        matches = [
            phi
            for phi in autos
            if all(to_label(phi(from_label(l))) == goal[l] for l in goal)
        ]
        assert matches
        assert apply_automorphism(matches[0], from_label("rz")) == from_label("rz")

    def test_group_closure_and_spin_preservation(self):
        autos = enumerate_automorphisms(2)
        mats = {phi.matrix for phi in autos}
        for phi in autos:
            for a in all_anyons(2):
                assert spin(phi(a)) == spin(a)
        rng = np.random.default_rng(7)
        idx = rng.integers(0, len(autos), size=(60, 2))
        for i, j in idx:
            assert autos[i].compose(autos[j]).matrix in mats

    def test_monodromy_preserved(self):
        autos = enumerate_automorphisms(2)
        pairs = list(itertools.combinations(all_anyons(2), 2))
        for phi in autos[::9]:
            for a, b in pairs:
                assert monodromy(phi(a), phi(b)) == monodromy(a, b)
