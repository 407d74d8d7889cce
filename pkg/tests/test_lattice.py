import pytest

from condcc.anyons import from_label
from condcc.condense import condense, validate_bosonic_subgroup
from condcc.distance import min_logical_weight
from condcc.lattice import (
    BoundaryChanged,
    BoundarySpec,
    apply_transversal,
    build_hex_torus,
    build_rectangular,
    build_triangular,
    condense_region,
    disk_region,
    full_region,
    string_operator,
    syndrome_of,
)
from condcc.pauli import PauliOp, commutes


def B(*labels):
    return validate_bosonic_subgroup([from_label(l) for l in labels])


# --- hexagonal torus ---------------------------------------------------------


def test_hex_torus_l2_counts():
    patch = build_hex_torus(2)
    assert patch.n == 24
    assert len(patch.lattice.faces) == 12
    for color in "rgb":
        assert len(patch.lattice.faces_of_color(color)) == 4
    assert patch.k == 4
    patch.validate()


def test_hex_torus_every_vertex_on_three_faces():
    for L in (2, 3):
        patch = build_hex_torus(L)
        seen = {q: [] for q in range(patch.n)}
        for f in patch.lattice.faces:
            for q in f.vertices:
                seen[q].append(f.color)
        for cols in seen.values():
            assert sorted(cols) == ["b", "g", "r"]


def test_hex_torus_scaling_and_errors():
    patch = build_hex_torus(3)
    assert patch.n == 54 and len(patch.lattice.faces) == 27
    assert patch.k == 4
    with pytest.raises(ValueError):
        build_hex_torus(1)


# --- triangular patches ------------------------------------------------------


def test_triangular_colored_d3():
    patch = build_triangular(3)
    assert patch.n == 7
    assert len(patch.stabilizers.generators) == 6
    assert patch.k == 1
    assert min_logical_weight(patch) == 3
    patch.validate()


def test_triangular_colored_d5_distance():
    patch = build_triangular(5)
    assert (patch.n, patch.k) == (19, 1)
    assert min_logical_weight(patch) == 5


def test_triangular_colored_d7_distance():
    patch = build_triangular(7)
    assert (patch.n, patch.k) == (37, 1)
    assert min_logical_weight(patch) == 7


def test_triangular_pauli_d6_distance():
    patch = build_triangular(6, family="pauli")
    assert patch.k == 1
    assert min_logical_weight(patch) == 6


def test_triangular_pauli_boundary_faces_single_basis():
    patch = build_triangular(4, family="pauli")
    single = [f for f in patch.lattice.faces if len(f.bases) == 1]
    assert single, "expected bisected boundary faces hosting one check"
    assert {f.bases[0] for f in single} == {"X", "Y", "Z"}
    for f in single:
        assert len(f.vertices) == 3


def test_triangular_invalid_parameters():
    with pytest.raises(ValueError):
        build_triangular(4)                 # colored family needs odd d
    with pytest.raises(ValueError):
        build_triangular(1)
    with pytest.raises(ValueError):
        build_triangular(3, family="pauli")  # pauli family needs even d
    with pytest.raises(ValueError):
        build_triangular(3, family="striped")


# --- rectangular patches -----------------------------------------------------


def test_rect_color_pauli_k2():
    for w, h in ((2, 2), (3, 2), (2, 3)):
        patch = build_rectangular(w, h, BoundarySpec(("r", "x", "r", "x")))
        assert patch.k == 2
        patch.validate()


def test_rect_rbrb_k2():
    patch = build_rectangular(2, 2, BoundarySpec(("r", "b", "r", "b")))
    assert patch.k == 2
    patch.validate()
    # each logical representative is a single-letter string operator
    for xr, zr in patch.logicals:
        assert len({xr.letter(q) for q in xr.support}) == 1
        assert len({zr.letter(q) for q in zr.support}) == 1


def test_rect_errors():
    with pytest.raises(ValueError):
        build_rectangular(1, 1, BoundarySpec(("r", "x", "r", "x")))
    with pytest.raises(ValueError):
        build_rectangular(2, 3, BoundarySpec(("r", "b", "r", "b")))
    with pytest.raises(ValueError):
        build_rectangular(2, 2, BoundarySpec(("r", "g", "r", "g")))
    with pytest.raises(ValueError):
        build_rectangular(2, 2, BoundarySpec(("r", "x", "r")))


# --- transversal gates -------------------------------------------------------


def test_transversal_identity():
    patch = build_triangular(3)
    assert apply_transversal(patch, "I") == {"X1": ("X1", 1), "Z1": ("Z1", 1)}


def test_transversal_h_on_triangular_swaps_x_and_z():
    patch = build_triangular(3)
    action = apply_transversal(patch, "H")
    assert action["X1"][0] == "Z1" and action["Z1"][0] == "X1"


def test_transversal_h_on_rbrb_is_hadamards_and_swap():
    patch = build_rectangular(2, 2, BoundarySpec(("r", "b", "r", "b")))
    action = apply_transversal(patch, "H")
    assert action == {
        "X1": ("Z2", 1),
        "Z1": ("X2", 1),
        "X2": ("Z1", 1),
        "Z2": ("X1", 1),
    }


def test_transversal_h_changes_mixed_boundary():
    patch = build_rectangular(2, 2, BoundarySpec(("r", "x", "r", "x")))
    with pytest.raises(BoundaryChanged):
        apply_transversal(patch, "H")


def test_transversal_s_preserves_self_dual_patch():
    # every face hosts X and Z on the same support, so S fixes the group
    patch = build_triangular(3)
    action = apply_transversal(patch, "S")
    assert set(action) == {"X1", "Z1"}


# --- region condensation -----------------------------------------------------


def test_full_bulk_rx_condensation_halves_k():
    patch = build_hex_torus(2)
    out = condense_region(patch, B("rx"), full_region(patch))
    assert patch.k == 4 and out.k == 2


def test_condensed_generators_commute_and_contain_hopping():
    patch = build_hex_torus(2)
    for gens in (("rx",), ("gz",), ("rx", "rz"), ("rx", "gx")):
        out = condense_region(patch, B(*gens), full_region(patch))
        group = out.stabilizers
        for i, a in enumerate(group.generators):
            for b in group.generators[i + 1:]:
                assert commutes(a, b)
        from condcc.lattice import hopping_terms
        for hop in hopping_terms(patch, B(*gens), full_region(patch)):
            member, sign = group.contains(hop)
            assert member and sign == 1


def test_retained_checks_match_condensed_charges():
    # a face check in basis B detects the charge (face color, dual basis);
    # it survives condensation exactly when that charge is not condensed
    patch = build_hex_torus(2)
    dual = {"X": "z", "Z": "x"}
    for gens in (("rx",), ("gz",), ("rx", "rz"), ("rx", "gx")):
        sub = B(*gens)
        out = condense_region(patch, sub, full_region(patch))
        for f in patch.lattice.faces:
            for basis in ("X", "Z"):
                check = PauliOp.from_terms(
                    patch.n, {q: basis for q in f.vertices}
                )
                retained, _ = out.stabilizers.contains(check)
                condensed = from_label(f.color + dual[basis]) in sub
                assert retained == (not condensed), (f.color, basis, gens)


def test_string_confinement_matches_abstract_condensate():
    patch = build_hex_torus(4)
    sub = B("rx")
    out = condense_region(patch, sub, full_region(patch))
    abstract = condense(sub)
    confined_labels = {a.label for a in abstract.confined}
    for color, cidx in (("r", 0), ("g", 1), ("b", 2)):
        for pauli in "xyz":
            label = color + pauli
            short = string_operator(patch, color, pauli,
                                    (0, 0, cidx), (1, 0, cidx))
            long = string_operator(patch, color, pauli,
                                   (0, 0, cidx), (2, 0, cidx))
            s_short = len(syndrome_of(out, short))
            s_long = len(syndrome_of(out, long))
            anyon = from_label(label)
            if anyon in sub:
                assert s_short == 0 and s_long == 0, label
            elif label in confined_labels:
                assert s_long > s_short > 0, label
            else:
                assert s_short == s_long > 0, label


def test_two_color_lagrangian_punctures_add_two_logicals():
    patch = build_hex_torus(4)
    r1 = disk_region(patch, 0, 2)
    r2 = disk_region(patch, patch.n // 2, 2)
    assert not (r1 & r2)
    out = condense_region(condense_region(patch, B("rx", "rz"), r1),
                          B("rx", "rz"), r2)
    assert out.k == patch.k + 2
    out.validate()


def test_two_single_boson_semipunctures_add_one_logical():
    patch = build_hex_torus(4)
    r1 = disk_region(patch, 0, 2)
    r2 = disk_region(patch, patch.n // 2, 2)
    out = condense_region(condense_region(patch, B("rx"), r1), B("rx"), r2)
    assert out.k == patch.k + 1
    out.validate()


def test_puncture_charge_content():
    patch = build_hex_torus(4)
    r1 = disk_region(patch, 0, 2)
    r2 = disk_region(patch, patch.n // 2, 2)
    out = condense_region(condense_region(patch, B("rx", "rz"), r1),
                          B("rx", "rz"), r2)

    def faces_near(region, color):
        return [f for f in patch.lattice.faces if f.color == color
                and any(q in region for q in f.vertices)]

    def removed_red(region):
        out_faces = []
        for f in faces_near(region, "r"):
            check = PauliOp.from_terms(patch.n, {q: "Z" for q in f.vertices})
            member, _ = out.stabilizers.contains(check)
            if not member:
                out_faces.append(f)
        return out_faces

    red1, red2 = removed_red(r1), removed_red(r2)
    assert red1 and red2
    # matching red strings terminate on the punctures without any syndrome
    for pauli in ("x", "z"):
        s = string_operator(patch, "r", pauli, red1[0].key, red2[0].key)
        assert syndrome_of(out, s) == []
    # mismatched green/blue strings cannot terminate cleanly
    g = string_operator(patch, "g", "x", faces_near(r1, "g")[0].key,
                        faces_near(r2, "g")[0].key)
    assert syndrome_of(out, g)
    b = string_operator(patch, "b", "z", faces_near(r1, "b")[0].key,
                        faces_near(r2, "b")[0].key)
    assert syndrome_of(out, b)


def test_condense_region_errors():
    patch = build_hex_torus(2)
    with pytest.raises(ValueError):
        condense_region(patch, B("rx"), set())
    with pytest.raises(ValueError):
        condense_region(patch, B("rx"), {0, patch.n - 1} - {1})
    with pytest.raises(ValueError):
        # closure of rx and gz contains a fermion: no hopping recipe
        condense_region(patch, B("rx", "gz"), full_region(patch))
    with pytest.raises(ValueError):
        # a single qubit supports no two-body hopping term
        condense_region(patch, B("rx"), {0})


def test_pauli_lagrangian_condensation_trivializes():
    # condensing all x-bosons leaves single-qubit X stabilizers everywhere
    patch = build_hex_torus(2)
    out = condense_region(patch, B("rx", "gx"), full_region(patch))
    assert out.k == 0
    member, sign = out.stabilizers.contains(
        PauliOp.from_terms(patch.n, {0: "X"})
    )
    assert member and sign == 1


# --- serialization -----------------------------------------------------------


def test_lattice_json_roundtrip_fields():
    patch = build_hex_torus(2)
    obj = patch.lattice.to_json()
    assert obj["n"] == 24 and len(obj["faces"]) == 12
    assert all(len(f["vertices"]) == 6 for f in obj["faces"])
    assert {e[2] for e in obj["edges"]} == {"r", "g", "b"}
