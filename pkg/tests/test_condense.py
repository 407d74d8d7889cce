import itertools

import pytest

from condcc.anyons import (
    BOSON_LABELS,
    all_anyons,
    enumerate_automorphisms,
    from_label,
    spin,
    to_label,
    vacuum,
)
from condcc.condense import (
    BraidingViolation,
    InvalidTransition,
    SpinViolation,
    charge_continuity,
    classify_semitransparent_walls,
    condense,
    enumerate_lagrangians,
    enumerate_partial_condensation_walls,
    single_boson_condensates,
    validate_bosonic_subgroup,
    wall_class_counts,
    with_em_assignment,
)


def labels(anyons):
    return {to_label(a) for a in anyons}


def test_validate_single_boson():
    B = validate_bosonic_subgroup(["rx"])
    assert labels(B.elements) == {"1", "rx"}


def test_validate_two_boson_row():
    B = validate_bosonic_subgroup(["rx", "gx"])
    assert labels(B.elements) == {"1", "rx", "gx", "bx"}


def test_validate_rejects_fermion():
    with pytest.raises(SpinViolation):
        validate_bosonic_subgroup(["f1"])


def test_validate_rejects_braiding_pair():
    with pytest.raises(BraidingViolation):
        validate_bosonic_subgroup(["rx", "gz"])


def test_condense_rx():
    cond = condense(validate_bosonic_subgroup(["rx"]))
    classes = {frozenset(labels(c)) for c in cond.deconfined_classes}
    assert classes == {
        frozenset({"1", "rx"}),
        frozenset({"ry", "rz"}),
        frozenset({"gx", "bx"}),
        # the surviving fermion class, computed from the braiding rules:
        # f2 = rz x bx and f3 = gx x rz both share a label with rx
        frozenset({"f2", "f3"}),
    }
    assert labels(cond.confined) == {"gy", "gz", "by", "bz", "f1", "f4", "f5", "f6"}


def test_condense_lagrangian_gives_trivial_phase():
    for B in enumerate_lagrangians(2):
        cond = condense(B)
        assert len(cond.deconfined_classes) == 1
        assert cond.deconfined_classes[0] == B.elements
        # maximality: everything outside the subgroup confines
        assert len(cond.confined) == 12


def test_condense_trivial_subgroup():
    B = validate_bosonic_subgroup([vacuum(2)])
    cond = condense(B)
    assert len(cond.deconfined_classes) == 16
    assert all(len(c) == 1 for c in cond.deconfined_classes)


def test_every_single_boson_condensate_is_a_toric_code():
    # four classes carrying {1, e, m, f} modular data
    for lbl, cond in single_boson_condensates().items():
        assert len(cond.deconfined_classes) == 4
        spins = sorted(spin(next(iter(c))) for c in cond.deconfined_classes)
        assert spins == [-1, 1, 1, 1]
        named = with_em_assignment(cond, next(
            c for c in cond.deconfined_classes
            if spin(next(iter(c))) == 1 and c != cond.condensed.elements
        ))
        e, m, f = (named.class_named(x) for x in "emf")
        from condcc.anyons import monodromy
        assert monodromy(next(iter(e)), next(iter(m))) == -1
        assert monodromy(next(iter(e)), next(iter(f))) == -1
        assert monodromy(next(iter(m)), next(iter(f))) == -1


def test_lagrangians_match_rows_and_columns():
    expected = [
        {"1", "rx", "ry", "rz"},
        {"1", "gx", "gy", "gz"},
        {"1", "bx", "by", "bz"},
        {"1", "rx", "gx", "bx"},
        {"1", "ry", "gy", "by"},
        {"1", "rz", "gz", "bz"},
    ]
    got = [labels(B.elements) for B in enumerate_lagrangians(2)]
    assert len(got) == 6
    for e in expected:
        assert e in got


def test_lagrangians_n1():
    got = [
        {a.bits for a in B.elements} for B in enumerate_lagrangians(1)
    ]
    assert len(got) == 2
    assert {(0, 0), (1, 0)} in got  # vacuum + electric
    assert {(0, 0), (0, 1)} in got  # vacuum + magnetic


def test_partial_condensation_wall_count():
    walls = enumerate_partial_condensation_walls()
    assert len(walls) == 18
    rx_assignments = [
        frozenset(labels(cond.class_named("e")))
        for lbl, cond in walls
        if lbl == "rx"
    ]
    assert sorted(rx_assignments, key=sorted) == sorted(
        [frozenset({"ry", "rz"}), frozenset({"gx", "bx"})], key=sorted
    )


def test_charge_continuity_rx_to_gy():
    prev = condense(validate_bosonic_subgroup(["rx"]), em_class="ry")
    nxt = condense(validate_bosonic_subgroup(["gy"]))
    cont = charge_continuity(prev, nxt)
    assert labels(cont["e"]) == {"ry", "by"}
    assert labels(cont["m"]) == {"gx", "gz"}


def test_charge_continuity_rx_to_gz():
    prev = condense(validate_bosonic_subgroup(["rx"]), em_class="ry")
    nxt = condense(validate_bosonic_subgroup(["gz"]))
    cont = charge_continuity(prev, nxt)
    assert labels(cont["e"]) == {"rz", "bz"}
    assert labels(cont["m"]) == {"gx", "gy"}


def test_charge_continuity_rejects_shared_label():
    prev = condense(validate_bosonic_subgroup(["rx"]), em_class="ry")
    nxt = condense(validate_bosonic_subgroup(["ry"]))
    with pytest.raises(InvalidTransition):
        charge_continuity(prev, nxt)


def _walk_cycle(schedule, e_start):
    """Propagate an e/m naming around a cyclic schedule; returns the final
    named condensate of the first step after one full cycle."""
    conds = [condense(validate_bosonic_subgroup([s])) for s in schedule]
    cur = with_em_assignment(conds[0], e_start)
    for nxt in conds[1:] + [conds[0]]:
        cont = charge_continuity(cur, nxt)
        cur = with_em_assignment(nxt, cont["e"])
        # consistency: the m class carried over must be the class named m
        assert cur.class_named("m") == cont["m"]
    return cur


def test_six_step_cycle_has_no_net_automorphism():
    start = condense(validate_bosonic_subgroup(["rx"]), em_class="ry")
    final = _walk_cycle(["rx", "gz", "bx", "rz", "gx", "bz"], "ry")
    assert final.em_assignment == start.em_assignment


def test_honeycomb_cycle_net_automorphism_reported():
    # the three-step cycle is computed, not asserted: record whether the
    # e/m naming returns to itself after one period
    start = condense(validate_bosonic_subgroup(["rx"]), em_class="ry")
    final = _walk_cycle(["rx", "gy", "bz"], "ry")
    assert set(final.em_assignment.values()) == {"1", "e", "m", "f"}
    swapped = final.em_assignment != start.em_assignment
    # freeze the computed answer so behaviour changes are caught
    assert swapped is True


def test_wall_taxonomy_counts():
    walls = classify_semitransparent_walls()
    assert len(walls) == 162
    assert wall_class_counts() == {
        "1A": 9, "1B": 9,
        "2A": 18, "2B": 18,
        "3A": 18, "3B": 18,
        "4A": 36, "4B": 36,
    }


def test_condensation_commutes_with_automorphisms():
    autos = enumerate_automorphisms(2)
    for lbl in BOSON_LABELS:
        B = validate_bosonic_subgroup([lbl])
        cond = condense(B)
        for phi in autos[::7]:
            mapped = validate_bosonic_subgroup([phi(from_label(lbl))])
            cond2 = condense(mapped)
            image_classes = {
                frozenset(phi(a) for a in c) for c in cond.deconfined_classes
            }
            assert image_classes == set(cond2.deconfined_classes)
            assert {phi(a) for a in cond.confined} == set(cond2.confined)
