import numpy as np
import pytest
from hypothesis import given, strategies as st

from condcc.pauli import PauliOp, StabilizerGroup, commutes, echelon_paulis, logicals


P = PauliOp.from_string


def test_multiplication_phases():
    assert (P("X") * P("Y")).phase == 1          # XY = iZ
    assert (P("Y") * P("X")).phase == 3          # YX = -iZ
    assert (P("X") * P("Z")).phase == 3          # XZ = -iY
    assert P("X") * P("X") == P("I")
    assert P("Y") * P("Y") == P("I")
    xz = P("X") * P("Z")
    with pytest.raises(ValueError):
        _ = xz.sign  # anti-Hermitian product has no real sign


def test_sign_composition():
    assert (P("-X") * P("Y")).phase == 3      # (-X)Y = -iZ
    assert (P("XX") * P("ZZ")) == P("-YY")
    assert (P("XXXX") * P("ZZZZ")) == P("YYYY")
    assert (P("-XIX") * P("-XIX")) == P("III")


def test_string_roundtrip_and_support():
    p = P("-XIZYI")
    assert p.to_string() == "-XIZYI"
    assert p.support == (0, 2, 3)
    assert p.weight == 3
    assert p.letter(3) == "Y"
    assert PauliOp.from_terms(5, {0: "X", 2: "Z", 3: "Y"}, sign=-1) == p


def test_commutation():
    assert commutes(P("XX"), P("ZZ"))
    assert not commutes(P("XI"), P("ZI"))
    assert commutes(P("XYZ"), P("XYZ"))
    assert commutes(P("XYZ"), P("ZYX"))       # two anticommuting sites cancel
    assert not commutes(P("XYZ"), P("ZYZ"))


PAULI_STRINGS = st.integers(2, 5).flatmap(
    lambda n: st.tuples(
        *(
            [st.sampled_from("+-")]
            + [st.sampled_from("IXYZ") for _ in range(n)]
        )
    ).map("".join)
)


@given(PAULI_STRINGS, PAULI_STRINGS)
def test_product_properties(sa, sb):
    if len(sa) != len(sb):
        sb = sb[0] + (sb[1:] + sa[1:])[: len(sa) - 1]
    a, b = P(sa), P(sb)
    # a b b a = identity exactly, including phase
    assert a * (b * (b * a)) == PauliOp.identity(a.n)
    # commutation matches whether the products agree
    assert commutes(a, b) == (a * b == b * a)
    if not commutes(a, b):
        assert a * b == (b * a).negated()


@given(PAULI_STRINGS, PAULI_STRINGS, PAULI_STRINGS)
def test_product_associative(sa, sb, sc):
    n = min(len(sa), len(sb), len(sc)) - 1
    a, b, c = (P(s[0] + s[1 : 1 + n]) for s in (sa, sb, sc))
    assert (a * b) * c == a * (b * c)


def test_group_rejects_anticommuting_generators():
    with pytest.raises(ValueError):
        StabilizerGroup([P("XI"), P("ZI")])


def test_group_rejects_minus_identity():
    with pytest.raises(ValueError):
        StabilizerGroup([P("XX"), P("-XX")]).canonical_form


def test_group_rank_and_redundancy():
    g = StabilizerGroup([P("ZZI"), P("IZZ"), P("ZIZ")])
    assert g.rank == 2
    assert g.k == 1


def test_contains_with_sign():
    bell = StabilizerGroup([P("XX"), P("ZZ")])
    member, sign = bell.contains(P("-YY"))
    assert member and sign == 1
    member, sign = bell.contains(P("YY"))
    assert member and sign == -1
    member, sign = bell.contains(P("XZ"))
    assert not member and sign is None
    member, sign = bell.contains(P("II"))
    assert member and sign == 1


def test_echelon_is_independent_and_spans():
    gens = [P("XXXX"), P("ZZZZ"), P("YYYY"), P("IIII")]
    rows = echelon_paulis(gens)
    assert len(rows) == 2
    g = StabilizerGroup(rows)
    for p in gens:
        member, sign = g.contains(p)
        assert member and sign == 1


def _check_logical_pairs(group):
    pairs = logicals(group)
    assert len(pairs) == group.k
    flat = [op for pair in pairs for op in pair]
    for i, a in enumerate(flat):
        for g in group.canonical_form:
            assert commutes(a, g)
        member, _ = group.contains(a)
        assert not member
        for j, b in enumerate(flat):
            same_pair = i // 2 == j // 2
            if same_pair and i != j:
                assert not commutes(a, b)
            elif i != j:
                assert commutes(a, b)


def test_logicals_422():
    _check_logical_pairs(StabilizerGroup([P("XXXX"), P("ZZZZ")]))


def test_logicals_repetition():
    _check_logical_pairs(StabilizerGroup([P("ZZIII"), P("IZZII"), P("IIZZI"), P("IIIZZ")]))


def test_logicals_steane_like_five_qubit():
    # the [[5,1,3]] code
    gens = [P("XZZXI"), P("IXZZX"), P("XIXZZ"), P("ZXIXZ")]
    g = StabilizerGroup(gens)
    assert g.k == 1
    _check_logical_pairs(g)


def test_logicals_trivial_state():
    g = StabilizerGroup([P("ZI"), P("IZ")])
    assert g.k == 0
    assert logicals(g) == []
