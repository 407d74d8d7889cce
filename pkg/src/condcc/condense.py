"""Anyon-level condensation: bosonic subgroups, condensates, wall taxonomy.

Condensing a bosonic subgroup B identifies its elements with the vacuum.
Anyons braiding trivially with all of B survive (deconfined) as cosets aB;
the rest confine.  The module also enumerates Lagrangian subgroups, the
single-boson (partial) condensations with their e/m labelings, the
charge-continuity maps between consecutive condensates, and the taxonomy
of semi-transparent domain walls between two partially condensed phases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .anyons import (
    Anyon,
    all_anyons,
    from_label,
    fuse,
    label_color,
    label_pauli,
    monodromy,
    spin,
    to_label,
    vacuum,
    BOSON_LABELS,
)


class SpinViolation(ValueError):
    """A proposed condensate contains a fermion."""


class BraidingViolation(ValueError):
    """A proposed condensate contains a mutually braiding pair."""


class InvalidTransition(ValueError):
    """Consecutive condensates share a color or Pauli label."""


def _closure(gens: list[Anyon]) -> frozenset[Anyon]:
    n = gens[0].n if gens else 1
    elems = {vacuum(n)}
    frontier = list(gens)
    while frontier:
        a = frontier.pop()
        new = {fuse(a, b) for b in elems} | {a}
        added = new - elems
        elems |= added
        frontier.extend(added)
    return frozenset(elems)


@dataclass(frozen=True)
class BosonSubgroup:
    """A fusion-closed set of mutually trivially braiding bosons."""

    generators: tuple[Anyon, ...]
    elements: frozenset[Anyon]

    @property
    def n(self) -> int:
        return next(iter(self.elements)).n

    def labels(self) -> list[str]:
        return sorted(to_label(a) for a in self.elements)

    def __contains__(self, a: Anyon) -> bool:
        return a in self.elements


def validate_bosonic_subgroup(gens) -> BosonSubgroup:
    """Close the generators under fusion and check the condensation rules.

    Raises SpinViolation if any element is a fermion and BraidingViolation
    if any pair braids non-trivially.
    """
    gens = [from_label(g) if isinstance(g, str) else g for g in gens]
    if not gens:
        raise ValueError("need at least one generator (use the vacuum)")
    if len({a.n for a in gens}) != 1:
        raise ValueError("generators must share one layer count")
    elements = _closure(gens)
    for a, b in itertools.combinations(sorted(gens), 2):
        if monodromy(a, b) != 1:
            raise BraidingViolation(f"{a!r} and {b!r} braid non-trivially")
    for a in sorted(elements):
        if spin(a) != 1:
            raise SpinViolation(f"{a!r} has spin -1")
    for a, b in itertools.combinations(sorted(elements), 2):
        if monodromy(a, b) != 1:
            raise BraidingViolation(f"{a!r} and {b!r} braid non-trivially")
    return BosonSubgroup(tuple(gens), elements)


def _coset(a: Anyon, B: BosonSubgroup) -> frozenset[Anyon]:
    return frozenset(fuse(a, b) for b in B.elements)


def coset_representative(coset: frozenset[Anyon]) -> Anyon:
    """Canonical (lexicographically least bit pattern) member of a coset."""
    return min(coset, key=lambda a: a.bits)


@dataclass(frozen=True)
class Condensate:
    """Result of condensing a bosonic subgroup in an n-layer model.

    deconfined_classes are the cosets aB of anyons that braid trivially
    with all of B (the first class is B itself, the new vacuum); confined
    anyons braid non-trivially with some condensed boson.  em_assignment
    optionally names each deconfined class as the 1/e/m/f of the condensed
    phase (only for single-boson condensations of a 2-layer model).
    """

    condensed: BosonSubgroup
    deconfined_classes: tuple[frozenset[Anyon], ...]
    confined: frozenset[Anyon]
    em_assignment: dict | None = None

    @property
    def n(self) -> int:
        return self.condensed.n

    def class_of(self, a: Anyon) -> frozenset[Anyon] | None:
        for cls in self.deconfined_classes:
            if a in cls:
                return cls
        return None

    def class_named(self, charge: str) -> frozenset[Anyon]:
        if self.em_assignment is None:
            raise ValueError("condensate has no e/m assignment")
        for cls, name in self.em_assignment.items():
            if name == charge:
                return cls
        raise KeyError(charge)

    def to_json(self) -> dict:
        def names(anyons):
            if self.n == 2:
                return sorted(to_label(a) for a in anyons)
            return [a.to_json() for a in sorted(anyons)]

        out = {
            "condensed": names(self.condensed.elements),
            "deconfined_classes": [names(c) for c in self.deconfined_classes],
            "confined": names(self.confined),
        }
        if self.em_assignment is not None:
            out["em_assignment"] = {
                self.em_assignment[c]: names(c) for c in self.deconfined_classes
            }
        return out


def condense(B: BosonSubgroup, em_class: frozenset[Anyon] | str | None = None) -> Condensate:
    """Condense B; optionally name the deconfined class holding the e charge.

    em_class may be a deconfined class or (for single-boson condensations)
    an anyon label inside the desired e class.
    """
    n = B.n
    deconfined = [
        a
        for a in all_anyons(n)
        if all(monodromy(a, b) == 1 for b in B.elements)
    ]
    confined = frozenset(a for a in all_anyons(n) if a not in set(deconfined))
    classes: list[frozenset[Anyon]] = []
    seen: set[Anyon] = set()
    for a in deconfined:
        if a in seen:
            continue
        c = _coset(a, B)
        seen |= c
        classes.append(c)
    # stable order: vacuum class first, then by canonical representative
    classes.sort(key=lambda c: coset_representative(c).bits)
    cond = Condensate(B, tuple(classes), confined)
    if em_class is not None:
        cond = with_em_assignment(cond, em_class)
    return cond


def with_em_assignment(cond: Condensate, em_class) -> Condensate:
    """Attach an e/m/f naming of the deconfined classes (toric-code phases).

    Valid when the condensate has 4 classes with toric-code data: vacuum,
    two bosonic classes, one fermionic class.  em_class selects which
    bosonic class is called e; the other becomes m.
    """
    if isinstance(em_class, str):
        em_class = cond.class_of(from_label(em_class))
    if len(cond.deconfined_classes) != 4:
        raise ValueError("e/m naming requires a 4-class (toric code) condensate")
    assignment: dict[frozenset[Anyon], str] = {}
    for cls in cond.deconfined_classes:
        s = spin(next(iter(cls)))
        if cls == cond.condensed.elements:
            assignment[cls] = "1"
        elif s == -1:
            assignment[cls] = "f"
        elif cls == em_class:
            assignment[cls] = "e"
        else:
            assignment[cls] = "m"
    if sorted(assignment.values()) != ["1", "e", "f", "m"]:
        raise ValueError("classes do not carry toric-code modular data")
    return Condensate(cond.condensed, cond.deconfined_classes, cond.confined, assignment)


def enumerate_lagrangians(n: int = 2) -> list[BosonSubgroup]:
    """All maximal bosonic subgroups (order 2^n) by exhaustive subspace search."""
    anyons = [a for a in all_anyons(n) if not a.is_vacuum]
    found: dict[frozenset[Anyon], BosonSubgroup] = {}
    for gens in itertools.combinations(anyons, n):
        elems = _closure(list(gens))
        if len(elems) != 2 ** n:
            continue
        key = frozenset(elems)
        if key in found:
            continue
        if any(spin(a) != 1 for a in elems):
            continue
        if any(
            monodromy(a, b) != 1 for a, b in itertools.combinations(sorted(elems), 2)
        ):
            continue
        found[key] = BosonSubgroup(tuple(gens), key)
    return sorted(found.values(), key=lambda B: sorted(a.bits for a in B.elements))


def single_boson_condensates() -> dict[str, Condensate]:
    """The 9 condensates of one color-code boson, keyed by boson label."""
    out = {}
    for lbl in BOSON_LABELS:
        B = validate_bosonic_subgroup([lbl])
        out[lbl] = condense(B)
    return out


def enumerate_partial_condensation_walls() -> list[tuple[str, Condensate]]:
    """All 18 toric-code condensations: 9 bosons x 2 e/m namings."""
    out = []
    for lbl, cond in single_boson_condensates().items():
        boson_classes = [
            c
            for c in cond.deconfined_classes
            if spin(next(iter(c))) == 1 and c != cond.condensed.elements
        ]
        for e_cls in boson_classes:
            out.append((lbl, with_em_assignment(cond, e_cls)))
    return out


def charge_continuity(prev: Condensate, nxt: Condensate) -> dict[str, frozenset[Anyon]]:
    """Carry the e/m naming of `prev` onto the deconfined classes of `nxt`.

    Requires every non-trivial condensed boson of `nxt` to be confined in
    `prev` (else measuring the new checks would read out logical charge).
    Each named class of `prev` intersects exactly one class of `nxt`.
    """
    if prev.em_assignment is None:
        raise ValueError("previous condensate needs an e/m assignment")
    for b in nxt.condensed.elements:
        if b.is_vacuum:
            continue
        if b not in prev.confined:
            raise InvalidTransition(
                f"condensed boson {b!r} is not confined in the previous phase"
            )
    out: dict[str, frozenset[Anyon]] = {}
    for charge in ("e", "m"):
        prev_cls = prev.class_named(charge)
        hits = {
            cls
            for cls in nxt.deconfined_classes
            for a in prev_cls
            if a in cls
        }
        if len(hits) != 1:
            raise InvalidTransition(
                f"{charge} class does not map to a unique class of the next phase"
            )
        out[charge] = hits.pop()
    return out


@dataclass(frozen=True)
class WallClass:
    """A semi-transparent wall between two single-boson condensed phases.

    top/bottom are the condensed boson labels; orientation A keeps the e/m
    naming aligned across the wall, B swaps it.  class_id groups walls by
    whether the two bosons share both labels (1), just the Pauli label (2),
    just the color (3), or neither (4).
    """

    top: str
    bottom: str
    orientation: str  # "A" or "B"
    class_id: int


def classify_semitransparent_walls() -> list[WallClass]:
    """All 162 walls: ordered boson pairs x two e/m orientations."""
    walls = []
    for top in BOSON_LABELS:
        for bottom in BOSON_LABELS:
            same_c = label_color(top) == label_color(bottom)
            same_p = label_pauli(top) == label_pauli(bottom)
            if same_c and same_p:
                cid = 1
            elif same_p:
                cid = 2
            elif same_c:
                cid = 3
            else:
                cid = 4
            for orient in ("A", "B"):
                walls.append(WallClass(top, bottom, orient, cid))
    return walls


def wall_class_counts() -> dict[str, int]:
    counts: dict[str, int] = {}
    for w in classify_semitransparent_walls():
        key = f"{w.class_id}{w.orientation}"
        counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items()))
