"""Dynamically condensed color codes: measurement schedules and detectors.

A schedule is a cyclic list of boson labels; the step for boson (c, p)
measures the two-body Pauli-p checks on every color-c edge of a parent
color-code lattice.  Consecutive steps must share neither color nor Pauli
label.  Running a schedule noiselessly through the tableau simulator yields
the instantaneous stabilizer groups (verified against the statically
condensed groups), a maintained pair of outer logical operators, and the
detection cells: maximal independent deterministic parities of check
outcomes, read off the tableau's outcome-relation echelon.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .anyons import from_label
from .condense import InvalidTransition, validate_bosonic_subgroup
from .lattice import CodePatch, condense_region, full_region
from .pauli import PauliOp, StabilizerGroup, commutes
from .tableau import Tableau, bit_source

FCC_SCHEDULE = ("rx", "gz", "bx", "rz", "gx", "bz")
HONEYCOMB_SCHEDULE = ("rx", "gy", "bz")


@dataclass(frozen=True)
class Schedule:
    """Cyclic sequence of condensed bosons, one per measurement step."""

    steps: tuple[str, ...]

    def __post_init__(self):
        for s in self.steps:
            if len(s) != 2 or s[0] not in "rgb" or s[1] not in "xyz":
                raise ValueError(f"step {s!r} is not a color-code boson label")

    def __len__(self):
        return len(self.steps)

    def label(self, t: int) -> str:
        return self.steps[t % len(self.steps)]


def validate_schedule(s: Schedule) -> None:
    """Every cyclically adjacent pair must differ in color and in Pauli."""
    steps = s.steps
    for i in range(len(steps)):
        a, b = steps[i - 1], steps[i]
        if a[0] == b[0] or a[1] == b[1]:
            raise InvalidTransition(
                f"step {i}: {a} -> {b} shares a {'color' if a[0] == b[0] else 'Pauli'} label"
            )


# --- checks -------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    """One two-body edge check (or single-qubit boundary check)."""

    id: object                 # lattice-level identifier (edge index or qubit)
    op: PauliOp


def step_checks(patch: CodePatch, label: str) -> list[Check]:
    """The edge checks measured when condensing the given boson."""
    color, pauli = label[0], label[1].upper()
    out = []
    for i, e in enumerate(patch.lattice.edges):
        if e.color == color:
            out.append(Check(i, PauliOp.from_terms(patch.n, {e.u: pauli, e.v: pauli})))
    return out


def _condensate_patch(patch: CodePatch, label: str) -> CodePatch:
    sub = validate_bosonic_subgroup([from_label(label)])
    return condense_region(patch, sub, full_region(patch))


# --- noiseless runs -----------------------------------------------------------


@dataclass
class MeasurementRef:
    index: int        # global measurement record index
    step: int         # global step number (0-based, includes warmup)
    check: object     # check id within the step
    qubits: tuple[int, ...]
    deterministic: bool
    mask: int         # provenance mask over record indices


@dataclass
class Trace:
    patch: CodePatch
    schedule: Schedule
    warmup_steps: int
    refs: list[MeasurementRef]
    tableau: Tableau
    step_groups: dict[int, StabilizerGroup]      # per reported step
    logical_frame: dict[int, tuple[PauliOp, PauliOp]]
    metadata: dict = field(default_factory=dict)

    @property
    def steps_run(self) -> int:
        return self.warmup_steps + len(self.step_groups)


def _repair_logical(L: PauliOp, new_gens, pool) -> PauliOp:
    """Multiply L by a product of pool operators so it commutes with new_gens."""
    b = np.array([0 if commutes(L, g) else 1 for g in new_gens], dtype=np.uint8)
    if not b.any():
        return L
    M = np.array(
        [[0 if commutes(r, g) else 1 for g in new_gens] for r in pool],
        dtype=np.uint8,
    )
    v = gf2.solve(M, b)
    if v is None:
        raise ValueError("maintained logical was destroyed by the schedule")
    out = L
    for i in np.nonzero(v)[0]:
        out = out * pool[int(i)]
    return PauliOp(out.x, out.z, 0)


def run_noiseless(
    patch: CodePatch,
    schedule: Schedule,
    periods: int = 1,
    warmup_periods: int = 1,
    seed: int = 0,
    verify_groups: bool = True,
) -> Trace:
    """Measure the schedule's checks with no noise.

    One warmup period establishes the steady state; afterwards the
    instantaneous group following each step is checked (up to signs)
    against the statically condensed group of that step's boson, and an
    anticommuting outer-logical pair is carried through every step.
    """
    validate_schedule(schedule)
    period = len(schedule)
    warmup = warmup_periods * period
    total = warmup + periods * period
    # data qubits start maximally mixed (Bell-paired with hidden ancillas),
    # so every deterministic outcome is forced by the schedule alone
    tab = Tableau.bell_pairs(patch.n, outcome_source=bit_source(seed))

    def embed(op: PauliOp) -> PauliOp:
        pad = np.zeros(patch.n, dtype=np.uint8)
        return PauliOp(np.concatenate([op.x, pad]),
                       np.concatenate([op.z, pad]), op.phase)

    condensates = {lbl: _condensate_patch(patch, lbl) for lbl in set(schedule.steps)}
    checks = {lbl: step_checks(patch, lbl) for lbl in set(schedule.steps)}

    refs: list[MeasurementRef] = []
    step_groups: dict[int, StabilizerGroup] = {}
    logical_frame: dict[int, tuple[PauliOp, PauliOp]] = {}
    maintained: list[tuple[PauliOp, PauliOp]] = []

    for t in range(total):
        label = schedule.label(t)
        for chk in checks[label]:
            r = tab.measure(embed(chk.op))
            refs.append(
                MeasurementRef(r.index, t, chk.id, chk.op.support,
                               r.deterministic, r.prov_mask)
            )
        cond = condensates[label]
        if t == warmup - 1:
            maintained = [
                (PauliOp(x.x, x.z, 0), PauliOp(z.x, z.z, 0))
                for x, z in cond.logicals
            ]
        if t < warmup:
            continue
        if verify_groups:
            state = tab.stabilizer_group()
            for g in cond.stabilizers.generators:
                member, _ = state.contains(embed(g))
                if not member:
                    raise AssertionError(
                        f"step {t}: instantaneous group missing a {label} "
                        "condensate generator"
                    )
        # carry the logical frame across the step
        prev_label = schedule.label(t - 1)
        pool = list(condensates[prev_label].stabilizers.generators)
        new_gens = cond.stabilizers.generators
        maintained = [
            (_repair_logical(x, new_gens, pool), _repair_logical(z, new_gens, pool))
            for x, z in maintained
        ]
        for x, z in maintained:
            if commutes(x, z):
                raise AssertionError(f"step {t}: logical pair stopped anticommuting")
            for op in (x, z):
                member, _ = cond.stabilizers.contains(op)
                if member:
                    raise AssertionError(
                        f"step {t}: maintained logical entered the group"
                    )
        step_groups[t] = cond.stabilizers
        logical_frame[t] = tuple(maintained[0]) if maintained else ()
        if len(maintained) > 1:
            logical_frame[t] = maintained[0]
        logical_frame[t] = maintained[0]
    return Trace(
        patch,
        schedule,
        warmup,
        refs,
        tab,
        step_groups,
        logical_frame,
        {"seed": seed, "periods": periods, "maintained_pairs": len(maintained)},
    )


# --- planar patches with boundary schedules ------------------------------------


def planar_parent_patch(w: int, h: int) -> CodePatch:
    """The fixed planar footprint: a parent rectangle with color boundaries
    on the left/right and Pauli boundaries on the top/bottom."""
    from .lattice import BoundarySpec, build_rectangular

    return build_rectangular(w, h, BoundarySpec(("r", "x", "r", "x")))


def boundary_schedule(schedule: Schedule, rough0: str = "r") -> list[tuple[str, str]]:
    """Per-step (rough, smooth) parent boundary labels by charge continuity.

    At the step condensing boson (c, p) the two boundary labels are exactly
    c and p: the electric (rough) charges and magnetic (smooth) charges are
    the deconfined anyons sharing the boson's color and Pauli labels.  The
    electric charge surviving a transition fixes the next rough label: it
    alternates between the boson's Pauli label and its color label.

    Returns one (rough, smooth) pair per step over the label period (twice
    the schedule length when the schedule has odd length).
    """
    steps = schedule.steps
    c0, p0 = steps[0][0], steps[0][1]
    if rough0 not in (c0, p0):
        raise ValueError(
            f"initial rough label must be {c0!r} or {p0!r} for first step {steps[0]!r}"
        )
    reps = 1 if len(steps) % 2 == 0 else 2
    labels = []
    rough = rough0
    for t in range(reps * len(steps)):
        c, p = steps[t % len(steps)][0], steps[t % len(steps)][1]
        if t > 0:
            rough = p if rough in "rgb" else c
        smooth = p if rough == c else c
        labels.append((rough, smooth))
    # the labels must close up cyclically for the pattern to repeat
    nxt = steps[0]
    wrap = nxt[1] if rough in "rgb" else nxt[0]
    if wrap != labels[0][0]:
        raise InvalidTransition("boundary labels do not recur after the label period")
    return labels


def _side_tests(patch: CodePatch):
    coords = patch.lattice.coords
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    x_lo, x_hi, y_lo, y_hi = min(xs), max(xs), min(ys), max(ys)
    eps, band = 1e-6, 0.3

    def on_lr(q):
        return coords[q][0] < x_lo + eps or coords[q][0] > x_hi - eps

    def on_tb(q):
        return coords[q][1] < y_lo + band or coords[q][1] > y_hi - band

    return on_lr, on_tb


def planar_step_checks(
    patch: CodePatch, label: str, rough: str, smooth: str
) -> list[Check]:
    """Checks for one step on a planar patch: the bulk edge checks plus
    single-qubit measurements on dangling qubits (qubits whose edge of the
    step's color was cut away) along the boundaries whose current parent
    label is the step's Pauli label."""
    color, pauli = label[0], label[1].upper()
    out = step_checks(patch, label)
    has_edge = [False] * patch.n
    for e in patch.lattice.edges:
        if e.color == color:
            has_edge[e.u] = has_edge[e.v] = True
    on_lr, on_tb = _side_tests(patch)
    for q in range(patch.n):
        if has_edge[q]:
            continue
        if (rough == label[1] and on_lr(q)) or (smooth == label[1] and on_tb(q)):
            out.append(Check(("q", q), PauliOp.from_terms(patch.n, {q: pauli})))
    return out


def _sympl(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    h = A.shape[1] // 2
    return (A[:, :h] @ B[:, h:].T + A[:, h:] @ B[:, :h].T) % 2


def _evolve_group(G: np.ndarray | None, check_rows: np.ndarray) -> np.ndarray:
    """Signless instantaneous-group update: keep the subgroup commuting
    with all measured checks, then adjoin the checks."""
    if G is None or len(G) == 0:
        M = gf2.rref(check_rows.copy())[0]
        return M[~np.all(M == 0, axis=1)]
    K = gf2.null_space(_sympl(G, check_rows).T)
    kept = (K @ G) % 2 if K.size else np.zeros((0, G.shape[1]), dtype=np.uint8)
    M = gf2.rref(np.vstack([kept, check_rows]).copy())[0]
    return M[~np.all(M == 0, axis=1)]


def _rows_to_group(rows: np.ndarray, n: int) -> StabilizerGroup:
    gens = [PauliOp(r[:n], r[n:], 0) for r in rows]
    return StabilizerGroup(gens, validate=False)


def run_noiseless_planar(
    patch: CodePatch,
    schedule: Schedule,
    periods: int = 1,
    warmup_periods: int = 2,
    seed: int = 0,
    rough0: str = "r",
) -> Trace:
    """Measure the schedule on a planar patch with its boundary schedule.

    The instantaneous group is tracked by linear algebra; after warmup its
    rank must equal n - 1 (one encoded qubit) at every step, and a single
    anticommuting logical pair is carried through the whole run.
    """
    validate_schedule(schedule)
    labels = boundary_schedule(schedule, rough0)
    bperiod = len(labels)
    period = len(schedule)
    warmup = warmup_periods * period
    total = warmup + periods * period
    n = patch.n
    tab = Tableau.bell_pairs(n, outcome_source=bit_source(seed))

    def embed(op: PauliOp) -> PauliOp:
        pad = np.zeros(n, dtype=np.uint8)
        return PauliOp(np.concatenate([op.x, pad]), np.concatenate([op.z, pad]), op.phase)

    step_check_sets = [
        planar_step_checks(patch, schedule.label(t), *labels[t % bperiod])
        for t in range(bperiod)
    ]
    footprint = [
        frozenset(q for chk in cs for q in chk.op.support) for cs in step_check_sets
    ]
    if set().union(*footprint) != set(range(n)):
        raise AssertionError("some qubit is never measured over a boundary period")

    refs: list[MeasurementRef] = []
    step_groups: dict[int, StabilizerGroup] = {}
    logical_frame: dict[int, tuple[PauliOp, PauliOp]] = {}
    maintained: tuple[PauliOp, PauliOp] | None = None
    G: np.ndarray | None = None

    for t in range(total):
        checks = step_check_sets[t % bperiod]
        for chk in checks:
            r = tab.measure(embed(chk.op))
            refs.append(
                MeasurementRef(r.index, t, chk.id, chk.op.support,
                               r.deterministic, r.prov_mask)
            )
        prev_rows = G
        check_rows = np.array(
            [np.concatenate([c.op.x, c.op.z]) for c in checks], dtype=np.uint8
        )
        G = _evolve_group(G, check_rows)
        if t == warmup - 1:
            if len(G) != n - 1:
                raise AssertionError(
                    f"planar steady state encodes {n - len(G)} qubits, expected 1"
                )
            x, z = _rows_to_group(G, n).logical_operators()[0]
            maintained = (PauliOp(x.x, x.z, 0), PauliOp(z.x, z.z, 0))
        if t < warmup:
            continue
        if len(G) != n - 1:
            raise AssertionError(f"step {t}: instantaneous group rank {len(G)}")
        pool = [PauliOp(r[:n], r[n:], 0) for r in prev_rows]
        new_gens = [c.op for c in checks]
        maintained = (
            _repair_logical(maintained[0], new_gens, pool),
            _repair_logical(maintained[1], new_gens, pool),
        )
        x, z = maintained
        if commutes(x, z):
            raise AssertionError(f"step {t}: logical pair stopped anticommuting")
        for op in (x, z):
            if gf2.in_rowspace(G, np.concatenate([op.x, op.z])):
                raise AssertionError(f"step {t}: maintained logical entered the group")
        step_groups[t] = _rows_to_group(G, n)
        logical_frame[t] = maintained
    return Trace(
        patch,
        schedule,
        warmup,
        refs,
        tab,
        step_groups,
        logical_frame,
        {
            "seed": seed,
            "periods": periods,
            "boundary_labels": labels,
            "footprint": footprint,
            "maintained_pairs": 1,
        },
    )


# --- detection cells ----------------------------------------------------------


@dataclass(frozen=True)
class Detector:
    """A deterministic parity of check outcomes (expected value +1)."""

    refs: tuple[tuple[int, object], ...]      # (step, check id), sorted
    indices: tuple[int, ...]                  # record indices
    qubits: tuple[int, ...]                   # union of check supports

    @property
    def size(self) -> int:
        return len(self.refs)

    @property
    def first_step(self) -> int:
        return self.refs[0][0]

    @property
    def last_step(self) -> int:
        return self.refs[-1][0]


def _sparsify(masks: list[int]) -> list[int]:
    """Greedily reduce each parity mask by the ones already finalized, so
    the basis consists of the most local deterministic parities found."""
    final: list[int] = []
    for m in masks:
        improved = True
        while improved:
            improved = False
            for f in final:
                cand = m ^ f
                if cand and cand.bit_count() < m.bit_count():
                    m = cand
                    improved = True
        final.append(m)
    # one backward pass: earlier masks can often be shrunk by later ones
    for i in range(len(final)):
        improved = True
        while improved:
            improved = False
            for j, f in enumerate(final):
                if i == j:
                    continue
                cand = final[i] ^ f
                if cand and cand.bit_count() < final[i].bit_count():
                    final[i] = cand
                    improved = True
    return final


def _face_entries(trace: Trace) -> list[list[tuple[int, str, int]]]:
    """Per-face entries (step, pauli letter, record mask): the group of a
    step's checks whose edges lie on the face's boundary.  Each entry's
    operator product is a weight-6 face operator."""
    lattice = trace.patch.lattice
    face_edges, face_verts = [], []
    for face in lattice.faces:
        vs = set(face.vertices)
        face_verts.append(vs)
        face_edges.append(
            {i for i, e in enumerate(lattice.edges) if e.u in vs and e.v in vs}
        )
    per_step: dict[int, list[MeasurementRef]] = {}
    for r in trace.refs:
        per_step.setdefault(r.step, []).append(r)
    entries_per_face: list[list[tuple[int, str, int]]] = [[] for _ in lattice.faces]
    for t in sorted(per_step):
        letter = trace.schedule.label(t)[1]
        for fi, edges in enumerate(face_edges):
            mask = 0
            for r in per_step[t]:
                if r.check in edges:
                    mask |= 1 << r.index
                elif (isinstance(r.check, tuple) and r.check[0] == "q"
                      and r.check[1] in face_verts[fi]):
                    # single-qubit boundary check on a cut face's vertex
                    mask |= 1 << r.index
            if mask:
                entries_per_face[fi].append((t, letter, mask))
    return entries_per_face


def _window_candidates(entries_per_face, max_window: int):
    """Candidate deterministic parities: subsets of a face's entries whose
    face operators multiply to the identity (all Pauli letter counts even,
    or all odd), yielded in order of increasing entry span."""
    for width in range(2, max_window + 1):
        for entries in entries_per_face:
            for start in range(len(entries) - width + 1):
                window = entries[start : start + width]
                # subsets that include both endpoints of the window
                for bits in range(1 << max(width - 2, 0)):
                    chosen = [window[0], window[-1]] + [
                        window[1 + j] for j in range(width - 2) if bits >> j & 1
                    ]
                    counts = {"x": 0, "y": 0, "z": 0}
                    mask = 0
                    for _, letter, m in chosen:
                        counts[letter] += 1
                        mask |= m
                    parities = {c % 2 for c in counts.values()}
                    if len(parities) == 1:  # all even or all odd -> identity
                        yield mask


def _face_candidate_masks(trace: Trace):
    """Face-local candidate detectors, most local first: plaquette values
    inferred at two different times."""
    yield from _window_candidates(_face_entries(trace), 2 * len(trace.schedule) + 2)


def derive_detectors(trace: Trace, include_warmup: bool = False) -> list[Detector]:
    """A maximal independent family of deterministic check parities.

    Face-local candidates (plaquette values inferred at two different
    times) are tried first, most local first, and verified against the
    tableau's outcome-relation echelon; the family is then completed with
    any remaining deterministic parities from measurement provenance.
    """
    by_index = {r.index: r for r in trace.refs}
    tab = trace.tableau

    echelon: dict[int, int] = {}

    def reduce(m: int) -> int:
        while m:
            lead = m.bit_length() - 1
            if lead not in echelon:
                break
            m ^= echelon[lead]
        return m

    def admit(m: int) -> bool:
        r = reduce(m)
        if r == 0:
            return False
        echelon[r.bit_length() - 1] = r
        return True

    def indices_of(m: int) -> list[int]:
        out = []
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return out

    def in_window(m: int) -> bool:
        if include_warmup:
            return True
        return any(by_index[i].step >= trace.warmup_steps for i in indices_of(m))

    kept: list[int] = []
    for mask in _face_candidate_masks(trace):
        if not in_window(mask):
            continue
        if reduce(mask) == 0:
            continue
        if tab.parity_is_deterministic(indices_of(mask)) is None:
            continue
        if admit(mask):
            kept.append(mask)
    # complete the basis from raw provenance masks
    residual = []
    for r in trace.refs:
        if not r.deterministic:
            continue
        if not include_warmup and r.step < trace.warmup_steps:
            continue
        m = reduce((1 << r.index) | r.mask)
        if m:
            residual.append(m)
    for m in _sparsify(residual):
        if admit(m):
            kept.append(m)
    out = []
    for m in kept:
        members = indices_of(m)
        refs = sorted(
            ((by_index[i].step, by_index[i].check) for i in members),
            key=lambda rc: (rc[0], repr(rc[1])),
        )
        qubits = sorted({q for i in members for q in by_index[i].qubits})
        out.append(Detector(tuple(refs), tuple(sorted(members)), tuple(qubits)))
    return sorted(out, key=lambda d: (d.first_step, d.last_step, repr(d.refs)))


def live_cell_counts(detectors: list[Detector], n: int, instant: int) -> list[int]:
    """How many detection cells cover each qubit at the instant between
    steps `instant` and `instant`+1 (cells opened but not yet closed)."""
    counts = [0] * n
    for d in detectors:
        if d.first_step <= instant < d.last_step:
            for q in d.qubits:
                counts[q] += 1
    return counts
