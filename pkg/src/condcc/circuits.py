"""Explicit measurement circuits for schedule-driven codes.

A circuit is a flat list of operations over data qubits (ids 0..n-1) and
per-edge ancillas (ids n..n+#edges-1):

* ``("reset", q, basis)`` -- reset to the +1 eigenstate of X or Z,
* ``("cp", pauli, a, d)`` -- controlled-Pauli with control a and target d,
* ``("measure", q, basis, meta)`` -- single-qubit measurement,
* ``("mpp", terms, meta)`` -- direct multi-qubit Pauli product measurement.

Every reset/measure/mpp op consumes one slot of the measurement record, in
op order.  Noise locations are stored separately as
``(kind, qubits, op_index)`` with kind in {"flip", "depol1", "depol2"}; a
"flip" attaches to the record slot of the op at op_index, while depolarizing
locations insert a Pauli immediately after the op at op_index.

The noiseless reference run replays the circuit on the tableau simulator;
detection cells and logical observables are then read off the outcome
record, with extra runs (initial logical flips applied) used to tell true
detectors apart from parities that secretly measure a logical qubit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .anyons import from_label
from .condense import validate_bosonic_subgroup
from .floquet import (
    Schedule,
    boundary_schedule,
    planar_step_checks,
    step_checks,
    validate_schedule,
)
from .lattice import CodePatch, condense_region, full_region
from .pauli import PauliOp, commutes
from .tableau import Tableau, bit_source

_DEPOL1 = ("X", "Y", "Z")
_DEPOL2 = tuple(
    (a, b) for a in ("I", "X", "Y", "Z") for b in ("I", "X", "Y", "Z")
    if (a, b) != ("I", "I")
)


@dataclass
class Circuit:
    """A flat Clifford measurement circuit with tagged noise locations."""

    n_data: int
    n_total: int
    ops: list = field(default_factory=list)
    noise: list = field(default_factory=list)   # (kind, qubits, op_index)
    p: float = 0.0
    metadata: dict = field(default_factory=dict)

    def add(self, op) -> int:
        self.ops.append(op)
        return len(self.ops) - 1

    def add_noise(self, kind: str, qubits: tuple[int, ...], op_index: int):
        if self.p > 0:
            self.noise.append((kind, qubits, op_index))

    @property
    def record_size(self) -> int:
        return sum(1 for op in self.ops if op[0] in ("reset", "measure", "mpp"))

    def record_map(self) -> list[int]:
        """op index -> record index for record-consuming ops (-1 otherwise)."""
        out, idx = [], 0
        for op in self.ops:
            if op[0] in ("reset", "measure", "mpp"):
                out.append(idx)
                idx += 1
            else:
                out.append(-1)
        return out

    def fault_location_count(self) -> int:
        total = 0
        for kind, _, _ in self.noise:
            total += {"flip": 1, "xflip": 1, "zflip": 1,
                      "depol1": 3, "depol2": 15}[kind]
        return total


# --- builders -------------------------------------------------------------------


def _add_sd6_check(circ: Circuit, pauli: str, anc: int, u: int, v: int, meta):
    i = circ.add(("reset", anc, "X"))
    circ.add_noise("flip", (anc,), i)
    i = circ.add(("cp", pauli, anc, u))
    circ.add_noise("depol2", (anc, u), i)
    i = circ.add(("cp", pauli, anc, v))
    circ.add_noise("depol2", (anc, v), i)
    i = circ.add(("measure", anc, "X", meta))
    circ.add_noise("flip", (anc,), i)


def _add_em3_check(circ: Circuit, pauli: str, u: int, v: int, meta):
    i = circ.add(("mpp", ((u, pauli), (v, pauli)), meta))
    circ.add_noise("depol2", (u, v), i)
    circ.add_noise("flip", (u, v), i)


def build_noisy_circuit(
    patch: CodePatch,
    schedule: Schedule,
    rounds: int,
    p: float,
    style: str = "SD6",
    init_basis: str = "Z",
    planar: bool = False,
    rough0: str = "r",
) -> Circuit:
    """A memory-experiment circuit: transversal init, `rounds` measurement
    steps of the schedule, and a transversal readout in the init basis.

    SD6 realizes each edge check with a fresh ancilla (reset, two
    entangling gates, measurement); EM3 measures the two-body parity
    directly.  Single-qubit boundary checks are measured directly.  Noise:
    a flip with probability p on every reset and measurement, two-qubit
    depolarizing after entangling gates (SD6) or on the measured pair
    (EM3), and single-qubit depolarizing on data qubits idle for a step.
    """
    validate_schedule(schedule)
    if style not in ("SD6", "EM3"):
        raise ValueError(f"unknown noise style {style!r}")
    if init_basis not in ("X", "Z"):
        raise ValueError("init basis must be 'X' or 'Z'")
    n = patch.n
    n_total = n + (len(patch.lattice.edges) if style == "SD6" else 0)
    circ = Circuit(n, n_total, p=p, metadata={
        "style": style,
        "init_basis": init_basis,
        "rounds": rounds,
        "planar": planar,
        "noise_convention": (
            "flip p on resets and measurements; depolarize2 p after each "
            "entangling gate (SD6) / on the measured pair (EM3); "
            "depolarize1 p on data qubits idle for a whole step"
        ),
    })
    labels = boundary_schedule(schedule, rough0) if planar else None
    edge_index = {e.key: i for i, e in enumerate(patch.lattice.edges)}

    for q in range(n):
        i = circ.add(("reset", q, init_basis))
        circ.add_noise("flip", (q,), i)

    for t in range(rounds):
        label = schedule.label(t)
        if planar:
            checks = planar_step_checks(patch, label, *labels[t % len(labels)])
        else:
            checks = step_checks(patch, label)
        busy = set()
        for chk in checks:
            sup = chk.op.support
            busy.update(sup)
            meta = ("check", t, chk.id)
            if len(sup) == 1:
                i = circ.add(("measure", sup[0], chk.op.letter(sup[0]), meta))
                circ.add_noise("flip", sup, i)
            elif style == "SD6":
                u, v = sup
                _add_sd6_check(circ, chk.op.letter(u), n + edge_index[
                    frozenset(sup)], u, v, meta)
            else:
                u, v = sup
                _add_em3_check(circ, chk.op.letter(u), u, v, meta)
        for q in range(n):
            if q not in busy:
                circ.add_noise("depol1", (q,), len(circ.ops) - 1)

    for q in range(n):
        i = circ.add(("measure", q, init_basis, ("final", q)))
        circ.add_noise("flip", (q,), i)
    return circ


def build_phenomenological_circuit(
    patch: CodePatch,
    rounds: int,
    q: float,
    init: str = "1",
) -> Circuit:
    """A static-code experiment: every stabilizer generator is measured
    directly once per round, with outcome-flip probability q and
    independent X and Z flips with probability q on every data qubit
    between rounds; transversal Z readout at the end.

    ``init`` chooses the product initial state: "0"/"1" (Z basis) or "+".
    """
    n = patch.n
    circ = Circuit(n, n, p=q, metadata={
        "style": "phenomenological", "rounds": rounds, "init": init,
    })
    basis = "X" if init in ("+", "-") else "Z"
    for qb in range(n):
        circ.add(("reset", qb, basis))
    flip_all = init in ("1", "-")
    if flip_all:
        circ.metadata["init_flip"] = "X" if basis == "Z" else "Z"
    gens = patch.stabilizers.generators
    for t in range(rounds):
        for qb in range(n):
            # phenomenological data noise: independent X and Z flips
            circ.add_noise("xflip", (qb,), len(circ.ops) - 1)
            circ.add_noise("zflip", (qb,), len(circ.ops) - 1)
        for gi, g in enumerate(gens):
            terms = tuple((qb, g.letter(qb)) for qb in g.support)
            i = circ.add(("mpp", terms, ("check", t, gi)))
            circ.add_noise("flip", tuple(g.support), i)
    for qb in range(n):
        i = circ.add(("measure", qb, "Z", ("final", qb)))
        circ.add_noise("flip", (qb,), i)
    return circ


# --- noiseless reference run ----------------------------------------------------


def _mpp_op(n: int, terms) -> PauliOp:
    return PauliOp.from_terms(n, {q: l for q, l in terms})


def run_reference(circ: Circuit, seed: int = 0,
                  init_paulis: list[PauliOp] | None = None):
    """Replay the circuit noiselessly; returns the tableau after the run.

    ``init_paulis`` are applied right after the initial transversal resets
    (used to flip logical qubits when classifying detectors)."""
    tab = Tableau(circ.n_total, outcome_source=bit_source(seed))
    n = circ.n_data
    applied_init = init_paulis is None
    flip = circ.metadata.get("init_flip")
    init_done = 0
    for op in circ.ops:
        if op[0] == "reset":
            tab.reset(op[1], op[2])
            if not applied_init or flip:
                if op[1] < n:
                    init_done += 1
                    if init_done == n:
                        if flip:
                            letter = flip
                            tab.apply_pauli(PauliOp.from_terms(
                                circ.n_total, {qb: letter for qb in range(n)}))
                        for pa in init_paulis or []:
                            pad = np.zeros(circ.n_total - pa.x.size, dtype=np.uint8)
                            tab.apply_pauli(PauliOp(
                                np.concatenate([pa.x, pad]),
                                np.concatenate([pa.z, pad]), 0))
                        applied_init = True
        elif op[0] == "cp":
            tab.controlled_pauli(op[1], op[2], op[3])
        elif op[0] == "measure":
            tab.measure(PauliOp.from_terms(circ.n_total, {op[1]: op[2]}))
        elif op[0] == "mpp":
            tab.measure(_mpp_op(circ.n_total, op[1]))
        else:
            raise ValueError(f"unknown op {op[0]!r}")
    return tab


# --- detectors and observables --------------------------------------------------


@dataclass(frozen=True)
class CircuitDetector:
    """A deterministic parity of recorded outcomes in a noisy circuit."""

    mask: int                      # bitmask over record indices
    indices: tuple[int, ...]
    sector: str                    # "X", "Z", or "mixed"
    qubits: tuple[int, ...]        # union of involved data qubits

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass
class Instrumented:
    """A noisy circuit together with its detectors and logical observables."""

    circuit: Circuit
    detectors: list[CircuitDetector]
    observables: list[int]         # parity masks over record indices
    reference_bits: int            # noiseless outcome record (bitmask)
    metadata: dict = field(default_factory=dict)


def _indices_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _record_info(circ: Circuit, patch: CodePatch, schedule: Schedule | None):
    """Per-record-index (kind, step, check_id, letter, data_qubits)."""
    edges = patch.lattice.edges
    info = []
    for op in circ.ops:
        if op[0] == "reset":
            info.append(("reset", None, None, None, ()))
        elif op[0] == "measure":
            meta = op[3]
            if meta and meta[0] == "check":
                t, cid = meta[1], meta[2]
                if isinstance(cid, int) and schedule is not None:
                    # SD6 ancilla readout: report the check's own letter
                    # and its data qubits, not the ancilla's
                    letter = schedule.label(t)[1].upper()
                    qubits = (edges[cid].u, edges[cid].v)
                else:
                    letter, qubits = op[2], (op[1],)
                info.append(("check", t, cid, letter, qubits))
            elif meta and meta[0] == "final":
                info.append(("final", None, None, op[2], (op[1],)))
            else:
                info.append(("measure", None, None, op[2], (op[1],)))
        elif op[0] == "mpp":
            meta = op[2]
            qubits = tuple(q for q, _ in op[1])
            letters = {l for _, l in op[1]}
            letter = letters.pop() if len(letters) == 1 else "mixed"
            info.append(("check", meta[1], meta[2], letter, qubits))
    return info


def _reset_relations(circ: Circuit, tab: Tableau) -> dict[int, int]:
    """Deterministic relation mask for every reset record.

    Reset outcomes are internal to the simulator (hardware resets report
    nothing), so every detector and observable parity must be rewritten
    over measurement records only.  A deterministic reset record carries a
    relation tying its bit to strictly earlier records, which allows
    elimination; a random reset outcome is corrected away on the spot and
    must never appear in any later parity, so it gets no relation.
    """
    rel, idx = {}, 0
    for op in circ.ops:
        if op[0] in ("reset", "measure", "mpp"):
            if op[0] == "reset":
                r = tab.record[idx]
                rel[idx] = ((1 << idx) | r.prov_mask) if r.deterministic else 0
            idx += 1
    return rel


def _strip_reset_bits(mask: int, rel: dict[int, int], reset_all: int) -> int:
    m = mask & reset_all
    while m:
        sub = rel[m.bit_length() - 1]
        if not sub:
            raise AssertionError("parity depends on a random reset outcome")
        mask ^= sub
        m = mask & reset_all
    return mask


def _check_refs(circ: Circuit, patch: CodePatch, schedule: Schedule):
    """floquet-style MeasurementRefs for the edge/single check outcomes."""
    from .floquet import MeasurementRef

    refs = []
    idx = 0
    edges = patch.lattice.edges
    for op in circ.ops:
        if op[0] not in ("reset", "measure", "mpp"):
            continue
        meta = op[3] if op[0] == "measure" else (op[2] if op[0] == "mpp" else None)
        if meta and meta[0] == "check":
            t, cid = meta[1], meta[2]
            if isinstance(cid, int) and circ.metadata.get("style") != "phenomenological":
                qubits = (edges[cid].u, edges[cid].v)
            elif isinstance(cid, tuple):
                qubits = (cid[1],)
            else:
                qubits = ()
            refs.append(MeasurementRef(idx, t, cid, qubits, False, 0))
        idx += 1
    return refs


def _derive_circuit_masks(circ: Circuit, patch: CodePatch,
                          schedule: Schedule | None, tab: Tableau) -> list[int]:
    """Maximal independent family of deterministic outcome parities over
    measurement records (reset records eliminated), face-local candidates
    first."""
    from .floquet import Trace, _face_entries, _sparsify, _window_candidates

    rel = _reset_relations(circ, tab)
    reset_all = 0
    for i in rel:
        reset_all |= 1 << i

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

    kept: list[int] = []

    def consider(mask: int):
        if reduce(mask) == 0:
            return
        if tab.parity_is_deterministic(_indices_of(mask)) is None:
            return
        if admit(mask):
            kept.append(mask)

    if circ.metadata.get("style") in ("SD6", "EM3"):
        refs = _check_refs(circ, patch, schedule)
        shim = Trace(patch, schedule, 0, refs, tab, {}, {})
        # check ids used by the candidate generator match lattice edge
        # indices, because checks are emitted per lattice edge
        entries = _face_entries(shim)
        # dangling boundary qubits also support their own comparison
        # windows built from single-qubit checks alone
        per_qubit: dict[int, list[tuple[int, str, int]]] = {}
        for r in refs:
            if isinstance(r.check, tuple) and r.check[0] == "q":
                letter = schedule.label(r.step)[1]
                per_qubit.setdefault(r.check[1], []).append(
                    (r.step, letter, 1 << r.index))
        dangling = sorted(per_qubit)
        entries.extend(per_qubit[q] for q in dangling)
        max_window = 2 * len(schedule) + 2
        for mask in _window_candidates(entries, max_window):
            consider(mask)
        # temporal boundaries.  The transversal init acts as one more face
        # inference in the init basis.  The transversal readout closes only
        # the cells still live at the end -- the faces whose latest
        # init-basis inference is the last such step -- so that every final
        # readout stays in at most 2 detectors of the init-basis sector.
        basis = circ.metadata["init_basis"].lower()
        rounds = circ.metadata["rounds"]
        final_rec = _final_readout_records(circ)
        n_faces = len(patch.lattice.faces)
        # most local first: each init-basis check compared directly with
        # the final readouts of its own qubits (deterministic only when
        # nothing anticommuting acts in between -- verified per candidate)
        closures = []
        for r in refs:
            letter = schedule.label(r.step)[1]
            if letter != basis:
                continue
            m = 1 << r.index
            for q in r.qubits:
                m |= 1 << final_rec[q]
            closures.append((r.step, m))
        # fallback completion: whole-face closures, most recent first
        for fi, face in enumerate(patch.lattice.faces):
            fmask = 0
            for q in face.vertices:
                fmask |= 1 << final_rec[q]
            for t, letter, m in reversed(entries[fi]):
                if letter == basis:
                    closures.append((t, m | fmask))
            entries[fi].insert(0, (-1, basis, 0))
        for q, ents in zip(dangling, entries[n_faces:]):
            ents.insert(0, (-1, basis, 0))
        for mask in _window_candidates(entries, max_window + 2):
            consider(mask)
        for _, mask in sorted(closures, key=lambda tm: -tm[0]):
            consider(mask)
    else:
        # static-code circuits: complete from measurement provenance
        residual = []
        for r in tab.record:
            if not r.deterministic or r.index in rel:
                continue
            m = reduce(_strip_reset_bits((1 << r.index) | r.prov_mask,
                                         rel, reset_all))
            if m:
                residual.append(m)
        for m in _sparsify(residual):
            if admit(m):
                kept.append(m)
    return kept


def _pure_basis_representative(group_gens, candidates, basis: str) -> PauliOp:
    """A representative of a logical class supported purely in one basis,
    found by cancelling the complementary part with stabilizers."""
    gens = list(group_gens)
    part = (lambda op: op.x) if basis == "Z" else (lambda op: op.z)
    M = np.array([part(g) for g in gens], dtype=np.uint8)
    for cand in candidates:
        v = gf2.solve(M, part(cand).astype(np.uint8))
        if v is None:
            continue
        rep = cand
        for i in np.nonzero(v)[0]:
            rep = rep * gens[int(i)]
        rep = PauliOp(rep.x, rep.z, 0)
        if not part(rep).any():
            return rep
    raise ValueError(f"logical class has no pure-{basis} representative")


def _close_over_relations(tab: Tableau, mask: int,
                          rel: dict[int, int], reset_all: int) -> int:
    """Extend an outcome parity by earlier measurement outcomes (frame
    corrections) until its parity is deterministic."""
    residual, _ = tab._reduce_relation(mask, 0)
    closed = _strip_reset_bits(mask ^ residual, rel, reset_all)
    if not closed or tab.parity_is_deterministic(_indices_of(closed)) is None:
        raise AssertionError("observable parity could not be closed")
    return closed


def _final_readout_records(circ: Circuit) -> dict[int, int]:
    out, idx = {}, 0
    for op in circ.ops:
        if op[0] in ("reset", "measure", "mpp"):
            if op[0] == "measure" and op[3] and op[3][0] == "final":
                out[op[1]] = idx
            idx += 1
    return out


def memory_logicals(patch: CodePatch, schedule: Schedule, rounds: int,
                    init_basis: str = "Z", planar: bool = False,
                    rough0: str = "r") -> list[tuple[PauliOp, PauliOp]]:
    """(readable logical, flip partner) pairs at the end of a memory run.

    The readable operator is a pure init-basis representative of a logical
    class of the final instantaneous group; the partner anticommutes with
    it and commutes with the other readable logicals.
    """
    last = schedule.label(rounds - 1)
    if planar:
        from .floquet import run_noiseless_planar

        tr = run_noiseless_planar(patch, schedule, periods=2, rough0=rough0)
        steps = sorted(tr.step_groups)
        step = next(s for s in steps
                    if s % len(tr.metadata["boundary_labels"])
                    == (rounds - 1) % len(tr.metadata["boundary_labels"]))
        gens = tr.step_groups[step].generators
        pairs = [tr.logical_frame[step]]
    else:
        sub = validate_bosonic_subgroup([from_label(last)])
        cond = condense_region(patch, sub, full_region(patch))
        gens = cond.stabilizers.generators
        pairs = cond.logicals
    out = []
    for x, z in pairs:
        cands = [PauliOp(z.x, z.z, 0), PauliOp(x.x, x.z, 0),
                 PauliOp((x * z).x, (x * z).z, 0)]
        readable = _pure_basis_representative(gens, cands, init_basis)
        partner = next(c for c in cands if not commutes(c, readable))
        out.append((readable, partner))
    return out


def instrument_memory(patch: CodePatch, schedule: Schedule, rounds: int,
                      p: float, style: str = "SD6", init_basis: str = "Z",
                      planar: bool = False, rough0: str = "r",
                      seed: int = 0) -> Instrumented:
    """Build a memory circuit and extract its detectors and observables.

    Detectors are deterministic outcome parities of the noiseless run;
    parities that secretly depend on the stored logical state are
    identified by replaying the circuit with each logical flipped at
    initialisation, and repaired by folding the observables into them.
    """
    circ = build_noisy_circuit(patch, schedule, rounds, p, style=style,
                               init_basis=init_basis, planar=planar,
                               rough0=rough0)
    tab = run_reference(circ, seed=seed)
    masks = _derive_circuit_masks(circ, patch, schedule, tab)
    rel = _reset_relations(circ, tab)
    reset_all = 0
    for i in rel:
        reset_all |= 1 << i

    logicals = memory_logicals(patch, schedule, rounds, init_basis=init_basis,
                               planar=planar, rough0=rough0)
    final_rec = _final_readout_records(circ)
    obs_masks = []
    for readable, _ in logicals:
        raw = 0
        for q in readable.support:
            raw |= 1 << final_rec[q]
        obs_masks.append(_close_over_relations(tab, raw, rel, reset_all))

    # disambiguate detectors from logical-dependent parities
    flip_tabs = [run_reference(circ, seed=seed, init_paulis=[partner])
                 for _, partner in logicals]

    def parity(bits: int, mask: int) -> int:
        return (bits & mask).bit_count() & 1

    base_bits = tab.outcome_bits
    for i, ft in enumerate(flip_tabs):
        diffs = [parity(base_bits, m) ^ parity(ft.outcome_bits, m)
                 for m in obs_masks]
        expect = [1 if j == i else 0 for j in range(len(obs_masks))]
        if diffs != expect:
            raise AssertionError("logical flip partners are not independent")
    repaired = []
    for m in masks:
        for i, ft in enumerate(flip_tabs):
            if parity(base_bits, m) ^ parity(ft.outcome_bits, m):
                m ^= obs_masks[i]
        for ft in flip_tabs:
            if parity(base_bits, m) ^ parity(ft.outcome_bits, m):
                raise AssertionError("parity still depends on a logical state")
        if m:
            repaired.append(m)

    info = _record_info(circ, patch, schedule)
    detectors = []
    for m in repaired:
        idxs = tuple(_indices_of(m))
        letters = {info[i][3] for i in idxs} - {None}
        if letters <= {"Z"}:
            sector = "Z"
        elif letters <= {"X"}:
            sector = "X"
        else:
            sector = "mixed"
        qubits = tuple(sorted({q for i in idxs for q in info[i][4]}))
        detectors.append(CircuitDetector(m, idxs, sector, qubits))
    return Instrumented(
        circ, detectors, obs_masks, tab.outcome_bits,
        {
            "patch": patch.metadata, "schedule": schedule.steps,
            "rounds": rounds, "style": style, "init_basis": init_basis,
            "planar": planar, "seed": seed,
            "readable_logicals": [r.to_string() for r, _ in logicals],
        },
    )


def instrument_static(patch: CodePatch, rounds: int, q: float,
                      init: str = "1", seed: int = 0) -> Instrumented:
    """Instrument a static-code experiment (direct stabilizer measurements
    with phenomenological noise).

    Detectors: round-to-round comparisons of every check, single-round
    cells for checks determined by the product initial state, and final
    closures of checks readable from the transversal readout.

    Observables: the logical strings diagonal in the readout basis, read
    from the final transversal measurements (spatial), plus one conserved
    parity per linear dependency among same-basis checks, evaluated in the
    middle round (temporal).  A dependent check subset multiplies to the
    identity, so its outcome product in any single round is deterministic;
    a decoder failure against it is a time-like logical error.
    """
    import numpy as np

    from . import gf2

    circ = build_phenomenological_circuit(patch, rounds, q, init)
    tab = run_reference(circ, seed=seed)
    n = patch.n
    gens = patch.stabilizers.generators
    G = len(gens)

    def rec(t: int, gi: int) -> int:
        return n + t * G + gi

    def rec_final(qb: int) -> int:
        return n + rounds * G + qb

    basis = "X" if init in ("+", "-") else "Z"
    letters = []
    for g in gens:
        ls = {g.letter(qb) for qb in g.support}
        letters.append(ls.pop() if len(ls) == 1 else "mixed")

    detectors = []

    def add(mask: int, sector: str, qubits):
        if tab.parity_is_deterministic(_indices_of(mask)) is None:
            raise AssertionError("candidate detector parity is not deterministic")
        detectors.append(CircuitDetector(
            mask, tuple(_indices_of(mask)), sector, tuple(sorted(qubits))))

    for gi, g in enumerate(gens):
        sector = letters[gi] if letters[gi] in ("X", "Z") else "mixed"
        if letters[gi] == basis:
            add(1 << rec(0, gi), sector, g.support)
        for t in range(1, rounds):
            add((1 << rec(t - 1, gi)) | (1 << rec(t, gi)), sector, g.support)
        if letters[gi] == basis:
            m = 1 << rec(rounds - 1, gi)
            for qb in g.support:
                m |= 1 << rec_final(qb)
            add(m, sector, g.support)

    observables, obs_kinds = [], []
    for x, z in patch.logicals:
        cands = [PauliOp(z.x, z.z, 0), PauliOp(x.x, x.z, 0),
                 PauliOp((x * z).x, (x * z).z, 0)]
        readable = _pure_basis_representative(gens, cands, basis)
        mask = 0
        for qb in readable.support:
            mask |= 1 << rec_final(qb)
        if tab.parity_is_deterministic(_indices_of(mask)) is None:
            raise AssertionError("readout logical parity is not deterministic")
        observables.append(mask)
        obs_kinds.append("spatial")

    t_mid = rounds // 2
    for letter in ("X", "Z"):
        rows = [gi for gi in range(G) if letters[gi] == letter]
        if not rows:
            continue
        M = np.array([gens[gi].x if letter == "X" else gens[gi].z
                      for gi in rows], dtype=np.uint8)
        for combo in gf2.null_space(M.T):
            mask = 0
            for j in np.nonzero(combo)[0]:
                mask |= 1 << rec(t_mid, rows[int(j)])
            if tab.parity_is_deterministic(_indices_of(mask)) is None:
                raise AssertionError("conserved check parity is not deterministic")
            observables.append(mask)
            obs_kinds.append("temporal")

    def parity(mask: int) -> int:
        return (tab.outcome_bits & mask).bit_count() & 1

    return Instrumented(
        circ, detectors, observables, tab.outcome_bits,
        {
            "patch": patch.metadata, "rounds": rounds, "q": q, "init": init,
            "seed": seed, "observable_kinds": obs_kinds,
            "reference_parities": [parity(m) for m in observables],
        },
    )
