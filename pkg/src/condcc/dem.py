"""Detector error models: propagate circuit faults to detector flips.

Every elementary fault of a noisy circuit (an outcome flip, a preparation
flip, or one Pauli component of a depolarizing channel) is conjugated
through the rest of the circuit to find which detectors and logical
observables it flips.  Faults with identical flip signatures are merged
with combined probability.  The resulting model serializes to a plain
text format, one fault per line::

    error(0.00025) D0 D3 L1

with zero-indexed detector (``D``) and logical-observable (``L``) ids.
"""

from __future__ import annotations

import bisect
import heapq
import re
from dataclasses import dataclass, field

from .circuits import Circuit, Instrumented

_LETTER_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class MatchabilityViolation(Exception):
    """A fault signature cannot be represented on a matching graph."""


@dataclass(frozen=True)
class Fault:
    prob: float
    detectors: tuple[int, ...]
    observables: tuple[int, ...]


@dataclass
class DetectorErrorModel:
    num_detectors: int
    num_observables: int
    faults: list[Fault]
    sectors: list[str] = field(default_factory=list)   # per detector
    metadata: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = []
        for f in self.faults:
            parts = [f"error({f.prob:.12g})"]
            parts += [f"D{i}" for i in f.detectors]
            parts += [f"L{i}" for i in f.observables]
            lines.append(" ".join(parts))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "DetectorErrorModel":
        faults = []
        nd = no = 0
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            m = re.match(r"error\(([^)]+)\)\s*(.*)$", line)
            if not m:
                raise ValueError(f"unparseable fault line: {line!r}")
            prob = float(m.group(1))
            dets, obs = [], []
            for tok in m.group(2).split():
                if tok.startswith("D"):
                    dets.append(int(tok[1:]))
                elif tok.startswith("L"):
                    obs.append(int(tok[1:]))
                else:
                    raise ValueError(f"unknown token {tok!r} in {line!r}")
            nd = max(nd, *(d + 1 for d in dets), 0) if dets else nd
            no = max(no, *(o + 1 for o in obs), 0) if obs else no
            faults.append(Fault(prob, tuple(sorted(dets)), tuple(sorted(obs))))
        return cls(nd, no, faults)


# --- fault propagation ------------------------------------------------------


def _ops_by_qubit(circ: Circuit) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for pos, op in enumerate(circ.ops):
        if op[0] in ("reset", "measure"):
            out.setdefault(op[1], []).append(pos)
        elif op[0] == "cp":
            out.setdefault(op[2], []).append(pos)
            out.setdefault(op[3], []).append(pos)
        elif op[0] == "mpp":
            for q, _ in op[1]:
                out.setdefault(q, []).append(pos)
    return out


def _propagate(circ: Circuit, ops_by_qubit, rec_of_pos, start: int,
               err: dict[int, tuple[int, int]]) -> set[int]:
    """Record indices whose outcomes are flipped by the Pauli error `err`
    inserted immediately after the op at position `start`."""
    ops = circ.ops
    heap: list[tuple[int, int]] = []

    def schedule(q: int, after: int):
        lst = ops_by_qubit.get(q)
        if lst:
            i = bisect.bisect_right(lst, after)
            if i < len(lst):
                heapq.heappush(heap, (lst[i], q))

    for q, e in list(err.items()):
        if e == (0, 0):
            del err[q]
        else:
            schedule(q, start)
    flips: set[int] = set()
    done = -1
    while heap:
        pos, q = heapq.heappop(heap)
        if pos == done or err.get(q, (0, 0)) == (0, 0):
            continue
        done = pos
        op = ops[pos]
        if op[0] == "cp":
            _, pauli, a, d = op
            px, pz = _LETTER_BITS[pauli]
            xa, za = err.get(a, (0, 0))
            xd, zd = err.get(d, (0, 0))
            nd = (xd ^ (px & xa), zd ^ (pz & xa))
            na = (xa, za ^ (xd & pz) ^ (zd & px))
            for qq, e in ((a, na), (d, nd)):
                if e == (0, 0):
                    err.pop(qq, None)
                else:
                    err[qq] = e
                    schedule(qq, pos)
        elif op[0] == "measure":
            bx, bz = _LETTER_BITS[op[2]]
            x, z = err[op[1]]
            if (x & bz) ^ (z & bx):
                flips.add(rec_of_pos[pos])
            schedule(op[1], pos)
        elif op[0] == "mpp":
            s = 0
            for qq, letter in op[1]:
                x, z = err.get(qq, (0, 0))
                bx, bz = _LETTER_BITS[letter]
                s ^= (x & bz) ^ (z & bx)
                if (x, z) != (0, 0):
                    schedule(qq, pos)
            if s:
                flips.add(rec_of_pos[pos])
        elif op[0] == "reset":
            # re-preparation discards any error on the qubit; reset
            # outcomes never enter detector masks
            err.pop(op[1], None)
    return flips


def _elementary_faults(circ: Circuit):
    """Yield (prob, op_index, err dict or record-flip index)."""
    from .circuits import _DEPOL1, _DEPOL2

    rec_map = circ.record_map()
    for kind, qubits, pos in circ.noise:
        op = circ.ops[pos]
        if kind == "flip":
            if op[0] == "reset":
                basis = op[2]
                letter = "X" if basis == "Z" else "Z"
                yield circ.p, pos, {op[1]: _LETTER_BITS[letter]}, None
            else:
                yield circ.p, pos, None, rec_map[pos]
        elif kind == "xflip":
            yield circ.p, pos, {qubits[0]: (1, 0)}, None
        elif kind == "zflip":
            yield circ.p, pos, {qubits[0]: (0, 1)}, None
        elif kind == "depol1":
            for letter in _DEPOL1:
                yield circ.p / 3, pos, {qubits[0]: _LETTER_BITS[letter]}, None
        elif kind == "depol2":
            for la, lb in _DEPOL2:
                err = {}
                if la != "I":
                    err[qubits[0]] = _LETTER_BITS[la]
                if lb != "I":
                    err[qubits[1]] = _LETTER_BITS[lb]
                yield circ.p / 15, pos, err, None
        else:
            raise ValueError(f"unknown noise kind {kind!r}")


def fault_signatures(inst: Instrumented):
    """Yield (prob, frozenset of detector ids, frozenset of observable ids)
    for every elementary fault, unmerged."""
    circ = inst.circuit
    ops_by_qubit = _ops_by_qubit(circ)
    rec_map = circ.record_map()
    rec_of_pos = {pos: r for pos, r in enumerate(rec_map) if r >= 0}
    det_by_record: dict[int, list[int]] = {}
    for di, det in enumerate(inst.detectors):
        for i in det.indices:
            det_by_record.setdefault(i, []).append(di)
    obs_by_record: dict[int, list[int]] = {}
    for oi, mask in enumerate(inst.observables):
        m = mask
        while m:
            low = m & -m
            obs_by_record.setdefault(low.bit_length() - 1, []).append(oi)
            m ^= low
    for prob, pos, err, direct in _elementary_faults(circ):
        if direct is not None:
            flips = {direct}
        else:
            flips = _propagate(circ, ops_by_qubit, rec_of_pos, pos, dict(err))
        dets: set[int] = set()
        obs: set[int] = set()
        for r in flips:
            for di in det_by_record.get(r, ()):
                dets ^= {di}
            for oi in obs_by_record.get(r, ()):
                obs ^= {oi}
        yield prob, frozenset(dets), frozenset(obs)


def build_dem(inst: Instrumented) -> DetectorErrorModel:
    """Propagate every elementary fault and merge identical signatures."""
    merged: dict[tuple, float] = {}
    order: list[tuple] = []
    for prob, dets, obs in fault_signatures(inst):
        if not dets and not obs:
            continue
        key = (tuple(sorted(dets)), tuple(sorted(obs)))
        if key in merged:
            p1, p2 = merged[key], prob
            merged[key] = p1 + p2 - 2 * p1 * p2
        else:
            merged[key] = prob
            order.append(key)
    faults = [Fault(merged[k], k[0], k[1]) for k in order]
    return DetectorErrorModel(
        len(inst.detectors), len(inst.observables), faults,
        sectors=[d.sector for d in inst.detectors],
        metadata=dict(inst.metadata),
    )


def audit_matchability(dem: DetectorErrorModel, sector: str) -> None:
    """Raise unless every fault flips at most 2 detectors in the sector."""
    ids = {i for i, s in enumerate(dem.sectors) if s == sector or sector == "all"}
    for f in dem.faults:
        hit = [d for d in f.detectors if d in ids]
        if len(hit) > 2:
            raise MatchabilityViolation(
                f"fault flips {len(hit)} detectors in sector {sector}: {hit}"
            )
