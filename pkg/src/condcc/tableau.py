"""Stabilizer-state simulation with a destabilizer frame.

The state is held as 2n signed Pauli rows: rows 0..n-1 are destabilizers,
rows n..2n-1 the stabilizers, with destabilizer i anticommuting with
stabilizer i only.  Measurements take their random bits from an injected
outcome source, so runs are exactly reproducible.

Beyond plain simulation the tableau can track *outcome provenance*: each
row carries the set of past measurement indices (a bitmask) whose recorded
bits its sign depends on.  Two byproducts fall out of this bookkeeping:

* every deterministic measurement yields a parity relation
  ``outcome[t] = const + sum of outcomes over a mask`` which is stored in
  an incremental GF(2) echelon, so any candidate parity of measurement
  outcomes can be tested for determinism afterwards;
* the provenance mask of a deterministic measurement says exactly which
  earlier outcomes fix it, which is what detector and observable
  derivation need.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliOp, StabilizerGroup, product_phases


def bit_source(seed: int):
    """A deterministic stream of measurement bits from a seed."""
    rng = np.random.default_rng(seed)

    def draw() -> int:
        return int(rng.integers(2))

    return draw


@dataclass(frozen=True)
class MeasurementResult:
    index: int            # position in the measurement record
    bit: int              # 0 for the +1 outcome, 1 for -1
    deterministic: bool
    prov_mask: int        # bitmask of record indices the outcome depends on

    @property
    def sign(self) -> int:
        return 1 if self.bit == 0 else -1


class Tableau:
    """Destabilizer-frame stabilizer simulator on n qubits, starting |0..0>."""

    def __init__(self, n: int, outcome_source=None):
        self.n = n
        self.outcome_source = outcome_source
        # rows as x|z bits; destabilizers X_i then stabilizers Z_i
        self.mat = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        for i in range(n):
            self.mat[i, i] = 1            # destabilizer X_i
            self.mat[n + i, n + i] = 1    # stabilizer Z_i
        self.phases = np.zeros(2 * n, dtype=np.int64)
        self.prov = [0] * (2 * n)
        self.outcome_bits = 0             # record outcomes as a bitmask
        self.record: list[MeasurementResult] = []
        # GF(2) echelon of deterministic-outcome relations, keyed by the
        # relation mask's leading bit: leading_bit -> (mask, const)
        self._relations: dict[int, tuple[int, int]] = {}

    # --- construction helpers ----------------------------------------------

    @classmethod
    def from_product_state(cls, kets: str, outcome_source=None) -> "Tableau":
        """Build |kets> from per-qubit symbols in '01+-'."""
        t = cls(len(kets), outcome_source=outcome_source)
        flips = {}
        for q, ch in enumerate(kets):
            if ch == "0":
                continue
            if ch == "1":
                flips[q] = "X"
            elif ch in "+-":
                t._reset_row(q, basis="X")
                if ch == "-":
                    flips[q] = "Z"
            else:
                raise ValueError(f"unknown ket symbol {ch!r}")
        if flips:
            t.apply_pauli(PauliOp.from_terms(t.n, flips))
        return t

    @classmethod
    def bell_pairs(cls, n: int, outcome_source=None) -> "Tableau":
        """2n qubits with qubit q maximally entangled with ancilla n+q.

        The reduced state on the first n qubits is maximally mixed, so any
        deterministic measurement outcome on them reflects the measurement
        dynamics alone, never the initial state.
        """
        t = cls(2 * n, outcome_source=outcome_source)
        t.mat[:] = 0
        for q in range(n):
            N = 2 * n
            t.mat[q, N + q] = 1                       # destabilizer Z_q
            t.mat[n + q, n + q] = 1                   # destabilizer X_{n+q}
            t.mat[N + q, q] = 1                       # stabilizer X_q X_{n+q}
            t.mat[N + q, n + q] = 1
            t.mat[N + n + q, N + q] = 1               # stabilizer Z_q Z_{n+q}
            t.mat[N + n + q, N + n + q] = 1
        return t

    def _reset_row(self, q: int, basis: str):
        """Directly rewrite the (destabilizer, stabilizer) pair of a fresh
        qubit; valid only before anything has touched it."""
        n = self.n
        self.mat[q] = 0
        self.mat[n + q] = 0
        if basis == "Z":
            self.mat[q, q] = 1
            self.mat[n + q, n + q] = 1
        else:
            self.mat[q, n + q] = 1
            self.mat[n + q, q] = 1

    # --- inspection ----------------------------------------------------------

    def row_operator(self, i: int) -> PauliOp:
        n = self.n
        return PauliOp(self.mat[i, :n], self.mat[i, n:], int(self.phases[i]))

    def stabilizers(self) -> list[PauliOp]:
        return [self.row_operator(self.n + i) for i in range(self.n)]

    def stabilizer_group(self) -> StabilizerGroup:
        return StabilizerGroup(self.stabilizers(), validate=False)

    # --- Clifford gates --------------------------------------------------------
    #
    # Row phases use the convention W(x, z) = i^(x.z) X^x Z^z, so the phase
    # increments below differ from the usual CHP rules; each was derived by
    # canonically reordering the conjugated operator product.

    def h(self, q: int):
        n = self.n
        x, z = self.mat[:, q].copy(), self.mat[:, n + q].copy()
        self.phases = (self.phases + 2 * (x & z)) % 4
        self.mat[:, q], self.mat[:, n + q] = z, x

    def s(self, q: int):
        n = self.n
        x, z = self.mat[:, q], self.mat[:, n + q]
        self.phases = (self.phases + 2 * (x & z)) % 4
        self.mat[:, n + q] = z ^ x

    def sdg(self, q: int):
        n = self.n
        x, z = self.mat[:, q], self.mat[:, n + q]
        self.phases = (self.phases + 2 * (x & (z ^ 1))) % 4
        self.mat[:, n + q] = z ^ x

    def cx(self, a: int, d: int):
        n = self.n
        xa, za = self.mat[:, a], self.mat[:, n + a]
        xd, zd = self.mat[:, d], self.mat[:, n + d]
        old = (xa & za).astype(np.int64) + (xd & zd)
        xd ^= xa
        za ^= zd
        new = (xa & za).astype(np.int64) + (xd & zd)
        self.phases = (self.phases + old - new) % 4

    def controlled_pauli(self, pauli: str, a: int, d: int):
        """Controlled-P with control a and target d (P in X, Y, Z)."""
        if pauli == "X":
            self.cx(a, d)
        elif pauli == "Z":
            self.h(d)
            self.cx(a, d)
            self.h(d)
        elif pauli == "Y":
            self.sdg(d)
            self.cx(a, d)
            self.s(d)
        else:
            raise ValueError(f"unknown controlled Pauli {pauli!r}")

    # --- dynamics -------------------------------------------------------------

    def _commutation(self, p: PauliOp) -> np.ndarray:
        n = self.n
        return (self.mat[:, :n] @ p.z + self.mat[:, n:] @ p.x) % 2

    def apply_pauli(self, p: PauliOp):
        """Conjugate the state by a Pauli: flips signs of anticommuting rows."""
        if p.phase % 2:
            raise ValueError("can only apply Hermitian Paulis")
        comm = self._commutation(p)
        self.phases = (self.phases + 2 * comm.astype(np.int64)) % 4

    def _multiply_pivot_into(self, targets: np.ndarray, pivot_row: int):
        if targets.size == 0:
            return
        self.phases[targets] = (
            self.phases[targets]
            + self.phases[pivot_row]
            + product_phases(self.mat[targets], self.mat[pivot_row], self.n)
        ) % 4
        self.mat[targets] ^= self.mat[pivot_row]
        for t in targets:
            self.prov[int(t)] ^= self.prov[pivot_row]

    def _project(self, p: PauliOp, outcome_source):
        """Measure p without touching the record.

        Returns (bit, deterministic, prov_mask): the raw outcome bit, and
        for deterministic results the bitmask of past record indices whose
        parity (plus a constant) the bit equals.  The caller installs the
        new stabilizer row's provenance via finish_random.
        """
        if p.phase % 2:
            raise ValueError("measured operator must be Hermitian")
        n = self.n
        comm = self._commutation(p)
        anti_stab = np.nonzero(comm[n:])[0]
        if anti_stab.size:
            pivot = n + int(anti_stab[0])
            targets = np.nonzero(comm)[0]
            targets = targets[targets != pivot]
            self._multiply_pivot_into(targets, pivot)
            # old stabilizer row becomes the paired destabilizer
            self.mat[pivot - n] = self.mat[pivot]
            self.phases[pivot - n] = self.phases[pivot]
            self.prov[pivot - n] = self.prov[pivot]
            draw = outcome_source or self.outcome_source
            if draw is None:
                raise ValueError("random outcome needed but no outcome source set")
            bit = int(draw()) & 1
            self.mat[pivot, :n] = p.x
            self.mat[pivot, n:] = p.z
            self.phases[pivot] = (p.phase + 2 * bit) % 4
            self.prov[pivot] = 0
            self._last_pivot = pivot
            return bit, False, 0
        # deterministic: accumulate stabilizer rows paired with the
        # anticommuting destabilizers
        scratch = PauliOp.identity(n)
        mask = 0
        for i in np.nonzero(comm[:n])[0]:
            scratch = self.row_operator(n + int(i)) * scratch
            mask ^= self.prov[n + int(i)]
        if not (np.array_equal(scratch.x, p.x) and np.array_equal(scratch.z, p.z)):
            raise AssertionError("deterministic measurement reduction failed")
        bit = ((scratch.phase - p.phase) // 2) % 2
        return bit, True, mask

    def measure(self, p: PauliOp, outcome_source=None) -> MeasurementResult:
        """Measure a Hermitian Pauli, appending to the measurement record."""
        index = len(self.record)
        bit, deterministic, mask = self._project(p, outcome_source)
        if deterministic:
            # record the relation outcome[index] = parity(mask) + const
            const = bit ^ (bin(self.outcome_bits & mask).count("1") & 1)
            self._add_relation((1 << index) | mask, const)
            prov_mask = mask
        else:
            self.prov[self._last_pivot] = 1 << index
            prov_mask = 1 << index
        self.outcome_bits |= bit << index
        result = MeasurementResult(index, bit, deterministic, prov_mask)
        self.record.append(result)
        return result

    def reset(self, q: int, basis: str = "Z", outcome_source=None) -> MeasurementResult:
        """Reset one qubit to |0> (basis Z) or |+> (basis X).

        Implemented as a recorded measurement followed by a correction
        conditioned on its outcome, so the measurement record stays the
        single source of randomness and provenance stays exact.
        """
        if basis == "Z":
            op = PauliOp.from_terms(self.n, {q: "Z"})
            flip = PauliOp.from_terms(self.n, {q: "X"})
        elif basis == "X":
            op = PauliOp.from_terms(self.n, {q: "X"})
            flip = PauliOp.from_terms(self.n, {q: "Z"})
        else:
            raise ValueError("basis must be 'Z' or 'X'")
        r = self.measure(op, outcome_source)
        comm = self._commutation(flip)
        if r.bit:
            self.apply_pauli(flip)
        if r.prov_mask:
            # the correction is conditioned on recorded outcomes, so rows
            # it (would) anticommute with inherit that dependence
            for j in np.nonzero(comm)[0]:
                self.prov[int(j)] ^= r.prov_mask
        return r

    # --- deterministic-parity relations --------------------------------------

    def _add_relation(self, mask: int, const: int):
        mask, const = self._reduce_relation(mask, const)
        if mask:
            self._relations[mask.bit_length() - 1] = (mask, const)
        elif const:
            raise AssertionError("contradictory outcome relation")

    def _reduce_relation(self, mask: int, const: int) -> tuple[int, int]:
        while mask:
            lead = mask.bit_length() - 1
            hit = self._relations.get(lead)
            if hit is None:
                break
            mask ^= hit[0]
            const ^= hit[1]
        return mask, const

    def parity_is_deterministic(self, indices) -> int | None:
        """If the parity of the given record indices is fixed by the
        dynamics (same in every run), return it; otherwise None."""
        mask = 0
        for i in indices:
            mask |= 1 << i
        mask, const = self._reduce_relation(mask, 0)
        return const if mask == 0 else None
