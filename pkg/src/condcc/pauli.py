"""Symplectic Pauli algebra: operators, stabilizer groups, logicals.

Paulis are stored as x/z bit vectors plus a global phase exponent of i
(kept mod 4; Hermitian operators have an even exponent, exposed as a +-1
sign).  The per-qubit letter convention is W(x, z) = i^(x z) X^x Z^z, so
W(1, 1) = Y.
"""

from __future__ import annotations

import numpy as np

from . import gf2

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}


class PauliOp:
    """An n-qubit Pauli operator with exact phase tracking."""

    __slots__ = ("n", "x", "z", "phase")

    def __init__(self, x, z, phase: int = 0):
        x = np.asarray(x, dtype=np.uint8) % 2
        z = np.asarray(z, dtype=np.uint8) % 2
        if x.shape != z.shape or x.ndim != 1:
            raise ValueError("x and z must be equal-length bit vectors")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "n", x.shape[0])
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase", int(phase) % 4)

    def __setattr__(self, *a):
        raise AttributeError("PauliOp is immutable")

    # --- constructors ----------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @classmethod
    def from_terms(cls, n: int, terms: dict, sign: int = 1) -> "PauliOp":
        """Build from {qubit: letter}; sign is +1 or -1."""
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        for q, letter in terms.items():
            bx, bz = _LETTER_TO_BITS[letter.upper()]
            x[q], z[q] = bx, bz
        return cls(x, z, 0 if sign == 1 else 2)

    @classmethod
    def from_string(cls, s: str) -> "PauliOp":
        sign = 1
        if s and s[0] in "+-":
            sign = 1 if s[0] == "+" else -1
            s = s[1:]
        x, z = [], []
        for ch in s:
            bx, bz = _LETTER_TO_BITS[ch.upper()]
            x.append(bx)
            z.append(bz)
        return cls(np.array(x, dtype=np.uint8), np.array(z, dtype=np.uint8),
                   0 if sign == 1 else 2)

    # --- basic queries ----------------------------------------------------

    @property
    def sign(self) -> int:
        if self.phase % 2:
            raise ValueError("operator is not Hermitian (odd power of i)")
        return 1 if self.phase == 0 else -1

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(q) for q in np.nonzero(self.x | self.z)[0])

    @property
    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def letter(self, q: int) -> str:
        return _BITS_TO_LETTER[(int(self.x[q]), int(self.z[q]))]

    def to_string(self) -> str:
        body = "".join(self.letter(q) for q in range(self.n))
        return ("+" if self.sign == 1 else "-") + body

    def __repr__(self):
        if self.n <= 24:
            return f"PauliOp({self.to_string()})"
        terms = ",".join(f"{self.letter(q)}{q}" for q in self.support[:8])
        return f"PauliOp(n={self.n}, {terms}{'...' if self.weight > 8 else ''})"

    def __eq__(self, other):
        return (
            isinstance(other, PauliOp)
            and self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self):
        return hash((self.x.tobytes(), self.z.tobytes(), self.phase))

    # --- algebra ----------------------------------------------------------

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        x = self.x ^ other.x
        z = self.z ^ other.z
        phi = int(
            (
                self.x.astype(np.int64) * self.z
                + other.x.astype(np.int64) * other.z
                + 2 * self.z.astype(np.int64) * other.x
                - x.astype(np.int64) * z
            ).sum()
        )
        return PauliOp(x, z, self.phase + other.phase + phi)

    def negated(self) -> "PauliOp":
        return PauliOp(self.x, self.z, self.phase + 2)

    def commutes_with(self, other: "PauliOp") -> bool:
        return commutes(self, other)

    def restricted(self, qubits) -> "PauliOp":
        """The factor acting on a subset of qubits (reindexed)."""
        idx = np.array(sorted(qubits), dtype=int)
        return PauliOp(self.x[idx], self.z[idx], 0)


def commutes(p: PauliOp, q: PauliOp) -> bool:
    if p.n != q.n:
        raise ValueError("qubit counts differ")
    return int((p.x & q.z).sum() + (p.z & q.x).sum()) % 2 == 0


# --- stabilizer groups ----------------------------------------------------


def _rows_matrix(paulis: list[PauliOp]) -> np.ndarray:
    return np.array([np.concatenate([p.x, p.z]) for p in paulis], dtype=np.uint8)


def product_phases(rows: np.ndarray, pivot: np.ndarray, n: int) -> np.ndarray:
    """Phase increments (mod 4) for multiplying pivot into each row.

    ``rows`` is (m, 2n) and ``pivot`` (2n,), both x|z bit layouts; the
    result row bits are rows ^ pivot.  Vectorized form of the per-qubit
    phase bookkeeping in PauliOp.__mul__ (with the pivot as left factor).
    """
    x1, z1 = pivot[:n].astype(np.int64), pivot[n:].astype(np.int64)
    x2, z2 = rows[:, :n].astype(np.int64), rows[:, n:].astype(np.int64)
    x3, z3 = x1 ^ x2, z1 ^ z2
    return (x1 * z1 + x2 * z2 + 2 * z1 * x2 - x3 * z3).sum(axis=1) % 4


def echelon_rows(mat: np.ndarray, phases: np.ndarray, n: int):
    """In-place Gaussian elimination with exact phase tracking.

    Returns (mat, phases, pivot_cols, n_rows) with the first len(pivot_cols)
    rows forming an echelon basis; remaining rows reduce to identity and
    must then carry phase 0, else -identity is in the group.
    """
    m = mat.shape[0]
    row = 0
    pivots: list[int] = []
    for col in range(2 * n):
        hits = np.nonzero(mat[row:, col])[0]
        if hits.size == 0:
            continue
        piv = row + int(hits[0])
        if piv != row:
            mat[[row, piv]] = mat[[piv, row]]
            phases[[row, piv]] = phases[[piv, row]]
        targets = np.nonzero(mat[:, col])[0]
        targets = targets[targets != row]
        if targets.size:
            phases[targets] = (
                phases[targets]
                + phases[row]
                + product_phases(mat[targets], mat[row], n)
            ) % 4
            mat[targets] ^= mat[row]
        pivots.append(col)
        row += 1
        if row == m:
            break
    return mat, phases, pivots, row


def echelon_paulis(paulis) -> list[PauliOp]:
    """Independent canonical generators by Gaussian elimination.

    Raises ValueError if -identity lies in the group.
    """
    rows = list(paulis)
    if not rows:
        return []
    n = rows[0].n
    mat = _rows_matrix(rows)
    phases = np.array([p.phase for p in rows], dtype=np.int64)
    mat, phases, pivots, rank = echelon_rows(mat, phases, n)
    if mat[rank:].any():
        raise AssertionError("elimination left a non-identity residual")
    if (phases[rank:] % 4).any():
        raise ValueError("-identity is in the group: inconsistent signs")
    return [
        PauliOp(mat[i, :n], mat[i, n:], int(phases[i])) for i in range(rank)
    ]


def consistent_signs(paulis) -> list[PauliOp]:
    """Flip signs on a subset of generators so no product equals -identity.

    A redundant generating set can be sign-inconsistent even though each
    generator is Hermitian (e.g. X-type and Z-type checks whose product is
    minus the corresponding Y-type product).  This solves for a sign
    assignment making every dependent combination reduce to +identity.
    """
    gens = list(paulis)
    if not gens:
        return gens
    n = gens[0].n
    m = len(gens)
    mat = _rows_matrix(gens)
    phases = np.array([p.phase for p in gens], dtype=np.int64)
    track = np.eye(m, dtype=np.uint8)
    row = 0
    for col in range(2 * n):
        hits = np.nonzero(mat[row:, col])[0]
        if hits.size == 0:
            continue
        piv = row + int(hits[0])
        if piv != row:
            mat[[row, piv]] = mat[[piv, row]]
            phases[[row, piv]] = phases[[piv, row]]
            track[[row, piv]] = track[[piv, row]]
        targets = np.nonzero(mat[:, col])[0]
        targets = targets[targets != row]
        if targets.size:
            phases[targets] = (
                phases[targets] + phases[row]
                + product_phases(mat[targets], mat[row], n)
            ) % 4
            mat[targets] ^= mat[row]
            track[targets] ^= track[row]
        row += 1
        if row == m:
            break
    # every dependent combination must end at +identity, including the ones
    # already consistent (a flip could otherwise break them)
    residual = list(range(row, m))
    if not any(phases[i] % 4 for i in residual):
        return gens
    combos = track[residual]              # relations over original generators
    bits = np.array([(phases[i] // 2) % 2 for i in residual], dtype=np.uint8)
    flips = gf2.solve(combos.T, bits)
    if flips is None:
        raise ValueError("generators admit no consistent sign assignment")
    return [
        g.negated() if flips[i] else g for i, g in enumerate(gens)
    ]


class StabilizerGroup:
    """Abelian Pauli group given by (possibly redundant) generators."""

    def __init__(self, generators, validate: bool = True):
        self.generators = tuple(generators)
        if not self.generators:
            raise ValueError("need at least one generator (identity allowed)")
        self.n = self.generators[0].n
        if validate:
            mat = _rows_matrix(list(self.generators))
            x, z = mat[:, : self.n], mat[:, self.n:]
            comm = (x @ z.T + z @ x.T) % 2
            if comm.any():
                i, j = np.argwhere(comm)[0]
                raise ValueError(f"generators {i} and {j} anticommute")
        self._canonical: list[PauliOp] | None = None

    @property
    def canonical_form(self) -> list[PauliOp]:
        if self._canonical is None:
            self._canonical = echelon_paulis(self.generators)
        return self._canonical

    @property
    def rank(self) -> int:
        return len(self.canonical_form)

    @property
    def k(self) -> int:
        return self.n - self.rank

    def contains(self, p: PauliOp) -> tuple[bool, int | None]:
        """Membership up to sign; returns (member, sign with which p appears)."""
        residual = p
        for row in self.canonical_form:
            vec = np.concatenate([residual.x, residual.z])
            rvec = np.concatenate([row.x, row.z])
            pivot = int(np.nonzero(rvec)[0][0]) if rvec.any() else None
            # canonical rows are pivot-sorted; reduce on the row's pivot
            if pivot is not None and vec[pivot]:
                residual = residual * row
        if not residual.is_identity:
            return False, None
        return True, (1 if residual.phase == 0 else -1)

    def to_strings(self) -> list[str]:
        return [g.to_string() for g in self.generators]

    def logical_operators(self) -> list[tuple[PauliOp, PauliOp]]:
        return logicals(self)


def reduce_weight(op: PauliOp, generators) -> PauliOp:
    """Greedily lower the weight of op by multiplying in generators.

    Deterministic (first-improvement scan, repeated to a fixed point), so
    representatives are reproducible; the result is a local optimum, not
    necessarily the global minimum weight in the coset.
    """
    cur = op
    improved = True
    while improved:
        improved = False
        for g in generators:
            cand = cur * g
            if cand.phase % 2:
                continue
            if cand.weight < cur.weight:
                cur = cand
                improved = True
    return cur


def logicals(group: StabilizerGroup) -> list[tuple[PauliOp, PauliOp]]:
    """k anticommuting (X-rep, Z-rep) pairs commuting with the group.

    Representatives come from a symplectic Gram-Schmidt over the
    centralizer modulo the group, with deterministic pivoting.
    """
    n = group.n
    rows = group.canonical_form
    if not rows:
        rows_mat = np.zeros((0, 2 * n), dtype=np.uint8)
    else:
        rows_mat = _rows_matrix(rows)
    # commutation with v is (z|x) . v, so the centralizer is the null space
    # of the half-swapped generator matrix
    swapped = np.hstack([rows_mat[:, n:], rows_mat[:, :n]])
    cent = gf2.null_space(swapped)

    # centralizer vectors independent modulo the group rowspace
    stack = rows_mat.copy()
    quotient: list[np.ndarray] = []
    for v in cent:
        cand = np.vstack([stack, v])
        if gf2.rank(cand) > gf2.rank(stack):
            stack = cand
            quotient.append(v)

    def sym(u, v):
        return int((u[:n] @ v[n:] + u[n:] @ v[:n]) % 2)

    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    pool = quotient
    while pool:
        a = pool[0]
        partner = None
        for b in pool[1:]:
            if sym(a, b):
                partner = b
                break
        if partner is None:
            raise AssertionError("centralizer quotient must pair symplectically")
        rest = []
        for c in pool[1:]:
            if c is partner:
                continue
            c = c ^ (sym(c, partner) * a) ^ (sym(c, a) * partner)
            rest.append(c)
        pairs.append((a, partner))
        pool = rest

    out = []
    for a, b in pairs:
        pa = PauliOp(a[:n], a[n:])
        pb = PauliOp(b[:n], b[n:])
        # call the representative with more X support the X-type one
        if int(pa.x.sum()) < int(pb.x.sum()):
            pa, pb = pb, pa
        out.append((pa, pb))
    return out
