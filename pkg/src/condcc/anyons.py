"""Abelian anyons of n stacked toric codes as bit vectors over Z2.

An anyon is a pair of length-n bit vectors (h | g): h holds the electric
component per layer, g the magnetic component.  Fusion is XOR, topological
spin is (-1)^(h.g) and the mutual braiding (monodromy) phase is the
symplectic bilinear form.  For n = 2 the anyons carry the color/Pauli
naming of the color code (vacuum, 9 bosons rx..bz, 6 fermions f1..f6).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

COLORS = "rgb"
PAULIS = "xyz"
VACUUM_LABEL = "1"


class LayerMismatch(ValueError):
    """Raised when two anyons live on different layer counts."""


@dataclass(frozen=True, order=True)
class Anyon:
    """An Abelian anyon of ``n`` stacked toric codes.

    ``h`` and ``g`` are length-``n`` 0/1 tuples: the electric and magnetic
    components on each layer.
    """

    n: int
    h: tuple[int, ...]
    g: tuple[int, ...]

    def __post_init__(self):
        if len(self.h) != self.n or len(self.g) != self.n:
            raise ValueError(f"h and g must each have {self.n} bits")
        if not all(b in (0, 1) for b in self.h + self.g):
            raise ValueError("h and g must be 0/1 vectors")

    @property
    def is_vacuum(self) -> bool:
        return not any(self.h) and not any(self.g)

    @property
    def bits(self) -> tuple[int, ...]:
        """Concatenated (h | g) bit vector of length 2n."""
        return self.h + self.g

    @property
    def label(self) -> str | None:
        """Color/Pauli name for n = 2, otherwise None."""
        if self.n != 2:
            return None
        return _HG_TO_LABEL[(self.h, self.g)]

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "h": "".join(map(str, self.h)),
            "g": "".join(map(str, self.g)),
        }
        if self.n == 2:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Anyon":
        h = tuple(int(b) for b in obj["h"])
        g = tuple(int(b) for b in obj["g"])
        return cls(obj["n"], h, g)

    @classmethod
    def from_bits(cls, bits) -> "Anyon":
        bits = tuple(int(b) for b in bits)
        n = len(bits) // 2
        return cls(n, bits[:n], bits[n:])

    def __repr__(self):
        lbl = self.label
        if lbl is not None:
            return f"Anyon({lbl})"
        return f"Anyon(h={''.join(map(str, self.h))}, g={''.join(map(str, self.g))})"


def vacuum(n: int) -> Anyon:
    return Anyon(n, (0,) * n, (0,) * n)


def fuse(a: Anyon, b: Anyon) -> Anyon:
    """Fusion of Abelian anyons: component-wise XOR."""
    if a.n != b.n:
        raise LayerMismatch(f"cannot fuse anyons on {a.n} and {b.n} layers")
    h = tuple(x ^ y for x, y in zip(a.h, b.h))
    g = tuple(x ^ y for x, y in zip(a.g, b.g))
    return Anyon(a.n, h, g)


def spin(a: Anyon) -> int:
    """Topological spin: -1 iff some layer carries both components."""
    return -1 if sum(x * y for x, y in zip(a.h, a.g)) % 2 else 1


def monodromy(a: Anyon, b: Anyon) -> int:
    """Full braiding phase of a around b (symmetric, in {+1, -1})."""
    if a.n != b.n:
        raise LayerMismatch(f"cannot braid anyons on {a.n} and {b.n} layers")
    acc = sum(x * y for x, y in zip(a.h, b.g)) + sum(x * y for x, y in zip(b.h, a.g))
    return -1 if acc % 2 else 1


def all_anyons(n: int) -> list[Anyon]:
    """All 4^n anyons of n layers, vacuum first, in lexicographic bit order."""
    out = []
    for bits in itertools.product((0, 1), repeat=2 * n):
        out.append(Anyon(n, bits[:n], bits[n:]))
    return out


def bosons(n: int) -> list[Anyon]:
    """Non-vacuum anyons with spin +1."""
    return [a for a in all_anyons(n) if spin(a) == 1 and not a.is_vacuum]


def fermions(n: int) -> list[Anyon]:
    return [a for a in all_anyons(n) if spin(a) == -1]


# --- color/Pauli naming layer (n = 2 only) -------------------------------
#
# Layer dictionary: e1 = e on layer 1, etc.  The table identifies the color
# code's bosons with products of the two toric-code layers:
#   x row:  rx = e1, gx = e1 e2, bx = e2
#   y row:  ry = e1 m2, gy = f1 f2, by = m1 e2
#   z row:  rz = m2, gz = m1 m2, bz = m1
# and the six fermions with f1 = f(1), f2 = f(2), f3 = e1 f2, f4 = f1 e2,
# f5 = m1 f2, f6 = f1 m2.

_LABEL_TO_HG: dict[str, tuple[tuple[int, int], tuple[int, int]]] = {
    VACUUM_LABEL: ((0, 0), (0, 0)),
    "rx": ((1, 0), (0, 0)),
    "gx": ((1, 1), (0, 0)),
    "bx": ((0, 1), (0, 0)),
    "ry": ((1, 0), (0, 1)),
    "gy": ((1, 1), (1, 1)),
    "by": ((0, 1), (1, 0)),
    "rz": ((0, 0), (0, 1)),
    "gz": ((0, 0), (1, 1)),
    "bz": ((0, 0), (1, 0)),
    "f1": ((1, 0), (1, 0)),
    "f2": ((0, 1), (0, 1)),
    "f3": ((1, 1), (0, 1)),
    "f4": ((1, 1), (1, 0)),
    "f5": ((0, 1), (1, 1)),
    "f6": ((1, 0), (1, 1)),
}
_HG_TO_LABEL = {hg: lbl for lbl, hg in _LABEL_TO_HG.items()}

BOSON_LABELS = [c + p for p in PAULIS for c in COLORS]
FERMION_LABELS = [f"f{i}" for i in range(1, 7)]
ALL_LABELS = [VACUUM_LABEL] + BOSON_LABELS + FERMION_LABELS


def from_label(label: str) -> Anyon:
    """Anyon for a color/Pauli (or vacuum/fermion) name; n = 2 only."""
    try:
        h, g = _LABEL_TO_HG[label]
    except KeyError:
        raise KeyError(f"unknown anyon label {label!r}") from None
    return Anyon(2, h, g)


def to_label(a: Anyon) -> str:
    if a.n != 2:
        raise LayerMismatch("labels are defined for n = 2 only")
    return _HG_TO_LABEL[(a.h, a.g)]


def label_color(label: str) -> str | None:
    """Color letter of a boson label, None for vacuum/fermions."""
    if len(label) == 2 and label[0] in COLORS and label[1] in PAULIS:
        return label[0]
    return None


def label_pauli(label: str) -> str | None:
    if len(label) == 2 and label[0] in COLORS and label[1] in PAULIS:
        return label[1]
    return None


def boson_table() -> list[list[str]]:
    """The 3x3 boson names, rows = Pauli x/y/z, columns = color r/g/b."""
    return [[c + p for c in COLORS] for p in PAULIS]


# --- automorphisms --------------------------------------------------------


@dataclass(frozen=True)
class Automorphism:
    """Invertible linear map on (h | g) bit vectors preserving spin."""

    n: int
    matrix: tuple[tuple[int, ...], ...]  # 2n x 2n, rows act on (h | g)

    def __call__(self, a: Anyon) -> Anyon:
        return apply_automorphism(self, a)

    def compose(self, other: "Automorphism") -> "Automorphism":
        if self.n != other.n:
            raise LayerMismatch("automorphism layer counts differ")
        m = (np.array(self.matrix) @ np.array(other.matrix)) % 2
        return Automorphism(self.n, tuple(tuple(int(x) for x in row) for row in m))


def apply_automorphism(phi: Automorphism, a: Anyon) -> Anyon:
    if phi.n != a.n:
        raise LayerMismatch("automorphism and anyon layer counts differ")
    v = np.array(a.bits, dtype=np.uint8)
    w = (np.array(phi.matrix, dtype=np.uint8) @ v) % 2
    return Anyon.from_bits(w)


def _gf2_invertible(m: np.ndarray) -> bool:
    m = m.copy() % 2
    dim = m.shape[0]
    row = 0
    for col in range(dim):
        piv = None
        for r in range(row, dim):
            if m[r, col]:
                piv = r
                break
        if piv is None:
            return False
        m[[row, piv]] = m[[piv, row]]
        for r in range(dim):
            if r != row and m[r, col]:
                m[r] ^= m[row]
        row += 1
    return True


@lru_cache(maxsize=None)
def enumerate_automorphisms(n: int) -> tuple[Automorphism, ...]:
    """All invertible bit matrices on Z2^(2n) preserving every anyon's spin.

    Brute force over all 2^(4 n^2) candidate matrices, so only small n is
    feasible (n = 2 takes a few seconds; n = 3 is out of reach).
    """
    if n > 2:
        raise ValueError("brute-force enumeration supported for n <= 2 only")
    dim = 2 * n
    anyon_bits = np.array([a.bits for a in all_anyons(n)], dtype=np.uint8)
    spins = np.array([spin(a) for a in all_anyons(n)])
    out = []
    for bits in itertools.product((0, 1), repeat=dim * dim):
        m = np.array(bits, dtype=np.uint8).reshape(dim, dim)
        mapped = (anyon_bits @ m.T) % 2
        h, g = mapped[:, :n], mapped[:, n:]
        new_spins = 1 - 2 * ((h * g).sum(axis=1).astype(np.int64) % 2)
        if not np.array_equal(new_spins, spins):
            continue
        if not _gf2_invertible(m):
            continue
        out.append(Automorphism(n, tuple(tuple(int(x) for x in row) for row in m)))
    return tuple(out)
