"""Boundary and domain-wall classification for n stacked toric codes.

A gapped boundary is specified by a subgroup N = Z2^k of the magnetic
label group Z2^n together with a 2-cocycle class on N, represented by its
normalised pair-coupling bits n_ij (one bit per unordered basis pair).
An indicator function decides which anyons (g|h) condense on the
boundary; the resulting sets are Lagrangian subgroups of the 2n-bit anyon
group.  Folding identifies a wall between two m-layer phases with a
boundary of the 2m-layer stack and classifies it as opaque,
semi-transparent or invertible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gf2
from .anyons import Anyon, monodromy, spin


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of Z2^n given by an independent basis (canonical RREF)."""

    n: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def from_vectors(cls, n: int, vectors) -> "Subgroup":
        vecs = [tuple(int(b) for b in v) for v in vectors]
        if any(len(v) != n for v in vecs):
            raise ValueError("basis vectors must have length n")
        if not vecs:
            return cls(n, ())
        red, _ = gf2.rref(vecs)
        if red.shape[0] != len(vecs):
            raise ValueError("basis vectors must be linearly independent")
        return cls(n, tuple(tuple(int(b) for b in row) for row in red))

    @property
    def k(self) -> int:
        return len(self.basis)

    def members(self) -> list[tuple[int, ...]]:
        out = []
        for coeffs in itertools.product((0, 1), repeat=self.k):
            v = np.zeros(self.n, dtype=np.uint8)
            for c, b in zip(coeffs, self.basis):
                if c:
                    v ^= np.array(b, dtype=np.uint8)
            out.append(tuple(int(x) for x in v))
        return out

    def coords_of(self, g) -> tuple[int, ...] | None:
        """Coordinates of g in the basis, or None if g is outside N."""
        g = tuple(int(b) for b in g)
        if self.k == 0:
            return () if not any(g) else None
        x = gf2.solve(self.basis, g)
        if x is None:
            return None
        return tuple(int(b) for b in x)


@dataclass(frozen=True)
class CocycleClass:
    """Normalised 2-cocycle class on Z2^k: bits n_ij for pairs i < j."""

    k: int
    n_ij: tuple[int, ...]

    def __post_init__(self):
        if len(self.n_ij) != self.k * (self.k - 1) // 2:
            raise ValueError("need one bit per unordered basis pair")

    @classmethod
    def trivial(cls, k: int) -> "CocycleClass":
        return cls(k, (0,) * (k * (k - 1) // 2))

    def bit(self, i: int, j: int) -> int:
        """n_ij for i < j."""
        if not 0 <= i < j < self.k:
            raise IndexError((i, j))
        idx = sum(self.k - 1 - t for t in range(i)) + (j - i - 1)
        return self.n_ij[idx]

    @property
    def is_trivial(self) -> bool:
        return not any(self.n_ij)


def all_cocycle_classes(k: int) -> list[CocycleClass]:
    npairs = k * (k - 1) // 2
    return [CocycleClass(k, bits) for bits in itertools.product((0, 1), repeat=npairs)]


def cocycle_eval(c: CocycleClass, a, b) -> int:
    """psi(a, b) = (-1)^(sum_{i<j} n_ij a_i b_j) on N-coordinate vectors."""
    a = tuple(int(x) for x in a)
    b = tuple(int(x) for x in b)
    if len(a) != c.k or len(b) != c.k:
        raise ValueError("arguments must be length-k coordinate vectors")
    acc = 0
    for i in range(c.k):
        for j in range(i + 1, c.k):
            acc ^= c.bit(i, j) & a[i] & b[j]
    return -1 if acc else 1


def indicator(N: Subgroup, c: CocycleClass, g, h) -> int:
    """1 if the anyon with magnetic part g, electric part h condenses.

    Averages the character of h against the cocycle twist over N; the
    result is 0 or 1.
    """
    g = tuple(int(b) for b in g)
    h = tuple(int(b) for b in h)
    gc = N.coords_of(g)
    if gc is None:
        return 0
    total = 0
    for lv in N.members():
        lc = N.coords_of(lv)
        chi = -1 if sum(x * y for x, y in zip(lv, h)) % 2 else 1
        total += chi * cocycle_eval(c, lc, gc) * cocycle_eval(c, gc, lc)
    val = total // (2 ** N.k)
    assert val in (0, 1), "indicator must average to 0 or 1"
    return val


@dataclass(frozen=True)
class LagrangianSubgroup:
    """Maximal subgroup of mutually trivially braiding bosons."""

    n: int
    elements: frozenset[Anyon]

    def gh_strings(self) -> list[str]:
        """Elements printed magnetic-part-first: '(g|h)'."""
        return sorted(
            "({}|{})".format("".join(map(str, a.g)), "".join(map(str, a.h)))
            for a in self.elements
        )

    def __contains__(self, a: Anyon) -> bool:
        return a in self.elements


def lagrangian_from_spec(N: Subgroup, c: CocycleClass) -> LagrangianSubgroup:
    """Collect all (g|h) with indicator 1 (vectorised over h)."""
    n = N.n
    members = N.members()
    coords = list(itertools.product((0, 1), repeat=N.k))  # aligned with members()
    member_mat = np.array(members, dtype=np.uint8).reshape(len(members), n)
    all_h = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)
    # character parities chi_h(l): one row per l in N, one column per h
    char_parity = member_mat @ all_h.T % 2
    elems = set()
    for g, gc in zip(members, coords):
        twist_parity = np.array(
            [
                (1 - cocycle_eval(c, lc, gc) * cocycle_eval(c, gc, lc)) // 2
                for lc in coords
            ],
            dtype=np.uint8,
        )
        hits = np.all(char_parity == twist_parity[:, None], axis=0)
        for h in all_h[hits]:
            elems.add(Anyon(n, tuple(int(b) for b in h), tuple(g)))
    return LagrangianSubgroup(n, frozenset(elems))


def enumerate_subgroups(n: int) -> list[Subgroup]:
    """All subgroups of Z2^n, including the trivial one."""
    nonzero = [v for v in itertools.product((0, 1), repeat=n) if any(v)]
    seen: dict[frozenset, Subgroup] = {}
    out = [Subgroup(n, ())]
    for k in range(1, n + 1):
        for combo in itertools.combinations(nonzero, k):
            red, _ = gf2.rref(combo)
            if red.shape[0] != k:
                continue
            sub = Subgroup(n, tuple(tuple(int(b) for b in row) for row in red))
            key = frozenset(sub.members())
            if key not in seen:
                seen[key] = sub
    out.extend(sorted(seen.values(), key=lambda s: (s.k, s.basis)))
    return out


def enumerate_boundaries(n: int) -> list[tuple[Subgroup, CocycleClass]]:
    """All boundary specs (N, cocycle class) of the n-layer stack."""
    out = []
    for N in enumerate_subgroups(n):
        for c in all_cocycle_classes(N.k):
            out.append((N, c))
    return out


# --- folding: walls between two m-layer phases ----------------------------


@dataclass(frozen=True)
class WallDescription:
    """Transparency classification of a 2m-layer Lagrangian as a wall.

    condensed_left/right hold the m-layer anyons absorbed on each side;
    tunneling lists pairs (a, a') meaning a entering from the left leaves
    as a' on the right (modulo the condensed anyons).
    """

    m: int
    transparency: str  # opaque | semi-transparent | invertible
    condensed_left: tuple[Anyon, ...]
    condensed_right: tuple[Anyon, ...]
    tunneling: tuple[tuple[Anyon, Anyon], ...]


def _split_sides(a: Anyon, m: int) -> tuple[Anyon, Anyon]:
    return (
        Anyon(m, a.h[:m], a.g[:m]),
        Anyon(m, a.h[m:], a.g[m:]),
    )


def _side_vector(a: Anyon, m: int) -> np.ndarray:
    """Bits ordered (left h | left g | right h | right g)."""
    left, right = _split_sides(a, m)
    return np.array(left.h + left.g + right.h + right.g, dtype=np.uint8)


def _reduce_mod(vec: np.ndarray, space_rows: list[np.ndarray]) -> np.ndarray:
    """Canonical representative of vec modulo the span of space_rows."""
    if not space_rows:
        return vec.copy()
    red, pivots = gf2.rref(space_rows)
    out = vec.copy()
    for row, p in zip(red, pivots):
        if out[p]:
            out ^= row
    return out


def fold_wall(L: LagrangianSubgroup) -> WallDescription:
    """Classify a wall between two m-layer phases from the folded boundary.

    The classification works on a canonical echelon basis of L over the
    side-split coordinates, so it does not depend on how L was generated.
    """
    if L.n % 2:
        raise ValueError("folding needs an even layer count")
    m = L.n // 2
    dim_l = 2 * m
    rows = np.array([_side_vector(a, m) for a in sorted(L.elements)], dtype=np.uint8)
    basis, _ = gf2.rref(rows)

    def pure_side(zero_cols: slice, keep_cols: slice) -> list[np.ndarray]:
        # combinations y of basis rows with (y . basis) vanishing on zero_cols
        sub = basis[:, zero_cols]
        combos = gf2.null_space(sub.T)
        return [(y @ basis % 2).astype(np.uint8)[keep_cols] for y in combos]

    left_pure = pure_side(slice(dim_l, 2 * dim_l), slice(0, dim_l))
    right_pure = pure_side(slice(0, dim_l), slice(dim_l, 2 * dim_l))

    def to_anyon(vec) -> Anyon:
        vec = tuple(int(b) for b in vec)
        return Anyon(m, vec[:m], vec[m:])

    n_mixed = basis.shape[0] - len(left_pure) - len(right_pure)
    if n_mixed == 0:
        transparency = "opaque"
    elif not left_pure and not right_pure:
        transparency = "invertible"
    else:
        transparency = "semi-transparent"

    # extend the pure-side generators to a full basis; the extension rows
    # couple both sides and (reduced modulo the pure parts) give canonical
    # tunneling pairs a |-> a'
    zero = np.zeros(dim_l, dtype=np.uint8)
    space: list[np.ndarray] = [np.concatenate([v, zero]) for v in left_pure]
    space += [np.concatenate([zero, v]) for v in right_pure]
    tunneling = []
    for r in basis:
        if space and gf2.in_rowspace(space, r):
            continue
        space.append(r)
        lpart = _reduce_mod(r[:dim_l], left_pure)
        rpart = _reduce_mod(r[dim_l:], right_pure)
        tunneling.append((to_anyon(lpart), to_anyon(rpart)))
    return WallDescription(
        m,
        transparency,
        tuple(sorted(to_anyon(v) for v in left_pure)),
        tuple(sorted(to_anyon(v) for v in right_pure)),
        tuple(sorted(tunneling)),
    )


def validate_lagrangian(L: LagrangianSubgroup) -> None:
    """Assert the defining properties: size 2^n, bosonic, isotropic, maximal."""
    elems = sorted(L.elements)
    if len(elems) != 2 ** L.n:
        raise ValueError(f"expected {2 ** L.n} elements, got {len(elems)}")
    for a in elems:
        if spin(a) != 1:
            raise ValueError(f"{a!r} is not a boson")
    for a, b in itertools.combinations(elems, 2):
        if monodromy(a, b) != 1:
            raise ValueError(f"{a!r}, {b!r} braid non-trivially")
    for h in itertools.product((0, 1), repeat=L.n):
        for g in itertools.product((0, 1), repeat=L.n):
            a = Anyon(L.n, h, g)
            if a in L.elements:
                continue
            if all(monodromy(a, b) == 1 for b in elems):
                raise ValueError(f"{a!r} braids trivially with all of L: not maximal")
