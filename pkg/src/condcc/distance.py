"""Exact minimum logical operator weight for small code patches.

A minimum-weight logical operator always has face-connected support: if its
support split into parts sharing no face, each part alone would commute with
every stabilizer (a face touches only one part), giving a lighter logical or
a removable stabilizer factor.  The search therefore enumerates connected
qubit subsets in order of size and solves, per support, the GF(2) system for
centralizer elements living exactly on it.
"""

from __future__ import annotations

import numpy as np

from . import gf2
from .pauli import PauliOp

__all__ = ["min_logical_weight"]


def _face_adjacency(lattice) -> list[list[int]]:
    adj = [set() for _ in range(lattice.n)]
    for f in lattice.faces:
        for a in f.vertices:
            adj[a].update(f.vertices)
    for q in range(lattice.n):
        adj[q].discard(q)
    return [sorted(s) for s in adj]


def _connected_subsets(adj: list[list[int]], size: int):
    """All connected subsets of exactly `size` vertices, each yielded once
    (rooted at its smallest vertex)."""
    n = len(adj)

    def extend(subset: list[int], extension: list[int], root: int):
        if len(subset) == size:
            yield tuple(subset)
            return
        ext = list(extension)
        while ext:
            w = ext.pop()
            new_ext = ext + [
                u
                for u in adj[w]
                if u > root and u not in subset and u not in ext
                and all(u not in adj[s] for s in subset)
            ]
            yield from extend(subset + [w], new_ext, root)

    for root in range(n):
        yield from extend([root], [u for u in adj[root] if u > root], root)


def _rowspace_echelon(rows_int: list[int]) -> dict[int, int]:
    """GF(2) echelon of bit-packed rows, keyed by leading bit."""
    ech: dict[int, int] = {}
    for r in rows_int:
        while r:
            lead = r.bit_length() - 1
            if lead in ech:
                r ^= ech[lead]
            else:
                ech[lead] = r
                break
    return ech


def _reduces_to_zero(v: int, ech: dict[int, int]) -> bool:
    while v:
        lead = v.bit_length() - 1
        if lead not in ech:
            return False
        v ^= ech[lead]
    return v == 0


def min_logical_weight(patch, max_weight: int | None = None) -> int:
    """Exact code distance by exhaustive connected-support search.

    Searches supports of increasing size below the lightest known logical
    representative; if none is found, that representative is minimal.
    """
    gens = patch.stabilizers.canonical_form
    n = patch.n
    upper = min(
        op.weight for pair in patch.logicals for op in pair
    ) if patch.logicals else 0
    if max_weight is not None:
        upper = min(upper, max_weight)
    if patch.k == 0:
        raise ValueError("patch encodes no logical qubits")

    # generator rows packed as ints (x|z layout) for membership tests
    def pack(x, z) -> int:
        v = 0
        for q in np.nonzero(x)[0]:
            v |= 1 << int(q)
        for q in np.nonzero(z)[0]:
            v |= 1 << (n + int(q))
        return v

    ech = _rowspace_echelon([pack(g.x, g.z) for g in gens])
    # commutation matrix: row per generator, columns (z|x) so that
    # A @ (x|z) = commutation parities
    A = np.array(
        [np.concatenate([g.z, g.x]) for g in gens], dtype=np.uint8
    )
    adj = _face_adjacency(patch.lattice)

    for w in range(1, upper):
        for support in _connected_subsets(adj, w):
            cols = np.concatenate([A[:, list(support)],
                                   A[:, [n + q for q in support]]], axis=1)
            basis = gf2.null_space(cols)
            dim = len(basis)
            if dim == 0:
                continue
            basis = np.array(basis, dtype=np.uint8)
            for combo in range(1, 1 << dim):
                sel = [(combo >> i) & 1 for i in range(dim)]
                v = (np.array(sel, dtype=np.uint8) @ basis) % 2
                xs, zs = v[:w], v[w:]
                if not np.all(xs | zs):
                    continue  # not full support; a smaller size covers it
                packed = 0
                for i, q in enumerate(support):
                    if xs[i]:
                        packed |= 1 << q
                    if zs[i]:
                        packed |= 1 << (n + q)
                if not _reduces_to_zero(packed, ech):
                    return w
    return upper
