"""Three-colorable hexagonal lattices and the codes living on them.

The infinite honeycomb is described through its dual triangular lattice of
hexagon centers ("cells") at integer combinations of a1 = (1, 0) and
a2 = (1/2, sqrt(3)/2).  Cell (m, n) has color (m + 2n) mod 3; each cell
carries two vertices (sublattices A above and B below the center).  Tori
are quotients by L times the color-0 sublattice, planar patches are cut
from the infinite lattice.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .pauli import (
    _BITS_TO_LETTER,
    consistent_signs,
    _LETTER_TO_BITS,
    PauliOp,
    StabilizerGroup,
    commutes,
    logicals,
    reduce_weight,
)

COLORS = "rgb"

_A1 = (1.0, 0.0)
_A2 = (0.5, math.sqrt(3) / 2)
# center-to-vertex distance of a hexagon with unit center spacing
_RV = 1 / math.sqrt(3)


def cell_pos(m: int, n: int) -> tuple[float, float]:
    return (m * _A1[0] + n * _A2[0], m * _A1[1] + n * _A2[1])


def cell_color(m: int, n: int) -> int:
    return (m + 2 * n) % 3


def vertex_pos(v) -> tuple[float, float]:
    s, m, n = v
    x, y = cell_pos(m, n)
    return (x, y + _RV) if s == "A" else (x, y - _RV)


def vertex_cells(v) -> list[tuple[int, int]]:
    """The three hexagons meeting at a vertex (one of each color)."""
    s, m, n = v
    if s == "A":
        return [(m, n), (m, n + 1), (m - 1, n + 1)]
    return [(m, n), (m, n - 1), (m + 1, n - 1)]


def _cell_vertices_unordered(m: int, n: int) -> list[tuple]:
    return [
        ("A", m, n),
        ("A", m, n - 1),
        ("A", m + 1, n - 1),
        ("B", m, n),
        ("B", m, n + 1),
        ("B", m - 1, n + 1),
    ]


def cell_vertices_cyclic(m: int, n: int) -> list[tuple]:
    cx, cy = cell_pos(m, n)
    vs = _cell_vertices_unordered(m, n)
    return sorted(vs, key=lambda v: math.atan2(vertex_pos(v)[1] - cy, vertex_pos(v)[0] - cx))


def vertex_neighbors(v) -> list[tuple]:
    s, m, n = v
    if s == "A":
        return [("B", m, n + 1), ("B", m - 1, n + 1), ("B", m - 1, n + 2)]
    return [("A", m, n - 1), ("A", m + 1, n - 1), ("A", m + 1, n - 2)]


def edge_color(u, v) -> int:
    """Color of the edge u-v: the third color next to its two faces."""
    shared = set(vertex_cells(u)) & set(vertex_cells(v))
    if len(shared) != 2:
        raise ValueError(f"{u} and {v} are not adjacent")
    return (0 + 1 + 2) - sum(cell_color(*c) for c in shared)


# --- lattice container ------------------------------------------------------


@dataclass
class Face:
    vertices: tuple[int, ...]        # qubit indices, cyclic where meaningful
    color: str                       # 'r' | 'g' | 'b'
    bases: tuple[str, ...] = ("X", "Z")  # which stabilizer bases the face hosts
    key: object = None               # construction-specific identifier


@dataclass
class Edge:
    u: int
    v: int
    color: str
    key: object = None


@dataclass
class ColorLattice:
    geometry: str                            # 'torus' | 'planar'
    coords: list[tuple[float, float]]        # per qubit, for rendering
    edges: list[Edge]
    faces: list[Face]
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.coords)

    def faces_of_color(self, color: str) -> list[Face]:
        return [f for f in self.faces if f.color == color]

    def validate(self):
        """Check the 3-colorability invariants."""
        vertex_faces: dict[int, list[Face]] = {i: [] for i in range(self.n)}
        for f in self.faces:
            for q in f.vertices:
                vertex_faces[q].append(f)
        for q, fs in vertex_faces.items():
            if len(fs) > 3:
                raise ValueError(f"vertex {q} lies on {len(fs)} faces")
            cols = [f.color for f in fs]
            if len(set(cols)) != len(cols):
                raise ValueError(f"vertex {q} sees a repeated face color")
            if self.geometry == "torus" and len(fs) != 3:
                raise ValueError(f"bulk vertex {q} lies on {len(fs)} != 3 faces")
        face_sets = [set(f.vertices) for f in self.faces]
        for i, fi in enumerate(face_sets):
            for j in range(i + 1, len(face_sets)):
                shared = fi & face_sets[j]
                if shared and self.faces[i].color == self.faces[j].color:
                    raise ValueError(
                        f"adjacent faces {i}, {j} share color {self.faces[i].color}"
                    )
        for e in self.edges:
            shared = [
                f for f in self.faces if e.u in f.vertices and e.v in f.vertices
            ]
            if len(shared) == 2:
                third = set(COLORS) - {f.color for f in shared}
                if len(third) != 1 or e.color not in third:
                    raise ValueError(f"edge ({e.u},{e.v}) miscolored")
        return True

    def to_json(self) -> dict:
        return {
            "geometry": self.geometry,
            "n": self.n,
            "coords": self.coords,
            "edges": [[e.u, e.v, e.color] for e in self.edges],
            "faces": [
                {"vertices": list(f.vertices), "color": f.color, "bases": list(f.bases)}
                for f in self.faces
            ],
            "metadata": self.metadata,
        }


@dataclass
class CodePatch:
    lattice: ColorLattice
    stabilizers: StabilizerGroup
    logicals: list[tuple[PauliOp, PauliOp]]
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.lattice.n

    @property
    def k(self) -> int:
        return self.stabilizers.k

    def validate(self):
        self.lattice.validate()
        assert len(self.logicals) == self.k
        for xr, zr in self.logicals:
            assert not commutes(xr, zr)
            for g in self.stabilizers.canonical_form:
                assert commutes(xr, g) and commutes(zr, g)
        return True


def _face_stabilizers(n: int, faces: list[Face]) -> list[PauliOp]:
    out = []
    for f in faces:
        for basis in f.bases:
            out.append(PauliOp.from_terms(n, {q: basis for q in f.vertices}))
    return out


def patch_from_lattice(lat: ColorLattice, metadata=None) -> CodePatch:
    gens = _face_stabilizers(lat.n, lat.faces)
    group = StabilizerGroup(gens)
    return CodePatch(lat, group, logicals(group), metadata or {})


# --- hexagonal torus --------------------------------------------------------
#
# The color-0 sublattice of cells is generated by u1 = (1, 1) and
# u2 = (-1, 2); quotienting cells by L*u1, L*u2 leaves 3L^2 hexagons
# (L^2 per color) and works for every L >= 2.


def _canon_cell(m: int, n: int, L: int) -> tuple[int, int, int]:
    s = (m + 2 * n) % 3
    b = (n - m + s) // 3
    a = m - s + b
    return (a % L, b % L, s)


def _cell_rep(key: tuple[int, int, int]) -> tuple[int, int]:
    a, b, s = key
    return (a - b + s, a + 2 * b)


def build_hex_torus(L: int) -> CodePatch:
    """The color code on a torus of L x L hexagons per color."""
    if L < 2:
        raise ValueError("torus size must be at least 2")

    def vkey(v):
        s, m, n = v
        return (s, _canon_cell(m, n, L))

    vertex_ids: dict = {}
    coords: list[tuple[float, float]] = []
    for a in range(L):
        for b in range(L):
            for s in range(3):
                m, n = _cell_rep((a, b, s))
                for sub in ("A", "B"):
                    vertex_ids[(sub, (a, b, s))] = len(coords)
                    coords.append(vertex_pos((sub, m, n)))

    faces = []
    for a in range(L):
        for b in range(L):
            for s in range(3):
                m, n = _cell_rep((a, b, s))
                vs = tuple(vertex_ids[vkey(v)] for v in cell_vertices_cyclic(m, n))
                if len(set(vs)) != 6:
                    raise ValueError(f"torus L={L} wraps a face onto itself")
                faces.append(Face(vs, COLORS[cell_color(m, n)], key=(a, b, s)))

    edges = []
    seen = set()
    for (sub, key), qi in vertex_ids.items():
        m, n = _cell_rep(key)
        for w in vertex_neighbors((sub, m, n)):
            qj = vertex_ids[vkey(w)]
            ek = frozenset((qi, qj))
            if ek in seen:
                continue
            seen.add(ek)
            edges.append(Edge(qi, qj, COLORS[edge_color((sub, m, n), w)], key=ek))

    lat = ColorLattice("torus", coords, edges, faces, {"L": L})
    return patch_from_lattice(lat, {"name": "hex_torus", "L": L})

# --- planar patches ---------------------------------------------------------
#
# Planar codes are cut from the infinite lattice by straight lines.  Two cut
# styles realize the two boundary classes:
#
# * colored cuts run through vertices along a column of same-colored cells;
#   truncated faces keep 4 qubits and still host both X and Z checks;
# * Pauli cuts run through a row of face centers, bisecting every hexagon of
#   the row; bisected faces keep 3 qubits and host a single check in the
#   Pauli basis assigned to that boundary segment.

_EPS = 1e-7
# unit normal of the cell rows running along a1 + a2 (used as the second
# axis for parallelogram-shaped patches)
_NB = (-0.5, math.sqrt(3) / 2)


class BoundaryChanged(ValueError):
    """A transversal gate mapped the stabilizer group to a different group."""


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary segments of a planar patch, one label per segment.

    Labels are colors 'r' | 'g' | 'b' or Pauli letters 'x' | 'y' | 'z'.
    Corners sit exactly where the segment label changes.
    """

    segments: tuple[str, ...]

    def __post_init__(self):
        for s in self.segments:
            if s not in ("r", "g", "b", "x", "y", "z"):
                raise ValueError(f"unknown boundary segment label {s!r}")


def _collect_vertices(keep, radius: int):
    """All infinite-lattice vertices passing the keep predicate."""
    verts = []
    for m in range(-radius, radius + 1):
        for n in range(-radius, radius + 1):
            for sub in ("A", "B"):
                v = (sub, m, n)
                if keep(vertex_pos(v)):
                    verts.append(v)
    return verts


def _planar_lattice(verts, face_bases, metadata):
    """Assemble a planar ColorLattice from kept vertices.

    face_bases(cell, kept_vertices) returns the tuple of hosted bases for a
    cell (empty tuple for no stabilizer / no face).
    """
    vid = {v: i for i, v in enumerate(verts)}
    coords = [vertex_pos(v) for v in verts]
    cells = set()
    for v in verts:
        cells.update(vertex_cells(v))
    faces = []
    for c in sorted(cells):
        kept = [v for v in cell_vertices_cyclic(*c) if v in vid]
        if not kept:
            continue
        bases = face_bases(c, kept)
        if bases is None:
            continue
        faces.append(
            Face(tuple(vid[v] for v in kept), COLORS[cell_color(*c)], bases, key=c)
        )
    edges = []
    seen = set()
    for v in verts:
        for w in vertex_neighbors(v):
            if w in vid and frozenset((vid[v], vid[w])) not in seen:
                ek = frozenset((vid[v], vid[w]))
                seen.add(ek)
                edges.append(Edge(vid[v], vid[w], COLORS[edge_color(v, w)], key=ek))
    return ColorLattice("planar", coords, edges, faces, metadata)


def _planar_patch(lat: ColorLattice, metadata=None) -> CodePatch:
    patch = patch_from_lattice(lat, metadata)
    gens = patch.stabilizers.generators
    patch.logicals = [
        (reduce_weight(x, gens), reduce_weight(z, gens)) for x, z in patch.logicals
    ]
    return patch


# --- triangular codes -------------------------------------------------------


def _colored_triangle_keep(d: int):
    """Inclusive hull of the triangle with corners on A-vertices."""
    t = (d - 1) // 2
    corners = [vertex_pos(("A", -t, 0)), vertex_pos(("A", t, -t)), vertex_pos(("A", 0, t))]

    def keep(p):
        x, y = p
        for (ax, ay), (bx, by) in zip(corners, corners[1:] + corners[:1]):
            if (bx - ax) * (y - ay) - (by - ay) * (x - ax) < -_EPS:
                return False
        return True

    return keep


def _pauli_triangle_cuts(d: int):
    """Signed distances to the three face-center cut lines (bottom, left,
    right); the patch is where all three are strictly positive."""
    s3 = 1 / math.sqrt(3)

    def cuts(p):
        x, y = p
        return (y, x - s3 * y + d, -s3 * y - x)

    return cuts


def build_triangular(d: int, family: str = "colored") -> CodePatch:
    """Triangular patch with three colored or three Pauli boundaries.

    The colored family (odd d >= 3) has one boundary per color and distance
    d; the Pauli family (even d >= 2) has one boundary per Pauli basis,
    bisected boundary faces hosting a single check each, and distance d.
    """
    if family == "colored":
        if d < 3 or d % 2 == 0:
            raise ValueError("colored family needs odd d >= 3")
        keep = _colored_triangle_keep(d)

        def face_bases(cell, kept):
            return ("X", "Z") if len(kept) >= 4 else None

        spec = BoundarySpec(("r", "g", "b"))
    elif family == "pauli":
        if d < 2 or d % 2:
            raise ValueError("pauli family needs even d >= 2")
        cuts = _pauli_triangle_cuts(d)
        side_pauli = ("X", "Y", "Z")

        def keep(p):
            return min(cuts(p)) > _EPS

        def face_bases(cell, kept):
            if len(kept) == 6:
                return ("X", "Z")
            on_cut = [i for i, v in enumerate(cuts(cell_pos(*cell))) if abs(v) < _EPS]
            if len(on_cut) == 1 and len(kept) == 3:
                return (side_pauli[on_cut[0]],)
            return None

        spec = BoundarySpec(("x", "y", "z"))
    else:
        raise ValueError(f"unknown family {family!r}")

    verts = _collect_vertices(keep, d + 4)
    lat = _planar_lattice(verts, face_bases, {"boundary": spec.segments})
    return _planar_patch(lat, {"name": "triangular", "d": d, "family": family})


# --- rectangular patches ----------------------------------------------------


def _proj_nb(p) -> float:
    return p[0] * _NB[0] + p[1] * _NB[1]


def _build_rect_color_pauli(w: int, h: int) -> CodePatch:
    """Rectangle with two red (vertical) and two Pauli-X (horizontal)
    boundaries; vertical cuts are inclusive vertex cuts through red cell
    columns, horizontal cuts bisect a row of hexagons."""
    x_hi = 1.5 * w
    rows = 2 * h + 1
    y_hi = rows * math.sqrt(3) / 2

    def keep(p):
        x, y = p
        return -_EPS < x < x_hi + _EPS and _EPS < y < y_hi - _EPS

    def face_bases(cell, kept):
        y = cell_pos(*cell)[1]
        on_cut = abs(y) < _EPS or abs(y - y_hi) < _EPS
        if on_cut:
            return ("X",) if len(kept) == 3 else None
        return ("X", "Z") if len(kept) >= 4 else None

    verts = _collect_vertices(keep, 3 * (w + h) + 6)
    lat = _planar_lattice(verts, face_bases, {"boundary": ("r", "x", "r", "x")})
    return _planar_patch(lat, {"name": "rectangular", "w": w, "h": h,
                               "boundary": ("r", "x", "r", "x")})


def _string_like(p: PauliOp, coords, letter: str, axis) -> bool:
    """All one letter and thin along the given axis (a straight string)."""
    sup = p.support
    if any(p.letter(q) != letter for q in sup):
        return False
    a = [axis(coords[q]) for q in sup]
    return (max(a) - min(a)) < 0.75


def _build_rect_rbrb(w: int, h: int) -> CodePatch:
    """Parallelogram-shaped patch with two red and two blue colored
    boundaries.

    The cuts are placed so that every boundary supports an even number of
    qubits; the logical representatives are then four single-color string
    operators: a red X/Z pair running between the red boundaries (along
    red edges) and a blue X/Z pair between the blue boundaries (along blue
    edges), paired across colors so that a transversal Hadamard acts as
    Hadamard on both logicals composed with their exchange.
    """
    x_lo, x_hi = 0.25, 1.75 + 1.5 * w
    t_lo, t_hi = 0.5, 1.75 + 1.5 * h

    def keep(p):
        return (x_lo + _EPS < p[0] < x_hi - _EPS) and (t_lo + _EPS < _proj_nb(p) < t_hi - _EPS)

    def face_bases(cell, kept):
        return ("X", "Z") if len(kept) >= 4 else None

    verts = _collect_vertices(keep, 3 * (w + h) + 6)
    lat = _planar_lattice(verts, face_bases, {"boundary": ("r", "b", "r", "b")})
    patch = patch_from_lattice(lat, {"name": "rectangular", "w": w, "h": h,
                                     "boundary": ("r", "b", "r", "b")})
    if patch.k != 2:
        raise AssertionError(f"rbrb patch has k={patch.k}, expected 2")

    # rebuild the logical basis out of directed string representatives
    gens = patch.stabilizers.generators
    group = patch.stabilizers
    coords = lat.coords
    base = [op for pair in patch.logicals for op in pair]
    reps = []
    for bits in range(1, 16):
        op = PauliOp.identity(patch.n)
        for i in range(4):
            if bits >> i & 1:
                op = op * base[i]
        reps.append(reduce_weight(PauliOp(op.x, op.z), gens))

    def find(letter, axis):
        best = None
        for op in reps:
            if _string_like(op, coords, letter, axis):
                if best is None or op.weight < best.weight:
                    best = op
        if best is None:
            raise AssertionError(f"no {letter} string along requested axis")
        return best

    x_red = find("X", _proj_nb)         # between the red (left/right) sides
    z_red = find("Z", _proj_nb)
    x_blue = find("X", lambda p: p[0])  # between the blue (top/bottom) sides
    z_blue = find("Z", lambda p: p[0])

    new_logicals = [(x_red, z_blue), (x_blue, z_red)]
    for i, (xr, zr) in enumerate(new_logicals):
        assert not commutes(xr, zr)
        for j, (xo, zo) in enumerate(new_logicals):
            if i != j:
                assert commutes(xr, zo) and commutes(zr, xo)
        for g in group.canonical_form:
            assert commutes(xr, g) and commutes(zr, g)
    patch.logicals = new_logicals
    return patch


def build_combined_rectangle(d: int) -> CodePatch:
    """Rectangle with red left/right and Pauli-X top/bottom boundaries whose
    green and blue X-checks multiply to the identity.

    The vertical cuts clip faces between vertex columns so that every qubit
    lies in exactly one green and one blue X-check (the bisected top/bottom
    faces host a single X-check each and count toward their color).  The
    product of all green and blue X-checks is therefore the identity, giving
    one redundant check whose outcome parity is conserved in every
    measurement round.  The patch encodes a single logical qubit: Z is a
    horizontal red string of even weight between the red sides and X a
    vertical string of weight d+1 between the Pauli-X sides.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError("combined rectangle needs odd d >= 3")
    x_lo, x_hi = 0.25, 1.5 * d - 1.75
    rows = d + 1
    y_hi = rows * math.sqrt(3) / 2

    def keep(p):
        x, y = p
        return x_lo - _EPS < x < x_hi + _EPS and _EPS < y < y_hi - _EPS

    def face_bases(cell, kept):
        y = cell_pos(*cell)[1]
        if abs(y) < _EPS or abs(y - y_hi) < _EPS:
            return ("X",) if len(kept) == 3 else None
        return ("X", "Z") if len(kept) >= 4 else None

    verts = _collect_vertices(keep, 3 * d + 8)
    lat = _planar_lattice(verts, face_bases, {"boundary": ("r", "x", "r", "x")})
    patch = _planar_patch(lat, {"name": "combined_rectangle", "d": d,
                                "boundary": ("r", "x", "r", "x")})
    if patch.k != 1:
        raise AssertionError(f"combined rectangle d={d} has k={patch.k}")
    parity = np.zeros(patch.n, dtype=np.uint8)
    for f in lat.faces:
        if f.color in ("g", "b") and "X" in f.bases:
            parity[list(f.vertices)] ^= 1
    if parity.any():
        raise AssertionError("green/blue X-checks do not multiply to identity")
    # orient the logical pair as (vertical X string, horizontal Z string)
    xr, zr = patch.logicals[0]
    if any(xr.letter(q) != "X" for q in xr.support) or any(
        zr.letter(q) != "Z" for q in zr.support
    ):
        raise AssertionError("logical representatives are not pure X / pure Z")
    if zr.weight % 2:
        raise AssertionError("horizontal Z string has odd weight")
    return patch


def build_rectangular(w: int, h: int, spec: BoundarySpec) -> CodePatch:
    """Four-sided patch with k=2; supported boundary specs are
    ('r','x','r','x') and ('r','b','r','b')."""
    if len(spec.segments) != 4:
        raise ValueError("rectangular patches need four boundary segments")
    if w < 2 or h < 2:
        raise ValueError("rectangle too small; need w >= 2 and h >= 2")
    if spec.segments == ("r", "x", "r", "x"):
        return _build_rect_color_pauli(w, h)
    if spec.segments == ("r", "b", "r", "b"):
        if w != h:
            # non-square aspect ratios develop a weight-2 corner logical,
            # so only the square patch is supported
            raise ValueError("the red/blue/red/blue patch must be square (w == h)")
        return _build_rect_rbrb(w, h)
    raise ValueError(f"unsupported boundary spec {spec.segments}")


# --- transversal single-qubit Cliffords ---------------------------------------

# images of X and Z under conjugation, as (letter, sign)
_CLIFFORD_1Q = {
    "I": (("X", 1), ("Z", 1)),
    "X": (("X", 1), ("Z", -1)),
    "Y": (("X", -1), ("Z", -1)),
    "Z": (("X", -1), ("Z", 1)),
    "H": (("Z", 1), ("X", 1)),
    "S": (("Y", 1), ("Z", 1)),
    "SDG": (("Y", -1), ("Z", 1)),
}


def _letter_images(u: str) -> dict:
    """Per-letter conjugation table {letter: (letter', phase_increment)}."""
    try:
        (lx, sx), (lz, sz) = _CLIFFORD_1Q[u.upper()]
    except KeyError:
        raise ValueError(f"unknown single-qubit Clifford {u!r}") from None
    img_x = PauliOp.from_string(("+" if sx == 1 else "-") + lx)
    img_z = PauliOp.from_string(("+" if sz == 1 else "-") + lz)
    prod = img_x * img_z
    img_y = PauliOp(prod.x, prod.z, prod.phase + 1)  # Y = i X Z
    table = {"I": ("I", 0)}
    for letter, img in (("X", img_x), ("Z", img_z), ("Y", img_y)):
        table[letter] = (_BITS_TO_LETTER[(int(img.x[0]), int(img.z[0]))], img.phase)
    return table


def conjugate_transversal(op: PauliOp, u: str) -> PauliOp:
    """The image of op under the same single-qubit Clifford on every qubit."""
    table = _letter_images(u)
    x = np.zeros(op.n, dtype=np.uint8)
    z = np.zeros(op.n, dtype=np.uint8)
    phase = op.phase
    for q in op.support:
        letter, inc = table[op.letter(q)]
        bx, bz = _LETTER_TO_BITS[letter]
        x[q], z[q] = bx, bz
        phase += inc
    return PauliOp(x, z, phase)


def apply_transversal(patch: CodePatch, u: str) -> dict:
    """Logical action of a transversal single-qubit Clifford.

    Returns {label: (image expression, sign)} over the patch's logical
    representatives, e.g. {"X1": ("Z2", 1), ...}; the expression "X1*Z1"
    denotes the phase-canonical Hermitian product.  Raises BoundaryChanged
    if the gate does not preserve the stabilizer group with +1 signs.
    """
    group = patch.stabilizers
    for g in group.generators:
        member, sign = group.contains(conjugate_transversal(g, u))
        if not member or sign != 1:
            raise BoundaryChanged(
                f"transversal {u} maps a stabilizer outside the group"
            )
    action = {}
    for i, (xr, zr) in enumerate(patch.logicals, 1):
        for label, op in ((f"X{i}", xr), (f"Z{i}", zr)):
            img = conjugate_transversal(op, u)
            terms = []
            cand = PauliOp.identity(patch.n)
            for j, (xo, zo) in enumerate(patch.logicals, 1):
                if not commutes(img, zo):
                    terms.append(f"X{j}")
                    cand = cand * xo
                if not commutes(img, xo):
                    terms.append(f"Z{j}")
                    cand = cand * zo
            cand = PauliOp(cand.x, cand.z, 0)  # canonical Hermitian rep
            member, sign = group.contains(img * cand)
            if not member:
                raise AssertionError("logical image failed to decompose")
            action[label] = ("*".join(terms) if terms else "I", sign)
    return action


# --- region condensation ------------------------------------------------------


def full_region(patch: CodePatch) -> set[int]:
    return set(range(patch.n))


def disk_region(patch: CodePatch, seed: int, radius: int) -> set[int]:
    """Qubits within the given edge-graph distance of a seed qubit."""
    adj: dict[int, list[int]] = {q: [] for q in range(patch.n)}
    for e in patch.lattice.edges:
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    dist = {seed: 0}
    frontier = [seed]
    for _ in range(radius):
        nxt = []
        for q in frontier:
            for w in adj[q]:
                if w not in dist:
                    dist[w] = dist[q] + 1
                    nxt.append(w)
        frontier = nxt
    return set(dist)


def _region_connected(patch: CodePatch, region: set[int]) -> bool:
    if not region:
        return False
    adj: dict[int, list[int]] = {q: [] for q in region}
    for e in patch.lattice.edges:
        if e.u in region and e.v in region:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
    start = next(iter(region))
    seen = {start}
    stack = [start]
    while stack:
        q = stack.pop()
        for w in adj[q]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == region


def _hopping_recipe(B) -> tuple[str, str | None, str | None]:
    """Classify a bosonic subgroup into its condensation recipe.

    Returns one of ("single", color, pauli), ("color", color, None) or
    ("pauli", None, pauli).
    """
    labels = sorted(lbl for lbl in B.labels() if lbl != "1")
    if len(labels) == 1 and len(labels[0]) == 2 and labels[0][0] in COLORS:
        return ("single", labels[0][0], labels[0][1])
    if len(labels) == 3 and all(len(lbl) == 2 for lbl in labels):
        cols = {lbl[0] for lbl in labels}
        paus = {lbl[1] for lbl in labels}
        if len(cols) == 1 and paus == {"x", "y", "z"}:
            return ("color", cols.pop(), None)
        if len(paus) == 1 and cols == {"r", "g", "b"}:
            return ("pauli", None, paus.pop())
    raise ValueError("no microscopic hopping recipe for this boson subgroup")


def hopping_terms(patch: CodePatch, B, region) -> list[PauliOp]:
    """The open-string generators that condense B inside the region."""
    region = set(region)
    kind, color, pauli = _hopping_recipe(B)
    n = patch.n
    hops: list[PauliOp] = []
    if kind == "pauli":
        for q in sorted(region):
            hops.append(PauliOp.from_terms(n, {q: pauli.upper()}))
        return hops
    for e in patch.lattice.edges:
        if e.color != color or e.u not in region or e.v not in region:
            continue
        if kind == "single":
            hops.append(PauliOp.from_terms(n, {e.u: pauli.upper(), e.v: pauli.upper()}))
        else:
            hops.append(PauliOp.from_terms(n, {e.u: "X", e.v: "X"}))
            hops.append(PauliOp.from_terms(n, {e.u: "Z", e.v: "Z"}))
    return hops


def condense_region(patch: CodePatch, B, region) -> CodePatch:
    """Condense a bosonic subgroup inside a region of the lattice.

    The new stabilizer group is generated by the hopping terms supported in
    the region together with the old generators that commute with all of
    them.  The lattice itself is unchanged.
    """
    region = set(region)
    if not _region_connected(patch, region):
        raise ValueError("condensation region must be a nonempty connected set")
    hops = hopping_terms(patch, B, region)
    if not hops:
        raise ValueError("region supports no hopping terms")
    kept = [
        g
        for g in patch.stabilizers.generators
        if all(commutes(g, hop) for hop in hops)
    ]
    group = StabilizerGroup(consistent_signs(kept + hops))
    new_logicals = [
        (reduce_weight(x, group.generators), reduce_weight(z, group.generators))
        for x, z in logicals(group)
    ]
    meta = dict(patch.metadata)
    meta.setdefault("condensations", []).append(
        {"bosons": sorted(B.labels()), "region_size": len(region)}
    )
    return CodePatch(patch.lattice, group, new_logicals, meta)


# --- string operators ---------------------------------------------------------


def _color_face_graph(patch: CodePatch, color: str):
    """Faces of one color, linked by the same-color edges joining them."""
    faces = [f for f in patch.lattice.faces if f.color == color]
    owner = {}
    for i, f in enumerate(faces):
        for q in f.vertices:
            owner[q] = i
    links: dict[int, list[tuple[int, "Edge"]]] = {i: [] for i in range(len(faces))}
    for e in patch.lattice.edges:
        if e.color != color:
            continue
        fu, fv = owner.get(e.u), owner.get(e.v)
        if fu is None or fv is None or fu == fv:
            continue
        links[fu].append((fv, e))
        links[fv].append((fu, e))
    return faces, links


def string_operator(patch: CodePatch, color: str, pauli: str,
                    start_key, end_key) -> PauliOp:
    """An open string of one Pauli letter along same-color edges.

    The path runs between the faces with the given keys; in the bare code
    its endpoints each carry one excitation of the corresponding charge.
    """
    faces, links = _color_face_graph(patch, color)
    key_to_idx = {f.key: i for i, f in enumerate(faces)}
    start, end = key_to_idx[start_key], key_to_idx[end_key]
    prev: dict[int, tuple[int, "Edge"] | None] = {start: None}
    frontier = [start]
    while frontier and end not in prev:
        nxt = []
        for i in frontier:
            for j, e in links[i]:
                if j not in prev:
                    prev[j] = (i, e)
                    nxt.append(j)
        frontier = nxt
    if end not in prev:
        raise ValueError(f"no {color} path between the requested faces")
    terms: dict[int, str] = {}
    cur = end
    while prev[cur] is not None:
        cur, e = prev[cur]
        for q in (e.u, e.v):
            terms[q] = pauli.upper()
    return PauliOp.from_terms(patch.n, terms)


def syndrome_of(patch: CodePatch, op: PauliOp) -> list[int]:
    """Indices of stabilizer generators anticommuting with op."""
    return [
        i
        for i, g in enumerate(patch.stabilizers.generators)
        if not commutes(g, op)
    ]
