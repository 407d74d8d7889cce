"""Matching-based decoding on detector graphs.

A detector error model restricted to one detector sector becomes a
weighted graph: faults flipping two sector detectors are edges, faults
flipping one are edges to a virtual boundary node, and faults flipping
more are decomposed into such components.  Decoding finds a minimum-weight
perfect matching of the fired detectors (exact, via Dijkstra distances and
blossom matching) and predicts the logical flips accumulated along the
matched paths.  A union-find decoder is provided as a fast approximate
path for large Monte Carlo runs, and an exact maximum-likelihood oracle
for small instances validates both.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import networkx as nx

from .dem import DetectorErrorModel, MatchabilityViolation

BOUNDARY = -1


@dataclass(frozen=True)
class Edge:
    id: int
    u: int                     # node index (BOUNDARY for the virtual node)
    v: int
    prob: float
    weight: float
    obs: frozenset            # logical observables flipped


@dataclass
class DetectorGraph:
    """Weighted matching graph over one sector's detectors."""

    detector_ids: list[int]    # DEM detector ids, in node order
    edges: list[Edge]
    num_observables: int
    metadata: dict = field(default_factory=dict)

    @property
    def num_nodes(self) -> int:
        return len(self.detector_ids)

    def node_of(self, detector_id: int) -> int:
        return self._index[detector_id]

    def __post_init__(self):
        self._index = {d: i for i, d in enumerate(self.detector_ids)}
        self.adj: list[list[Edge]] = [[] for _ in range(self.num_nodes)]
        self.boundary_adj: list[Edge] = []
        for e in self.edges:
            if e.u == BOUNDARY or e.v == BOUNDARY:
                node = e.v if e.u == BOUNDARY else e.u
                self.adj[node].append(e)
                self.boundary_adj.append(e)
            else:
                self.adj[e.u].append(e)
                self.adj[e.v].append(e)


def _decompose(flips: tuple[int, ...], obs: frozenset, graphlike: dict):
    """Partition a >2-detector flip set into graphlike components whose
    observable flips XOR to the fault's own.  Returns a list of
    (component detectors, component obs) or None."""
    flips = tuple(sorted(flips))

    def rec(remaining: tuple[int, ...], obs_left: frozenset):
        if not remaining:
            return [] if not obs_left else None
        a = remaining[0]
        rest = remaining[1:]
        # pair a with another fired detector
        for i, b in enumerate(rest):
            key = (a, b)
            if key in graphlike:
                for comp_obs in graphlike[key]:
                    sub = rec(rest[:i] + rest[i + 1:], obs_left ^ comp_obs)
                    if sub is not None:
                        return [((a, b), comp_obs)] + sub
        # or send a to the boundary
        if (a,) in graphlike:
            for comp_obs in graphlike[(a,)]:
                sub = rec(rest, obs_left ^ comp_obs)
                if sub is not None:
                    return [((a,), comp_obs)] + sub
        return None

    return rec(flips, obs)


def graph_from_dem(dem: DetectorErrorModel, sector: str = "all",
                   decompose: bool = True) -> DetectorGraph:
    """Build the matching graph of one detector sector.

    Faults flipping more than two sector detectors are decomposed into
    graphlike components already present in the model; failure to
    decompose raises MatchabilityViolation.
    """
    if sector == "all" or not dem.sectors:
        ids = list(range(dem.num_detectors))
    else:
        ids = [i for i, s in enumerate(dem.sectors) if s == sector]
    id_set = set(ids)
    node = {d: i for i, d in enumerate(ids)}

    restricted = []   # (sector flips tuple, obs frozenset, prob)
    for f in dem.faults:
        hit = tuple(sorted(d for d in f.detectors if d in id_set))
        if not hit:
            continue
        restricted.append((hit, frozenset(f.observables), f.prob))

    graphlike: dict[tuple, set] = {}
    for hit, obs, _ in restricted:
        if len(hit) <= 2:
            graphlike.setdefault(hit, set()).add(obs)

    merged: dict[tuple, float] = {}
    for hit, obs, prob in restricted:
        if len(hit) <= 2:
            comps = [(hit, obs)]
        elif decompose:
            comps = _decompose(hit, obs, graphlike)
            if comps is None:
                raise MatchabilityViolation(
                    f"fault flipping {len(hit)} sector detectors is not "
                    f"decomposable into graphlike components: {hit}"
                )
        else:
            raise MatchabilityViolation(
                f"fault flips {len(hit)} detectors in sector {sector!r}"
            )
        for comp, comp_obs in comps:
            key = (comp, comp_obs)
            if key in merged:
                p1 = merged[key]
                merged[key] = p1 + prob - 2 * p1 * prob
            else:
                merged[key] = prob

    edges = []
    for (comp, obs), p in sorted(merged.items(),
                                 key=lambda kv: (kv[0][0], sorted(kv[0][1]))):
        p = min(p, 0.5 - 1e-12)
        w = math.log((1 - p) / p)
        if len(comp) == 1:
            u, v = node[comp[0]], BOUNDARY
        else:
            u, v = node[comp[0]], node[comp[1]]
        edges.append(Edge(len(edges), u, v, p, w, obs))
    return DetectorGraph(ids, edges, dem.num_observables,
                         {"sector": sector, "source": dict(dem.metadata)})


# --- exact matching -----------------------------------------------------------


def _dijkstra(graph: DetectorGraph, source: int):
    """Shortest weighted paths from a node; ties broken by lowest edge id
    along the deciding step.  Returns (dist array, predecessor edge array,
    best distance/edge to the virtual boundary)."""
    n = graph.num_nodes
    INF = math.inf
    dist = [INF] * n
    pred: list[Edge | None] = [None] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u] + 1e-15:
            continue
        for e in graph.adj[u]:
            v = e.v if e.u == u else e.u
            if v == BOUNDARY:
                continue
            nd = d + e.weight
            if nd < dist[v] - 1e-12 or (
                abs(nd - dist[v]) <= 1e-12 and pred[v] is not None
                and e.id < pred[v].id
            ):
                dist[v] = nd
                pred[v] = e
                heapq.heappush(heap, (nd, v))
    bdist, bedge = INF, None
    for e in graph.boundary_adj:
        u = e.u if e.v == BOUNDARY else e.v
        d = dist[u] + e.weight
        if d < bdist - 1e-12 or (abs(d - bdist) <= 1e-12 and bedge is not None
                                 and e.id < bedge.id):
            bdist, bedge = d, e
    return dist, pred, (bdist, bedge)


def _path_obs(graph: DetectorGraph, pred, source: int, target: int) -> frozenset:
    obs: frozenset = frozenset()
    v = target
    while v != source:
        e = pred[v]
        obs ^= e.obs
        v = e.u if e.v == v else e.v
    return obs


@dataclass
class DecodeResult:
    observables: frozenset     # predicted logical flips
    weight: float              # total matched weight
    metadata: dict = field(default_factory=dict)


def decode(graph: DetectorGraph, syndrome) -> DecodeResult:
    """Minimum-weight perfect matching of the fired detectors.

    Every fired detector is matched either to another fired detector
    (along its shortest path) or to the virtual boundary.  Exact blossom
    matching; deterministic tie-breaking by lowest edge id.
    """
    fired = sorted(set(syndrome))
    if not fired:
        return DecodeResult(frozenset(), 0.0, {"method": "exact"})
    info = {}
    for s in fired:
        dist, pred, bnd = _dijkstra(graph, s)
        info[s] = (dist, pred, bnd)

    G = nx.Graph()
    BIG = 1e9
    for i, a in enumerate(fired):
        dist_a = info[a][0]
        for b in fired[i + 1:]:
            d = dist_a[b]
            if d < math.inf:
                G.add_edge(("d", a), ("d", b), weight=BIG - d)
        bdist, _ = info[a][2]
        if bdist < math.inf:
            G.add_edge(("d", a), ("b", a), weight=BIG - bdist)
    # boundary copies pair off freely at zero cost
    for i, a in enumerate(fired):
        for b in fired[i + 1:]:
            G.add_edge(("b", a), ("b", b), weight=BIG)
    matching = nx.max_weight_matching(G, maxcardinality=True)
    pairs = {}
    for x, y in matching:
        pairs[x] = y
        pairs[y] = x
    for a in fired:
        if ("d", a) not in pairs:
            raise MatchabilityViolation(f"detector {a} could not be matched")

    obs: frozenset = frozenset()
    total = 0.0
    seen = set()
    for a in fired:
        if a in seen:
            continue
        seen.add(a)
        kind, other = pairs[("d", a)]
        if kind == "b":
            bdist, bedge = info[a][2]
            u = bedge.u if bedge.v == BOUNDARY else bedge.v
            obs ^= _path_obs(graph, info[a][1], a, u) ^ bedge.obs
            total += bdist
        else:
            seen.add(other)
            obs ^= _path_obs(graph, info[a][1], a, other)
            total += info[a][0][other]
    return DecodeResult(obs, total, {"method": "exact"})


def exhaustive_min_pairing(graph: DetectorGraph, syndrome) -> float:
    """Brute-force minimum total weight over all ways of pairing the fired
    detectors with each other or the boundary (validation oracle)."""
    fired = sorted(set(syndrome))
    dists = {}
    bdists = {}
    for s in fired:
        dist, _, (bd, _) = _dijkstra(graph, s)
        dists[s] = dist
        bdists[s] = bd

    def rec(remaining: tuple[int, ...]) -> float:
        if not remaining:
            return 0.0
        a, rest = remaining[0], remaining[1:]
        best = bdists[a] + rec(rest)
        for i, b in enumerate(rest):
            d = dists[a][b]
            if d < math.inf:
                best = min(best, d + rec(rest[:i] + rest[i + 1:]))
        return best

    return rec(tuple(fired))


# --- union-find decoder ---------------------------------------------------------


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
        return ra


def decode_unionfind(graph: DetectorGraph, syndrome) -> DecodeResult:
    """Union-find decoding: grow clusters around fired detectors until
    every cluster has even parity or touches the boundary, then peel a
    spanning forest to read off a correction.  Approximate but fast."""
    fired = set(syndrome)
    if not fired:
        return DecodeResult(frozenset(), 0.0, {"method": "union-find"})
    n = graph.num_nodes
    B = n  # virtual boundary node index for the DSU
    scale = 2.0
    edges = graph.edges
    wint = [max(1, round(e.weight * scale)) for e in edges]
    edge_ids_at: list[list[int]] = [[] for _ in range(n + 1)]
    ends: list[tuple[int, int]] = []
    for ei, e in enumerate(edges):
        u = B if e.u == BOUNDARY else e.u
        v = B if e.v == BOUNDARY else e.v
        ends.append((u, v))
        edge_ids_at[u].append(ei)
        if v != u:
            edge_ids_at[v].append(ei)

    dsu = _DSU(n + 1)
    parity: dict[int, int] = {}
    hits_boundary: dict[int, bool] = {}
    frontier: dict[int, list[int]] = {}
    grown = [0] * len(edges)
    full = [False] * len(edges)

    def ensure(node: int) -> int:
        """Make sure the node belongs to some cluster; return its root."""
        r = dsu.find(node)
        if r not in parity:
            parity[r] = 0
            hits_boundary[r] = (node == B)
            frontier[r] = list(edge_ids_at[node])
        return r

    for s in fired:
        r = ensure(s)
        parity[r] ^= 1

    def merge(a: int, b: int) -> int:
        ra, rb = ensure(a), ensure(b)
        if ra == rb:
            return ra
        if len(frontier[ra]) < len(frontier[rb]):
            ra, rb = rb, ra
        dsu.parent[rb] = ra
        parity[ra] ^= parity.pop(rb)
        hits_boundary[ra] = hits_boundary[ra] or hits_boundary.pop(rb)
        frontier[ra].extend(frontier.pop(rb))
        return ra

    active = {dsu.find(s) for s in fired}
    guard = 0
    while True:
        active = {r for r in (dsu.find(x) for x in active)
                  if parity.get(r) and not hits_boundary.get(r)}
        if not active:
            break
        guard += 1
        if guard > 10_000:
            raise MatchabilityViolation("union-find growth did not converge")
        for r in list(active):
            r = dsu.find(r)
            if not parity.get(r) or hits_boundary.get(r):
                continue
            pending = frontier[r]
            frontier[r] = []
            keep = []
            while pending:
                ei = pending.pop()
                if full[ei]:
                    continue
                u, v = ends[ei]
                if dsu.find(u) == dsu.find(v):
                    continue   # became internal
                grown[ei] += 1
                if grown[ei] >= wint[ei]:
                    full[ei] = True
                    r = merge(u, v)
                    if not parity.get(r) or hits_boundary.get(r):
                        keep.extend(pending)   # cluster went inactive
                        break
                else:
                    keep.append(ei)
            frontier[dsu.find(r)].extend(keep)

    # peeling: spanning forest of fully-grown edges, boundary as root
    adj: dict[int, list[Edge]] = {}
    for ei, e in enumerate(graph.edges):
        if not full[ei]:
            continue
        u, v = ends[e.id]
        adj.setdefault(u, []).append(e)
        adj.setdefault(v, []).append(e)
    visited = {B}
    order = []   # tree edges in discovery order
    node_parent: dict[int, Edge] = {}
    stack = [B] + [v for v in adj if v != B]
    for root in stack:
        if root in visited and root != B:
            continue
        dq = [root]
        visited.add(root)
        while dq:
            u = dq.pop()
            for e in adj.get(u, ()):
                w1, w2 = ends[e.id]
                v = w2 if w1 == u else w1
                if v in visited:
                    continue
                visited.add(v)
                node_parent[v] = e
                order.append((v, e))
                dq.append(v)
    obs: frozenset = frozenset()
    weight = 0.0
    flip = {s: True for s in fired}
    for v, e in reversed(order):    # leaves first
        if flip.get(v):
            obs ^= e.obs
            weight += e.weight
            w1, w2 = ends[e.id]
            u = w2 if w1 == v else w1
            if u != B:
                flip[u] = not flip.get(u, False)
            flip[v] = False
    return DecodeResult(obs, weight, {"method": "union-find"})


# --- maximum-likelihood oracle ---------------------------------------------------


@dataclass
class MLResult:
    observables: frozenset
    class_probs: dict
    tie: bool


def ml_oracle(dem: DetectorErrorModel, syndrome, max_faults: int = 20) -> MLResult:
    """Exact maximum likelihood over all fault subsets consistent with the
    syndrome, marginalized per logical class (small instances only)."""
    faults = dem.faults
    if len(faults) > max_faults:
        raise ValueError(f"instance too large for the oracle: {len(faults)} faults")
    target = frozenset(syndrome)
    base = 1.0
    ratios = []
    for f in faults:
        base *= (1 - f.prob)
        ratios.append(f.prob / (1 - f.prob))
    class_probs: dict[frozenset, float] = {}
    for bits in range(1 << len(faults)):
        dets: frozenset = frozenset()
        obs: frozenset = frozenset()
        pr = base
        b = bits
        i = 0
        while b:
            if b & 1:
                dets ^= frozenset(faults[i].detectors)
                obs ^= frozenset(faults[i].observables)
                pr *= ratios[i]
            b >>= 1
            i += 1
        if dets == target:
            class_probs[obs] = class_probs.get(obs, 0.0) + pr
    if not class_probs:
        raise ValueError("syndrome has no explanation in the model")
    best_p = max(class_probs.values())
    winners = sorted((o for o, p in class_probs.items()
                      if abs(p - best_p) <= 1e-12 * max(best_p, 1.0)),
                     key=lambda o: sorted(o))
    return MLResult(winners[0], class_probs, tie=len(winners) > 1)


# --- cluster decoder for fault hypergraphs -----------------------------------


class ClusterDecoder:
    """Union-find style decoder for fault models that are not graphlike.

    Some codes produce faults flipping three or more detectors (e.g. a
    single data error seen by all faces around a qubit), which matching
    cannot represent.  This decoder grows clusters of detectors around the
    fired ones until the faults interior to each cluster can explain its
    syndrome over GF(2), then picks the lowest-weight explanation within
    each cluster (exhaustively over the solution space when it is small)
    and reports the predicted observable flips.
    """

    def __init__(self, dem: DetectorErrorModel, sector: str = "all",
                 enumerate_limit: int = 14):
        import numpy as np

        self._np = np
        if sector == "all":
            ids = list(range(dem.num_detectors))
        else:
            ids = [i for i, s in enumerate(dem.sectors) if s == sector]
        idset = set(ids)
        self.detector_ids = ids
        self.num_observables = dem.num_observables
        self.enumerate_limit = enumerate_limit
        self.faults = []          # (weight, dets tuple, obs tuple)
        self.faults_at = {i: [] for i in ids}
        for f in dem.faults:
            dets = tuple(d for d in f.detectors if d in idset)
            if not dets:
                continue
            p = min(f.prob, 0.5 - 1e-12)
            w = math.log((1.0 - p) / p)
            fi = len(self.faults)
            self.faults.append((w, dets, f.observables))
            for d in dets:
                self.faults_at[d].append(fi)

    def decode(self, syndrome) -> DecodeResult:
        np = self._np
        from . import gf2

        fired = set(syndrome)
        if not fired - set(self.detector_ids) == set():
            raise ValueError("syndrome contains detectors outside the sector")
        # each fired detector seeds a cluster; grow invalid clusters by one
        # fault-neighborhood at a time, merging overlaps, until every
        # cluster's syndrome is explainable by its interior faults
        clusters = [{d} for d in fired]
        solutions = []
        guard = 0
        while clusters:
            guard += 1
            if guard > 10_000:
                raise MatchabilityViolation("cluster growth did not converge")
            merged = []
            for c in clusters:
                placed = None
                for m in merged:
                    if m & c:
                        m |= c
                        placed = m
                        break
                if placed is None:
                    merged.append(set(c))
            # repeat merging until stable
            stable = False
            while not stable:
                stable = True
                out = []
                for c in merged:
                    hit = next((m for m in out if m & c), None)
                    if hit is not None:
                        hit |= c
                        stable = False
                    else:
                        out.append(c)
                merged = out
            clusters = []
            for c in merged:
                interior = [fi for fi in {fi for d in c for fi in self.faults_at[d]}
                            if all(d in c for d in self.faults[fi][1])]
                sol = self._solve(c, interior, fired)
                if sol is None:
                    grown = set(c)
                    for d in c:
                        for fi in self.faults_at[d]:
                            grown.update(self.faults[fi][1])
                    if grown == c:
                        raise MatchabilityViolation(
                            "cluster syndrome has no explanation")
                    clusters.append(grown)
                else:
                    solutions.append(sol)
        obs = frozenset()
        weight = 0.0
        for o, w in solutions:
            obs ^= o
            weight += w
        return DecodeResult(tuple(sorted(obs)), weight,
                            {"clusters": len(solutions)})

    def _solve(self, cluster, interior, fired):
        """Lowest-weight interior fault subset reproducing the syndrome on
        the cluster, or None if the GF(2) system is unsolvable."""
        np = self._np
        from . import gf2

        cols = {d: j for j, d in enumerate(sorted(cluster))}
        b = np.zeros(len(cols), dtype=np.uint8)
        for d in cluster & fired:
            b[cols[d]] = 1
        if not interior:
            return None if b.any() else (frozenset(), 0.0)
        A = np.zeros((len(interior), len(cols)), dtype=np.uint8)
        for r, fi in enumerate(interior):
            for d in self.faults[fi][1]:
                A[r, cols[d]] = 1
        x = gf2.solve(A, b)
        if x is None:
            return None
        null = gf2.null_space(A.T)   # fault combinations with no syndrome
        best = None
        if len(null) <= self.enumerate_limit:
            for bits in range(1 << len(null)):
                y = x.copy()
                for j in range(len(null)):
                    if bits >> j & 1:
                        y ^= null[j]
                w = sum(self.faults[interior[r]][0]
                        for r in np.nonzero(y)[0])
                if best is None or w < best[1]:
                    best = (y, w)
            y, w = best
        else:
            y = x
            w = sum(self.faults[interior[r]][0] for r in np.nonzero(y)[0])
        obs = frozenset()
        for r in np.nonzero(y)[0]:
            for o in self.faults[interior[int(r)]][2]:
                obs ^= {o}
        return (obs, float(w))
