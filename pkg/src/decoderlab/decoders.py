"""Union-find and greedy decoders on the detector graph.

Union-find decoding: every active detector seeds a singleton cluster.  Each
global round, every invalid cluster (odd active parity, no boundary contact)
adds half an edge of coverage to each frontier edge; an edge whose coverage
reaches a full edge joins its endpoints, merging clusters on contact.  Once
no invalid clusters remain, a peeling pass inside each cluster's covered
subgraph picks the correction edges.

Boundary vertices act as absorbing sinks: a cluster that reaches one becomes
valid, and distinct clusters touching the same boundary vertex are not
thereby merged (the two aggregated boundary nodes stand for the collection
of physical boundary half-edges on each side, so contact there carries no
spatial proximity).

The greedy decoder repeatedly matches the globally closest pair among
active-active and active-boundary candidates, with shortest-path distances
that may end at, but never pass through, a boundary vertex.  Ties break by
the lexicographically smallest (distance, node id, node id) triple.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .detector_graph import DetectorGraph
from .unionfind import DisjointSet


class DecodeContractError(AssertionError):
    """A decoder postcondition failed (unmatched parity / non-annihilation)."""


@dataclass(frozen=True)
class Syndrome:
    active: frozenset[int]

    @classmethod
    def of(cls, nodes) -> "Syndrome":
        if isinstance(nodes, Syndrome):
            return nodes
        return cls(frozenset(int(v) for v in nodes))


@dataclass
class UfClusterSnapshot:
    """State of one cluster at the end of a growth round."""

    root: int
    members: frozenset[int]
    half_edges: dict[int, float]  # edge id -> coverage contributed (0.5 or 1.0)
    parity: int
    touches_boundary: bool
    valid: bool


@dataclass
class Correction:
    edges: frozenset[int]
    pairs: list[tuple[int, int]]  # (detector, detector) or (detector, boundary)


@dataclass
class DecodeTrace:
    syndrome: tuple[int, ...] = ()
    rounds: list[dict] = field(default_factory=list)  # per-round snapshots/merges
    growth_rounds: int = 0
    stop_round: dict[int, int] = field(default_factory=dict)  # final root -> round
    grew_rounds: dict[int, set[int]] = field(default_factory=dict)
    peel_work: dict[int, int] = field(default_factory=dict)  # final root -> forest size
    peel_depth: dict[int, int] = field(default_factory=dict)  # parallel peel sweeps
    cluster_members: dict[int, frozenset[int]] = field(default_factory=dict)


class _ClusterState:
    __slots__ = ("parity", "boundary", "vertices", "grew", "stopped_at")

    def __init__(self) -> None:
        self.parity = 0
        self.boundary = False
        self.vertices: list[int] = []
        self.grew: set[int] = set()
        self.stopped_at = 0


def uf_decode(
    g: DetectorGraph,
    syndrome,
    with_trace: bool = False,
) -> tuple[Correction, DecodeTrace]:
    """Decode a syndrome; returns the correction and growth instrumentation."""
    active = sorted(Syndrome.of(syndrome).active)
    trace = DecodeTrace(syndrome=tuple(active))
    for v in active:
        if g.is_boundary[v]:
            raise ValueError(f"boundary node {v} cannot be an active detector")

    dsu = DisjointSet()
    meta: dict[int, _ClusterState] = {}
    for v in active:
        dsu.add(v)
        st = _ClusterState()
        st.parity = 1
        st.vertices = [v]
        meta[v] = st

    halves: dict[int, int] = {}  # edge id -> half-units of coverage (0..2)
    side_by: dict[int, list[int]] | None = {} if with_trace else None
    full_edges: list[int] = []
    active_set = set(active)

    def root_of(v: int) -> int:
        return dsu.find(v)

    def is_invalid(root: int) -> bool:
        st = meta[root]
        return (st.parity % 2 == 1) and not st.boundary

    invalid_roots = {v for v in active}
    round_no = 0
    max_rounds = 4 * (g.n_nodes + 2) + 8

    while invalid_roots:
        round_no += 1
        if round_no > max_rounds:
            raise DecodeContractError("cluster growth failed to terminate")
        fusion: list[int] = []
        grown_roots = list(sorted(invalid_roots))
        grown_record = (
            [(root, frozenset(meta[root].vertices)) for root in grown_roots]
            if with_trace
            else None
        )
        for root in grown_roots:
            st = meta[root]
            st.grew.add(round_no)
            st.stopped_at = round_no
            for v in st.vertices:
                for u, eid in g.neighbors[v]:
                    h = halves.get(eid, 0)
                    if h >= 2:
                        continue
                    halves[eid] = h + 1
                    if side_by is not None:
                        side_by.setdefault(eid, []).append(v)
                    if h + 1 >= 2:
                        fusion.append(eid)

        merges: list[tuple[int, int, int]] = []
        for eid in fusion:
            if halves.get(eid, 0) < 2:
                continue
            u, v = int(g.edge_u[eid]), int(g.edge_v[eid])
            full_edges.append(eid)
            bu, bv = bool(g.is_boundary[u]), bool(g.is_boundary[v])
            if bu or bv:
                det = v if bu else u
                if det in dsu:
                    r = root_of(det)
                    meta[r].boundary = True
                continue
            for w in (u, v):
                if w not in dsu:
                    dsu.add(w)
                    st = _ClusterState()
                    st.vertices = [w]
                    meta[w] = st
            ru, rv = root_of(u), root_of(v)
            if ru == rv:
                continue
            new_root = dsu.union(ru, rv)
            old = rv if new_root == ru else ru
            merges.append((ru, rv, new_root))
            keep, drop = meta[new_root], meta[old]
            keep.parity = (keep.parity + drop.parity) % 2
            keep.boundary = keep.boundary or drop.boundary
            keep.vertices.extend(drop.vertices)
            keep.grew |= drop.grew
            keep.stopped_at = max(keep.stopped_at, drop.stopped_at)
            del meta[old]

        invalid_roots = {r for r in {root_of(v) for v in active_set} if is_invalid(r)}

        if with_trace:
            snaps = []
            for r in sorted({root_of(v) for v in active_set}):
                st = meta[r]
                half_map: dict[int, float] = {}
                if side_by is not None:
                    vert_set = set(st.vertices)
                    for eid, sides in side_by.items():
                        c = sum(0.5 for s in sides if s in vert_set)
                        if c:
                            half_map[eid] = min(1.0, c)
                snaps.append(
                    UfClusterSnapshot(
                        root=r,
                        members=frozenset(st.vertices),
                        half_edges=half_map,
                        parity=st.parity % 2,
                        touches_boundary=st.boundary,
                        valid=not is_invalid(r),
                    )
                )
            trace.rounds.append(
                {
                    "round": round_no,
                    "clusters": snaps,
                    "merges": merges,
                    "grown": grown_record,
                }
            )

    trace.growth_rounds = round_no

    # Peeling inside each final cluster.
    cluster_edges: dict[int, list[int]] = {}
    for eid in set(full_edges):
        u, v = int(g.edge_u[eid]), int(g.edge_v[eid])
        det = u if not g.is_boundary[u] else v
        if det not in dsu:
            continue  # edge fully covered but never claimed by a cluster
        cluster_edges.setdefault(root_of(det), []).append(eid)

    corr_edges: list[int] = []
    for root in sorted({root_of(v) for v in active_set}):
        st = meta[root]
        edges_here = sorted(cluster_edges.get(root, ()))
        picked = _peel_cluster_edges(g, edges_here, active_set, st.boundary)
        corr_edges.extend(picked)
        forest = _spanning_forest(g, edges_here, st.boundary)
        trace.peel_work[root] = len(forest)
        trace.peel_depth[root] = _leaf_removal_sweeps(forest)
        trace.stop_round[root] = st.stopped_at
        trace.grew_rounds[root] = st.grew
        trace.cluster_members[root] = frozenset(st.vertices)

    pairs = _pairs_from_edges(g, corr_edges, active_set)
    correction = Correction(edges=frozenset(corr_edges), pairs=pairs)

    # Postcondition: the correction annihilates the syndrome.
    toggles: set[int] = set()
    for eid in correction.edges:
        for w in (int(g.edge_u[eid]), int(g.edge_v[eid])):
            if not g.is_boundary[w]:
                toggles.symmetric_difference_update({w})
    if toggles != active_set:
        raise DecodeContractError(
            f"correction does not annihilate the syndrome: {toggles} vs {active_set}"
        )
    return correction, trace


def _spanning_forest(
    g: DetectorGraph, edge_ids: list[int], has_boundary: bool
) -> list[tuple[int, int, int]]:
    """Rooted spanning forest of a covered-edge subgraph.

    Returns (child, parent, edge id) triples in BFS discovery order.  The
    root is the smallest boundary vertex when the cluster touches one, else
    the smallest vertex id, repeated per connected piece.
    """
    adj: dict[int, list[tuple[int, int]]] = {}
    verts: set[int] = set()
    for eid in edge_ids:
        u, v = int(g.edge_u[eid]), int(g.edge_v[eid])
        adj.setdefault(u, []).append((v, eid))
        adj.setdefault(v, []).append((u, eid))
        verts.update((u, v))
    for lst in adj.values():
        lst.sort()

    forest: list[tuple[int, int, int]] = []
    seen: set[int] = set()
    boundary_first = sorted(verts, key=lambda w: (not g.is_boundary[w], w))
    order = boundary_first if has_boundary else sorted(verts)
    for start in order:
        if start in seen:
            continue
        seen.add(start)
        queue = [start]
        while queue:
            w = queue.pop(0)
            for u, eid in adj.get(w, ()):
                if u in seen:
                    continue
                seen.add(u)
                forest.append((u, w, eid))
                queue.append(u)
    return forest


def _leaf_removal_sweeps(forest: list[tuple[int, int, int]]) -> int:
    """Parallel peeling passes: iterations of removing every current leaf.

    All leaves peel concurrently in one pass, so the count is about half the
    forest diameter and independent of the root used for the correction.
    """
    if not forest:
        return 0
    deg: dict[int, int] = {}
    adj: dict[int, list[int]] = {}
    for child, parent, _eid in forest:
        deg[child] = deg.get(child, 0) + 1
        deg[parent] = deg.get(parent, 0) + 1
        adj.setdefault(child, []).append(parent)
        adj.setdefault(parent, []).append(child)
    alive = {v for v in deg}
    sweeps = 0
    while len(alive) > 1:
        sweeps += 1
        leaves = [v for v in alive if deg[v] <= 1]
        if not leaves:  # forests have no cycles; guard anyway
            break
        for v in leaves:
            alive.discard(v)
            for u in adj[v]:
                if u in alive:
                    deg[u] -= 1
    return max(sweeps, 1)


def _peel_cluster_edges(
    g: DetectorGraph, edge_ids: list[int], active: set[int], has_boundary: bool
) -> list[int]:
    """Leaf-first peeling: include a tree edge iff its child side is active."""
    forest = _spanning_forest(g, edge_ids, has_boundary)
    act = {v for v in active}
    picked: list[int] = []
    for child, parent, eid in reversed(forest):
        if child in act and not g.is_boundary[child]:
            picked.append(eid)
            act.discard(child)
            if not g.is_boundary[parent]:
                act.symmetric_difference_update({parent})
    return picked


def peel_cluster(g: DetectorGraph, cluster_edges, syndrome, touches_boundary: bool | None = None) -> set[int]:
    """Peel one valid cluster given its covered edges and the active set."""
    active = set(Syndrome.of(syndrome).active)
    edge_ids = sorted(int(e) for e in cluster_edges)
    verts: set[int] = set()
    for eid in edge_ids:
        verts.update((int(g.edge_u[eid]), int(g.edge_v[eid])))
    cluster_active = active & verts
    if touches_boundary is None:
        touches_boundary = any(g.is_boundary[v] for v in verts)
    if len(cluster_active) % 2 == 1 and not touches_boundary:
        raise DecodeContractError("peeling an invalid cluster")
    picked = _peel_cluster_edges(g, edge_ids, cluster_active, touches_boundary)
    toggles: set[int] = set()
    for eid in picked:
        for w in (int(g.edge_u[eid]), int(g.edge_v[eid])):
            if not g.is_boundary[w]:
                toggles.symmetric_difference_update({w})
    if toggles != cluster_active:
        raise DecodeContractError("peeling failed to annihilate the cluster")
    return set(picked)


def _pairs_from_edges(
    g: DetectorGraph, edge_ids: list[int], active: set[int]
) -> list[tuple[int, int]]:
    """Pairing summary of a correction edge set (component-wise)."""
    dsu = DisjointSet()
    for eid in edge_ids:
        u, v = int(g.edge_u[eid]), int(g.edge_v[eid])
        dsu.add(u)
        dsu.add(v)
        dsu.union(u, v)
    comps: dict[int, dict[str, list[int]]] = {}
    for eid in edge_ids:
        for w in (int(g.edge_u[eid]), int(g.edge_v[eid])):
            root = dsu.find(w)
            comp = comps.setdefault(root, {"active": [], "boundary": []})
            if g.is_boundary[w]:
                if w not in comp["boundary"]:
                    comp["boundary"].append(w)
            elif w in active and w not in comp["active"]:
                comp["active"].append(w)
    pairs: list[tuple[int, int]] = []
    for root in sorted(comps):
        comp = comps[root]
        acts = sorted(comp["active"])
        while len(acts) >= 2:
            pairs.append((acts[0], acts[1]))
            acts = acts[2:]
        if acts:
            b = min(comp["boundary"]) if comp["boundary"] else -1
            pairs.append((acts[0], b))
    return pairs


def greedy_decode(g: DetectorGraph, syndrome) -> Correction:
    """Match the globally closest active pairs, boundary included."""
    active = sorted(Syndrome.of(syndrome).active)
    if not active:
        return Correction(edges=frozenset(), pairs=[])

    bfs: dict[int, tuple[np.ndarray, np.ndarray]] = {
        a: g.vertex_bfs(a, through_boundary=False) for a in active
    }

    candidates: list[tuple[int, int, int]] = []
    for i, a in enumerate(active):
        dist, _ = bfs[a]
        for b in active[i + 1 :]:
            if dist[b] >= 0:
                candidates.append((int(dist[b]), a, b))
        for bnode in g.boundary_ids:
            if dist[bnode] >= 0:
                candidates.append((int(dist[bnode]), a, int(bnode)))
    candidates.sort()

    matched: set[int] = set()
    corr_edges: set[int] = set()
    pairs: list[tuple[int, int]] = []
    remaining = len(active)
    for d, a, b in candidates:
        if remaining == 0:
            break
        if a in matched or (not g.is_boundary[b] and b in matched):
            continue
        dist, parent = bfs[a]
        path = g.path_nodes(parent, b)
        corr_edges.symmetric_difference_update(g.path_edge_ids(path))
        pairs.append((a, b))
        matched.add(a)
        remaining -= 1
        if not g.is_boundary[b]:
            matched.add(b)
            remaining -= 1

    if remaining:
        raise DecodeContractError("greedy matching left active detectors unmatched")
    return Correction(edges=frozenset(corr_edges), pairs=pairs)


def correction_action(g: DetectorGraph, correction: Correction) -> int:
    """Logical readout flip induced by applying the correction edges."""
    act = 0
    for eid in correction.edges:
        act ^= int(g.edge_action[eid])
    return act


def logical_flip(g: DetectorGraph, shot, correction: Correction) -> bool:
    """Whether the decoded logical readout is flipped.

    Combines the shot's raw logical-readout flip with the correction's
    canonical data-flip actions, after checking the correction annihilates
    the shot's syndrome.
    """
    if g.detector_type == "Z":
        det = shot.z_detectors()
        raw = int(shot.final_data[g.circuit.logical_z_idx].sum() % 2)
    else:
        det = shot.x_detectors()
        raw = int(shot.final_data_x[g.circuit.logical_x_idx].sum() % 2)
    n_faces = g._n_faces
    syndrome = {
        int(row) * n_faces + int(j) for j, row in zip(*np.nonzero(det))
    }
    toggles: set[int] = set()
    for eid in correction.edges:
        for w in (int(g.edge_u[eid]), int(g.edge_v[eid])):
            if not g.is_boundary[w]:
                toggles.symmetric_difference_update({w})
    if toggles != syndrome:
        raise DecodeContractError("correction does not annihilate the shot syndrome")
    return bool(raw ^ correction_action(g, correction))
