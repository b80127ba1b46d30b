"""Spacetime detector graph built by exhaustive single-fault enumeration.

For a chosen detector type ("Z" = Z-face detectors, sensitive to X-type
faults and used to decode the logical-Z memory experiment; "X" = the mirror),
every (fault location, Pauli) pair is simulated once.  A fault that flips two
same-type detectors contributes a detector-detector edge; one flip
contributes an edge to the boundary node on that face's side of the lattice;
zero flips are discarded after checking the fault also leaves the logical
readout alone.  Any fault flipping three or more same-type detectors is a
construction failure, since the decoding graph only exists for circuits
whose single faults flip at most two.

Faults producing the same detector pair merge into a single edge that
accumulates their location ids in `fault_sources`; the first (location,
Pauli) pair seen becomes the edge's canonical representative, and all
mechanisms on one edge are checked to agree on their logical action.

Metric queries (edge-to-edge distance, balls, set diameters) run on the line
graph: two edges are adjacent iff they share an endpoint, and distances are
hop counts.  BFS layers from a query edge are memoized.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .circuit import PAULIS, Circuit, single_fault_response

BOUNDARY_LOW = "boundary_low"
BOUNDARY_HIGH = "boundary_high"


class GraphBuildError(RuntimeError):
    """A single fault flipped more than two same-type detectors."""


@dataclass(frozen=True)
class DetectorNode:
    id: int
    kind: str  # "detector" | "boundary_low" | "boundary_high"
    face_pos: int  # index within the type's face list; -1 for boundary
    round: int  # detector row; -1 for boundary
    coord: tuple[int, int, int] | None  # (x2, y2, round); None for boundary

    @property
    def is_boundary(self) -> bool:
        return self.kind != "detector"


@dataclass
class DetectorEdge:
    id: int
    u: int
    v: int
    fault_sources: frozenset[int]
    canonical: tuple[int, str] | None  # (location id, Pauli)
    action: int  # logical readout flip of any single mechanism on this edge

    def failure_probability_bound(self, p: float) -> float:
        """Edge fault-probability upper bound: 1 - (1-p)^{#sources} <= #sources * p."""
        return 1.0 - (1.0 - p) ** len(self.fault_sources)


class DetectorGraph:
    """Immutable decoding graph with a memoized line-graph metric."""

    def __init__(
        self,
        nodes: list[DetectorNode],
        edges: list[DetectorEdge],
        detector_type: str = "Z",
        circuit: Circuit | None = None,
        response_map: dict[tuple[int, str], int | None] | None = None,
        response_flips: dict[tuple[int, str], tuple[tuple[int, ...], int]] | None = None,
    ):
        self.nodes = nodes
        self.edges = edges
        self.detector_type = detector_type
        self.circuit = circuit
        # (location id, Pauli) -> edge id or None; graph mechanisms only.
        self.response_map = response_map or {}
        # (location id, Pauli) -> (flipped node ids, logical action); all locations.
        self.response_flips = response_flips or {}

        n = len(nodes)
        self.n_nodes = n
        self.is_boundary = np.zeros(n, dtype=bool)
        for nd in nodes:
            if nd.is_boundary:
                self.is_boundary[nd.id] = True
        self.boundary_ids = tuple(int(i) for i in np.nonzero(self.is_boundary)[0])

        self.edge_u = np.array([e.u for e in edges], dtype=np.int64)
        self.edge_v = np.array([e.v for e in edges], dtype=np.int64)
        self.edge_action = np.array([e.action for e in edges], dtype=np.uint8)

        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for e in edges:
            adj[e.u].append((e.v, e.id))
            adj[e.v].append((e.u, e.id))
        for lst in adj:
            lst.sort()
        self.neighbors: list[tuple[tuple[int, int], ...]] = [tuple(l) for l in adj]
        self.incident_edges: list[tuple[int, ...]] = [
            tuple(eid for _, eid in lst) for lst in adj
        ]
        self._by_endpoints = {}
        for e in edges:
            self._by_endpoints[(e.u, e.v)] = e.id
            self._by_endpoints[(e.v, e.u)] = e.id

        self._edge_bfs_cache: dict[int, np.ndarray] = {}
        self._vertex_bfs_cache: dict[int, np.ndarray] = {}
        self._cache_lock = threading.Lock()

    # -- basic lookups ------------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_between(self, u: int, v: int) -> int | None:
        return self._by_endpoints.get((u, v))

    def detector_node_id(self, face_pos: int, row: int) -> int:
        nd = self.nodes[row * self._n_faces + face_pos]
        assert nd.face_pos == face_pos and nd.round == row
        return nd.id

    # -- construction helpers (set by build_detector_graph) -----------------

    _n_faces: int = 0
    n_rows: int = 0

    # -- line-graph metric ---------------------------------------------------

    def _edge_bfs(self, e: int, r_max: int | None = None) -> np.ndarray:
        """Distances from edge e to all edges (-1 unreachable / beyond r_max)."""
        if r_max is None:
            with self._cache_lock:
                cached = self._edge_bfs_cache.get(e)
            if cached is not None:
                return cached
        dist = np.full(self.n_edges, -1, dtype=np.int64)
        dist[e] = 0
        frontier = [e]
        d = 0
        while frontier and (r_max is None or d < r_max):
            d += 1
            nxt = []
            for ee in frontier:
                for endpoint in (self.edge_u[ee], self.edge_v[ee]):
                    for other in self.incident_edges[endpoint]:
                        if dist[other] < 0:
                            dist[other] = d
                            nxt.append(other)
            frontier = nxt
        if r_max is None:
            with self._cache_lock:
                self._edge_bfs_cache[e] = dist
        return dist

    def edge_distance(self, e: int, e2: int) -> int:
        """Hop distance between two edges in the line graph (0 iff e == e2)."""
        for eid in (e, e2):
            if not (0 <= eid < self.n_edges):
                raise KeyError(f"unknown edge id {eid}")
        d = int(self._edge_bfs(e)[e2])
        if d < 0:
            raise KeyError(f"edges {e} and {e2} are disconnected")
        return d

    def ball(self, e: int, r: int) -> set[int]:
        """Edges within line-graph distance r of e."""
        if r < 0:
            raise ValueError("radius must be >= 0")
        dist = self._edge_bfs(e, r_max=r)
        return {int(i) for i in np.nonzero((dist >= 0) & (dist <= r))[0]}

    def set_diameter(self, edge_set) -> int:
        edge_set = sorted(edge_set)
        if not edge_set:
            raise ValueError("diameter of an empty edge set")
        best = 0
        for e in edge_set:
            dist = self._edge_bfs(e)
            best = max(best, max(int(dist[e2]) for e2 in edge_set))
        return best

    def set_distance(self, a, b) -> int:
        a, b = sorted(a), sorted(b)
        if not a or not b:
            raise ValueError("distance of an empty edge set")
        if len(b) < len(a):
            a, b = b, a
        return min(min(int(self._edge_bfs(e)[e2]) for e2 in b) for e in a)

    # -- vertex metric (greedy decoding) --------------------------------------

    def vertex_bfs(self, src: int, through_boundary: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """BFS over detector vertices; returns (dist, parent) arrays.

        With through_boundary=False, paths may end at a boundary node but not
        pass through one; boundary nodes still get a distance (edge count)
        via their last detector hop.
        """
        dist = np.full(self.n_nodes, -1, dtype=np.int64)
        parent = np.full(self.n_nodes, -1, dtype=np.int64)
        dist[src] = 0
        frontier = [src]
        while frontier:
            nxt = []
            for u in frontier:
                if not through_boundary and self.is_boundary[u] and u != src:
                    continue  # boundary absorbs; do not expand
                for v, _eid in self.neighbors[u]:
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        parent[v] = u
                        nxt.append(v)
            frontier = nxt
        return dist, parent

    def vertex_distances_cached(self, src: int) -> np.ndarray:
        """Memoized detector-only BFS distances from one vertex."""
        with self._cache_lock:
            hit = self._vertex_bfs_cache.get(src)
        if hit is not None:
            return hit
        dist, _ = self.vertex_bfs(src, through_boundary=False)
        with self._cache_lock:
            self._vertex_bfs_cache[src] = dist
        return dist

    def path_nodes(self, parent: np.ndarray, dst: int) -> list[int]:
        path = [dst]
        while parent[path[-1]] >= 0:
            path.append(int(parent[path[-1]]))
        return path[::-1]

    def path_edge_ids(self, node_path: list[int]) -> list[int]:
        out = []
        for a, b in zip(node_path, node_path[1:]):
            eid = self.edge_between(a, b)
            assert eid is not None
            out.append(eid)
        return out

    # -- shot assembly ---------------------------------------------------------

    def syndrome_and_action(self, entries) -> tuple[tuple[int, ...], int]:
        """Active detectors and the true logical-readout flip of a fault set."""
        toggles: set[int] = set()
        action = 0
        for loc, pauli in entries:
            flips, act = self.response_flips[(loc, pauli)]
            action ^= act
            toggles.symmetric_difference_update(flips)
        return tuple(sorted(toggles)), action

    def error_edges_of(self, entries) -> set[int]:
        """Canonical edge set of a fault pattern, for clustering analysis.

        Graph mechanisms map to their own edge; composite mechanisms map to
        the edges of one shortest path between their two flips, or from
        their single flip to the nearest boundary node.  Edges hit an even
        number of times cancel.
        """
        counts: dict[int, int] = {}
        for loc, pauli in entries:
            eid = self.response_map.get((loc, pauli))
            if eid is not None:
                counts[eid] = counts.get(eid, 0) + 1
                continue
            flips, _ = self.response_flips[(loc, pauli)]
            if not flips:
                continue
            dist, parent = self.vertex_bfs(flips[0])
            if len(flips) == 2:
                target = flips[1]
            else:
                target = min(
                    (b for b in self.boundary_ids if dist[b] >= 0),
                    key=lambda b: (int(dist[b]), b),
                )
            for eid2 in self.path_edge_ids(self.path_nodes(parent, target)):
                counts[eid2] = counts.get(eid2, 0) + 1
        return {eid for eid, c in counts.items() if c % 2 == 1}

    # -- export ---------------------------------------------------------------

    def to_json(self, p: float = 1e-3) -> str:
        payload = {
            "detector_type": self.detector_type,
            "nodes": [
                {
                    "id": nd.id,
                    "kind": nd.kind,
                    "coord": list(nd.coord) if nd.coord is not None else None,
                }
                for nd in self.nodes
            ],
            "edges": [
                {
                    "id": e.id,
                    "u": e.u,
                    "v": e.v,
                    "sources": sorted(e.fault_sources),
                    "p_tilde": e.failure_probability_bound(p),
                }
                for e in self.edges
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def build_detector_graph(circuit: Circuit, detector_type: str = "Z") -> DetectorGraph:
    """Enumerate all single faults and assemble the decoding graph."""
    if detector_type not in ("Z", "X"):
        raise ValueError(f"detector_type must be 'Z' or 'X', got {detector_type!r}")
    code = circuit.code
    faces = circuit.z_faces if detector_type == "Z" else circuit.x_faces
    n_faces = len(faces)
    rows = circuit.rounds + 1  # circuit rows plus the synthetic readout row

    nodes: list[DetectorNode] = []
    for row in range(rows):
        for j, f in enumerate(faces):
            nid = row * n_faces + j
            nodes.append(
                DetectorNode(
                    id=nid,
                    kind="detector",
                    face_pos=j,
                    round=row,
                    coord=(f.meas_coord[0], f.meas_coord[1], row),
                )
            )
    n_det = rows * n_faces
    low_id, high_id = n_det, n_det + 1
    nodes.append(DetectorNode(low_id, BOUNDARY_LOW, -1, -1, None))
    nodes.append(DetectorNode(high_id, BOUNDARY_HIGH, -1, -1, None))

    # A face is on the low or high side of the axis transverse to the
    # logical operator this graph protects.
    mid = code.d - 1  # doubled midpoint
    def boundary_node_for(face_pos: int) -> int:
        f = faces[face_pos]
        key = f.meas_coord[0] if detector_type == "Z" else f.meas_coord[1]
        if key == mid:
            raise GraphBuildError(
                f"face at {f.meas_coord} is not on a definite boundary side"
            )
        return low_id if key < mid else high_id

    pending: dict[tuple[int, int], dict] = {}
    response_map: dict[tuple[int, str], int | None] = {}
    response_flips: dict[tuple[int, str], tuple[tuple[int, ...], int]] = {}

    for loc in circuit.fault_locations:
        for pauli in PAULIS:
            resp = single_fault_response(circuit, loc.id, pauli)
            flips = resp.z_flips if detector_type == "Z" else resp.x_flips
            action = resp.z_action if detector_type == "Z" else resp.x_action
            node_flips = tuple(row * n_faces + j for j, row in flips)
            response_flips[(loc.id, pauli)] = (node_flips, action)
            if len(flips) == 0:
                if action != 0:
                    raise GraphBuildError(
                        f"fault {loc.id}:{pauli} flips the logical readout "
                        "without flipping any detector"
                    )
                response_map[(loc.id, pauli)] = None
                continue
            if len(flips) > 2:
                raise GraphBuildError(
                    f"fault {loc.id}:{pauli} flips {len(flips)} same-type "
                    "detectors; the decoding graph requires at most two"
                )
            if not circuit.is_graph_location(loc.id):
                continue  # composite mechanism; decoded as an edge combination
            if len(flips) == 1:
                j, row = flips[0]
                u = row * n_faces + j
                v = boundary_node_for(j)
            else:
                (j1, r1), (j2, r2) = flips
                u, v = r1 * n_faces + j1, r2 * n_faces + j2
            key = (min(u, v), max(u, v))
            entry = pending.get(key)
            if entry is None:
                pending[key] = entry = {
                    "sources": set(),
                    "canonical": (loc.id, pauli),
                    "action": action,
                }
            elif entry["action"] != action:
                raise GraphBuildError(
                    f"edge {key}: inconsistent logical action across mechanisms"
                )
            entry["sources"].add(loc.id)
            response_map[(loc.id, pauli)] = key  # resolved to edge id below

    edges: list[DetectorEdge] = []
    key_to_id: dict[tuple[int, int], int] = {}
    for key in sorted(pending):
        entry = pending[key]
        eid = len(edges)
        key_to_id[key] = eid
        edges.append(
            DetectorEdge(
                id=eid,
                u=key[0],
                v=key[1],
                fault_sources=frozenset(entry["sources"]),
                canonical=entry["canonical"],
                action=entry["action"],
            )
        )
    for k, v in list(response_map.items()):
        if v is not None:
            response_map[k] = key_to_id[v]

    g = DetectorGraph(nodes, edges, detector_type, circuit, response_map,
                      response_flips)
    g._n_faces = n_faces
    g.n_rows = rows
    return g


def graph_from_edges(
    n_detectors: int,
    edge_list: list[tuple[int, int]],
    boundary: set[int] | None = None,
) -> DetectorGraph:
    """Bare graph for metric/clustering tests; nodes >= n_detectors are boundaries."""
    boundary = boundary or set()
    n_nodes = max([n_detectors - 1, *[max(e) for e in edge_list]], default=0) + 1
    nodes = [
        DetectorNode(
            i,
            BOUNDARY_LOW if i in boundary else "detector",
            -1 if i in boundary else i,
            -1 if i in boundary else 0,
            None if i in boundary else (2 * i, 0, 0),
        )
        for i in range(n_nodes)
    ]
    edges = [
        DetectorEdge(i, min(u, v), max(u, v), frozenset({i}), None, 0)
        for i, (u, v) in enumerate(edge_list)
    ]
    return DetectorGraph(nodes, edges, "Z", None, {})


# -- locality certificate ------------------------------------------------------

SPACETIME_LENGTH_BOUND = math.sqrt(3.0)
BALL_GROWTH_COEFF = 48 * math.sqrt(3.0) * math.pi  # ball size <= coeff * r^3
BALL_GROWTH_POWER = 3
EDGE_SOURCE_BOUND = 10
DEGREE_BOUND = 12


@dataclass
class LocalityCertificate:
    c_observed: float
    max_degree: int  # over detector nodes, all incident edges
    max_degree_detector_only: int  # ignoring boundary-incident edges
    xi_observed: int
    ball_profile: dict[int, int]  # r -> max ball size observed
    ball_bound_ok: bool
    r_max: int
    length_ok: bool = field(init=False)
    degree_ok: bool = field(init=False)
    xi_ok: bool = field(init=False)

    def __post_init__(self) -> None:
        self.length_ok = self.c_observed <= SPACETIME_LENGTH_BOUND + 1e-12
        self.degree_ok = self.max_degree <= DEGREE_BOUND
        self.xi_ok = self.xi_observed <= EDGE_SOURCE_BOUND

    @property
    def ok(self) -> bool:
        return self.length_ok and self.degree_ok and self.xi_ok and self.ball_bound_ok


def spacetime_length(g: DetectorGraph, e: DetectorEdge) -> float | None:
    """Euclidean spacetime length of a detector-detector edge (None at boundary)."""
    cu, cv = g.nodes[e.u].coord, g.nodes[e.v].coord
    if cu is None or cv is None:
        return None
    dx = (cu[0] - cv[0]) / 2.0
    dy = (cu[1] - cv[1]) / 2.0
    dt = float(cu[2] - cv[2])
    return math.sqrt(dx * dx + dy * dy + dt * dt)


def verify_locality(g: DetectorGraph, r_max: int = 6) -> LocalityCertificate:
    """Measure the spacetime-locality constants and check the stated bounds."""
    c_obs = 0.0
    for e in g.edges:
        ln = spacetime_length(g, e)
        if ln is not None:
            c_obs = max(c_obs, ln)

    max_deg = 0
    max_deg_det = 0
    for nd in g.nodes:
        if nd.is_boundary:
            continue
        deg = len(g.incident_edges[nd.id])
        deg_det = sum(
            1 for v, _ in g.neighbors[nd.id] if not g.is_boundary[v]
        )
        max_deg = max(max_deg, deg)
        max_deg_det = max(max_deg_det, deg_det)

    xi_obs = max((len(e.fault_sources) for e in g.edges), default=0)

    profile: dict[int, int] = {}
    ok = True
    for e in range(g.n_edges):
        dist = g._edge_bfs(e, r_max=r_max)
        for r in range(1, r_max + 1):
            size = int(((dist >= 0) & (dist <= r)).sum())
            profile[r] = max(profile.get(r, 0), size)
    for r, size in profile.items():
        if size > BALL_GROWTH_COEFF * r**BALL_GROWTH_POWER:
            ok = False

    return LocalityCertificate(
        c_observed=c_obs,
        max_degree=max_deg,
        max_degree_detector_only=max_deg_det,
        xi_observed=xi_obs,
        ball_profile=profile,
        ball_bound_ok=ok,
        r_max=r_max,
    )
