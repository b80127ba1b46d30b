"""Cantor-like error chains that defeat the greedy decoder.

The construction takes a boundary-to-boundary geodesic chain of d edges in
the decoding graph, splits it into three segments of lengths

    floor((L - floor((L-2)/3)) / 2),  floor((L-2)/3),  ceil((L - floor((L-2)/3)) / 2)

drops the middle one, and recurses on the two sides while a side is at least
5 long.  Errors on the kept segments activate detectors only at segment
endpoints; because every removed middle is strictly shorter than the kept
segments flanking it, the greedy decoder always matches across the gaps,
reconstructing the complement of the errors along the chain, and the
combination sweeps a full logical operator.

The kept-segment count p after k0 recursion levels obeys p <= 2^k0 with
k0 <= log3(4(d - 3/4)/13) + 1, giving the sublinear weight bound

    N <= 2^(log3(108/13)) * (d - 3/4)^(log3 2)  ~  3.803 d^0.6309.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .circuit import FaultSet
from .decoders import Correction, correction_action, greedy_decode, uf_decode
from .detector_graph import DetectorGraph
from .lattice import SurfaceCode

WEIGHT_COEFF = 2 ** math.log(108 / 13, 3)  # ~3.803
WEIGHT_POWER = math.log(2, 3)  # ~0.6309


def cantor_decompose(length: int) -> list[tuple[int, int]]:
    """Kept segments of [0, length) as (start, length) pairs, in order."""
    if length < 1:
        raise ValueError("length must be >= 1")
    out: list[tuple[int, int]] = []

    def split(start: int, ln: int) -> None:
        if ln < 5:
            out.append((start, ln))
            return
        mid = (ln - 2) // 3
        left = (ln - mid) // 2
        right = ln - mid - left
        split(start, left)
        split(start + left + mid, right)

    split(0, length)
    return out


def rightmost_lengths(d: int) -> list[int]:
    """l_k sequence: the rightmost segment length after k decompositions."""
    out = [d]
    while out[-1] >= 5:
        lk = out[-1]
        out.append(math.ceil((lk - (lk - 2) // 3) / 2))
    return out


def weight_bound(d: int) -> float:
    return WEIGHT_COEFF * (d - 0.75) ** WEIGHT_POWER


@dataclass
class CantorPattern:
    d: int
    chain_edges: list[int]  # boundary-to-boundary, in order; length d
    chain_nodes: list[int]  # interior detector nodes, length d - 1
    segments: list[tuple[int, int]]  # kept (start, length) pieces
    error_edges: list[int]  # chain edges covered by kept segments
    fault_entries: list[tuple[int, str]]  # (location id, Pauli) realizing them

    @property
    def weight(self) -> int:
        return len(self.error_edges)

    def to_json(self) -> str:
        return json.dumps(
            {
                "d": self.d,
                "chain_edges": self.chain_edges,
                "chain_nodes": self.chain_nodes,
                "segments": [list(s) for s in self.segments],
                "error_edges": sorted(self.error_edges),
                "weight": self.weight,
                "weight_bound": weight_bound(self.d),
            },
            indent=2,
            sort_keys=True,
        )


def cantor_pattern(g: DetectorGraph, code: SurfaceCode) -> CantorPattern:
    """Realize the adversarial pattern on a Z-detector graph.

    The chain follows one mid-lattice row of data qubits at the middle
    detector round, using the between-rounds resting fault of each qubit, so
    consecutive chain edges share one Z-face detector in a single time
    slice.
    """
    if g.detector_type != "Z":
        raise ValueError("the adversarial chain is built on the Z-detector graph")
    circuit = g.circuit
    if circuit is None:
        raise ValueError("graph carries no circuit reference")
    d = code.d
    row_y = d - 1 if d % 2 == 1 else d  # doubled y of the middle qubit row
    mid_round = circuit.rounds // 2

    chain_edges: list[int] = []
    entries: list[tuple[int, str]] = []
    for x in range(d):
        q = circuit.data_index[(2 * x, row_y)]
        loc = circuit.loc_by_point[(mid_round, 0, q)]
        eid = g.response_map[(loc, "X")]
        assert eid is not None, "resting data fault must be a graph mechanism"
        chain_edges.append(eid)
        entries.append((loc, "X"))

    # Interior chain nodes: shared endpoint of consecutive edges.
    chain_nodes: list[int] = []
    for e1, e2 in zip(chain_edges, chain_edges[1:]):
        ends1 = {int(g.edge_u[e1]), int(g.edge_v[e1])}
        ends2 = {int(g.edge_u[e2]), int(g.edge_v[e2])}
        shared = [v for v in ends1 & ends2 if not g.is_boundary[v]]
        if len(shared) != 1:
            raise RuntimeError("chain edges do not connect properly")
        chain_nodes.append(shared[0])
    first_ends = {int(g.edge_u[chain_edges[0]]), int(g.edge_v[chain_edges[0]])}
    last_ends = {int(g.edge_u[chain_edges[-1]]), int(g.edge_v[chain_edges[-1]])}
    if not any(g.is_boundary[v] for v in first_ends) or not any(
        g.is_boundary[v] for v in last_ends
    ):
        raise RuntimeError("chain does not terminate on boundary vertices")

    # Geodesic property: on-chain separation equals graph distance.
    for i, v in enumerate(chain_nodes):
        dist, _ = g.vertex_bfs(v, through_boundary=False)
        for j in range(i + 1, len(chain_nodes)):
            if int(dist[chain_nodes[j]]) != j - i:
                raise RuntimeError(
                    f"chain is not geodesic between positions {i} and {j}"
                )

    segments = cantor_decompose(d)
    error_edges = []
    kept_entries = []
    for start, ln in segments:
        for x in range(start, start + ln):
            error_edges.append(chain_edges[x])
            kept_entries.append(entries[x])

    return CantorPattern(
        d=d,
        chain_edges=chain_edges,
        chain_nodes=chain_nodes,
        segments=segments,
        error_edges=error_edges,
        fault_entries=kept_entries,
    )


@dataclass
class GreedyFailureReport:
    logical_failure: bool
    pairs_are_complement: bool
    correction: Correction
    uf_logical_failure: bool | None  # None when the weight guarantee doesn't apply


def expected_gap_pairs(g: DetectorGraph, pattern: CantorPattern) -> list[tuple[int, int]]:
    """Active-detector pairs the greedy decoder must produce: one per gap."""
    segs = pattern.segments
    pairs = []
    for (s1, l1), (s2, _l2) in zip(segs, segs[1:]):
        left_node = pattern.chain_nodes[s1 + l1 - 1]
        right_node = pattern.chain_nodes[s2 - 1]
        pairs.append((min(left_node, right_node), max(left_node, right_node)))
    return pairs


def verify_greedy_failure(
    g: DetectorGraph, code: SurfaceCode, pattern: CantorPattern
) -> GreedyFailureReport:
    """Decode the pattern with greedy (and UF where its guarantee applies)."""
    faults = FaultSet(list(pattern.fault_entries))
    syndrome, true_action = g.syndrome_and_action(faults.entries)

    corr = greedy_decode(g, syndrome)
    greedy_fail = bool(true_action ^ correction_action(g, corr))

    want = set(expected_gap_pairs(g, pattern))
    got_detector_pairs = {
        (min(a, b), max(a, b))
        for a, b in corr.pairs
        if not g.is_boundary[a] and (b >= 0 and not g.is_boundary[b])
    }
    complement_ok = want <= got_detector_pairs

    uf_fail: bool | None = None
    if pattern.weight <= (code.d - 1) // 2:
        uc, _ = uf_decode(g, syndrome)
        uf_fail = bool(true_action ^ correction_action(g, uc))

    return GreedyFailureReport(
        logical_failure=greedy_fail,
        pairs_are_complement=complement_ok,
        correction=corr,
        uf_logical_failure=uf_fail,
    )
