import itertools
import json

import networkx as nx
import numpy as np
import pytest

from decoderlab import (FaultSet, build_detector_graph, build_surface_code,
                        build_syndrome_circuit, graph_from_edges, sample_faults,
                        shot_rng, simulate_shot, verify_locality)


def _nx_line_graph(g):
    base = nx.Graph()
    for e in g.edges:
        base.add_edge(e.u, e.v, key=e.id)
    lg = nx.Graph()
    lg.add_nodes_from(range(g.n_edges))
    for v in range(g.n_nodes):
        inc = g.incident_edges[v]
        for a, b in itertools.combinations(inc, 2):
            lg.add_edge(a, b)
    return lg


def test_node_count_d3(graph3):
    # 4 Z faces x (3 rounds + synthetic final row) + 2 boundary nodes.
    assert graph3.n_nodes == 4 * 4 + 2
    assert sum(1 for n in graph3.nodes if n.is_boundary) == 2


def test_edge_sources_and_xi(graph5):
    for e in graph5.edges:
        assert e.fault_sources
        assert e.canonical is not None
    xi = max(len(e.fault_sources) for e in graph5.edges)
    assert xi <= 10


def test_edge_probability_bound(graph3):
    p = 1e-3
    for e in graph3.edges:
        bound = e.failure_probability_bound(p)
        assert bound <= len(e.fault_sources) * p + 1e-12


def test_edges_are_simple_and_deduplicated(graph5):
    seen = set()
    for e in graph5.edges:
        assert e.u != e.v
        key = (e.u, e.v)
        assert key not in seen
        seen.add(key)


def test_edge_distance_matches_networkx_bfs(graph3):
    lg = _nx_line_graph(graph3)
    rng = np.random.default_rng(11)
    ids = rng.choice(graph3.n_edges, size=15, replace=False)
    for a, b in itertools.combinations(ids.tolist(), 2):
        want = nx.shortest_path_length(lg, a, b)
        assert graph3.edge_distance(a, b) == want


def test_edge_distance_identity_and_errors(graph3):
    assert graph3.edge_distance(0, 0) == 0
    with pytest.raises(KeyError):
        graph3.edge_distance(0, 10**6)


def test_path_graph_distances():
    g = graph_from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert g.edge_distance(0, 2) == 2
    assert g.edge_distance(0, 1) == 1
    assert g.ball(1, 1) == {0, 1, 2}
    assert g.ball(0, 0) == {0}


def test_ball_symmetry_and_growth(graph3):
    rng = np.random.default_rng(5)
    ids = rng.choice(graph3.n_edges, size=10, replace=False).tolist()
    for e in ids:
        for r in (1, 2, 3):
            ball = graph3.ball(e, r)
            for e2 in ball:
                assert e in graph3.ball(e2, r)


def test_set_diameter_and_distance_vs_bruteforce(graph3):
    rng = np.random.default_rng(7)
    for _ in range(10):
        s1 = set(rng.choice(graph3.n_edges, size=4, replace=False).tolist())
        s2 = set(rng.choice(graph3.n_edges, size=3, replace=False).tolist())
        want_diam = max(graph3.edge_distance(a, b) for a in s1 for b in s1)
        want_dist = min(graph3.edge_distance(a, b) for a in s1 for b in s2)
        assert graph3.set_diameter(s1) == want_diam
        assert graph3.set_distance(s1, s2) == want_dist
    with pytest.raises(ValueError):
        graph3.set_diameter(set())


def test_metric_triangle_inequality(graph3):
    rng = np.random.default_rng(13)
    ids = rng.choice(graph3.n_edges, size=8, replace=False).tolist()
    for a, b, c in itertools.combinations(ids, 3):
        ab = graph3.edge_distance(a, b)
        bc = graph3.edge_distance(b, c)
        ac = graph3.edge_distance(a, c)
        assert ac <= ab + bc


@pytest.mark.parametrize("d", [3, 5])
def test_locality_certificate(d):
    code = build_surface_code(d)
    circ = build_syndrome_circuit(code, d)
    for det_type in ("Z", "X"):
        cert = verify_locality(build_detector_graph(circ, det_type), r_max=4)
        assert cert.length_ok and cert.c_observed <= 3**0.5 + 1e-12
        assert cert.degree_ok and cert.max_degree <= 12
        assert cert.xi_ok and cert.xi_observed <= 10
        assert cert.ball_bound_ok


def test_rounds_one_graph_still_local(code3):
    circ = build_syndrome_circuit(code3, 1)
    cert = verify_locality(build_detector_graph(circ, "Z"), r_max=3)
    assert cert.ok


def test_syndrome_consistency_on_sampled_shots(circuit5, graph5):
    n_faces = len(circuit5.z_faces)
    for trial in range(40):
        fs = sample_faults(circuit5, 0.02, shot_rng(31, trial))
        shot = simulate_shot(circuit5, fs)
        zd = shot.z_detectors()
        want = {int(r) * n_faces + int(j) for j, r in zip(*np.nonzero(zd))}
        got, action = graph5.syndrome_and_action(fs.entries)
        assert set(got) == want
        assert action == int(shot.final_data[circuit5.logical_z_idx].sum() % 2)


def test_response_enumeration_complete(circuit3, graph3):
    """Every graph-location fault lands on exactly one edge or flips nothing."""
    for loc in circuit3.fault_locations:
        for pauli in ("X", "Y", "Z"):
            flips, action = graph3.response_flips[(loc.id, pauli)]
            eid = graph3.response_map.get((loc.id, pauli))
            if circuit3.is_graph_location(loc.id) and flips:
                assert eid is not None
                ends = {
                    v
                    for v in (int(graph3.edge_u[eid]), int(graph3.edge_v[eid]))
                    if not graph3.is_boundary[v]
                }
                assert ends == set(flips)
            if not flips:
                assert action == 0


def test_error_edges_of_preserves_syndrome(circuit5, graph5):
    for trial in range(25):
        fs = sample_faults(circuit5, 0.02, shot_rng(37, trial))
        syndrome, _ = graph5.syndrome_and_action(fs.entries)
        edges = graph5.error_edges_of(fs.entries)
        toggles = set()
        for eid in edges:
            for w in (int(graph5.edge_u[eid]), int(graph5.edge_v[eid])):
                if not graph5.is_boundary[w]:
                    toggles.symmetric_difference_update({w})
        assert toggles == set(syndrome)


def test_json_export_deterministic(graph3):
    a = graph3.to_json(1e-3)
    b = graph3.to_json(1e-3)
    assert a == b
    payload = json.loads(a)
    assert len(payload["nodes"]) == graph3.n_nodes
    assert len(payload["edges"]) == graph3.n_edges
    assert payload["detector_type"] == "Z"
