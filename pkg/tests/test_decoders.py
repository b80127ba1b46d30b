import numpy as np
import pytest

from decoderlab import (FaultSet, correction_action, greedy_decode,
                        logical_flip, peel_cluster, sample_faults, shot_rng,
                        simulate_shot, uf_decode)
from decoderlab.decoders import DecodeContractError
from decoderlab.detector_graph import graph_from_edges


def _bulk_edge(g):
    return next(
        e for e in g.edges if not g.is_boundary[e.u] and not g.is_boundary[e.v]
    )


def test_empty_syndrome(graph3):
    corr, trace = uf_decode(graph3, ())
    assert corr.edges == frozenset()
    assert trace.growth_rounds == 0
    assert greedy_decode(graph3, ()).edges == frozenset()


def test_two_actives_on_one_edge(graph3):
    e = _bulk_edge(graph3)
    corr, trace = uf_decode(graph3, (e.u, e.v), with_trace=True)
    assert corr.edges == frozenset({e.id})
    assert trace.growth_rounds == 1
    assert corr.pairs == [(min(e.u, e.v), max(e.u, e.v))]


def test_single_boundary_active(graph3):
    e = next(ed for ed in graph3.edges if graph3.is_boundary[ed.v])
    corr, trace = uf_decode(graph3, (e.u,))
    toggles = set()
    for eid in corr.edges:
        for w in (int(graph3.edge_u[eid]), int(graph3.edge_v[eid])):
            if not graph3.is_boundary[w]:
                toggles.symmetric_difference_update({w})
    assert toggles == {e.u}
    assert trace.growth_rounds == 2  # one-sided absorption of the boundary


def test_uf_weight_one_exhaustive_d3(circuit3, graph3):
    for loc in circuit3.fault_locations:
        for pauli in ("X", "Y", "Z"):
            flips, action = graph3.response_flips[(loc.id, pauli)]
            corr, _ = uf_decode(graph3, flips)
            assert action ^ correction_action(graph3, corr) == 0


def test_peel_path_of_three():
    g = graph_from_edges(4, [(0, 1), (1, 2), (2, 3)])
    picked = peel_cluster(g, [0, 1, 2], (0, 3), touches_boundary=False)
    assert picked == {0, 1, 2}


def test_peel_single_edge():
    g = graph_from_edges(2, [(0, 1)])
    assert peel_cluster(g, [0], (0, 1), touches_boundary=False) == {0}


def test_peel_invalid_cluster_rejected():
    g = graph_from_edges(3, [(0, 1), (1, 2)])
    with pytest.raises(DecodeContractError):
        peel_cluster(g, [0, 1], (0,), touches_boundary=False)


def test_peel_random_valid_clusters_annihilate(graph5):
    rng = np.random.default_rng(2)
    for _ in range(30):
        # Grow a random connected edge set, then peel its even-active subsets.
        start = int(rng.integers(0, graph5.n_edges))
        edges = {start}
        for _ in range(6):
            e = int(rng.choice(sorted(edges)))
            for v in (int(graph5.edge_u[e]), int(graph5.edge_v[e])):
                inc = graph5.incident_edges[v]
                edges.add(int(rng.choice(inc)))
        verts = set()
        for e in edges:
            for v in (int(graph5.edge_u[e]), int(graph5.edge_v[e])):
                if not graph5.is_boundary[v]:
                    verts.add(v)
        verts = sorted(verts)
        actives = [v for i, v in enumerate(verts) if i % 2 == 0]
        if len(actives) % 2 == 1:
            actives = actives[:-1]
        touches = any(
            graph5.is_boundary[int(graph5.edge_u[e])]
            or graph5.is_boundary[int(graph5.edge_v[e])]
            for e in edges
        )
        picked = peel_cluster(graph5, sorted(edges), actives, touches)
        toggles = set()
        for eid in picked:
            for w in (int(graph5.edge_u[eid]), int(graph5.edge_v[eid])):
                if not graph5.is_boundary[w]:
                    toggles.symmetric_difference_update({w})
        assert toggles == set(actives)


def test_annihilation_on_sampled_shots(circuit5, graph5):
    for trial in range(60):
        fs = sample_faults(circuit5, 3e-3, shot_rng(41, trial))
        syndrome, _ = graph5.syndrome_and_action(fs.entries)
        corr, _ = uf_decode(graph5, syndrome)  # raises on non-annihilation
        toggles = set()
        for eid in corr.edges:
            for w in (int(graph5.edge_u[eid]), int(graph5.edge_v[eid])):
                if not graph5.is_boundary[w]:
                    toggles.symmetric_difference_update({w})
        assert toggles == set(syndrome)


def test_validity_monotone_and_parity_additive(circuit5, graph5):
    """Valid clusters never grow again; merged parities XOR."""
    for trial in range(40):
        fs = sample_faults(circuit5, 4e-3, shot_rng(43, trial))
        syndrome, _ = graph5.syndrome_and_action(fs.entries)
        if not syndrome:
            continue
        _, trace = uf_decode(graph5, syndrome, with_trace=True)
        valid_roots: set[int] = set()
        for rec in trace.rounds:
            for root, _members in rec["grown"]:
                assert root not in valid_roots, "a valid cluster grew again"
            prev = {}
            for snap in rec["clusters"]:
                prev[snap.root] = snap.parity
                if snap.valid:
                    valid_roots.add(snap.root)
                else:
                    # Absorption into a growing cluster may leave the merged
                    # root invalid again; only standalone validity is sticky.
                    valid_roots.discard(snap.root)
        # Parity additivity across merges: replay each round's merge chain,
        # starting from the singleton seeds.
        syndrome_set = set(syndrome)
        parities: dict[int, int] = {v: 1 for v in syndrome}
        for rec in trace.rounds:
            running = dict(parities)
            for a, b, new in rec["merges"]:
                merged = (running.pop(a, 0) + running.pop(b, 0)) % 2
                running[new] = merged
            cur = {snap.root: snap.parity for snap in rec["clusters"]}
            for root, parity in cur.items():
                if root in running:
                    assert parity == running[root]
            # Ground truth: parity equals the active-member count mod 2.
            for snap in rec["clusters"]:
                assert snap.parity == len(snap.members & syndrome_set) % 2
            parities = cur


def test_greedy_prefers_nearby_pair(graph3):
    e = _bulk_edge(graph3)
    corr = greedy_decode(graph3, (e.u, e.v))
    assert corr.edges == frozenset({e.id})
    assert corr.pairs == [(e.u, e.v)]


def test_greedy_matches_all_actives(circuit5, graph5):
    for trial in range(30):
        fs = sample_faults(circuit5, 3e-3, shot_rng(47, trial))
        syndrome, _ = graph5.syndrome_and_action(fs.entries)
        corr = greedy_decode(graph5, syndrome)
        matched = set()
        for a, b in corr.pairs:
            assert a not in matched
            matched.add(a)
            if not graph5.is_boundary[b]:
                assert b not in matched
                matched.add(b)
        assert matched == set(syndrome)


def test_logical_flip_contract(circuit3, graph3, code3):
    out = simulate_shot(circuit3, FaultSet([]))
    corr, _ = uf_decode(graph3, ())
    assert logical_flip(graph3, out, corr) is False

    # A full row of X errors is a logical operator: empty syndrome but a
    # flipped Z readout.
    entries = []
    for q in sorted(code3.logical_x_support):
        qi = circuit3.data_index[q]
        entries.append((circuit3.loc_by_point[(-1, -1, qi)], "X"))
    shot = simulate_shot(circuit3, FaultSet(entries))
    assert not shot.z_detectors().any()
    corr, _ = uf_decode(graph3, ())
    assert logical_flip(graph3, shot, corr) is True


def test_logical_flip_weight_one_exhaustive(circuit3, graph3):
    for loc in circuit3.fault_locations:
        fs = FaultSet([(loc.id, "X")])
        shot = simulate_shot(circuit3, fs)
        syndrome, _ = graph3.syndrome_and_action(fs.entries)
        corr, _ = uf_decode(graph3, syndrome)
        assert logical_flip(graph3, shot, corr) is False


def test_logical_flip_rejects_wrong_correction(circuit3, graph3):
    e = _bulk_edge(graph3)
    shot = simulate_shot(circuit3, FaultSet([]))
    bad = uf_decode(graph3, (e.u, e.v))[0]
    with pytest.raises(DecodeContractError):
        logical_flip(graph3, shot, bad)
