import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decoderlab import (build_detector_graph, build_surface_code,
                        build_syndrome_circuit, cantor_decompose,
                        cantor_pattern, verify_greedy_failure, weight_bound)
from decoderlab.adversarial import expected_gap_pairs, rightmost_lengths


def test_short_chains_stay_whole():
    for length in (1, 2, 3, 4):
        assert cantor_decompose(length) == [(0, length)]


def test_length_five_splits():
    assert cantor_decompose(5) == [(0, 2), (3, 2)]


def test_d23_layout():
    assert cantor_decompose(23) == [(0, 3), (5, 3), (15, 3), (20, 3)]


@given(st.integers(min_value=1, max_value=400))
@settings(max_examples=120, deadline=None)
def test_decomposition_invariants(length):
    segs = cantor_decompose(length)
    # Ordered, disjoint, inside [0, length), each piece at most 4 long.
    end = 0
    for start, ln in segs:
        assert start >= end
        assert 1 <= ln <= 4
        end = start + ln
    assert end <= length
    # Every removed middle is strictly shorter than the kept pieces around it.
    if length >= 5:
        mid = (length - 2) // 3
        left = (length - mid) // 2
        right = length - mid - left
        assert mid < left <= right


def test_rightmost_length_recursion():
    ls = rightmost_lengths(23)
    assert ls == [23, 8, 3]
    for lk, lk1 in zip(ls, ls[1:]):
        assert lk1 == math.ceil((lk - (lk - 2) // 3) / 2)
        assert lk1 <= lk / 3 + 7 / 6


def test_weight_bound_over_odd_distances():
    prev = 0
    for d in range(5, 103, 2):
        segs = cantor_decompose(d)
        weight = sum(ln for _, ln in segs)
        assert weight <= weight_bound(d)
        assert weight >= prev
        prev = weight
        # Segment count stays within 2^k0.
        k0 = len(rightmost_lengths(d)) - 1
        assert len(segs) <= 2**k0
        assert k0 <= math.log((4 / 13) * (d - 0.75), 3) + 1


@pytest.fixture(scope="module")
def cantor5():
    code = build_surface_code(5)
    g = build_detector_graph(build_syndrome_circuit(code, 3), "Z")
    return code, g, cantor_pattern(g, code)


def test_pattern_structure(cantor5):
    code, g, pat = cantor5
    assert len(pat.chain_edges) == 5
    assert len(pat.chain_nodes) == 4
    assert pat.weight == 4
    assert pat.segments == [(0, 2), (3, 2)]


def test_geodesic_chain(cantor5):
    code, g, pat = cantor5
    for i, a in enumerate(pat.chain_nodes):
        dist, _ = g.vertex_bfs(a, through_boundary=False)
        for j in range(i + 1, len(pat.chain_nodes)):
            assert int(dist[pat.chain_nodes[j]]) == j - i


def test_greedy_failure_d5(cantor5):
    code, g, pat = cantor5
    rep = verify_greedy_failure(g, code, pat)
    assert rep.logical_failure is True
    assert rep.pairs_are_complement is True
    # The single gap pair joins the two inner detectors across the middle.
    assert expected_gap_pairs(g, pat) == [
        (min(pat.chain_nodes[1], pat.chain_nodes[2]),
         max(pat.chain_nodes[1], pat.chain_nodes[2]))
    ]


def test_greedy_failure_d23():
    code = build_surface_code(23)
    g = build_detector_graph(build_syndrome_circuit(code, 3), "Z")
    pat = cantor_pattern(g, code)
    assert pat.weight == 12
    rep = verify_greedy_failure(g, code, pat)
    assert rep.logical_failure is True
    assert rep.pairs_are_complement is True


def test_uf_succeeds_when_weight_guarantee_applies():
    code = build_surface_code(33)
    g = build_detector_graph(build_syndrome_circuit(code, 3), "Z")
    pat = cantor_pattern(g, code)
    assert pat.weight <= (code.d - 1) // 2
    rep = verify_greedy_failure(g, code, pat)
    assert rep.logical_failure is True
    assert rep.uf_logical_failure is False
