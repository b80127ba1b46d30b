import itertools
import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from decoderlab import (ScaleSchedule, VALIDATED_UF, analytical_threshold,
                        check_constraints, decompose_clustered,
                        decompose_isolated, f_k, graph_from_edges,
                        minimal_witness_check, p_k_bound_log10, sample_faults,
                        series_constant, shot_rng, uf_decode,
                        verify_stopping_guarantee, zeta_direct)
from decoderlab.clustering import is_isolated_in

BALL_COEFF = 48 * math.sqrt(3) * math.pi


# -- schedules and constants -----------------------------------------------------


def test_schedule_values_at_validated_point():
    s = VALIDATED_UF
    assert float(s.d(1)) == pytest.approx(2.8 - 1)
    b1 = 1.2 * 107 ** (2 * math.log(2)) + 1
    assert float(s.b(1)) == pytest.approx(b1, rel=1e-12)


def test_f1_is_one():
    assert float(f_k(VALIDATED_UF, 1)) == 1.0


def test_f2_matches_direct_evaluation():
    """Independent one-step evaluation of the recursion."""
    beta, gamma, lam = 1.2, 2.8, 107.0
    d1 = gamma - 1
    b1 = beta * lam ** (2 * math.log(2)) + 1
    f2_direct = 1 - (2 * (d1 + 1)) / (2 * (d1 + 0.5) + (b1 - 1))
    assert float(f_k(VALIDATED_UF, 2)) == pytest.approx(f2_direct, rel=1e-12)
    assert round(float(f_k(VALIDATED_UF, 2)), 4) == 0.9929


def test_fk_floor_up_to_50():
    assert all(float(f_k(VALIDATED_UF, k)) >= 0.5 for k in range(1, 51))


def test_schedule_monotone_and_separated():
    s = VALIDATED_UF
    with mp.workdps(60):
        for k in range(1, 50):
            assert s.b(k + 1) > s.b(k)
            assert s.d(k + 1) > s.d(k)
            assert s.d(k + 1) >= 2 * (s.d(k) + s.b(k))


def test_series_constant():
    assert abs(series_constant("uf") - 3.57257) < 1e-4
    assert series_constant("greedy") == 3.0


def test_zeta_direct_against_mpmath():
    for s in (1.5, 2.0, math.log(107)):
        assert zeta_direct(s) == pytest.approx(float(mp.zeta(s)), rel=1e-9)


def test_constraints_validated_point():
    assert all(ok for _, ok in check_constraints(VALIDATED_UF))


def test_constraint_lambda_e_boundary_fails():
    s = ScaleSchedule("uf", beta=1.2, gamma=2.8, lam=math.e)
    results = dict(check_constraints(s))
    assert results["lam > e"] is False


def test_greedy_grid_point_passes():
    """A satisfying point found by coarse grid search over the constraints."""
    found = None
    for beta in (0.1, 0.2, 0.3):
        for gamma in (1.0, 2.0, 3.0):
            for lam in (8.0, 12.0, 16.0):
                ok = (
                    gamma * lam >= 2
                    and beta * lam > gamma
                    and gamma * lam - 1 / lam >= 2 * (gamma + 2 * beta * lam)
                )
                if ok:
                    found = (beta, gamma, lam)
                    break
    assert found is not None
    assert all(ok for _, ok in check_constraints(ScaleSchedule("greedy", *found)))


def test_threshold_reproduction():
    rep1 = analytical_threshold(1.0, BALL_COEFF, 3, VALIDATED_UF)
    assert 2.5e-26 / 2 <= rep1.p_th <= 2.5e-26 * 2
    rep10 = analytical_threshold(10.0, BALL_COEFF, 3, VALIDATED_UF)
    assert 2.5e-27 / 2 <= rep10.p_th <= 2.5e-27 * 2
    assert rep10.p_th == pytest.approx(rep1.p_th / 10, rel=1e-9)
    assert rep1.eta_sup == pytest.approx(math.log(2) / math.log(107))


def test_k0_and_kbar_defining_inequalities():
    rep = analytical_threshold(1.0, BALL_COEFF, 3, VALIDATED_UF)
    for d in (5, 7, 101, 10001):
        k0 = rep.k0(d)
        if k0 >= 1:
            dk = float(VALIDATED_UF.d(k0))
            fk = float(f_k(VALIDATED_UF, k0))
            assert dk + (dk + 1) / fk + 1 < d
        dk1 = float(VALIDATED_UF.d(k0 + 1))
        fk1 = float(f_k(VALIDATED_UF, k0 + 1))
        assert not (dk1 + (dk1 + 1) / fk1 + 1 < d)
    p = rep.p_th / 10
    for d in (7, 1001):
        kb = rep.kbar(d, p)
        if kb >= 1:
            assert d**3 * (p / rep.p_th) ** (2**kb) >= 1
        assert d**3 * (p / rep.p_th) ** (2 ** (kb + 1)) < 1
    with pytest.raises(ValueError):
        rep.kbar(7, rep.p_th * 2)


def test_p_k_bound_k1_closed_form():
    s = VALIDATED_UF
    p, xi = 1e-3, 1.0
    got = p_k_bound_log10(1, p, xi, BALL_COEFF, 3, s)
    want = math.log10(
        (xi * p) ** 2 * BALL_COEFF * (float(s.b(1)) + float(s.d(1)) / 2) ** 3
    )
    assert got == pytest.approx(want, rel=1e-9)


def test_p_k_bound_log_domain_matches_exact_rational():
    """Greedy toy schedule has rational b_k, d_k; compare against Fractions."""
    s = ScaleSchedule("greedy", beta=0.5, gamma=1.5, lam=2.0)
    p = Fraction(1, 100)
    lam_c, delta = 3, 1
    for k in (1, 2, 3):
        exact = (Fraction(1, 100)) ** (2**k)
        for j in range(k):
            lvl = k - j
            b = Fraction(2 ** (lvl + 1) + 2, 2)  # 0.5*2^(k+1)+1
            d = Fraction(3 * 2**lvl - 2, 2)  # 1.5*2^k-1
            exact *= (lam_c * (b + d / 2)) ** (delta * 2**j)
        want = math.log10(exact.numerator) - math.log10(exact.denominator)
        got = p_k_bound_log10(k, float(p), 1.0, lam_c, delta, s)
        assert got == pytest.approx(want, abs=1e-9)


def test_p_k_bound_doubly_exponential_envelope():
    rep = analytical_threshold(1.0, BALL_COEFF, 3, VALIDATED_UF)
    at = [p_k_bound_log10(k, rep.p_th, 1.0, BALL_COEFF, 3, VALIDATED_UF) / 2**k
          for k in range(1, 21)]
    # Normalized bound approaches a nonpositive constant at p = p_th.
    assert all(v <= 0 for v in at)
    assert abs(at[-1] - at[-2]) < 0.05
    below = [p_k_bound_log10(k, rep.p_th / 10, 1.0, BALL_COEFF, 3, VALIDATED_UF)
             for k in range(1, 21)]
    for k, v in enumerate(below, start=1):
        assert v <= -(2**k) + 40  # log10 bound below -2^k + O(1)


# -- decompositions ---------------------------------------------------------------


def _oracle_clustered(dists, n_set, D, B):
    """Edges in some (D, B)-cluster, by exhaustive subset enumeration."""
    n_sorted = sorted(n_set)
    clustered = set()
    for size in range(1, len(n_sorted) + 1):
        for combo in itertools.combinations(n_sorted, size):
            cset = set(combo)
            diam = max((dists[a][b] for a in cset for b in cset), default=0)
            if diam > D:
                continue
            rest = n_set - cset
            sep = min((dists[a][b] for a in cset for b in rest), default=None)
            if sep is None or sep > B:
                clustered |= cset
    return clustered


def test_single_edge_is_level_one_cluster(graph3, small_schedule):
    dec = decompose_clustered(graph3, {0}, small_schedule)
    assert dec.N(1) == frozenset()
    assert len(dec.clusters_at(1)) == 1
    assert dec.clusters_at(1)[0].edges == frozenset({0})


def test_two_far_edges_make_two_level_one_clusters(graph5, small_schedule):
    b1 = float(small_schedule.b(1))
    e0 = 0
    far = next(
        e for e in range(graph5.n_edges) if graph5.edge_distance(e0, e) > b1
    )
    dec = decompose_clustered(graph5, {e0, far}, small_schedule)
    assert len(dec.clusters_at(1)) == 2
    assert dec.N(1) == frozenset()


def test_decomposition_matches_subset_oracle(graph5, small_schedule):
    rng = np.random.default_rng(101)
    for trial in range(60):
        size = int(rng.integers(3, 7))
        n_set = set(int(e) for e in rng.choice(graph5.n_edges, size=size,
                                               replace=False))
        dists = {
            e: {e2: graph5.edge_distance(e, e2) for e2 in n_set} for e in n_set
        }
        current = frozenset(n_set)
        dec = decompose_clustered(graph5, n_set, small_schedule)
        level = 0
        while current and level < 6:
            level += 1
            D = float(small_schedule.d(level))
            B = float(small_schedule.b(level))
            removed = _oracle_clustered(dists, set(current), D, B)
            current = current - removed
            assert dec.N(level) == current, f"level {level} differs from oracle"


def test_isolated_contains_clustered(graph5, small_schedule):
    rng = np.random.default_rng(55)
    for trial in range(30):
        n_set = set(int(e) for e in rng.choice(graph5.n_edges, size=6,
                                               replace=False))
        dc = decompose_clustered(graph5, n_set, small_schedule)
        di = decompose_isolated(graph5, n_set, small_schedule)
        for k in range(max(dc.max_level, di.max_level) + 2):
            assert dc.N(k) <= di.N(k)
            assert dc.N(k + 1) <= dc.N(k)
            assert di.N(k + 1) <= di.N(k)


def test_same_level_clusters_disjoint(graph5, small_schedule):
    rng = np.random.default_rng(77)
    for trial in range(20):
        n_set = set(int(e) for e in rng.choice(graph5.n_edges, size=8,
                                               replace=False))
        dec = decompose_clustered(graph5, n_set, small_schedule)
        for k in range(1, dec.max_level + 1):
            clusters = dec.clusters_at(k)
            for a, b in itertools.combinations(clusters, 2):
                assert not (a.edges & b.edges)


def test_isolated_implies_clustered_instancewise(graph5, small_schedule):
    """(r, R)-isolated edges sit in (2r, R-r)-clusters of any subset."""
    rng = np.random.default_rng(88)
    r, big_r = 1.0, 4.0
    for trial in range(20):
        n_set = frozenset(
            int(e) for e in rng.choice(graph5.n_edges, size=6, replace=False)
        )
        for e in n_set:
            if not is_isolated_in(graph5, n_set, e, r, big_r):
                continue
            ball = {e2 for e2 in n_set if graph5.edge_distance(e, e2) <= r}
            diam = max(
                graph5.edge_distance(a, b) for a in ball for b in ball
            ) if len(ball) > 1 else 0
            rest = n_set - ball
            sep = min(
                (graph5.edge_distance(a, b) for a in ball for b in rest),
                default=None,
            )
            assert diam <= 2 * r
            assert sep is None or sep > big_r - r


def test_single_edge_isolated_level_one(graph3, small_schedule):
    dec = decompose_isolated(graph3, {5}, small_schedule)
    assert dec.N(1) == frozenset()


# -- minimal witnesses -------------------------------------------------------------


def _path_graph(n_edges=14):
    return graph_from_edges(n_edges + 1, [(i, i + 1) for i in range(n_edges)])


@pytest.fixture(scope="module")
def witness_schedule():
    """Small scales that still satisfy the level-separation constraint.

    d_1 = 1, b_1 ~ 3.05, d_2 = 15, b_2 ~ 17.4: the level-1 and level-2
    annuli are disjoint, so minimal witnesses must pair recursively.
    """
    s = ScaleSchedule("greedy", beta=0.032, gamma=0.25, lam=8.0)
    assert float(s.d(2)) >= 2 * (float(s.d(1)) + float(s.b(1)))
    assert float(s.b(1)) >= float(s.d(1)) and float(s.b(2)) >= float(s.d(2))
    return s


def test_witness_k0_is_singleton(witness_schedule):
    g = _path_graph()
    rep = minimal_witness_check(g, witness_schedule, 0, edge=7, ball_coeff=3,
                                ball_power=1)
    assert rep.minimal_size == 1 and rep.size_ok
    assert rep.witnesses == [frozenset({7})]


def test_witness_k1_pairs(witness_schedule):
    g = _path_graph()
    rep = minimal_witness_check(g, witness_schedule, 1, edge=7, ball_coeff=3,
                                ball_power=1)
    assert rep.minimal_size == 2 and rep.size_ok
    assert rep.contained_in_ball
    assert rep.count_ok
    # Witness partners live in the (d_1/2, b_1 + d_1/2] annulus.
    r = float(witness_schedule.d(1)) / 2
    big_r = float(witness_schedule.b(1)) + r
    for w in rep.witnesses:
        partner = next(iter(w - {7}))
        dist = abs(partner - 7)
        assert r < dist <= big_r


def test_witness_k2_quadruples(witness_schedule):
    g = _path_graph(18)
    rep = minimal_witness_check(g, witness_schedule, 2, edge=4, ball_coeff=3,
                                ball_power=1)
    assert rep.minimal_size == 4 and rep.size_ok
    assert rep.contained_in_ball
    assert rep.count_ok


def test_witness_budget_guard(witness_schedule):
    g = _path_graph(30)
    with pytest.raises(ValueError, match="capped"):
        minimal_witness_check(g, witness_schedule, 1, edge=5, ball_coeff=3,
                              ball_power=1, max_edges=20)


# -- stopping guarantee --------------------------------------------------------------


def test_stopping_guarantee_trivial(graph3, small_schedule):
    corr, trace = uf_decode(graph3, (), with_trace=True)
    dec = decompose_clustered(graph3, set(), VALIDATED_UF)
    rep = verify_stopping_guarantee(graph3, trace, dec, VALIDATED_UF)
    assert rep.ok and rep.max_margin == 0.0


def test_stopping_guarantee_single_pair(graph3):
    e = next(
        ed for ed in graph3.edges
        if not graph3.is_boundary[ed.u] and not graph3.is_boundary[ed.v]
    )
    dec = decompose_clustered(graph3, {e.id}, VALIDATED_UF)
    _, trace = uf_decode(graph3, (e.u, e.v), with_trace=True)
    rep = verify_stopping_guarantee(graph3, trace, dec, VALIDATED_UF)
    assert rep.ok
    d1 = float(VALIDATED_UF.d(1))
    assert rep.max_margin <= (d1 + 1) / 2
    assert rep.growth_rounds_by_level.get(1, 0) <= d1 + 1


def test_stopping_guarantee_requires_snapshots(graph3):
    e = graph3.edges[0]
    det = e.u if not graph3.is_boundary[e.u] else e.v
    dec = decompose_clustered(graph3, {e.id}, VALIDATED_UF)
    _, trace = uf_decode(graph3, (det,), with_trace=False)
    with pytest.raises(ValueError, match="with_trace"):
        verify_stopping_guarantee(graph3, trace, dec, VALIDATED_UF)


def test_stopping_guarantee_sampled(circuit5, graph5):
    viol = []
    for shot in range(300):
        fs = sample_faults(circuit5, 1e-3, shot_rng(4242, shot))
        syn, _ = graph5.syndrome_and_action(fs.entries)
        if not syn:
            continue
        n_edges = graph5.error_edges_of(fs.entries)
        dec = decompose_clustered(graph5, n_edges, VALIDATED_UF)
        if not dec.emptied:
            continue
        _, trace = uf_decode(graph5, syn, with_trace=True)
        rep = verify_stopping_guarantee(graph5, trace, dec, VALIDATED_UF)
        viol.extend(rep.violations)
    assert viol == []
