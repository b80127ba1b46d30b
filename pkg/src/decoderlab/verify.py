"""Cross-cutting invariant checks, including the tableau-oracle circuit check.

The projective-measurement check validates the syndrome-extraction schedule
against the exact stabilizer simulator: one extraction round must act on an
arbitrary input stabilizer state as a projective measurement of every face
operator.  It is used both by the test suite and by the `verify` CLI
subcommand.
"""

from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit
from .tableau import Tableau


def run_extraction_round(
    t: Tableau, circuit: Circuit, layer_override: list[list[tuple[int, int]]] | None = None
) -> dict[int, int]:
    """Apply one reset/CNOT/measure round on a tableau; face position -> outcome."""
    for f in circuit.code.faces:
        a = circuit.anc_index[f]
        if f.kind == "X":
            t.reset_plus(a)
        else:
            t.reset(a)
    layers = (
        layer_override
        if layer_override is not None
        else [list(circuit._layer_gates[s]) for s in range(1, 5)]
    )
    for gates in layers:
        for c, tgt in gates:
            t.cnot(c, tgt)
    outcomes: dict[int, int] = {}
    for i, f in enumerate(circuit.code.faces):
        a = circuit.anc_index[f]
        out, _ = t.measure_x(a) if f.kind == "X" else t.measure(a)
        outcomes[i] = out
    return outcomes


def _face_pauli(circuit: Circuit, face_pos: int) -> dict[int, str]:
    f = circuit.code.faces[face_pos]
    return {circuit.data_index[q]: f.kind for q in f.qubits}


def random_data_tableau(circuit: Circuit, rng: np.random.Generator, depth: int = 250) -> Tableau:
    """Full-register tableau with a random stabilizer state on the data qubits."""
    t = Tableau(circuit.nq, rng=rng)
    n_data = circuit.n_data
    for _ in range(depth):
        kind = rng.integers(0, 3)
        if kind == 0:
            t.h(int(rng.integers(0, n_data)))
        elif kind == 1:
            t.s(int(rng.integers(0, n_data)))
        else:
            a, b = rng.choice(n_data, size=2, replace=False)
            t.cnot(int(a), int(b))
    return t


def projective_measurement_trial(
    circuit: Circuit,
    rng: np.random.Generator,
    layer_override: list[list[tuple[int, int]]] | None = None,
) -> bool:
    """One randomized trial of the projective-measurement property.

    Draws a random data state, runs one extraction round, and checks that
    (i) faces whose operator is already determined on the input state yield
    the determined outcome, (ii) the joint outcome vector is attainable by
    directly measuring the face operators, and (iii) the post-round data
    state equals the direct projection onto those outcomes.
    """
    ref = random_data_tableau(circuit, rng)
    t = ref.copy()
    outcomes = run_extraction_round(t, circuit, layer_override)

    n_faces = len(circuit.code.faces)
    for i in range(n_faces):
        probe = ref.copy()
        out, deterministic = probe.measure_pauli(_face_pauli(circuit, i))
        if deterministic and outcomes[i] != out:
            return False

    forced = ref.copy()
    for i in range(n_faces):
        out, deterministic = forced.measure_pauli(_face_pauli(circuit, i), force=outcomes[i])
        if out != outcomes[i]:
            return False  # outcome vector has zero probability

    # Put every ancilla back into |0> on both paths, then compare the states.
    for f in circuit.code.faces:
        t.reset(circuit.anc_index[f])
        forced.reset(circuit.anc_index[f])
    return t.canonical_stabilizers() == forced.canonical_stabilizers()


def projective_measurement_check(
    circuit: Circuit,
    trials: int,
    rng: np.random.Generator,
    layer_override: list[list[tuple[int, int]]] | None = None,
) -> int:
    """Number of failed trials (0 for a schedule satisfying the property)."""
    return sum(
        0 if projective_measurement_trial(circuit, rng, layer_override) else 1
        for _ in range(trials)
    )


def swapped_layer_schedule(circuit: Circuit, i: int, j: int) -> list[list[tuple[int, int]]]:
    """Schedule with the i-th layer-1 CNOT and j-th layer-2 CNOT exchanged."""
    layers = [list(circuit._layer_gates[s]) for s in range(1, 5)]
    layers[0][i], layers[1][j] = layers[1][j], layers[0][i]
    return layers


def cross_face_layer_swaps(circuit: Circuit) -> list[tuple[int, int]]:
    """(i, j) pairs of layer-1/layer-2 CNOTs of different faces sharing a qubit."""
    l1, l2 = circuit._layer_gates[1], circuit._layer_gates[2]
    out = []
    for i, (c1, t1) in enumerate(l1):
        anc1 = c1 if c1 >= circuit.n_data else t1
        for j, (c2, t2) in enumerate(l2):
            anc2 = c2 if c2 >= circuit.n_data else t2
            if anc1 != anc2 and ({c1, t1} & {c2, t2}):
                out.append((i, j))
    return out


# -- invariant suite -----------------------------------------------------------


def run_invariant_suite(quick: bool = False, seed: int = 2024) -> list[tuple[str, bool, str]]:
    """Cross-module invariant checks; returns (name, passed, detail) rows."""
    import itertools

    from .adversarial import cantor_pattern, verify_greedy_failure
    from .circuit import (FaultSet, build_syndrome_circuit, sample_faults,
                          shot_rng, simulate_shot)
    from .clustering import (VALIDATED_UF, analytical_threshold, check_constraints,
                             decompose_clustered, decompose_isolated, f_k,
                             series_constant)
    from .decoders import correction_action, uf_decode
    from .detector_graph import build_detector_graph, verify_locality
    from .experiments import ExperimentConfig, run_memory
    from .lattice import build_surface_code, pauli_commutes

    rng = np.random.default_rng(seed)
    rows: list[tuple[str, bool, str]] = []

    def check(name: str, fn) -> None:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash counts as a failed invariant
            ok, detail = False, f"exception: {exc!r}"
        rows.append((name, bool(ok), detail))

    # Lattice.
    def _lattice():
        for d in (3, 5):
            code = build_surface_code(d)
            for fx in code.x_faces:
                for fz in code.z_faces:
                    sx = {q: "X" for q in fx.qubits}
                    sz = {q: "Z" for q in fz.qubits}
                    if not pauli_commutes(sx, sz):
                        return False, f"anticommuting pair at d={d}"
            for q in code.data_qubits:
                if len(code.faces_containing(q, "X")) > 2:
                    return False, "qubit in more than two X faces"
                if len(code.faces_containing(q, "Z")) > 2:
                    return False, "qubit in more than two Z faces"
        return True, "commutation and face membership for d=3,5"

    check("lattice: stabilizer group abelian", _lattice)

    def _logical_weight():
        code = build_surface_code(3)
        zmat = [frozenset(f.qubits) for f in code.z_faces]
        best = None
        for bits in itertools.product((0, 1), repeat=9):
            supp = frozenset(q for q, b in zip(code.data_qubits, bits) if b)
            if not supp:
                continue
            ok = all(len(supp & fx.qubits) % 2 == 0 for fx in code.x_faces)
            if not ok:
                continue
            is_stab = False
            for combo in itertools.product((0, 1), repeat=len(zmat)):
                acc: frozenset = frozenset()
                for c, s in zip(combo, zmat):
                    if c:
                        acc = acc ^ s
                if acc == supp:
                    is_stab = True
                    break
            if not is_stab:
                best = len(supp) if best is None else min(best, len(supp))
        return best == 3, f"min logical-Z weight at d=3 is {best}"

    if not quick:
        check("lattice: d=3 logical minimum weight 3", _logical_weight)

    # Circuit.
    code3 = build_surface_code(3)
    circ3 = build_syndrome_circuit(code3, 3)

    def _noiseless():
        out = simulate_shot(circ3, FaultSet([]))
        return (not out.z_detectors().any()) and (not out.final_data.any()), "all-zero"

    check("circuit: noiseless shot has zero Z detectors", _noiseless)

    def _responder():
        for loc in circ3.fault_locations:
            for pauli in ("X", "Y", "Z"):
                ref = simulate_shot(circ3, FaultSet([(loc.id, pauli)]))
                zd = ref.z_detectors()
                got = single_fault_flip_set(circ3, loc.id, pauli)
                want = {(int(j), int(r)) for j, r in zip(*np.nonzero(zd))}
                if got != want:
                    return False, f"mismatch at {loc.id}:{pauli}"
        return True, "exhaustive single-fault agreement at d=3"

    check("circuit: fast responder matches reference simulator", _responder)

    def _projective():
        trials = 20 if quick else 100
        circ1 = build_syndrome_circuit(code3, 1)
        fails = projective_measurement_check(circ1, trials, rng)
        return fails == 0, f"{fails}/{trials} trials failed"

    check("circuit: schedule implements projective measurement", _projective)

    def _mutated():
        circ1 = build_syndrome_circuit(code3, 1)
        swaps = cross_face_layer_swaps(circ1)
        i, j = swaps[0]
        fails = projective_measurement_check(
            circ1, 10, rng, swapped_layer_schedule(circ1, i, j)
        )
        return fails > 0, f"swap {swaps[0]} detected in {fails}/10 trials"

    check("circuit: reordered schedule is detected by the oracle", _mutated)

    # Detector graph.
    def _locality():
        for d in (3, 5):
            c = build_surface_code(d)
            circ = build_syndrome_circuit(c, d)
            g = build_detector_graph(circ, "Z")
            cert = verify_locality(g, r_max=4 if quick else 6)
            if not cert.ok:
                return False, f"certificate failed at d={d}"
        return True, "degree/length/xi/ball bounds at d=3,5"

    check("graph: locality certificate", _locality)

    g3 = build_detector_graph(circ3, "Z")

    def _syndrome_consistency():
        for t in range(50):
            fs = sample_faults(circ3, 0.03, shot_rng(seed, t))
            shot = simulate_shot(circ3, fs)
            zd = shot.z_detectors()
            want = {int(r) * len(circ3.z_faces) + int(j) for j, r in zip(*np.nonzero(zd))}
            got, _ = g3.syndrome_and_action(fs.entries)
            if set(got) != want:
                return False, f"shot {t} mismatch"
        return True, "sampled shots match accumulated responses"

    check("graph: syndrome consistency", _syndrome_consistency)

    def _metric_axioms():
        ids = rng.choice(g3.n_edges, size=min(12, g3.n_edges), replace=False)
        for a in ids:
            if g3.edge_distance(int(a), int(a)) != 0:
                return False, "identity fails"
        for a, b in itertools.combinations(ids[:8].tolist(), 2):
            if g3.edge_distance(a, b) != g3.edge_distance(b, a):
                return False, "symmetry fails"
        for a, b, c in itertools.combinations(ids[:6].tolist(), 3):
            if g3.edge_distance(a, c) > g3.edge_distance(a, b) + g3.edge_distance(b, c):
                return False, "triangle inequality fails"
        return True, "identity, symmetry, triangle"

    check("graph: line-graph metric axioms", _metric_axioms)

    # Decoders.
    def _weight1():
        for loc in circ3.fault_locations:
            for pauli in ("X", "Y", "Z"):
                flips, act = g3.response_flips[(loc.id, pauli)]
                corr, _ = uf_decode(g3, flips)
                if act ^ correction_action(g3, corr):
                    return False, f"logical flip at {loc.id}:{pauli}"
        return True, "all single faults corrected at d=3"

    check("decoders: UF weight-1 guarantee at d=3", _weight1)

    def _merge_parity():
        code5 = build_surface_code(5)
        circ5 = build_syndrome_circuit(code5, 5)
        g5 = build_detector_graph(circ5, "Z")
        for t in range(20 if quick else 60):
            fs = sample_faults(circ5, 5e-3, shot_rng(seed + 1, t))
            syn, _ = g5.syndrome_and_action(fs.entries)
            corr, trace = uf_decode(g5, syn, with_trace=True)
            seen_valid: set[int] = set()
            prev = {}
            for rec in trace.rounds:
                par = {}
                for snap in rec["clusters"]:
                    par[snap.root] = snap.parity
                    if snap.valid:
                        seen_valid.add(snap.root)
                for ra, rb, new in rec["merges"]:
                    if ra in prev and rb in prev:
                        want = (prev[ra] + prev[rb]) % 2
                        if new in par and par[new] != want:
                            return False, "merged parity is not the XOR"
                prev = par
        return True, "parity additivity over sampled merges"

    check("decoders: merge parity additivity", _merge_parity)

    # Clustering.
    def _analytics():
        rep = analytical_threshold(1.0, 48 * math.sqrt(3) * math.pi, 3, VALIDATED_UF)
        if not rep.constraints_ok:
            return False, "validated constraints fail"
        if not (1.25e-26 <= rep.p_th <= 5e-26):
            return False, f"p_th {rep.p_th} outside factor-2 band"
        if abs(series_constant("uf") - 3.57257) > 1e-4:
            return False, "series constant off"
        kmax = 12 if quick else 50
        if any(float(f_k(VALIDATED_UF, k)) < 0.5 for k in range(1, kmax + 1)):
            return False, "f_k floor violated"
        return True, "threshold, series constant, f_k floor"

    check("clustering: validated analytics", _analytics)

    def _nesting():
        from .clustering import ScaleSchedule
        small = ScaleSchedule("greedy", 0.5, 1.5, 2.0)
        for t in range(10):
            n_edges = rng.choice(g3.n_edges, size=6, replace=False)
            dc = decompose_clustered(g3, n_edges, small)
            di = decompose_isolated(g3, n_edges, small)
            for k in range(max(dc.max_level, di.max_level) + 1):
                if not dc.N(k + 1) <= dc.N(k):
                    return False, "clustered sets not nested"
                if not di.N(k + 1) <= di.N(k):
                    return False, "isolated sets not nested"
                if not dc.N(k) <= di.N(k):
                    return False, "clustered set escapes isolated set"
        return True, "nesting and containment on random sets"

    check("clustering: hierarchy nesting", _nesting)

    # Adversarial.
    def _cantor():
        code5 = build_surface_code(5)
        circ5 = build_syndrome_circuit(code5, 3)
        g5 = build_detector_graph(circ5, "Z")
        pat = cantor_pattern(g5, code5)
        rep = verify_greedy_failure(g5, code5, pat)
        return rep.logical_failure and rep.pairs_are_complement, (
            f"d=5 weight {pat.weight}"
        )

    check("adversarial: greedy fails on the d=5 pattern", _cantor)

    # Experiments.
    def _deterministic():
        cfg = ExperimentConfig(d_list=[3], p_list=[2e-3], shots=2000, seed=11)
        a = run_memory(cfg)
        b = run_memory(cfg)
        same = [(r.failures, r.p_l) for r in a] == [(r.failures, r.p_l) for r in b]
        return same, "identical reruns"

    check("experiments: seeded determinism", _deterministic)

    def _p_zero():
        cfg = ExperimentConfig(d_list=[3], p_list=[0.0], shots=200, seed=3)
        row = run_memory(cfg)[0]
        return row.failures == 0, "no failures at p=0"

    check("experiments: p=0 yields zero failures", _p_zero)

    return rows


def single_fault_flip_set(circuit: Circuit, loc_id: int, pauli: str) -> set[tuple[int, int]]:
    from .circuit import single_fault_response

    return set(single_fault_response(circuit, loc_id, pauli).z_flips)
