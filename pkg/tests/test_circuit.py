import numpy as np
import pytest

from decoderlab import (FaultSet, build_surface_code, build_syndrome_circuit,
                        circuit_from_text, sample_faults, shot_rng,
                        simulate_shot, single_fault_response)
from decoderlab.circuit import MEASURE_STEP, RESET_STEP


def test_schedule_structure(circuit3):
    # One reset and one measurement per face per round; four CNOT layers.
    per_round = [op for op in circuit3.ops if op.round == 0]
    resets = [op for op in per_round if op.step == RESET_STEP]
    meas = [op for op in per_round if op.step == MEASURE_STEP]
    assert len(resets) == len(meas) == 8
    for s in range(1, 5):
        gates = [op for op in per_round if op.step == s]
        used = set()
        for op in gates:
            assert not (set(op.qubits) & used)
            used.update(op.qubits)


def test_layer_participation_sets(circuit3):
    """Boundary faces join exactly the layers of their side."""
    code = circuit3.code
    by_anc = {}
    for op in circuit3.ops:
        if op.kind == "CNOT" and op.round == 0:
            anc = op.qubits[0] if op.qubits[0] >= circuit3.n_data else op.qubits[1]
            by_anc.setdefault(anc, []).append(op.step)
    for f in code.faces:
        layers = sorted(by_anc[circuit3.anc_index[f]])
        if f.region == "bulk":
            assert layers == [1, 2, 3, 4]
        elif f.kind == "X":
            side_hi = f.meas_coord[0] > 0
            assert layers == ([1, 2] if side_hi else [3, 4])
        else:
            side_lo = f.meas_coord[1] < 0
            assert layers == ([1, 2] if side_lo else [3, 4])


def test_noiseless_shot_all_zero(circuit3):
    out = simulate_shot(circuit3, FaultSet([]))
    assert not out.z_detectors().any()
    assert not out.x_detectors().any()
    assert not out.final_data.any()


def test_detector_recurrence_definition(circuit3):
    fs = sample_faults(circuit3, 0.05, shot_rng(1, 1))
    out = simulate_shot(circuit3, fs)
    det = out.z_detectors()
    m = out.z_meas
    assert (det[:, 0] == m[:, 0]).all()
    for i in range(1, circuit3.rounds):
        assert (det[:, i] == (m[:, i - 1] ^ m[:, i])).all()


def test_single_data_fault_flips_adjacent_pair(circuit3, code3):
    """Geometry oracle: a between-rounds X on a bulk data qubit flips exactly
    the detectors of its adjacent Z faces, in that round."""
    q = (2, 2)  # center qubit
    adjacent = [
        j for j, f in enumerate(circuit3.z_faces) if q in f.qubits
    ]
    qi = circuit3.data_index[q]
    loc = circuit3.loc_by_point[(1, RESET_STEP, qi)]
    out = simulate_shot(circuit3, FaultSet([(loc, "X")]))
    flipped = {(int(j), int(r)) for j, r in zip(*np.nonzero(out.z_detectors()))}
    assert flipped == {(j, 1) for j in adjacent}
    assert len(flipped) == 2


def test_measurement_flip_fault_makes_time_pair(circuit3):
    f = circuit3.z_faces[0]
    anc = circuit3.anc_index[f]
    loc = circuit3.loc_by_point[(1, MEASURE_STEP, anc)]
    out = simulate_shot(circuit3, FaultSet([(loc, "X")]))
    flipped = {(int(j), int(r)) for j, r in zip(*np.nonzero(out.z_detectors()))}
    assert flipped == {(0, 1), (0, 2)}


@pytest.mark.parametrize("d,rounds", [(3, 3), (5, 5)])
def test_responder_matches_reference_exhaustively(d, rounds):
    code = build_surface_code(d)
    circ = build_syndrome_circuit(code, rounds)
    for loc in circ.fault_locations:
        for pauli in ("X", "Y", "Z"):
            ref = simulate_shot(circ, FaultSet([(loc.id, pauli)]))
            zd, xd = ref.z_detectors(), ref.x_detectors()
            resp = single_fault_response(circ, loc.id, pauli)
            assert set(resp.z_flips) == {
                (int(j), int(r)) for j, r in zip(*np.nonzero(zd))
            }
            assert set(resp.x_flips) == {
                (int(j), int(r)) for j, r in zip(*np.nonzero(xd))
            }
            assert resp.z_action == int(
                ref.final_data[circ.logical_z_idx].sum() % 2
            )
            assert resp.x_action == int(
                ref.final_data_x[circ.logical_x_idx].sum() % 2
            )


def test_every_single_fault_flips_at_most_two_per_type(circuit5):
    for loc in circuit5.fault_locations:
        for pauli in ("X", "Y", "Z"):
            resp = single_fault_response(circuit5, loc.id, pauli)
            assert 0 <= len(resp.z_flips) <= 2
            assert 0 <= len(resp.x_flips) <= 2


def test_multi_fault_linearity(circuit5):
    """A shot's flips are the XOR of its single-fault responses."""
    for trial in range(25):
        fs = sample_faults(circuit5, 0.02, shot_rng(3, trial))
        ref = simulate_shot(circuit5, fs)
        zacc = np.zeros_like(ref.z_detectors())
        xacc = np.zeros_like(ref.x_detectors())
        for loc, pauli in fs.entries:
            resp = single_fault_response(circuit5, loc, pauli)
            for j, r in resp.z_flips:
                zacc[j, r] ^= 1
            for j, r in resp.x_flips:
                xacc[j, r] ^= 1
        assert (zacc == ref.z_detectors()).all()
        assert (xacc == ref.x_detectors()).all()


def test_sampling_edge_cases(circuit3):
    assert sample_faults(circuit3, 0.0, shot_rng(0, 0)).entries == []
    full = sample_faults(circuit3, 1.0, shot_rng(0, 0))
    hit_elements = set()
    loc_to_element = {}
    for i, el in enumerate(circuit3.elements):
        for loc in el:
            loc_to_element[loc] = i
    for loc, _ in full.entries:
        hit_elements.add(loc_to_element[loc])
    # Every element afflicted (two-qubit hits may emit one entry, but the
    # element itself must be covered).
    assert hit_elements == set(range(len(circuit3.elements)))
    with pytest.raises(ValueError):
        sample_faults(circuit3, 1.5, shot_rng(0, 0))


def test_sampling_concentration(circuit5):
    """Afflicted fraction within 5 sigma over a large location batch."""
    p = 0.01
    n = len(circuit5.elements)
    total = 0
    draws = max(1, 10**6 // n)
    for shot in range(draws):
        hit = set()
        for loc, _ in sample_faults(circuit5, p, shot_rng(99, shot)).entries:
            hit.add(loc)
        # Count elements, not entries: two-qubit Paulis emit up to 2 entries.
        elements_hit = set()
        for i, el in enumerate(circuit5.elements):
            if any(l in hit for l in el):
                elements_hit.add(i)
        total += len(elements_hit)
    trials = draws * n
    sigma = (trials * p * (1 - p)) ** 0.5
    assert abs(total - trials * p) <= 5 * sigma


def test_determinism_bit_for_bit(circuit3):
    a = sample_faults(circuit3, 0.05, shot_rng(7, 123)).entries
    b = sample_faults(circuit3, 0.05, shot_rng(7, 123)).entries
    assert a == b
    out1 = simulate_shot(circuit3, FaultSet(a))
    out2 = simulate_shot(circuit3, FaultSet(a))
    assert (out1.z_meas == out2.z_meas).all()
    assert (out1.final_data == out2.final_data).all()


def test_text_round_trip(circuit3, code3):
    text = circuit3.to_text()
    rebuilt = circuit_from_text(text, code3)
    assert rebuilt.ops == circuit3.ops
    assert rebuilt.to_text() == text
    fs = sample_faults(circuit3, 0.05, shot_rng(2, 2))
    assert FaultSet.from_text(fs.to_text()).entries == fs.entries
