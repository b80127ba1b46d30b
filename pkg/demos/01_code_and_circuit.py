"""Build a small rotated surface code and inspect its extraction circuit."""

from decoderlab import FaultSet, build_surface_code, build_syndrome_circuit, simulate_shot

code = build_surface_code(3)
print(f"distance-3 code: {code.n} data qubits, {len(code.faces)} stabilizer faces")
for f in code.faces:
    qubits = sorted((x2 // 2, y2 // 2) for x2, y2 in f.qubits)
    print(f"  {f.kind} {f.region:6s} ancilla at {f.meas_coord}: {qubits}")

circuit = build_syndrome_circuit(code, rounds=3)
print(f"\ncircuit: {len(circuit.ops)} ops, {len(circuit.fault_locations)} fault locations")
first_round = [op for op in circuit.ops if op.round == 0]
for step in range(6):
    ops = [op for op in first_round if op.step == step]
    kinds = sorted({op.kind for op in ops})
    print(f"  step {step}: {len(ops):2d} ops {kinds}")

shot = simulate_shot(circuit, FaultSet([]))
print("\nnoiseless shot: all Z detectors zero?", not shot.z_detectors().any())
print(circuit.to_text().splitlines()[0], "  <- first line of the text export")
