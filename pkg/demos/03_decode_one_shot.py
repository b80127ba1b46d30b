"""Sample one noisy shot and watch the union-find decoder work."""

from decoderlab import (correction_action, greedy_decode, memory_setup,
                        sample_faults, shot_rng, uf_decode)

code, circuit, graph = memory_setup(5)
faults = sample_faults(circuit, p=6e-3, rng=shot_rng(seed=11, shot=4))
print(f"sampled {len(faults.entries)} fault entries:")
for loc_id, pauli in faults.entries:
    loc = circuit.fault_locations[loc_id]
    print(f"  {pauli} on qubit {circuit.qubit_coord[loc.qubit]} "
          f"({loc.slot}, round {loc.round})")

syndrome, true_action = graph.syndrome_and_action(faults.entries)
print(f"\nactive detectors: {list(syndrome)}  true logical flip: {bool(true_action)}")

correction, trace = uf_decode(graph, syndrome, with_trace=True)
print(f"union-find: {trace.growth_rounds} growth rounds, "
      f"correction edges {sorted(correction.edges)}, pairs {correction.pairs}")
flip = true_action ^ correction_action(graph, correction)
print("decoded logical flip:", bool(flip), "(False = success)")

greedy = greedy_decode(graph, syndrome)
gflip = true_action ^ correction_action(graph, greedy)
print(f"greedy: pairs {greedy.pairs}, logical flip {bool(gflip)}")
