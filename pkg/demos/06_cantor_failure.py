"""The adversarial chain that defeats the greedy decoder sublinearly."""

from decoderlab import (build_detector_graph, build_surface_code,
                        build_syndrome_circuit, cantor_decompose,
                        cantor_pattern, verify_greedy_failure, weight_bound)

d = 23
print(f"chain of length {d} split recursively (keep sides, drop middles):")
segments = cantor_decompose(d)
line = ["." for _ in range(d)]
for start, length in segments:
    for x in range(start, start + length):
        line[x] = "#"
print("  " + "".join(line), f"  -> {len(segments)} segments, "
      f"N = {sum(l for _, l in segments)} errors (bound {weight_bound(d):.1f})")

code = build_surface_code(d)
graph = build_detector_graph(build_syndrome_circuit(code, rounds=3), "Z")
pattern = cantor_pattern(graph, code)
report = verify_greedy_failure(graph, code, pattern)
print(f"\ngreedy decoder on the realized pattern: logical failure = "
      f"{report.logical_failure}")
print(f"matched pairs bridge the removed middles: {report.pairs_are_complement}")
print("matched pairs:", report.correction.pairs)
print(f"\nweight N = {pattern.weight} grows like d^0.63, so the greedy "
      "decoder's effective distance is sublinear.")
