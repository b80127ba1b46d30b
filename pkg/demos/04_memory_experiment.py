"""Small logical-memory sweep: error suppression with growing distance."""

from decoderlab import ExperimentConfig, rows_to_csv, run_memory

cfg = ExperimentConfig(
    d_list=[3, 5, 7],
    p_list=[1e-3, 2e-3],
    shots=20_000,
    seed=42,
)
rows = run_memory(cfg)
print(rows_to_csv(rows))
for row in rows:
    print(f"d={row.d} p={row.p}: p_L = {row.p_l:.2e} "
          f"[{row.ci_lo:.2e}, {row.ci_hi:.2e}] ({row.failures}/{row.shots})")
print("\nBelow threshold the logical rate drops with distance at fixed p.")
