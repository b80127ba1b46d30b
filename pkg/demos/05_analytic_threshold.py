"""The closed-form threshold machinery: schedules, constraints, bounds."""

import math

from decoderlab import (VALIDATED_UF, analytical_threshold, f_k,
                        p_k_bound_log10, series_constant)

BALL_COEFF = 48 * math.sqrt(3) * math.pi

print("validated union-find schedule: beta=1.2 gamma=2.8 lambda=107")
for k in (1, 2, 3, 4):
    print(f"  k={k}: d_k = {float(VALIDATED_UF.d(k)):.4g}, "
          f"b_k = {float(VALIDATED_UF.b(k)):.4g}, f_k = {float(f_k(VALIDATED_UF, k)):.6f}")

print(f"\nseries constant c = {series_constant('uf'):.6f} (greedy family: 3)")

report = analytical_threshold(xi=1.0, ball_coeff=BALL_COEFF, ball_power=3,
                              schedule=VALIDATED_UF)
print("constraints:")
for name, ok in report.constraints:
    print(f"  [{'ok' if ok else 'FAIL'}] {name}")
print(f"p_th = {report.p_th:.3e}   (xi=10 scales it to {report.p_th / 10:.3e})")
print(f"k0(d=7) = {report.k0(7)},  kbar(d=7, p=p_th/10) = {report.kbar(7, report.p_th / 10)}")

print("\nlevel-k cluster probability bounds, log10 p_k:")
for p_label, p in (("p_th", report.p_th), ("p_th/10", report.p_th / 10)):
    vals = [p_k_bound_log10(k, p, 1.0, BALL_COEFF, 3, VALIDATED_UF) for k in (1, 2, 4, 8)]
    print(f"  p = {p_label}: " + ", ".join(f"k={k}: {v:.1f}" for k, v in zip((1, 2, 4, 8), vals)))
print("the bound falls doubly exponentially in k once p < p_th")
