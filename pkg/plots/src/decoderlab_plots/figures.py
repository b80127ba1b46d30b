"""Figure builders for the simulator's CSV/JSON file formats."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# Deterministic SVG ids and no embedded creation date.
matplotlib.rcParams["svg.hashsalt"] = "decoderlab-plots"

_SWEEP_COLUMNS = ["d", "p", "shots", "failures", "p_l", "ci_lo", "ci_hi"]
_RUNTIME_COLUMNS = ["d", "p", "shots", "mean_parallel_time"]


class SchemaError(ValueError):
    """Input file does not match the expected decoderlab schema."""


def _read_csv(path: str | Path, required: list[str]) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, nothing to plot")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _save(fig, out: str | Path) -> None:
    out = Path(out)
    kind = out.suffix.lstrip(".").lower()
    if kind not in ("png", "svg"):
        raise SchemaError(f"unsupported output format {out.suffix!r}; use .png or .svg")
    fig.savefig(out, format=kind, metadata={"Date": None} if kind == "svg" else None)
    plt.close(fig)


def plot_threshold(csv_path: str | Path, out_path: str | Path) -> None:
    """Logical error rate versus physical rate, one curve per distance."""
    rows = _read_csv(csv_path, _SWEEP_COLUMNS)
    by_d: dict[int, list[tuple[float, float, float, float]]] = {}
    for row in rows:
        try:
            d = int(row["d"])
            by_d.setdefault(d, []).append(
                (float(row["p"]), float(row["p_l"]),
                 float(row["ci_lo"]), float(row["ci_hi"]))
            )
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{csv_path}: malformed row {row}: {exc}") from exc

    fig, ax = plt.subplots(figsize=(5.2, 3.8), dpi=150)
    for d in sorted(by_d):
        pts = sorted(by_d[d])
        ps = [p for p, *_ in pts]
        pl = [v for _, v, *_ in pts]
        lo = [v for *_, v, _ in pts]
        hi = [v for *_, v in pts]
        (line,) = ax.plot(ps, pl, marker="o", markersize=3.5, label=f"d = {d}")
        ax.fill_between(ps, lo, hi, alpha=0.2, color=line.get_color(), linewidth=0)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("physical error rate p")
    ax.set_ylabel("logical error rate")
    ax.grid(True, which="both", ls=":", lw=0.5)
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, out_path)


def plot_runtime(csv_path: str | Path, out_path: str | Path) -> None:
    """Mean simulated parallel decoding time versus distance, log axes."""
    rows = _read_csv(csv_path, _RUNTIME_COLUMNS)
    pts = []
    for row in rows:
        try:
            pts.append((int(row["d"]), float(row["mean_parallel_time"])))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{csv_path}: malformed row {row}: {exc}") from exc
    pts.sort()

    fig, ax = plt.subplots(figsize=(5.2, 3.8), dpi=150)
    ax.plot([d for d, _ in pts], [t for _, t in pts], marker="s", markersize=4)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("code distance d")
    ax.set_ylabel("mean parallel decoding time")
    ax.grid(True, which="both", ls=":", lw=0.5)
    fig.tight_layout()
    _save(fig, out_path)


def plot_cantor(json_path: str | Path, out_path: str | Path) -> None:
    """Bar diagram of the adversarial chain: kept error segments and gaps."""
    try:
        payload = json.loads(Path(json_path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{json_path}: not valid JSON: {exc}") from exc
    for key in ("d", "segments", "weight"):
        if key not in payload:
            raise SchemaError(f"{json_path}: missing key {key!r}")
    d = int(payload["d"])
    segments = [(int(s), int(ln)) for s, ln in payload["segments"]]
    if sum(ln for _, ln in segments) != int(payload["weight"]):
        raise SchemaError(f"{json_path}: segment lengths do not sum to the weight")

    fig, ax = plt.subplots(figsize=(6.0, 1.9), dpi=150)
    ax.broken_barh([(0, d)], (0.1, 0.8), facecolors="0.92", edgecolor="0.6",
                   linewidth=0.8)
    ax.broken_barh([(s, ln) for s, ln in segments], (0.1, 0.8),
                   facecolors="crimson", edgecolor="none")
    ax.set_xlim(-0.5, d + 0.5)
    ax.set_ylim(0, 1.4)
    ax.set_yticks([])
    ax.set_xlabel("position along the boundary-to-boundary chain")
    ax.set_title(
        f"d = {d}: {len(segments)} error segments, weight {payload['weight']}",
        fontsize=10,
    )
    fig.tight_layout()
    _save(fig, out_path)
