"""Monte Carlo memory experiments, sweeps, and the parallel-runtime model.

A memory shot prepares logical |0>, runs `rounds` extraction rounds under
independent stochastic Pauli noise, decodes the Z-detector graph, and checks
whether the corrected logical-Z readout flipped.  Shots use counter-based
per-shot random streams keyed by (seed, shot index), so results are
identical for any worker count or scheduling order; aggregation is purely
commutative sums.

The simulated parallel decoding time of a shot follows the
processor-per-active-detector abstraction: each final cluster costs the
number of global growth rounds it participated in plus the size of its
peeling forest, and the shot's parallel time is the maximum over clusters.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .circuit import Circuit, build_syndrome_circuit, sample_faults, shot_rng
from .decoders import correction_action, greedy_decode, uf_decode
from .detector_graph import DetectorGraph, build_detector_graph
from .lattice import SurfaceCode, build_surface_code

WORKERS_ENV = "DECODERLAB_WORKERS"


@dataclass
class ExperimentConfig:
    d_list: list[int]
    p_list: list[float]
    shots: int
    seed: int = 0
    rounds: int | None = None  # None: rounds = d
    decoder: str = "uf"  # "uf" | "greedy"
    trace_rate: float = 1e-3
    collect_parallel_time: bool = False
    workers: int | None = None  # None: DECODERLAB_WORKERS or 1

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        for p in self.p_list:
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"probability {p} outside [0, 1]")
        if self.decoder not in ("uf", "greedy"):
            raise ValueError(f"unknown decoder {self.decoder!r}")

    def effective_workers(self) -> int:
        if self.workers is not None:
            return max(1, self.workers)
        env = os.environ.get(WORKERS_ENV)
        return max(1, int(env)) if env else 1


@dataclass
class SweepRow:
    d: int
    p: float
    shots: int
    failures: int
    p_l: float
    ci_lo: float
    ci_hi: float
    mean_rounds: float
    wall_ms: int | None = None
    mean_parallel_time: float | None = None


@dataclass
class ParallelRuntimeRecord:
    """Per-shot parallel cost: growth rounds and peeling passes per cluster.

    `cluster_peel_work` is the peeling edge count (sequential work proxy);
    `cluster_peel_depth` is the number of parallel leaf-removal sweeps.  The
    simulated parallel time charges each cluster its growth rounds plus its
    parallel peeling sweeps and takes the maximum over clusters, matching a
    processor-per-detector execution; both peel components are reported.
    """

    d: int
    p: float
    shot: int
    cluster_rounds: list[int]
    cluster_peel_work: list[int]
    cluster_peel_depth: list[int]

    @property
    def parallel_time(self) -> int:
        if not self.cluster_rounds:
            return 0
        return max(r + w for r, w in zip(self.cluster_rounds, self.cluster_peel_depth))


def wilson_interval(failures: int, shots: int, z: float = 1.959964) -> tuple[float, float]:
    """95% Wilson score interval; well-behaved at zero failures."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    phat = failures / shots
    z2 = z * z
    denom = 1 + z2 / shots
    center = (phat + z2 / (2 * shots)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / shots + z2 / (4 * shots * shots))
    lo = 0.0 if failures == 0 else max(0.0, center - half)
    hi = 1.0 if failures == shots else min(1.0, center + half)
    return (lo, hi)


# Per-process cache so forked workers build each graph once.
_graph_cache: dict[tuple[int, int], tuple[SurfaceCode, Circuit, DetectorGraph]] = {}


def memory_setup(d: int, rounds: int | None = None) -> tuple[SurfaceCode, Circuit, DetectorGraph]:
    r = d if rounds is None else rounds
    key = (d, r)
    if key not in _graph_cache:
        code = build_surface_code(d)
        circ = build_syndrome_circuit(code, r)
        _graph_cache[key] = (code, circ, build_detector_graph(circ, "Z"))
    return _graph_cache[key]


def decode_shot(
    g: DetectorGraph, p: float, seed: int, shot: int, decoder: str = "uf"
) -> tuple[int, int, int]:
    """One shot: returns (failure, growth_rounds, parallel_time)."""
    faults = sample_faults(g.circuit, p, shot_rng(seed, shot))
    syndrome, true_action = g.syndrome_and_action(faults.entries)
    if decoder == "uf":
        corr, trace = uf_decode(g, syndrome)
        ptime = 0
        for root, grew in trace.grew_rounds.items():
            ptime = max(ptime, len(grew) + trace.peel_depth.get(root, 0))
        rounds = trace.growth_rounds
    else:
        corr = greedy_decode(g, syndrome)
        rounds = 0
        ptime = 0
    failure = true_action ^ correction_action(g, corr)
    return failure, rounds, ptime


def _run_block(args) -> tuple[int, int, int]:
    d, rounds, p, seed, lo, hi, decoder = args
    _, _, g = memory_setup(d, rounds)
    failures = 0
    total_rounds = 0
    total_ptime = 0
    for shot in range(lo, hi):
        f, r, pt = decode_shot(g, p, seed, shot, decoder)
        failures += f
        total_rounds += r
        total_ptime += pt
    return failures, total_rounds, total_ptime


def run_memory(cfg: ExperimentConfig) -> list[SweepRow]:
    """Run the memory experiment for every (d, p) cell of the config."""
    rows: list[SweepRow] = []
    workers = cfg.effective_workers()
    for d in cfg.d_list:
        rounds = cfg.rounds if cfg.rounds is not None else d
        memory_setup(d, rounds)
        for p in cfg.p_list:
            t0 = time.monotonic()
            blocks = _shot_blocks(cfg.shots, workers)
            args = [
                (d, rounds, p, cfg.seed, lo, hi, cfg.decoder) for lo, hi in blocks
            ]
            if workers == 1 or len(blocks) == 1:
                results = [_run_block(a) for a in args]
            else:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(_run_block, args))
            failures = sum(r[0] for r in results)
            total_rounds = sum(r[1] for r in results)
            total_ptime = sum(r[2] for r in results)
            lo_ci, hi_ci = wilson_interval(failures, cfg.shots)
            rows.append(
                SweepRow(
                    d=d,
                    p=p,
                    shots=cfg.shots,
                    failures=failures,
                    p_l=failures / cfg.shots,
                    ci_lo=lo_ci,
                    ci_hi=hi_ci,
                    mean_rounds=total_rounds / cfg.shots,
                    wall_ms=int((time.monotonic() - t0) * 1000),
                    mean_parallel_time=(
                        total_ptime / cfg.shots if cfg.collect_parallel_time else None
                    ),
                )
            )
    return rows


def _shot_blocks(shots: int, workers: int) -> list[tuple[int, int]]:
    if workers == 1:
        return [(0, shots)]
    per = max(1000, math.ceil(shots / (workers * 8)))
    return [(lo, min(lo + per, shots)) for lo in range(0, shots, per)]


def parallel_uf_time(g: DetectorGraph, syndrome, d: int = 0, p: float = 0.0,
                     shot: int = 0) -> ParallelRuntimeRecord:
    """Replay UF growth and report the per-cluster parallel cost model."""
    _, trace = uf_decode(g, syndrome)
    roots = sorted(trace.grew_rounds)
    return ParallelRuntimeRecord(
        d=d,
        p=p,
        shot=shot,
        cluster_rounds=[len(trace.grew_rounds[r]) for r in roots],
        cluster_peel_work=[trace.peel_work.get(r, 0) for r in roots],
        cluster_peel_depth=[trace.peel_depth.get(r, 0) for r in roots],
    )


CSV_HEADER = "d,p,shots,failures,p_l,ci_lo,ci_hi,mean_rounds,wall_ms"


def rows_to_csv(rows: list[SweepRow], with_timing: bool = False) -> str:
    """Render sweep rows; timing is opt-in so default output is reproducible."""
    out = [CSV_HEADER]
    for r in rows:
        wall = str(r.wall_ms) if (with_timing and r.wall_ms is not None) else ""
        out.append(
            f"{r.d},{r.p!r},{r.shots},{r.failures},{r.p_l!r},"
            f"{r.ci_lo!r},{r.ci_hi!r},{r.mean_rounds!r},{wall}"
        )
    return "\n".join(out) + "\n"


def sweep(cfg: ExperimentConfig, with_timing: bool = False) -> str:
    return rows_to_csv(run_memory(cfg), with_timing=with_timing)
