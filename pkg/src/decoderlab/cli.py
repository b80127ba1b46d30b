"""Command-line interface.

Subcommands: build-code, build-graph, memory, sweep, threshold,
cluster-analyze, cantor, parallel-runtime, verify.  Every subcommand is
deterministic under --seed; CSV and JSON go to --out or stdout.  Exit codes:
0 success, 1 usage error, 2 invariant failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

USAGE_EXIT = 1
INVARIANT_EXIT = 2

DEFAULT_BALL_COEFF = 48 * math.sqrt(3) * math.pi
DEFAULT_BALL_POWER = 3.0


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse default exits 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> _Parser:
    p = _Parser(prog="decoderlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, **kw) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--out", help="write output to this path instead of stdout")
        return sp

    sp = add("build-code", help="export the surface-code geometry as JSON")
    sp.add_argument("--d", type=int, required=True)

    sp = add("build-graph", help="export a detector graph as JSON")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--rounds", type=int, default=None)
    sp.add_argument("--type", choices=("Z", "X"), default="Z")
    sp.add_argument("--p", type=float, default=1e-3,
                    help="rate used for the per-edge probability bounds")

    sp = add("memory", help="logical memory experiment at one or more (d, p)")
    sp.add_argument("--d", type=_int_list, required=True)
    sp.add_argument("--p", type=_float_list, required=True)
    sp.add_argument("--shots", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rounds", type=int, default=None)
    sp.add_argument("--decoder", choices=("uf", "greedy"), default="uf")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--timing", action="store_true",
                    help="fill the wall_ms column (breaks byte-reproducibility)")

    sp = add("sweep", help="alias of memory for d x p grids")
    sp.add_argument("--d", type=_int_list, required=True)
    sp.add_argument("--p", type=_float_list, required=True)
    sp.add_argument("--shots", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rounds", type=int, default=None)
    sp.add_argument("--decoder", choices=("uf", "greedy"), default="uf")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--timing", action="store_true")

    sp = add("threshold", help="closed-form threshold for a scale schedule")
    sp.add_argument("--family", choices=("uf", "greedy"), default="uf")
    sp.add_argument("--beta", type=float, default=1.2)
    sp.add_argument("--gamma", type=float, default=2.8)
    sp.add_argument("--lambda", dest="lam", type=float, default=107.0)
    sp.add_argument("--xi", type=float, default=1.0)
    sp.add_argument("--ball-coeff", type=float, default=DEFAULT_BALL_COEFF)
    sp.add_argument("--ball-power", type=float, default=DEFAULT_BALL_POWER)
    sp.add_argument("--d", type=int, default=None, help="also report k0(d)")
    sp.add_argument("--p", type=float, default=None, help="also report kbar(d, p)")

    sp = add("cluster-analyze", help="decompose sampled error sets and check the stopping guarantee")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--shots", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--rounds", type=int, default=None)
    sp.add_argument("--family", choices=("uf", "greedy"), default="uf")
    sp.add_argument("--beta", type=float, default=1.2)
    sp.add_argument("--gamma", type=float, default=2.8)
    sp.add_argument("--lambda", dest="lam", type=float, default=107.0)

    sp = add("cantor", help="adversarial chain that defeats the greedy decoder")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--rounds", type=int, default=3)

    sp = add("parallel-runtime", help="simulated parallel decoding time per distance")
    sp.add_argument("--d", type=_int_list, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--shots", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=None)

    sp = add("verify", help="run the module-invariant suite")
    sp.add_argument("--quick", action="store_true")
    sp.add_argument("--seed", type=int, default=2024)

    return p


def cli_dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        return _run(args)
    except (ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT


def _run(args: argparse.Namespace) -> int:
    if args.command == "build-code":
        from .lattice import build_surface_code

        _emit(build_surface_code(args.d).to_json() + "\n", args.out)
        return 0

    if args.command == "build-graph":
        from .circuit import build_syndrome_circuit
        from .detector_graph import build_detector_graph
        from .lattice import build_surface_code

        code = build_surface_code(args.d)
        rounds = args.rounds if args.rounds is not None else args.d
        g = build_detector_graph(build_syndrome_circuit(code, rounds), args.type)
        _emit(g.to_json(args.p) + "\n", args.out)
        return 0

    if args.command in ("memory", "sweep"):
        from .experiments import ExperimentConfig, rows_to_csv, run_memory

        cfg = ExperimentConfig(
            d_list=args.d,
            p_list=args.p,
            shots=args.shots,
            seed=args.seed,
            rounds=args.rounds,
            decoder=args.decoder,
            workers=args.workers,
        )
        _emit(rows_to_csv(run_memory(cfg), with_timing=args.timing), args.out)
        return 0

    if args.command == "threshold":
        from .clustering import ScaleSchedule, analytical_threshold

        schedule = ScaleSchedule(args.family, args.beta, args.gamma, args.lam)
        rep = analytical_threshold(args.xi, args.ball_coeff, args.ball_power, schedule)
        payload = rep.to_dict()
        if args.d is not None:
            payload["k0"] = rep.k0(args.d)
            if args.p is not None:
                payload["kbar"] = rep.kbar(args.d, args.p)
        text = json.dumps(payload, indent=2, sort_keys=True)
        _emit(text + f"\np_th = {rep.p_th:.6e}\n", args.out)
        return 0 if rep.constraints_ok else INVARIANT_EXIT

    if args.command == "cluster-analyze":
        return _cluster_analyze(args)

    if args.command == "cantor":
        from .adversarial import cantor_pattern, verify_greedy_failure
        from .circuit import build_syndrome_circuit
        from .detector_graph import build_detector_graph
        from .lattice import build_surface_code

        code = build_surface_code(args.d)
        g = build_detector_graph(build_syndrome_circuit(code, args.rounds), "Z")
        pattern = cantor_pattern(g, code)
        report = verify_greedy_failure(g, code, pattern)
        payload = json.loads(pattern.to_json())
        payload["greedy_logical_failure"] = report.logical_failure
        payload["pairs_are_complement"] = report.pairs_are_complement
        payload["uf_logical_failure"] = report.uf_logical_failure
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
        return 0

    if args.command == "parallel-runtime":
        from .circuit import sample_faults, shot_rng
        from .experiments import decode_shot, memory_setup

        lines = ["d,p,shots,mean_parallel_time,mean_growth_rounds"]
        for d in args.d:
            _, _, g = memory_setup(d)
            tot_pt = 0
            tot_r = 0
            for shot in range(args.shots):
                _, rounds, pt = decode_shot(g, args.p, args.seed, shot)
                tot_pt += pt
                tot_r += rounds
            lines.append(
                f"{d},{args.p!r},{args.shots},"
                f"{tot_pt / args.shots!r},{tot_r / args.shots!r}"
            )
        _emit("\n".join(lines) + "\n", args.out)
        return 0

    if args.command == "verify":
        from .verify import run_invariant_suite

        rows = run_invariant_suite(quick=args.quick, seed=args.seed)
        width = max(len(name) for name, _, _ in rows)
        failed = 0
        out_lines = []
        for name, ok, detail in rows:
            mark = "pass" if ok else "FAIL"
            failed += 0 if ok else 1
            out_lines.append(f"[{mark}] {name:<{width}}  {detail}")
        out_lines.append(f"{len(rows) - failed}/{len(rows)} invariants hold")
        _emit("\n".join(out_lines) + "\n", args.out)
        return 0 if failed == 0 else INVARIANT_EXIT

    raise ValueError(f"unknown command {args.command!r}")


def _cluster_analyze(args: argparse.Namespace) -> int:
    from .circuit import sample_faults, shot_rng
    from .clustering import (ScaleSchedule, decompose_clustered,
                             verify_stopping_guarantee)
    from .decoders import uf_decode
    from .experiments import memory_setup

    schedule = ScaleSchedule(args.family, args.beta, args.gamma, args.lam)
    _, circ, g = memory_setup(args.d, args.rounds)
    shots = args.shots
    total_violations = 0
    level_counts: dict[int, int] = {}
    max_margin = 0.0
    undecomposed = 0
    for shot in range(shots):
        faults = sample_faults(circ, args.p, shot_rng(args.seed, shot))
        syndrome, _ = g.syndrome_and_action(faults.entries)
        if not syndrome:
            continue
        error_edges = g.error_edges_of(faults.entries)
        decomp = decompose_clustered(g, error_edges, schedule)
        if not decomp.emptied:
            undecomposed += 1
            continue
        for c in decomp.clusters:
            level_counts[c.level] = level_counts.get(c.level, 0) + 1
        _, trace = uf_decode(g, syndrome, with_trace=True)
        report = verify_stopping_guarantee(g, trace, decomp, schedule)
        total_violations += len(report.violations)
        max_margin = max(max_margin, report.max_margin)
    payload = {
        "d": args.d,
        "p": args.p,
        "shots": shots,
        "violations": total_violations,
        "undecomposed_shots": undecomposed,
        "clusters_per_level": {str(k): v for k, v in sorted(level_counts.items())},
        "max_margin": max_margin,
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return 0 if total_violations == 0 else INVARIANT_EXIT


def main() -> None:
    raise SystemExit(cli_dispatch())


if __name__ == "__main__":
    main()
