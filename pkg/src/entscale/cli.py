"""Command-line entry point: ``entscale <command> [options]``.

Commands: gen, sweep, grover, shor, stats, fit. Options may also come from a
flat ``key=value`` file given with ``--config``; flags on the command line
win. Exit codes: 0 success, 2 invalid arguments, 3 resource cap,
4 convergence failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import exactcover, grover, shor, solver, stats, statevec
from .errors import ConvergenceFailure, InvalidArgument, ResourceLimit

log = logging.getLogger("entscale")

EXIT_OK, EXIT_ARGS, EXIT_RESOURCE, EXIT_CONVERGENCE = 0, 2, 3, 4
GROVER_NUMERIC_MAX = 14


class ConfigError(InvalidArgument):
    pass


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def read_config(path) -> dict:
    """Parse a flat key=value file; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (t.strip() for t in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def instance_seeds(seed: int, count: int) -> list[int]:
    """Per-instance seeds derived from one base seed."""
    return [int(x) for x in np.random.SeedSequence(seed).generate_state(count)]


def parse_partition(text: str, n: int) -> statevec.BiPartition:
    if text == "half":
        return statevec.BiPartition.half(n)
    try:
        mask = int(text, 0)
    except ValueError:
        raise InvalidArgument(f"partition must be 'half' or an integer mask, got {text!r}") from None
    return statevec.BiPartition(n, mask)


def _n_from_name(path: Path) -> int | None:
    m = re.search(r"(?:^|_)n(\d+)(?:_|$)", path.stem)
    return int(m.group(1)) if m else None


# --- commands --------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.n > args.max_qubits:
        raise ResourceLimit(f"n={args.n} exceeds --max-qubits {args.max_qubits}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, seed in enumerate(instance_seeds(args.seed, args.count)):
        inst = exactcover.generate_instance(args.n, args.k, seed, restart_cap=args.restart_cap)
        exactcover.save_instance(inst, out / f"ec_n{args.n}_k{args.k}_{i:04d}.json")
    log.info("wrote %d instances to %s", args.count, out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    src = Path(args.instances)
    files = sorted(src.glob("*.json")) if src.is_dir() else [src]
    if not files:
        raise InvalidArgument(f"no instance files under {src}")
    instances = [exactcover.load_instance(f) for f in files]
    for f, inst in zip(files, instances):
        if inst.n_qubits > args.max_qubits:
            raise ResourceLimit(f"{f.name}: n={inst.n_qubits} exceeds --max-qubits {args.max_qubits}")
    grid = solver.s_grid(args.step)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    profiles, failed = [], []
    jobs = []
    for f, inst in zip(files, instances):
        part = parse_partition(args.partition, inst.n_qubits)
        jobs.append((f, inst, part.mask_a))
    results = _run_sweeps(jobs, grid, args.workers)
    for (f, inst, _), res in zip(jobs, results):
        if isinstance(res, Exception):
            failed.append((f.stem, res))
            continue
        res.instance_id = f.stem
        (out / f"{f.stem}.csv").write_text(res.to_csv(), encoding="utf-8")
        profiles.append(res)
    _write_aggregates(profiles, out)
    if failed:
        for name, exc in failed:
            print(f"convergence failure: {name}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


def _one_sweep(job):
    inst, grid, mask = job
    try:
        return solver.sweep(inst, grid, statevec.BiPartition(inst.n_qubits, mask))
    except ConvergenceFailure as exc:
        return exc


def _run_sweeps(jobs, grid, workers):
    payload = [(inst, grid, mask) for _, inst, mask in jobs]
    workers = workers or os.cpu_count() or 1
    if workers <= 1 or len(payload) <= 1:
        return [_one_sweep(p) for p in payload]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one_sweep, payload))


def _write_aggregates(profiles, out: Path):
    by_n = {}
    for p in profiles:
        by_n.setdefault(p.n_qubits, []).append(p)
    rows = [stats.aggregate(by_n[n]) for n in sorted(by_n)]
    (out / "aggregate.csv").write_text(stats.aggregate_csv(rows), encoding="utf-8")
    for n in sorted(by_n):
        group = by_n[n]
        ent = stats.mean_curve(group, "entropy")
        gap = stats.mean_curve(group, "gap")
        lines = ["s,entropy,gap"] + [f"{s:.12g},{e:.12g},{g:.12g}"
                                     for s, e, g in zip(group[0].s_grid, ent, gap)]
        (out / f"mean_curve_n{n}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_stats(args) -> int:
    src = Path(args.input)
    files = sorted(f for f in src.glob("*.csv")
                   if f.name != "aggregate.csv" and not f.name.startswith("mean_curve"))
    if not files:
        raise InvalidArgument(f"no sweep tables under {src}")
    profiles = []
    for f in files:
        n = args.n or _n_from_name(f)
        if n is None:
            raise InvalidArgument(f"cannot tell system size of {f.name}; pass --n")
        profiles.append(solver.SweepProfile.from_csv(f.read_text(encoding="utf-8"), n, f.stem))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_aggregates(profiles, out)
    return EXIT_OK


def cmd_fit(args) -> int:
    text = Path(args.input).read_text(encoding="utf-8")
    header = text.split("\n", 1)[0]
    if header == stats.AGGREGATE_HEADER:
        rows = stats.read_aggregate_csv(text)
        xs = [r["n"] for r in rows]
        ys = [r[args.y] for r in rows]
        res = stats.fit(xs, ys, args.model)
        payload = {"model": res.model, "slope": res.slope, "intercept": res.intercept,
                   "residual": res.residual, "correlation": res.correlation, "y": args.y}
    else:
        cols = header.split(",")
        data = np.array([[float(x) for x in ln.split(",")]
                         for ln in text.splitlines()[1:] if ln.strip()])
        if "s" not in cols or "entropy" not in cols:
            raise InvalidArgument("critical fit needs a table with s and entropy columns")
        s = data[:, cols.index("s")]
        e = data[:, cols.index("entropy")]
        s_c = args.s_c if args.s_c is not None else float(s[int(np.argmax(e))])
        crit = stats.fit_critical_region(s, e, s_c, args.window_lo, args.window_hi)
        payload = {"s_c": s_c, "alpha": crit.alpha,
                   "loglog_slope": crit.growth.slope, "loglog_correlation": crit.growth.correlation,
                   "power_correlation": crit.falling.correlation}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_grover(args) -> int:
    ns = args.n
    for n in ns:
        if n % 2:
            raise InvalidArgument(f"grover needs even n, got {n}")
    grid = solver.s_grid(args.step)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    check = {}
    for n in ns:
        (out / f"grover_n{n}.csv").write_text(grover.curve_csv(n, grid), encoding="utf-8")
        if n <= min(GROVER_NUMERIC_MAX, args.max_qubits):
            part = statevec.BiPartition.half(n)
            dev = max(abs(grover.point(n, float(s)).entropy_bits
                          - statevec.entropy(grover.numeric_state(n, float(s)), part)) for s in grid)
            check[str(n)] = dev
    (out / "grover_saturation.csv").write_text(grover.saturation_csv(ns), encoding="utf-8")
    (out / "grover_check.json").write_text(
        json.dumps({"max_abs_deviation": check}, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_shor(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines, orders = [], Counter()
    for N in args.N:
        bases = [args.a] if args.a else shor.coprime_bases(N)
        for a in bases:
            case = shor.ShorCase.build(N, a)
            if case.n_qubits > args.max_qubits:
                raise ResourceLimit(f"N={N} needs {case.n_qubits} qubits, above --max-qubits {args.max_qubits}")
            report = shor.case_report(case)
            lines.append(shor.dumps_report(report))
            orders[(N, case.r)] += 1
    (out / "shor_cases.jsonl").write_text("".join(lines), encoding="utf-8")
    summary = ["N,r,count"] + [f"{N},{r},{c}" for (N, r), c in sorted(orders.items())]
    (out / "shor_orders.csv").write_text("\n".join(summary) + "\n", encoding="utf-8")
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file with default options")
    common.add_argument("--out", default="out", help="output directory (or file for fit)")
    common.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    common.add_argument("--max-qubits", type=int, default=20)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="entscale", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate unique-assignment Exact Cover instances")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=3, choices=(3, 4))
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--restart-cap", type=int, default=exactcover.DEFAULT_RESTART_CAP)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sweep", parents=[common], help="sweep s for every instance file")
    p.add_argument("--instances", required=True, help="instance JSON file or directory")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--partition", default="half", help="'half' or an integer bitmask of subsystem A")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", parents=[common], help="re-aggregate existing sweep tables")
    p.add_argument("--in", dest="input", required=True, help="directory of sweep CSVs")
    p.add_argument("--n", type=int, default=None, help="system size if not in file names")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("fit", parents=[common], help="scaling or critical-region fit")
    p.add_argument("--in", dest="input", required=True, help="aggregate.csv or an s/entropy table")
    p.add_argument("--model", default="linear", choices=stats.MODELS)
    p.add_argument("--y", default="mean_max_entropy", help="aggregate column to fit")
    p.add_argument("--s-c", type=float, default=None)
    p.add_argument("--window-lo", type=float, nargs=2, default=None, metavar=("NEAR", "FAR"))
    p.add_argument("--window-hi", type=float, nargs=2, default=None, metavar=("NEAR", "FAR"))
    p.set_defaults(func=cmd_fit, out=None)

    p = sub.add_parser("grover", parents=[common], help="analytic Grover entropy curves")
    p.add_argument("--n", type=int_list, default=[10, 12, 14])
    p.add_argument("--step", type=float, default=0.01)
    p.set_defaults(func=cmd_grover)

    p = sub.add_parser("shor", parents=[common], help="pre-QFT Schmidt rank reports")
    p.add_argument("--N", type=int_list, required=True)
    p.add_argument("--a", type=int, default=None)
    p.set_defaults(func=cmd_shor)
    return parser


def _apply_config(parser, argv):
    """Parse argv with values from --config installed as subcommand defaults."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known_args, _ = pre.parse_known_args(argv)
    choices = parser._subparsers._group_actions[0].choices
    if known_args.config and known_args.command in choices:
        subparser = choices[known_args.command]
        actions = {a.dest: a for a in subparser._actions}
        defaults = {}
        for key, raw in read_config(known_args.config).items():
            action = actions.get(key)
            if action is None or key in ("config", "help"):
                raise ConfigError(f"unknown config key {key!r} for {known_args.command}")
            try:
                if action.nargs is not None and action.nargs not in ("?",) and action.const is None:
                    value = [action.type(x) if action.type else x for x in raw.split()]
                elif action.type is not None:
                    value = action.type(raw)
                elif action.const is True:
                    value = raw.lower() in ("1", "true", "yes", "on")
                else:
                    value = raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
            defaults[key] = value
            action.required = False
        subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConvergenceFailure as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InvalidArgument, ValueError) as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
