"""Command line: ``mapfr {solve,validate,bench,plotdata}``.

Exit codes: 0 success, 1 usage or parse error, 2 timeout, 3 no solution,
4 invalid solution.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .formats import (DEFAULT_RADIUS, DEFAULT_SPEED, FormatError, make_instance, parse_map, parse_scen,
                      read_instance, read_solution, write_solution)
from .geometry import validate_plans
from .model import check_plan

EXIT_OK, EXIT_USAGE, EXIT_TIMEOUT, EXIT_NOSOLUTION, EXIT_INVALID = 0, 1, 2, 3, 4

# Solution files carry 6 decimals, so a start time can be off by 5e-7;
# the file validator widens both tolerances to absorb that rounding.
FILE_EPS_G = 1e-5
FILE_EPS_T = 2e-6

LOG_HEADER = "mu\tvars\tclauses\tcollisions\telapsed_s"


class UsageError(Exception):
    pass


def _load_instance(args):
    if args.instance:
        return read_instance(Path(args.instance).read_text())
    if not (args.map and args.scen and args.agents):
        raise UsageError("give --instance, or --map, --scen and --agents")
    grid = parse_map(Path(args.map).read_text())
    entries = parse_scen(Path(args.scen).read_text())
    return make_instance(grid, entries, args.agents, args.neighborhood, args.radius, args.speed)


def cmd_solve(args) -> int:
    try:
        inst = _load_instance(args)
    except (UsageError, FormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    out = bench.run_isolated(inst, args.algo, args.timeout, args.seed)
    lines = [LOG_HEADER, *out.log]
    if out.outcome == "solved":
        lines.append(f"# makespan\t{out.solution.makespan:.6f}")
    lines.append(f"# outcome\t{out.outcome}\truntime_s\t{out.runtime_s:.6f}")
    log_text = "\n".join(lines) + "\n"
    if args.log:
        Path(args.log).write_text(log_text)
    if out.outcome == "solved":
        text = write_solution(out.solution)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        print(f"solved makespan {out.solution.makespan:.6f} in {out.runtime_s:.3f}s", file=sys.stderr)
        return EXIT_OK
    if out.outcome == "timeout":
        print(f"timeout after {args.timeout}s", file=sys.stderr)
        return EXIT_TIMEOUT
    if out.outcome == "nosolution":
        print(f"no solution: {out.message}", file=sys.stderr)
        return EXIT_NOSOLUTION
    print(out.message, file=sys.stderr)
    return EXIT_USAGE


def cmd_validate(args) -> int:
    try:
        inst = read_instance(Path(args.instance).read_text())
        sol = read_solution(Path(args.solution).read_text(), inst)
    except (FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    problems = []
    for p in sol.plans:
        if p.agent not in inst.agent_ids:
            problems.append(f"agent {p.agent}: not in the instance")
            continue
        err = check_plan(p, inst, FILE_EPS_T)
        if err:
            problems.append(f"agent {p.agent}: {err}")
    if problems:
        print("\n".join(problems))
        return EXIT_INVALID
    collisions = validate_plans(sol, inst, FILE_EPS_G, FILE_EPS_T)
    for c in collisions:
        a, b = c.event_i, c.event_j
        print(f"collision agents {a.agent} {b.agent} at t={c.contact_time:.6f}: "
              f"{a.frm}->{a.to} [{a.t_start:.6f},{a.t_end:.6f}) vs {b.frm}->{b.to} [{b.t_start:.6f},{b.t_end:.6f})")
    if collisions:
        return EXIT_INVALID
    print(f"valid: {len(sol.plans)} plans, makespan {sol.makespan:.6f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        grid = parse_map(Path(args.map).read_text())
        scen_dir = Path(args.scens)
        scen_files = sorted(scen_dir.glob("*.scen"), key=lambda p: (len(p.name), p.name))
        if args.scen_limit:
            scen_files = scen_files[:args.scen_limit]
        if not scen_files:
            raise UsageError(f"no .scen files in {scen_dir}")
        scens = [(p.stem, parse_scen(p.read_text())) for p in scen_files]
        algos = [a.strip() for a in args.algos.split(",") if a.strip()]
        for a in algos:
            if a not in bench.ALGOS:
                raise UsageError(f"unknown algorithm {a!r}")
        if not 1 <= args.agents_min <= args.agents_max:
            raise UsageError("need 1 <= --agents-min <= --agents-max")
    except (UsageError, FormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    name = Path(args.map).stem
    tasks = []
    for k in range(args.agents_min, args.agents_max + 1):
        for sname, entries in scens:
            inst = make_instance(grid, entries, k, args.neighborhood, args.radius, args.speed)
            for algo in algos:
                tasks.append(bench.BenchTask(name, args.neighborhood, k, sname, algo, inst))

    def progress(r):
        if not args.quiet:
            print("\t".join(r.row()), file=sys.stderr, flush=True)

    results = bench.run_tasks(tasks, args.timeout, args.jobs, args.seed, progress)
    bench.write_csv(results, args.out)
    meta = {"radius": args.radius, "speed": args.speed, "timeout": args.timeout, "neighborhood": args.neighborhood,
            "seed": args.seed, "map": str(args.map), "scenarios": [p.name for p in scen_files]}
    Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    sys.stdout.write(bench.summary_table(results))
    for algo, ts in sorted(bench.sorted_runtimes(results).items()):
        print(f"sorted runtimes {algo}: " + " ".join(f"{t:.3f}" for t in ts))
    return EXIT_OK


def cmd_plotdata(args) -> int:
    try:
        results = bench.read_csv(args.csv)
        files = bench.write_plotdata(results, args.out)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    for f in files:
        print(f)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mapfr", description="Continuous-time multi-agent path finding.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("--instance")
    s.add_argument("--map")
    s.add_argument("--scen")
    s.add_argument("--agents", type=int)
    s.add_argument("--neighborhood", type=int, default=3, choices=[2, 3, 4, 5])
    s.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    s.add_argument("--speed", type=float, default=DEFAULT_SPEED)
    s.add_argument("--algo", choices=bench.ALGOS, default="smtcbs")
    s.add_argument("--timeout", type=float, default=120.0)
    s.add_argument("--out", help="solution file (default: stdout)")
    s.add_argument("--log", help="run log file (tab-separated)")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check a solution file against an instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--solution", required=True)
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", help="timed sweep over scenarios and agent counts")
    b.add_argument("--map", required=True)
    b.add_argument("--scens", required=True, help="directory of .scen files")
    b.add_argument("--neighborhood", type=int, default=3, choices=[2, 3, 4, 5])
    b.add_argument("--agents-min", type=int, default=1)
    b.add_argument("--agents-max", type=int, default=5)
    b.add_argument("--algos", default="smtcbs,ccbs")
    b.add_argument("--timeout", type=float, default=120.0)
    b.add_argument("--out", required=True, help="CSV output path")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--scen-limit", type=int, default=0, help="use only the first N scenario files")
    b.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    b.add_argument("--speed", type=float, default=DEFAULT_SPEED)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--quiet", action="store_true")
    b.set_defaults(func=cmd_bench)

    p = sub.add_parser("plotdata", help="success-rate and sorted-runtime series from a bench CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_plotdata)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
