"""Solve seeded random open-grid instances with both solvers and compare makespans.

Writes one tab-separated row per instance and exits non-zero on any
disagreement or invalid solution.
"""
from __future__ import annotations

import argparse
import sys
import time

from mapfr.ccbs import ccbs
from mapfr.generate import corpus
from mapfr.geometry import validate_plans
from mapfr.smtcbs import smt_cbs


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--tol", type=float, default=1e-4)
    ap.add_argument("--out", help="TSV file (default: stdout)")
    args = ap.parse_args(argv)
    out = open(args.out, "w") if args.out else sys.stdout
    print("index\tsize\tK\tagents\tsmtcbs_makespan\tccbs_makespan\tsmtcbs_s\tccbs_s\tok", file=out)
    bad = 0
    t_all = time.perf_counter()
    for i, (inst, shape) in enumerate(corpus(args.seed, args.count)):
        t0 = time.perf_counter()
        s = smt_cbs(inst).solution
        t1 = time.perf_counter()
        c = ccbs(inst).solution
        t2 = time.perf_counter()
        ok = abs(s.makespan - c.makespan) <= args.tol and not validate_plans(s, inst) and not validate_plans(c, inst)
        bad += not ok
        print(f"{i}\t{shape.size}\t{shape.neighborhood}\t{shape.agents}\t{s.makespan:.6f}\t{c.makespan:.6f}\t"
              f"{t1 - t0:.3f}\t{t2 - t1:.3f}\t{int(ok)}", file=out, flush=True)
    print(f"{args.count - bad}/{args.count} agree in {time.perf_counter() - t_all:.1f}s", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
