"""Solve the two-agent unit-square instance with both solvers and print the plans and run logs."""
from __future__ import annotations

import argparse

from mapfr.ccbs import ccbs
from mapfr.formats import write_solution
from mapfr.geometry import unsafe_interval
from mapfr.model import MotionEvent, unit_square_instance
from mapfr.smtcbs import smt_cbs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=float, default=0.2)
    args = ap.parse_args(argv)
    inst = unit_square_instance(radius=args.radius)
    d = inst.dist(1, 4)
    iv = unsafe_interval(MotionEvent(1, 1, 4, 0.0, d), MotionEvent(2, 2, 3, 0.0, d), inst)
    print(f"unsafe start interval of the diagonal move: [{iv.lo:.6f}, {iv.hi:.6f})")
    rep = smt_cbs(inst)
    print(f"\nsmtcbs makespan {rep.solution.makespan:.6f}, bounds tried {[round(m, 6) for m in rep.mu_schedule]}")
    print("mu\tvars\tclauses\tcollisions\telapsed_s")
    print("\n".join(rep.log))
    print(write_solution(rep.solution), end="")
    crep = ccbs(inst)
    print(f"\nccbs makespan {crep.solution.makespan:.6f}, {crep.expanded} nodes expanded")
    print(write_solution(crep.solution), end="")


if __name__ == "__main__":
    main()
