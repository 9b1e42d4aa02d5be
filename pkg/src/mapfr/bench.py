"""Benchmark harness: isolated timed runs, CSV rows, success rates and plot series."""
from __future__ import annotations

import csv
import multiprocessing as mp
import time
import traceback
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .model import Instance

CSV_HEADER = ["benchmark", "K", "agents", "scenario", "algo", "outcome", "runtime_s", "makespan"]
ALGOS = ("smtcbs", "ccbs")


@dataclass
class BenchResult:
    benchmark: str
    K: int
    agents: int
    scenario: str
    algo: str
    outcome: str  # solved | timeout | nosolution | error
    runtime_s: float
    makespan: Optional[float] = None

    def row(self) -> List[str]:
        ms = "" if self.makespan is None else f"{self.makespan:.6f}"
        return [self.benchmark, str(self.K), str(self.agents), self.scenario, self.algo, self.outcome,
                f"{self.runtime_s:.6f}", ms]


@dataclass
class RunOutput:
    outcome: str
    runtime_s: float
    solution: object = None
    log: Tuple[str, ...] = ()
    message: str = ""


def solve_instance(instance: Instance, algo: str, seed: int = 0):
    """Run one solver in-process; returns ``(solution, log rows)``."""
    if algo == "smtcbs":
        from .smtcbs import SmtCbsConfig, smt_cbs
        rep = smt_cbs(instance, SmtCbsConfig(seed=seed))
        return rep.solution, rep.log
    if algo == "ccbs":
        from .ccbs import ccbs
        rep = ccbs(instance)
        return rep.solution, rep.log
    raise ValueError(f"unknown algorithm {algo!r}")


def _worker(instance, algo, seed, queue):
    from .ccbs import NoSolution as CcbsNoSolution
    from .smtcbs import NoSolution as SmtNoSolution
    t0 = time.perf_counter()
    try:
        sol, rows = solve_instance(instance, algo, seed)
        queue.put(RunOutput("solved", time.perf_counter() - t0, sol, tuple(rows)))
    except (CcbsNoSolution, SmtNoSolution) as e:
        queue.put(RunOutput("nosolution", time.perf_counter() - t0, message=str(e)))
    except Exception:
        queue.put(RunOutput("error", time.perf_counter() - t0, message=traceback.format_exc()))


def run_isolated(instance: Instance, algo: str, timeout: float, seed: int = 0) -> RunOutput:
    """Solve in a child process; kill it after ``timeout`` seconds."""
    ctx = mp.get_context("fork")
    q = ctx.Queue()
    p = ctx.Process(target=_worker, args=(instance, algo, seed, q), daemon=True)
    t0 = time.perf_counter()
    p.start()
    try:
        out = q.get(timeout=timeout)
    except Exception:
        out = None
    wall = time.perf_counter() - t0
    if out is None:
        p.kill()
        p.join(2)
        return RunOutput("timeout", wall)
    p.join(2)
    if p.is_alive():
        p.kill()
    return out


@dataclass(frozen=True)
class BenchTask:
    benchmark: str
    K: int
    agents: int
    scenario: str
    algo: str
    instance: Instance


def run_tasks(tasks: Sequence[BenchTask], timeout: float, jobs: int = 1, seed: int = 0,
              progress=None) -> List[BenchResult]:
    """Run every task in its own process, up to ``jobs`` at a time; results keep task order."""

    def one(t: BenchTask) -> BenchResult:
        out = run_isolated(t.instance, t.algo, timeout, seed)
        ms = out.solution.makespan if out.outcome == "solved" else None
        runtime = min(out.runtime_s, timeout) if out.outcome == "timeout" else out.runtime_s
        r = BenchResult(t.benchmark, t.K, t.agents, t.scenario, t.algo, out.outcome, runtime, ms)
        if progress is not None:
            progress(r)
        return r

    if jobs <= 1:
        return [one(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(one, tasks))


def write_csv(results: Iterable[BenchResult], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_HEADER)
        for r in results:
            w.writerow(r.row())


def read_csv(path) -> List[BenchResult]:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing or wrong CSV header")
    out = []
    for i, row in enumerate(rows[1:], 2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"{path}: line {i}: expected {len(CSV_HEADER)} fields")
        try:
            out.append(BenchResult(row[0], int(row[1]), int(row[2]), row[3], row[4], row[5], float(row[6]),
                                   float(row[7]) if row[7] else None))
        except ValueError as e:
            raise ValueError(f"{path}: line {i}: {e}") from None
    return out


def success_rates(results: Iterable[BenchResult]) -> Dict[Tuple[str, int, str], Dict[int, float]]:
    """(benchmark, K, algo) -> {agents: fraction solved}."""
    tally: Dict[Tuple[str, int, str], Dict[int, List[int]]] = defaultdict(lambda: defaultdict(lambda: [0, 0]))
    for r in results:
        cell = tally[(r.benchmark, r.K, r.algo)][r.agents]
        cell[0] += r.outcome == "solved"
        cell[1] += 1
    return {k: {a: s / n for a, (s, n) in sorted(v.items())} for k, v in tally.items()}


def sorted_runtimes(results: Iterable[BenchResult]) -> Dict[str, List[float]]:
    """Per algorithm, runtimes of solved runs in ascending order."""
    out: Dict[str, List[float]] = defaultdict(list)
    for r in results:
        if r.outcome == "solved":
            out[r.algo].append(r.runtime_s)
    return {k: sorted(v) for k, v in out.items()}


def summary_table(results: Sequence[BenchResult]) -> str:
    rates = success_rates(results)
    lines = ["benchmark\tK\talgo\tagents\tsuccess_rate"]
    for (b, k, algo), series in sorted(rates.items()):
        for a, s in series.items():
            lines.append(f"{b}\t{k}\t{algo}\t{a}\t{s:.3f}")
    return "\n".join(lines) + "\n"


def write_plotdata(results: Sequence[BenchResult], out_dir) -> List[Path]:
    if not results:
        raise ValueError("no benchmark rows")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for (b, k, algo), series in sorted(success_rates(results).items()):
        p = out_dir / f"success_{b}_K{k}_{algo}.tsv"
        p.write_text("agents\tsuccess_rate\n" + "".join(f"{a}\t{s:.6f}\n" for a, s in series.items()))
        written.append(p)
    for algo, ts in sorted(sorted_runtimes(results).items()):
        p = out_dir / f"runtimes_{algo}.tsv"
        p.write_text("rank\truntime_s\n" + "".join(f"{i}\t{t:.6f}\n" for i, t in enumerate(ts, 1)))
        written.append(p)
    return written
