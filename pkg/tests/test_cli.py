import csv
import json

import pytest

from mapfr.bench import CSV_HEADER, BenchResult, read_csv, run_isolated, success_rates, sorted_runtimes, write_csv
from mapfr.cli import main
from mapfr.formats import write_instance
from mapfr.model import Agent, Instance, unit_square_instance

MAP = "type octile\nheight 4\nwidth 4\nmap\n....\n....\n....\n....\n"


@pytest.fixture
def square_file(tmp_path):
    p = tmp_path / "square.inst"
    p.write_text(write_instance(unit_square_instance()))
    return p


def scen_dir(tmp_path):
    d = tmp_path / "scen"
    d.mkdir()
    rows = [(0, 0, 3, 3), (3, 0, 0, 3), (0, 3, 3, 0), (3, 3, 0, 0)]
    for i in (1, 2):
        lines = ["version 1"] + ["\t".join(map(str, (0, "m.map", 4, 4, *r, "4.24"))) for r in rows[i - 1:] + rows[:i - 1]]
        (d / f"m-random-{i}.scen").write_text("\n".join(lines) + "\n")
    (tmp_path / "m.map").write_text(MAP)
    return d


@pytest.mark.parametrize("algo", ["smtcbs", "ccbs"])
def test_solve_and_validate(tmp_path, square_file, algo, capsys):
    sol, logf = tmp_path / "s.txt", tmp_path / "log.tsv"
    assert main(["solve", "--instance", str(square_file), "--algo", algo, "--out", str(sol), "--log", str(logf)]) == 0
    log = logf.read_text().splitlines()
    assert log[0] == "mu\tvars\tclauses\tcollisions\telapsed_s"
    assert "# makespan\t1.979899" in log
    assert main(["validate", "--instance", str(square_file), "--solution", str(sol)]) == 0
    assert "valid" in capsys.readouterr().out


def test_validate_reports_collision(tmp_path, square_file, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 1 4 0.000000 1.414214\n2 2 3 0.000000 1.414214\n")
    assert main(["validate", "--instance", str(square_file), "--solution", str(bad)]) == 4
    assert "collision agents 1 2" in capsys.readouterr().out
    broken = tmp_path / "broken.txt"
    broken.write_text("1 1 4 0.000000 1.0\n2 2 3 0.000000 1.414214\n")
    assert main(["validate", "--instance", str(square_file), "--solution", str(broken)]) == 4
    garbage = tmp_path / "garbage.txt"
    garbage.write_text("1 1 4 zero 1.0\n")
    assert main(["validate", "--instance", str(square_file), "--solution", str(garbage)]) == 1


def test_solve_exit_codes(tmp_path):
    swap = Instance.build({1: (0, 0), 2: (1, 0)}, [(1, 2)], [Agent(1, 0.2, 1), Agent(2, 0.2, 1)],
                          {1: 1, 2: 2}, {1: 2, 2: 1})
    p = tmp_path / "swap.inst"
    p.write_text(write_instance(swap))
    assert main(["solve", "--instance", str(p), "--timeout", "1"]) == 2
    cut = Instance.build({1: (0, 0), 2: (1, 0), 3: (4, 4)}, [(1, 2)], [Agent(1, 0.2, 1)], {1: 1}, {1: 3})
    q = tmp_path / "cut.inst"
    q.write_text(write_instance(cut))
    assert main(["solve", "--instance", str(q), "--algo", "ccbs"]) == 3
    assert main(["solve"]) == 1
    assert main(["solve", "--instance", str(tmp_path / "missing")]) == 1
    assert main(["nonsense"]) == 1


def test_solve_from_map_and_scen(tmp_path, capsys):
    d = scen_dir(tmp_path)
    rc = main(["solve", "--map", str(tmp_path / "m.map"), "--scen", str(d / "m-random-1.scen"), "--agents", "2",
               "--neighborhood", "2"])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(len(l.split()) == 5 for l in lines)


def test_bench_and_plotdata(tmp_path, capsys):
    d = scen_dir(tmp_path)
    out = tmp_path / "r.csv"
    rc = main(["bench", "--map", str(tmp_path / "m.map"), "--scens", str(d), "--agents-min", "1", "--agents-max", "2",
               "--timeout", "60", "--out", str(out), "--quiet", "--jobs", "2"])
    assert rc == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == CSV_HEADER and len(rows) == 1 + 2 * 2 * 2
    assert all(r[5] == "solved" for r in rows[1:])
    meta = json.loads((tmp_path / "r.csv.meta.json").read_text())
    assert meta["timeout"] == 60 and len(meta["scenarios"]) == 2
    assert "success_rate" in capsys.readouterr().out
    pd = tmp_path / "plots"
    assert main(["plotdata", "--csv", str(out), "--out", str(pd)]) == 0
    series = (pd / "success_m_K3_smtcbs.tsv").read_text().splitlines()
    assert series == ["agents\tsuccess_rate", "1\t1.000000", "2\t1.000000"]
    ranks = (pd / "runtimes_ccbs.tsv").read_text().splitlines()[1:]
    ts = [float(l.split("\t")[1]) for l in ranks]
    assert ts == sorted(ts) and len(ts) == 4


def test_bench_usage_errors(tmp_path):
    d = scen_dir(tmp_path)
    base = ["bench", "--map", str(tmp_path / "m.map"), "--out", str(tmp_path / "r.csv")]
    assert main(base + ["--scens", str(tmp_path / "nothing")]) == 1
    assert main(base + ["--scens", str(d), "--algos", "astar"]) == 1
    assert main(base + ["--scens", str(d), "--agents-min", "3", "--agents-max", "2"]) == 1
    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(CSV_HEADER) + "\n")
    assert main(["plotdata", "--csv", str(empty), "--out", str(tmp_path / "p")]) == 1


def test_csv_helpers(tmp_path):
    rs = [BenchResult("b", 3, 2, "s1", "ccbs", "solved", 0.5, 3.0),
          BenchResult("b", 3, 2, "s2", "ccbs", "timeout", 120.0),
          BenchResult("b", 3, 2, "s1", "smtcbs", "solved", 0.2, 3.0)]
    p = tmp_path / "x.csv"
    write_csv(rs, p)
    back = read_csv(p)
    assert back[1].makespan is None and back[0].makespan == 3.0
    assert success_rates(back)[("b", 3, "ccbs")] == {2: 0.5}
    assert sorted_runtimes(back) == {"ccbs": [0.5], "smtcbs": [0.2]}
    p.write_text("a,b\n")
    with pytest.raises(ValueError):
        read_csv(p)


def test_run_isolated_timeout():
    swap = Instance.build({1: (0, 0), 2: (1, 0)}, [(1, 2)], [Agent(1, 0.2, 1), Agent(2, 0.2, 1)],
                          {1: 1, 2: 2}, {1: 2, 2: 1})
    out = run_isolated(swap, "ccbs", 0.5)
    assert out.outcome == "timeout" and out.runtime_s < 5
