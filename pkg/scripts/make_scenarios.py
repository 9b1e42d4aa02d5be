"""Write an open movingai map and seeded random scenario files for it.

No benchmark download is possible here, so the empty 16x16 map and its
random scenarios are regenerated deterministically. Entries use distinct
starts and distinct goals and carry the octile distance as the reference
length, as the movingai scenario files do.
"""
from __future__ import annotations

import argparse
import math
import random
from pathlib import Path


def octile(a, b) -> float:
    dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
    return max(dx, dy) + (math.sqrt(2) - 1) * min(dx, dy)


def map_text(width: int, height: int) -> str:
    rows = ["." * width for _ in range(height)]
    return f"type octile\nheight {height}\nwidth {width}\nmap\n" + "\n".join(rows) + "\n"


def scen_text(map_name: str, width: int, height: int, entries: int, rng: random.Random) -> str:
    cells = [(x, y) for y in range(height) for x in range(width)]
    starts = rng.sample(cells, entries)
    goals = rng.sample(cells, entries)
    lines = ["version 1"]
    for s, g in zip(starts, goals):
        d = octile(s, g)
        lines.append("\t".join(map(str, (int(d // 4), map_name, width, height, s[0], s[1], g[0], g[1], f"{d:.8f}"))))
    return "\n".join(lines) + "\n"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data", help="output directory")
    ap.add_argument("--size", type=int, default=16)
    ap.add_argument("--scenarios", type=int, default=25)
    ap.add_argument("--entries", type=int, default=64)
    ap.add_argument("--seed", type=int, default=2019)
    args = ap.parse_args(argv)
    out = Path(args.out)
    (out / "scen").mkdir(parents=True, exist_ok=True)
    name = f"empty-{args.size}-{args.size}"
    (out / f"{name}.map").write_text(map_text(args.size, args.size))
    for i in range(1, args.scenarios + 1):
        rng = random.Random(args.seed * 1000 + i)
        text = scen_text(f"{name}.map", args.size, args.size, args.entries, rng)
        (out / "scen" / f"{name}-random-{i}.scen").write_text(text)
    print(f"wrote {out / name}.map and {args.scenarios} scenario files")


if __name__ == "__main__":
    main()
