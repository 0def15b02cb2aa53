"""Convergence study on the unit circle.

For each mesh in a refinement ladder, run the full lift sweep and report
the per-lift area against the exact value (1 + eps^2) * pi, then the
extrapolated flat area against pi.  The circle is the one catalog entry
with a closed-form answer at every stage, so it doubles as a calibration
table for picking mesh sizes.

Usage:
    python3 scripts/circle_convergence.py
    python3 scripts/circle_convergence.py --meshes 12:24 24:48 36:72 --out table.csv
"""

import argparse
import math
import sys
import time

from minhomotopy.continuation import epsilon_schedule, extract_limit, run_sweep
from minhomotopy.curve import resample_arclength
from minhomotopy.diskmesh import build_disk_mesh
from minhomotopy.oracle import circle

PI = math.pi


def parse_mesh(text):
    rings, _, boundary = text.partition(":")
    return int(rings), int(boundary)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument(
        "--meshes",
        nargs="+",
        default=["12:24", "18:36", "24:48", "36:72"],
        help="rings:boundary pairs, coarse to fine",
    )
    ap.add_argument("--samples", type=int, default=256)
    ap.add_argument("--eps0", type=float, default=0.2)
    ap.add_argument("--factor", type=float, default=0.5)
    ap.add_argument("--count", type=int, default=4)
    ap.add_argument("--out", default=None, help="also write the CSV here")
    args = ap.parse_args(argv)

    curve = resample_arclength(circle(1.0), args.samples)
    schedule = epsilon_schedule(args.eps0, args.factor, args.count)

    lines = ["rings,boundary,epsilon,area,exact,rel_error,area0,area0_rel,seconds"]
    for spec_pair in args.meshes:
        rings, boundary = parse_mesh(spec_pair)
        mesh = build_disk_mesh(rings, boundary)
        start = time.perf_counter()
        record = run_sweep(curve, mesh, schedule)
        limit = extract_limit(record, curve)
        elapsed = time.perf_counter() - start
        a0_rel = (limit.area0 - PI) / PI
        for eps, res in zip(record.epsilons, record.results):
            exact = (1.0 + eps * eps) * PI
            rel = (res.area - exact) / exact
            lines.append(
                f"{rings},{boundary},{eps:.6g},{res.area:.10f},"
                f"{exact:.10f},{rel:+.3e},{limit.area0:.10f},"
                f"{a0_rel:+.3e},{elapsed:.2f}"
            )

    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(table)
    return 0


if __name__ == "__main__":
    sys.exit(main())
