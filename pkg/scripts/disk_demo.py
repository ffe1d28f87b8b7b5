#!/usr/bin/env python3
"""Green function outside one disk: convergence table and a field picture.

Writes disk_field.svg next to this script's output directory (default ./out).
"""

import argparse
import pathlib
import time

from laplace_series import (
    TraceOptions,
    default_spec,
    default_window,
    disk,
    eval_expansion,
    extract_contours,
    green_problem,
    solve_problem,
    streamline_fan,
)
from laplace_series.cli import emit_svg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-o", "--outdir", default="out")
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    prob = green_problem([disk(3 + 1j, 1.0)], source=0j)

    print("degree   u(2)                 residual      time")
    for degree in (4, 8, 12, 16, 20):
        t0 = time.perf_counter()
        sol = solve_problem(prob, default_spec(prob, degree=degree))
        dt = time.perf_counter() - t0
        u2 = eval_expansion(sol.expansion, 2.0 + 0j)
        print(f"{degree:4d}   {u2:+.15f}   {sol.residual:.2e}   {dt * 1e3:5.1f} ms")

    sol = solve_problem(prob, default_spec(prob, degree=12))
    window = default_window(prob)
    levels = [-0.1 * k for k in range(1, 14)]
    polys = extract_contours(sol, levels, window, 300)
    polys += streamline_fan(sol, 48, 0.01, TraceOptions(window=window))
    path = outdir / "disk_field.svg"
    path.write_text(emit_svg(polys, prob.components, window))
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
