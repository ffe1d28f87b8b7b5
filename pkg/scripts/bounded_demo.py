#!/usr/bin/env python3
"""Bounded-domain solves: the analytic annulus check and a three-hole example."""

import argparse
import math
import pathlib

from laplace_series import (
    default_spec,
    disk,
    eval_expansion,
    extract_contours,
    solve_problem,
)
from laplace_series.cli import emit_svg
from laplace_series.solver import Problem


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-o", "--outdir", default="out")
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    # Annulus 1 < |z| < 2 with u=1 inside, u=0 outside; exact solution is
    # log(|z|/2)/log(1/2), so u(sqrt 2) = 1/2 and the log coefficient -1/log 2.
    annulus = Problem(
        (disk(0, 2.0, role="outer"), disk(0, 1.0)),
        "bounded", None, (0.0, 1.0),
    )
    sol = solve_problem(annulus, default_spec(annulus, degree=10))
    u = eval_expansion(sol.expansion, complex(math.sqrt(2), 0))
    print(f"annulus: u(sqrt 2) = {u:.12f} (exact 0.5), "
          f"log coefficient = {sol.expansion.log_coeffs[0]:.12f} "
          f"(exact {-1 / math.log(2):.12f})")

    # A bounded region with three holes at u=1 inside an outer circle at u=0.
    holes = [disk(-0.9 + 0.5j, 0.3), disk(0.8 + 0.6j, 0.25), disk(0.1 - 0.9j, 0.35)]
    prob = Problem(
        (disk(0, 2.0, role="outer"), *holes),
        "bounded", None, (0.0, 1.0, 1.0, 1.0),
    )
    sol = solve_problem(prob, default_spec(prob, degree=12))
    print(f"three holes: residual {sol.residual:.2e}, "
          f"log coefficients {[f'{d:.6f}' for d in sol.expansion.log_coeffs]}")

    window = (-2.1, 2.1, -2.1, 2.1)
    levels = [0.1 * k for k in range(1, 10)]
    polys = extract_contours(sol, levels, window, 320)
    path = outdir / "bounded_field.svg"
    path.write_text(emit_svg(polys, prob.components, window))
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
