"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Significant-digit comparisons use the convention "n significant digits" ==
relative error at most 10**(1-n), which is the counting the reference values
themselves follow across their stated degrees.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS, domain_points
from laplace_series import (
    ExpansionSpec,
    Problem,
    TraceOptions,
    boundary_residual,
    cantor_components,
    cantor_inner_half_sum,
    cantor_measures,
    circle_flux,
    default_spec,
    disk,
    eval_expansion,
    eval_gradient,
    green_problem,
    harmonic_measures,
    joukowski_forward,
    joukowski_inverse,
    slit,
    slit_side_measure,
    solve_problem,
    streamline_fan,
)
from laplace_series.cantor import cantor_solution
from laplace_series.field import HIT_BOUNDARY

U2_REF = -0.5893274981708
SIDE_REF = 0.582625
CANTOR_TABLES = {
    1: [0.5],
    2: [0.367776, 0.132224],
    3: [0.253289, 0.111676, 0.066706, 0.068329],
    4: [0.162063, 0.088794, 0.058116, 0.054538, 0.038156, 0.029363, 0.029460, 0.039509],
}
# Printed inner-half sums 0.367776, 0.364965, 0.363512 belong to the levels
# whose tables they derive from: 2, 3, 4 (the source text labels them 4, 5, 6,
# but its own level-4 table sums to 0.363511..., the third value).
INNER_HALF_SUMS = {2: 0.367776, 3: 0.364965, 4: 0.363512}


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_1_disk_green_value():
    prob = green_problem([disk(3 + 1j, 1.0)], source=0j)
    ok = True
    details = []
    for degree, digits in ((4, 4), (8, 7), (12, 10)):
        t0 = time.perf_counter()
        sol = solve_problem(prob, default_spec(prob, degree=degree))
        elapsed = time.perf_counter() - t0
        u2 = eval_expansion(sol.expansion, 2.0 + 0j)
        rel = abs(u2 - U2_REF) / abs(U2_REF)
        ok &= rel <= 10.0 ** (1 - digits) and elapsed <= 0.1
        details.append(f"N={degree}: rel={rel:.1e} ({elapsed * 1e3:.0f} ms)")
    record(1, ok, "u(2) digits at N=4/8/12: " + ", ".join(details))


def test_criterion_2_slit_side_split():
    t0 = time.perf_counter()
    prob = green_problem([slit(3 + 1j, 1 - 0.5j)], source=0j)
    sol = solve_problem(prob, default_spec(prob, degree=16))
    facing = slit_side_measure(sol, 0, "facing")
    elapsed = time.perf_counter() - t0
    err = abs(facing - SIDE_REF)
    ok = err <= 1e-4 and elapsed <= 1.0
    record(2, ok, f"facing side = {facing:.6f} (err {err:.1e}, {elapsed * 1e3:.0f} ms)")


def test_criterion_3_cantor_measure_tables():
    worst = 0.0
    for m, table in CANTOR_TABLES.items():
        measures = cantor_measures(m)
        worst = max(worst, max(abs(a - b) for a, b in zip(measures, table)))
    ok = worst <= 1e-6
    record(3, ok, f"levels 1..4 vs printed tables: worst error {worst:.2e}")


def test_criterion_4_cantor_inner_half_sums():
    t0 = time.perf_counter()
    sums = {m: cantor_inner_half_sum(m) for m in range(2, 7)}
    elapsed = time.perf_counter() - t0
    worst = max(abs(sums[m] - ref) for m, ref in INNER_HALF_SUMS.items())
    ok = worst <= 1e-6 and elapsed <= 10.0
    record(
        4,
        ok,
        f"sums {sums[2]:.6f}/{sums[3]:.6f}/{sums[4]:.6f} vs 0.367776/0.364965/0.363512 "
        f"(worst {worst:.1e}; sums m<=6 in {elapsed:.1f} s)",
    )


def _green_test_set():
    problems = {
        "disk1": green_problem([disk(3 + 1j, 1.0)], source=0j),
        "two-disks": green_problem([disk(-2.0, 0.5), disk(2.0, 0.5)], source=0j),
        "three-disks": green_problem(
            [disk(-2 + 2j, 1.0), disk(3 + 1j, 0.8), disk(1 - 2.5j, 0.4)], source=0j
        ),
        "slit1": green_problem([slit(3 + 1j, 1 - 0.5j)], source=0j),
        "two-slits": green_problem(
            [slit(-2 + 1j, 0.8 + 0.3j), slit(2.5 - 1j, 1.0 - 0.2j)], source=0j
        ),
    }
    solutions = {name: solve_problem(p, default_spec(p, degree=12)) for name, p in problems.items()}
    for m in range(1, 7):
        solutions[f"cantor-m{m}"] = cantor_solution(m)
    return solutions


def _flux_radius(problem, j):
    comp = problem.components[j]
    own = comp.radius if comp.kind == "disk" else abs(comp.halfspan)
    clear = min(
        min(
            (abs(comp.center - c.center) - (c.radius if c.kind == "disk" else abs(c.halfspan)))
            for k, c in enumerate(problem.components)
            if k != j
        )
        if len(problem.components) > 1
        else math.inf,
        abs(comp.center - problem.source),
    )
    return own + 0.3 * (clear - own)


def test_criterion_5_measure_normalization_and_flux():
    solutions = _green_test_set()
    worst_total = 0.0
    worst_flux = 0.0
    for name, sol in solutions.items():
        report = harmonic_measures(sol)
        worst_total = max(worst_total, abs(report.total - 1.0))
        for j in range(len(sol.problem.components)):
            flux = circle_flux(sol, sol.problem.components[j].center, _flux_radius(sol.problem, j))
            d = sol.expansion.log_coeffs[j]
            worst_flux = max(worst_flux, abs(flux - 2 * math.pi * d) / abs(2 * math.pi * d))
        nearest = min(
            (abs(sol.problem.source - c.center) - (c.radius if c.kind == "disk" else abs(c.halfspan)))
            for c in sol.problem.components
        )
        src_flux = circle_flux(sol, sol.problem.source, 0.5 * nearest)
        worst_flux = max(worst_flux, abs(src_flux - 2 * math.pi) / (2 * math.pi))
    ok = worst_total <= 1e-9 and worst_flux <= 1e-6
    record(
        5,
        ok,
        f"{len(solutions)} Green solves: worst |sum-1| = {worst_total:.1e}, "
        f"worst flux rel err = {worst_flux:.1e}",
    )


def test_criterion_6_gradient_matches_finite_differences():
    solutions = _green_test_set()
    annulus = Problem((disk(0, 2.0, role="outer"), disk(0, 1.0)), "bounded", None, (0.0, 1.0))
    solutions["annulus"] = solve_problem(annulus, default_spec(annulus, degree=10))
    h = 1e-6
    worst = 0.0
    for seed, sol in enumerate(solutions.values()):
        pts = domain_points(sol.problem, 100, seed=seed, margin=0.2, box=5.0)
        grad = eval_gradient(sol.expansion, pts)
        ux = (eval_expansion(sol.expansion, pts + h) - eval_expansion(sol.expansion, pts - h)) / (2 * h)
        uy = (eval_expansion(sol.expansion, pts + 1j * h) - eval_expansion(sol.expansion, pts - 1j * h)) / (2 * h)
        worst = max(worst, float(np.max(np.abs(grad - (ux + 1j * uy)) / np.abs(grad))))
    ok = worst <= 1e-6
    record(6, ok, f"100 points x {len(solutions)} problems: worst rel err {worst:.1e}")


def test_criterion_7_joukowski_round_trip():
    rng = np.random.default_rng(2024)
    worst_rt = 0.0
    min_mod = math.inf
    count = 0
    while count < 1000:
        c = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        r = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        z = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
        if abs(r) < 1e-6:
            continue
        zc = (z - c) / r
        if abs(zc.imag) < 1e-12 and abs(zc.real) <= 1 + 1e-12:
            continue
        w = joukowski_inverse(c, r, z)
        back = joukowski_forward(c, r, w)
        worst_rt = max(worst_rt, abs(back - z) / max(1.0, abs(z)))
        min_mod = min(min_mod, abs(w))
        count += 1
    ok = worst_rt <= 1e-12 and min_mod > 1.0
    record(7, ok, f"1000 triples: worst round-trip {worst_rt:.1e}, min |w| = {min_mod:.6f}")


def test_criterion_8_bounded_annulus():
    prob = Problem((disk(0, 2.0, role="outer"), disk(0, 1.0)), "bounded", None, (0.0, 1.0))
    sol = solve_problem(prob, default_spec(prob, degree=10))
    u = eval_expansion(sol.expansion, complex(math.sqrt(2), 0))
    d = sol.expansion.log_coeffs[0]
    err_u = abs(u - 0.5)
    err_d = abs(d + 1 / math.log(2))
    ok = err_u <= 1e-8 and err_d <= 1e-8
    record(8, ok, f"u(sqrt 2) err {err_u:.1e}, log coefficient err {err_d:.1e}")


def test_criterion_9_streamline_fan(disk1):
    opts = TraceOptions(h_max=1.0, window=(-1500, 1500, -1500, 1500))
    fan = streamline_fan(disk1, 256, 0.01, opts)
    hits = sum(1 for line in fan if line.termination == HIT_BOUNDARY)
    measure = -disk1.expansion.log_coeffs[0]
    frac_ok = abs(hits / 256 - measure) <= 1 / 256
    monotone = True
    for line in fan[::16]:
        u = eval_expansion(disk1.expansion, np.array(line.points))
        monotone &= bool(np.all(np.diff(u) > 0))
    terminated = all(
        line.termination == HIT_BOUNDARY and line.component_index == 0 for line in fan
    )
    ok = frac_ok and monotone and terminated
    record(
        9,
        ok,
        f"hits {hits}/256 vs measure {measure:.6f}; monotone={monotone}, "
        f"all hit the disk={terminated}",
    )


def test_criterion_10_geometric_residual_decay():
    prob = green_problem([disk(3 + 1j, 1.0)], source=0j)
    residuals = []
    for degree in range(2, 15, 2):
        sol = solve_problem(prob, default_spec(prob, degree=degree))
        residuals.append(sol.residual)
    ratios = [a / b for a, b in zip(residuals, residuals[1:])]
    ok = all(r >= 10.0 for r in ratios)
    record(
        10,
        ok,
        "residuals N=2..14: "
        + ", ".join(f"{r:.1e}" for r in residuals)
        + f" (min decade ratio {min(ratios):.1f})",
    )
