import numpy as np
import pytest

from laplace_series import (
    default_spec,
    disk,
    green_problem,
    slit,
    solve_problem,
)
from laplace_series.geometry import OUTER, boundary_distance, contains

# Filled by tests/test_acceptance.py; printed at the end of the run.
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def disk1():
    """The single-disk Green problem: c = 3+i, r = 1, source at the origin."""
    prob = green_problem([disk(3 + 1j, 1.0)], source=0j)
    return solve_problem(prob, default_spec(prob, degree=12))


@pytest.fixture(scope="session")
def slit1():
    """The slanted-slit Green problem: c = 3+i, halfspan 1-0.5i, source at 0."""
    prob = green_problem([slit(3 + 1j, 1 - 0.5j)], source=0j)
    return solve_problem(prob, default_spec(prob, degree=16))


@pytest.fixture(scope="session")
def three_disks():
    comps = [disk(-2 + 2j, 1.0), disk(3 + 1j, 0.8), disk(1 - 2.5j, 0.4)]
    prob = green_problem(comps, source=0j)
    return solve_problem(prob, default_spec(prob, degree=10))


@pytest.fixture(scope="session")
def two_slits():
    comps = [slit(-2 + 1j, 0.8 + 0.3j), slit(2.5 - 1j, 1.0 - 0.2j)]
    prob = green_problem(comps, source=0j)
    return solve_problem(prob, default_spec(prob, degree=12))


def domain_points(problem, n, seed, margin=0.3, box=6.0):
    """Seeded random points in the problem domain, clear of all boundaries."""
    rng = np.random.default_rng(seed)
    outer = next((c for c in problem.components if c.role == OUTER), None)
    pts = []
    while len(pts) < n:
        if outer is not None:
            z = outer.center + complex(
                rng.uniform(-outer.radius, outer.radius),
                rng.uniform(-outer.radius, outer.radius),
            )
            if abs(z - outer.center) > outer.radius - margin:
                continue
        else:
            z = complex(rng.uniform(-box, box), rng.uniform(-box, box))
        if any(
            (c.role != OUTER and contains(c, z)) or boundary_distance(c, z) < margin
            for c in problem.components
        ):
            continue
        if problem.source is not None and abs(z - problem.source) < margin:
            continue
        pts.append(z)
    return np.array(pts)
