import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import domain_points
from laplace_series import (
    ExpansionSpec,
    GeometryError,
    Problem,
    assemble_system,
    boundary_residual,
    circle_flux,
    default_spec,
    disk,
    eval_expansion,
    green_problem,
    harmonic_measures,
    slit,
    solve_least_squares,
    solve_problem,
)

U2_REF = -0.5893274981708  # converged value of u(2) for the c=3+i, r=1 disk


def test_assembly_shape_single_disk():
    prob = green_problem([disk(3 + 1j, 1.0)], source=0j)
    A, b = assemble_system(prob, ExpansionSpec(degrees=(10,)), [200])
    assert A.shape == (201, 22)
    assert b.shape == (201,)


def test_assembly_shape_four_disks():
    comps = [disk(-3 + 3j, 1.0), disk(3 + 3j, 1.0), disk(3 - 3j, 0.3), disk(-3 - 3j, 0.3)]
    prob = green_problem(comps, source=0j)
    A, _ = assemble_system(prob, ExpansionSpec(degrees=(10,) * 4), [200] * 4)
    assert A.shape == (801, 85)


def test_assembly_green_rhs_is_negative_source_log():
    prob = green_problem([disk(3 + 1j, 1.0)], source=0j)
    A, b = assemble_system(prob, ExpansionSpec(degrees=(4,)), [40])
    z = 3 + 1j + np.exp(2j * np.pi * np.arange(40) / 40)
    assert np.allclose(b[:40], -np.log(np.abs(z)), atol=1e-15)


def test_assembly_rejects_undersampling():
    prob = green_problem([disk(3 + 1j, 1.0)], source=0j)
    with pytest.raises(ValueError, match="undersampled"):
        assemble_system(prob, ExpansionSpec(degrees=(10,)), [21])


def test_problem_validation():
    with pytest.raises(GeometryError, match="overlap"):
        green_problem([disk(0 + 2j, 1.0), disk(1.5 + 2j, 1.0)], source=0j)
    with pytest.raises(GeometryError, match="source"):
        green_problem([disk(0.1, 1.0)], source=0j)
    with pytest.raises(GeometryError, match="outer"):
        Problem((disk(0, 1.0, role="outer"),), "exterior", None, (0.0,))
    with pytest.raises(GeometryError, match="outer"):
        Problem((disk(0, 1.0),), "bounded", None, (0.0,))
    with pytest.raises(GeometryError, match="inside"):
        Problem(
            (disk(0, 1.0, role="outer"), disk(0.9, 0.5)),
            "bounded", None, (0.0, 0.0),
        )
    with pytest.raises(GeometryError, match="overlap"):
        green_problem([slit(2, 1.0), slit(2.5 + 1j, 1j)], source=0j)


def test_lstsq_square_system():
    A = np.array([[2.0, 1.0], [1.0, 3.0]])
    x = solve_least_squares(np.vstack([A]), np.array([3.0, 4.0]))
    assert np.allclose(A @ x, [3.0, 4.0], atol=1e-14)


def test_lstsq_consistent_overdetermined():
    A = np.array([[1.0, 2.0], [3.0, 1.0], [1.0, 2.0], [3.0, 1.0]])
    b = A @ np.array([0.7, -0.3])
    x = solve_least_squares(A, b)
    assert np.allclose(x, [0.7, -0.3], atol=1e-14)


def test_lstsq_duplicate_column_matches_reduced_system():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((30, 4))
    A = np.column_stack([A, A[:, 1]])  # duplicated column
    b = rng.standard_normal(30)
    x = solve_least_squares(A, b)
    assert np.all(np.isfinite(x))
    r_full = np.linalg.norm(A @ x - b)
    x_red = solve_least_squares(A[:, :4], b)
    r_red = np.linalg.norm(A[:, :4] @ x_red - b)
    assert abs(r_full - r_red) < 1e-10


def test_lstsq_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_least_squares(np.ones((2, 3)), np.ones(2))
    with pytest.raises(ValueError):
        solve_least_squares(np.array([[1.0], [np.inf]]), np.ones(2))


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=1000))
def test_lstsq_never_worse_than_zero(cols, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((cols + 5, cols))
    b = rng.standard_normal(cols + 5)
    x = solve_least_squares(A, b)
    assert np.linalg.norm(A @ x - b) <= np.linalg.norm(b) + 1e-12


def test_disk1_paper_digits():
    prob = green_problem([disk(3 + 1j, 1.0)], source=0j)
    for degree, digits in ((4, 4), (8, 7), (12, 10)):
        sol = solve_problem(prob, default_spec(prob, degree=degree))
        u2 = eval_expansion(sol.expansion, 2.0 + 0j)
        rel = abs(u2 - U2_REF) / abs(U2_REF)
        assert rel <= 10.0 ** (1 - digits)


def test_symmetric_disks_split_evenly():
    prob = green_problem([disk(-2.0, 0.5), disk(2.0, 0.5)], source=0j)
    sol = solve_problem(prob, default_spec(prob, degree=10))
    report = harmonic_measures(sol)
    assert report.probabilistic
    assert abs(report.measures[0] - 0.5) < 1e-9
    assert abs(report.measures[1] - 0.5) < 1e-9
    assert abs(report.total - 1.0) < 1e-9


def test_residual_certificate_values(disk1):
    # Recorded from this implementation: the degree-12 certificate sits at
    # 3.4e-8 (the exact truncation tail of the image-charge series).
    assert disk1.residual < 1e-7
    fine = boundary_residual(disk1, 1000)
    assert fine < 1e-7


def test_identity_fit_has_machine_residual():
    # Bounded Green function of the unit disk with the source at the center
    # is exactly log|z|, which the expansion represents exactly.
    prob = Problem((disk(0, 1.0, role="outer"),), "bounded", 0j, (0.0,))
    sol = solve_problem(prob, default_spec(prob, degree=8))
    assert sol.residual <= 1e-14


def test_degree_zero_fit_has_positive_residual():
    prob = green_problem([disk(3 + 1j, 1.0)], source=0j)
    sol = solve_problem(prob, ExpansionSpec(degrees=(0,)))
    assert sol.residual > 1e-3


def test_constraint_row_enforced(disk1, three_disks, two_slits):
    for sol in (disk1, three_disks, two_slits):
        assert abs(sum(sol.expansion.log_coeffs) + 1.0) < 1e-10


def test_flux_quantization(three_disks):
    comps = three_disks.problem.components
    for j, comp in enumerate(comps):
        others = [abs(comp.center - c.center) for k, c in enumerate(comps) if k != j]
        radius = comp.radius + 0.3 * (min(min(others), abs(comp.center)) - comp.radius)
        flux = circle_flux(three_disks, comp.center, radius)
        d = three_disks.expansion.log_coeffs[j]
        assert abs(flux - 2 * np.pi * d) < 1e-6 * abs(2 * np.pi * d)
    src = circle_flux(three_disks, 0j, 0.4)
    assert abs(src - 2 * np.pi) < 1e-6 * 2 * np.pi


def test_convergence_one_digit_per_two_degrees():
    prob = green_problem([disk(3 + 1j, 1.0)], source=0j)
    ref = solve_problem(prob, default_spec(prob, degree=24))
    u_ref = eval_expansion(ref.expansion, 2.0 + 0j)
    errs = []
    for degree in range(2, 15, 2):
        sol = solve_problem(prob, default_spec(prob, degree=degree))
        errs.append(abs(eval_expansion(sol.expansion, 2.0 + 0j) - u_ref))
    for worse, better in zip(errs, errs[1:]):
        assert better <= worse / 10.0


def test_refinement_stability(disk1):
    prob = disk1.problem
    spec = default_spec(prob, degree=12)
    doubled = solve_problem(prob, spec, [2 * n for n in disk1.fit_report.npts])
    pts = domain_points(prob, 10, seed=21)
    du = np.abs(
        eval_expansion(disk1.expansion, pts) - eval_expansion(doubled.expansion, pts)
    )
    assert np.max(du) <= 10 * disk1.residual


def test_maximum_principle_negative_field(disk1):
    pts = domain_points(disk1.problem, 200, seed=13, box=8.0)
    u = eval_expansion(disk1.expansion, pts)
    assert np.all(u < disk1.residual)


def test_nonzero_boundary_data_flagged_non_probabilistic():
    comps = [disk(-2.0, 0.5), disk(2.0, 0.5)]
    prob = Problem(tuple(comps), "exterior", 0j, (0.0, -1.0))
    sol = solve_problem(prob, default_spec(prob, degree=10))
    report = harmonic_measures(sol)
    assert not report.probabilistic
    assert len(report.measures) == 2


def test_callable_boundary_data():
    prob = Problem(
        (disk(3 + 1j, 1.0),), "exterior", 0j,
        (lambda z: np.log(np.abs(z)),),
    )
    sol = solve_problem(prob, default_spec(prob, degree=16))
    assert sol.residual < 1e-10


def test_bounded_annulus_analytic_solution():
    prob = Problem(
        (disk(0, 2.0, role="outer"), disk(0, 1.0)),
        "bounded", None, (0.0, 1.0),
    )
    sol = solve_problem(prob, default_spec(prob, degree=10))
    u = eval_expansion(sol.expansion, complex(math.sqrt(2), 0))
    assert abs(u - 0.5) < 1e-8
    assert abs(sol.expansion.log_coeffs[0] + 1 / math.log(2)) < 1e-8
