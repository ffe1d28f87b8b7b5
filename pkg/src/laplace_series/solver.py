"""Collocation assembly, constrained least-squares solves, residual certificates.

Boundary conditions are imposed at npts >> N sample points per component and
the coefficients solve the overdetermined system in the least-squares sense.
Exterior problems get one extra weighted row enforcing sum(d_j) = -s, which
keeps the expansion regular at infinity.  The a-posteriori certificate is the
maximum boundary misfit on a finer, offset sample grid; by the maximum
principle it bounds the solution error throughout the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
import scipy.linalg

from .basis import (
    Expansion,
    ExpansionSpec,
    design_matrix,
    eval_gradient,
    inner_indices,
    outer_index,
    validate_spec,
)
from .geometry import (
    DISK,
    INNER,
    OUTER,
    SLIT,
    BoundaryComponent,
    GeometryError,
    boundary_nodes,
    components_overlap,
    inside_disk,
    segment_distance,
)

EXTERIOR = "exterior"
BOUNDED = "bounded"

BoundaryData = Union[float, Callable[[np.ndarray], np.ndarray]]

# Pivot threshold for rank-deficient least-squares systems.
RANK_TOL = 1e-13

# Extra factor on the sqrt(total samples) weight of the appended constraint row.
_CONSTRAINT_STIFFNESS = 100.0


@dataclass(frozen=True)
class Problem:
    """A Laplace problem: geometry, domain kind, optional log source, boundary data.

    ``boundary_data[j]`` is either a constant or a real function of boundary
    position (called with an array of complex points).  Degenerate geometry is
    rejected here, not discovered mid-solve.
    """

    components: tuple[BoundaryComponent, ...]
    domain_kind: str = EXTERIOR
    source: complex | None = None
    boundary_data: tuple[BoundaryData, ...] = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.boundary_data is None:
            object.__setattr__(self, "boundary_data", tuple(0.0 for _ in self.components))
        else:
            object.__setattr__(self, "boundary_data", tuple(self.boundary_data))
        if self.source is not None:
            object.__setattr__(self, "source", complex(self.source))
        if self.domain_kind not in (EXTERIOR, BOUNDED):
            raise ValueError(f"unknown domain kind {self.domain_kind!r}")
        if len(self.boundary_data) != len(self.components):
            raise ValueError("boundary_data must give one entry per component")
        self._validate_geometry()

    def _validate_geometry(self):
        comps = self.components
        outers = [j for j, c in enumerate(comps) if c.role == OUTER]
        if self.domain_kind == EXTERIOR and outers:
            raise GeometryError("an exterior problem cannot have an outer component")
        if self.domain_kind == BOUNDED and len(outers) != 1:
            raise GeometryError("a bounded problem needs exactly one outer component")
        inner = inner_indices(comps)
        for i_pos, i in enumerate(inner):
            for j in inner[i_pos + 1 :]:
                if components_overlap(comps[i], comps[j]):
                    raise GeometryError(f"components[{i}] and components[{j}] overlap")
        if outers:
            out = comps[outers[0]]
            for j in inner:
                if not inside_disk(out, comps[j]):
                    raise GeometryError(
                        f"components[{j}] does not lie strictly inside the outer disk"
                    )
        if self.source is not None:
            for j in inner:
                c = comps[j]
                if c.kind == DISK:
                    if abs(self.source - c.center) <= c.radius:
                        raise GeometryError(f"components[{j}] contains the source point")
                elif segment_distance(*c.endpoints, self.source) == 0.0:
                    raise GeometryError(f"components[{j}] passes through the source point")
            if outers and abs(self.source - comps[outers[0]].center) >= comps[outers[0]].radius:
                raise GeometryError("the source lies outside the outer disk")

    @property
    def source_strength(self) -> float:
        return 1.0 if self.source is not None else 0.0

    def data_values(self, j: int, z: np.ndarray) -> np.ndarray:
        g = self.boundary_data[j]
        if callable(g):
            return np.asarray(g(z), dtype=float)
        return np.full(z.shape, float(g))

    def is_green(self) -> bool:
        """Exterior problem, unit source, zero boundary values on every component."""
        return (
            self.domain_kind == EXTERIOR
            and self.source is not None
            and all((not callable(g)) and g == 0.0 for g in self.boundary_data)
        )


def green_problem(components, source: complex = 0j) -> Problem:
    """Exterior Green problem: zero boundary data, unit log source."""
    return Problem(tuple(components), EXTERIOR, source)


@dataclass(frozen=True)
class FitReport:
    rows: int
    cols: int
    npts: tuple[int, ...]
    degrees: tuple[int, ...]
    outer_degree: int = 0


@dataclass(frozen=True)
class Solution:
    problem: Problem
    expansion: Expansion
    residual: float
    fit_report: FitReport

    def __post_init__(self):
        if not (math.isfinite(self.residual) and self.residual >= 0.0):
            raise ValueError("residual certificate must be finite and nonnegative")


@dataclass(frozen=True)
class MeasureReport:
    """Per-component harmonic measures (-d_j) and their sum.

    ``probabilistic`` is False when the solve was not an exterior Green
    problem; the coefficients are still reported but no longer sum to one.
    """

    measures: tuple[float, ...]
    total: float
    probabilistic: bool


def effective_degree(components, spec: ExpansionSpec, j: int) -> int:
    return spec.outer_degree if components[j].role == OUTER else spec.degrees[j]


def default_npts(components, spec: ExpansionSpec) -> list[int]:
    """Oversampled point counts: npts_j = max(32, 8 N_j)."""
    return [max(32, 8 * effective_degree(components, spec, j)) for j in range(len(components))]


def default_spec(problem: Problem, degree: int = 10, scaled: bool = True) -> ExpansionSpec:
    degrees = tuple(0 if c.role == OUTER else degree for c in problem.components)
    outer = degree if any(c.role == OUTER for c in problem.components) else 0
    return ExpansionSpec(degrees=degrees, scaled=scaled, outer_degree=outer)


def _boundary_rows(problem: Problem, spec: ExpansionSpec, npts):
    """Stack collocation rows for all components; rhs is g - (fixed source term)."""
    comps = problem.components
    blocks, rhs = [], []
    for j, comp in enumerate(comps):
        n = int(npts[j])
        if n < 2 * effective_degree(comps, spec, j) + 2:
            raise ValueError(
                f"components[{j}] is undersampled: npts={n} for degree "
                f"{effective_degree(comps, spec, j)}"
            )
        z, w = boundary_nodes(comp, n)
        _check_samples_clear(problem, j, z)
        blocks.append(design_matrix(z, comps, spec, preimages=w, own_index=j))
        g = problem.data_values(j, z)
        if problem.source_strength != 0.0:
            g = g - problem.source_strength * np.log(np.abs(z - problem.source))
        rhs.append(g)
    return np.vstack(blocks), np.concatenate(rhs)


def _check_samples_clear(problem: Problem, j: int, z: np.ndarray) -> None:
    for k, other in enumerate(problem.components):
        if k == j:
            continue
        if other.kind == DISK and other.role == INNER:
            if np.any(np.abs(z - other.center) < other.radius * (1.0 - 1e-12)):
                raise GeometryError(
                    f"samples of components[{j}] fall inside components[{k}]"
                )
        elif other.role == OUTER:
            if np.any(np.abs(z - other.center) > other.radius * (1.0 + 1e-12)):
                raise GeometryError(
                    f"samples of components[{j}] fall outside the outer components[{k}]"
                )


def assemble_system(problem: Problem, spec: ExpansionSpec, npts: Sequence[int]):
    """Build the collocation matrix and right-hand side.

    Exterior problems get one appended constraint row (ones in the d columns)
    weighted by sqrt(total sample count), with right-hand side -s * weight.
    """
    validate_spec(problem.components, spec)
    if len(npts) != len(problem.components):
        raise ValueError("npts must give one count per component")
    A, b = _boundary_rows(problem, spec, npts)
    if problem.domain_kind == EXTERIOR:
        inner = inner_indices(problem.components)
        row = np.zeros(A.shape[1])
        row[1 : 1 + len(inner)] = 1.0
        # The regularity condition at infinity is exact, not a fitted datum, so
        # its row gets a stiff weight; the violation scales as weight^-2.
        weight = _CONSTRAINT_STIFFNESS * math.sqrt(A.shape[0])
        A = np.vstack([A, weight * row])
        b = np.concatenate([b, [-problem.source_strength * weight]])
    return A, b


def solve_least_squares(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimize ||Ax - b||_2 by a column-pivoted orthogonal factorization.

    Small pivots are truncated at relative threshold RANK_TOL, so duplicated
    or nearly dependent columns still give a finite minimizer.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] < A.shape[1]:
        raise ValueError(f"need rows >= cols, got shape {A.shape}")
    if not (np.isfinite(A).all() and np.isfinite(b).all()):
        raise ValueError("matrix and right-hand side must be finite")
    x, _, _, _ = scipy.linalg.lstsq(A, b, cond=RANK_TOL, lapack_driver="gelsy")
    return x


def solve_problem(problem: Problem, spec: ExpansionSpec = None, npts=None) -> Solution:
    """Fit an expansion to the boundary data and certify it on a 4x finer grid."""
    if spec is None:
        spec = default_spec(problem)
    if npts is None:
        npts = default_npts(problem.components, spec)
    A, b = assemble_system(problem, spec, npts)
    x = solve_least_squares(A, b)
    expansion = Expansion.from_vector(
        x, problem.components, spec, source=problem.source,
        source_strength=problem.source_strength,
    )
    report = FitReport(
        rows=A.shape[0],
        cols=A.shape[1],
        npts=tuple(int(n) for n in npts),
        degrees=spec.degrees,
        outer_degree=spec.outer_degree,
    )
    sol = Solution(problem, expansion, 0.0, report)
    residual = boundary_residual(sol, [4 * int(n) for n in npts])
    return Solution(problem, expansion, residual, report)


# Check-grid offsets (fractions of the sample spacing) keep the certificate
# grid disjoint from the fit grid, which uses 0.0 for disks and 0.5 for slits.
_CHECK_OFFSET = {DISK: 0.5, SLIT: 0.25}


def boundary_residual(solution: Solution, nfine) -> float:
    """Max |u - g| over fresh boundary samples offset from the fit grid."""
    problem = solution.problem
    if np.isscalar(nfine):
        nfine = [int(nfine)] * len(problem.components)
    coeffs = solution.expansion.coefficient_vector()
    worst = 0.0
    for j, comp in enumerate(problem.components):
        n = int(nfine[j])
        if n < 1:
            raise ValueError("nfine must be >= 1 per component")
        z, w = boundary_nodes(comp, n, _CHECK_OFFSET[comp.kind])
        u = design_matrix(z, problem.components, solution.expansion.spec,
                          preimages=w, own_index=j) @ coeffs
        if problem.source_strength != 0.0:
            u = u + problem.source_strength * np.log(np.abs(z - problem.source))
        worst = max(worst, float(np.max(np.abs(u - problem.data_values(j, z)))))
    return worst


def harmonic_measures(solution: Solution) -> MeasureReport:
    """Measures -d_j per inner component; probabilistic only for Green problems."""
    measures = tuple(-d for d in solution.expansion.log_coeffs)
    return MeasureReport(
        measures=measures,
        total=float(sum(measures)),
        probabilistic=solution.problem.is_green(),
    )


def circle_flux(solution: Solution, center: complex, radius: float, nnodes: int = 512) -> float:
    """Line integral of the outward normal derivative around a circle.

    Trapezoid rule on uniform nodes; equals 2*pi*d_j when the circle encloses
    only component j, and 2*pi*s around the source alone.
    """
    theta = 2.0 * np.pi * np.arange(nnodes) / nnodes
    nhat = np.exp(1j * theta)
    z = center + radius * nhat
    grad = eval_gradient(solution.expansion, z)
    integrand = (np.conj(grad) * nhat).real
    return float(integrand.sum() * (2.0 * np.pi * radius / nnodes))
