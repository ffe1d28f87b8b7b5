"""Equipotential polylines, gradient-ascent streamlines, slit side measures.

Streamlines integrate dz/dt = grad u / |grad u| with an embedded 2nd/3rd-order
Runge-Kutta pair and a small step cap; large steps near slits risk hopping
over the slit and picking the wrong branch, so steps that would cross a slit
are rejected outright.  Equipotentials come from marching squares on a masked
grid rather than ODE tracing, which sidesteps branch bookkeeping when the
topology changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .basis import _scalar_u_fprime, complex_derivative, eval_expansion
from .geometry import (
    DISK,
    OUTER,
    SLIT,
    DomainError,
    boundary_distance,
    contains,
    joukowski_forward,
    joukowski_inverse,
    segments_cross,
)
from .solver import Solution

HIT_BOUNDARY = "hit_boundary"
LEFT_WINDOW = "left_window"
STEP_LIMIT = "step_limit"

EQUIPOTENTIAL = "equipotential"
STREAMLINE = "streamline"


@dataclass(frozen=True)
class Polyline:
    """An ordered point sequence: one equipotential level or one streamline.

    ``value`` is the contour level or the streamline seed angle.  ``termination``
    is None for closed contour loops (first vertex repeated at the end).
    """

    points: tuple[complex, ...]
    kind: str
    value: float
    termination: str | None
    component_index: int | None = None
    stagnated: bool = False

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("a polyline needs at least 2 points")


@dataclass(frozen=True)
class TraceOptions:
    h_max: float = 0.05
    delta_stop: float = 1e-3
    max_steps: int = 20000
    window: tuple[float, float, float, float] | None = None
    step_tol: float = 1e-6
    h_min: float = 1e-10


def default_window(problem, pad: float = 1.6) -> tuple[float, float, float, float]:
    """A square window around all components and the source."""
    xs, ys = [], []
    for comp in problem.components:
        if comp.kind == DISK:
            xs += [comp.center.real - comp.radius, comp.center.real + comp.radius]
            ys += [comp.center.imag - comp.radius, comp.center.imag + comp.radius]
        else:
            for e in comp.endpoints:
                xs.append(e.real)
                ys.append(e.imag)
    if problem.source is not None:
        xs.append(problem.source.real)
        ys.append(problem.source.imag)
    if not xs:
        xs, ys = [0.0], [0.0]
    cx = (min(xs) + max(xs)) / 2.0
    cy = (min(ys) + max(ys)) / 2.0
    half = max(max(xs) - min(xs), max(ys) - min(ys), 2.0) * pad / 2.0
    return (cx - half, cx + half, cy - half, cy + half)


def _in_window(window, z: complex) -> bool:
    x0, x1, y0, y1 = window
    return x0 <= z.real <= x1 and y0 <= z.imag <= y1


def _near_component(problem, z: complex, delta: float):
    """Index of a component whose boundary is within delta of z, else None.

    Slits get a second proximity test through the preimage: the angle-plane
    coordinate log|w| vanishes on the slit and scales like distance/|halfspan|,
    so it catches approaches that Euclidean distance underestimates near the
    endpoints.
    """
    for j, comp in enumerate(problem.components):
        if boundary_distance(comp, z) < delta:
            return j
        if comp.kind == SLIT:
            try:
                w = joukowski_inverse(comp.center, comp.halfspan, z)
            except DomainError:
                return j
            if math.log(abs(w)) < delta / abs(comp.halfspan):
                return j
    return None


def _crossed_boundary(problem, a: complex, b: complex):
    """Component whose boundary the step [a, b] jumps across, else None.

    The expansion continues smoothly across every boundary (inside a disk it
    climbs toward the center singularities), so the integrator must not be
    allowed to ascend through; offending steps are rejected and shrunk until
    the proximity stop takes over.
    """
    for j, comp in enumerate(problem.components):
        if comp.kind == SLIT:
            if segments_cross(a, b, *comp.endpoints):
                return j
        elif comp.role == OUTER:
            if abs(b - comp.center) >= comp.radius:
                return j
        elif contains(comp, b):
            return j
    return None


def _outside_domain(problem, z: complex) -> bool:
    for comp in problem.components:
        if comp.role == OUTER:
            if abs(z - comp.center) >= comp.radius:
                return True
        elif contains(comp, z):
            return True
    return False


def trace_streamline(solution: Solution, z0: complex, opts: TraceOptions = None) -> Polyline:
    """Climb the gradient from z0 until a boundary, the window edge, or the step cap.

    Steps are accepted only when the embedded error estimate passes, u strictly
    increases, and the step does not jump across a slit.
    """
    problem = solution.problem
    exp = solution.expansion
    opts = opts or TraceOptions()
    window = opts.window or default_window(problem)
    z0 = complex(z0)
    if _outside_domain(problem, z0) or not _in_window(window, z0):
        raise ValueError("streamline seed lies outside the domain")

    def field(z: complex) -> complex:
        _, fp = _scalar_u_fprime(exp, z, need_u=False)
        g = fp.conjugate()
        mag = abs(g)
        if mag < 1e-12:
            raise _Stagnation()
        return g / mag

    points = [z0]
    z = z0
    try:
        u_cur, fp = _scalar_u_fprime(exp, z)
    except DomainError:
        raise ValueError("streamline seed lies outside the domain")
    if abs(fp) < 1e-12:
        return _polyline(points, STEP_LIMIT, None, True, z0, problem)
    h = opts.h_max / 8.0
    steps = 0
    while steps < opts.max_steps:
        try:
            k1 = field(z)
            k2 = field(z + 0.5 * h * k1)
            k3 = field(z + 0.75 * h * k2)
            z_new = z + h * (2.0 * k1 + 3.0 * k2 + 4.0 * k3) / 9.0
            k4 = field(z_new)
            err = abs(h * (-5.0 * k1 + 6.0 * k2 + 8.0 * k3 - 9.0 * k4) / 72.0)
            u_new, fp_new = _scalar_u_fprime(exp, z_new)
        except _Stagnation:
            return _polyline(points, STEP_LIMIT, None, True, z0, problem)
        except DomainError:
            if h <= 4.0 * opts.h_min:
                return _polyline(points, STEP_LIMIT, None, True, z0, problem)
            h = max(h / 2.0, opts.h_min)
            continue
        if err > opts.step_tol and h > opts.h_min:
            h = max(h * max(0.25, 0.9 * (opts.step_tol / err) ** (1.0 / 3.0)), opts.h_min)
            continue
        crossed = _crossed_boundary(problem, z, z_new)
        if crossed is not None:
            if h <= 4.0 * opts.h_min:
                return _polyline(points, HIT_BOUNDARY, crossed, False, z0, problem)
            h = max(h / 2.0, opts.h_min)
            continue
        if u_new <= u_cur:
            if h <= 4.0 * opts.h_min:
                return _polyline(points, STEP_LIMIT, None, True, z0, problem)
            h = max(h / 2.0, opts.h_min)
            continue
        z, u_cur = z_new, u_new
        points.append(z)
        steps += 1
        near = _near_component(problem, z, opts.delta_stop)
        if near is not None:
            return _polyline(points, HIT_BOUNDARY, near, False, z0, problem)
        if not _in_window(window, z):
            return _polyline(points, LEFT_WINDOW, None, False, z0, problem)
        if abs(fp_new) < 1e-12:
            return _polyline(points, STEP_LIMIT, None, True, z0, problem)
        if err > 0:
            h = min(h * min(4.0, 0.9 * (opts.step_tol / err) ** (1.0 / 3.0)), opts.h_max)
        else:
            h = min(h * 4.0, opts.h_max)
    points.append(z)
    return _polyline(points, STEP_LIMIT, None, False, z0, problem)


class _Stagnation(Exception):
    pass


def _seed_angle(z0: complex, problem) -> float:
    origin = problem.source if problem.source is not None else 0j
    return math.atan2((z0 - origin).imag, (z0 - origin).real)


def _polyline(points, termination, component_index, stagnated, z0, problem) -> Polyline:
    # Degenerate immediate stops get a microscopic pad so the polyline keeps
    # its two-point invariant.
    if len(points) == 1:
        points = points + [points[0] + 1e-12]
    return Polyline(
        points=tuple(points),
        kind=STREAMLINE,
        value=_seed_angle(z0, problem),
        termination=termination,
        component_index=component_index,
        stagnated=stagnated,
    )


def streamline_fan(solution: Solution, nseeds: int, eps: float, opts: TraceOptions = None):
    """Trace nseeds streamlines from equally spaced points on an eps-circle
    around the source."""
    problem = solution.problem
    if problem.source is None:
        raise ValueError("streamline fans need a problem with a source")
    if nseeds < 1:
        raise ValueError("nseeds must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    for j, comp in enumerate(problem.components):
        if comp.role != OUTER and boundary_distance(comp, problem.source) <= eps:
            raise ValueError(f"eps-circle around the source reaches components[{j}]")
    lines = []
    for k in range(nseeds):
        angle = 2.0 * math.pi * k / nseeds
        z0 = problem.source + eps * complex(math.cos(angle), math.sin(angle))
        line = trace_streamline(solution, z0, opts)
        lines.append(replace(line, value=angle))
    return lines


# Marching-squares lookup: cell corners 0..3 are (i,j),(i+1,j),(i+1,j+1),(i,j+1);
# edges 0..3 join corners (0,1),(1,2),(2,3),(3,0).  Entries map the 4-bit
# "corner above level" code to the pair of crossed edges; the two saddle codes
# are resolved by the cell-average rule at runtime.
_MS_EDGES = {
    1: [(3, 0)],
    2: [(0, 1)],
    3: [(3, 1)],
    4: [(1, 2)],
    6: [(0, 2)],
    7: [(3, 2)],
    8: [(2, 3)],
    9: [(0, 2)],
    11: [(1, 2)],
    12: [(1, 3)],
    13: [(0, 1)],
    14: [(3, 0)],
}
_MS_SADDLE = {
    5: ([(3, 0), (1, 2)], [(0, 1), (2, 3)]),
    10: ([(0, 1), (2, 3)], [(3, 0), (1, 2)]),
}


def _domain_mask(problem, X, Y, slit_clear: float = 1e-6):
    """True where the grid point belongs to the computational domain."""
    Z = X + 1j * Y
    ok = np.ones(Z.shape, dtype=bool)
    if problem.source is not None:
        ok &= Z != problem.source
    for comp in problem.components:
        if comp.kind == DISK:
            r = np.abs(Z - comp.center)
            if comp.role == OUTER:
                ok &= r < comp.radius * (1.0 - 1e-12)
            else:
                ok &= r > comp.radius * (1.0 + 1e-12)
        else:
            a, b = comp.endpoints
            ab = b - a
            t = np.clip(((Z - a) * np.conj(ab)).real / abs(ab) ** 2, 0.0, 1.0)
            ok &= np.abs(a + t * ab - Z) > slit_clear
    return ok


def _slit_cell_mask(problem, window, grid_n):
    """Cells crossed by a slit; interpolating u across a slit is meaningless."""
    x0, x1, y0, y1 = window
    dx = (x1 - x0) / (grid_n - 1)
    dy = (y1 - y0) / (grid_n - 1)
    bad = np.zeros((grid_n - 1, grid_n - 1), dtype=bool)
    for comp in problem.components:
        if comp.kind != SLIT:
            continue
        a, b = comp.endpoints
        nsmp = 8 * grid_n
        t = np.linspace(0.0, 1.0, nsmp)
        pts = a + t * (b - a)
        ii = np.floor((pts.real - x0) / dx).astype(int)
        jj = np.floor((pts.imag - y0) / dy).astype(int)
        keep = (ii >= 0) & (ii < grid_n - 1) & (jj >= 0) & (jj < grid_n - 1)
        bad[jj[keep], ii[keep]] = True
    return bad


def extract_contours(solution: Solution, levels, window, grid_n: int):
    """Level polylines of u on a grid over the window, by marching squares."""
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, grid_n)
    ys = np.linspace(y0, y1, grid_n)
    X, Y = np.meshgrid(xs, ys)
    mask = _domain_mask(solution.problem, X, Y)
    U = np.full(X.shape, np.nan)
    Z = (X + 1j * Y)[mask]
    if Z.size:
        U[mask] = eval_expansion(solution.expansion, Z)
    cell_bad = _slit_cell_mask(solution.problem, window, grid_n)

    out = []
    corner_ok = mask[:-1, :-1] & mask[:-1, 1:] & mask[1:, 1:] & mask[1:, :-1]
    for level in levels:
        segments = _cells_to_segments(U, xs, ys, float(level), corner_ok & ~cell_bad)
        for points, closed in _chain_segments(segments):
            if len(points) < 2:
                continue
            out.append(
                Polyline(
                    points=tuple(points),
                    kind=EQUIPOTENTIAL,
                    value=float(level),
                    termination=None if closed else LEFT_WINDOW,
                )
            )
    return out


def _cells_to_segments(U, xs, ys, level, cell_ok):
    corners_val = (U[:-1, :-1], U[:-1, 1:], U[1:, 1:], U[1:, :-1])
    above = [v > level for v in corners_val]
    code = above[0] * 1 + above[1] * 2 + above[2] * 4 + above[3] * 8
    active = cell_ok & (code > 0) & (code < 15)
    jj, ii = np.nonzero(active)
    segments = []
    for j, i in zip(jj, ii):
        c = int(code[j, i])
        vals = (U[j, i], U[j, i + 1], U[j + 1, i + 1], U[j + 1, i])
        pts = (
            complex(xs[i], ys[j]),
            complex(xs[i + 1], ys[j]),
            complex(xs[i + 1], ys[j + 1]),
            complex(xs[i], ys[j + 1]),
        )
        if c in _MS_SADDLE:
            lo, hi = _MS_SADDLE[c]
            edges = hi if (sum(vals) / 4.0) > level else lo
        else:
            edges = _MS_EDGES[c]
        for e1, e2 in edges:
            segments.append((_edge_point(e1, pts, vals, level), _edge_point(e2, pts, vals, level)))
    return segments


def _edge_point(edge, pts, vals, level):
    a, b = edge, (edge + 1) % 4
    va, vb = vals[a], vals[b]
    t = 0.5 if vb == va else (level - va) / (vb - va)
    t = min(max(t, 0.0), 1.0)
    return pts[a] + t * (pts[b] - pts[a])


def _chain_segments(segments, tol_digits: int = 9):
    """Join segments that share endpoints into open chains and closed loops."""

    def key(z):
        return (round(z.real, tol_digits), round(z.imag, tol_digits))

    links: dict = {}
    for idx, (a, b) in enumerate(segments):
        links.setdefault(key(a), []).append((idx, 0))
        links.setdefault(key(b), []).append((idx, 1))
    used = [False] * len(segments)

    def walk(idx, end):
        # Walk outward from segment idx through its `end` endpoint, collecting
        # the points visited (starting with that endpoint itself).
        chain = []
        cur, out_end = idx, end
        while True:
            a, b = segments[cur]
            pt = b if out_end == 1 else a
            chain.append(pt)
            candidates = [(i, e) for (i, e) in links.get(key(pt), []) if not used[i]]
            if not candidates:
                return chain
            nxt, e = candidates[0]
            used[nxt] = True
            cur, out_end = nxt, 1 - e

    chains = []
    for idx in range(len(segments)):
        if used[idx]:
            continue
        used[idx] = True
        fwd = walk(idx, 1)
        bwd = walk(idx, 0)
        pts = list(reversed(bwd)) + fwd
        closed = len(pts) > 3 and key(pts[0]) == key(pts[-1])
        chains.append((pts, closed))
    out = []
    for pts, closed in chains:
        cleaned = [pts[0]]
        for p in pts[1:]:
            if key(p) != key(cleaned[-1]):
                cleaned.append(p)
        if closed:
            if key(cleaned[0]) == key(cleaned[-1]):
                cleaned[-1] = cleaned[0]
            else:
                cleaned.append(cleaned[0])
        out.append((cleaned, closed))
    return out


def slit_side_measure(solution: Solution, slit_index: int, side: str, nquad: int = 256,
                      offset: float = None) -> float:
    """Harmonic measure carried by one side of a slit.

    Integrates the flux (1/2pi) int du/dn ds along an offset contour hugging
    the side: the image of half the circle |w| = 1 + mu under the slit map,
    whose quadrature nodes cluster at the slit endpoints.  ``side`` is
    "facing" (toward the source) or "away".
    """
    problem = solution.problem
    comp = problem.components[slit_index]
    if comp.kind != SLIT:
        raise ValueError(f"components[{slit_index}] is not a slit")
    if side not in ("facing", "away"):
        raise ValueError("side must be 'facing' or 'away'")
    if nquad < 2:
        raise ValueError("nquad must be >= 2")
    if offset is None:
        offset = 1e-4 * abs(comp.halfspan)
    mu = offset / abs(comp.halfspan)

    origin = problem.source if problem.source is not None else 0j
    # The upper half of the w-circle maps to the side displayed in direction
    # i*halfspan from the slit center.
    upper_is_facing = ((1j * comp.halfspan).conjugate() * (origin - comp.center)).real > 0
    want_upper = (side == "facing") == upper_is_facing

    nodes, weights = np.polynomial.legendre.leggauss(nquad)
    if want_upper:
        theta = 0.5 * np.pi * (nodes + 1.0)
    else:
        theta = np.pi + 0.5 * np.pi * (nodes + 1.0)
    w = (1.0 + mu) * np.exp(1j * theta)
    z = joukowski_forward(comp.center, comp.halfspan, w)
    dz_dtheta = comp.halfspan / 2.0 * (1.0 - w**-2) * 1j * w
    fp = complex_derivative(solution.expansion, z)
    flux = float(np.imag(np.sum(weights * fp * dz_dtheta)) * 0.5 * np.pi)
    return -flux / (2.0 * np.pi)
