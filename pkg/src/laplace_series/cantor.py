"""Middle-thirds interval approximations and their harmonic-measure study.

Level m keeps the 2^m closed intervals left after removing the middle third of
each remaining piece m times, starting from [-1.5, 1.5].  Each interval becomes
a slit, the Green source sits at the origin, and the per-slit degree follows
the schedule N = max(2, 6 - m): once the slits are short and well separated, a
tiny degree already gives six digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .basis import ExpansionSpec
from .geometry import BoundaryComponent, joukowski_inverse, slit
from .solver import (
    _CONSTRAINT_STIFFNESS,
    Problem,
    Solution,
    green_problem,
    harmonic_measures,
    solve_least_squares,
    solve_problem,
)

MAX_LEVEL = 12


@dataclass(frozen=True)
class CantorLevel:
    m: int
    slits: tuple[BoundaryComponent, ...]
    total_span: tuple[float, float] = (-1.5, 1.5)


def cantor_degree(m: int) -> int:
    return max(2, 6 - m)


def cantor_components(m: int) -> CantorLevel:
    """The 2^m slits of the level-m approximation, left to right.

    Endpoints are built in exact ternary rationals and converted to floats
    once, so deep levels carry no accumulated drift.
    """
    if not 1 <= m <= MAX_LEVEL:
        raise ValueError(f"level must be in 1..{MAX_LEVEL}, got {m}")
    intervals = [(Fraction(-3, 2), Fraction(3, 2))]
    for _ in range(m):
        nxt = []
        for a, b in intervals:
            third = (b - a) / 3
            nxt.append((a, a + third))
            nxt.append((b - third, b))
        intervals = nxt
    slits = tuple(
        slit(float((a + b) / 2), float((b - a) / 2)) for a, b in intervals
    )
    return CantorLevel(m=m, slits=slits, total_span=(-1.5, 1.5))


def cantor_problem(m: int) -> Problem:
    return green_problem(cantor_components(m).slits, source=0j)


def cantor_spec(m: int, nslits: int = None) -> ExpansionSpec:
    n = nslits if nslits is not None else 2**m
    return ExpansionSpec(degrees=(cantor_degree(m),) * n, scaled=True)


def cantor_solution(m: int) -> Solution:
    """Green solve over all 2^m slits by the general path."""
    return solve_problem(cantor_problem(m), cantor_spec(m))


def cantor_measures(m: int, use_symmetry: bool = False) -> list[float]:
    """Harmonic measures of the right-half-plane slits, ordered inside out.

    With ``use_symmetry`` the solve drops the odd basis terms (real-axis
    symmetry), folds mirror-image slits into shared columns (even symmetry),
    and samples only the upper side of the right-half slits; the result agrees
    with the general path to solver accuracy.
    """
    if use_symmetry:
        return _symmetric_measures(m)
    sol = cantor_solution(m)
    report = harmonic_measures(sol)
    comps = sol.problem.components
    right = sorted(
        (j for j, c in enumerate(comps) if c.center.real > 0),
        key=lambda j: comps[j].center.real,
    )
    return [report.measures[j] for j in right]


def cantor_inner_half_sum(m: int) -> float:
    """Total measure of the half of the right-half-plane slits closer to the origin."""
    if m < 2:
        raise ValueError("inner-half sums need m >= 2")
    measures = cantor_measures(m)
    return float(sum(measures[: 2 ** (m - 2)]))


def _symmetric_measures(m: int) -> list[float]:
    level = cantor_components(m)
    right = [c for c in level.slits if c.center.real > 0]
    right.sort(key=lambda c: c.center.real)
    npairs = len(right)
    deg = cantor_degree(m)
    nup = max(16, 4 * deg)

    rows = []
    rhs = []
    for comp in right:
        theta = np.pi * (np.arange(nup) + 0.5) / nup
        w_own = np.exp(1j * theta)
        z = comp.center + comp.halfspan * (w_own + 1.0 / w_own) / 2.0
        block = np.empty((nup, 1 + npairs * (1 + deg)))
        block[:, 0] = 1.0
        for p, sl in enumerate(right):
            if sl is comp:
                w_pos = w_own
            else:
                w_pos = joukowski_inverse(sl.center, sl.halfspan, z)
            w_neg = joukowski_inverse(sl.center, sl.halfspan, -z)
            block[:, 1 + p] = np.log(np.abs(w_pos)) + np.log(np.abs(w_neg))
            pk_pos, pk_neg = 1.0 / w_pos, 1.0 / w_neg
            tp, tn = np.ones_like(w_pos), np.ones_like(w_neg)
            for k in range(1, deg + 1):
                tp = tp * pk_pos
                tn = tn * pk_neg
                block[:, 1 + npairs + p * deg + (k - 1)] = tp.real + tn.real
        rows.append(block)
        rhs.append(-np.log(np.abs(z)))
    A = np.vstack(rows)
    b = np.concatenate(rhs)
    weight = _CONSTRAINT_STIFFNESS * math.sqrt(A.shape[0])
    constraint = np.zeros(A.shape[1])
    constraint[1 : 1 + npairs] = 2.0
    A = np.vstack([A, weight * constraint])
    b = np.concatenate([b, [-weight]])
    x = solve_least_squares(A, b)
    return [float(-d) for d in x[1 : 1 + npairs]]
