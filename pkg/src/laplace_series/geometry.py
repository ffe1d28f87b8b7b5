"""Boundary components (disks and slits), the slit map pair, and boundary sampling.

A slit with center c and halfspan r is the segment c + r*[-1, 1] in the complex
plane.  The exterior of the unit circle in the w-plane maps onto the exterior of
the slit through z = c + r*(w + 1/w)/2; the inverse branch is chosen so that
|w| > 1 off the slit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DISK = "disk"
SLIT = "slit"
INNER = "inner"
OUTER = "outer"


class DomainError(ValueError):
    """Evaluation requested at a point where the field is not defined."""


class GeometryError(ValueError):
    """Boundary components overlap or otherwise break the problem geometry."""


def _finite(x: complex) -> bool:
    return math.isfinite(x.real) and math.isfinite(x.imag)


@dataclass(frozen=True)
class BoundaryComponent:
    """One boundary piece: a circle (kind="disk") or a segment (kind="slit").

    ``extent`` is the disk radius (stored as a positive real) or the slit
    halfspan (a nonzero complex number).  Only disks may take the "outer" role,
    which marks the enclosing circle of a bounded problem.
    """

    kind: str
    center: complex
    extent: complex
    role: str = INNER

    def __post_init__(self):
        if self.kind not in (DISK, SLIT):
            raise ValueError(f"unknown component kind {self.kind!r}")
        if self.role not in (INNER, OUTER):
            raise ValueError(f"unknown component role {self.role!r}")
        if not (_finite(complex(self.center)) and _finite(complex(self.extent))):
            raise ValueError("component center/extent must be finite")
        if self.kind == DISK:
            if self.extent.imag != 0.0 or self.extent.real <= 0.0:
                raise ValueError("disk radius must be a positive real number")
        else:
            if self.extent == 0:
                raise ValueError("slit halfspan must be nonzero")
            if self.role == OUTER:
                raise ValueError("only a disk can take the outer role")

    @property
    def radius(self) -> float:
        assert self.kind == DISK
        return self.extent.real

    @property
    def halfspan(self) -> complex:
        assert self.kind == SLIT
        return self.extent

    @property
    def endpoints(self) -> tuple[complex, complex]:
        assert self.kind == SLIT
        return (self.center - self.extent, self.center + self.extent)


def disk(center: complex, radius: float, role: str = INNER) -> BoundaryComponent:
    return BoundaryComponent(DISK, complex(center), complex(radius), role)


def slit(center: complex, halfspan: complex) -> BoundaryComponent:
    return BoundaryComponent(SLIT, complex(center), complex(halfspan), INNER)


@dataclass(frozen=True)
class BoundarySample:
    """A boundary collocation point together with its unit-circle preimage.

    The preimage keeps the two sides of a slit distinguishable: conjugate
    preimages land on the same z but carry opposite signs in the odd basis
    terms.
    """

    point: complex
    component_index: int
    preimage: complex


def joukowski_forward(center: complex, halfspan: complex, w):
    """Map w from the exterior of the unit circle to the exterior of the slit.

    Scalars go through the same numpy arithmetic as arrays, so recomputing a
    stored sample point from its preimage reproduces it bit for bit.
    """
    scalar = np.isscalar(w) or (isinstance(w, np.ndarray) and w.ndim == 0)
    wa = np.asarray(w, dtype=complex)
    if np.any(wa == 0):
        raise DomainError("joukowski_forward is undefined at w = 0")
    z = center + halfspan * (wa + 1.0 / wa) / 2.0
    return complex(z) if scalar else z


def _branch_sign(zc):
    """+1 on the open right half-plane and positive imaginary axis, else -1."""
    re = np.real(zc)
    im = np.imag(zc)
    return np.where(re > 0, 1.0, np.where(re < 0, -1.0, np.where(im > 0, 1.0, -1.0)))


def joukowski_inverse(center: complex, halfspan: complex, z):
    """Invert the slit map, returning the preimage with |w| > 1.

    Raises DomainError for z on the closed slit, where the preimage is
    two-valued.
    """
    scalar = np.isscalar(z) or (isinstance(z, np.ndarray) and z.ndim == 0)
    zc = (np.asarray(z, dtype=complex) - center) / halfspan
    on_slit = (zc.imag == 0.0) & (np.abs(zc.real) <= 1.0)
    if np.any(on_slit):
        raise DomainError("inverse slit map is two-valued on the slit itself")
    t = zc * zc - 1.0
    # A -0.0 imaginary part would put points on the branch cut (the imaginary
    # axis of zc) on the wrong side of the principal square root.
    t = np.where(t.imag == 0.0, t.real + 0.0j, t)
    w = zc + _branch_sign(zc) * np.sqrt(t)
    return complex(w) if scalar else w


def sample_boundary(component: BoundaryComponent, npts: int, index: int = 0) -> list[BoundarySample]:
    """Place npts collocation points on a component.

    Disks get angles 2*pi*k/npts.  Slits get preimage angles offset by half a
    step, which keeps the preimages away from w = +-1 (the slit endpoints) and
    makes the two halves of the circle cover the two sides of the slit.
    """
    if npts <= 0:
        raise ValueError(f"npts must be >= 1, got {npts}")
    z, w = boundary_nodes(component, npts)
    if component.kind == SLIT:
        # Rebuild each point through the scalar map so that the stored point
        # is exactly the forward image of the stored preimage.
        return [
            BoundarySample(
                joukowski_forward(component.center, component.halfspan, complex(wi)),
                index,
                complex(wi),
            )
            for wi in w
        ]
    return [BoundarySample(complex(zi), index, complex(wi)) for zi, wi in zip(z, w)]


def boundary_nodes(component: BoundaryComponent, npts: int, offset: float = None):
    """Vectorized boundary sampling; returns (points, preimages) arrays.

    ``offset`` shifts the sample angles by a fraction of the spacing; the
    default is 0 for disks and 0.5 for slits.
    """
    if npts <= 0:
        raise ValueError(f"npts must be >= 1, got {npts}")
    if offset is None:
        offset = 0.5 if component.kind == SLIT else 0.0
    theta = 2.0 * np.pi * (np.arange(npts) + offset) / npts
    w = np.exp(1j * theta)
    if component.kind == DISK:
        z = component.center + component.radius * w
    else:
        z = joukowski_forward(component.center, component.halfspan, w)
    return z, w


def segment_distance(a: complex, b: complex, z) -> float:
    """Euclidean distance from z to the segment [a, b]."""
    ab = b - a
    t = ((np.conj(ab) * (np.asarray(z, dtype=complex) - a)).real) / abs(ab) ** 2
    t = np.clip(t, 0.0, 1.0)
    d = np.abs(a + t * ab - np.asarray(z, dtype=complex))
    return float(d) if np.isscalar(z) else d

def segments_cross(a1: complex, a2: complex, b1: complex, b2: complex) -> bool:
    """True when the closed segments [a1,a2] and [b1,b2] intersect."""

    def orient(p, q, r):
        v = (q - p) * (r - p).conjugate()
        return -v.imag  # cross product (q-p) x (r-p)

    d1 = orient(b1, b2, a1)
    d2 = orient(b1, b2, a2)
    d3 = orient(a1, a2, b1)
    d4 = orient(a1, a2, b2)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on_seg(p, q, r):
        return (
            orient(p, q, r) == 0.0
            and min(p.real, q.real) <= r.real <= max(p.real, q.real)
            and min(p.imag, q.imag) <= r.imag <= max(p.imag, q.imag)
        )

    return on_seg(b1, b2, a1) or on_seg(b1, b2, a2) or on_seg(a1, a2, b1) or on_seg(a1, a2, b2)


def boundary_distance(component: BoundaryComponent, z) -> float:
    """Distance from z to the boundary curve of a component."""
    if component.kind == DISK:
        d = np.abs(np.abs(np.asarray(z, dtype=complex) - component.center) - component.radius)
        return float(d) if np.isscalar(z) else d
    a, b = component.endpoints
    return segment_distance(a, b, z)


def contains(component: BoundaryComponent, z, tol: float = 0.0) -> bool:
    """True when z lies strictly inside a disk (slits have empty interior)."""
    if component.kind != DISK:
        return False
    return abs(complex(z) - component.center) < component.radius - tol


def components_overlap(a: BoundaryComponent, b: BoundaryComponent) -> bool:
    """True when two inner components touch or intersect."""
    if a.kind == DISK and b.kind == DISK:
        return abs(a.center - b.center) <= a.radius + b.radius
    if a.kind == DISK:
        a, b = b, a
    if b.kind == DISK:  # a slit, b disk
        p, q = a.endpoints
        return segment_distance(p, q, b.center) <= b.radius
    return segments_cross(*a.endpoints, *b.endpoints)


def inside_disk(outer: BoundaryComponent, comp: BoundaryComponent) -> bool:
    """True when comp lies strictly inside the disk ``outer``."""
    if comp.kind == DISK:
        return abs(comp.center - outer.center) + comp.radius < outer.radius
    p, q = comp.endpoints
    return max(abs(p - outer.center), abs(q - outer.center)) < outer.radius
