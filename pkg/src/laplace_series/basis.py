"""Series terms for exterior and bounded expansions, and their gradients.

An expansion approximates a harmonic function as

    u(z) = s*log|z - z_s| + C
         + sum_j [ d_j*L_j(z) + sum_k ( a_jk*Re T_j(z)^-k + b_jk*Im T_j(z)^-k ) ]
         + sum_k ( A_k*Re T_0(z)^k + B_k*Im T_0(z)^k )          (bounded only)

where for a disk component L_j = log|z - c_j| and T_j = (z - c_j)/r_j when the
basis is scaled (plain z - c_j otherwise), and for a slit component L_j =
log|w_j(z)| and T_j = w_j(z) with w_j the inverse slit map.  The outer block
T_0 = (z - c_0)/r_0 uses positive powers.  The source term has a fixed unit
coefficient and never enters the fitted columns.

Gradients use the identity grad Re f = conj(f') applied to the analytic
completion of each term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    DISK,
    INNER,
    OUTER,
    SLIT,
    BoundaryComponent,
    DomainError,
    joukowski_inverse,
)


@dataclass(frozen=True)
class ExpansionSpec:
    """Degrees and scaling choices for one expansion.

    ``degrees[j]`` is the negative-power degree of component j; the entry for
    an outer component must be 0, with its positive-power degree carried by
    ``outer_degree``.  ``scaled`` switches disk power columns from (z-c)^-k to
    ((z-c)/r)^-k, which keeps matrix columns near unit size.
    """

    degrees: tuple[int, ...]
    scaled: bool = True
    outer_degree: int = 0

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(n) for n in self.degrees))
        if any(n < 0 for n in self.degrees):
            raise ValueError("degrees must be >= 0")
        if self.outer_degree < 0:
            raise ValueError("outer_degree must be >= 0")


def validate_spec(components: tuple[BoundaryComponent, ...], spec: ExpansionSpec) -> None:
    if len(spec.degrees) != len(components):
        raise ValueError(
            f"spec lists {len(spec.degrees)} degrees for {len(components)} components"
        )
    for j, comp in enumerate(components):
        if comp.role == OUTER and spec.degrees[j] != 0:
            raise ValueError("outer component takes outer_degree, not a negative-power degree")


def inner_indices(components) -> list[int]:
    return [j for j, c in enumerate(components) if c.role == INNER]


def outer_index(components) -> int | None:
    for j, c in enumerate(components):
        if c.role == OUTER:
            return j
    return None


def column_count(components, spec: ExpansionSpec) -> int:
    inner = inner_indices(components)
    return 1 + len(inner) + sum(2 * spec.degrees[j] for j in inner) + 2 * spec.outer_degree


def column_labels(components, spec: ExpansionSpec) -> list[str]:
    """Human-readable names for the columns, in matrix order."""
    inner = inner_indices(components)
    labels = ["C"] + [f"d[{j}]" for j in inner]
    for j in inner:
        for k in range(1, spec.degrees[j] + 1):
            labels += [f"a[{j},{k}]", f"b[{j},{k}]"]
    for k in range(1, spec.outer_degree + 1):
        labels += [f"A[{k}]", f"B[{k}]"]
    return labels


def _powers(t: np.ndarray, n: int) -> np.ndarray:
    """Stack t, t^2, ..., t^n column-wise by cumulative products."""
    if n == 0:
        return np.empty((t.shape[0], 0), dtype=complex)
    return np.multiply.accumulate(np.broadcast_to(t[:, None], (t.shape[0], n)), axis=1)


def design_matrix(z, components, spec: ExpansionSpec, preimages=None, own_index: int = None):
    """Rows of basis values at the points z (one row per point).

    ``preimages``/``own_index`` feed precomputed slit preimages for points that
    lie on component ``own_index`` itself, where the inverse map is two-valued
    and the stored sampling preimage decides the side.
    """
    validate_spec(components, spec)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    inner = inner_indices(components)
    ncols = column_count(components, spec)
    A = np.empty((z.shape[0], ncols), dtype=float)
    A[:, 0] = 1.0

    col = 1 + len(inner)
    for slot, j in enumerate(inner):
        comp = components[j]
        n = spec.degrees[j]
        if comp.kind == DISK:
            dz = z - comp.center
            A[:, 1 + slot] = np.log(np.abs(dz))
            t = (comp.radius / dz) if spec.scaled else (1.0 / dz)
        else:
            if j == own_index and preimages is not None:
                w = np.asarray(preimages, dtype=complex)
            else:
                w = joukowski_inverse(comp.center, comp.halfspan, z)
            A[:, 1 + slot] = np.log(np.abs(w))
            t = 1.0 / w
        p = _powers(t, n)
        A[:, col : col + 2 * n : 2] = p.real
        A[:, col + 1 : col + 2 * n : 2] = p.imag
        col += 2 * n

    oj = outer_index(components)
    if spec.outer_degree > 0:
        if oj is None:
            raise ValueError("outer_degree > 0 requires an outer component")
        out = components[oj]
        p = _powers((z - out.center) / out.radius, spec.outer_degree)
        A[:, col : col + 2 * spec.outer_degree : 2] = p.real
        A[:, col + 1 : col + 2 * spec.outer_degree : 2] = p.imag
        col += 2 * spec.outer_degree
    assert col == ncols
    return A


def basis_row(z: complex, components, spec: ExpansionSpec) -> np.ndarray:
    """One collocation row at a single point off all slits."""
    return design_matrix(z, components, spec)[0]


@dataclass(frozen=True)
class Expansion:
    """A fitted expansion: coefficients plus the geometry they refer to."""

    components: tuple[BoundaryComponent, ...]
    spec: ExpansionSpec
    constant: float
    log_coeffs: tuple[float, ...]
    cos_coeffs: tuple[tuple[float, ...], ...]
    sin_coeffs: tuple[tuple[float, ...], ...]
    outer_cos: tuple[float, ...] = ()
    outer_sin: tuple[float, ...] = ()
    source: complex | None = None
    source_strength: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        validate_spec(self.components, self.spec)
        vals = [self.constant, *self.log_coeffs, self.source_strength]
        vals += [v for row in self.cos_coeffs for v in row]
        vals += [v for row in self.sin_coeffs for v in row]
        vals += list(self.outer_cos) + list(self.outer_sin)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("expansion coefficients must be finite")

    @classmethod
    def from_vector(cls, vec, components, spec, source=None, source_strength=0.0):
        """Unpack a least-squares solution vector in design_matrix column order."""
        vec = np.asarray(vec, dtype=float)
        inner = inner_indices(components)
        if vec.shape[0] != column_count(components, spec):
            raise ValueError("coefficient vector length does not match the column layout")
        log_coeffs = tuple(vec[1 : 1 + len(inner)])
        cos_rows, sin_rows = [], []
        col = 1 + len(inner)
        for j in inner:
            n = spec.degrees[j]
            cos_rows.append(tuple(vec[col : col + 2 * n : 2]))
            sin_rows.append(tuple(vec[col + 1 : col + 2 * n : 2]))
            col += 2 * n
        outer_cos = tuple(vec[col : col + 2 * spec.outer_degree : 2])
        outer_sin = tuple(vec[col + 1 : col + 2 * spec.outer_degree : 2])
        return cls(
            components=tuple(components),
            spec=spec,
            constant=float(vec[0]),
            log_coeffs=log_coeffs,
            cos_coeffs=tuple(cos_rows),
            sin_coeffs=tuple(sin_rows),
            outer_cos=outer_cos,
            outer_sin=outer_sin,
            source=source,
            source_strength=source_strength,
        )

    def coefficient_vector(self) -> np.ndarray:
        vec = [self.constant, *self.log_coeffs]
        for a_row, b_row in zip(self.cos_coeffs, self.sin_coeffs):
            for a, b in zip(a_row, b_row):
                vec += [a, b]
        for a, b in zip(self.outer_cos, self.outer_sin):
            vec += [a, b]
        return np.asarray(vec, dtype=float)


def _check_not_at_source(exp: Expansion, z: np.ndarray) -> None:
    if exp.source_strength != 0.0 and exp.source is not None and np.any(z == exp.source):
        raise DomainError("the field is unbounded at the source point")


def eval_expansion(exp: Expansion, z):
    """Evaluate u at z (scalar or array); z must be off all slits and sources."""
    scalar = np.isscalar(z) or (isinstance(z, np.ndarray) and z.ndim == 0)
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_not_at_source(exp, za)
    u = design_matrix(za, exp.components, exp.spec) @ exp.coefficient_vector()
    if exp.source_strength != 0.0:
        u = u + exp.source_strength * np.log(np.abs(za - exp.source))
    return float(u[0]) if scalar else u


def complex_derivative(exp: Expansion, z):
    """f'(z) for the analytic completion f of the expansion (so grad u = conj f')."""
    scalar = np.isscalar(z) or (isinstance(z, np.ndarray) and z.ndim == 0)
    if scalar:
        _, fp = _scalar_u_fprime(exp, complex(z), need_u=False)
        return fp
    z = np.asarray(z, dtype=complex)
    _check_not_at_source(exp, z)
    fp = np.zeros_like(z)
    if exp.source_strength != 0.0:
        fp += exp.source_strength / (z - exp.source)
    inner = inner_indices(exp.components)
    for slot, j in enumerate(inner):
        comp = exp.components[j]
        n = exp.spec.degrees[j]
        d = exp.log_coeffs[slot]
        ab = np.array(exp.cos_coeffs[slot]) - 1j * np.array(exp.sin_coeffs[slot])
        if comp.kind == DISK:
            dz = z - comp.center
            fp += d / dz
            if n:
                scale = comp.radius if exp.spec.scaled else 1.0
                t = scale / dz
                p = _powers(t, n)
                ks = np.arange(1, n + 1)
                # d/dz of scale^k (z-c)^-k = -k t^k / (z-c)
                fp += (p @ (-(ks * ab))) / dz
        else:
            w = joukowski_inverse(comp.center, comp.halfspan, z)
            denom = 1.0 - w**-2
            if np.any(np.abs(denom) < 1e-13):
                raise DomainError("derivative is singular at a slit endpoint")
            wp = 2.0 / (comp.halfspan * denom)
            fp += d * wp / w
            if n:
                p = _powers(1.0 / w, n)
                ks = np.arange(1, n + 1)
                fp += (p @ (-(ks * ab))) * wp / w
    if exp.spec.outer_degree > 0:
        oj = outer_index(exp.components)
        out = exp.components[oj]
        ab = np.array(exp.outer_cos) - 1j * np.array(exp.outer_sin)
        t = (z - out.center) / out.radius
        n = exp.spec.outer_degree
        ks = np.arange(1, n + 1)
        # d/dz of t^k = k t^(k-1) / r0
        pm1 = np.concatenate([np.ones((z.shape[0], 1)), _powers(t, n - 1)], axis=1)
        fp += (pm1 @ (ks * ab)) / out.radius
    return fp


def eval_gradient(exp: Expansion, z):
    """grad u as a complex number (u_x + i u_y), via conj(f')."""
    fp = complex_derivative(exp, z)
    return np.conj(fp) if isinstance(fp, np.ndarray) else fp.conjugate()


def _scalar_u_fprime(exp: Expansion, z: complex, need_u: bool = True):
    """Scalar fast path evaluating u and f' together with plain complex math.

    Streamline tracing calls this once per Runge-Kutta stage, so it avoids
    numpy overhead on size-1 arrays.
    """
    u = 0.0
    fp = 0.0 + 0.0j
    if exp.source_strength != 0.0:
        dz = z - exp.source
        if dz == 0:
            raise DomainError("the field is unbounded at the source point")
        fp += exp.source_strength / dz
        if need_u:
            u += exp.source_strength * math.log(abs(dz))
    if need_u:
        u += exp.constant
    slot = 0
    for j, comp in enumerate(exp.components):
        if comp.role != INNER:
            continue
        n = exp.spec.degrees[j]
        d = exp.log_coeffs[slot]
        a_row = exp.cos_coeffs[slot]
        b_row = exp.sin_coeffs[slot]
        if comp.kind == DISK:
            dz = z - comp.center
            if dz == 0:
                raise DomainError("expansion is singular at a component center")
            fp += d / dz
            if need_u:
                u += d * math.log(abs(dz))
            t = (comp.radius / dz) if exp.spec.scaled else (1.0 / dz)
            tk = 1.0 + 0.0j
            for k in range(1, n + 1):
                tk *= t
                ab = a_row[k - 1] - 1j * b_row[k - 1]
                fp += -k * ab * tk / dz
                if need_u:
                    u += a_row[k - 1] * tk.real + b_row[k - 1] * tk.imag
        else:
            w = joukowski_inverse(comp.center, comp.halfspan, z)
            denom = 1.0 - 1.0 / (w * w)
            if abs(denom) < 1e-13:
                raise DomainError("derivative is singular at a slit endpoint")
            wp = 2.0 / (comp.halfspan * denom)
            fp += d * wp / w
            if need_u:
                u += d * math.log(abs(w))
            t = 1.0 / w
            tk = 1.0 + 0.0j
            for k in range(1, n + 1):
                tk *= t
                ab = a_row[k - 1] - 1j * b_row[k - 1]
                fp += -k * ab * tk * wp / w
                if need_u:
                    u += a_row[k - 1] * tk.real + b_row[k - 1] * tk.imag
        slot += 1
    if exp.spec.outer_degree > 0:
        out = exp.components[outer_index(exp.components)]
        t = (z - out.center) / out.radius
        tk = 1.0 + 0.0j
        for k in range(1, exp.spec.outer_degree + 1):
            ab = exp.outer_cos[k - 1] - 1j * exp.outer_sin[k - 1]
            fp += k * ab * tk / out.radius
            tk *= t
            if need_u:
                u += exp.outer_cos[k - 1] * tk.real + exp.outer_sin[k - 1] * tk.imag
    return u, fp
