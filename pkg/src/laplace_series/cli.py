"""Command-line front end: JSON problem configs, solves, CSV/SVG/report output.

Subcommands: solve, contours, streamlines, eval (all driven by a JSON config)
and cantor (driven by -m).  Reports print numbers to 13 significant digits and
all outputs are deterministic: the same config produces byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .basis import ExpansionSpec, eval_expansion
from .cantor import cantor_components, cantor_degree, cantor_inner_half_sum, cantor_measures
from .field import (
    EQUIPOTENTIAL,
    STREAMLINE,
    Polyline,
    TraceOptions,
    default_window,
    extract_contours,
    streamline_fan,
)
from .geometry import (
    DISK,
    INNER,
    OUTER,
    SLIT,
    BoundaryComponent,
    GeometryError,
    boundary_distance,
    disk,
    slit,
)
from .solver import (
    BOUNDED,
    EXTERIOR,
    Problem,
    Solution,
    default_npts,
    default_spec,
    harmonic_measures,
    solve_problem,
)


class ConfigError(ValueError):
    """A problem configuration failed to parse or validate."""


@dataclass(frozen=True)
class StreamlineRequest:
    count: int = 64
    eps: float | None = None


@dataclass(frozen=True)
class OutputPaths:
    report: str | None = "report.json"
    csv: str | None = "field.csv"
    svg: str | None = None


@dataclass(frozen=True)
class RunConfig:
    """A parsed problem configuration plus its output requests."""

    problem: Problem
    spec: ExpansionSpec
    npts: tuple[int, ...]
    window: tuple[float, float, float, float]
    levels: tuple[float, ...] | None
    streamlines: StreamlineRequest
    outputs: OutputPaths
    eval_points: tuple[complex, ...] = ()


_TOP_KEYS = {
    "domain", "source", "components", "degree", "npts", "scaled",
    "window", "levels", "streamlines", "outputs", "eval",
}
_COMPONENT_KEYS = {"kind", "center", "radius", "halfspan", "value", "role"}
_STREAMLINE_KEYS = {"count", "eps"}
_OUTPUT_KEYS = {"report", "csv", "svg"}


def _reject_unknown(d: dict, allowed: set, where: str) -> None:
    for key in d:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def _point(value, where: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise ConfigError(f"{where} must be a [x, y] pair of numbers")
    return complex(float(value[0]), float(value[1]))


def _parse_component(entry, idx: int) -> tuple[BoundaryComponent, float]:
    where = f"components[{idx}]"
    if not isinstance(entry, dict):
        raise ConfigError(f"{where} must be an object")
    _reject_unknown(entry, _COMPONENT_KEYS, where)
    kind = entry.get("kind")
    if kind not in (DISK, SLIT):
        raise ConfigError(f"{where}.kind must be 'disk' or 'slit'")
    if "center" not in entry:
        raise ConfigError(f"{where}.center is required")
    center = _point(entry["center"], f"{where}.center")
    role = entry.get("role", INNER)
    if role not in (INNER, OUTER):
        raise ConfigError(f"{where}.role must be 'inner' or 'outer'")
    value = entry.get("value", 0.0)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{where}.value must be a number")
    try:
        if kind == DISK:
            if "halfspan" in entry:
                raise ConfigError(f"key 'halfspan' is not valid for a disk in {where}")
            if "radius" not in entry:
                raise ConfigError(f"{where}.radius is required for a disk")
            radius = entry["radius"]
            if not isinstance(radius, (int, float)) or isinstance(radius, bool) or radius <= 0:
                raise ConfigError(f"{where}.radius must be a positive number")
            comp = disk(center, float(radius), role)
        else:
            if "radius" in entry:
                raise ConfigError(f"key 'radius' is not valid for a slit in {where}")
            if "halfspan" not in entry:
                raise ConfigError(f"{where}.halfspan is required for a slit")
            halfspan = _point(entry["halfspan"], f"{where}.halfspan")
            if role == OUTER:
                raise ConfigError(f"{where}: a slit cannot take the outer role")
            comp = slit(center, halfspan)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{where}: {exc}") from exc
    return comp, float(value)


def parse_problem_config(text: str) -> RunConfig:
    """Parse and fully validate a JSON problem configuration."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(raw, dict):
        raise ConfigError("the configuration must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "the configuration")

    domain = raw.get("domain", EXTERIOR)
    if domain not in (EXTERIOR, BOUNDED):
        raise ConfigError("'domain' must be 'exterior' or 'bounded'")

    comps_raw = raw.get("components")
    if not isinstance(comps_raw, list) or not comps_raw:
        raise ConfigError("'components' must be a non-empty list")
    parsed = [_parse_component(entry, i) for i, entry in enumerate(comps_raw)]
    components = tuple(c for c, _ in parsed)
    boundary_data = tuple(v for _, v in parsed)

    if "source" in raw:
        source = None if raw["source"] is None else _point(raw["source"], "source")
    else:
        source = 0j if domain == EXTERIOR else None

    degree = raw.get("degree", 10)
    if isinstance(degree, int) and not isinstance(degree, bool):
        degrees = tuple(0 if c.role == OUTER else degree for c in components)
        outer_degree = degree if any(c.role == OUTER for c in components) else 0
    elif isinstance(degree, list):
        if len(degree) != len(components):
            raise ConfigError("'degree' list must give one entry per component")
        if not all(isinstance(n, int) and not isinstance(n, bool) and n >= 0 for n in degree):
            raise ConfigError("'degree' entries must be integers >= 0")
        outer_degree = 0
        degs = []
        for n, c in zip(degree, components):
            if c.role == OUTER:
                outer_degree = n
                degs.append(0)
            else:
                degs.append(n)
        degrees = tuple(degs)
    else:
        raise ConfigError("'degree' must be an integer or a list of integers")
    if isinstance(degree, int) and degree < 0:
        raise ConfigError("'degree' must be >= 0")

    scaled = raw.get("scaled", True)
    if not isinstance(scaled, bool):
        raise ConfigError("'scaled' must be true or false")
    spec = ExpansionSpec(degrees=degrees, scaled=scaled, outer_degree=outer_degree)

    try:
        problem = Problem(components, domain, source, boundary_data)
    except (GeometryError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    npts_raw = raw.get("npts")
    if npts_raw is None:
        npts = tuple(default_npts(components, spec))
    elif isinstance(npts_raw, int) and not isinstance(npts_raw, bool):
        npts = tuple(npts_raw for _ in components)
    elif isinstance(npts_raw, list) and len(npts_raw) == len(components):
        if not all(isinstance(n, int) and not isinstance(n, bool) and n > 0 for n in npts_raw):
            raise ConfigError("'npts' entries must be positive integers")
        npts = tuple(npts_raw)
    else:
        raise ConfigError("'npts' must be an integer or a list with one entry per component")

    if "window" in raw:
        win = raw["window"]
        if (
            not isinstance(win, list)
            or len(win) != 4
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in win)
            or not (win[0] < win[1] and win[2] < win[3])
        ):
            raise ConfigError("'window' must be [x0, x1, y0, y1] with x0 < x1 and y0 < y1")
        window = tuple(float(v) for v in win)
    else:
        window = default_window(problem)

    levels = None
    if "levels" in raw:
        lv = raw["levels"]
        if not isinstance(lv, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in lv
        ):
            raise ConfigError("'levels' must be a list of numbers")
        levels = tuple(float(v) for v in lv)

    sl = raw.get("streamlines", {})
    if not isinstance(sl, dict):
        raise ConfigError("'streamlines' must be an object")
    _reject_unknown(sl, _STREAMLINE_KEYS, "'streamlines'")
    count = sl.get("count", 64)
    if not isinstance(count, int) or isinstance(count, bool) or count < 0:
        raise ConfigError("'streamlines.count' must be an integer >= 0")
    eps = sl.get("eps")
    if eps is not None and (not isinstance(eps, (int, float)) or eps <= 0):
        raise ConfigError("'streamlines.eps' must be a positive number")
    streamlines = StreamlineRequest(count=count, eps=None if eps is None else float(eps))

    out = raw.get("outputs", {})
    if not isinstance(out, dict):
        raise ConfigError("'outputs' must be an object")
    _reject_unknown(out, _OUTPUT_KEYS, "'outputs'")
    outputs = OutputPaths(
        report=out.get("report", "report.json"),
        csv=out.get("csv", "field.csv"),
        svg=out.get("svg"),
    )

    eval_points = ()
    if "eval" in raw:
        ev = raw["eval"]
        if not isinstance(ev, list):
            raise ConfigError("'eval' must be a list of [x, y] pairs")
        eval_points = tuple(_point(p, f"eval[{i}]") for i, p in enumerate(ev))

    return RunConfig(
        problem=problem,
        spec=spec,
        npts=npts,
        window=window,
        levels=levels,
        streamlines=streamlines,
        outputs=outputs,
        eval_points=eval_points,
    )


def serialize_config(cfg: RunConfig) -> str:
    """Emit a JSON document that reparses to an equivalent configuration."""
    comps = []
    for comp, value in zip(cfg.problem.components, cfg.problem.boundary_data):
        entry = {"kind": comp.kind, "center": [comp.center.real, comp.center.imag]}
        if comp.kind == DISK:
            entry["radius"] = comp.radius
        else:
            entry["halfspan"] = [comp.halfspan.real, comp.halfspan.imag]
        entry["value"] = float(value)
        entry["role"] = comp.role
        comps.append(entry)
    degrees = [
        cfg.spec.outer_degree if c.role == OUTER else n
        for n, c in zip(cfg.spec.degrees, cfg.problem.components)
    ]
    doc = {
        "domain": cfg.problem.domain_kind,
        "source": None
        if cfg.problem.source is None
        else [cfg.problem.source.real, cfg.problem.source.imag],
        "components": comps,
        "degree": degrees,
        "npts": list(cfg.npts),
        "scaled": cfg.spec.scaled,
        "window": list(cfg.window),
        "streamlines": {"count": cfg.streamlines.count, **(
            {"eps": cfg.streamlines.eps} if cfg.streamlines.eps is not None else {}
        )},
        "outputs": {
            k: v
            for k, v in (
                ("report", cfg.outputs.report),
                ("csv", cfg.outputs.csv),
                ("svg", cfg.outputs.svg),
            )
            if v is not None
        },
        "eval": [[p.real, p.imag] for p in cfg.eval_points],
    }
    if cfg.levels is not None:
        doc["levels"] = list(cfg.levels)
    return json.dumps(doc, indent=2, sort_keys=True)


def _sig13(x: float) -> float:
    """Round to 13 significant digits, the precision quoted in reports."""
    if x == 0 or not math.isfinite(x):
        return x
    return float(f"{x:.12e}")


def _auto_levels(solution: Solution, window, n: int = 12) -> tuple[float, ...]:
    """Regularly spaced levels spanning the field's bulk over the window."""
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, 60)
    ys = np.linspace(y0, y1, 60)
    X, Y = np.meshgrid(xs, ys)
    from .field import _domain_mask  # local import keeps module load cheap

    mask = _domain_mask(solution.problem, X, Y)
    if solution.problem.source is not None:
        mask &= np.abs(X + 1j * Y - solution.problem.source) > 0.05 * (x1 - x0)
    z = (X + 1j * Y)[mask]
    if z.size == 0:
        return ()
    u = eval_expansion(solution.expansion, z)
    lo, hi = np.percentile(u, 4.0), np.percentile(u, 96.0)
    if not (hi > lo):
        return ()
    return tuple(float(v) for v in np.linspace(lo, hi, n + 2)[1:-1])


def build_report(solution: Solution, eval_points=()) -> dict:
    exp = solution.expansion
    report = harmonic_measures(solution)
    doc = {
        "domain": solution.problem.domain_kind,
        "constant": _sig13(exp.constant),
        "log_coefficients": [_sig13(d) for d in exp.log_coeffs],
        "source": None
        if solution.problem.source is None
        else [solution.problem.source.real, solution.problem.source.imag],
        "source_strength": exp.source_strength,
        "residual": _sig13(solution.residual),
        "measures": [_sig13(v) for v in report.measures],
        "measures_total": _sig13(report.total),
        "probabilistic": report.probabilistic,
        "fit": {
            "rows": solution.fit_report.rows,
            "cols": solution.fit_report.cols,
            "npts": list(solution.fit_report.npts),
            "degrees": list(solution.fit_report.degrees),
            "outer_degree": solution.fit_report.outer_degree,
        },
        "coefficients": {
            "cos": [[_sig13(a) for a in row] for row in exp.cos_coeffs],
            "sin": [[_sig13(b) for b in row] for row in exp.sin_coeffs],
            "outer_cos": [_sig13(a) for a in exp.outer_cos],
            "outer_sin": [_sig13(b) for b in exp.outer_sin],
        },
        "eval": [
            {"point": [p.real, p.imag], "u": _sig13(float(eval_expansion(exp, p)))}
            for p in eval_points
        ],
    }
    return doc


def polylines_csv(polylines) -> str:
    """One polyline per blank-line-separated block: kind,level_or_seed,x,y."""
    lines = ["kind,level_or_seed,x,y"]
    for idx, poly in enumerate(polylines):
        if idx > 0:
            lines.append("")
        for p in poly.points:
            lines.append(f"{poly.kind},{poly.value:.13g},{p.real:.13g},{p.imag:.13g}")
    return "\n".join(lines) + "\n"


_SVG_SIZE = 900.0


def emit_svg(polylines, components, window) -> str:
    """A standalone deterministic SVG: paths for polylines, glyphs for components."""
    x0, x1, y0, y1 = window
    if not (x1 > x0 and y1 > y0):
        raise ValueError("window must be a nonempty rectangle")
    scale = _SVG_SIZE / (x1 - x0)
    height = (y1 - y0) * scale

    def tx(z: complex) -> tuple[float, float]:
        return ((z.real - x0) * scale, (y1 - z.imag) * scale)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_SVG_SIZE:.0f} {height:.2f}" '
        f'width="{_SVG_SIZE:.0f}" height="{height:.2f}">',
        f'<rect width="{_SVG_SIZE:.0f}" height="{height:.2f}" fill="white"/>',
    ]
    color = {EQUIPOTENTIAL: "#2060c0", STREAMLINE: "#c03020"}
    for poly in polylines:
        coords = " L".join(f"{x:.3f} {y:.3f}" for x, y in (tx(p) for p in poly.points))
        parts.append(
            f'<path d="M{coords}" fill="none" stroke="{color.get(poly.kind, "#444444")}" '
            f'stroke-width="1"/>'
        )
    for comp in components:
        if comp.kind == DISK:
            cx, cy = tx(comp.center)
            fill = "none" if comp.role == OUTER else "#dddddd"
            parts.append(
                f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{comp.radius * scale:.3f}" '
                f'fill="{fill}" stroke="black" stroke-width="1.5"/>'
            )
        else:
            a, b = comp.endpoints
            (xa, ya), (xb, yb) = tx(a), tx(b)
            parts.append(
                f'<line x1="{xa:.3f}" y1="{ya:.3f}" x2="{xb:.3f}" y2="{yb:.3f}" '
                f'stroke="black" stroke-width="2"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _default_eps(problem: Problem) -> float:
    dists = [
        boundary_distance(c, problem.source)
        for c in problem.components
        if c.role != OUTER
    ]
    if not dists:
        return 0.05
    return 0.25 * min(dists)


def _field_polylines(solution: Solution, cfg: RunConfig, want_contours: bool,
                     want_streamlines: bool, grid_n: int = 240):
    polylines = []
    if want_contours:
        levels = cfg.levels if cfg.levels is not None else _auto_levels(solution, cfg.window)
        polylines.extend(extract_contours(solution, levels, cfg.window, grid_n))
    if want_streamlines and solution.problem.source is not None and cfg.streamlines.count > 0:
        eps = cfg.streamlines.eps or _default_eps(solution.problem)
        opts = TraceOptions(window=cfg.window)
        polylines.extend(streamline_fan(solution, cfg.streamlines.count, eps, opts))
    return polylines


def _write_outputs(files: dict) -> None:
    """Write every output or none: on failure, remove files created here."""
    written = []
    try:
        for path, content in files.items():
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(content)
            written.append(path)
    except OSError:
        import os

        for path in written:
            try:
                os.remove(path)
            except OSError:
                pass
        raise


def _resolve(outdir: str, path: str | None) -> str | None:
    import os

    if path is None:
        return None
    return path if os.path.isabs(path) else os.path.join(outdir, path)


def _run_field_command(cfg: RunConfig, outdir: str, want_contours: bool,
                       want_streamlines: bool, want_report: bool) -> int:
    solution = solve_problem(cfg.problem, cfg.spec, list(cfg.npts))
    report = build_report(solution, cfg.eval_points)
    print(f"residual certificate: {report['residual']:.13g}")
    if solution.problem.domain_kind == EXTERIOR and solution.expansion.log_coeffs:
        tag = "" if report["probabilistic"] else " (non-probabilistic boundary data)"
        print("harmonic measures" + tag + ":")
        for j, v in enumerate(report["measures"]):
            print(f"  component {j}: {v:.13g}")
        print(f"  total: {report['measures_total']:.13g}")
    for entry in report["eval"]:
        print(f"u({entry['point'][0]:g}, {entry['point'][1]:g}) = {entry['u']:.13g}")

    polylines = _field_polylines(solution, cfg, want_contours, want_streamlines)
    files = {}
    if want_report and cfg.outputs.report:
        files[_resolve(outdir, cfg.outputs.report)] = (
            json.dumps(report, indent=2, sort_keys=True) + "\n"
        )
    if (want_contours or want_streamlines) and cfg.outputs.csv:
        files[_resolve(outdir, cfg.outputs.csv)] = polylines_csv(polylines)
    if (want_contours or want_streamlines) and cfg.outputs.svg:
        files[_resolve(outdir, cfg.outputs.svg)] = emit_svg(
            polylines, cfg.problem.components, cfg.window
        )
    _write_outputs(files)
    for path in files:
        print(f"wrote {path}")
    return 0


def _cmd_cantor(args) -> int:
    measures = cantor_measures(args.m, use_symmetry=args.symmetry)
    doc = {
        "m": args.m,
        "degree": cantor_degree(args.m),
        "symmetry": bool(args.symmetry),
        "measures": [_sig13(v) for v in measures],
        "right_half_total": _sig13(sum(measures)),
    }
    if args.m >= 2:
        doc["inner_half_sum"] = _sig13(sum(measures[: 2 ** (args.m - 2)]))
    print(f"level m={args.m}, degree N={doc['degree']}, "
          f"{2**args.m} slits ({len(measures)} in the right half-plane)")
    for j, v in enumerate(measures):
        print(f"  slit {j} (inside out): {v:.13g}")
    if "inner_half_sum" in doc:
        print(f"inner-half sum: {doc['inner_half_sum']:.13g}")
    path = _resolve(args.outdir, f"cantor_m{args.m}.json")
    _write_outputs({path: json.dumps(doc, indent=2, sort_keys=True) + "\n"})
    print(f"wrote {path}")
    return 0


def _load_config(args) -> RunConfig:
    with open(args.config, "r", encoding="utf-8") as fh:
        text = fh.read()
    cfg = parse_problem_config(text)
    if args.degree is not None or args.npts is not None or args.no_scale:
        degree = args.degree
        if degree is not None:
            degrees = tuple(
                0 if c.role == OUTER else degree for c in cfg.problem.components
            )
            outer = degree if any(c.role == OUTER for c in cfg.problem.components) else 0
        else:
            degrees, outer = cfg.spec.degrees, cfg.spec.outer_degree
        spec = ExpansionSpec(
            degrees=degrees,
            scaled=False if args.no_scale else cfg.spec.scaled,
            outer_degree=outer,
        )
        npts = cfg.npts
        if args.degree is not None and args.npts is None:
            npts = tuple(default_npts(cfg.problem.components, spec))
        if args.npts is not None:
            npts = tuple(args.npts for _ in cfg.problem.components)
        cfg = RunConfig(
            problem=cfg.problem,
            spec=spec,
            npts=npts,
            window=cfg.window,
            levels=cfg.levels,
            streamlines=cfg.streamlines,
            outputs=cfg.outputs,
            eval_points=cfg.eval_points,
        )
    return cfg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="path to a JSON problem configuration")
    p.add_argument("--degree", type=int, default=None, help="override the expansion degree")
    p.add_argument("--npts", type=int, default=None, help="override samples per component")
    p.add_argument("--no-scale", action="store_true", help="use unscaled power columns")
    p.add_argument("-o", "--outdir", default=".", help="directory for output files")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lapseries",
        description="Solve planar Laplace problems outside disks and slits by "
        "series expansion with least-squares boundary fitting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "solve and write report, field CSV, and optional SVG"),
        ("contours", "solve and write equipotential polylines"),
        ("streamlines", "solve and write streamline polylines"),
        ("eval", "solve and print u at the configured eval points"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
    pc = sub.add_parser("cantor", help="measure study of a middle-thirds level")
    pc.add_argument("-m", type=int, required=True, help="construction level (1..12)")
    pc.add_argument("--symmetry", action="store_true", help="use the symmetry-reduced solve")
    pc.add_argument("-o", "--outdir", default=".", help="directory for output files")

    args = parser.parse_args(argv)
    try:
        if args.command == "cantor":
            return _cmd_cantor(args)
        cfg = _load_config(args)
        if args.command == "solve":
            return _run_field_command(cfg, args.outdir, True, True, True)
        if args.command == "contours":
            return _run_field_command(cfg, args.outdir, True, False, False)
        if args.command == "streamlines":
            return _run_field_command(cfg, args.outdir, False, True, False)
        if args.command == "eval":
            return _run_field_command(cfg, args.outdir, False, False, True)
        raise AssertionError(args.command)
    except (ConfigError, GeometryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
