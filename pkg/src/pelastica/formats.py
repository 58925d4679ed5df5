"""JSON and CSV serialization plus static SVG rendering.

Curve JSON is either ``{"format": "angle", "L", "turning", "theta"}`` or
``{"format": "points", "points": [[x, y], ...]}``.  Floats are written with
``repr`` precision (17 significant digits), so a dump followed by a load
reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path
from typing import Any, Iterable, Sequence, TextIO

import numpy as np

from .curve_core import AngleCurve, CurveError, PointCurve, angle_from_points, points_from_angle, project_closure
from .optimize import OptimizationResult
from .surgery import Chord, SurgeryReport


def jsonable(obj: Any) -> Any:
    """Recursively turn numpy values, tuples and dataclasses into plain JSON types."""
    if isinstance(obj, AngleCurve | PointCurve):
        return curve_to_json(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list | tuple):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.bool_ | bool):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating | float):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"


def write_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(obj))


# ---------------------------------------------------------------------------
# curves


def curve_to_json(curve: AngleCurve | PointCurve) -> dict:
    if isinstance(curve, AngleCurve):
        return {"format": "angle", "L": float(curve.L), "turning": int(curve.turning),
                "theta": [float(t) for t in curve.theta]}
    return {"format": "points", "points": [[float(x), float(y)] for x, y in curve.points]}


def curve_from_json(obj: dict) -> AngleCurve | PointCurve:
    fmt = obj.get("format")
    try:
        if fmt == "angle":
            return AngleCurve(float(obj["L"]), np.asarray(obj["theta"], float), int(obj.get("turning", 1)))
        if fmt == "points":
            return PointCurve(np.asarray(obj["points"], float))
    except (KeyError, TypeError) as exc:
        raise CurveError(f"malformed {fmt} curve: {exc}") from exc
    raise CurveError(f"unknown curve format {fmt!r}; expected 'angle' or 'points'")


def load_curve(path: str | Path) -> AngleCurve | PointCurve:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CurveError(f"cannot read curve file {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise CurveError(f"curve file {path} does not hold a JSON object")
    try:
        return curve_from_json(obj)
    except ValueError as exc:
        raise CurveError(f"invalid curve file {path}: {exc}") from exc


def as_angle_curve(curve: AngleCurve | PointCurve, N: int) -> AngleCurve:
    """Point curves are resampled to ``N``; angle curves are only closure-projected."""
    if isinstance(curve, PointCurve):
        return angle_from_points(curve, N)
    return project_closure(curve)


# ---------------------------------------------------------------------------
# results


def result_to_json(result: OptimizationResult) -> dict:
    return {
        "converged": result.converged,
        "message": result.message,
        "outer_iterations": result.outer_iterations,
        "q_p": result.q_p,
        "circularity": result.circularity,
        "el_alpha": result.el_alpha,
        "el_residual": result.el_residual,
        "simple": result.simple,
        "curve": curve_to_json(result.curve),
        "history": jsonable(result.history),
    }


def surgery_to_json(report: SurgeryReport) -> dict:
    return {
        "construction": report.construction,
        "energy_before": report.energy_before,
        "energy_after": report.energy_after,
        "area_before": report.area_before,
        "area_after": report.area_after,
        "details": jsonable(report.details),
        "input": curve_to_json(report.input),
        "output": curve_to_json(report.output),
    }


def write_rows(rows: Sequence[dict], fh: TextIO, fields: Sequence[str] | None = None) -> None:
    """CSV with a header; floats keep full precision."""
    fields = list(fields or (rows[0].keys() if rows else []))
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([_cell(row.get(k, "")) for k in fields])


def _cell(v: Any) -> str:
    v = jsonable(v)
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# SVG


def _polyline(curve: AngleCurve | PointCurve) -> np.ndarray:
    if isinstance(curve, AngleCurve):
        return points_from_angle(curve, tol=1e-4).points
    return curve.points


def render_svg(curves: Iterable[AngleCurve | PointCurve | np.ndarray],
               overlays: Iterable[np.ndarray] = (), size: int = 480,
               colors: Sequence[str] = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98"),
               title: str | None = None) -> str:
    """Closed paths for ``curves`` and dashed open polylines for ``overlays``.

    The viewport is the joint bounding box padded by 10% on each side; the
    y axis points up.  The output depends only on the inputs.
    """
    paths = [c if isinstance(c, np.ndarray) else _polyline(c) for c in curves]
    extra = [np.asarray(o, float) for o in overlays]
    allpts = np.vstack(paths + extra)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    pad = 0.1 * span
    lo, side = lo - pad, span + 2 * pad
    scale = size / side

    def fmt(pts: np.ndarray) -> str:
        x = (pts[:, 0] - lo[0]) * scale
        y = size - (pts[:, 1] - lo[1]) * scale
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    if title:
        out.append(f"  <title>{title}</title>")
    out.append(f'  <rect width="{size}" height="{size}" fill="white"/>')
    for k, pts in enumerate(paths):
        out.append(f'  <polygon points="{fmt(pts)}" fill="none" stroke="{colors[k % len(colors)]}" '
                   'stroke-width="1.5"/>')
    for pts in extra:
        out.append(f'  <polyline points="{fmt(pts)}" fill="none" stroke="#555555" '
                   'stroke-width="1" stroke-dasharray="5,4"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def surgery_overlays(report: SurgeryReport) -> list[np.ndarray]:
    """Chords drawn on the input curve, as two-point polylines."""
    d = report.details
    chord = d.get("chord")
    if isinstance(chord, Chord):
        return [np.asarray(chord.endpoints, float)]
    if chord is not None:
        return [np.asarray(chord, float)]
    return []
