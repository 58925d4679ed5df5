"""Evaluate the quantitative inequalities on concrete curves and fuzz families.

Every check returns a :class:`BoundCheck` whose ``margin`` is oriented so that
``margin >= 0`` means the inequality holds.  ``passed`` allows a small
negative margin, ``-tol * max(|lhs|, |rhs|)``.

Most checks hold *exactly* for the discrete curve (they follow from
Hoelder's inequality on the sampled curvature, or are facts about convex
polygons), so their tolerance is rounding-level.  The isoperimetric-type
quotient is different: the regular ``N``-gon sits below the circle value by
a relative ``(pi/N)^2 / 3``, so :func:`check_isop` defaults to the relative
tolerance :func:`isop_tolerance`, which is ``1e-6`` from ``N = 4096`` on.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from typing import Iterable, Iterator, TextIO

import numpy as np

from . import generators
from .curve_core import (
    AngleCurve,
    CurveError,
    angle_from_points,
    area_gauss_green,
    circularity,
    curvature,
    is_convex,
    points_from_angle,
    width_diameter,
)
from .energy import circle_quotient, energy_Fp, quotient_Qp

TOL_REPORT = 1e-9
TOL_ISOP = 1e-6
CSV_FIELDS = ("name", "p", "curve_id", "lhs", "rhs", "margin", "passed")


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    p: float | None = None
    curve_id: str = ""
    required: bool = True

    @property
    def rel_margin(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return self.margin / scale if scale > 0 else self.margin


def _make(name: str, lhs: float, rhs: float, margin: float, p, curve_id: str,
          tol: float, required: bool = True) -> BoundCheck:
    scale = max(abs(lhs), abs(rhs))
    return BoundCheck(name, float(lhs), float(rhs), float(margin),
                      bool(margin >= -tol * scale), None if p is None else float(p),
                      curve_id, required)


def _require_convex(curve: AngleCurve, name: str) -> None:
    if not is_convex(curve):
        raise CurveError(f"{name} needs a convex curve")


def area_width_diameter(curve: AngleCurve) -> tuple[float, float, float]:
    """``(area, width, diameter)``; pass the result as ``awd`` to skip recomputation."""
    w, d = width_diameter(points_from_angle(curve))
    return area_gauss_green(curve), w, d


# ---------------------------------------------------------------------------
# individual inequalities


def isop_tolerance(N: int) -> float:
    """Relative slack for :func:`check_isop`: ``max(1e-6, (pi/N)^2)``.

    The second term covers the regular ``N``-gon's deficit of about
    ``(pi/N)^2 / 3`` with a factor three to spare.
    """
    return max(TOL_ISOP, (np.pi / N) ** 2)


def check_isop(curve: AngleCurve, p: float, plus: bool = False, curve_id: str = "",
               tol: float | None = None) -> BoundCheck:
    """``F^(p/(p-1)) A >= pi^((p+1)/(p-1))`` with ``F = F_p`` or its positive-part twin.

    ``tol`` defaults to :func:`isop_tolerance` of the curve's grid size.
    """
    if tol is None:
        tol = isop_tolerance(curve.N)
    lhs = quotient_Qp(curve, p, plus)
    rhs = circle_quotient(p)
    return _make("isop_plus" if plus else "isop", lhs, rhs, lhs - rhs, p, curve_id, tol)


def theta_growth_profile(curve: AngleCurve, p: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(s, |theta(s) - theta(0)|, 2^(1/p) s^((p-1)/p) F_p^(1/2))`` on the closed grid."""
    theta = curve.theta_closed()
    s = np.append(curve.s, curve.L)
    bound = 2 ** (1 / p) * s ** ((p - 1) / p) * np.sqrt(energy_Fp(curve, p))
    return s, np.abs(theta - theta[0]), bound


def check_theta_growth(curve: AngleCurve, p: float, curve_id: str = "",
                       tol: float = TOL_REPORT) -> BoundCheck:
    """Worst case over the grid of the tangent-angle growth bound.

    ``lhs`` and ``rhs`` are the two sides at the grid point ``s > 0`` of
    smallest margin (at ``s = 0`` both sides vanish).
    """
    _require_convex(curve, "check_theta_growth")
    _, grow, bound = theta_growth_profile(curve, p)
    i = 1 + int(np.argmin(bound[1:] - grow[1:]))
    return _make("theta_growth", grow[i], bound[i], bound[i] - grow[i], p, curve_id, tol)


def check_length_lower(curve: AngleCurve, p: float, curve_id: str = "",
                       tol: float = TOL_REPORT) -> BoundCheck:
    """``L >= 2 (pi / F_p^(1/2))^(p/(p-1))``; equality on circles."""
    _require_convex(curve, "check_length_lower")
    rhs = 2 * (np.pi / np.sqrt(energy_Fp(curve, p))) ** (p / (p - 1))
    return _make("length_lower", curve.L, rhs, curve.L - rhs, p, curve_id, tol)


def check_kubota(curve: AngleCurve, curve_id: str = "", tol: float = TOL_REPORT,
                 awd: tuple[float, float, float] | None = None) -> BoundCheck:
    """Diameter against twice the area over the width."""
    _require_convex(curve, "check_kubota")
    a, w, d = awd or area_width_diameter(curve)
    rhs = 2 * a / w
    return _make("kubota", d, rhs, rhs - d, None, curve_id, tol)


def check_diameter_bound(curve: AngleCurve, p: float, curve_id: str = "",
                         tol: float = TOL_REPORT,
                         awd: tuple[float, float, float] | None = None) -> BoundCheck:
    """``d <= 2^((5p+1)/(2(p-1))) a (F_p^(1/2)/pi)^(p/(p-1))``."""
    _require_convex(curve, "check_diameter_bound")
    a, _, d = awd or area_width_diameter(curve)
    rhs = 2 ** ((5 * p + 1) / (2 * (p - 1))) * a * (np.sqrt(energy_Fp(curve, p)) / np.pi) ** (p / (p - 1))
    return _make("diameter_bound", d, rhs, rhs - d, p, curve_id, tol)


def check_curvature_lower(curve: AngleCurve, p: float, curve_id: str = "",
                          tol: float = TOL_REPORT,
                          awd: tuple[float, float, float] | None = None) -> BoundCheck:
    """Minimum curvature against the lower bound valid for minimizers.

    Off the minimizer class the bound may fail legitimately, so the check is
    marked ``required=False``: it reports, it does not certify.
    """
    from .surgery import is_centrosymmetric

    _require_convex(curve, "check_curvature_lower")
    if not is_centrosymmetric(curve):
        raise CurveError("check_curvature_lower needs a centrosymmetric curve")
    a, w, _ = awd or area_width_diameter(curve)
    lhs = float(np.min(curvature(curve)))
    rhs = np.sqrt(energy_Fp(curve, p)) * ((p - 1) * w / (a * 2 ** (p + 1))) ** (1 / p)
    return _make("curvature_lower", lhs, rhs, lhs - rhs, p, curve_id, tol, required=False)


# ---------------------------------------------------------------------------
# batches

CONVEX_CHECKS = ("theta_growth", "length_lower", "kubota", "diameter_bound")
ALL_CHECKS = ("isop", "isop_plus") + CONVEX_CHECKS + ("curvature_lower",)


def run_checks(curve: AngleCurve, ps: Iterable[float], checks: Iterable[str] = ALL_CHECKS,
               curve_id: str = "") -> list[BoundCheck]:
    """Run the named checks that apply to ``curve``.

    Convex-class checks are skipped on nonconvex curves and the curvature
    lower bound is skipped unless the curve is centrosymmetric; ``kubota``
    does not depend on ``p`` and is emitted once.
    """
    from .surgery import is_centrosymmetric

    checks = list(checks)
    unknown = set(checks) - set(ALL_CHECKS)
    if unknown:
        raise KeyError(f"unknown checks {sorted(unknown)}; choose from {list(ALL_CHECKS)}")
    convex = is_convex(curve)
    awd = area_width_diameter(curve) if convex else None
    symmetric = convex and "curvature_lower" in checks and is_centrosymmetric(curve)
    out: list[BoundCheck] = []
    if "kubota" in checks and convex:
        out.append(check_kubota(curve, curve_id, awd=awd))
    for p in ps:
        if "isop" in checks:
            out.append(check_isop(curve, p, False, curve_id))
        if "isop_plus" in checks:
            out.append(check_isop(curve, p, True, curve_id))
        if convex:
            if "theta_growth" in checks:
                out.append(check_theta_growth(curve, p, curve_id))
            if "length_lower" in checks:
                out.append(check_length_lower(curve, p, curve_id))
            if "diameter_bound" in checks:
                out.append(check_diameter_bound(curve, p, curve_id, awd=awd))
            if symmetric:
                out.append(check_curvature_lower(curve, p, curve_id, awd=awd))
    return out


def fuzz_curves(family: str = "mixed", n: int = 200, seed: int = 0, N: int = 4096,
                M: int | None = None) -> Iterator[tuple[str, AngleCurve]]:
    """Deterministic fuzz family as ``(curve_id, AngleCurve)`` pairs.

    Curves are sampled at ``M = 4 N`` points by default; sampling coarser
    than ``N`` would leave straight polygon edges in the resampled curve.
    """
    for cid, pc in generators.family(family, n, seed, M or 4 * N):
        yield cid, angle_from_points(pc, N)


def fuzz(family: str = "mixed", n: int = 200, ps: Iterable[float] = (1.5, 2.0, 3.0),
         checks: Iterable[str] = ALL_CHECKS, seed: int = 0, N: int = 4096
         ) -> tuple[list[BoundCheck], dict[str, float]]:
    """All checks over a fuzz family; also returns each curve's circularity."""
    ps, checks = list(ps), list(checks)
    results: list[BoundCheck] = []
    circ: dict[str, float] = {}
    for cid, curve in fuzz_curves(family, n, seed, N):
        circ[cid] = circularity(curve)
        results.extend(run_checks(curve, ps, checks, cid))
    return results, circ


def summarize(checks: Iterable[BoundCheck]) -> dict[str, tuple[int, int]]:
    """``{name: (passed, total)}`` in first-seen order."""
    out: dict[str, list[int]] = {}
    for c in checks:
        tally = out.setdefault(c.name, [0, 0])
        tally[0] += c.passed
        tally[1] += 1
    return {k: (v[0], v[1]) for k, v in out.items()}


def write_csv(checks: Iterable[BoundCheck], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for c in checks:
        row = asdict(c)
        w.writerow([c.name, "" if c.p is None else repr(c.p), c.curve_id,
                    repr(row["lhs"]), repr(row["rhs"]), repr(row["margin"]), str(c.passed).lower()])


def to_csv(checks: Iterable[BoundCheck]) -> str:
    buf = io.StringIO()
    write_csv(checks, buf)
    return buf.getvalue()
