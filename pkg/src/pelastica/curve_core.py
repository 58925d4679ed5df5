"""Discrete closed plane curves.

Two representations are used throughout the package:

* :class:`AngleCurve` stores the tangent angle ``theta[i]`` at arc length
  ``s_i = i * ds`` on a uniform grid of ``N`` cells together with the total
  length ``L``.  Geometrically it is the equilateral polygon whose ``i``-th
  edge has length ``ds`` and direction ``theta[i]`` (midpoint rule), so
  vertex ``P_k`` sits at arc length ``(k - 1/2) * ds``.  Curvature samples
  ``kappa[i] = (theta[i+1] - theta[i]) / ds`` live between nodes and sum
  exactly to ``2 pi * turning``.
* :class:`PointCurve` is an implicitly closed polyline, used for I/O and
  for the geometric predicates (area, width, diameter, simplicity).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.spatial import ConvexHull, QhullError

TWO_PI = 2.0 * np.pi
TOL_CLOSE = 1e-8
MIN_SAMPLES = 8


class CurveError(ValueError):
    """Raised when a curve violates a representation invariant."""


def _frozen(a: NDArray) -> NDArray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AngleCurve:
    """Closed curve given by tangent angles on a uniform arc-length grid."""

    L: float
    theta: NDArray[np.float64]
    turning: int = 1

    def __post_init__(self) -> None:
        theta = _frozen(self.theta)
        if theta.ndim != 1 or theta.size < MIN_SAMPLES:
            raise CurveError(f"need a 1-d array of at least {MIN_SAMPLES} angles")
        if not np.all(np.isfinite(theta)):
            raise CurveError("non-finite tangent angle")
        if not (np.isfinite(self.L) and self.L > 0):
            raise CurveError(f"length must be positive, got {self.L}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "turning", int(self.turning))

    @property
    def N(self) -> int:
        return self.theta.size

    @property
    def ds(self) -> float:
        return self.L / self.N

    @property
    def s(self) -> NDArray[np.float64]:
        """Arc-length nodes ``i * ds``."""
        return np.arange(self.N) * self.ds

    @property
    def closure_defect(self) -> float:
        return closure_defect(self.theta, self.L)

    def scaled(self, factor: float) -> AngleCurve:
        return AngleCurve(self.L * factor, self.theta, self.turning)

    def theta_closed(self) -> NDArray[np.float64]:
        """Angles with the periodic node ``theta[N] = theta[0] + 2 pi turning`` appended."""
        return np.append(self.theta, self.theta[0] + TWO_PI * self.turning)


@dataclass(frozen=True)
class PointCurve:
    """Implicitly closed polyline; vertex ``N-1`` connects back to vertex 0."""

    points: NDArray[np.float64] = field()

    def __post_init__(self) -> None:
        pts = _frozen(self.points)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise CurveError("points must have shape (N, 2)")
        if pts.shape[0] < MIN_SAMPLES:
            raise CurveError(f"need at least {MIN_SAMPLES} vertices")
        if not np.all(np.isfinite(pts)):
            raise CurveError("non-finite vertex")
        edges = np.roll(pts, -1, axis=0) - pts
        if np.any(np.all(edges == 0.0, axis=1)):
            raise CurveError("consecutive vertices must be distinct")
        object.__setattr__(self, "points", pts)

    @property
    def N(self) -> int:
        return self.points.shape[0]

    def transformed(self, scale: float = 1.0, angle: float = 0.0,
                    shift=(0.0, 0.0)) -> PointCurve:
        c, s = np.cos(angle), np.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return PointCurve(scale * self.points @ rot.T + np.asarray(shift, float))


@dataclass(frozen=True)
class CurveMetrics:
    length: float
    area: float
    width: float
    diameter: float
    convex: bool
    centroid: tuple[float, float]


# ---------------------------------------------------------------------------
# angle representation


def closure_defect(theta: NDArray, L: float) -> float:
    """``|ds sum cos| + |ds sum sin|`` of the reconstructed polygon."""
    ds = L / len(theta)
    return abs(ds * np.sum(np.cos(theta))) + abs(ds * np.sum(np.sin(theta)))


def project_closure(curve: AngleCurve, tol: float = TOL_CLOSE,
                    max_iter: int = 50) -> AngleCurve:
    """Minimal-norm Gauss-Newton projection of ``theta`` onto the closed curves.

    ``theta[0]`` is held fixed so the orientation gauge is preserved.
    """
    theta = np.array(curve.theta)
    ds = curve.ds
    for _ in range(max_iter):
        c = ds * np.array([np.sum(np.cos(theta)), np.sum(np.sin(theta))])
        if np.abs(c).sum() <= tol * curve.L:
            break
        J = ds * np.vstack([-np.sin(theta), np.cos(theta)])
        J[:, 0] = 0.0
        theta -= J.T @ np.linalg.solve(J @ J.T, c)
    else:
        raise CurveError("closure projection did not converge")
    return AngleCurve(curve.L, theta, curve.turning)


def curvature(curve: AngleCurve) -> NDArray[np.float64]:
    """Forward-difference curvature with periodic wrap.

    ``ds * kappa.sum() == 2 pi * turning`` holds up to rounding since the
    differences telescope.
    """
    return np.diff(curve.theta_closed()) / curve.ds


def circularity(curve: AngleCurve) -> float:
    """``std(kappa) / mean(kappa)``; zero exactly for a discrete circle."""
    k = curvature(curve)
    return float(np.std(k) / np.mean(k))


def is_convex(curve: AngleCurve, tol: float = 1e-9) -> bool:
    if curve.turning != 1:
        raise CurveError("convexity test requires turning number 1")
    return bool(np.min(np.diff(curve.theta_closed())) >= -tol)


def area_gauss_green(curve: AngleCurve) -> float:
    """Area from the double integral ``1/2 iint_{t<s} sin(theta(s) - theta(t))``.

    The midpoint double sum is evaluated in O(N) with prefix sums of
    ``cos`` and ``sin``; for a closed curve it equals the shoelace area of
    :func:`points_from_angle` exactly.
    """
    return _double_sum_area(curve.theta, curve.ds)


def _double_sum_area(theta: NDArray, ds: float) -> float:
    c, s = np.cos(theta), np.sin(theta)
    cum_c = np.cumsum(c) - c
    cum_s = np.cumsum(s) - s
    return 0.5 * ds * ds * float(np.sum(s * cum_c - c * cum_s))


def points_from_angle(curve: AngleCurve, origin=(0.0, 0.0), rotation: float = 0.0,
                      tol: float = TOL_CLOSE) -> PointCurve:
    """Integrate ``(cos theta, sin theta)`` cumulatively from ``origin``.

    ``rotation`` is added to every angle, i.e. the result is rotated about
    ``origin``.  Raises :class:`CurveError` when the polygon does not close
    to within ``tol * L``.
    """
    if curve.closure_defect > tol * curve.L:
        raise CurveError(
            f"closure defect {curve.closure_defect:.3e} exceeds {tol:g} * L")
    th = curve.theta + rotation
    steps = curve.ds * np.column_stack([np.cos(th), np.sin(th)])
    pts = np.asarray(origin, float) + np.vstack([np.zeros(2), np.cumsum(steps[:-1], axis=0)])
    return PointCurve(pts)


def angle_from_points(curve: PointCurve, N: int, tol: float = TOL_CLOSE) -> AngleCurve:
    """Resample a simple counterclockwise polyline to an :class:`AngleCurve`.

    Points are placed at arc lengths ``j L / N`` of the input, starting at its
    first vertex, and the direction of chord ``j`` becomes ``theta[j]``.  This
    matches :func:`points_from_angle`, whose vertex ``k`` sits at arc length
    ``k L / N``, so converting back and forth is the identity.  Angles are unwrapped and shifted so ``theta[0] == 0``, and
    the result is projected onto the closure constraint.
    """
    if N < MIN_SAMPLES:
        raise CurveError(f"N must be at least {MIN_SAMPLES}")
    if signed_area(curve) <= 0:
        raise CurveError("curve is clockwise or degenerate; orientation is not auto-corrected")
    if not is_simple(curve):
        raise CurveError("curve self-intersects")
    pts = np.vstack([curve.points, curve.points[:1]])
    seg = np.hypot(*np.diff(pts, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    L = cum[-1]
    s = np.arange(N) * (L / N)
    q = np.column_stack([np.interp(s, cum, pts[:, 0]), np.interp(s, cum, pts[:, 1])])
    d = np.roll(q, -1, axis=0) - q
    raw = np.arctan2(d[:, 1], d[:, 0])
    theta = np.unwrap(raw)
    last = np.angle(np.exp(1j * (raw[0] - theta[-1])))
    turning = int(round((theta[-1] + last - theta[0]) / TWO_PI))
    theta = theta - theta[0]
    return project_closure(AngleCurve(L, theta, turning), tol)


# ---------------------------------------------------------------------------
# point representation


def signed_area(curve: PointCurve) -> float:
    x, y = curve.points[:, 0], curve.points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def enclosed_area(curve: PointCurve) -> float:
    """Shoelace area; raises on clockwise or degenerate input."""
    a = signed_area(curve)
    if a <= 0:
        raise CurveError(f"non-positive area {a:g}: curve is not counterclockwise")
    return a


def length(curve: PointCurve) -> float:
    d = np.roll(curve.points, -1, axis=0) - curve.points
    return float(np.sum(np.hypot(d[:, 0], d[:, 1])))


def centroid(curve: PointCurve) -> tuple[float, float]:
    """Area centroid of the enclosed region."""
    p = curve.points
    q = np.roll(p, -1, axis=0)
    cross = p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
    a = 0.5 * cross.sum()
    if a == 0:
        raise CurveError("zero-area curve has no centroid")
    cx = np.sum((p[:, 0] + q[:, 0]) * cross) / (6 * a)
    cy = np.sum((p[:, 1] + q[:, 1]) * cross) / (6 * a)
    return float(cx), float(cy)


def width_diameter(curve: PointCurve) -> tuple[float, float]:
    """Minimal width and diameter, both computed on the convex hull.

    Rotating calipers: for each hull edge the farthest vertex from its line
    gives a slab thickness (the width is the smallest), and the antipodal
    vertex pairs visited on the way contain the diameter.
    """
    try:
        hull = ConvexHull(curve.points)
    except QhullError as exc:
        raise CurveError("degenerate (collinear) point set") from exc
    h = curve.points[hull.vertices].tolist()  # counterclockwise
    m = len(h)

    def cross(i: int, j: int) -> float:
        # twice the area of triangle (h[i], h[i+1], h[j])
        (ax, ay), (bx, by), (cx, cy) = h[i], h[(i + 1) % m], h[j % m]
        return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)

    def dist2(i: int, j: int) -> float:
        (ax, ay), (bx, by) = h[i % m], h[j % m]
        return (ax - bx) ** 2 + (ay - by) ** 2

    width = np.inf
    diam2 = 0.0
    j = 1
    for i in range(m):
        while cross(i, j + 1) > cross(i, j):
            j += 1
        (ax, ay), (bx, by) = h[i], h[(i + 1) % m]
        width = min(width, cross(i, j) / np.hypot(bx - ax, by - ay))
        # with (nearly) parallel edges j and j+1 are both antipodal to edge i;
        # a rounding tie can stop the caliper one vertex early, so test both
        diam2 = max(diam2, dist2(i, j), dist2(i + 1, j), dist2(i, j + 1), dist2(i + 1, j + 1))
    return float(width), float(np.sqrt(diam2))


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def is_simple(curve: PointCurve, chunk: int = 1 << 20) -> bool:
    """True if no two non-adjacent edges touch or cross.

    Candidate pairs come from a sweep over edges sorted by their left end
    (pairs whose x-extents overlap), are filtered by y-extent, and are then
    decided by exact orientation signs.  Worst case O(N^2), close to
    O(N log N) on smooth curves.
    """
    p = curve.points
    q = np.roll(p, -1, axis=0)
    n = len(p)
    lo = np.minimum(p, q)
    hi = np.maximum(p, q)
    order = np.argsort(lo[:, 0], kind="stable")
    lo_sorted = lo[order, 0]
    stop = np.searchsorted(lo_sorted, hi[order, 0], side="right")
    counts = np.maximum(stop - np.arange(n) - 1, 0)
    starts = np.concatenate([[0], np.cumsum(counts)])
    # walk the pair list in blocks of about ``chunk`` pairs
    i0 = 0
    while i0 < n:
        i1 = int(np.searchsorted(starts, starts[i0] + chunk, side="right"))
        i1 = min(max(i1, i0 + 1), n)
        rows = np.repeat(np.arange(i0, i1), counts[i0:i1])
        offs = np.arange(rows.size) - np.repeat(starts[i0:i1] - starts[i0], counts[i0:i1])
        a = order[rows]
        b = order[rows + 1 + offs]
        gap = np.abs(a - b)
        keep = (gap != 1) & (gap != n - 1)
        keep &= (lo[a, 1] <= hi[b, 1]) & (lo[b, 1] <= hi[a, 1])
        a, b = a[keep], b[keep]
        if a.size:
            pa, qa, pb, qb = p[a], q[a], p[b], q[b]
            o1 = _orient(pa[:, 0], pa[:, 1], qa[:, 0], qa[:, 1], pb[:, 0], pb[:, 1])
            o2 = _orient(pa[:, 0], pa[:, 1], qa[:, 0], qa[:, 1], qb[:, 0], qb[:, 1])
            o3 = _orient(pb[:, 0], pb[:, 1], qb[:, 0], qb[:, 1], pa[:, 0], pa[:, 1])
            o4 = _orient(pb[:, 0], pb[:, 1], qb[:, 0], qb[:, 1], qa[:, 0], qa[:, 1])
            # boxes already overlap, so sign tests alone decide (collinear overlap included)
            if np.any((o1 * o2 <= 0) & (o3 * o4 <= 0)):
                return False
        i0 = i1
    return True


def segment_hits_curve(curve: PointCurve, a, b, skip=()) -> bool:
    """True if the open segment ``ab`` touches any edge not listed in ``skip``."""
    p = curve.points
    q = np.roll(p, -1, axis=0)
    keep = np.setdiff1d(np.arange(len(p)), np.asarray(skip, int))
    c, d = p[keep], q[keep]
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    o1 = _orient(a[0], a[1], b[0], b[1], c[:, 0], c[:, 1])
    o2 = _orient(a[0], a[1], b[0], b[1], d[:, 0], d[:, 1])
    o3 = _orient(c[:, 0], c[:, 1], d[:, 0], d[:, 1], a[0], a[1])
    o4 = _orient(c[:, 0], c[:, 1], d[:, 0], d[:, 1], b[0], b[1])
    return bool(np.any((o1 * o2 < 0) & (o3 * o4 < 0)))


def contains_point(curve: PointCurve, xy) -> bool:
    """Even-odd point-in-polygon test."""
    x, y = xy
    p = curve.points
    q = np.roll(p, -1, axis=0)
    cond = (p[:, 1] > y) != (q[:, 1] > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = p[:, 0] + (y - p[:, 1]) * (q[:, 0] - p[:, 0]) / (q[:, 1] - p[:, 1])
    return bool(np.count_nonzero(cond & (x < xcross)) % 2)


def metrics(curve: AngleCurve, tol_convex: float = 1e-9) -> CurveMetrics:
    pc = points_from_angle(curve)
    w, d = width_diameter(pc)
    return CurveMetrics(length=curve.L, area=enclosed_area(pc), width=w, diameter=d,
                        convex=is_convex(curve, tol_convex), centroid=centroid(pc))
