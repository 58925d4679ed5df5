"""Cut-and-paste constructions on closed curves with an energy/area ledger.

Throughout, ``theta(s)`` denotes the piecewise-linear interpolant of the
samples of an :class:`AngleCurve` (node ``i`` at ``s = i ds``), extended by
``theta(s + L) = theta(s) + 2 pi``.  Its derivative is the curvature sample
on each cell, so ``E_f`` of any arc is an exact sum of cell contributions,
and re-sampling ``theta`` on a uniform grid averages curvature over windows.
For convex ``f`` the latter can only lower the energy, which is what keeps
the ledgers below exact rather than approximate.

Positions ``gamma(s)`` are read off the polygon of :func:`points_from_angle`
(vertex ``P_k`` at ``s = (k - 1/2) ds``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from .curve_core import (
    TWO_PI, AngleCurve, CurveError, PointCurve, area_gauss_green, curvature,
    is_convex, points_from_angle, segment_hits_curve, contains_point, width_diameter,
)
from .energy import CurvatureIntegrand, check_g_convexity, disc_energy, energy_Ef, energy_Fp


class NoQualifyingChords(ValueError):
    """No pair of convex lobes with parallel-tangent chords was found."""


@dataclass(frozen=True)
class Chord:
    s1: float
    s2: float
    midpoint: tuple[float, float]
    tangent_gap: float
    area_split: tuple[float, float]
    endpoints: tuple[tuple[float, float], tuple[float, float]] = field(default=((0, 0), (0, 0)))


@dataclass(frozen=True)
class SurgeryReport:
    input: AngleCurve
    output: AngleCurve
    energy_before: float
    energy_after: float
    area_before: float
    area_after: float
    construction: str
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# continuous views of an AngleCurve


class _Arcs:
    """Evaluate ``theta(s)``, ``gamma(s)`` and cumulative energy at any ``s``."""

    def __init__(self, curve: AngleCurve, f: CurvatureIntegrand | None = None):
        self.curve = curve
        self.L = curve.L
        self.ds = curve.ds
        self.N = curve.N
        self.nodes = np.append(curve.s, curve.L)
        self.th = curve.theta_closed()
        self.turn = TWO_PI * curve.turning
        self.points = points_from_angle(curve, tol=1e-6).points
        if f is not None:
            self.cell_energy = curve.ds * f(curvature(curve))
            self.cum_energy = np.concatenate([[0.0], np.cumsum(self.cell_energy)])
            self.kappa_f = f(curvature(curve))

    def theta(self, s):
        s = np.asarray(s, float)
        k = np.floor(s / self.L)
        return np.interp(s - k * self.L, self.nodes, self.th) + k * self.turn

    def energy_to(self, s):
        """``int_0^s f(theta') ds`` for any real ``s``."""
        s = np.asarray(s, float)
        k = np.floor(s / self.L)
        u = s - k * self.L
        i = np.minimum((u / self.ds).astype(int), self.N - 1)
        return self.cum_energy[i] + (u - i * self.ds) * self.kappa_f[i] + k * self.cum_energy[-1]

    def arc_energy(self, a: float, b: float) -> float:
        return float(self.energy_to(b) - self.energy_to(a))

    def gamma(self, s: float) -> NDArray:
        u = (s + 0.5 * self.ds) / self.ds
        k = int(np.floor(u))
        frac = u - k
        P0 = self.points[k % self.N]
        P1 = self.points[(k + 1) % self.N]
        return P0 + frac * (P1 - P0)

    def arc_polygon(self, a: float, b: float) -> NDArray:
        """``gamma(a)``, the polygon vertices strictly between, ``gamma(b)``."""
        k0 = int(np.floor(a / self.ds + 0.5)) + 1
        k1 = int(np.ceil(b / self.ds + 0.5)) - 1
        idx = np.arange(k0, k1 + 1) % self.N
        return np.vstack([self.gamma(a), self.points[idx], self.gamma(b)])

    def antipode(self, s: float, lo: float | None = None, hi: float | None = None) -> float:
        """Smallest ``s* > s`` with ``theta(s*) = theta(s) + pi`` (theta nondecreasing there)."""
        lo = s if lo is None else lo
        hi = s + self.L if hi is None else hi
        target = float(self.theta(s)) + np.pi
        k0 = int(np.floor(lo / self.ds))
        k1 = int(np.ceil(hi / self.ds))
        grid = np.arange(k0, k1 + 1) * self.ds
        # the window may overhang the monotone range by one cell at either end
        vals = np.maximum.accumulate(self.theta(grid))
        j = int(np.searchsorted(vals, target - 1e-14))
        if j == 0 or j >= grid.size:
            raise CurveError("no antipodal tangent in range")
        t0, t1 = vals[j - 1], vals[j]
        if t1 == t0:
            return float(grid[j])
        return float(grid[j - 1] + (target - t0) / (t1 - t0) * self.ds)


def _shoelace(poly: NDArray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def glue_rotated_arc(curve: AngleCurve, a: float, b: float, N: int | None = None) -> AngleCurve:
    """Arc ``[a, b]`` followed by its rotation by pi about the chord midpoint.

    ``theta(b) - theta(a)`` must equal pi.  The result is sampled on ``N``
    (even) nodes over length ``2 (b - a)`` and is centrosymmetric by
    construction: ``theta[j + N/2] = theta[j] + pi`` exactly.
    """
    N = curve.N if N is None else N
    if N % 2:
        raise ValueError("N must be even")
    arcs = curve if isinstance(curve, _Arcs) else _Arcs(curve)
    ell = b - a
    sigma = np.arange(N // 2) * (2 * ell / N)
    first = arcs.theta(a + sigma) - arcs.theta(a)
    return AngleCurve(2 * ell, np.concatenate([first, first + np.pi]), 1)


def is_centrosymmetric(curve: AngleCurve, tol: float | None = None) -> bool:
    """``theta(s + L/2) = theta(s) + pi`` on the grid, within ``tol`` (default one cell, 2 pi / N)."""
    if curve.N % 2:
        return False
    tol = TWO_PI / curve.N if tol is None else tol
    h = curve.N // 2
    return bool(np.max(np.abs(curve.theta[h:] - curve.theta[:h] - np.pi)) <= tol)


# ---------------------------------------------------------------------------
# parallel-tangent chords and centrosymmetrization


def _split(arcs: _Arcs, s1: float, s2: float) -> float:
    return _shoelace(arcs.arc_polygon(s1, s2))


def find_equal_area_parallel_chord(curve: AngleCurve, rtol: float = 1e-6) -> Chord:
    """Chord between parallel tangents splitting the enclosed area in half.

    The signed imbalance ``D(s) = area1(s) - area2(s)`` of the chord from
    ``gamma(s)`` to its antipode flips sign over half a turn; the first sign
    change on the node grid is refined with Brent's method.
    """
    if not is_convex(curve):
        raise CurveError("equal-area chord search requires a convex curve")
    arcs = _Arcs(curve)
    A = area_gauss_green(curve)

    def imbalance(s):
        return 2 * _split(arcs, s, arcs.antipode(s)) - A

    s_end = arcs.antipode(0.0)
    grid = np.linspace(0.0, s_end, max(8, int(np.ceil(s_end / curve.ds)) + 1))
    vals = np.array([imbalance(s) for s in grid])
    hit = np.flatnonzero(np.abs(vals) <= rtol * A)
    change = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    if hit.size and (not change.size or hit[0] <= change[0]):
        s1 = float(grid[hit[0]])
    elif change.size:
        i = change[0]
        s1 = brentq(imbalance, grid[i], grid[i + 1], xtol=1e-14 * curve.L)
    else:
        raise CurveError("could not bracket an equal-area chord; refine the grid")
    s2 = arcs.antipode(s1)
    a1 = _split(arcs, s1, s2)
    p1, p2 = arcs.gamma(s1), arcs.gamma(s2)
    gap = abs(float(arcs.theta(s2) - arcs.theta(s1)) - np.pi)
    return Chord(s1=s1, s2=s2, midpoint=tuple(0.5 * (p1 + p2)), tangent_gap=gap,
                 area_split=(a1, A - a1), endpoints=(tuple(p1), tuple(p2)))


def centrosymmetrize(curve: AngleCurve, f: CurvatureIntegrand) -> SurgeryReport:
    """Keep the cheaper half at the equal-area chord and glue its pi-rotation.

    Area is preserved (twice one half) and, for convex ``f``, the energy
    cannot increase.
    """
    chord = find_equal_area_parallel_chord(curve)
    arcs = _Arcs(curve, f)
    L = curve.L
    e1 = arcs.arc_energy(chord.s1, chord.s2)
    e2 = arcs.arc_energy(chord.s2, chord.s1 + L)
    a, b = (chord.s1, chord.s2) if e1 <= e2 else (chord.s2, chord.s1 + L)
    out = glue_rotated_arc(arcs, a, b, curve.N + curve.N % 2)
    return SurgeryReport(
        input=curve, output=out,
        energy_before=energy_Ef(curve, f), energy_after=energy_Ef(out, f),
        area_before=area_gauss_green(curve), area_after=area_gauss_green(out),
        construction="centrosymmetrize",
        details={"chord": chord, "arc_energies": (e1, e2), "kept": 1 if e1 <= e2 else 2},
    )


# ---------------------------------------------------------------------------
# local perturbation and notch removal


def perturb_theta_eps(curve: AngleCurve, eps: float, p: float = 2.0):
    """Straighten ``[eps/2, eps]`` (and its antipode) behind a steeper ramp.

    On ``[0, L/2]`` the new angle is ``(2 s / eps) theta(eps)`` up to
    ``eps/2``, the constant ``theta(eps)`` up to ``eps``, and ``theta(s)``
    afterwards; the second half follows from ``theta(s + L/2) = theta(s) + pi``.

    Returns the perturbed curve and a dict with the measured change of
    ``F_p^(p/2)``, the first-order bound ``eps delta^p 2^(p-1)`` with
    ``delta = theta'(0)``, and the measured area change.
    """
    if not (is_convex(curve) and is_centrosymmetric(curve)):
        raise CurveError("perturbation needs a centrosymmetric convex curve")
    if eps < 4 * curve.ds:
        raise ValueError(f"eps={eps:g} is below grid resolution 4*ds={4 * curve.ds:g}")
    if eps > curve.L / 4:
        raise ValueError("eps must not exceed L/4")
    arcs = _Arcs(curve)
    th0 = float(arcs.theta(0.0))
    s = curve.s[: curve.N // 2]
    te = float(arcs.theta(eps)) - th0
    half = curve.theta[: curve.N // 2] - th0
    half = np.where(s <= eps / 2, 2 * s / eps * te, np.where(s <= eps, te, half))
    new = AngleCurve(curve.L, np.concatenate([half, half + np.pi]), 1)

    k = curvature(curve)
    delta = 0.5 * (k[0] + k[-1])
    before = energy_Fp(curve, p) ** (p / 2)
    after = energy_Fp(new, p) ** (p / 2)
    kn = curvature(new)
    flat = int(np.count_nonzero(np.abs(kn[: curve.N // 2]) * curve.ds <= 1e-12))
    return new, {
        "dE_measured": after - before,
        "dE_bound": eps * delta**p * 2 ** (p - 1),
        "dA_measured": area_gauss_green(new) - area_gauss_green(curve),
        "delta": float(delta),
        "eps": eps,
        "segment_length": flat * curve.ds,
    }


def _zero_runs(curve: AngleCurve, atol: float = 1e-12) -> list[tuple[int, int]]:
    """Maximal cyclic runs ``(start, length)`` of cells with zero turning."""
    z = np.abs(np.diff(curve.theta_closed())) <= atol
    if z.all():
        return [(0, curve.N)]
    start = int(np.flatnonzero(~z)[0]) + 1
    runs, i = [], 0
    while i < curve.N:
        j = (start + i) % curve.N
        if z[j]:
            m = 0
            while m < curve.N and z[(j + m) % curve.N]:
                m += 1
            runs.append((j, m))
            i += m
        else:
            i += 1
    return runs


def notch_removal(curve: AngleCurve, f: CurvatureIntegrand) -> SurgeryReport:
    """Cut out two antipodal straight segments of equal length ``sigma``.

    Equivalent to translating one of the arcs between the segments by
    ``sigma`` along their common direction: the strip between the two
    segment lines disappears, curved arcs move rigidly, so ``E_f`` is
    unchanged (``f(0) = 0``) while the area drops by ``sigma`` times the
    distance between the segment lines.
    """
    if curve.N % 2:
        raise CurveError("antipodal segment pairs need an even sample count")
    h = curve.N // 2
    runs = sorted(_zero_runs(curve), key=lambda r: (-r[1], r[0]))
    pair = None
    for start, m in runs:
        for start2, m2 in runs:
            if m2 == m and (start2 - start) % curve.N == h:
                pair = (start, start2, m)
                break
        if pair:
            break
    if pair is None:
        raise CurveError("no pair of antipodal straight segments found")
    start, start2, m = pair
    # cells start..start+m-1 are flat: drop nodes start+1..start+m (and antipodes)
    drop = np.concatenate([(start + 1 + np.arange(m)) % curve.N, (start2 + 1 + np.arange(m)) % curve.N])
    keep = np.setdiff1d(np.arange(curve.N), drop)
    theta = curve.theta[keep]
    sigma = m * curve.ds
    out = AngleCurve(curve.L - 2 * sigma, theta - theta[0], curve.turning)
    width, _ = width_diameter(points_from_angle(curve, tol=1e-6))
    return SurgeryReport(
        input=curve, output=out,
        energy_before=energy_Ef(curve, f), energy_after=energy_Ef(out, f),
        area_before=area_gauss_green(curve), area_after=area_gauss_green(out),
        construction="notch_removal",
        details={"sigma": sigma, "width": width, "segment_cells": (start, start2, m)},
    )


# ---------------------------------------------------------------------------
# two-lobe reduction


def _positive_runs(curve: AngleCurve, atol: float = 1e-12) -> list[tuple[float, float]]:
    """Maximal arcs ``[a, b]`` (arc-length, ``b`` possibly beyond ``L``) with kappa >= 0."""
    pos = curvature(curve) * curve.ds >= -atol
    if pos.all():
        return [(0.0, curve.L)]
    start = int(np.flatnonzero(~pos)[0]) + 1
    runs, i = [], 0
    while i < curve.N:
        j = start + i
        if pos[j % curve.N]:
            m = 0
            while pos[(j + m) % curve.N]:
                m += 1
            runs.append((j * curve.ds, (j + m) * curve.ds))
            i += m
        else:
            i += 1
    return runs


def _best_lobe_chord(arcs: _Arcs, pc: PointCurve, a: float, b: float):
    """Largest convex region cut from the positive run ``[a, b]`` by a parallel-tangent chord."""
    th_b = float(arcs.theta(b))
    best = None
    for s1 in np.arange(a, b, arcs.ds):
        if float(arcs.theta(s1)) + np.pi > th_b:
            break
        s2 = arcs.antipode(s1, lo=s1, hi=b)
        p1, p2 = arcs.gamma(s1), arcs.gamma(s2)
        chord_dir = np.arctan2(*(p1 - p2)[::-1])
        # corner turn at gamma(s2) from theta(s2) to the chord direction
        turn = (chord_dir - float(arcs.theta(s2))) % TWO_PI
        if turn > np.pi:
            continue
        e1 = int(np.floor(s1 / arcs.ds + 0.5)) % arcs.N
        e2 = int(np.floor(s2 / arcs.ds + 0.5)) % arcs.N
        skip = {e1, e2, (e1 - 1) % arcs.N, (e2 - 1) % arcs.N, (e1 + 1) % arcs.N, (e2 + 1) % arcs.N}
        if segment_hits_curve(pc, p1, p2, skip=sorted(skip)):
            continue
        if not contains_point(pc, 0.5 * (p1 + p2)):
            continue
        area = _split(arcs, s1, s2)
        if area > 0 and (best is None or area > best[2]):
            best = (float(s1), s2, area, p1, p2)
    return best


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (orient(p1, p2, q1) * orient(p1, p2, q2) < 0
            and orient(q1, q2, p1) * orient(q1, q2, p2) < 0)


def reduce_two_convex_arcs(curve: AngleCurve, f: CurvatureIntegrand, rtol: float = 1e-3):
    """Reduce a curve holding two disjoint convex lobes to two convex curves and a disc.

    Each positive-curvature run with total turning above pi is searched for
    the parallel-tangent chord cutting off the largest convex region inside
    the curve.  The two best lobes are closed up by pi-rotation.  Returns
    ``(reports, comparison)`` where ``comparison`` holds ``E_input``,
    ``mean_E_halves``, ``mean_E_discs``, ``E_disc`` and the chain flags.
    """
    if is_convex(curve):
        raise NoQualifyingChords("convex input: no lobes to reduce")
    arcs = _Arcs(curve, f)
    pc = PointCurve(arcs.points)
    lobes = []
    for a, b in _positive_runs(curve):
        if float(arcs.theta(b) - arcs.theta(a)) <= np.pi:
            continue
        best = _best_lobe_chord(arcs, pc, a, b)
        if best is not None:
            lobes.append(best)
    lobes.sort(key=lambda x: -x[2])
    pair = None
    for i in range(len(lobes)):
        for j in range(i + 1, len(lobes)):
            if not _segments_cross(lobes[i][3], lobes[i][4], lobes[j][3], lobes[j][4]):
                pair = (lobes[i], lobes[j])
                break
        if pair:
            break
    if pair is None:
        raise NoQualifyingChords(
            f"found {len(lobes)} qualifying lobe(s); the general cut-and-paste case is not handled")

    reports = []
    N = curve.N + curve.N % 2
    for s1, s2, area, p1, p2 in pair:
        out = glue_rotated_arc(arcs, s1, s2, N)
        arc_e = arcs.arc_energy(s1, s2)
        reports.append(SurgeryReport(
            input=curve, output=out,
            energy_before=2 * arc_e, energy_after=energy_Ef(out, f),
            area_before=2 * area, area_after=area_gauss_green(out),
            construction="lobe_rotation",
            details={"s1": s1, "s2": s2, "chord": (tuple(p1), tuple(p2)), "arc_energy": arc_e},
        ))
    E_input = energy_Ef(curve, f)
    halves = [r.energy_after for r in reports]
    areas = [r.area_after for r in reports]
    radii = [np.sqrt(a / np.pi) for a in areas]
    mean_halves = 0.5 * sum(halves)
    mean_discs = 0.5 * sum(disc_energy(R, f) for R in radii)
    R = np.sqrt(sum(areas) / (2 * np.pi))
    E_disc = disc_energy(R, f)
    gconv = check_g_convexity(f, np.geomspace(min(radii) ** 2, max(radii) ** 2 * (1 + 1e-9), 64)
                              if max(radii) > min(radii) * (1 + 1e-9) else
                              np.geomspace(0.5 * R**2, 2 * R**2, 64))
    tol = rtol * E_disc
    comparison = {
        "E_input": E_input,
        "E_halves": halves,
        "mean_E_halves": mean_halves,
        "mean_E_discs": mean_discs,
        "E_disc": E_disc,
        "areas": areas,
        "disc_radius": float(R),
        "g_convex": gconv["convex"],
        "input_ge_halves": bool(E_input >= mean_halves - tol),
        "halves_ge_discs": bool(mean_halves >= mean_discs - tol),
        "discs_ge_disc": bool(mean_discs >= E_disc - tol),
    }
    return reports, comparison
