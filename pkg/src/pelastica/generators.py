"""Named curve generators and seeded random families.

Kept apart from :mod:`pelastica.curve_core` so the geometry layer carries no
distribution choices.  Every generator returns a counterclockwise
:class:`PointCurve` (or an :class:`AngleCurve` where noted); random families
are deterministic functions of their integer seed.

Formulas
--------
circle R            x = R cos t, y = R sin t
ellipse a b         x = a cos t, y = b sin t
polar r(phi)        x = r cos phi, y = r sin phi
peanut amp k        r(phi) = 1 + amp cos(k phi)
egg amp             r(phi) = 1 + amp cos(phi)
oval seed           support function h(phi) = 1 + sum_k a_k cos(k phi + c_k),
                    k = 2..5, rescaled so h + h'' >= 0.3 (strictly convex)
perturbed seed      r(phi) = 1 + sum_k a_k cos(k phi + c_k), k = 2..6, overall
                    amplitude log-uniform in [1e-4, 1] * max_amp so the family
                    reaches from visibly bumpy down to nearly round
square              unit square [0,1]^2
rounded rho         unit square with corners rounded by radius rho
"""

from __future__ import annotations

import numpy as np

from .curve_core import AngleCurve, PointCurve, TWO_PI, angle_from_points


def circle_angle(R: float = 1.0, N: int = 1024) -> AngleCurve:
    """Discrete circle ``theta_i = 2 pi i / N``; curvature is exactly ``1/R``."""
    return AngleCurve(TWO_PI * R, TWO_PI * np.arange(N) / N, 1)


def circle(R: float = 1.0, M: int = 512, center=(0.0, 0.0)) -> PointCurve:
    t = TWO_PI * np.arange(M) / M
    return PointCurve(np.column_stack([R * np.cos(t), R * np.sin(t)]) + np.asarray(center, float))


def ellipse(a: float = 2.0, b: float = 1.0, M: int = 1024) -> PointCurve:
    t = TWO_PI * np.arange(M) / M
    return PointCurve(np.column_stack([a * np.cos(t), b * np.sin(t)]))


def polar(r, M: int = 1024) -> PointCurve:
    phi = TWO_PI * np.arange(M) / M
    rr = r(phi)
    return PointCurve(np.column_stack([rr * np.cos(phi), rr * np.sin(phi)]))


def peanut(amp: float = 0.6, k: int = 2, M: int = 1024) -> PointCurve:
    return polar(lambda phi: 1.0 + amp * np.cos(k * phi), M)


def egg(amp: float = 0.2, M: int = 1024) -> PointCurve:
    return polar(lambda phi: 1.0 + amp * np.cos(phi), M)


def square(M_side: int = 100) -> PointCurve:
    t = np.arange(M_side) / M_side
    z, o = np.zeros(M_side), np.ones(M_side)
    pts = np.concatenate([
        np.column_stack([t, z]), np.column_stack([o, t]),
        np.column_stack([1 - t, o]), np.column_stack([z, 1 - t]),
    ])
    return PointCurve(pts)


def rounded_square(rho: float, M: int = 2048) -> PointCurve:
    """Unit square with corner arcs of radius ``rho`` (0 < rho <= 1/2)."""
    if not 0 < rho <= 0.5:
        raise ValueError("rho must lie in (0, 1/2]")
    # sample by arc length over the four straight pieces and four quarter arcs
    side = 1.0 - 2 * rho
    quarter = 0.5 * np.pi * rho
    per = 4 * (side + quarter)
    s = per * np.arange(M) / M
    pts = np.empty((M, 2))
    centers = np.array([[1 - rho, rho], [1 - rho, 1 - rho], [rho, 1 - rho], [rho, rho]])
    starts = np.array([[rho, 0.0], [1.0, rho], [1 - rho, 1.0], [0.0, 1 - rho]])
    dirs = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    for j, sj in enumerate(s):
        k, u = divmod(sj, side + quarter)
        k = int(k)
        if u < side:
            pts[j] = starts[k] + u * dirs[k]
        else:
            ang = -0.5 * np.pi + k * 0.5 * np.pi + (u - side) / rho
            pts[j] = centers[k] + rho * np.array([np.cos(ang), np.sin(ang)])
    return PointCurve(pts)


def random_convex_oval(seed: int, M: int = 1024, modes=(2, 3, 4, 5)) -> PointCurve:
    """Smooth strictly convex oval from a random support function."""
    rng = np.random.default_rng(seed)
    modes = np.asarray(modes)
    amp = rng.uniform(0.0, 1.0, modes.size) / modes**2
    phase = rng.uniform(0.0, TWO_PI, modes.size)
    phi = TWO_PI * np.arange(M) / M
    arg = np.outer(phi, modes) + phase
    pert = np.cos(arg) @ amp
    dpert = -(np.sin(arg) * modes) @ amp
    radius_pert = (np.cos(arg) * (1 - modes**2)) @ amp  # (h + h'') - 1
    # scale the perturbation so the radius of curvature h + h'' stays >= 0.3
    lam = min(1.0, 0.7 / max(-radius_pert.min(), 1e-12))
    lam *= rng.uniform(0.3, 1.0)
    h = 1.0 + lam * pert
    dh = lam * dpert
    x = h * np.cos(phi) - dh * np.sin(phi)
    y = h * np.sin(phi) + dh * np.cos(phi)
    return PointCurve(np.column_stack([x, y]))


def random_perturbed_circle(seed: int, M: int = 1024, modes=(2, 3, 4, 5, 6),
                            max_amp: float = 0.25) -> PointCurve:
    """Star-shaped polar curve; may be nonconvex."""
    rng = np.random.default_rng(seed)
    modes = np.asarray(modes)
    scale = max_amp * 10.0 ** rng.uniform(-4.0, 0.0)
    amp = rng.uniform(0.0, 1.0, modes.size) * scale / np.sqrt(modes.size)
    phase = rng.uniform(0.0, TWO_PI, modes.size)
    phi = TWO_PI * np.arange(M) / M
    r = 1.0 + np.cos(np.outer(phi, modes) + phase) @ amp
    return PointCurve(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))


def random_peanut(seed: int, M: int = 1024) -> PointCurve:
    rng = np.random.default_rng(seed)
    amp = rng.uniform(0.3, 0.65)
    rot = rng.uniform(0.0, TWO_PI)
    return polar(lambda phi: 1.0 + amp * np.cos(2 * (phi - rot)), M)


FAMILIES = {
    "perturbed-circles": random_perturbed_circle,
    "convex": random_convex_oval,
    "peanuts": random_peanut,
}


def family(name: str, n: int, seed: int = 0, M: int = 1024):
    """Yield ``(curve_id, PointCurve)`` for ``n`` members of a named family.

    ``"mixed"`` cycles through all families.
    """
    if name == "mixed":
        names = list(FAMILIES)
        for i in range(n):
            fam = names[i % len(names)]
            yield f"{fam}-{seed + i}", FAMILIES[fam](seed + i, M)
        return
    if name not in FAMILIES:
        raise KeyError(f"unknown family {name!r}; choose from {sorted(FAMILIES) + ['mixed']}")
    for i in range(n):
        yield f"{name}-{seed + i}", FAMILIES[name](seed + i, M)


def parse_generator(spec: str, M: int = 1024) -> PointCurve:
    """Build a curve from ``name:arg1,arg2`` (e.g. ``ellipse:2,1``)."""
    name, _, rest = spec.partition(":")
    args = [float(a) for a in rest.split(",") if a.strip()] if rest else []
    if name == "circle":
        return circle(*(args or [1.0]), M=M)
    if name == "ellipse":
        return ellipse(*(args or [2.0, 1.0]), M=M)
    if name == "peanut":
        amp, k = (args + [0.6, 2][len(args):])[:2]
        return peanut(amp, int(k), M)
    if name == "egg":
        return egg(*(args or [0.2]), M=M)
    if name == "square":
        return square()
    if name == "rounded":
        return rounded_square(*(args or [0.1]), M=M)
    if name in ("oval", "polygon-smooth"):
        return random_convex_oval(int(args[0]) if args else 0, M)
    if name == "perturbed":
        return random_perturbed_circle(int(args[0]) if args else 0, M)
    raise ValueError(f"unknown generator {name!r}")


def angle_curve(spec: str, N: int, M: int = 1024) -> AngleCurve:
    """Generator spec straight to an :class:`AngleCurve` with ``N`` samples."""
    if spec.partition(":")[0] == "circle":
        args = [float(a) for a in spec.partition(":")[2].split(",") if a.strip()]
        return circle_angle(args[0] if args else 1.0, N)
    return angle_from_points(parse_generator(spec, M), N)
