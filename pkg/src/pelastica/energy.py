"""Curvature energies ``E_f = int f(kappa) ds`` and checks on the integrand ``f``.

``F_p = (1/2)^(2/p) ||kappa||_p^2`` and its positive-part twin are the
normalised p-elastic energies; ``Q_p = F_p^(p/(p-1)) * A`` is their
scale-invariant product with the enclosed area, which equals
``pi^((p+1)/(p-1))`` on circles.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import PchipInterpolator

from .curve_core import AngleCurve, area_gauss_green, curvature

KINDS = ("power", "positive_power", "tabulated")


@dataclass(frozen=True)
class CurvatureIntegrand:
    """The function ``f`` in ``E_f``.

    ``power`` is ``|t|^p``, ``positive_power`` is ``max(t, 0)^p`` and
    ``tabulated`` interpolates ``(t, f)`` pairs with a monotone cubic; it
    refuses to extrapolate.
    """

    kind: str
    p: float | None = None
    t: tuple[float, ...] | None = None
    f: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown integrand kind {self.kind!r}")
        if self.kind == "tabulated":
            if self.t is None or self.f is None or len(self.t) != len(self.f) or len(self.t) < 2:
                raise ValueError("tabulated integrand needs matching t and f tables")
            t = np.asarray(self.t, float)
            if np.any(np.diff(t) <= 0):
                raise ValueError("tabulated t grid must be strictly increasing")
            if np.any(np.asarray(self.f, float) < 0):
                raise ValueError("f must be nonnegative")
            object.__setattr__(self, "t", tuple(map(float, self.t)))
            object.__setattr__(self, "f", tuple(map(float, self.f)))
            object.__setattr__(self, "_interp", PchipInterpolator(t, np.asarray(self.f, float)))
        else:
            if self.p is None or not self.p > 1:
                raise ValueError(f"power integrands need p > 1, got {self.p}")
            object.__setattr__(self, "p", float(self.p))

    @classmethod
    def power(cls, p: float) -> CurvatureIntegrand:
        return cls("power", p)

    @classmethod
    def positive_power(cls, p: float) -> CurvatureIntegrand:
        return cls("positive_power", p)

    @classmethod
    def tabulated(cls, t: ArrayLike, f: ArrayLike) -> CurvatureIntegrand:
        return cls("tabulated", t=tuple(np.asarray(t, float)), f=tuple(np.asarray(f, float)))

    @property
    def domain(self) -> tuple[float, float]:
        if self.kind == "tabulated":
            return self.t[0], self.t[-1]
        return -np.inf, np.inf

    def _check_domain(self, t: NDArray) -> None:
        lo, hi = self.domain
        if np.any(t < lo) or np.any(t > hi):
            raise ValueError(f"tabulated f evaluated outside its grid [{lo:g}, {hi:g}]")

    def __call__(self, t: ArrayLike) -> NDArray:
        t = np.asarray(t, float)
        if self.kind == "power":
            return np.abs(t) ** self.p
        if self.kind == "positive_power":
            return np.maximum(t, 0.0) ** self.p
        self._check_domain(t)
        return self._interp(t)

    def derivative(self, t: ArrayLike) -> NDArray:
        """``f'(t)``; for the power kinds the one-sided derivative at 0 is 0."""
        t = np.asarray(t, float)
        if self.kind == "power":
            return self.p * np.abs(t) ** (self.p - 1) * np.sign(t)
        if self.kind == "positive_power":
            return self.p * np.maximum(t, 0.0) ** (self.p - 1)
        self._check_domain(t)
        return self._interp.derivative()(t)

    def to_json(self) -> dict:
        if self.kind == "tabulated":
            return {"kind": "tabulated", "t": list(self.t), "f": list(self.f)}
        return {"kind": self.kind, "p": self.p}

    @classmethod
    def from_json(cls, obj: dict) -> CurvatureIntegrand:
        kind = obj.get("kind")
        if kind == "tabulated":
            return cls.tabulated(obj["t"], obj["f"])
        return cls(kind, float(obj["p"]))


@dataclass(frozen=True)
class EnergyReport:
    e_f: float
    f_p: float
    f_p_plus: float
    q_p: float
    q_p_plus: float


def _check_p(p: float) -> None:
    if not p > 1:
        raise ValueError(f"exponent must satisfy p > 1, got {p}")


def energy_Ef(curve: AngleCurve, f: CurvatureIntegrand) -> float:
    return curve.ds * float(np.sum(f(curvature(curve))))


def energy_Fp(curve: AngleCurve, p: float, plus: bool = False) -> float:
    """``(1/2)^(2/p) (int |kappa|^p ds)^(2/p)``; ``plus`` uses ``max(kappa, 0)``."""
    _check_p(p)
    k = curvature(curve)
    k = np.maximum(k, 0.0) if plus else np.abs(k)
    integral = curve.ds * float(np.sum(k**p))
    return (0.5 * integral) ** (2.0 / p)


def circle_quotient(p: float) -> float:
    """``pi^((p+1)/(p-1))``, the value of ``Q_p`` on every circle."""
    _check_p(p)
    return np.pi ** ((p + 1) / (p - 1))


def quotient_Qp(curve: AngleCurve, p: float, plus: bool = False) -> float:
    area = area_gauss_green(curve)
    if area <= 0:
        raise ValueError("quotient needs positive enclosed area")
    return energy_Fp(curve, p, plus) ** (p / (p - 1)) * area


def energy_report(curve: AngleCurve, p: float, f: CurvatureIntegrand | None = None) -> EnergyReport:
    f = f or CurvatureIntegrand.power(p)
    return EnergyReport(
        e_f=energy_Ef(curve, f),
        f_p=energy_Fp(curve, p),
        f_p_plus=energy_Fp(curve, p, plus=True),
        q_p=quotient_Qp(curve, p),
        q_p_plus=quotient_Qp(curve, p, plus=True),
    )


def disc_energy(R: float, f: CurvatureIntegrand) -> float:
    """``E_f`` of the circle of radius ``R``: ``2 pi R f(1/R)``."""
    if not R > 0:
        raise ValueError("radius must be positive")
    return 2 * np.pi * R * float(f(1.0 / R))


def disc_mixing(R1: float, R2: float, f: CurvatureIntegrand) -> tuple[float, float]:
    """Mean energy of two discs and the energy of the disc of their mean area.

    With ``g(t) = f(1/sqrt t) sqrt t`` the disc energy is ``2 pi g(R^2)``,
    so the first value dominates the second whenever ``g`` is convex.
    """
    mean = 0.5 * (disc_energy(R1, f) + disc_energy(R2, f))
    R = np.sqrt(0.5 * (R1**2 + R2**2))
    return mean, disc_energy(R, f)


def g_transform(f: CurvatureIntegrand, t: ArrayLike) -> NDArray:
    t = np.asarray(t, float)
    return f(1.0 / np.sqrt(t)) * np.sqrt(t)


def check_g_convexity(f: CurvatureIntegrand, grid: ArrayLike | None = None,
                      curve: AngleCurve | None = None, rtol: float = 1e-9) -> dict:
    """Test convexity of ``g(t) = f(1/sqrt t) sqrt t`` on a grid of ``t > 0``.

    Each interior point must lie on or below the chord through its
    neighbours, up to ``rtol * max|g|``.  Without an explicit grid, 64
    log-spaced points over ``[kappa_min^2, kappa_max^2]`` of ``curve`` are
    used (positive curvatures only).

    Returns ``{"convex": bool, "min_second_difference": float,
    "min_chord_margin": float}``; the second difference is the divided
    difference estimate of ``g''``.
    """
    if grid is None:
        if curve is None:
            raise ValueError("pass a grid or a curve to derive one from")
        k = curvature(curve)
        k = k[k > 0]
        lo, hi = k.min() ** 2, k.max() ** 2
        if hi <= lo * (1 + 1e-12):
            lo, hi = 0.5 * lo, 2.0 * hi
        grid = np.geomspace(lo, hi, 64)
    t = np.asarray(grid, float)
    if t.ndim != 1 or t.size < 3 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("grid must hold at least 3 strictly increasing positive values")
    g = g_transform(f, t)
    if not np.all(np.isfinite(g)):
        raise ValueError("f is undefined on the mapped grid")
    t0, t1, t2 = t[:-2], t[1:-1], t[2:]
    g0, g1, g2 = g[:-2], g[1:-1], g[2:]
    w = (t2 - t1) / (t2 - t0)
    chord_margin = w * g0 + (1 - w) * g2 - g1
    second = 2 * ((g2 - g1) / (t2 - t1) - (g1 - g0) / (t1 - t0)) / (t2 - t0)
    scale = max(float(np.max(np.abs(g))), np.finfo(float).tiny)
    return {
        "convex": bool(np.min(chord_margin) >= -rtol * scale),
        "min_second_difference": float(np.min(second)),
        "min_chord_margin": float(np.min(chord_margin)),
    }


def check_f_monotone(f: CurvatureIntegrand, grid: ArrayLike, rtol: float = 1e-9) -> dict:
    """Check ``s f'(s) >= int_0^s f(r)/r dr`` at every ``s`` in ``grid``.

    Returns ``{"holds": bool, "worst_margin": float, "margins": array}``.
    Raises ``ValueError`` if the quadrature does not converge, which is
    what happens when ``f(r)/r`` is not integrable at 0.
    """
    s = np.asarray(grid, float)
    if np.any(s <= 0):
        raise ValueError("grid points must be positive")
    left = s * f.derivative(s)
    right = np.empty_like(s)
    for i, si in enumerate(s):
        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            try:
                right[i], _ = quad(lambda r: float(f(r)) / r, 0.0, si, limit=200)
            except IntegrationWarning as exc:
                raise ValueError(f"quadrature of f(r)/r on (0, {si:g}) diverges") from exc
    margins = left - right
    scale = np.maximum(np.abs(left), np.abs(right))
    return {
        "holds": bool(np.all(margins >= -rtol * scale)),
        "worst_margin": float(np.min(margins)),
        "margins": margins,
    }
