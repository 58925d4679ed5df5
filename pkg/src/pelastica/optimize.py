"""Minimise ``F_p`` over closed curves of prescribed area.

The unknowns are the tangent angles ``theta[1:]`` and the length ``L``;
``theta[0] = 0`` fixes the rotation gauge and the total turn is fixed at
``2 pi`` by the periodic wrap.  Closure (two equations) and area (one) are
handled by an augmented Lagrangian whose inner problems are solved by
gradient descent with Barzilai-Borwein trial steps and Armijo backtracking.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .curve_core import (
    TWO_PI, AngleCurve, CurveError, PointCurve, area_gauss_green, centroid,
    circularity, curvature, is_simple, project_closure,
)
from .energy import quotient_Qp

log = logging.getLogger(__name__)


class OptimizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class OptimizerConfig:
    p: float = 2.0
    target_area: float = np.pi
    N: int = 256
    max_outer: int = 30
    max_inner: int = 20000
    penalty_init: float = 100.0
    penalty_growth: float = 10.0
    step_tol: float = 1e-14
    grad_tol: float = 1e-5
    constraint_tol: float = 1e-9
    simplicity_every: int = 500

    def __post_init__(self) -> None:
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if not self.target_area > 0:
            raise ValueError("target_area must be positive")
        for name in ("step_tol", "grad_tol", "constraint_tol", "penalty_init"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.penalty_growth <= 1:
            raise ValueError("penalty_growth must exceed 1")
        if self.max_outer < 1 or self.N < 8:
            raise ValueError("max_outer >= 1 and N >= 8 required")


@dataclass(frozen=True)
class OptimizationResult:
    curve: AngleCurve
    history: list[dict] = field(repr=False)
    el_alpha: float
    el_residual: float
    circularity: float
    q_p: float
    converged: bool
    outer_iterations: int
    simple: bool
    message: str = ""


# ---------------------------------------------------------------------------
# objective and constraints


def _sgnpow(x: NDArray, q: float) -> NDArray:
    return np.abs(x) ** q * np.sign(x)


def objective_and_gradient(theta: NDArray, L: float, p: float,
                           turning: int = 1) -> tuple[float, NDArray]:
    """Discrete ``F_p`` and its gradient with respect to ``(theta_0..theta_{N-1}, L)``.

    ``F_p = (I / 2)^(2/p)`` with ``I = ds^(1-p) sum |d_i|^p`` and
    ``d_i = theta_{i+1} - theta_i`` (periodic, ``+2 pi turning`` on the wrap).
    """
    theta = np.asarray(theta, float)
    N = theta.size
    ds = L / N
    d = np.diff(np.append(theta, theta[0] + TWO_PI * turning))
    S = float(np.sum(np.abs(d) ** p))
    I = ds ** (1 - p) * S
    F = (0.5 * I) ** (2.0 / p)
    dF_dI = (2.0 / p) * F / I
    sg = _sgnpow(d, p - 1)
    dS = p * (np.roll(sg, 1) - sg)
    grad = np.empty(N + 1)
    grad[:N] = dF_dI * ds ** (1 - p) * dS
    grad[N] = (2.0 / p) * (1 - p) * F / L
    return F, grad


def _area_and_grad(theta: NDArray, ds: float) -> tuple[float, NDArray]:
    c, s = np.cos(theta), np.sin(theta)
    cum_c = np.cumsum(c)
    cum_s = np.cumsum(s)
    before_c, before_s = cum_c - c, cum_s - s
    after_c, after_s = cum_c[-1] - cum_c, cum_s[-1] - cum_s
    area = 0.5 * ds * ds * float(np.sum(s * before_c - c * before_s))
    grad = 0.5 * ds * ds * (c * (before_c - after_c) + s * (before_s - after_s))
    return area, grad


def constraints(theta: NDArray, L: float, target_area: float,
                jacobian: bool = False):
    """Closure and area residuals ``(c_x, c_y, area - target_area)``.

    With ``jacobian=True`` also returns the 3 x (N+1) Jacobian with respect
    to ``(theta, L)``.
    """
    theta = np.asarray(theta, float)
    N = theta.size
    ds = L / N
    c, s = np.cos(theta), np.sin(theta)
    area, dA = _area_and_grad(theta, ds)
    res = np.array([ds * c.sum(), ds * s.sum(), area - target_area])
    if not jacobian:
        return res
    J = np.empty((3, N + 1))
    J[0, :N] = -ds * s
    J[1, :N] = ds * c
    J[2, :N] = dA
    J[0, N] = c.sum() / N
    J[1, N] = s.sum() / N
    J[2, N] = 2 * area / L
    return res, J


# ---------------------------------------------------------------------------
# diagnostics


def _vertex_frame(curve: AngleCurve):
    """Vertices carrying the curvature samples and their bisector normals."""
    th = curve.theta
    steps = curve.ds * np.column_stack([np.cos(th), np.sin(th)])
    verts = np.cumsum(steps, axis=0)  # vertex between edge i and i+1
    phi = 0.5 * (th + np.append(th[1:], th[0] + TWO_PI * curve.turning))
    normals = np.column_stack([-np.sin(phi), np.cos(phi)])
    return verts, normals


def el_residual(curve: AngleCurve, p: float) -> tuple[float, float]:
    """Least-squares fit of ``kappa^p = alpha (gamma - gamma_bar) . n``.

    ``gamma_bar`` is the area centroid and ``n`` the normal obtained by
    rotating the tangent by +90 degrees, so a counterclockwise circle gives
    ``alpha < 0``.  Returns ``(alpha, ||kappa^p - alpha h|| / ||kappa^p||)``.
    """
    if curve.turning != 1:
        raise CurveError("EL residual needs turning number 1")
    verts, normals = _vertex_frame(curve)
    cen = np.array(centroid(PointCurve(verts)))
    h = np.einsum("ij,ij->i", verts - cen, normals)
    kp = _sgnpow(curvature(curve), p)
    hh = float(h @ h)
    if hh <= 1e-24 * curve.L**2 * h.size:
        raise ValueError("degenerate fit: support values vanish")
    alpha = float(kp @ h) / hh
    res = float(np.linalg.norm(kp - alpha * h) / np.linalg.norm(kp))
    return alpha, res


def _raw_points(theta: NDArray, ds: float) -> NDArray:
    steps = ds * np.column_stack([np.cos(theta), np.sin(theta)])
    return np.vstack([np.zeros(2), np.cumsum(steps[:-1], axis=0)])


def _polish(theta: NDArray, L: float, target_area: float, turning: int) -> AngleCurve:
    """Exact feasibility: closure projection, then rescale ``L`` to the target area."""
    curve = project_closure(AngleCurve(L, theta, turning), tol=1e-13)
    area = area_gauss_green(curve)
    return curve.scaled(np.sqrt(target_area / area))


# ---------------------------------------------------------------------------
# augmented Lagrangian


class _Problem:
    """Augmented Lagrangian on ``x = (theta_1..theta_{N-1}, L)``."""

    def __init__(self, cfg: OptimizerConfig, turning: int):
        self.cfg = cfg
        self.turning = turning
        self.a = cfg.target_area
        # constraint scaling makes all three residuals dimensionless
        self.scale = np.array([np.sqrt(self.a), np.sqrt(self.a), self.a])
        self.lam = np.zeros(3)
        self.mu = cfg.penalty_init

    def split(self, x):
        return np.concatenate([[0.0], x[:-1]]), x[-1]

    def parts(self, x):
        theta, L = self.split(x)
        F, gF = objective_and_gradient(theta, L, self.cfg.p, self.turning)
        c, J = constraints(theta, L, self.a, jacobian=True)
        c = c / self.scale
        J = J / self.scale[:, None]
        return F, gF[1:], c, J[:, 1:]

    def value_grad(self, x):
        F, gF, c, J = self.parts(x)
        phi = F + self.lam @ c + 0.5 * self.mu * (c @ c)
        grad = gF + J.T @ (self.lam + self.mu * c)
        return phi, grad, F, c

    def multiplier_estimate(self, x):
        _, gF, _, J = self.parts(x)
        return -np.linalg.lstsq(J.T, gF, rcond=None)[0]

    def grad_norm(self, g, x):
        """Mesh-independent L2 norm: theta components scale like ``ds``."""
        ds = x[-1] / (x.size)
        return float(np.sqrt((g[:-1] @ g[:-1]) / ds + g[-1] ** 2))


def minimize_Fp(initial: AngleCurve, cfg: OptimizerConfig) -> OptimizationResult:
    """Minimise ``F_p`` at fixed enclosed area starting from ``initial``.

    The initial curve is resampled to ``cfg.N`` nodes if needed, projected
    onto the closed curves and rescaled to the target area.  Reaching
    ``max_outer`` without meeting the tolerances is reported through
    ``converged=False``, not raised.
    """
    if initial.turning != 1:
        raise CurveError("optimisation requires turning number 1")
    curve = _resample(initial, cfg.N)
    curve = _polish(curve.theta - curve.theta[0], curve.L, cfg.target_area, 1)

    prob = _Problem(cfg, 1)
    x = np.concatenate([curve.theta[1:], [curve.L]])
    prob.lam = prob.multiplier_estimate(x)
    history: list[dict] = []
    simple = True
    converged = False
    message = "max_outer reached"
    prev_defect = np.inf
    outer = 0
    n_accepted = 0

    for outer in range(1, cfg.max_outer + 1):
        inner_tol = max(cfg.grad_tol, 10.0 ** (-outer - 2))
        phi, g, F, c = prob.value_grad(x)
        _record(history, outer, x, F, c, prob, g, phi, cfg)
        step = 1.0 / max(1.0, np.linalg.norm(g))
        x_prev = g_prev = None
        for _ in range(cfg.max_inner):
            if prob.grad_norm(g, x) <= inner_tol:
                break
            if x_prev is not None:
                sx, sg = x - x_prev, g - g_prev
                sy = float(sx @ sg)
                step = float(sx @ sx) / sy if sy > 0 else 2 * step
            accepted = False
            gg = float(g @ g)
            t = step
            while t * np.sqrt(gg) > cfg.step_tol * max(1.0, np.linalg.norm(x)):
                x_new = x - t * g
                phi_new, g_new, F_new, c_new = prob.value_grad(x_new)
                area_new = c_new[2] * prob.scale[2] + prob.a
                if (np.isfinite(phi_new) and area_new >= 0.5 * prob.a and x_new[-1] > 0
                        and phi_new <= phi - 1e-4 * t * gg):
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                if not history or not np.isfinite(phi):
                    raise OptimizationError("line search found no acceptable step")
                break
            x_prev, g_prev = x, g
            x, g, phi, F, c = x_new, g_new, phi_new, F_new, c_new
            step = t
            n_accepted += 1
            _record(history, outer, x, F, c, prob, g, phi, cfg)
            if cfg.simplicity_every and n_accepted % cfg.simplicity_every == 0:
                theta, L = prob.split(x)
                simple = simple and is_simple(PointCurve(_raw_points(theta, L / theta.size)))

        defect = float(np.max(np.abs(c)))
        # g is grad of the augmented objective, i.e. the Lagrangian gradient at lam + mu c
        kkt = prob.grad_norm(g, x)
        log.debug("outer %d: F=%.12g defect=%.3e grad=%.3e mu=%.1e",
                  outer, F, defect, kkt, prob.mu)
        if defect <= cfg.constraint_tol and kkt <= cfg.grad_tol:
            converged = True
            message = "converged"
            break
        prob.lam = prob.lam + prob.mu * c
        if defect > 0.5 * prev_defect:
            prob.mu *= cfg.penalty_growth
        prev_defect = defect

    theta, L = prob.split(x)
    final = _polish(theta, L, cfg.target_area, 1)
    simple = simple and is_simple(PointCurve(_raw_points(final.theta, final.ds)))
    alpha, res = el_residual(final, cfg.p)
    return OptimizationResult(
        curve=final, history=history, el_alpha=alpha, el_residual=res,
        circularity=circularity(final), q_p=quotient_Qp(final, cfg.p),
        converged=converged, outer_iterations=outer, simple=simple, message=message,
    )


def _record(history, outer, x, F, c, prob, g, phi, cfg):
    theta, L = prob.split(x)
    area = c[2] * prob.scale[2] + prob.a
    history.append({
        "outer": outer,
        "F_p": F,
        "area_defect": abs(c[2]) * prob.scale[2],
        "closure_defect": float(np.hypot(c[0], c[1]) * prob.scale[0]),
        "grad_norm": prob.grad_norm(g, x),
        "augmented": phi,
        "q_p": F ** (cfg.p / (cfg.p - 1)) * area,
    })


def _resample(curve: AngleCurve, N: int) -> AngleCurve:
    """Periodic linear interpolation of ``theta`` onto ``N`` nodes."""
    if curve.N == N:
        return curve
    s_old = np.append(curve.s, curve.L)
    th_old = curve.theta_closed()
    s_new = np.arange(N) * (curve.L / N)
    return AngleCurve(curve.L, np.interp(s_new, s_old, th_old), curve.turning)
