"""Semiclassical limit: charts, energy surfaces, flows, and the kicked-top map.

Phase space is the unit sphere S = (Sx, Sy, Sz) with the equal-area chart

    Sx = Q sqrt(1 - (Q^2+P^2)/4),  Sy = P sqrt(1 - (Q^2+P^2)/4),
    Sz = (Q^2+P^2)/2 - 1,

so the chart disk Q^2+P^2 <= 4 covers the sphere with the pole Sz=-1 at the
center and Sz=+1 on the rim.  HO/LMG evolve by the Hamiltonian flow of the
chart variables ({Q,P}=1); the kicked top evolves stroboscopically by an
area-preserving map: an x-torsion by angle k*Sx followed by a z-rotation by
alpha, applied to the sphere vector.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NoConvergence, UnsupportedModel
from .spectra import ModelParams

log = logging.getLogger(__name__)


def chart_to_sphere(q: float, p: float) -> np.ndarray:
    """Unit sphere vector (Sx, Sy, Sz) of a chart point."""
    r2 = q * q + p * p
    if r2 > 4.0:
        raise DomainError(f"(Q,P)=({q},{p}) outside the chart disk Q^2+P^2<=4")
    f = np.sqrt(1.0 - 0.25 * r2)
    return np.array([q * f, p * f, 0.5 * r2 - 1.0])


def sphere_to_chart(s) -> tuple:
    """Chart point (Q, P) of a unit sphere vector; undefined at Sz=+1."""
    s = np.asarray(s, dtype=float)
    f2 = 0.5 * (1.0 - s[..., 2])
    if np.any(f2 < 1e-15):
        raise DomainError("chart is singular at the rim point Sz=+1")
    f = np.sqrt(f2)
    return s[..., 0] / f, s[..., 1] / f


def classical_energy(params: ModelParams, q: float, p: float) -> float:
    """Energy surface value H(Q,P) for HO or LMG."""
    r2 = q * q + p * p
    if r2 > 4.0:
        raise DomainError(f"(Q,P)=({q},{p}) outside the chart disk")
    if params.model == "HO":
        return params.alpha * (0.5 * r2 - 1.0)
    if params.model == "LMG":
        sx2 = q * q * (1.0 - 0.25 * r2)
        return params.alpha * (0.5 * r2 - 1.0) + 0.5 * params.k * sx2
    raise UnsupportedModel("the kicked top has no conserved energy surface")


def energy_gradient(params: ModelParams, q: float, p: float) -> np.ndarray:
    """(dH/dQ, dH/dP) of the HO/LMG chart Hamiltonian."""
    a = params.alpha
    if params.model == "HO":
        return np.array([a * q, a * p])
    if params.model == "LMG":
        k = params.k
        hq = a * q + k * q - 0.5 * k * q**3 - 0.25 * k * q * p * p
        hp = a * p - 0.25 * k * q * q * p
        return np.array([hq, hp])
    raise UnsupportedModel("the kicked top has no conserved energy surface")


def energy_hessian(params: ModelParams, q: float, p: float) -> np.ndarray:
    a = params.alpha
    if params.model == "HO":
        return a * np.eye(2)
    if params.model == "LMG":
        k = params.k
        return np.array([
            [a + k - 1.5 * k * q * q - 0.25 * k * p * p, -0.5 * k * q * p],
            [-0.5 * k * q * p, a - 0.25 * k * q * q],
        ])
    raise UnsupportedModel("the kicked top has no conserved energy surface")


@dataclass(frozen=True)
class CriticalPoint:
    """A stationary point of the energy surface, classified by its Hessian."""

    q: float
    p: float
    energy: float
    kind: str  # minimum | maximum | saddle


def find_critical_points(params: ModelParams, seeds, tol: float = 1e-12,
                         max_iter: int = 100, dedup: float = 1e-8):
    """Newton search for stationary points of H from each seed.

    Converged points are deduplicated and classified by the Hessian
    eigenvalue signs; seeds that do not converge are logged and skipped.
    """
    found = []
    for seed in seeds:
        x = np.array(seed, dtype=float)
        ok = False
        for _ in range(max_iter):
            g = energy_gradient(params, x[0], x[1])
            if np.linalg.norm(g) < tol:
                ok = True
                break
            h = energy_hessian(params, x[0], x[1])
            try:
                x = x - np.linalg.solve(h, g)
            except np.linalg.LinAlgError:
                break
            if x @ x > 16.0:  # ran far outside the chart, hopeless seed
                break
        if not ok:
            log.warning("critical-point search did not converge from seed %s", seed)
            continue
        if any(np.hypot(x[0] - c.q, x[1] - c.p) < dedup for c in found):
            continue
        ev = np.linalg.eigvalsh(energy_hessian(params, x[0], x[1]))
        scale = max(np.abs(ev).max(), 1.0)
        if np.all(ev > 1e-9 * scale):
            kind = "minimum"
        elif np.all(ev < -1e-9 * scale):
            kind = "maximum"
        else:
            kind = "saddle"
        found.append(CriticalPoint(q=x[0], p=x[1],
                                   energy=classical_energy(params, x[0], x[1]),
                                   kind=kind))
    return found


def default_critical_seeds(n_radial: int = 4, n_angular: int = 8):
    """Coarse polar grid of seeds inside the chart disk."""
    seeds = [(0.0, 0.0), (0.01, 0.0)]
    for r in np.linspace(0.4, 1.8, n_radial):
        for th in np.linspace(0.0, 2 * np.pi, n_angular, endpoint=False):
            seeds.append((r * np.cos(th), r * np.sin(th)))
    return seeds


def energy_level_crossing(params: ModelParams, energy: float,
                          bracket, p: float = 0.0) -> float:
    """Q at which H(Q, p) crosses `energy` inside the bracket (by bisection)."""
    f = lambda q: classical_energy(params, q, p) - energy
    lo, hi = bracket
    if f(lo) * f(hi) > 0:
        raise NoConvergence(f"H(Q,{p})-{energy} does not change sign on {bracket}")
    return brentq(f, lo, hi, xtol=1e-14)


def separatrix_edge(params: ModelParams) -> float:
    """Positive-Q point where H(Q,0) returns to the central stationary value.

    Only meaningful for double-well LMG parameters (both wells below the
    central saddle); brackets between the right minimum and the rim.
    """
    if params.model != "LMG":
        raise UnsupportedModel("separatrix edge is defined for the LMG surface")
    qmin2 = 2.0 * (params.alpha + params.k) / params.k
    if not 0.0 < qmin2 < 4.0:
        raise DomainError("parameters do not produce an off-center minimum")
    h0 = classical_energy(params, 0.0, 0.0)
    return energy_level_crossing(params, h0, (np.sqrt(qmin2), 2.0 - 1e-12))


def _flow(params, x):
    g = energy_gradient(params, x[0], x[1])
    return np.array([g[1], -g[0]])


def trajectory(params: ModelParams, start, t_end: float, dt: float = 1e-3):
    """Fixed-step RK4 integration of the HO/LMG chart flow.

    Returns (times, points) with points of shape (n_steps+1, 2).  Raises
    DomainError if the orbit reaches the chart rim.
    """
    if params.model not in ("HO", "LMG"):
        raise UnsupportedModel("trajectories are defined for HO and LMG")
    n_steps = int(round(t_end / dt))
    points = np.empty((n_steps + 1, 2))
    x = np.array(start, dtype=float)
    if x @ x > 4.0:
        raise DomainError(f"start {start} outside the chart disk")
    points[0] = x
    for i in range(1, n_steps + 1):
        k1 = _flow(params, x)
        k2 = _flow(params, x + 0.5 * dt * k1)
        k3 = _flow(params, x + 0.5 * dt * k2)
        k4 = _flow(params, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if x @ x >= 4.0:
            raise DomainError(
                f"trajectory from {start} reached the chart rim at t={i * dt:g}")
        points[i] = x
    return dt * np.arange(n_steps + 1), points


def kick_rotation(alpha: float, k: float, sx):
    """The one-step map matrix: x-torsion by k*Sx, then z-rotation by alpha."""
    t = k * np.asarray(sx, dtype=float)
    ca, sa = np.cos(alpha), np.sin(alpha)
    ct, st = np.cos(t), np.sin(t)
    zero = np.zeros_like(t)
    one = np.ones_like(t)
    return np.array([[ca * one, -sa * ct, sa * st],
                     [sa * one, ca * ct, -ca * st],
                     [zero, st, ct]])


def poincare_step(params: ModelParams, s):
    """One iteration of the kicked-top map, S' = F(Sx) S.

    Accepts a single sphere vector (3,) or a batch (n, 3).
    """
    s = np.asarray(s, dtype=float)
    single = s.ndim == 1
    sb = s[None, :] if single else s
    t = params.k * sb[:, 0]
    ca, sa = np.cos(params.alpha), np.sin(params.alpha)
    ct, st = np.cos(t), np.sin(t)
    x = ca * sb[:, 0] - sa * ct * sb[:, 1] + sa * st * sb[:, 2]
    y = sa * sb[:, 0] + ca * ct * sb[:, 1] - ca * st * sb[:, 2]
    z = st * sb[:, 1] + ct * sb[:, 2]
    out = np.stack([x, y, z], axis=-1)
    return out[0] if single else out


def poincare_section(params: ModelParams, seeds, n_iter: int,
                     sphere_tol: float = 1e-9):
    """Chart-point clouds of the kicked-top map, one (n_iter, 2) array per seed.

    Iterates that drift off the unit sphere beyond `sphere_tol`, or land at
    the chart-singular rim, are dropped.
    """
    seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
    clouds = []
    for seed in seeds:
        s = seed.copy()
        pts = np.empty((n_iter, 2))
        n_ok = 0
        for _ in range(n_iter):
            s = poincare_step(params, s)
            if abs(s @ s - 1.0) > sphere_tol or 1.0 - s[2] < 1e-15:
                continue
            f = np.sqrt(0.5 * (1.0 - s[2]))
            pts[n_ok] = (s[0] / f, s[1] / f)
            n_ok += 1
        clouds.append(pts[:n_ok].copy())
    return clouds
