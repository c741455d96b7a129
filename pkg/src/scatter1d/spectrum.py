"""Bound states, exceptional-frequency scans and the continuum spectral density."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import ExceptionalFrequencyError, SolverError
from .jost import Z_GUARD, alpha_beta, jost_coefficients, jost_solve
from .lippmann import COND_THRESHOLD, build_system
from .oracle import fd_apply
from .potential import Potential, SpatialGrid, default_grid

N_MESH = 400
ROOT_TOL = 1e-10


@dataclass
class BoundState:
    """Eigenpair ``H u = lam u`` with ``lam = -kappa^2``.

    ``eigenfunction`` is real, normalised in the grid L2 norm and positive
    at its point of maximum modulus.
    """

    kappa: float
    lam: float
    eigenfunction: np.ndarray
    grid: SpatialGrid
    residual: float
    alpha_value: float = 0.0
    edge_amplitude: float = 0.0

    @property
    def eigenvalue(self) -> float:
        return self.lam


@dataclass
class ExceptionalScan:
    k_grid: np.ndarray
    condition: np.ndarray
    flags: np.ndarray
    threshold: float


@dataclass
class SpectrumData:
    bound_states: List[BoundState]
    exceptional: Optional[ExceptionalScan] = None
    notes: str = ""

    @property
    def eigenvalues(self):
        return np.array([b.lam for b in self.bound_states])


def default_kappa_max(V: Potential, grid: SpatialGrid) -> float:
    """Upper bound for ``kappa``: ``sqrt(max(0, -min V)) + sum|m|/2 + 1``."""
    vmin = float(np.min(V.density_values(grid.x))) if V.has_density else 0.0
    return float(np.sqrt(max(0.0, -vmin)) + 0.5 * np.sum(np.abs(V.atom_masses)) + 1.0)


def _alpha_imag_axis(V, kappa, grid):
    return alpha_beta(V, 1j * np.atleast_1d(kappa), grid)[0].real


def _kappa_mesh(kappa_max, guard, n_mesh):
    n_geo = n_mesh // 4
    lin = np.linspace(guard, kappa_max, n_mesh - n_geo)
    geo = np.geomspace(guard, lin[1], n_geo + 2)[1:-1]
    return np.unique(np.concatenate([lin, geo]))


def _center(V: Potential, grid: SpatialGrid) -> float:
    x = grid.x
    w = np.abs(V.density_values(x)) * grid.weights
    mass = np.abs(V.atom_masses)
    tot = w.sum() + mass.sum()
    if tot == 0:
        return 0.5 * (grid.x_min + grid.x_max)
    return float((np.dot(w, x) + np.dot(mass, V.atom_locations)) / tot)


def bound_eigenfunction(V: Potential, kappa: float, grid: SpatialGrid):
    """Normalised real eigenfunction for the zero ``i kappa`` of ``alpha``.

    ``J^+`` is used right of the potential's centre and ``J^-`` left of it;
    they are matched by least squares on a window around the centre.
    """
    x = grid.x
    z = 1j * kappa
    jp = jost_solve(V, z, "plus", grid)
    jm = jost_solve(V, z, "minus", grid)
    xc = _center(V, grid)
    ic = int(np.clip(np.searchsorted(x, xc), 1, x.size - 2))
    half = max(3, int(round(1.0 / grid.spacing)))
    win = slice(max(0, ic - half), min(x.size, ic + half + 1))
    with np.errstate(over="ignore", invalid="ignore"):
        Jp_win = np.exp(-kappa * x[win]) * jp.j[win]
        Jm_win = np.exp(kappa * x[win]) * jm.j[win]
    c = np.vdot(Jm_win, Jp_win) / np.vdot(Jm_win, Jm_win)
    u = np.empty(x.size, dtype=complex)
    right = x >= x[ic]
    u[right] = np.exp(-kappa * x[right]) * jp.j[right]
    u[~right] = c * np.exp(kappa * x[~right]) * jm.j[~right]
    if not np.all(np.isfinite(u)):
        raise SolverError(f"eigenfunction construction overflowed at kappa={kappa}")
    imax = int(np.argmax(np.abs(u)))
    u = u * (abs(u[imax]) / u[imax])
    u = u.real
    u /= np.sqrt(np.dot(grid.weights, u * u))
    return u


def eigen_residual(V: Potential, grid: SpatialGrid, u, lam: float) -> float:
    """``||(H - lam) u|| / ||u||`` with a fourth-order stencil, away from atoms."""
    Hu, mask = fd_apply(V, grid, u)
    r = (Hu - lam * u)[mask]
    w = grid.weights[mask]
    return float(np.sqrt(np.dot(w, np.abs(r) ** 2) / np.dot(grid.weights, np.abs(u) ** 2)))


def bound_states(V: Potential, grid: Optional[SpatialGrid] = None, kappa_max: Optional[float] = None, *,
                 n_mesh: int = N_MESH, tol: float = ROOT_TOL, guard: float = Z_GUARD) -> List[BoundState]:
    """All zeros ``i kappa`` of ``alpha`` with ``kappa`` in ``(guard, kappa_max]``.

    Sign changes of the real function ``kappa -> alpha(i kappa)`` on a mesh
    are refined with Brent's method.  Returned in ascending eigenvalue order.
    """
    grid = grid or default_grid()
    if V.is_zero:
        return []
    if kappa_max is None:
        kappa_max = default_kappa_max(V, grid)
    if not kappa_max > 0:
        raise ValueError("kappa_max must be positive")
    mesh = _kappa_mesh(float(kappa_max), guard, n_mesh)
    vals = _alpha_imag_axis(V, mesh, grid)
    f = lambda k: float(_alpha_imag_axis(V, k, grid)[0])
    roots = []
    for i in np.nonzero(vals == 0.0)[0]:
        roots.append(float(mesh[i]))
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(f, mesh[i], mesh[i + 1], xtol=tol * 1e-2, rtol=4 * np.finfo(float).eps))
    out = []
    for kap in sorted(set(roots), reverse=True):
        u = bound_eigenfunction(V, kap, grid)
        lam = -kap * kap
        out.append(
            BoundState(
                kappa=kap,
                lam=lam,
                eigenfunction=u,
                grid=grid,
                residual=eigen_residual(V, grid, u, lam),
                alpha_value=f(kap),
                edge_amplitude=float(max(abs(u[0]), abs(u[-1])) / np.max(np.abs(u))),
            )
        )
    return out


def exceptional_scan(V: Potential, k_grid, grid: Optional[SpatialGrid] = None, *,
                     cond_threshold: float = COND_THRESHOLD, stride: int = 4) -> ExceptionalScan:
    """Condition numbers of the discretised ``I + T(k)``; flags above threshold.

    ``stride`` thins the Nystrom nodes (every ``stride``-th grid point);
    conditioning is insensitive to it while the cost drops by ``stride^3``.
    """
    grid = grid or default_grid()
    k = np.atleast_1d(np.asarray(k_grid, dtype=float))
    cond = np.empty(k.size)
    for i, kk in enumerate(k):
        if kk <= 0:
            raise ValueError("exceptional_scan expects positive frequencies")
        sysm = build_system(V, kk, grid, stride=stride).factor()
        cond[i] = sysm.condition_estimate
    return ExceptionalScan(k_grid=k, condition=cond, flags=~(cond <= cond_threshold), threshold=cond_threshold)


def spectrum(V: Potential, grid: Optional[SpatialGrid] = None, k_grid=None, **kw) -> SpectrumData:
    """Bound states plus (optionally) an exceptional scan."""
    grid = grid or default_grid()
    bs = bound_states(V, grid, **kw)
    scan = exceptional_scan(V, k_grid, grid) if k_grid is not None else None
    notes = "embedded eigenvalues are not searched for"
    return SpectrumData(bound_states=bs, exceptional=scan, notes=notes)


class _Interp:
    def __init__(self, grid, values):
        self.spline = CubicSpline(grid.x, values)

    def __call__(self, t):
        return self.spline(t)


def spectral_density(V: Potential, x, y, lam: float, grid: Optional[SpatialGrid] = None, *,
                     alpha_threshold: float = 1e-8):
    """``p(x, y, lam) = (2 pi)^{-1} Re(phi_k^+(y) phi_k^-(x) / (k t_k))``, ``k = sqrt(lam)``.

    ``x`` and ``y`` may be arrays (broadcast together); values between grid
    nodes come from cubic-spline interpolation of the Jost solutions.
    """
    grid = grid or default_grid()
    if not lam > 0:
        raise ValueError("lam must be positive")
    k = float(np.sqrt(lam))
    co = jost_coefficients(V, k, grid)
    if abs(co.alpha) <= alpha_threshold:
        raise ExceptionalFrequencyError(f"alpha vanishes near k={k}", frequency=k)
    t = 1.0 / co.alpha
    Jp = jost_solve(V, k, "plus", grid).J
    Jm = jost_solve(V, k, "minus", grid).J
    php = _Interp(grid, Jp / co.alpha)
    phm = _Interp(grid, Jm / co.alpha)
    val = np.real(php(np.asarray(y, float)) * phm(np.asarray(x, float)) / (k * t)) / (2 * np.pi)
    return float(val) if np.ndim(val) == 0 else val
