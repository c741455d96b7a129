"""Jost solutions and the coefficients alpha, beta.

``J^+_z`` behaves like ``exp(izx)`` at ``+inf`` and ``J^-_z`` like
``exp(-izx)`` at ``-inf``.  Far on the opposite side

    J^+_z ~ alpha exp(izx) + beta^+ exp(-izx),
    J^-_z ~ alpha exp(-izx) + beta^- exp(izx).

The primary solver marches the differential equation with a fourth-order
Magnus integrator aligned with atoms and density discontinuities.  For real
``k`` it works on ``J`` directly, whose transfer matrices are then real and
unimodular, so ``|alpha|^2 - |beta|^2 = 1`` holds to rounding.  Off the real
axis it works on the modified function ``j = exp(-+izx) J``, which stays
bounded on the far side.  A successive-approximation solver of the Volterra
integral equation is kept as an independent cross-check.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import kernels
from .errors import DomainError, SolverError, UsageError
from .potential import Potential, SpatialGrid, default_grid

Z_GUARD = 1e-4
H_MAX = 0.005
_V_TINY = 1e-14
_GAUSS_OFFSET = 0.5 - np.sqrt(3.0) / 6.0


def check_frequency(z, guard: float = Z_GUARD) -> complex:
    """Validate a spectral parameter: ``Im z >= 0`` and ``|z| >= guard``."""
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise DomainError(f"frequency {z} is not finite")
    if z.imag < 0:
        raise DomainError(f"frequency {z} lies in the lower half-plane")
    if abs(z) < guard:
        raise DomainError(f"|z| = {abs(z):.3g} is inside the guard radius {guard:g}")
    return z


def _check_side(side: str) -> str:
    if side not in ("plus", "minus"):
        raise UsageError(f"side must be 'plus' or 'minus', got {side!r}")
    return side


class MagnusProgram:
    """Substep layout for a potential on a grid, shared by every frequency.

    Cell boundaries are the grid points plus atom locations and density
    breakpoints.  Cells where the density is negligible take one step, the
    others are split into substeps of length at most ``h_max``.
    """

    def __init__(self, V: Potential, grid: SpatialGrid, h_max: float = H_MAX):
        self.V = V
        self.grid = grid
        self.h_max = float(h_max)
        x = grid.x
        tol = 1e-12 * max(1.0, abs(grid.x_min), abs(grid.x_max))
        extra = [p for p in list(V.breakpoints) + list(V.atom_locations) if grid.x_min < p < grid.x_max]
        edges = np.unique(np.concatenate([x, np.asarray(extra, dtype=float)]))
        # merge points that coincide with grid nodes up to rounding
        keep = np.concatenate([[True], np.diff(edges) > tol])
        edges = edges[keep]
        edges[0], edges[-1] = grid.x_min, grid.x_max

        # decide the substep count per cell from a cheap density probe
        a, b = edges[:-1], edges[1:]
        if V.has_density:
            probe = np.stack([V.density_values(a + f * (b - a)) for f in (0.0, 0.5, 1.0)])
            active = np.max(np.abs(probe), axis=0) > _V_TINY
        else:
            active = np.zeros(a.shape, dtype=bool)
        n_per = np.where(active, np.maximum(1, np.ceil((b - a) / self.h_max - 1e-9)).astype(int), 1)
        cell = np.repeat(np.arange(a.size), n_per)
        frac_lo = np.concatenate([np.arange(n) / n for n in n_per]) if a.size else np.zeros(0)
        width = (b - a)[cell] / n_per[cell]
        lo = a[cell] + frac_lo * (b - a)[cell]
        self.h = width
        self.lo = lo
        g1 = lo + _GAUSS_OFFSET * width
        g2 = lo + (1.0 - _GAUSS_OFFSET) * width
        if V.has_density:
            self.v1 = V.density_values(g1)
            self.v2 = V.density_values(g2)
        else:
            self.v1 = np.zeros_like(g1)
            self.v2 = np.zeros_like(g2)
        bnd = np.concatenate([lo, [grid.x_max]])
        self.boundaries = bnd
        jump = np.zeros(bnd.size)
        for loc, mass in V.atoms:
            if not grid.contains(loc):
                continue
            jump[int(np.argmin(np.abs(bnd - loc)))] += mass
        self.jump = jump
        # boundary index of every grid node
        self.grid_boundary = np.searchsorted(bnd, x - tol)
        self.n_sub = self.h.size

    def out_map(self, which="grid"):
        """``(out_idx, n_out)`` for storing all grid nodes or only the two ends."""
        out = np.full(self.n_sub + 1, -1, dtype=np.int64)
        if which == "grid":
            out[self.grid_boundary] = np.arange(self.grid_boundary.size)
            return out, self.grid_boundary.size
        out[0] = 0
        out[-1] = 1
        return out, 2

    def sweep(self, z, side, form, which="grid"):
        """Run the integrator for an array of frequencies.

        ``form`` is ``"direct"`` (integrate ``J`` scaled to 1 at the starting
        edge) or ``"modified"`` (integrate ``j``).  Returns ``(u, du, out_idx)``.
        """
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        plus = side == "plus"
        if form == "direct":
            c = np.zeros_like(z)
            shift = z * z
            du0 = 1j * z if plus else -1j * z
        else:
            c = 2j * z if plus else -2j * z
            shift = np.zeros_like(z)
            du0 = np.zeros_like(z)
        out_idx, n_out = self.out_map(which)
        u, du = kernels.magnus_sweep(
            self.h, self.v1, self.v2, self.jump, out_idx, n_out, c, shift, np.ones_like(z), du0, plus
        )
        return u, du


_PROGRAM_CACHE: dict = {}


def magnus_program(V: Potential, grid: SpatialGrid, h_max: float = H_MAX) -> MagnusProgram:
    """Build (or reuse) the substep program for ``V`` on ``grid``."""
    key = (id(V), grid, float(h_max))
    hit = _PROGRAM_CACHE.get(key)
    if hit is not None and hit.V is V:
        return hit
    prog = MagnusProgram(V, grid, h_max)
    if len(_PROGRAM_CACHE) > 32:
        _PROGRAM_CACHE.clear()
    _PROGRAM_CACHE[key] = prog
    return prog


@dataclass(frozen=True, eq=False)
class JostSolution:
    """Samples of a Jost solution on a grid.

    ``j`` and ``dj`` are the modified function and its derivative;
    ``J = exp(+-izx) j`` and ``dJ`` its derivative.
    """

    side: str
    z: complex
    grid: SpatialGrid
    j: np.ndarray
    dj: np.ndarray
    method: str = "magnus"
    residual: float = float("nan")

    @property
    def x(self):
        return self.grid.x

    @cached_property
    def phase(self):
        s = 1j if self.side == "plus" else -1j
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(s * self.z * self.x)

    @property
    def J(self) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return self.phase * self.j

    @property
    def dJ(self) -> np.ndarray:
        s = 1j if self.side == "plus" else -1j
        with np.errstate(over="ignore", invalid="ignore"):
            return self.phase * (self.dj + s * self.z * self.j)

    # sample-array aliases
    j_samples = property(lambda self: self.j)
    J_samples = property(lambda self: self.J)
    dJ_samples = property(lambda self: self.dJ)


@dataclass(frozen=True)
class JostCoefficients:
    alpha: complex
    beta_plus: complex
    beta_minus: complex
    alpha_minus: complex = complex("nan")
    wronskian_residual: float = float("nan")


def _to_modified(u, du, z, x, x0, side):
    """Convert direct-form output (J scaled by exp(-+iz x0)) to ``(j, dj)``."""
    s = 1j if side == "plus" else -1j
    ph = np.exp(-s * z * (x - x0))
    j = ph * u
    dj = ph * (du - s * z * u)
    return j, dj


def _form_for(z) -> str:
    return "direct" if np.all(np.imag(z) == 0) else "modified"


def jost_solve(
    V: Potential,
    z,
    side: str = "plus",
    grid: Optional[SpatialGrid] = None,
    *,
    method: str = "magnus",
    h_max: float = H_MAX,
    guard: float = Z_GUARD,
    tol: float = 1e-10,
    max_iter: int = 200,
    fallback: bool = True,
) -> JostSolution:
    """Jost solution ``J_z^side`` sampled on ``grid``.

    Parameters
    ----------
    method : {"magnus", "picard"}
        ``"picard"`` iterates the Volterra equation with trapezoid quadrature
        (second order, intended as a cross-check).  When it stalls a
        :class:`SolverError` is raised, or with ``fallback`` the Magnus
        solver is used instead.
    """
    grid = grid or default_grid()
    z = check_frequency(z, guard)
    side = _check_side(side)
    if method == "picard":
        try:
            return picard_solve(V, z, side, grid, tol=tol, max_iter=max_iter)
        except SolverError:
            if not fallback:
                raise
    elif method != "magnus":
        raise UsageError(f"unknown Jost method {method!r}")
    prog = magnus_program(V, grid, h_max)
    form = _form_for(z)
    u, du = prog.sweep(np.array([z]), side, form, "grid")
    u, du = u[:, 0], du[:, 0]
    x = grid.x
    if form == "direct":
        x0 = grid.x_max if side == "plus" else grid.x_min
        j, dj = _to_modified(u, du, z, x, x0, side)
    else:
        j, dj = u, du
    if not (np.all(np.isfinite(j)) and np.all(np.isfinite(dj))):
        raise SolverError(f"Jost integration overflowed at z={z}")
    return JostSolution(side=side, z=z, grid=grid, j=j, dj=dj, method="magnus")


def jost_table(V: Potential, z, side: str, grid: Optional[SpatialGrid] = None, *, h_max: float = H_MAX):
    """``(J, dJ)`` on the grid for real frequencies, shape ``(n_points, len(z))``."""
    grid = grid or default_grid()
    z = np.atleast_1d(np.asarray(z, dtype=float))
    for zz in z:
        check_frequency(zz)
    prog = magnus_program(V, grid, h_max)
    u, du = prog.sweep(z.astype(complex), side, "direct", "grid")
    x0 = grid.x_max if side == "plus" else grid.x_min
    s = 1j if side == "plus" else -1j
    ph = np.exp(s * z * x0)
    return u * ph, du * ph


def _edge_coefficients(uP, duP, uM, duM, z, grid, form):
    """alpha, beta^+, beta^- and alpha^- from sweep outputs at the two ends."""
    xl, xr = grid.x_min, grid.x_max
    iz = 1j * z
    if form == "direct":
        # J^+ = exp(iz xr) u at xl;  J^- = exp(-iz xl) u at xr
        JP = np.exp(iz * xr) * uP
        dJP = np.exp(iz * xr) * duP
        JM = np.exp(-iz * xl) * uM
        dJM = np.exp(-iz * xl) * duM
        alpha = np.exp(-iz * xl) * (iz * JP + dJP) / (2 * iz)
        beta_p = np.exp(iz * xl) * (iz * JP - dJP) / (2 * iz)
        alpha_m = np.exp(iz * xr) * (iz * JM - dJM) / (2 * iz)
        beta_m = np.exp(-iz * xr) * (iz * JM + dJM) / (2 * iz)
    else:
        alpha = uP + duP / (2 * iz)
        alpha_m = uM - duM / (2 * iz)
        # off the real axis beta carries exp(2 Im z |x|) and may overflow on
        # wide grids; only alpha is needed there
        with np.errstate(over="ignore", invalid="ignore"):
            beta_p = -duP * np.exp(2 * iz * xl) / (2 * iz)
            beta_m = duM * np.exp(-2 * iz * xr) / (2 * iz)
    return alpha, beta_p, beta_m, alpha_m


def alpha_beta(V: Potential, z, grid: Optional[SpatialGrid] = None, *, h_max: float = H_MAX, guard: float = Z_GUARD):
    """Vectorised ``(alpha, beta_plus, beta_minus, alpha_minus)`` over frequencies.

    Only the end values of each sweep are stored, so long frequency lists are
    cheap.  ``alpha_minus`` is the same quantity obtained from ``J^-`` and
    serves as a consistency check.
    """
    grid = grid or default_grid()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    for zz in z:
        check_frequency(zz, guard)
    prog = magnus_program(V, grid, h_max)
    out = [np.empty(z.shape, dtype=complex) for _ in range(4)]
    real = z.imag == 0
    for mask, form in ((real, "direct"), (~real, "modified")):
        if not mask.any():
            continue
        zz = z[mask]
        uP, duP = prog.sweep(zz, "plus", form, "ends")
        uM, duM = prog.sweep(zz, "minus", form, "ends")
        res = _edge_coefficients(uP[0], duP[0], uM[1], duM[1], zz, grid, form)
        for o, r in zip(out, res):
            o[mask] = r
    return tuple(out)


def jost_coefficients(V: Potential, z, grid: Optional[SpatialGrid] = None, *, h_max: float = H_MAX,
                      guard: float = Z_GUARD) -> JostCoefficients:
    """alpha_z and beta_z^+- for one frequency, with a Wronskian cross-check."""
    grid = grid or default_grid()
    z = check_frequency(z, guard)
    a, bp, bm, am = (v[0] for v in alpha_beta(V, z, grid, h_max=h_max, guard=guard))
    if not all(np.isfinite([a, bp, bm, am])):
        raise SolverError(f"non-finite Jost coefficients at z={z}")
    return JostCoefficients(
        alpha=complex(a),
        beta_plus=complex(bp),
        beta_minus=complex(bm),
        alpha_minus=complex(am),
        wronskian_residual=float(abs(a - am) * abs(2 * z)),
    )


def wronskian(left: JostSolution, right: JostSolution, *, n_samples: int = 9, return_spread: bool = False):
    """``W[J^+, J^-] = J^+ (J^-)' - (J^+)' J^-`` averaged over interior samples.

    The argument order does not matter; the plus solution is always taken
    first.  With ``return_spread`` the maximum deviation of the sampled
    values from their mean is returned as well.
    """
    if left.side == right.side:
        raise UsageError("the Wronskian needs one plus and one minus solution")
    if left.grid != right.grid:
        raise UsageError("Jost solutions live on different grids")
    if abs(left.z - right.z) > 1e-14 * max(1.0, abs(left.z)):
        raise UsageError("Jost solutions have different frequencies")
    p, m = (left, right) if left.side == "plus" else (right, left)
    n = left.grid.n_points
    idx = np.linspace(n // 10, n - 1 - n // 10, n_samples).round().astype(int)
    # W = exp(iz x) exp(-iz x) (...) in terms of the modified functions
    z = p.z
    jp, djp, jm, djm = p.j[idx], p.dj[idx], m.j[idx], m.dj[idx]
    w = jp * (djm - 1j * z * jm) - (djp + 1j * z * jp) * jm
    mean = complex(np.mean(w))
    if return_spread:
        return mean, float(np.max(np.abs(w - mean)))
    return mean


# ---------------------------------------------------------------------------
# Successive approximations of the Volterra equation
# ---------------------------------------------------------------------------


def _volterra_apply(g, z, side, grid, atom_terms):
    """Integral term of the modified Volterra equation for the density ``g = V j``.

    For the plus side ``(Kg)(x) = int_x^inf (exp(2iz(y-x)) - 1)/(2iz) g(y) dy``,
    computed by two backward recursions with trapezoid panels.
    """
    h = grid.spacing
    rho = np.exp(2j * z * h)
    if side == "minus":
        g = g[::-1]
    a_osc = 0.5 * h * (g[:-1] + rho * g[1:])
    a_flat = 0.5 * h * (g[:-1] + g[1:])
    osc = np.concatenate([kernels.backward_recursion(a_osc, rho), [0.0]])
    flat = np.concatenate([np.cumsum(a_flat[::-1])[::-1], [0.0]])
    out = (osc - flat) / (2j * z)
    if side == "minus":
        out = out[::-1]
    x = grid.x
    for loc, mass, jval in atom_terms:
        d = loc - x if side == "plus" else x - loc
        mask = d > 0
        out[mask] += mass * jval * (np.exp(2j * z * d[mask]) - 1.0) / (2j * z)
    return out


def picard_solve(V: Potential, z, side: str, grid: SpatialGrid, *, tol: float = 1e-10,
                 max_iter: int = 200, stall: int = 25) -> JostSolution:
    """Modified Jost function by Picard iteration of the Volterra equation.

    Raises :class:`SolverError` when the update norm stops decreasing for
    ``stall`` consecutive iterations or becomes non-finite.
    """
    z = check_frequency(z)
    x = grid.x
    v = V.density_values(x)
    j = np.ones(x.size, dtype=complex)
    best = np.inf
    since_best = 0
    res = np.inf
    for it in range(max_iter):
        atoms = [(a, m, np.interp(a, x, j.real) + 1j * np.interp(a, x, j.imag)) for a, m in V.atoms]
        new = 1.0 + _volterra_apply(v * j, z, side, grid, atoms)
        if not np.all(np.isfinite(new)):
            raise SolverError(f"Picard iteration diverged at z={z}")
        res = float(np.max(np.abs(new - j)) / max(1.0, np.max(np.abs(new))))
        j = new
        if res < tol:
            break
        if res < best:
            best, since_best = res, 0
        else:
            since_best += 1
            if since_best >= stall:
                raise SolverError(f"Picard iteration stalled at residual {res:.3g} (z={z})")
    else:
        raise SolverError(f"Picard iteration did not reach {tol:g} in {max_iter} iterations (residual {res:.3g})")
    dj = np.gradient(j, grid.spacing, edge_order=2)
    return JostSolution(side=side, z=z, grid=grid, j=j, dj=dj, method="picard", residual=res)


def volterra_residual(sol: JostSolution, V: Potential) -> float:
    """Sup-norm defect of ``j`` in the (trapezoid-discretised) Volterra equation."""
    grid = sol.grid
    x = grid.x
    atoms = [(a, m, np.interp(a, x, sol.j.real) + 1j * np.interp(a, x, sol.j.imag)) for a, m in V.atoms]
    rhs = 1.0 + _volterra_apply(V.density_values(x) * sol.j, sol.z, sol.side, grid, atoms)
    return float(np.max(np.abs(rhs - sol.j)) / max(1.0, np.max(np.abs(sol.j))))
