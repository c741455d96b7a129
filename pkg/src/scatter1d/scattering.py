"""Scattering solutions, the physical family psi^+-, and the S-matrix entries.

For real ``k`` with ``alpha_k != 0``:

    phi_k^+- = J_k^+- / alpha_k,      t_k = 1 / alpha_k,      r_k^+- = beta_k^+- / alpha_k,

and the physical family is

    psi_k^+ = phi_k^+ (k >= 0),  conj(phi_k^-) (k < 0),
    psi_k^- = phi_k^- (k >= 0),  conj(phi_k^+) (k < 0).

``psi_k^+`` carries the incident wave ``exp(ikx)`` for every real ``k`` and
``psi_k^-`` the wave ``exp(-ikx)``.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ExceptionalFrequencyError, UsageError
from .jost import H_MAX, Z_GUARD, alpha_beta, check_frequency, jost_coefficients, jost_solve, jost_table
from .lippmann import ls_defect
from .potential import Potential, SpatialGrid, default_grid

ALPHA_THRESHOLD = 1e-8
RESIDUAL_SPACING = 0.01


@dataclass
class ScatteringWave:
    kind: str
    k: complex
    samples: np.ndarray
    grid: SpatialGrid
    ls_residual: float = float("nan")


@dataclass
class ScatteringData:
    """S-matrix entries on a frequency list.

    Entries at exceptional frequencies (``|alpha| <= threshold``) are masked
    with NaN and flagged in ``exceptional``.
    """

    k_grid: np.ndarray
    t: np.ndarray
    r_plus: np.ndarray
    r_minus: np.ndarray
    alpha: np.ndarray
    beta_plus: np.ndarray
    beta_minus: np.ndarray
    exceptional: np.ndarray = field(default=None)

    @property
    def unitarity_residual(self):
        """``max(| |t|^2 + |r^+-|^2 - 1 |)`` per frequency."""
        t2 = np.abs(self.t) ** 2
        return np.maximum(
            np.abs(t2 + np.abs(self.r_plus) ** 2 - 1.0), np.abs(t2 + np.abs(self.r_minus) ** 2 - 1.0)
        )

    @property
    def jost_residual(self):
        """``max(| |alpha|^2 - |beta^+-|^2 - 1 |)`` per frequency."""
        a2 = np.abs(self.alpha) ** 2
        return np.maximum(
            np.abs(a2 - np.abs(self.beta_plus) ** 2 - 1.0), np.abs(a2 - np.abs(self.beta_minus) ** 2 - 1.0)
        )

    @property
    def cross_residual(self):
        """``|r^+ conj(t) + t conj(r^-)|`` per frequency."""
        return np.abs(self.r_plus * np.conj(self.t) + self.t * np.conj(self.r_minus))

    def to_rows(self):
        for i, k in enumerate(self.k_grid):
            yield (
                k,
                self.t[i].real,
                self.t[i].imag,
                self.r_plus[i].real,
                self.r_plus[i].imag,
                self.r_minus[i].real,
                self.r_minus[i].imag,
                self.unitarity_residual[i],
            )

    CSV_COLUMNS = ("k", "re_t", "im_t", "re_r_plus", "im_r_plus", "re_r_minus", "im_r_minus", "unitarity_residual")


def scattering_coefficients(V: Potential, k_grid, grid: Optional[SpatialGrid] = None, *,
                            alpha_threshold: float = ALPHA_THRESHOLD, h_max: float = H_MAX,
                            guard: float = Z_GUARD) -> ScatteringData:
    """Transmission and reflection coefficients on a list of real frequencies."""
    grid = grid or default_grid()
    k = np.atleast_1d(np.asarray(k_grid, dtype=float))
    alpha, bp, bm, _ = alpha_beta(V, k.astype(complex), grid, h_max=h_max, guard=guard)
    bad = ~(np.abs(alpha) > alpha_threshold)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(bad, np.nan, 1.0 / alpha)
        rp = np.where(bad, np.nan, bp / alpha)
        rm = np.where(bad, np.nan, bm / alpha)
    return ScatteringData(
        k_grid=k, t=t, r_plus=rp, r_minus=rm, alpha=alpha, beta_plus=bp, beta_minus=bm, exceptional=bad
    )


def _alpha_or_raise(V, z, grid, alpha_threshold):
    co = jost_coefficients(V, z, grid)
    if abs(co.alpha) <= alpha_threshold:
        raise ExceptionalFrequencyError(
            f"|alpha| = {abs(co.alpha):.3g} at z={z}: too close to a zero of alpha (bound state)",
            frequency=z,
            nearest_zero=z,
        )
    return co.alpha


def scattering_solution(V: Potential, z, side: str = "plus", grid: Optional[SpatialGrid] = None, *,
                        alpha_threshold: float = ALPHA_THRESHOLD) -> ScatteringWave:
    """``phi_z^side = J_z^side / alpha_z`` sampled on the grid."""
    grid = grid or default_grid()
    z = check_frequency(z)
    alpha = _alpha_or_raise(V, z, grid, alpha_threshold)
    sol = jost_solve(V, z, side, grid)
    return ScatteringWave(kind=f"phi_{side}", k=z, samples=sol.J / alpha, grid=grid)


def refined_grid(grid: SpatialGrid, factor: int = 2) -> SpatialGrid:
    """Same interval with ``factor`` times as many panels."""
    return SpatialGrid(grid.x_min, grid.x_max, factor * (grid.n_points - 1) + 1)


def psi_family(V: Potential, k: float, sign: str = "plus", grid: Optional[SpatialGrid] = None, *,
               alpha_threshold: float = ALPHA_THRESHOLD, check_residual: bool = True,
               residual_refine: Optional[int] = None) -> ScatteringWave:
    """``psi_k^sign`` with the residual of its Lippmann-Schwinger equation.

    The residual quadrature interpolates ``V psi`` by local cubics, whose
    error at high ``k`` would mask the solver's own accuracy; it is
    therefore evaluated on a grid refined by ``residual_refine`` (by
    default, enough to bring the spacing to ``RESIDUAL_SPACING`` or below,
    and at least a factor two).
    """
    grid = grid or default_grid()
    if sign not in ("plus", "minus"):
        raise UsageError(f"sign must be 'plus' or 'minus', got {sign!r}")
    k = float(np.real(check_frequency(float(k))))
    samples = _psi_samples(V, k, sign, grid, alpha_threshold)
    res = float("nan")
    if residual_refine is None:
        residual_refine = max(2, int(np.ceil(grid.spacing / RESIDUAL_SPACING)))
    if check_residual:
        fine = refined_grid(grid, residual_refine) if residual_refine > 1 else grid
        u = samples if fine is grid else _psi_samples(V, k, sign, fine, alpha_threshold)
        s = 1.0 if sign == "plus" else -1.0
        res = ls_defect(V, abs(k), u, np.exp(1j * s * k * fine.x), fine)
    return ScatteringWave(kind=f"psi_{sign}", k=k, samples=samples, grid=grid, ls_residual=res)


def _psi_samples(V, k, sign, grid, alpha_threshold):
    other = "minus" if sign == "plus" else "plus"
    if k >= 0:
        return scattering_solution(V, k, sign, grid, alpha_threshold=alpha_threshold).samples
    return np.conj(scattering_solution(V, k, other, grid, alpha_threshold=alpha_threshold).samples)


def psi_table(V: Potential, k, sign: str = "plus", grid: Optional[SpatialGrid] = None, *,
              alpha_threshold: float = ALPHA_THRESHOLD, h_max: float = H_MAX):
    """``psi^sign(x_i, k_j)`` as an ``(n_points, len(k))`` array.

    Raises :class:`ExceptionalFrequencyError` if any ``|alpha_k|`` is below
    the threshold.
    """
    grid = grid or default_grid()
    k = np.atleast_1d(np.asarray(k, dtype=float))
    other = "minus" if sign == "plus" else "plus"
    alpha = alpha_beta(V, k.astype(complex), grid, h_max=h_max)[0]
    bad = np.abs(alpha) <= alpha_threshold
    if bad.any():
        kb = k[bad][0]
        raise ExceptionalFrequencyError(f"|alpha| below threshold at k={kb:.6g}", frequency=kb)
    out = np.empty((grid.n_points, k.size), dtype=complex)
    pos = k >= 0
    if pos.any():
        J, _ = jost_table(V, k[pos], sign, grid, h_max=h_max)
        out[:, pos] = J / alpha[pos]
    if (~pos).any():
        J, _ = jost_table(V, k[~pos], other, grid, h_max=h_max)
        out[:, ~pos] = np.conj(J / alpha[~pos])
    return out
