"""Finite-difference reference for H = -d^2/dx^2 + V.

Second-order central differences with Dirichlet walls just outside the
grid; an atom of mass ``m`` becomes ``m / h`` on its nearest node.  Nothing
here shares code with the spectral path apart from the grid and potential
types.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal, solve_banded

from . import kernels
from .errors import OracleError, SpectralProximityError, UsageError, ValidationError
from .potential import Potential, SpatialGrid, default_grid

MAX_POINTS = 8192


@dataclass(frozen=True, eq=False)
class DenseHamiltonian:
    """Symmetric tridiagonal FD hamiltonian (``diag``, constant ``off``)."""

    diag: np.ndarray
    off: np.ndarray
    grid: SpatialGrid

    @property
    def n(self):
        return self.diag.size

    @property
    def matrix(self) -> np.ndarray:
        """Dense copy; only sensible for moderate ``n``."""
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)

    @property
    def norm_bound(self) -> float:
        """Gershgorin bound on ``||H||_2``."""
        rad = np.zeros(self.n)
        rad[:-1] += np.abs(self.off)
        rad[1:] += np.abs(self.off)
        return float(np.max(np.abs(self.diag) + rad))

    @property
    def gershgorin_lower(self) -> float:
        rad = np.zeros(self.n)
        rad[:-1] += np.abs(self.off)
        rad[1:] += np.abs(self.off)
        return float(np.min(self.diag - rad))

    def apply(self, u):
        """``H u``; ``u`` may carry extra trailing axes (e.g. one column per vector)."""
        u = np.asarray(u)
        shape = (-1,) + (1,) * (u.ndim - 1)
        d, o = self.diag.reshape(shape), self.off.reshape(shape)
        out = d * u
        out[:-1] += o * u[1:]
        out[1:] += o * u[:-1]
        return out


def fd_hamiltonian(V: Potential, grid: Optional[SpatialGrid] = None) -> DenseHamiltonian:
    grid = grid or default_grid()
    if grid.n_points > MAX_POINTS:
        raise ValidationError(f"oracle supports at most {MAX_POINTS} points")
    h = grid.spacing
    x = grid.x
    diag = 2.0 / h**2 + V.density_values(x)
    for a, m in V.atoms:
        if not grid.contains(a):
            raise ValidationError(f"atom at {a} outside the grid")
        diag[int(np.argmin(np.abs(x - a)))] += m / h
    off = np.full(grid.n_points - 1, -1.0 / h**2)
    return DenseHamiltonian(diag=diag, off=off, grid=grid)


@dataclass
class FDEigen:
    """Eigenpairs with eigenvectors normalised in the grid L2 norm."""

    values: np.ndarray
    vectors: np.ndarray
    grid: SpatialGrid


def fd_eigensolve(H: DenseHamiltonian, select: Optional[Tuple[float, float]] = None, *,
                  check: bool = True) -> FDEigen:
    """Full (or windowed, ``select=(lo, hi]``) eigendecomposition.

    Vectors are scaled so that ``sum |v|^2 h = 1``.
    """
    try:
        if select is None:
            w, v = eigh_tridiagonal(H.diag, H.off)
        else:
            w, v = eigh_tridiagonal(H.diag, H.off, select="v", select_range=select)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise OracleError(f"tridiagonal eigensolver failed: {exc}") from exc
    if check and w.size:
        resid = np.max(np.linalg.norm(H.apply(v) - v * w, axis=0))
        if not resid <= 1e-8 * H.norm_bound:
            raise OracleError(f"eigenpair residual {resid:.3g} exceeds 1e-8 ||H||")
    h = H.grid.spacing
    return FDEigen(values=w, vectors=v / np.sqrt(h), grid=H.grid)


def fd_eigenvalues(H: DenseHamiltonian, select: Optional[Tuple[float, float]] = None) -> np.ndarray:
    if select is None:
        return eigvalsh_tridiagonal(H.diag, H.off)
    return eigvalsh_tridiagonal(H.diag, H.off, select="v", select_range=select)


def fd_projection(H: DenseHamiltonian, f, band: Tuple[float, float], eig: Optional[FDEigen] = None):
    """Projection of ``f`` onto eigenvectors with eigenvalue in ``[lo, hi)``."""
    lo, hi = band
    if not lo < hi:
        raise UsageError("band must satisfy lo < hi")
    if eig is None:
        eig = fd_eigensolve(H, select=(np.nextafter(lo, -np.inf), hi))
    sel = (eig.values >= lo) & (eig.values < hi)
    vecs = eig.vectors[:, sel]
    h = H.grid.spacing
    return vecs @ (h * (vecs.T @ np.asarray(f)))


def fd_resolvent(H: DenseHamiltonian, zeta, f, *, eps: float = 1e-8):
    """``(H - zeta)^{-1} f`` by a banded direct solve."""
    zeta = complex(zeta)
    if abs(zeta.imag) < eps:
        lam = fd_eigenvalues(H, select=(zeta.real - eps, zeta.real + eps))
        if lam.size:
            raise SpectralProximityError(f"zeta={zeta} is within {eps:g} of an FD eigenvalue")
    ab = np.zeros((3, H.n), dtype=complex)
    ab[0, 1:] = H.off
    ab[1] = H.diag - zeta
    ab[2, :-1] = H.off
    return solve_banded((1, 1), ab, np.asarray(f, dtype=complex))


def crank_nicolson(H: DenseHamiltonian, phi0, t: float, steps: Optional[int] = None, *, dt_max: float = 1e-3):
    """``exp(-itH) phi0`` with Crank-Nicolson steps of size at most ``dt_max``."""
    t = float(t)
    if steps is None:
        steps = max(1, int(np.ceil(abs(t) / dt_max)))
    if steps < 1:
        raise UsageError("steps must be positive")
    if t == 0:
        return np.array(phi0, dtype=complex)
    return kernels.crank_nicolson(H.diag, H.off, np.asarray(phi0, dtype=complex), t / steps, steps)


def fd_spectral_density(H: DenseHamiltonian, i: int, j: int, lam: float, width: float,
                        eig: Optional[FDEigen] = None) -> float:
    """Gaussian-smoothed spectral density ``sum_n w(lam_n) v_n(x_i) v_n(x_j)``.

    The window ``w`` is a unit-mass gaussian of standard deviation ``width``
    centred at ``lam``; the result estimates the continuum kernel averaged
    over that window.
    """
    if eig is None:
        eig = fd_eigensolve(H, select=(lam - 8 * width, lam + 8 * width))
    w = np.exp(-0.5 * ((eig.values - lam) / width) ** 2) / (width * np.sqrt(2 * np.pi))
    return float(np.sum(w * eig.vectors[i] * eig.vectors[j]))


# ---------------------------------------------------------------------------
# Higher-order FD application, for residuals of smooth functions
# ---------------------------------------------------------------------------


def fd_apply(V: Potential, grid: SpatialGrid, u, *, atom_margin: int = 3):
    """``-u'' + V u`` with the fourth-order five-point stencil.

    Returns ``(Hu, mask)``; ``mask`` is False at the two nodes next to each
    wall and within ``atom_margin`` nodes of an atom or a density jump, where
    the stencil is not meaningful.
    """
    u = np.asarray(u)
    h = grid.spacing
    x = grid.x
    d2 = np.zeros_like(u)
    d2[2:-2] = (-u[4:] + 16 * u[3:-1] - 30 * u[2:-2] + 16 * u[1:-3] - u[:-4]) / (12 * h * h)
    out = -d2 + V.density_values(x) * u
    mask = np.zeros(u.shape[0], dtype=bool)
    mask[2:-2] = True
    for a in list(V.atom_locations) + list(V.breakpoints):
        mask &= np.abs(x - a) > (atom_margin + 0.5) * h
    return out, mask


def fd_energy(H: DenseHamiltonian, u) -> float:
    """Quadratic form ``<H u, u>`` in the grid L2 inner product."""
    u = np.asarray(u)
    return float(np.real(np.vdot(u, H.apply(u))) * H.grid.spacing)
