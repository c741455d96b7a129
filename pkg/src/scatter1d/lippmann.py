"""Green's functions, resolvent application and the Lippmann-Schwinger solver.

The continuum eigenfunction ``e(x, xi)`` solves

    e(x) = e^{i x xi} + (2i|xi|)^{-1} int e^{i|xi||x-y|} V(dy) e(y),

which only needs ``e`` on the support of ``V``.  Writing ``D = |V|^{1/2}``,
``S = sgn(V) |V|^{1/2}`` and ``psi = D e`` gives the symmetrised system
``(I + T) psi = D e^{i x xi}`` with ``T = -(2i kappa)^{-1} D G S``.  It is
discretised by product integration: the density factor is interpolated by
local cubics and integrated exactly against the oscillatory kernel, so the
quadrature stays fourth order for any ``kappa``.  Atoms enter as extra
unknowns carrying the value of ``e`` at their location.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla
from numpy.polynomial.legendre import leggauss

from . import kernels
from .errors import DomainError, ExceptionalFrequencyError, SolverError, SpectralProximityError, UsageError
from .potential import Potential, SpatialGrid, default_grid

XI_GUARD = 1e-4
COND_THRESHOLD = 1e8
SUPPORT_THRESHOLD = 1e-12

_GL_U, _GL_W = leggauss(8)
_GL_U = 0.5 * (_GL_U + 1.0)
_GL_W = 0.5 * _GL_W


def sqrt_branch(zeta) -> complex:
    """``sqrt(zeta)`` on the branch with ``Im >= 0`` (``Im > 0`` off the cut)."""
    k = np.sqrt(complex(zeta))
    if k.imag < 0 or (k.imag == 0 and k.real < 0):
        k = -k
    return complex(k)


def green_free(x, y, zeta):
    """Free Green's function ``-(2i sqrt(zeta))^{-1} exp(i sqrt(zeta) |x - y|)``."""
    zeta = complex(zeta)
    if zeta.imag == 0 and zeta.real >= 0:
        raise DomainError(f"zeta={zeta} lies on the cut [0, inf)")
    k = sqrt_branch(zeta)
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    return -np.exp(1j * k * d) / (2j * k)


# ---------------------------------------------------------------------------
# Product integration against exp(i kappa |x - y|)
# ---------------------------------------------------------------------------


def _lagrange(offsets, u):
    """Lagrange basis values ``L_d(u)`` for nodes ``offsets``; shape ``(len(u), p)``."""
    p = len(offsets)
    out = np.ones((np.size(u), p))
    u = np.atleast_1d(u)
    for d in range(p):
        for e in range(p):
            if e != d:
                out[:, d] *= (u - offsets[e]) / (offsets[d] - offsets[e])
    return out


class ProductRule:
    """Quadrature for ``int_{x_0}^{x_{n-1}} exp(i kappa |x - y|) g(y) dy``.

    ``g`` is given on ``n`` uniform nodes starting at ``x0`` with spacing
    ``h``.  On each panel it is replaced by the cubic through the nearest
    four nodes (fewer when ``n < 4``), and the panel integrals against the
    exponential are done with 8-point Gauss-Legendre.
    """

    def __init__(self, x0: float, h: float, n: int, kappa: complex):
        if n < 1:
            raise UsageError("product rule needs at least one node")
        self.x0, self.h, self.n = float(x0), float(h), int(n)
        self.kappa = complex(kappa)
        self.rho = np.exp(1j * self.kappa * self.h)
        n_int = n - 1
        p = min(4, n)
        self.p = p
        m = np.arange(n_int)
        self.st = np.clip(m - (p - 1) // 2, 0, max(n - p, 0)).astype(np.int64)
        kh = self.kappa * self.h
        ql = np.empty((n_int, p), dtype=complex)
        qr = np.empty((n_int, p), dtype=complex)
        self._offsets = {}
        for shift in np.unique(self.st - m):
            offs = shift + np.arange(p)
            L = _lagrange(offs, _GL_U)
            sel = (self.st - m) == shift
            ql[sel] = self.h * (_GL_W * np.exp(-1j * kh * _GL_U)) @ L
            qr[sel] = self.h * (_GL_W * np.exp(1j * kh * _GL_U)) @ L
            self._offsets[int(shift)] = offs
        self.ql, self.qr = ql, qr

    @property
    def nodes(self):
        return self.x0 + self.h * np.arange(self.n)

    def _gather(self, g):
        return g[self.st[:, None] + np.arange(self.p)]

    def sweep(self, g):
        """Left/right accumulations ``(A, B)``; node integrals are ``A + B``."""
        g = np.asarray(g, dtype=complex)
        if self.n == 1:
            return np.zeros(1, complex), np.zeros(1, complex)
        G = self._gather(g)
        cl = np.sum(self.ql * G, axis=1)
        cr = np.sum(self.qr * G, axis=1)
        return kernels.two_sided_sweep(cl, cr, self.rho)

    def apply(self, g):
        A, B = self.sweep(g)
        return A + B

    def _locate(self, xt):
        s = (np.asarray(xt, dtype=float) - self.x0) / self.h
        p = np.floor(s).astype(int)
        u = s - p
        near = np.abs(u - np.round(u)) < 1e-10
        p = np.where(near, np.round(s).astype(int), p)
        u = np.where(near, 0.0, u)
        return p, u

    def _split_weights(self, p, u):
        """Weights of panel ``p`` for a target at fraction ``u`` inside it."""
        kh = self.kappa * self.h
        offs = self._offsets[int(self.st[p] - p)]
        left_u = u * _GL_U
        right_u = u + (1.0 - u) * _GL_U
        Ll = _lagrange(offs, left_u)
        Lr = _lagrange(offs, right_u)
        wl = u * _GL_W * np.exp(1j * kh * (u - left_u))
        wr = (1.0 - u) * _GL_W * np.exp(1j * kh * (right_u - u))
        return self.h * (wl @ Ll + wr @ Lr)

    def evaluate(self, g, xt):
        """Integral for arbitrary targets (inside or outside the node range)."""
        xt = np.atleast_1d(np.asarray(xt, dtype=float))
        g = np.asarray(g, dtype=complex)
        A, B = self.sweep(g)
        out = np.empty(xt.shape, dtype=complex)
        x_last = self.x0 + self.h * (self.n - 1)
        k = self.kappa
        left = xt <= self.x0
        right = xt >= x_last
        out[left] = np.exp(1j * k * (self.x0 - xt[left])) * B[0]
        out[right & ~left] = np.exp(1j * k * (xt[right & ~left] - x_last)) * A[-1]
        inside = ~(left | right)
        if inside.any():
            p, u = self._locate(xt[inside])
            vals = np.empty(p.shape, dtype=complex)
            on = u == 0.0
            vals[on] = A[p[on]] + B[p[on]]
            for i in np.nonzero(~on)[0]:
                pi, ui = p[i], u[i]
                w = self._split_weights(pi, ui)
                local = w @ g[self.st[pi] : self.st[pi] + self.p]
                vals[i] = (
                    np.exp(1j * k * self.h * ui) * A[pi]
                    + np.exp(1j * k * self.h * (1.0 - ui)) * B[pi + 1]
                    + local
                )
            out[inside] = vals
        return out

    def row(self, xt: float):
        """Weight vector ``w`` with ``evaluate(g, [xt]) == w @ g``."""
        k = self.kappa
        x_last = self.x0 + self.h * (self.n - 1)
        n_int = self.n - 1
        if xt <= self.x0:
            p, u = -1, 0.0
        elif xt >= x_last:
            p, u = n_int, 0.0
        else:
            p, u = self._locate(xt)
            p, u = int(p), float(u)
        m = np.arange(n_int)
        xm = self.x0 + self.h * m
        w = np.zeros(self.n, dtype=complex)
        if n_int == 0:
            return w
        lower = m < p
        upper = m >= p if u == 0.0 else m > p
        coef = np.zeros((n_int, self.p), dtype=complex)
        coef[lower] = np.exp(1j * k * (xt - xm[lower]))[:, None] * self.ql[lower]
        coef[upper] = np.exp(1j * k * (xm[upper] - xt))[:, None] * self.qr[upper]
        if u != 0.0:
            coef[p] = self._split_weights(p, u)
        np.add.at(w, self.st[:, None] + np.arange(self.p), coef)
        return w

    def matrix(self):
        """Dense node-to-node matrix ``W`` with ``apply(g) == W @ g``."""
        if self.n == 1:
            return np.zeros((1, 1), complex)
        rho_pow = self.rho ** np.arange(self.n + 1)
        return kernels.nystrom_fill(self.n, rho_pow, self.ql, self.qr, self.st)


# ---------------------------------------------------------------------------
# The Lippmann-Schwinger system
# ---------------------------------------------------------------------------


def support_nodes(V: Potential, grid: SpatialGrid, stride: int = 1, pad: int = 2):
    """Grid indices of the Nystrom nodes: the hull of ``|V| > 1e-12``, padded."""
    rng = V.support_indices(grid, SUPPORT_THRESHOLD)
    if rng is None:
        return np.zeros(0, dtype=int)
    lo, hi = rng
    lo = max(0, lo - pad * stride)
    hi = min(grid.n_points - 1, hi + pad * stride)
    while hi - lo < 3 * stride:
        lo, hi = max(0, lo - stride), min(grid.n_points - 1, hi + stride)
        if lo == 0 and hi == grid.n_points - 1:
            break
    return np.arange(lo, hi + 1, stride)


@dataclass
class LSSystem:
    """Assembled discretisation of ``(I + T) X = b`` for one ``kappa``."""

    kappa: complex
    nodes: np.ndarray
    node_index: np.ndarray
    weights: Optional[ProductRule]
    D: np.ndarray
    S: np.ndarray
    atom_locations: np.ndarray
    atom_masses: np.ndarray
    matrix: np.ndarray
    kernel_matrix: np.ndarray
    condition_estimate: float = float("nan")
    _lu: tuple = field(default=None, repr=False)

    @property
    def size(self):
        return self.matrix.shape[0]

    def factor(self):
        if self._lu is None and self.size:
            lu, piv = sla.lu_factor(self.matrix, check_finite=False)
            anorm = np.max(np.sum(np.abs(self.matrix), axis=0))
            rcond, info = sla.lapack.zgecon(lu, anorm, norm="1")
            self._lu = (lu, piv)
            self.condition_estimate = float(np.inf if rcond == 0 else 1.0 / rcond)
        elif not self.size:
            self.condition_estimate = 1.0
        return self

    def solve(self, rhs):
        self.factor()
        if not self.size:
            return np.zeros(0, complex)
        return sla.lu_solve(self._lu, rhs, check_finite=False)


def build_system(V: Potential, kappa, grid: SpatialGrid, *, stride: int = 1) -> LSSystem:
    """Assemble ``I + T`` on the support nodes of ``V`` plus its atoms."""
    kappa = complex(kappa)
    idx = support_nodes(V, grid, stride)
    x = grid.x
    nodes = x[idx]
    n = idx.size
    locs = V.atom_locations
    masses = V.atom_masses
    na = locs.size
    c = 1.0 / (2j * kappa)
    M = np.eye(n + na, dtype=complex)
    K = np.zeros((n + na, n + na), dtype=complex)
    rule = None
    D = S = np.zeros(0)
    if n:
        v = V.density_values(nodes)
        D = np.sqrt(np.abs(v))
        S = np.sign(v) * D
        rule = ProductRule(nodes[0], grid.spacing * stride, n, kappa)
        W = rule.matrix()
        K[:n, :n] = -c * D[:, None] * W * S[None, :]
        if na:
            E = np.exp(1j * kappa * np.abs(nodes[:, None] - locs[None, :]))
            K[:n, n:] = -c * D[:, None] * E * masses[None, :]
            for a in range(na):
                K[n + a, :n] = -c * rule.row(locs[a]) * S
    if na:
        Eaa = np.exp(1j * kappa * np.abs(locs[:, None] - locs[None, :]))
        K[n:, n:] = -c * Eaa * masses[None, :]
    M += K
    if not np.all(np.isfinite(M)):
        raise SolverError(f"non-finite Nystrom matrix at kappa={kappa}")
    return LSSystem(
        kappa=kappa,
        nodes=nodes,
        node_index=idx,
        weights=rule,
        D=D,
        S=S,
        atom_locations=locs,
        atom_masses=masses,
        matrix=M,
        kernel_matrix=K,
    )


def _solve_incident(V, kappa, grid, inc_grid, inc_atoms, *, cond_threshold, stride=1, what="frequency"):
    """Solve ``u = inc + (2i kappa)^{-1} int e^{i kappa |x-y|} V u`` on the grid.

    Returns ``(u, system, atom_values)``.
    """
    sysm = build_system(V, kappa, grid, stride=stride)
    n = sysm.nodes.size
    if sysm.size == 0:
        sysm.condition_estimate = 1.0
        return np.array(inc_grid, dtype=complex), sysm, np.zeros(0, complex)
    sysm.factor()
    if not np.isfinite(sysm.condition_estimate) or sysm.condition_estimate > cond_threshold:
        raise ExceptionalFrequencyError(
            f"I + T is ill-conditioned at {what} kappa={kappa:.6g} (cond ~ {sysm.condition_estimate:.3g})",
            frequency=kappa,
            condition=sysm.condition_estimate,
        )
    rhs = np.concatenate([sysm.D * inc_grid[sysm.node_index], np.asarray(inc_atoms, dtype=complex)])
    X = sysm.solve(rhs)
    psi, ua = X[:n], X[n:]
    u = np.array(inc_grid, dtype=complex)
    c = 1.0 / (2j * kappa)
    x = grid.x
    if n:
        u += c * sysm.weights.evaluate(sysm.S * psi, x)
    for a, m, val in zip(sysm.atom_locations, sysm.atom_masses, ua):
        u += c * m * val * np.exp(1j * kappa * np.abs(x - a))
    return u, sysm, ua


@dataclass
class ContinuumEigenfunction:
    xi: float
    samples: np.ndarray
    grid: SpatialGrid
    ls_residual: float
    condition: float
    sign: str = "plus"
    atom_values: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))


def ls_solve_pm(V: Potential, xi: float, sign: str = "plus", grid: Optional[SpatialGrid] = None, *,
                cond_threshold: float = COND_THRESHOLD, guard: float = XI_GUARD,
                check_residual: bool = True) -> ContinuumEigenfunction:
    """Continuum eigenfunction with incident wave ``exp(+-i x xi)``."""
    grid = grid or default_grid()
    if sign not in ("plus", "minus"):
        raise UsageError(f"sign must be 'plus' or 'minus', got {sign!r}")
    xi = float(xi)
    if not np.isfinite(xi) or abs(xi) < guard:
        raise DomainError(f"|xi| = {abs(xi):.3g} is inside the guard radius {guard:g}")
    s = 1.0 if sign == "plus" else -1.0
    kappa = abs(xi)
    x = grid.x
    inc = np.exp(1j * s * xi * x)
    inc_atoms = np.exp(1j * s * xi * V.atom_locations)
    u, sysm, ua = _solve_incident(V, kappa, grid, inc, inc_atoms, cond_threshold=cond_threshold)
    res = ls_defect(V, kappa, u, inc, grid, atom_values=ua) if check_residual else float("nan")
    return ContinuumEigenfunction(
        xi=xi, samples=u, grid=grid, ls_residual=res, condition=sysm.condition_estimate, sign=sign,
        atom_values=ua,
    )


def ls_solve(V: Potential, xi: float, grid: Optional[SpatialGrid] = None, **kw) -> ContinuumEigenfunction:
    """``e(x, xi)``: the solution with incident wave ``exp(i x xi)``."""
    return ls_solve_pm(V, xi, "plus", grid, **kw)


def _value_at(x, u, a, p: int = 6):
    """Value of a function with a possible kink at ``a`` from one-sided stencils."""
    i = int(np.searchsorted(x, a))
    h = x[1] - x[0]
    for j in (i - 1, i):
        if 0 <= j < x.size and abs(x[j] - a) <= 1e-9 * h:
            return complex(u[j])
    vals = []
    if i >= p:
        xs = x[i - p : i]
        vals.append(_lagrange(xs - a, np.array([0.0]))[0] @ u[i - p : i])
    if i + p <= x.size:
        xs = x[i : i + p]
        vals.append(_lagrange(xs - a, np.array([0.0]))[0] @ u[i : i + p])
    return complex(np.mean(vals))


def ls_defect(V: Potential, kappa, u, incident, grid: SpatialGrid, *, atom_values=None) -> float:
    """Relative sup-norm defect of ``u`` in the Lippmann-Schwinger equation.

    The integral is re-evaluated with the product rule on every grid node of
    the support, independently of how ``u`` was produced.
    """
    u = np.asarray(u, dtype=complex)
    x = grid.x
    c = 1.0 / (2j * complex(kappa))
    rhs = np.array(incident, dtype=complex)
    idx = support_nodes(V, grid)
    if idx.size:
        rule = ProductRule(x[idx[0]], grid.spacing, idx.size, kappa)
        rhs += c * rule.evaluate(V.density_values(x[idx]) * u[idx], x)
    for n_a, (a, m) in enumerate(V.atoms):
        val = atom_values[n_a] if atom_values is not None and len(atom_values) else _value_at(x, u, a)
        rhs += c * m * val * np.exp(1j * kappa * np.abs(x - a))
    scale = max(1.0, float(np.max(np.abs(u))))
    return float(np.max(np.abs(rhs - u)) / scale)


# ---------------------------------------------------------------------------
# Resolvent
# ---------------------------------------------------------------------------


def free_resolvent_apply(f, zeta, grid: SpatialGrid):
    """``R_0(zeta) f`` on the grid (convolution with the free Green's function)."""
    zeta = complex(zeta)
    if zeta.imag == 0 and zeta.real >= 0:
        raise DomainError(f"zeta={zeta} lies on the cut [0, inf)")
    k = sqrt_branch(zeta)
    rule = ProductRule(grid.x_min, grid.spacing, grid.n_points, k)
    return -rule.apply(np.asarray(f, dtype=complex)) / (2j * k), rule


def resolvent_apply(V: Potential, zeta, f, grid: Optional[SpatialGrid] = None, *, eps: float = 1e-6,
                    cond_threshold: float = COND_THRESHOLD, bound_energies=None):
    """``(H - zeta)^{-1} f`` through the second resolvent identity.

    ``g = R_0 f - R_0 V g`` is the Lippmann-Schwinger system with incident
    field ``R_0 f``.  ``bound_energies`` may be passed to skip the
    bound-state search used for the proximity check.
    """
    grid = grid or default_grid()
    zeta = complex(zeta)
    if zeta.imag == 0 and zeta.real >= -eps:
        raise SpectralProximityError(f"zeta={zeta} is on or near the continuous spectrum [0, inf)")
    if abs(zeta.imag) < eps and zeta.real >= 0:
        raise SpectralProximityError(f"zeta={zeta} is within {eps:g} of [0, inf)")
    if bound_energies is None and not V.is_zero:
        from .spectrum import bound_states

        bound_energies = [b.lam for b in bound_states(V, grid)]
    for lam in bound_energies or ():
        if abs(zeta - lam) < eps:
            raise SpectralProximityError(f"zeta={zeta} is within {eps:g} of the eigenvalue {lam:.10g}")
    f = np.asarray(f, dtype=complex)
    if f.shape != (grid.n_points,):
        raise UsageError("f must be sampled on the grid")
    r0f, rule = free_resolvent_apply(f, zeta, grid)
    k = sqrt_branch(zeta)
    inc_atoms = [-rule.evaluate(f, [a])[0] / (2j * k) for a in V.atom_locations]
    g, _, _ = _solve_incident(V, k, grid, r0f, inc_atoms, cond_threshold=cond_threshold, what="zeta")
    return g
