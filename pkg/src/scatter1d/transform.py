"""Perturbed Fourier transform, spectral projections and spectral operators.

With continuum eigenfunctions ``e(x, xi)`` and bound states ``e_k``,

    f#(xi) = (2 pi)^{-1/2} int f(x) conj(e(x, xi)) dx,
    F* g(x) = (2 pi)^{-1/2} int g(xi) e(x, xi) dxi,

``F* F`` is the projection onto the absolutely continuous subspace and
``F F* = I``.  Integrals in ``x`` use the grid's trapezoid weights and
integrals in ``xi`` the trapezoid rule over the (symmetric) frequency nodes.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import ExceptionalFrequencyError, PartialBasisError, SolverError, UsageError
from .lippmann import COND_THRESHOLD, ls_defect, ls_solve
from .potential import Potential, SpatialGrid, default_grid
from .scattering import psi_family, psi_table
from .spectrum import BoundState, bound_states, exceptional_scan

XI_MIN = 0.05
XI_MAX = 8.0
N_XI = 512

_SQRT_2PI = np.sqrt(2.0 * np.pi)

N_GAP_STENCIL = 4
N_GAP_NODES = 32
N_END_CORRECTION = 5


@dataclass(eq=False)
class WaveFunction:
    """Complex samples of a state on a spatial grid."""

    samples: np.ndarray
    grid: SpatialGrid

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != (self.grid.n_points,):
            raise UsageError(f"samples have shape {self.samples.shape}, grid has {self.grid.n_points} points")
        if not np.all(np.isfinite(self.samples)):
            raise UsageError("wave function samples must be finite")

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.grid.weights, np.abs(self.samples) ** 2)))

    def inner(self, other) -> complex:
        """``(self, other) = int self * conj(other)``."""
        o = other.samples if isinstance(other, WaveFunction) else np.asarray(other)
        return complex(np.dot(self.grid.weights, self.samples * np.conj(o)))

    def __sub__(self, other):
        return WaveFunction(self.samples - _samples(other, self.grid), self.grid)

    def __add__(self, other):
        return WaveFunction(self.samples + _samples(other, self.grid), self.grid)


def _samples(f, grid: SpatialGrid) -> np.ndarray:
    if isinstance(f, WaveFunction):
        if f.grid != grid:
            raise UsageError("state and basis live on different grids")
        return f.samples
    f = np.asarray(f, dtype=complex)
    if f.shape != (grid.n_points,):
        raise UsageError(f"state has shape {f.shape}, expected ({grid.n_points},)")
    return f


def l2_norm(f, grid: SpatialGrid) -> float:
    return float(np.sqrt(np.dot(grid.weights, np.abs(_samples(f, grid)) ** 2)))


def gaussian_packet(grid: SpatialGrid, center: float = 0.0, width: float = 1.0, k0: float = 0.0,
                    normalize: bool = True) -> WaveFunction:
    """``exp(-(x - center)^2 / (4 width^2) + i k0 x)``; ``width`` is the position spread."""
    x = grid.x
    f = np.exp(-((x - center) ** 2) / (4.0 * width**2) + 1j * k0 * x)
    wf = WaveFunction(f, grid)
    if normalize:
        wf = WaveFunction(f / wf.norm(), grid)
    return wf


# ---------------------------------------------------------------------------
# Frequency grid
# ---------------------------------------------------------------------------


def trapezoid_weights(nodes) -> np.ndarray:
    """Trapezoid weights over sorted, possibly non-uniform nodes."""
    nodes = np.asarray(nodes, dtype=float)
    w = np.zeros(nodes.size)
    if nodes.size < 2:
        return w
    d = np.diff(nodes)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def end_corrected_weights(nodes, m: int = N_END_CORRECTION) -> np.ndarray:
    """Trapezoid weights with ``m`` corrected weights at each end of a uniform segment.

    The corrections make the rule exact for polynomials of degree below
    ``2 m`` on the segment, in the manner of Gregory's formula.  This matters
    here because ``g(xi) e(x, xi)`` oscillates like ``exp(+-i x xi)``, and
    the plain trapezoid endpoint error grows like ``|x|``.  Non-uniform or
    short segments get the plain trapezoid rule.
    """
    nodes = np.asarray(nodes, dtype=float)
    w = trapezoid_weights(nodes)
    n = nodes.size
    if n < 4 * m or m < 1:
        return w
    d = np.diff(nodes)
    if np.ptp(d) > 1e-9 * abs(d[0]):
        return w
    N = n - 1
    j = np.arange(m)
    t_left, t_right = j / N, 1.0 - j / N
    t_mid = np.arange(m, N - m + 1) / N
    q = np.arange(2 * m)[:, None]
    A = np.hstack([t_left[None, :] ** q, t_right[None, :] ** q])
    rhs = N / (q[:, 0] + 1.0) - np.sum(t_mid[None, :] ** q, axis=1)
    c = np.linalg.solve(A, rhs)
    h = d.mean()
    w[:m] = h * c[:m]
    w[N - m + 1:] = h * c[m:][::-1]
    return w


def _lagrange_matrix(nodes, targets):
    """Rows of Lagrange basis polynomials through ``nodes`` evaluated at ``targets``."""
    nodes = np.asarray(nodes, dtype=float)
    out = np.ones((np.size(targets), nodes.size))
    for j, xj in enumerate(nodes):
        for m, xm in enumerate(nodes):
            if m != j:
                out[:, j] *= (targets - xm) / (xj - xm)
    return out


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Symmetric frequency nodes ``+-linspace(xi_min, xi_max, n)`` minus exclusions.

    Each sign carries its own end-corrected trapezoid weights.  The gap
    ``(-xi_min, xi_min)`` is covered by hidden Gauss-Legendre nodes
    ``gap_nodes``; a function known on the grid is carried there by
    ``gap_interp``, a one-sided polynomial extrapolation from the nearest
    nodes of the same sign, while ``e(x, xi)`` itself is tabulated exactly
    at the hidden nodes.  With ``gap_mode="joint"`` one interpolant through
    the nodes on both sides is used instead; that is only appropriate for
    functions that are smooth across ``xi = 0`` (the free transform).
    """

    xi_values: np.ndarray
    weights: np.ndarray
    xi_min: float = XI_MIN
    xi_max: float = XI_MAX
    n_per_sign: int = N_XI
    excluded: tuple = ()
    gap_nodes: np.ndarray = field(default_factory=lambda: np.zeros(0))
    gap_weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    gap_interp: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    gap_interp_joint: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    gap_mode: str = "split"

    @property
    def size(self):
        return self.xi_values.size

    def band_mask(self, band) -> np.ndarray:
        """Nodes with ``lo <= xi^2 < hi``."""
        return _in_band(self.xi_values, band)

    def gap_values(self, g) -> np.ndarray:
        """``g`` interpolated to the hidden gap nodes."""
        P = self.gap_interp_joint if self.gap_mode == "joint" else self.gap_interp
        return P @ np.asarray(g)

    def with_gap_mode(self, mode: str) -> "FrequencyGrid":
        if mode not in ("split", "joint"):
            raise UsageError(f"gap_mode must be 'split' or 'joint', got {mode!r}")
        return replace(self, gap_mode=mode)

    def integrate(self, g, band=None) -> complex:
        """``int g(xi) dxi`` over the grid and the gap (restricted to ``band``)."""
        g = np.asarray(g)
        w, wq = self.weights, self.gap_weights
        if band is not None:
            w = np.where(self.band_mask(band), w, 0.0)
            wq = np.where(_in_band(self.gap_nodes, band), wq, 0.0)
        return np.dot(w, g) + np.dot(wq, self.gap_values(g))

    def norm2(self, g, band=None) -> float:
        """``int |g|^2 dxi``; the gap uses ``|interpolant of g|^2``."""
        g = np.asarray(g)
        w, wq = self.weights, self.gap_weights
        if band is not None:
            w = np.where(self.band_mask(band), w, 0.0)
            wq = np.where(_in_band(self.gap_nodes, band), wq, 0.0)
        return float(np.dot(w, np.abs(g) ** 2) + np.dot(wq, np.abs(self.gap_values(g)) ** 2))

    def key(self):
        return (self.xi_min, self.xi_max, self.n_per_sign, self.excluded)


def _in_band(xi, band):
    lo, hi = band
    e = np.asarray(xi) ** 2
    return (e >= lo) & (e < hi)


def frequency_grid(xi_min: float = XI_MIN, xi_max: float = XI_MAX, n: int = N_XI,
                   exclude: Sequence[float] = (), exclude_radius: Optional[float] = None, *,
                   gap_order: int = N_GAP_STENCIL, gap_points: int = N_GAP_NODES) -> FrequencyGrid:
    """Build the symmetric grid; nodes within ``exclude_radius`` of ``+-exclude`` are dropped.

    Parameters
    ----------
    gap_order : int
        Nodes of the same sign used to extrapolate into each half of the gap.
    gap_points : int
        Number of hidden Gauss-Legendre nodes in the gap, split evenly
        between its two halves (``0`` is never one of them).
    """
    if not 0 < xi_min < xi_max:
        raise UsageError("need 0 < xi_min < xi_max")
    if n < 2:
        raise UsageError("need at least two frequencies per sign")
    pos = np.linspace(xi_min, xi_max, int(n))
    xi = np.concatenate([-pos[::-1], pos])
    if len(exclude):
        r = exclude_radius if exclude_radius is not None else 0.5 * (pos[1] - pos[0])
        keep = np.ones(xi.size, dtype=bool)
        for e in exclude:
            keep &= np.abs(np.abs(xi) - abs(e)) > r
        xi = xi[keep]
    neg, posi = xi < 0, xi > 0
    w = np.zeros(xi.size)
    w[neg] = end_corrected_weights(xi[neg])
    w[posi] = end_corrected_weights(xi[posi])

    # e(x, xi) is continuous at xi = 0 but its two sides are different
    # physical solutions, so f# generally has a kink there: each half of the
    # gap is filled from its own side only.
    half = max(1, gap_points // 2)
    u, wu = np.polynomial.legendre.leggauss(half)
    u, wu = 0.5 * (u + 1.0), 0.5 * wu
    q_parts, w_parts, rows = [], [], []
    for side in (np.nonzero(neg)[0][::-1], np.nonzero(posi)[0]):
        # spread the stencil over about the half-gap width: extrapolating
        # many spacings beyond a short stencil amplifies noise
        step = abs(xi[side[1]] - xi[side[0]])
        stride = max(1, int(round(abs(xi[side[0]]) / (step * max(1, gap_order - 1)))))
        stencil = side[: stride * (gap_order - 1) + 1 : stride]
        edge = xi[stencil[0]]
        qs = edge * u
        P = np.zeros((half, xi.size))
        P[:, stencil] = _lagrange_matrix(xi[stencil], qs)
        q_parts.append(qs)
        w_parts.append(abs(edge) * wu)
        rows.append(P)
    q = np.concatenate(q_parts)
    order = np.argsort(q)
    q, wq, P = q[order], np.concatenate(w_parts)[order], np.vstack(rows)[order]
    both = np.concatenate([np.nonzero(neg)[0][-gap_order:], np.nonzero(posi)[0][:gap_order]])
    Pj = np.zeros((q.size, xi.size))
    Pj[:, both] = _lagrange_matrix(xi[both], q)
    return FrequencyGrid(
        xi_values=xi,
        weights=w,
        xi_min=float(xi_min),
        xi_max=float(xi_max),
        n_per_sign=int(n),
        excluded=tuple(float(e) for e in exclude),
        gap_nodes=q,
        gap_weights=wq,
        gap_interp=P,
        gap_interp_joint=Pj,
    )


# ---------------------------------------------------------------------------
# Basis
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class GeneralizedEigenbasis:
    """Table ``e(x_i, xi_j)`` plus bound states for one potential.

    ``gap_table`` holds ``e`` at the frequency grid's hidden gap nodes.
    """

    V: Potential
    grid: SpatialGrid
    freq: FrequencyGrid
    e_table: np.ndarray
    bound: List[BoundState]
    method: str = "jost"
    build_metadata: dict = field(default_factory=dict)
    gap_table: Optional[np.ndarray] = field(default=None, repr=False)
    _psi_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.gap_table is None:
            self.gap_table = _psi_columns(self.V, self.freq.gap_nodes, "plus", self.grid)

    @property
    def bound_functions(self):
        return [b.eigenfunction for b in self.bound]

    @property
    def ref(self) -> str:
        g = self.grid
        return (
            f"{self.V.label}|[{g.x_min:g},{g.x_max:g}]x{g.n_points}|"
            f"xi[{self.freq.xi_min:g},{self.freq.xi_max:g}]x{self.freq.n_per_sign}|{self.method}"
        )

    def psi(self, sign: str, gap: bool = False) -> np.ndarray:
        """Table of ``psi^sign(x_i, xi_j)`` (at the gap nodes if ``gap``)."""
        if sign not in ("plus", "minus"):
            raise UsageError(f"sign must be 'plus' or 'minus', got {sign!r}")
        if sign == "plus" and (self.method == "jost" or self.V.is_zero):
            return self.gap_table if gap else self.e_table
        key = (sign, gap)
        if key not in self._psi_cache:
            xi = self.freq.gap_nodes if gap else self.freq.xi_values
            self._psi_cache[key] = _psi_columns(self.V, xi, sign, self.grid)
        return self._psi_cache[key]


def _psi_columns(V, xi, sign, grid):
    if V.is_zero:
        s = 1.0 if sign == "plus" else -1.0
        return np.exp(1j * s * np.outer(grid.x, xi))
    return psi_table(V, xi, sign, grid)


def build_basis(V: Potential, freq: Optional[FrequencyGrid] = None, grid: Optional[SpatialGrid] = None, *,
                method: str = "jost", cond_threshold: float = COND_THRESHOLD, scan_points: int = 16,
                residual_checks: int = 8, residual_tol: float = 1e-6, bound=None) -> GeneralizedEigenbasis:
    """Tabulate ``e(x, xi)`` on the frequency grid and attach the bound states.

    Parameters
    ----------
    method : {"jost", "ls"}
        ``"jost"`` uses ``e = psi^+`` from the Jost solutions (fast, all
        frequencies at once); ``"ls"`` solves the Lippmann-Schwinger system
        for every node.
    scan_points : int
        Number of ``|xi|`` values at which the conditioning of ``I + T`` is
        scanned before building; a flagged value aborts the build.
    residual_checks : int
        Number of columns whose Lippmann-Schwinger defect is recomputed.
    """
    grid = grid or default_grid()
    freq = freq or frequency_grid()
    xi = freq.xi_values
    meta = {"method": method, "cond_threshold": cond_threshold}
    if V.is_zero:
        # no kink at xi = 0 without a potential
        freq = freq.with_gap_mode("joint")
        table = np.exp(1j * np.outer(grid.x, xi))
        return GeneralizedEigenbasis(V, grid, freq, table, [], method, meta)

    if scan_points:
        kscan = np.unique(np.abs(xi))[:: max(1, np.unique(np.abs(xi)).size // scan_points)]
        scan = exceptional_scan(V, kscan, grid, cond_threshold=cond_threshold)
        meta["scan_k"] = scan.k_grid
        meta["scan_condition"] = scan.condition
        if scan.flags.any():
            raise ExceptionalFrequencyError(
                f"exceptional frequencies flagged at {scan.k_grid[scan.flags]}",
                frequency=scan.k_grid[scan.flags][0],
                condition=float(scan.condition[scan.flags][0]),
            )

    failed = []
    if method == "jost":
        try:
            table = psi_table(V, xi, "plus", grid)
            gap = psi_table(V, freq.gap_nodes, "plus", grid)
        except (SolverError, ExceptionalFrequencyError) as exc:
            raise PartialBasisError(f"basis build failed: {exc}", list(xi)) from exc
    elif method == "ls":
        # LS conditioning degrades like 1/|xi| inside the gap, so the hidden
        # nodes always come from the Jost route
        gap = psi_table(V, freq.gap_nodes, "plus", grid)
        table = np.empty((grid.n_points, xi.size), dtype=complex)
        for j, x in enumerate(xi):
            try:
                table[:, j] = ls_solve(V, x, grid, cond_threshold=cond_threshold, check_residual=False).samples
            except (SolverError, ExceptionalFrequencyError):
                failed.append(float(x))
        if failed:
            raise PartialBasisError(f"Lippmann-Schwinger solve failed at {len(failed)} frequencies", failed)
    else:
        raise UsageError(f"unknown basis method {method!r}")

    if residual_checks:
        cols = np.unique(np.linspace(0, xi.size - 1, residual_checks).round().astype(int))
        if method == "ls":
            res = [ls_defect(V, abs(xi[j]), table[:, j], np.exp(1j * xi[j] * grid.x), grid) for j in cols]
        else:
            res = [psi_family(V, xi[j], "plus", grid).ls_residual for j in cols]
        meta["ls_residual_max"] = float(np.max(res))
        bad = [float(xi[j]) for j, r in zip(cols, res) if not r <= residual_tol]
        if bad:
            raise PartialBasisError(f"columns exceed the residual bound {residual_tol:g}", bad)

    if bound is None:
        bound = bound_states(V, grid)
    return GeneralizedEigenbasis(V, grid, freq, table, list(bound), method, meta, gap)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


@dataclass
class TransformResult:
    f_sharp: np.ndarray
    pp_coefficients: np.ndarray
    basis_ref: str
    norm2: float = float("nan")

    def parseval(self, freq: FrequencyGrid) -> float:
        """``| ||f||^2 - ||f#||^2 - sum |(f, e_k)|^2 |``."""
        return float(abs(self.norm2 - freq.norm2(self.f_sharp) - np.sum(np.abs(self.pp_coefficients) ** 2)))


def forward(basis: GeneralizedEigenbasis, f) -> TransformResult:
    """``f#`` and the bound-state coefficients ``(f, e_k)``."""
    grid = basis.grid
    s = _samples(f, grid)
    wf = grid.weights * s
    fs = np.conj(basis.e_table).T @ wf / _SQRT_2PI
    pp = np.array([np.dot(wf, b.eigenfunction) for b in basis.bound], dtype=complex)
    return TransformResult(f_sharp=fs, pp_coefficients=pp, basis_ref=basis.ref,
                           norm2=float(np.dot(grid.weights, np.abs(s) ** 2)))


def _check_g(basis, g):
    g = np.asarray(g, dtype=complex)
    if g.shape[:1] != (basis.freq.size,) or g.ndim > 2:
        raise UsageError(f"g has shape {g.shape}, frequency grid has {basis.freq.size} nodes")
    return g


def adjoint(basis: GeneralizedEigenbasis, g) -> WaveFunction:
    """``F* g``."""
    g = _check_g(basis, g)
    return WaveFunction(_synthesize(basis.e_table, basis.gap_table, basis.freq, g), basis.grid)


def _synthesize(table, gap_table, freq: FrequencyGrid, g):
    """``(2pi)^{-1/2} int g(xi) table(x, xi) dxi`` including the gap nodes."""
    g = np.asarray(g)
    w, wq = freq.weights, freq.gap_weights
    if g.ndim == 2:
        w, wq = w[:, None], wq[:, None]
    out = table @ (w * g) + gap_table @ (wq * freq.gap_values(g))
    return out / _SQRT_2PI


def pp_part(basis: GeneralizedEigenbasis, f) -> np.ndarray:
    s = _samples(f, basis.grid)
    out = np.zeros(basis.grid.n_points, dtype=complex)
    for b in basis.bound:
        out += np.dot(basis.grid.weights * s, b.eigenfunction) * b.eigenfunction
    return out


def p_ac(basis: GeneralizedEigenbasis, f) -> WaveFunction:
    """``f - sum_k (f, e_k) e_k``."""
    s = _samples(f, basis.grid)
    return WaveFunction(s - pp_part(basis, s), basis.grid)


def parseval_defect(basis: GeneralizedEigenbasis, f) -> float:
    """Relative Parseval defect ``| ||f||^2 - ||f#||^2 - sum|(f,e_k)|^2 | / ||f||^2``."""
    r = forward(basis, f)
    return r.parseval(basis.freq) / r.norm2


def _check_band(basis, band):
    lo, hi = band
    if not 0 < lo < hi:
        raise UsageError("band must satisfy 0 < lo < hi")
    for e in basis.freq.excluded:
        if lo <= e * e <= hi:
            raise ExceptionalFrequencyError(f"band {band} touches the excluded frequency {e}", frequency=e)
    return basis.freq.band_mask(band)


def band_norm2(basis: GeneralizedEigenbasis, f_sharp, band) -> float:
    """``int_{lo <= xi^2 < hi} |f#|^2 dxi``."""
    _check_band(basis, band)
    return basis.freq.norm2(f_sharp, band)


def spectral_projection(basis: GeneralizedEigenbasis, f, band) -> WaveFunction:
    """``F*(chi_band(xi^2) f#)``."""
    mask = _check_band(basis, band)
    fs = forward(basis, f).f_sharp
    return adjoint(basis, np.where(mask, fs, 0.0))


def spectral_operator(basis: GeneralizedEigenbasis, phi: Callable, f, *, include_pp: bool = True) -> WaveFunction:
    """``phi(H) f = F*(phi(xi^2) f#) + sum_k phi(lam_k) (f, e_k) e_k``."""
    r = forward(basis, f)
    out = adjoint(basis, np.asarray(phi(basis.freq.xi_values**2)) * r.f_sharp).samples
    if include_pp:
        for c, b in zip(r.pp_coefficients, basis.bound):
            out = out + phi(b.lam) * c * b.eigenfunction
    return WaveFunction(out, basis.grid)


def spectral_kernel(basis: GeneralizedEigenbasis, phi: Callable, x_index=None, y_index=None) -> np.ndarray:
    """``K(x, y) = (2 pi)^{-1} int phi(xi^2) e(x, xi) conj(e(y, xi)) dxi`` on index sets."""
    n = basis.grid.n_points
    xi_ = np.arange(n) if x_index is None else np.atleast_1d(x_index)
    yi_ = np.arange(n) if y_index is None else np.atleast_1d(y_index)
    fr = basis.freq
    w = fr.weights * np.asarray(phi(fr.xi_values**2))
    wq = fr.gap_weights * np.asarray(phi(fr.gap_nodes**2))
    # the gap carries e itself (no interpolation needed for a kernel)
    K = (basis.e_table[xi_] * w) @ np.conj(basis.e_table[yi_]).T
    K += (basis.gap_table[xi_] * wq) @ np.conj(basis.gap_table[yi_]).T
    return K / (2 * np.pi)


def forward_pm(basis: GeneralizedEigenbasis, f, sign: str) -> np.ndarray:
    """``F_+ f = (2pi)^{-1/2} int f conj(psi^+)`` and ``F_- f = (2pi)^{-1/2} int f psi^-``."""
    wf = basis.grid.weights * _samples(f, basis.grid)
    if sign == "plus":
        return np.conj(basis.psi("plus")).T @ wf / _SQRT_2PI
    if sign == "minus":
        return basis.psi("minus").T @ wf / _SQRT_2PI
    raise UsageError(f"sign must be 'plus' or 'minus', got {sign!r}")


def adjoint_pm(basis: GeneralizedEigenbasis, g, sign: str) -> WaveFunction:
    """``F_+^* g = (2pi)^{-1/2} int g psi^+`` and ``F_-^* g = (2pi)^{-1/2} int g conj(psi^-)``."""
    g = _check_g(basis, g)
    if sign == "plus":
        main, gap = basis.psi("plus"), basis.psi("plus", gap=True)
    elif sign == "minus":
        main, gap = np.conj(basis.psi("minus")), np.conj(basis.psi("minus", gap=True))
    else:
        raise UsageError(f"sign must be 'plus' or 'minus', got {sign!r}")
    return WaveFunction(_synthesize(main, gap, basis.freq, g), basis.grid)


def fourier_forward(grid: SpatialGrid, freq: FrequencyGrid, f) -> np.ndarray:
    """Ordinary transform ``(2pi)^{-1/2} int f(x) exp(-i x xi) dx`` on the frequency nodes."""
    wf = grid.weights * _samples(f, grid)
    return np.exp(-1j * np.outer(freq.xi_values, grid.x)) @ wf / _SQRT_2PI


def fourier_adjoint(grid: SpatialGrid, freq: FrequencyGrid, g) -> WaveFunction:
    """``(2pi)^{-1/2} int g(xi) exp(i x xi) dxi`` on the spatial grid."""
    table = np.exp(1j * np.outer(grid.x, freq.xi_values))
    gap = np.exp(1j * np.outer(grid.x, freq.gap_nodes))
    return WaveFunction(_synthesize(table, gap, freq, np.asarray(g, dtype=complex)), grid)
