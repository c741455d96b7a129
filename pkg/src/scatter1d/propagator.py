"""Time evolution, wave operators and long-time scattering diagnostics.

``U(t) = exp(-itH)`` acts through the eigenfunction expansion,

    U(t) f = F*(exp(-it xi^2) f#) + sum_k exp(-it lam_k) (f, e_k) e_k,

and the free group ``U0(t)`` through the discrete Fourier transform of the
grid samples (periodic extension of the truncated line).

Wave operators follow ``Omega_-+ = lim_{t -> -+inf} exp(itH) exp(-itH0)``,
so ``Omega_- = F_+^* F_0`` and ``Omega_+ = F_-^* F_0``.  For
``phi`` in the absolutely continuous subspace the asymptotic profile for
``t -> +inf`` is ``phi_+ = Omega_+^* phi = F_0^* F_- phi``, and for
``t -> -inf`` it is ``phi_- = Omega_-^* phi = F_0^* F_+ phi``.
"""

import csv
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import UsageError
from .potential import SpatialGrid
from .transform import (
    GeneralizedEigenbasis,
    WaveFunction,
    _samples,
    _synthesize,
    adjoint_pm,
    forward,
    forward_pm,
    fourier_adjoint,
    fourier_forward,
    pp_part,
)

PP_WARN = 1e-6
CSV_COLUMNS = ("t", "l2_error", "fraunhofer_error", "supnorm_sqrt_t", "norm_drift")


@dataclass
class EvolutionResult:
    t: float
    state: WaveFunction
    norm_drift: float


@dataclass
class ScatterDiagnostics:
    """Profiles ``phi_+`` (for ``t -> +inf``) and ``phi_-`` plus time series.

    Each curve is a list of ``(t, value)`` pairs in the order of ``t_list``.
    """

    phi_plus: WaveFunction
    phi_minus: WaveFunction
    error_curve: List[Tuple[float, float]] = field(default_factory=list)
    fraunhofer_curve: List[Tuple[float, float]] = field(default_factory=list)
    supnorm_curve: List[Tuple[float, float]] = field(default_factory=list)
    norm_drift_curve: List[Tuple[float, float]] = field(default_factory=list)
    pp_removed: float = 0.0

    def nonincreasing_after(self, t0: float, jitter: float = 0.1) -> bool:
        """True if the error curve never grows by more than ``jitter`` (relative) beyond ``t0``."""
        vals = [e for t, e in sorted(self.error_curve) if abs(t) >= t0]
        return all(b <= a * (1.0 + jitter) for a, b in zip(vals, vals[1:]))

    def rows(self):
        for (t, e), (_, fr), (_, s), (_, d) in zip(
            self.error_curve, self.fraunhofer_curve, self.supnorm_curve, self.norm_drift_curve
        ):
            yield (t, e, fr, s, d)

    def write_csv(self, path, header: Optional[str] = None):
        with open(path, "w", newline="") as fh:
            if header:
                fh.write(header + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for row in self.rows():
                w.writerow(["%.17g" % v for v in row])


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------


def evolve_many(basis: GeneralizedEigenbasis, phi0, times: Sequence[float]) -> List[EvolutionResult]:
    """``U(t) phi0`` for several times sharing one forward transform."""
    grid = basis.grid
    s = _samples(phi0, grid)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    r = forward(basis, s)
    xi2 = basis.freq.xi_values**2
    G = np.exp(-1j * np.outer(xi2, times)) * r.f_sharp[:, None]
    ac = _synthesize(basis.e_table, basis.gap_table, basis.freq, G)
    n0 = float(np.sqrt(r.norm2))
    out = []
    for j, t in enumerate(times):
        u = ac[:, j].copy()
        for c, b in zip(r.pp_coefficients, basis.bound):
            u += np.exp(-1j * t * b.lam) * c * b.eigenfunction
        wf = WaveFunction(u, grid)
        drift = abs(wf.norm() - n0) / n0 if n0 > 0 else 0.0
        out.append(EvolutionResult(t=float(t), state=wf, norm_drift=drift))
    return out


def evolve(basis: GeneralizedEigenbasis, phi0, t: float) -> EvolutionResult:
    """``U(t) phi0`` via the eigenfunction expansion."""
    return evolve_many(basis, phi0, [t])[0]


def _periodic_k(grid: SpatialGrid):
    return 2.0 * np.pi * np.fft.fftfreq(grid.n_points - 1, grid.spacing)


def free_evolve(phi0, t: float, grid: Optional[SpatialGrid] = None) -> WaveFunction:
    """``U0(t) phi0 = exp(it d^2/dx^2) phi0`` by the FFT multiplier ``exp(-it k^2)``.

    The grid's last node is identified with the first (period
    ``x_max - x_min``); the trapezoid norm then equals the discrete periodic
    norm, which the multiplier preserves exactly.
    """
    if grid is None:
        if not isinstance(phi0, WaveFunction):
            raise UsageError("free_evolve needs a grid when given raw samples")
        grid = phi0.grid
    s = _samples(phi0, grid)
    if t == 0:
        return WaveFunction(s.copy(), grid)
    body = s[:-1].copy()
    body[0] = 0.5 * (s[0] + s[-1])
    out = np.fft.ifft(np.exp(-1j * t * _periodic_k(grid) ** 2) * np.fft.fft(body))
    return WaveFunction(np.append(out, out[0]), grid)


def fourier_at(phi, k, grid: Optional[SpatialGrid] = None, *, chunk: int = 512) -> np.ndarray:
    """``(2 pi)^{-1/2} int phi(x) exp(-ikx) dx`` at arbitrary ``k`` (direct quadrature)."""
    if grid is None:
        grid = phi.grid
    wf = grid.weights * _samples(phi, grid)
    k = np.asarray(k, dtype=float)
    flat = k.ravel()
    out = np.empty(flat.size, dtype=complex)
    for a in range(0, flat.size, chunk):
        kk = flat[a:a + chunk]
        out[a:a + chunk] = np.exp(-1j * np.outer(kk, grid.x)) @ wf
    return (out / np.sqrt(2.0 * np.pi)).reshape(k.shape)


def fraunhofer(phi_hat, x, t: float) -> np.ndarray:
    """``(2it)^{-1/2} exp(i x^2 / 4t) phi_hat(x / 2t)``; ``phi_hat`` is a callable."""
    if t == 0:
        raise UsageError("the far-field form needs t != 0")
    x = np.asarray(x, dtype=float)
    return np.exp(1j * x * x / (4.0 * t)) * phi_hat(x / (2.0 * t)) / np.sqrt(2j * t)


# ---------------------------------------------------------------------------
# Wave operators
# ---------------------------------------------------------------------------


def wave_operator(basis: GeneralizedEigenbasis, f, side: str = "minus") -> WaveFunction:
    """``Omega_- f = F_+^* F_0 f`` or ``Omega_+ f = F_-^* F_0 f``."""
    g = fourier_forward(basis.grid, basis.freq, f)
    if side == "minus":
        return adjoint_pm(basis, g, "plus")
    if side == "plus":
        return adjoint_pm(basis, g, "minus")
    raise UsageError(f"side must be 'minus' or 'plus', got {side!r}")


def wave_operator_adjoint(basis: GeneralizedEigenbasis, phi, side: str = "minus") -> WaveFunction:
    """``Omega_-^* phi = F_0^* F_+ phi`` or ``Omega_+^* phi = F_0^* F_- phi``."""
    if side == "minus":
        g = forward_pm(basis, phi, "plus")
    elif side == "plus":
        g = forward_pm(basis, phi, "minus")
    else:
        raise UsageError(f"side must be 'minus' or 'plus', got {side!r}")
    return fourier_adjoint(basis.grid, basis.freq, g)


def asymptotic_profiles(basis: GeneralizedEigenbasis, phi) -> Tuple[WaveFunction, WaveFunction]:
    """``(phi_+, phi_-)`` with ``U(t) phi ~ U0(t) phi_+-`` as ``t -> +-inf``."""
    return wave_operator_adjoint(basis, phi, "plus"), wave_operator_adjoint(basis, phi, "minus")


def project_ac(basis: GeneralizedEigenbasis, phi, *, warn_above: float = PP_WARN):
    """``phi - P_pp phi``; warns when the removed part is not negligible."""
    s = _samples(phi, basis.grid)
    pp = pp_part(basis, s)
    w = basis.grid.weights
    rel = float(np.sqrt(np.dot(w, np.abs(pp) ** 2) / max(np.dot(w, np.abs(s) ** 2), 1e-300)))
    if rel > warn_above:
        warnings.warn(f"state has a bound-state component of relative size {rel:.3g}; it was removed",
                      stacklevel=3)
    return WaveFunction(s - pp, basis.grid), rel


def scatter_profile(basis: GeneralizedEigenbasis, phi, t_list: Sequence[float], *,
                    warn_above: float = PP_WARN) -> ScatterDiagnostics:
    """Long-time comparison of ``U(t) phi`` with free evolution of its profiles.

    For each ``t`` the profile matching the sign of ``t`` is used.  Curves:

    * ``error_curve``: ``||U(t) phi - U0(t) phi_+-||``
    * ``fraunhofer_curve``: L2 distance between ``U(t) phi`` and the
      far-field form ``(2it)^{-1/2} exp(i x^2/4t) hat(phi_+-)(x/2t)``
    * ``supnorm_curve``: ``||U(t) phi||_inf sqrt(|t|)``
    """
    grid = basis.grid
    phi, rel = project_ac(basis, phi, warn_above=warn_above)
    php, phm = asymptotic_profiles(basis, phi)
    diag = ScatterDiagnostics(phi_plus=php, phi_minus=phm, pp_removed=rel)
    times = [float(t) for t in t_list]
    evols = evolve_many(basis, phi, times) if times else []
    for t, ev in zip(times, evols):
        prof = php if t >= 0 else phm
        u = ev.state
        err = (u - free_evolve(prof, t)).norm()
        if t != 0:
            far = fraunhofer(lambda k: fourier_at(prof, k), grid.x, t)
            ferr = (u - WaveFunction(far, grid)).norm()
        else:
            ferr = float("nan")
        diag.error_curve.append((t, err))
        diag.fraunhofer_curve.append((t, ferr))
        diag.supnorm_curve.append((t, float(np.max(np.abs(u.samples)) * np.sqrt(abs(t)))))
        diag.norm_drift_curve.append((t, ev.norm_drift))
    return diag


def center_of_mass(u) -> float:
    """``int x |u|^2 / int |u|^2``."""
    w = u.grid.weights * np.abs(u.samples) ** 2
    return float(np.dot(w, u.grid.x) / np.sum(w))


def mean_momentum(phi) -> float:
    """``int k |hat(phi)(k)|^2 dk / ||phi||^2`` from the periodic DFT of the samples."""
    grid = phi.grid
    s = phi.samples[:-1]
    p = np.abs(np.fft.fft(s)) ** 2
    return float(np.dot(_periodic_k(grid), p) / np.sum(p))


def eta_curve(basis: GeneralizedEigenbasis, phi, side: str = "minus"):
    """Remainder diagnostic ``|F_+-(eta_-+)(k)| (1 + |k|)`` on the frequency nodes.

    With ``F_+(eta_-) = (F_+ - F_0) phi`` (``side="minus"``) or
    ``F_-(eta_+) = (F_- - F_0) phi``.  Returns ``(k, curve, scale)`` where
    ``scale = ||V||_{L^1_2} ||phi||_{L^1_1}``, so that ``max(curve) / scale``
    is the empirical constant in the ``C / (1 + |k|)`` bound.
    """
    sign = {"minus": "plus", "plus": "minus"}.get(side)
    if sign is None:
        raise UsageError(f"side must be 'minus' or 'plus', got {side!r}")
    grid = basis.grid
    k = basis.freq.xi_values
    diff = forward_pm(basis, phi, sign) - fourier_forward(grid, basis.freq, phi)
    curve = np.abs(diff) * (1.0 + np.abs(k))
    x = grid.x
    V = basis.V
    vw = np.dot(grid.weights, np.abs(V.density_values(x)) * (1 + np.abs(x)) ** 2) if V.has_density else 0.0
    vw += float(np.sum(np.abs(V.atom_masses) * (1 + np.abs(V.atom_locations)) ** 2))
    pw = float(np.dot(grid.weights, np.abs(_samples(phi, grid)) * (1 + np.abs(x))))
    return k, curve, float(vw * pw)
