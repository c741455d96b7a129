"""Acceptance suite: twelve numbered checks with measured values.

Each check returns a :class:`Check`; ``run_checks`` runs a selection and
``Check.line`` renders the one-line report used by the CLI and the tests.
Bases are cached per process since several checks share them.
"""

import time
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .oracle import crank_nicolson, fd_eigensolve, fd_eigenvalues, fd_hamiltonian, fd_projection
from .potential import SpatialGrid, default_grid, dirac, poschl_teller, random_bumps
from .propagator import evolve, free_evolve, scatter_profile, wave_operator
from .scattering import scattering_coefficients
from .spectrum import bound_states
from .transform import (
    adjoint,
    band_norm2,
    build_basis,
    forward,
    frequency_grid,
    gaussian_packet,
    p_ac,
    spectral_projection,
)

# Wide setup for the long-time checks: the packet must stay inside the box up
# to t = 50 and the frequency grid must resolve e(x, xi) out to |x| = 400.
WIDE_GRID = (-400.0, 400.0, 8001)
WIDE_FREQ = (0.05, 5.0, 768)
# Sharp band projections have a slowly decaying tail; these checks use a box
# large enough to hold it.
BAND_GRID = (-100.0, 100.0, 8001)


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    values: Dict[str, float] = field(default_factory=dict)
    tolerance: str = ""
    seconds: float = 0.0
    error: Optional[str] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        vals = " ".join(f"{k}={v:.3e}" for k, v in self.values.items())
        msg = f"[{status}] {self.number:2d} {self.name}: {vals} (tol {self.tolerance}) {self.seconds:.1f}s"
        if self.error:
            msg += f" error: {self.error}"
        return msg


def _l2(grid: SpatialGrid, u) -> float:
    return float(np.sqrt(np.dot(grid.weights, np.abs(u) ** 2)))


@lru_cache(maxsize=None)
def _pt_basis():
    return build_basis(poschl_teller(6.0), grid=default_grid())


@lru_cache(maxsize=None)
def _band_setup():
    g = SpatialGrid(*BAND_GRID)
    V = poschl_teller(6.0)
    return build_basis(V, grid=g), fd_hamiltonian(V, g)


@lru_cache(maxsize=None)
def _wide_basis():
    g = SpatialGrid(*WIDE_GRID)
    return build_basis(poschl_teller(6.0), frequency_grid(*WIDE_FREQ), g, residual_checks=0)


@lru_cache(maxsize=None)
def _wide_diagnostics():
    B = _wide_basis()
    chi = gaussian_packet(B.grid, 0.0, 1.5, 1.5)
    # Omega_+ chi lies in H_ac and its outgoing profile is chi itself
    phi = wave_operator(B, chi, "plus")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = scatter_profile(B, phi, [5.0, 10.0, 20.0, 30.0, 40.0, 50.0])
    return phi, d


def _xi_grid():
    return frequency_grid().xi_values


# ---------------------------------------------------------------------------
# The checks
# ---------------------------------------------------------------------------


def check_bound_states(seed: int = 0) -> Check:
    g = default_grid()
    V = poschl_teller(6.0)
    lam = np.array([b.lam for b in bound_states(V, g)])
    exact = np.array([-4.0, -1.0])
    fd = fd_eigenvalues(fd_hamiltonian(V, g), select=(-10.0, 0.0))
    ok_n = lam.size == 2 and fd.size == 2
    err = float(np.max(np.abs(lam - exact))) if ok_n else np.inf
    fd_err = float(np.max(np.abs(fd - exact))) if ok_n else np.inf
    return Check(1, "Poschl-Teller bound states", ok_n and err <= 1e-6 and fd_err <= 1e-3,
                 {"spectral_err": err, "fd_err": fd_err}, "1e-6 / 1e-3")


def check_reflectionless(seed: int = 0) -> Check:
    k = _xi_grid()
    sd = scattering_coefficients(poschl_teller(6.0), k)
    r = float(np.max(np.maximum(np.abs(sd.r_plus), np.abs(sd.r_minus))))
    return Check(2, "Poschl-Teller reflectionless", r <= 1e-8, {"max_abs_r": r}, "1e-8")


def check_delta(seed: int = 0) -> Check:
    k = _xi_grid()
    sd = scattering_coefficients(dirac(1.0), k)
    err = float(np.max(np.abs(sd.t - k / (k + 1j))))
    t1 = scattering_coefficients(dirac(1.0), [1.0]).t[0]
    e1 = abs(abs(t1) ** 2 - 0.5)
    return Check(3, "delta transmission", err <= 1e-8 and e1 <= 1e-10,
                 {"t_err": err, "t1_sq_err": e1}, "1e-8 / 1e-10")


def check_unitarity(seed: int = 0) -> Check:
    k = _xi_grid()
    worst_u = worst_j = 0.0
    for s in (seed + 1, seed + 2, seed + 3):
        sd = scattering_coefficients(random_bumps(s), k)
        ok = ~sd.exceptional
        worst_u = max(worst_u, float(np.max(sd.unitarity_residual[ok])))
        worst_j = max(worst_j, float(np.max(sd.jost_residual[ok])))
    return Check(4, "unitarity sweep", worst_u <= 1e-8 and worst_j <= 1e-8,
                 {"rt_residual": worst_u, "jost_residual": worst_j}, "1e-8")


def _random_gaussians(grid, seed, n):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        c = rng.uniform(-5.0, 5.0)
        w = rng.uniform(0.5, 2.0)
        k0 = rng.uniform(-3.0, 3.0)
        yield gaussian_packet(grid, c, w, k0)


def check_plancherel(seed: int = 0) -> Check:
    B = _pt_basis()
    worst = 0.0
    for f in _random_gaussians(B.grid, seed, 5):
        r = forward(B, f)
        worst = max(worst, r.parseval(B.freq) / r.norm2)
    return Check(5, "Plancherel / completeness", worst <= 1e-3, {"max_rel_defect": worst}, "1e-3")


def check_band_plancherel(seed: int = 0) -> Check:
    B, H = _band_setup()
    g = B.grid
    planch = fd = 0.0
    for band in ((0.5, 2.0), (2.0, 5.0)):
        kmid = 0.5 * (np.sqrt(band[0]) + np.sqrt(band[1]))
        f = gaussian_packet(g, -30.0, 7.0, kmid)
        P = spectral_projection(B, f, band)
        lhs = P.norm() ** 2
        rhs = band_norm2(B, forward(B, f).f_sharp, band)
        planch = max(planch, abs(lhs - rhs) / rhs)
        E = fd_eigensolve(H, select=(band[0] - 0.1, band[1] + 0.1))
        Pfd = fd_projection(H, f.samples, band, E)
        fd = max(fd, _l2(g, P.samples - Pfd) / P.norm())
    return Check(6, "band Plancherel", planch <= 1e-3 and fd <= 1e-2,
                 {"plancherel_rel": planch, "fd_rel": fd}, "1e-3 / 1e-2")


def _bump(x, a):
    """``b = exp(-1 / (1 - (x/a)^2))`` with ``b'`` and ``b''``; all zero for ``|x| >= a``."""
    u = x / a
    inside = np.abs(u) < 1
    b, d1, d2 = np.zeros_like(x), np.zeros_like(x), np.zeros_like(x)
    ui = u[inside]
    s = 1.0 - ui * ui
    bi = np.exp(-1.0 / s)
    p = -2.0 * ui / s**2
    dp = -2.0 / s**2 - 8.0 * ui * ui / s**3
    b[inside] = bi
    d1[inside] = p * bi / a
    d2[inside] = (p * p + dp) * bi / a**2
    return b, d1, d2


def check_diagonalization(seed: int = 0) -> Check:
    B = _pt_basis()
    g = B.grid
    k0 = 1.2
    b, d1, d2 = _bump(g.x - 0.3, 3.0)
    wave = np.exp(1j * k0 * g.x)
    f = b * wave
    f_xx = (d2 + 2j * k0 * d1 - k0 * k0 * b) * wave
    Hf = -f_xx + B.V.density_values(g.x) * f
    lhs = forward(B, Hf).f_sharp
    rhs = B.freq.xi_values**2 * forward(B, f).f_sharp
    rel = float(np.sqrt(B.freq.norm2(lhs - rhs)) / _l2(g, Hf))
    return Check(7, "diagonalization", rel <= 1e-3, {"rel_err": rel}, "1e-3")


def check_inversion(seed: int = 0) -> Check:
    B = _pt_basis()
    g = B.grid
    worst_f = 0.0
    for f in _random_gaussians(g, seed + 100, 3):
        back = adjoint(B, forward(B, f).f_sharp)
        worst_f = max(worst_f, _l2(g, back.samples - p_ac(B, f).samples) / f.norm())
    xi = B.freq.xi_values
    rng = np.random.default_rng(seed + 200)
    worst_g = 0.0
    for _ in range(3):
        # band-limited: numerically supported where 1 <= xi^2 < 25, away from
        # the kink of e(x, xi) at xi = 0
        c = rng.choice([-1.0, 1.0]) * rng.uniform(2.0, 4.0)
        s, x0 = rng.uniform(0.15, 0.3), rng.uniform(-5, 5)
        G = np.exp(-((xi - c) ** 2) / (2 * s * s) - 1j * xi * x0)
        back = forward(B, adjoint(B, G)).f_sharp
        worst_g = max(worst_g, float(np.sqrt(B.freq.norm2(back - G) / B.freq.norm2(G))))
    return Check(8, "inversion pair", worst_f <= 1e-3 and worst_g <= 1e-3,
                 {"FstarF_err": worst_f, "FFstar_err": worst_g}, "1e-3")


def check_propagator(seed: int = 0) -> Check:
    B = _pt_basis()
    g = B.grid
    phi = gaussian_packet(g, -3.0, 1.0, 1.0)
    u = evolve(B, phi, 1.0).state
    cn = crank_nicolson(fd_hamiltonian(B.V, g), phi.samples, 1.0)
    rel = _l2(g, u.samples - cn) / phi.norm()
    return Check(9, "propagator vs Crank-Nicolson", rel <= 1e-3, {"rel_err": rel}, "1e-3")


def check_asymptotics(seed: int = 0) -> Check:
    phi, d = _wide_diagnostics()
    n = phi.norm()
    e = dict(d.error_curve)
    fr = dict(d.fraunhofer_curve)
    e10, e50, f50 = e[10.0] / n, e[50.0] / n, fr[50.0] / n
    ok = e50 <= 0.05 and e50 < e10 and f50 <= 0.05
    return Check(10, "scattering asymptotics", ok, {"err_t10": e10, "err_t50": e50, "fraunhofer_t50": f50},
                 "5% and decreasing")


def check_dispersive(seed: int = 0) -> Check:
    _, d = _wide_diagnostics()
    s = np.array([v for _, v in d.supnorm_curve])
    ratio = float(s.max() / s.min())
    return Check(11, "dispersive rate", ratio <= 2.0, {"sup_sqrt_t_ratio": ratio}, "factor 2")


def check_wave_operators(seed: int = 0) -> Check:
    B = _pt_basis()
    g = B.grid
    f = gaussian_packet(g, 0.0, 1.0, 0.7)
    W = wave_operator(B, f, "minus")
    iso = abs(W.norm() - f.norm()) / f.norm()
    lhs = evolve(B, W, 1.0).state
    rhs = wave_operator(B, free_evolve(f, 1.0), "minus")
    inter = _l2(g, lhs.samples - rhs.samples) / rhs.norm()
    return Check(12, "wave-operator algebra", iso <= 1e-3 and inter <= 1e-3,
                 {"isometry": iso, "intertwining": inter}, "1e-3")


CHECKS: Dict[int, Callable[[int], Check]] = {
    1: check_bound_states,
    2: check_reflectionless,
    3: check_delta,
    4: check_unitarity,
    5: check_plancherel,
    6: check_band_plancherel,
    7: check_diagonalization,
    8: check_inversion,
    9: check_propagator,
    10: check_asymptotics,
    11: check_dispersive,
    12: check_wave_operators,
}


def run_check(number: int, seed: int = 0) -> Check:
    """Run one check; library errors become a failed check carrying the message."""
    fn = CHECKS[number]
    t0 = time.perf_counter()
    try:
        out = fn(seed)
    except Exception as exc:  # reported, not raised: one failure must not hide the rest
        out = Check(number, fn.__name__.replace("check_", ""), False, error=f"{type(exc).__name__}: {exc}")
    out.seconds = time.perf_counter() - t0
    return out


def run_checks(only: Optional[Sequence[int]] = None, seed: int = 0) -> List[Check]:
    numbers = sorted(CHECKS) if not only else list(only)
    return [run_check(n, seed) for n in numbers]
