"""Spectral and scattering theory for one-dimensional Schroedinger operators.

``H = -d^2/dx^2 + V`` with ``V`` an integrable density plus Dirac atoms.
The package computes Jost solutions, scattering coefficients, bound
states, continuum eigenfunctions, the perturbed Fourier transform with its
spectral calculus, and the time evolution with its scattering asymptotics,
and cross-checks them against a finite-difference reference.

Set ``SCATTER1D_DISABLE_NUMBA=1`` before import to run the pure-numpy kernels.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DomainError,
    ExceptionalFrequencyError,
    OracleError,
    PartialBasisError,
    Scatter1DError,
    SolverError,
    SpectralProximityError,
    UsageError,
    ValidationError,
)
from .potential import (
    Potential,
    PotentialNorms,
    SpatialGrid,
    default_grid,
    dirac,
    from_samples,
    from_spec,
    gaussian_bump,
    make_builtin,
    norms,
    poschl_teller,
    random_bumps,
    square_well,
    zero,
)
from .jost import alpha_beta, jost_coefficients, jost_solve, wronskian
from .scattering import psi_family, scattering_coefficients, scattering_solution
from .spectrum import bound_states, exceptional_scan, spectral_density, spectrum
from .lippmann import green_free, ls_solve, ls_solve_pm, resolvent_apply
from .transform import (
    WaveFunction,
    adjoint,
    band_norm2,
    build_basis,
    forward,
    frequency_grid,
    gaussian_packet,
    p_ac,
    spectral_kernel,
    spectral_operator,
    spectral_projection,
)
from .propagator import (
    asymptotic_profiles,
    evolve,
    free_evolve,
    scatter_profile,
    wave_operator,
    wave_operator_adjoint,
)
from .oracle import crank_nicolson, fd_eigensolve, fd_hamiltonian, fd_projection, fd_resolvent
