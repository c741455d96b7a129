import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scatter1d.errors import DomainError, SpectralProximityError, UsageError
from scatter1d.lippmann import green_free, ls_solve, ls_solve_pm, resolvent_apply, sqrt_branch
from scatter1d.oracle import fd_apply, fd_hamiltonian, fd_resolvent
from scatter1d.potential import SpatialGrid, dirac, gaussian_bump, poschl_teller, square_well, zero
from scatter1d.scattering import psi_family, scattering_coefficients


def test_green_free_values():
    assert abs(green_free(0.0, 0.0, -1.0) - 0.5) < 1e-15
    assert abs(green_free(1.0, -1.0, -4.0) - np.exp(-4.0) / 4) < 1e-15
    g = green_free(np.array([0.0, 3.0]), 0.0, -1 + 1e-3j)
    assert abs(g[1]) < abs(g[0])


@given(re=st.floats(-5, 5), im=st.floats(1e-3, 5))
def test_green_free_decays_in_upper_half_plane(re, im):
    k = sqrt_branch(re + 1j * im)
    assert k.imag > 0
    assert abs(green_free(10.0, 0.0, re + 1j * im)) <= abs(green_free(0.0, 0.0, re + 1j * im))


def test_green_free_symmetry_and_equation():
    zeta = 2.0 + 0.5j
    x = np.linspace(0.1, 3, 50)
    np.testing.assert_allclose(green_free(x, -0.4, zeta), green_free(-0.4, x, zeta))
    # -G'' - zeta G = 0 away from the diagonal, with unit jump in -G'
    h = 1e-4
    g = lambda t: green_free(t, 0.0, zeta)
    d2 = (g(x + h) - 2 * g(x) + g(x - h)) / h**2
    np.testing.assert_allclose(-d2 - zeta * g(x), 0, atol=1e-5)
    jump = -((g(h) - g(0)) / h - (g(0) - g(-h)) / h)
    assert abs(jump - 1) < 1e-3


def test_green_free_cut():
    with pytest.raises(DomainError):
        green_free(0.0, 0.0, 2.0)


@pytest.mark.parametrize("xi", [1.0, -1.0, 3.0])
def test_poschl_teller_against_jost(xi, grid):
    e = ls_solve(poschl_teller(6), xi, grid)
    psi = psi_family(poschl_teller(6), xi, "plus", grid, check_residual=False).samples
    assert e.ls_residual < 1e-6
    assert np.max(np.abs(e.samples - psi)) < 1e-6


def test_gaussian_bump_against_jost(grid):
    V = gaussian_bump(1.0, 1.0, 0.0)
    e = ls_solve(V, -1.5, grid)
    psi = psi_family(V, -1.5, "plus", grid, check_residual=False).samples
    assert np.max(np.abs(e.samples - psi)) < 1e-6


@pytest.mark.parametrize("xi", [0.7, -2.0])
def test_minus_family(xi, grid):
    V = gaussian_bump(-1.5, 0.6, 0.4)
    e = ls_solve_pm(V, xi, "minus", grid)
    psi = psi_family(V, xi, "minus", grid, check_residual=False).samples
    assert np.max(np.abs(e.samples - psi)) < 1e-6


def test_density_jump_first_order():
    # local cubics straddle the jump, so the Nystrom solution converges slowly
    V = square_well(3.0, 1.0)
    errs = []
    for n in (2048, 8192):
        g = SpatialGrid(-40, 40, n)
        e = ls_solve(V, 0.7, g, check_residual=False).samples
        psi = psi_family(V, 0.7, "plus", g, check_residual=False).samples
        errs.append(np.max(np.abs(e - psi)))
    assert errs[1] < 0.6 * errs[0] and errs[1] < 2e-2


def test_delta_closed_form(grid):
    e = ls_solve(dirac(1.0), 1.0, grid)
    x = grid.x
    t = 1 / (1 + 1j)
    r = t - 1
    expect = np.where(x >= 0, t * np.exp(1j * x), np.exp(1j * x) + r * np.exp(-1j * x))
    np.testing.assert_allclose(e.samples, expect, atol=1e-10)
    assert abs(e.atom_values[0] - t) < 1e-10


def test_zero_potential_is_plane_wave(grid):
    e = ls_solve(zero(), 2.0, grid)
    np.testing.assert_allclose(e.samples, np.exp(2j * grid.x), atol=1e-14)


def test_guard_and_sign(grid):
    with pytest.raises(DomainError):
        ls_solve(poschl_teller(6), 1e-6, grid)
    with pytest.raises(UsageError):
        ls_solve_pm(poschl_teller(6), 1.0, "up", grid)


def _resolvent_case():
    g = SpatialGrid(-30, 30, 3001)
    V = gaussian_bump(-2.0, 0.8, 0.3)
    f = np.exp(-((g.x - 1) ** 2)) * (1 + 0.5j * g.x)
    return g, V, f


@pytest.mark.parametrize("zeta", [-0.5 + 0.3j, 2.0 + 0.5j, -3.0])
def test_resolvent_residual(zeta):
    g, V, f = _resolvent_case()
    u = resolvent_apply(V, zeta, f, g)
    Hu, mask = fd_apply(V, g, u)
    res = (Hu - zeta * u - f)[mask]
    assert np.max(np.abs(res)) < 1e-6 * np.max(np.abs(f))


def test_resolvent_against_fd():
    g, V, f = _resolvent_case()
    zeta = 1.0 + 2.0j  # strong decay, so the FD walls do not matter
    u = resolvent_apply(V, zeta, f, g)
    v = fd_resolvent(fd_hamiltonian(V, g), zeta, f)
    assert np.max(np.abs(u - v)) < 1e-3 * np.max(np.abs(u))


def test_resolvent_free():
    g = SpatialGrid(-30, 30, 3001)
    f = np.exp(-(g.x**2))
    u = resolvent_apply(zero(), -1.0, f, g)
    # (-d^2 + 1)^{-1} f = (1/2) int exp(-|x-y|) f(y) dy; compare at x = 0
    y = np.linspace(-10, 10, 200001)
    ref = 0.5 * np.trapezoid(np.exp(-np.abs(y)) * np.exp(-(y**2)), y)
    assert abs(u[1500] - ref) < 1e-8


def test_resolvent_proximity(grid):
    f = np.exp(-(grid.x**2))
    with pytest.raises(SpectralProximityError):
        resolvent_apply(dirac(-1.0), -1.0 + 1e-9j, f, grid)
    with pytest.raises(SpectralProximityError):
        resolvent_apply(zero(), 1.0, f, grid)
    with pytest.raises(UsageError):
        resolvent_apply(zero(), -1.0, f[:-1], grid)
