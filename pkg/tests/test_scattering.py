import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scatter1d.errors import ExceptionalFrequencyError, UsageError
from scatter1d.potential import SpatialGrid, dirac, gaussian_bump, poschl_teller, random_bumps, square_well, zero
from scatter1d.scattering import psi_family, psi_table, scattering_coefficients, scattering_solution


def test_delta_coefficients(grid):
    sd = scattering_coefficients(dirac(1.0), [1.0], grid)
    t, r = sd.t[0], sd.r_plus[0]
    assert abs(t - 1 / (1 + 1j)) < 1e-10
    assert abs(abs(t) ** 2 - 0.5) < 1e-10
    assert abs(r - (t - 1)) < 1e-10
    assert abs(sd.r_minus[0] - r) < 1e-10  # even potential


def test_delta_transmission_curve(grid):
    k = np.linspace(0.1, 6, 30)
    sd = scattering_coefficients(dirac(1.0), k, grid)
    np.testing.assert_allclose(sd.t, k / (k + 1j), atol=1e-10)


def test_poschl_teller_reflectionless(grid):
    k = np.linspace(0.05, 8, 200)
    sd = scattering_coefficients(poschl_teller(6), k, grid)
    assert np.max(np.abs(sd.r_plus)) < 1e-8
    assert np.max(np.abs(sd.r_minus)) < 1e-8
    np.testing.assert_allclose(sd.t, (k + 1j) * (k + 2j) / ((k - 1j) * (k - 2j)), atol=1e-8)


def test_poschl_teller_phi_closed_form(grid):
    k = 1.0
    th = np.tanh(grid.x)
    expect = np.exp(1j * k * grid.x) * (1 + k * k + 3j * k * th - 3 * th**2) / ((k - 1j) * (k - 2j))
    phi = scattering_solution(poschl_teller(6), k, "plus", grid)
    np.testing.assert_allclose(phi.samples, expect, atol=1e-8)


@pytest.mark.parametrize("V", [square_well(2.0, 1.0), gaussian_bump(1.5, 0.8, -0.5), random_bumps(3)])
def test_unitarity_and_cross_relation(V, grid):
    k = np.linspace(0.2, 8, 80)
    sd = scattering_coefficients(V, k, grid)
    assert np.nanmax(sd.unitarity_residual) < 1e-10
    assert np.nanmax(sd.cross_residual) < 1e-10


@given(seed=st.integers(0, 200))
def test_unitarity_random(seed):
    g = SpatialGrid(-30, 30, 2048)
    sd = scattering_coefficients(random_bumps(seed), np.linspace(0.1, 6, 25), g)
    assert np.nanmax(sd.unitarity_residual) < 1e-10


def test_zero_potential_family(grid):
    for k in (-1.5, 0.7):
        p = psi_family(zero(), k, "plus", grid)
        m = psi_family(zero(), k, "minus", grid)
        np.testing.assert_allclose(p.samples, np.exp(1j * k * grid.x), atol=1e-12)
        np.testing.assert_allclose(m.samples, np.exp(-1j * k * grid.x), atol=1e-12)


@pytest.mark.parametrize("k", [-2.0, -0.5, 0.5, 2.0])
@pytest.mark.parametrize("sign", ["plus", "minus"])
def test_psi_solves_lippmann_schwinger(k, sign, grid):
    w = psi_family(gaussian_bump(-1.0, 1.0, 0.3), k, sign, grid)
    assert w.ls_residual < 1e-6


def test_psi_incident_direction(grid):
    # psi^+_k carries exp(ikx): on the incoming side it is exp(ikx) plus a reflected wave
    V = dirac(1.0)
    x = grid.x
    for k in (1.3, -1.3):
        psi = psi_family(V, k, "plus", grid, check_residual=False).samples
        sd = scattering_coefficients(V, [abs(k)], grid)
        t = sd.t[0]
        out = x > 1 if k > 0 else x < -1
        np.testing.assert_allclose(psi[out], t * np.exp(1j * k * x[out]), atol=1e-9)


def test_psi_table_matches_family(grid):
    V = gaussian_bump(2.0, 0.5, 0.0)
    k = np.array([-1.0, 0.4, 2.5])
    tab = psi_table(V, k, "minus", grid)
    for j, kj in enumerate(k):
        col = psi_family(V, kj, "minus", grid, check_residual=False).samples
        np.testing.assert_allclose(tab[:, j], col, atol=1e-12)


def test_exceptional_masking(grid):
    # |alpha_k| = sqrt(1 + 1/k^2) for this potential
    sd = scattering_coefficients(dirac(1.0), [0.5, 2.0], grid, alpha_threshold=1.5)
    assert sd.exceptional.tolist() == [False, True]
    assert np.isfinite(sd.t[0]) and np.isnan(sd.t[1]) and np.isnan(sd.r_plus[1])
    with pytest.raises(ExceptionalFrequencyError):
        scattering_solution(dirac(1.0), 2.0, "plus", grid, alpha_threshold=1.5)
    with pytest.raises(ExceptionalFrequencyError):
        psi_table(dirac(1.0), [0.5, 2.0], "plus", grid, alpha_threshold=1.5)


def test_bad_sign(grid):
    with pytest.raises(UsageError):
        psi_family(zero(), 1.0, "left", grid)


def test_csv_rows(grid):
    sd = scattering_coefficients(dirac(1.0), [1.0, 2.0], grid)
    rows = list(sd.to_rows())
    assert len(rows) == 2 and len(rows[0]) == len(sd.CSV_COLUMNS)
