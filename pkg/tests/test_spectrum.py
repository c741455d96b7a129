import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scatter1d.errors import ExceptionalFrequencyError
from scatter1d.oracle import fd_eigensolve, fd_eigenvalues, fd_hamiltonian, fd_spectral_density
from scatter1d.potential import SpatialGrid, dirac, gaussian_bump, poschl_teller, square_well, zero
from scatter1d.spectrum import bound_states, exceptional_scan, spectral_density, spectrum


def test_poschl_teller_bound_states(grid):
    bs = bound_states(poschl_teller(6), grid)
    np.testing.assert_allclose([b.lam for b in bs], [-4.0, -1.0], atol=1e-6)
    for b in bs:
        assert b.residual < 1e-6
        assert abs(np.sum(b.eigenfunction**2) * grid.spacing - 1) < 1e-10


def test_poschl_teller_eigenfunctions(grid):
    bs = bound_states(poschl_teller(6), grid)
    x = grid.x
    u0 = 1 / np.cosh(x) ** 2
    u1 = np.tanh(x) / np.cosh(x)
    for b, u in zip(bs, (u0, u1)):
        u = u / np.sqrt(np.sum(u**2) * grid.spacing)
        err = min(np.max(np.abs(b.eigenfunction - u)), np.max(np.abs(b.eigenfunction + u)))
        assert err < 1e-6


def test_attractive_delta(grid):
    bs = bound_states(dirac(-1.0), grid)
    assert len(bs) == 1
    assert abs(bs[0].lam + 1) < 1e-8
    u = np.exp(-np.abs(grid.x))
    u /= np.sqrt(np.sum(u**2) * grid.spacing)
    assert np.max(np.abs(bs[0].eigenfunction - u)) < 1e-6


@pytest.mark.parametrize("V", [zero(), dirac(1.0), gaussian_bump(2.0, 1.0, 0.0), square_well(-3.0, 1.0)])
def test_no_bound_states(V, grid):
    assert bound_states(V, grid) == []


def test_orthonormal_eigenfunctions(grid):
    bs = bound_states(square_well(8.0, 2.0), grid)
    U = np.array([b.eigenfunction for b in bs])
    G = U @ U.T * grid.spacing
    assert len(bs) >= 3
    assert np.max(np.abs(G - np.eye(len(bs)))) < 1e-6


@pytest.mark.parametrize("V", [square_well(8.0, 2.0), gaussian_bump(-5.0, 0.8, 0.4), poschl_teller(12)])
def test_count_matches_finite_differences(V, grid):
    lam = np.array([b.lam for b in bound_states(V, grid)])
    fd = fd_eigenvalues(fd_hamiltonian(V, grid))
    fd = fd[fd < -1e-3]
    assert lam.size == fd.size
    # the second-order stencil loses accuracy at density jumps
    np.testing.assert_allclose(lam, fd, atol=5e-2)


def test_square_well_transcendental(grid):
    from scipy.optimize import brentq

    d, a = 8.0, 2.0
    even = lambda k: np.sqrt(d - k * k) * np.sin(np.sqrt(d - k * k) * a) - k * np.cos(np.sqrt(d - k * k) * a)
    odd = lambda k: np.sqrt(d - k * k) * np.cos(np.sqrt(d - k * k) * a) + k * np.sin(np.sqrt(d - k * k) * a)
    ks = np.linspace(1e-6, np.sqrt(d) - 1e-9, 4001)
    exact = []
    for f in (even, odd):
        v = f(ks)
        for i in np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]:
            exact.append(-brentq(f, ks[i], ks[i + 1]) ** 2)
    lam = [b.lam for b in bound_states(square_well(d, a), grid)]
    np.testing.assert_allclose(lam, sorted(exact), atol=1e-8)


@given(depth=st.floats(0.5, 10.0), half_width=st.floats(0.3, 2.0))
def test_square_well_count(depth, half_width):
    # one even/odd state per pi/2 of sqrt(depth) * half-width
    g = SpatialGrid(-30, 30, 4096)
    z = np.sqrt(depth) * half_width
    expected = int(np.ceil(z / (np.pi / 2)))
    if abs(z / (np.pi / 2) - round(z / (np.pi / 2))) < 1e-3:
        return
    assert len(bound_states(square_well(depth, half_width), g)) == expected


def test_spectral_density_free():
    g = SpatialGrid(-20, 20, 2001)
    x = np.array([-1.0, 0.3, 2.5])
    y = np.array([0.5, 0.3, -4.0])
    lam = 2.0
    k = np.sqrt(lam)
    p = spectral_density(zero(), x, y, lam, g)
    np.testing.assert_allclose(p, np.cos(k * (x - y)) / (2 * np.pi * k), atol=1e-10)


def test_spectral_density_symmetric(grid):
    V = gaussian_bump(1.5, 0.7, 0.2)
    x, y = np.array([-2.0, 0.1, 1.7]), np.array([0.9, -3.0, 1.2])
    np.testing.assert_allclose(spectral_density(V, x, y, 1.3, grid), spectral_density(V, y, x, 1.3, grid),
                               atol=1e-10)


def test_spectral_density_against_fd():
    g = SpatialGrid(-60, 60, 6001)
    V = poschl_teller(6)
    H = fd_hamiltonian(V, g)
    eig = fd_eigensolve(H, select=(0.0, 5.0))
    i, j = 3000, 3010
    # the window must cover many box levels (spacing ~ 2 k pi / L)
    lam, width = 1.5, 0.25
    lams = np.linspace(lam - 4 * width, lam + 4 * width, 81)
    w = np.exp(-0.5 * ((lams - lam) / width) ** 2) / (width * np.sqrt(2 * np.pi))
    p = np.array([spectral_density(V, g.x[i], g.x[j], l, g) for l in lams])
    smooth = np.trapezoid(w * p, lams)
    fd = fd_spectral_density(H, i, j, lam, width, eig)
    assert abs(smooth - fd) < 1e-2 * abs(smooth)


def test_spectral_density_rejects(grid):
    with pytest.raises(ValueError):
        spectral_density(zero(), 0.0, 0.0, -1.0, grid)
    with pytest.raises(ExceptionalFrequencyError):
        spectral_density(dirac(1.0), 0.0, 0.0, 1.0, grid, alpha_threshold=10.0)


def test_exceptional_scan():
    g = SpatialGrid(-20, 20, 1024)
    k = np.array([0.5, 1.0, 3.0])
    scan = exceptional_scan(poschl_teller(6), k, g)
    assert scan.flags.sum() == 0 and np.all(scan.condition < 1e3)
    tight = exceptional_scan(poschl_teller(6), k, g, cond_threshold=1.0)
    assert tight.flags.all()
    with pytest.raises(ValueError):
        exceptional_scan(zero(), [0.0], g)


def test_spectrum_container(grid):
    s = spectrum(poschl_teller(6), grid)
    np.testing.assert_allclose(s.eigenvalues, [-4, -1], atol=1e-6)
    assert s.exceptional is None
