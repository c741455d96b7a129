import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scatter1d import verify
from scatter1d.errors import UsageError
from scatter1d.oracle import crank_nicolson, fd_energy, fd_hamiltonian
from scatter1d.potential import SpatialGrid, poschl_teller
from scatter1d.propagator import (
    center_of_mass,
    eta_curve,
    evolve,
    evolve_many,
    fraunhofer,
    free_evolve,
    mean_momentum,
    project_ac,
    scatter_profile,
    wave_operator,
    wave_operator_adjoint,
)
from scatter1d.transform import build_basis, frequency_grid, gaussian_packet, p_ac

from conftest import l2

WIDE = SpatialGrid(-100, 100, 8192)


def free_gaussian(x, t, sigma, k0):
    """Closed-form solution of i u_t = -u_xx from exp(-x^2/(4 sigma^2) + i k0 x)."""
    a = 1 + 1j * t / sigma**2
    return np.exp(-((x - 2 * k0 * t) ** 2) / (4 * sigma**2 * a) + 1j * (k0 * x - k0**2 * t)) / np.sqrt(a)


def test_evolve_identity_at_zero(pt_basis, grid):
    f = gaussian_packet(grid, 0.0, 1.0, 1.0)
    r = evolve(pt_basis, f, 0.0)
    assert (r.state - f).norm() <= 1e-3


def test_zero_potential_matches_free(zero_basis, grid):
    f = gaussian_packet(grid, -2.0, 1.0, 2.0)
    for t in (0.5, 2.0):
        a = evolve(zero_basis, f, t).state
        b = free_evolve(f, t)
        assert (a - b).norm() <= 1e-6


def test_free_identity_and_norm():
    f = gaussian_packet(WIDE, 0.0, 1.0, 1.0)
    assert np.array_equal(free_evolve(f, 0.0).samples, f.samples)
    for t in (1.0, 5.0, 20.0):
        assert abs(free_evolve(f, t).norm() - f.norm()) <= 1e-12


@pytest.mark.parametrize("sigma,k0", [(1.0, 1.0), (2.0, -0.5)])
def test_free_closed_form(sigma, k0):
    x = WIDE.x
    f = gaussian_packet(WIDE, 0.0, sigma, k0, normalize=False)
    u = free_evolve(f, 5.0)
    assert np.max(np.abs(u.samples - free_gaussian(x, 5.0, sigma, k0))) <= 1e-8


def test_free_needs_grid():
    with pytest.raises(UsageError):
        free_evolve(np.zeros(8), 1.0)


def test_matches_crank_nicolson(pt_basis, grid):
    f = gaussian_packet(grid, -3.0, 1.0, 1.0)
    u = evolve(pt_basis, f, 1.0).state
    cn = crank_nicolson(fd_hamiltonian(pt_basis.V, grid), f.samples, 1.0)
    assert l2(grid, u.samples - cn) <= 1e-3 * f.norm()


@given(t1=st.floats(-3, 3), t2=st.floats(-3, 3))
def test_group_law(pt_basis, t1, t2):
    f = gaussian_packet(pt_basis.grid, 0.5, 1.0, 1.0)
    a = evolve(pt_basis, evolve(pt_basis, f, t1).state, t2).state
    b = evolve(pt_basis, f, t1 + t2).state
    assert (a - b).norm() <= 2e-3 * f.norm()


def test_norm_and_energy(pt_basis, grid):
    f = gaussian_packet(grid, 1.0, 1.0, 1.0)
    H = fd_hamiltonian(pt_basis.V, grid)
    e0 = fd_energy(H, f.samples)
    for r in evolve_many(pt_basis, f, [0.5, 2.0, 5.0]):
        assert r.norm_drift <= 1e-3
        assert abs(fd_energy(H, r.state.samples) - e0) <= 1e-3 * abs(e0)


def test_bound_state_phase(pt_basis):
    b = pt_basis.bound[0]
    u = evolve(pt_basis, b.eigenfunction, 2.0).state.samples
    np.testing.assert_allclose(u, np.exp(-2j * b.lam) * b.eigenfunction, atol=1e-3)


def test_wave_operator_free(zero_basis, grid):
    f = gaussian_packet(grid, 0.0, 1.0, 1.0)
    # up to the frequency quadrature error
    for side in ("minus", "plus"):
        assert (wave_operator(zero_basis, f, side) - f).norm() <= 1e-4


def test_wave_operator_isometry_and_range(pt_basis, grid):
    f = gaussian_packet(grid, 0.0, 1.0, 0.7)
    for side in ("minus", "plus"):
        W = wave_operator(pt_basis, f, side)
        assert abs(W.norm() - f.norm()) <= 1e-3 * f.norm()
        assert (W - p_ac(pt_basis, W)).norm() <= 1e-6
        back = wave_operator_adjoint(pt_basis, W, side)
        assert (back - f).norm() <= 1e-3 * f.norm()
    with pytest.raises(UsageError):
        wave_operator(pt_basis, f, "left")


def test_intertwining(pt_basis, grid):
    f = gaussian_packet(grid, 0.0, 1.0, 0.7)
    for side in ("minus", "plus"):
        lhs = evolve(pt_basis, wave_operator(pt_basis, f, side), 1.0).state
        rhs = wave_operator(pt_basis, free_evolve(f, 1.0), side)
        assert (lhs - rhs).norm() <= 1e-3 * rhs.norm()


def test_time_limit_consistency():
    # exp(itH) exp(-itH0) f -> Omega_- f as t -> -inf
    g = SpatialGrid(-200, 200, 8001)
    V = poschl_teller(6.0)
    B = build_basis(V, frequency_grid(0.05, 6.0, 512), g, scan_points=0, residual_checks=0)
    H = fd_hamiltonian(V, g)
    f = gaussian_packet(g, 0.0, 2.0, 0.7)
    W = wave_operator(B, f, "minus")
    errs = []
    for t in (-5.0, -10.0, -20.0):
        u = crank_nicolson(H, free_evolve(f, t).samples, -t, dt_max=5e-3)
        errs.append(l2(g, u - W.samples))
    assert errs[0] > errs[1] > errs[2]


def test_project_ac_warns(pt_basis, grid):
    f = gaussian_packet(grid, 0.0, 1.0, 0.0)
    with pytest.warns(UserWarning):
        phi, rel = project_ac(pt_basis, f)
    assert rel > 0.1
    assert abs(phi.inner(pt_basis.bound[0].eigenfunction)) <= 1e-10
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        project_ac(pt_basis, phi)


def test_scatter_profile_free(zero_basis, grid):
    f = gaussian_packet(grid, 0.0, 1.0, 0.5)
    d = scatter_profile(zero_basis, f, [1.0, -1.0])
    assert (d.phi_plus - f).norm() <= 1e-4 and (d.phi_minus - f).norm() <= 1e-4
    assert max(e for _, e in d.error_curve) <= 1e-4
    assert len(list(d.rows())) == 2


def test_scatter_csv(pt_basis, grid, tmp_path):
    f = wave_operator(pt_basis, gaussian_packet(grid, 0.0, 1.0, 1.0), "plus")
    d = scatter_profile(pt_basis, f, [1.0, 2.0])
    p = tmp_path / "s.csv"
    d.write_csv(p, header="# test")
    lines = p.read_text().splitlines()
    assert lines[0] == "# test" and lines[1].startswith("t,") and len(lines) == 4


def test_long_time_center_of_mass():
    phi, d = verify._wide_diagnostics()
    B = verify._wide_basis()
    r40, r50 = evolve_many(B, phi, [40.0, 50.0])
    slope = (center_of_mass(r50.state) - center_of_mass(r40.state)) / 10.0
    p = 2 * mean_momentum(d.phi_plus)
    assert abs(slope - p) <= 0.05 * abs(p)
    assert d.nonincreasing_after(10.0)


def test_fraunhofer_free():
    g = SpatialGrid(-200, 200, 16384)
    f = gaussian_packet(g, 0.0, 0.5, 1.0, normalize=False)
    t = 10.0
    # hat(f)(k) = exp(-(k - 1)^2 / 4) / sqrt(2) for this packet
    far = fraunhofer(lambda k: np.exp(-((k - 1.0) ** 2) / 4) / np.sqrt(2.0), g.x, t)
    u = free_evolve(f, t).samples
    assert l2(g, u - far) <= 0.05 * l2(g, u)
    with pytest.raises(UsageError):
        fraunhofer(lambda k: k, g.x, 0.0)


def test_eta_curve_bounded(pt_basis, grid):
    phi = gaussian_packet(grid, 0.0, 1.0, 1.0)
    for side in ("minus", "plus"):
        k, curve, scale = eta_curve(pt_basis, phi, side)
        assert scale > 0 and np.all(np.isfinite(curve))
        assert np.max(curve) / scale <= 1.0
        # no growth towards large |k|
        assert np.max(curve[np.abs(k) > 6]) <= np.max(curve)
