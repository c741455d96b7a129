import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scatter1d.errors import ConfigurationError, ValidationError
from scatter1d.potential import (
    SpatialGrid,
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


def test_poschl_teller_value_at_origin():
    assert poschl_teller(6).density_values(np.array([0.0]))[0] == pytest.approx(-6.0, abs=1e-14)


def test_poschl_teller_no_overflow_far_out():
    with np.errstate(over="raise"):
        v = poschl_teller(6).density_values(np.array([-800.0, 800.0]))
    assert np.all(v == 0.0)


def test_dirac_atoms():
    assert dirac(1.0).atoms == ((0.0, 2.0),)
    assert dirac(1.0).density is None


def test_zero_is_empty():
    V = zero()
    assert V.is_zero and V.atoms == ()
    assert np.all(V.density_values(np.linspace(-5, 5, 11)) == 0)


def test_norms_zero(grid):
    n = norms(zero(), grid)
    assert (n.l1, n.l2, n.l1_weighted2) == (0.0, 0.0, 0.0)
    assert n.in_L1capL2 and n.in_M2


@pytest.mark.parametrize("g", [SpatialGrid(-10, 10, 64), SpatialGrid(-3, 7, 1000)])
def test_norms_zero_any_grid(g):
    n = norms(zero(), g)
    assert n.l1 == n.l2 == n.l1_weighted2 == 0.0


def test_norms_poschl_teller_l1(grid):
    assert norms(poschl_teller(6), grid).l1 == pytest.approx(12.0, abs=1e-6)


def test_norms_dirac(grid):
    n = norms(dirac(1.0), grid)
    assert n.l1 == pytest.approx(2.0, abs=1e-14)
    assert not n.l2_applicable


@given(c=st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3))
def test_norms_scale_linearly(c):
    g = SpatialGrid(-20, 20, 512)
    V = gaussian_bump(1.3, 0.8, 0.4)
    assert norms(V.scaled(c), g).l1 == pytest.approx(abs(c) * norms(V, g).l1, rel=1e-12)


@pytest.mark.parametrize("V", [poschl_teller(6), square_well(2, 1.5), gaussian_bump(1, 1, 0), zero()])
def test_even_builtins_are_symmetric(V, grid):
    x = grid.x
    np.testing.assert_array_equal(V.density_values(x), V.density_values(-x))


def test_square_well_breakpoints():
    V = square_well(2.0, 1.5)
    assert V.breakpoints == (-1.5, 1.5)
    assert V.density_values(np.array([0.0, 2.0]))[0] == -2.0


def test_unknown_name():
    with pytest.raises(ConfigurationError):
        make_builtin("morse", [1.0])


def test_non_finite_params():
    with pytest.raises(ValidationError):
        make_builtin("poschl_teller", [np.nan])


def test_atom_outside_grid():
    with pytest.raises(ValidationError):
        make_builtin("dirac", [1.0, 100.0], SpatialGrid(-10, 10, 64))
    with pytest.raises(ValidationError):
        norms(dirac(1.0, 50.0), SpatialGrid(-10, 10, 64))


def test_grid_validation():
    with pytest.raises(ValidationError):
        SpatialGrid(1, 0, 100)
    with pytest.raises(ValidationError):
        SpatialGrid(0, 1, 8)
    g = SpatialGrid(-1, 1, 21)
    assert g.spacing == pytest.approx(0.1)
    assert g.weights.sum() == pytest.approx(2.0)


def test_from_spec_forms():
    V = from_spec({"name": "dirac", "params": [0.5]})
    assert V.atoms == ((0.0, 1.0),)
    W = from_spec({"samples": {"x": [-1, 0, 1], "v": [0, -1, 0]}, "atoms": [[0.5, 2.0]]})
    assert W.density_values(np.array([0.0, 5.0])).tolist() == [-1.0, 0.0]
    assert W.atoms == ((0.5, 2.0),)
    P = from_spec({"name": "poschl_teller", "params": [2], "atoms": [[1, 1]]})
    assert P.atoms == ((1.0, 1.0),) and P.density_values(np.array([0.0]))[0] == -2.0


@pytest.mark.parametrize(
    "spec",
    [
        {"name": "nope"},
        {"name": "dirac", "samples": {"x": [0, 1], "v": [0, 0]}},
        {"samples": [1, 2]},
        {"name": "dirac", "colour": 1},
        {"name": "dirac", "atoms": [[1]]},
        "dirac",
    ],
)
def test_from_spec_rejects(spec):
    with pytest.raises(ConfigurationError):
        from_spec(spec)


def test_from_samples_validation():
    with pytest.raises(ValidationError):
        from_samples([0, 0, 1], [1, 2, 3])
    with pytest.raises(ValidationError):
        from_samples([0, 1], [1, np.inf])


def test_random_bumps_seeded():
    x = np.linspace(-5, 5, 50)
    np.testing.assert_array_equal(random_bumps(4).density_values(x), random_bumps(4).density_values(x))
    assert not np.array_equal(random_bumps(4).density_values(x), random_bumps(5).density_values(x))
