import os
import subprocess
import sys

import numpy as np
import pytest

from scatter1d import kernels
from scatter1d.jost import alpha_beta, jost_solve, picard_solve
from scatter1d.lippmann import ls_solve
from scatter1d.oracle import crank_nicolson, fd_hamiltonian
from scatter1d.potential import Potential, SpatialGrid, poschl_teller
from scatter1d.transform import gaussian_packet

G = SpatialGrid(-15, 15, 600)
V = Potential(density=lambda x: -2.0 * np.exp(-((x - 0.3) ** 2) / 0.8**2), atoms=((1.0, 1.0),), label="mixed")


def _calls(monkeypatch, name, run):
    """Arguments of every call to kernel ``name`` made by ``run``."""
    seen = []
    for attr in (f"_{name}_numba", f"_{name}_numpy"):
        impl = getattr(kernels, attr)

        def wrapped(*args, _impl=impl):
            seen.append(tuple(a.copy() if isinstance(a, np.ndarray) else a for a in args))
            return _impl(*args)

        monkeypatch.setattr(kernels, attr, wrapped)
    run()
    monkeypatch.undo()
    assert seen, f"{name} was not called"
    return seen


SCENARIOS = {
    "magnus_sweep": lambda: (alpha_beta(V, np.array([0.3, 2.0, 1 + 0.5j]), G), jost_solve(V, 1.0, "minus", G)),
    "backward_recursion": lambda: picard_solve(poschl_teller(2.0), 1.5, "plus", G),
    "two_sided_sweep": lambda: ls_solve(V, 1.3, G),
    "nystrom_fill": lambda: ls_solve(V, 1.3, G),
    "crank_nicolson": lambda: crank_nicolson(fd_hamiltonian(V, G), gaussian_packet(G, 0, 1, 1).samples, 0.05),
}


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("name", sorted(kernels.IMPLEMENTATIONS))
def test_numba_matches_numpy(name, monkeypatch):
    fast, slow = kernels.IMPLEMENTATIONS[name]
    for args in _calls(monkeypatch, name, SCENARIOS[name])[:3]:
        a = fast(*[x.copy() if isinstance(x, np.ndarray) else x for x in args])
        b = slow(*[x.copy() if isinstance(x, np.ndarray) else x for x in args])
        for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
            scale = max(1.0, float(np.max(np.abs(y))))
            assert np.max(np.abs(np.asarray(x) - np.asarray(y))) <= 1e-12 * scale


def test_backward_recursion_small():
    a = np.array([1.0, 2.0, 3.0], dtype=complex)
    rho = np.array([0.5, 0.5, 0.5], dtype=complex)
    # S_2 = 3, S_1 = 2 + 1.5, S_0 = 1 + 0.5 * 3.5
    np.testing.assert_allclose(kernels.backward_recursion(a, rho), [2.75, 3.5, 3.0])


def test_backend_reported():
    assert kernels.backend() in ("numba", "numpy")
    assert kernels.USE_NUMBA == (kernels.backend() == "numba")


def test_disable_switch():
    env = dict(os.environ, SCATTER1D_DISABLE_NUMBA="1")
    code = (
        "from scatter1d import kernels; from scatter1d.potential import *; from scatter1d.jost import alpha_beta;"
        "import numpy as np; print(kernels.backend());"
        "print(abs(alpha_beta(poschl_teller(6), np.array([1.0]), default_grid())[0][0] - (-1-3j)/(-1+3j)) < 1e-8)"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]
