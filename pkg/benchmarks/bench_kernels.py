"""Time the numba kernels against their numpy twins on realistic inputs.

Inputs are captured by running a representative library call with the
kernel wrapped in a recorder, so the benchmark sees the same shapes and
dtypes as production code.  Run with

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call (compilation, or loading from the on-disk cache) is
excluded from the timings.
"""

import argparse
import time

import numpy as np

from scatter1d import kernels
from scatter1d.jost import alpha_beta, picard_solve
from scatter1d.lippmann import ls_solve
from scatter1d.oracle import fd_hamiltonian
from scatter1d.potential import default_grid, poschl_teller
from scatter1d.transform import gaussian_packet


def _capture(name, run):
    """Run ``run()`` and return the arguments of the first call to kernel ``name``."""
    numba_fn, numpy_fn = kernels.IMPLEMENTATIONS[name]
    seen = []

    def recorder(impl):
        def wrapped(*args):
            if not seen:
                seen.append(tuple(a.copy() if isinstance(a, np.ndarray) else a for a in args))
            return impl(*args)
        return wrapped

    attrs = (f"_{name}_numba", f"_{name}_numpy")
    saved = [getattr(kernels, a) for a in attrs]
    try:
        for a, impl in zip(attrs, (numba_fn, numpy_fn)):
            setattr(kernels, a, recorder(impl))
        run()
    finally:
        for a, impl in zip(attrs, saved):
            setattr(kernels, a, impl)
    if not seen:
        raise RuntimeError(f"kernel {name} was not called")
    return seen[0]


def _scenarios():
    grid = default_grid()
    V = poschl_teller(6.0)
    k = np.linspace(0.05, 8.0, 512)
    H = fd_hamiltonian(V, grid)
    psi = gaussian_packet(grid, -3.0, 1.0, 1.0).samples
    return {
        "magnus_sweep": ("alpha_beta, 512 frequencies", lambda: alpha_beta(V, k, grid)),
        "backward_recursion": ("Picard iteration at k=1", lambda: picard_solve(V, 1.0, "plus", grid)),
        "nystrom_fill": ("Lippmann-Schwinger matrix at k=1", lambda: ls_solve(V, 1.0, grid)),
        "two_sided_sweep": ("Lippmann-Schwinger residual at k=1", lambda: ls_solve(V, 1.0, grid)),
        "crank_nicolson": (
            "Crank-Nicolson, 200 steps",
            lambda: kernels.crank_nicolson(H.diag, H.off, psi, 1e-3, 200),
        ),
    }


def _time(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _same(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return max(float(np.max(np.abs(np.asarray(x) - np.asarray(y))) / max(1.0, float(np.max(np.abs(y)))))
               for x, y in zip(a, b))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 0
    print(f"{'kernel':<20} {'scenario':<36} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8} {'max diff':>9}")
    for name, (label, run) in _scenarios().items():
        inputs = _capture(name, run)
        numba_fn, numpy_fn = kernels.IMPLEMENTATIONS[name]
        diff = _same(numba_fn(*inputs), numpy_fn(*inputs))  # also warms up numba
        t_np = _time(numpy_fn, inputs, args.repeat)
        t_nb = _time(numba_fn, inputs, args.repeat)
        print(f"{name:<20} {label:<36} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.1f} {diff:9.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
