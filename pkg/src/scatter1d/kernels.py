"""Hot numerical loops.

Every kernel here exists twice: a numba ``@njit`` version and a pure-numpy
version with the same signature.  The public wrappers dispatch on
``USE_NUMBA``, which is true when numba imports and the environment
variable ``SCATTER1D_DISABLE_NUMBA`` is unset (or ``0``/``false``).

Both implementations are always importable so the benchmark and the test
suite can compare them in one process.
"""

import cmath
import math
import os

import numpy as np
from scipy.linalg import solve_banded
from scipy.signal import lfilter

try:  # pragma: no cover - exercised implicitly
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None
_DISABLED = os.environ.get("SCATTER1D_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def _njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def backend():
    """Name of the active backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# Magnus sweep for second-order linear ODEs
# ---------------------------------------------------------------------------
#
# Solves u'' + c u' = (v(x) - shift) u over a program of substeps.  One
# fourth-order Magnus step uses the density at the two Gauss-Legendre points
# of the substep (v1 lower, v2 upper); the 2x2 exponential is closed form.
# Atoms make u' jump by ``jump[b] * u`` at substep boundary b.  With c = 0 the
# transfer matrix is real for real shift, which keeps Wronskians of complex
# conjugate pairs exactly conserved.

_SQRT3_12 = math.sqrt(3.0) / 12.0


def _magnus_sweep_numpy(h, v1, v2, jump, out_idx, n_out, c, shift, u0, du0, backward):
    n_sub = h.shape[0]
    n_z = c.shape[0]
    u = np.empty((n_out, n_z), dtype=np.complex128)
    du = np.empty((n_out, n_z), dtype=np.complex128)
    y0 = u0.astype(np.complex128)
    y1 = du0.astype(np.complex128)
    start = n_sub if backward else 0
    if backward:
        y1 = y1 - jump[start] * y0
    else:
        y1 = y1 + jump[start] * y0
    if out_idx[start] >= 0:
        u[out_idx[start]] = y0
        du[out_idx[start]] = y1
    for step in range(n_sub):
        b = n_sub - 1 - step if backward else step
        H = -h[b] if backward else h[b]
        if backward:
            d = v2[b] - v1[b]
        else:
            d = v1[b] - v2[b]
        wm = 0.5 * (v1[b] + v2[b]) - shift
        s = _SQRT3_12 * H * H
        mu = 0.5 * H * c
        n11 = s * d + mu
        n21 = H * wm - s * c * d
        q = np.sqrt(n11 * n11 + H * n21)
        small = np.abs(q) < 1e-4
        qs = np.where(small, 1.0, q)
        q2 = q * q
        sh = np.where(small, 1.0 + q2 / 6.0 + q2 * q2 / 120.0, np.sinh(qs) / qs)
        ch = np.cosh(q)
        e = np.exp(-mu)
        m11 = e * (ch + sh * n11)
        m12 = e * sh * H
        m21 = e * sh * n21
        m22 = e * (ch - sh * n11)
        y0, y1 = m11 * y0 + m12 * y1, m21 * y0 + m22 * y1
        bnd = b if backward else b + 1
        if backward:
            y1 = y1 - jump[bnd] * y0
        else:
            y1 = y1 + jump[bnd] * y0
        k = out_idx[bnd]
        if k >= 0:
            u[k] = y0
            du[k] = y1
    return u, du


@_njit
def _magnus_sweep_numba(h, v1, v2, jump, out_idx, n_out, c, shift, u0, du0, backward):
    n_sub = h.shape[0]
    n_z = c.shape[0]
    u = np.empty((n_out, n_z), dtype=np.complex128)
    du = np.empty((n_out, n_z), dtype=np.complex128)
    start = n_sub if backward else 0
    for kz in range(n_z):
        cz = c[kz]
        sz = shift[kz]
        y0 = u0[kz]
        y1 = du0[kz]
        if backward:
            y1 -= jump[start] * y0
        else:
            y1 += jump[start] * y0
        if out_idx[start] >= 0:
            u[out_idx[start], kz] = y0
            du[out_idx[start], kz] = y1
        for step in range(n_sub):
            b = n_sub - 1 - step if backward else step
            H = -h[b] if backward else h[b]
            d = v2[b] - v1[b] if backward else v1[b] - v2[b]
            wm = 0.5 * (v1[b] + v2[b]) - sz
            s = _SQRT3_12 * H * H
            mu = 0.5 * H * cz
            n11 = s * d + mu
            n21 = H * wm - s * cz * d
            q = cmath.sqrt(n11 * n11 + H * n21)
            if abs(q) < 1e-4:
                q2 = q * q
                sh = 1.0 + q2 / 6.0 + q2 * q2 / 120.0
            else:
                sh = cmath.sinh(q) / q
            ch = cmath.cosh(q)
            e = cmath.exp(-mu)
            m11 = e * (ch + sh * n11)
            m12 = e * sh * H
            m21 = e * sh * n21
            m22 = e * (ch - sh * n11)
            t0 = m11 * y0 + m12 * y1
            y1 = m21 * y0 + m22 * y1
            y0 = t0
            bnd = b if backward else b + 1
            if backward:
                y1 -= jump[bnd] * y0
            else:
                y1 += jump[bnd] * y0
            k = out_idx[bnd]
            if k >= 0:
                u[k, kz] = y0
                du[k, kz] = y1
    return u, du


def magnus_sweep(h, v1, v2, jump, out_idx, n_out, c, shift, u0, du0, backward):
    """Propagate ``u'' + c u' = (v - shift) u`` over a substep program.

    ``c``, ``shift``, ``u0`` and ``du0`` are per-frequency arrays (broadcast
    to a common length).  Integration runs left-to-right from boundary 0, or
    right-to-left from the last boundary when ``backward``.  Returns
    ``(u, du)`` with shape ``(n_out, n_freq)``; row ``out_idx[b]`` holds the
    state at boundary ``b`` (after any atom jump there, in sweep order).
    """
    c, shift, u0, du0 = (
        np.ascontiguousarray(a, dtype=np.complex128)
        for a in np.broadcast_arrays(
            np.atleast_1d(c), np.atleast_1d(shift), np.atleast_1d(u0), np.atleast_1d(du0)
        )
    )
    h = np.ascontiguousarray(h, dtype=np.float64)
    v1 = np.ascontiguousarray(v1, dtype=np.float64)
    v2 = np.ascontiguousarray(v2, dtype=np.float64)
    jump = np.ascontiguousarray(jump, dtype=np.float64)
    out_idx = np.ascontiguousarray(out_idx, dtype=np.int64)
    fn = _magnus_sweep_numba if USE_NUMBA else _magnus_sweep_numpy
    return fn(h, v1, v2, jump, out_idx, int(n_out), c, shift, u0, du0, bool(backward))


# ---------------------------------------------------------------------------
# First-order recursions  S_i = a_i + rho_i S_{i+1}  (and the forward twin)
# ---------------------------------------------------------------------------


def _backward_recursion_numpy(a, rho):
    out = np.empty_like(a)
    acc = 0j
    for i in range(a.shape[0] - 1, -1, -1):
        acc = a[i] + rho[i] * acc
        out[i] = acc
    return out


@_njit
def _backward_recursion_numba(a, rho):
    out = np.empty_like(a)
    acc = 0j
    for i in range(a.shape[0] - 1, -1, -1):
        acc = a[i] + rho[i] * acc
        out[i] = acc
    return out


def backward_recursion(a, rho):
    """``S_i = a_i + rho_i * S_{i+1}`` with ``S_n = 0``, variable ``rho``."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    rho = np.ascontiguousarray(np.broadcast_to(rho, a.shape), dtype=np.complex128)
    fn = _backward_recursion_numba if USE_NUMBA else _backward_recursion_numpy
    return fn(a, rho)


def _two_sided_sweep_numpy(cl, cr, rho):
    # A_0 = 0, A_{i+1} = rho (A_i + cl_i);  B_{n-1} = 0, B_i = cr_i + rho B_{i+1}
    n = cl.shape[0] + 1
    A = np.zeros(n, dtype=np.complex128)
    B = np.zeros(n, dtype=np.complex128)
    if n > 1:
        A[1:] = lfilter([rho], [1.0, -rho], cl)
        B[:-1] = lfilter([1.0], [1.0, -rho], cr[::-1])[::-1]
    return A, B


@_njit
def _two_sided_sweep_numba(cl, cr, rho):
    n = cl.shape[0] + 1
    A = np.zeros(n, dtype=np.complex128)
    B = np.zeros(n, dtype=np.complex128)
    for i in range(n - 1):
        A[i + 1] = rho * (A[i] + cl[i])
    for i in range(n - 2, -1, -1):
        B[i] = cr[i] + rho * B[i + 1]
    return A, B


def two_sided_sweep(cl, cr, rho):
    """Left and right geometric accumulations used by the Green's-function apply.

    ``cl`` and ``cr`` hold one coefficient per sub-interval (length n-1); the
    returned arrays have one entry per node.  ``|rho| <= 1`` keeps both
    recursions stable.
    """
    cl = np.ascontiguousarray(cl, dtype=np.complex128)
    cr = np.ascontiguousarray(cr, dtype=np.complex128)
    rho = complex(rho)
    fn = _two_sided_sweep_numba if USE_NUMBA else _two_sided_sweep_numpy
    return fn(cl, cr, rho)


# ---------------------------------------------------------------------------
# Dense product-integration matrix for exp(i kappa |x - y|)
# ---------------------------------------------------------------------------


def _nystrom_fill_numpy(n, rho_pow, ql, qr, st):
    # rho_pow[k] = rho**k for k = 0..n
    n_int = n - 1
    W = np.zeros((n, n), dtype=np.complex128)
    i = np.arange(n)[:, None]
    m = np.arange(n_int)[None, :]
    left = m < i  # sub-interval m lies left of node i
    pl = np.where(left, rho_pow[np.abs(i - m)], 0.0)
    pr = np.where(left, 0.0, rho_pow[np.abs(m - i)])
    for d in range(ql.shape[1]):
        contrib = pl * ql[None, :, d] + pr * qr[None, :, d]
        np.add.at(W.T, st + d, contrib.T)
    return W


@_njit
def _nystrom_fill_numba(n, rho_pow, ql, qr, st):
    n_int = n - 1
    deg = ql.shape[1]
    W = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for m in range(n_int):
            if m < i:
                p = rho_pow[i - m]
                for d in range(deg):
                    W[i, st[m] + d] += p * ql[m, d]
            else:
                p = rho_pow[m - i]
                for d in range(deg):
                    W[i, st[m] + d] += p * qr[m, d]
    return W


def nystrom_fill(n, rho_pow, ql, qr, st):
    """Assemble the node-to-node product-integration matrix."""
    rho_pow = np.ascontiguousarray(rho_pow, dtype=np.complex128)
    ql = np.ascontiguousarray(ql, dtype=np.complex128)
    qr = np.ascontiguousarray(qr, dtype=np.complex128)
    st = np.ascontiguousarray(st, dtype=np.int64)
    fn = _nystrom_fill_numba if USE_NUMBA else _nystrom_fill_numpy
    return fn(int(n), rho_pow, ql, qr, st)


# ---------------------------------------------------------------------------
# Crank-Nicolson stepping for a real symmetric tridiagonal hamiltonian
# ---------------------------------------------------------------------------


def _crank_nicolson_numpy(diag, off, psi, dt, steps):
    n = diag.shape[0]
    a = 0.5j * dt
    ab = np.zeros((3, n), dtype=np.complex128)
    ab[0, 1:] = a * off
    ab[1] = 1.0 + a * diag
    ab[2, :-1] = a * off
    psi = psi.astype(np.complex128, copy=True)
    for _ in range(steps):
        rhs = (1.0 - a * diag) * psi
        rhs[:-1] -= a * off * psi[1:]
        rhs[1:] -= a * off * psi[:-1]
        psi = solve_banded((1, 1), ab, rhs, check_finite=False)
    return psi


@_njit
def _crank_nicolson_numba(diag, off, psi, dt, steps):
    n = diag.shape[0]
    a = 0.5j * dt
    # Thomas factorisation of (I + a H), done once.
    cp = np.empty(n - 1, dtype=np.complex128)
    den = np.empty(n, dtype=np.complex128)
    b0 = 1.0 + a * diag[0]
    den[0] = b0
    cp[0] = a * off[0] / b0
    for i in range(1, n):
        den[i] = 1.0 + a * diag[i] - a * off[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = a * off[i] / den[i]
    out = psi.astype(np.complex128)
    rhs = np.empty(n, dtype=np.complex128)
    for _ in range(steps):
        for i in range(n):
            r = (1.0 - a * diag[i]) * out[i]
            if i > 0:
                r -= a * off[i - 1] * out[i - 1]
            if i < n - 1:
                r -= a * off[i] * out[i + 1]
            rhs[i] = r
        rhs[0] = rhs[0] / den[0]
        for i in range(1, n):
            rhs[i] = (rhs[i] - a * off[i - 1] * rhs[i - 1]) / den[i]
        out[n - 1] = rhs[n - 1]
        for i in range(n - 2, -1, -1):
            out[i] = rhs[i] - cp[i] * out[i + 1]
    return out


def crank_nicolson(diag, off, psi, dt, steps):
    """Advance ``psi`` by ``steps`` Crank-Nicolson steps of size ``dt``."""
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off = np.ascontiguousarray(off, dtype=np.float64)
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    fn = _crank_nicolson_numba if USE_NUMBA else _crank_nicolson_numpy
    return fn(diag, off, psi, float(dt), int(steps))


IMPLEMENTATIONS = {
    "magnus_sweep": (_magnus_sweep_numba, _magnus_sweep_numpy),
    "backward_recursion": (_backward_recursion_numba, _backward_recursion_numpy),
    "two_sided_sweep": (_two_sided_sweep_numba, _two_sided_sweep_numpy),
    "nystrom_fill": (_nystrom_fill_numba, _nystrom_fill_numpy),
    "crank_nicolson": (_crank_nicolson_numba, _crank_nicolson_numpy),
}
"""Kernel name -> (numba implementation, numpy implementation)."""
