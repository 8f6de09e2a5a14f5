"""NumPy reference implementations of the dense Hermitian kernels.

This backend is selected when the compiled extension is unavailable (or when
``ULAP_BACKEND=python``).  It implements the same contract as the compiled
module: Householder reduction of a complex Hermitian matrix to real symmetric
tridiagonal form, eigenvalues of the tridiagonal matrix, selected eigenvectors
by inverse iteration with cluster re-orthogonalization, and unblocked
Cholesky / triangular substitution.

The tridiagonal eigenvalues here are computed by bisection on Sturm-sequence
counts, which vectorizes well in NumPy; the compiled backend uses the
implicit-shift QL iteration instead.  Both are backward stable and are
cross-checked against each other in the test suite.

Everything is deterministic: fixed iteration orders, a fixed LCG for inverse
iteration start vectors, no threading.
"""

import numpy as np

from ..errors import ConvergenceFailure, NotPositiveDefinite

_EPS = float(np.finfo(np.float64).eps)
_TINY = float(np.finfo(np.float64).tiny)

NAME = "python"


# ---------------------------------------------------------------------------
# Householder reduction to tridiagonal form
# ---------------------------------------------------------------------------

def tridiag_reduce(a):
    """Reduce a Hermitian matrix to real symmetric tridiagonal form.

    Returns ``(d, e, href, tau)`` where ``d`` (n) and ``e`` (n-1) are the real
    diagonal and subdiagonal of ``T = Q^H A Q`` and the Householder vectors
    defining ``Q = H_0 H_1 ... H_{n-2}`` are stored below the first
    subdiagonal of ``href`` with ``tau`` their scalar factors
    (``H_k = I - tau_k v_k v_k^H``, ``v_k[0] = 1``).
    """
    a = np.array(a, dtype=np.complex128, order="C")
    n = a.shape[0]
    d = np.empty(n)
    e = np.empty(max(n - 1, 0))
    tau = np.zeros(max(n - 1, 0), dtype=np.complex128)
    for k in range(n - 1):
        alpha = a[k + 1, k]
        xtail = a[k + 2 :, k]
        xnorm = float(np.linalg.norm(xtail))
        if xnorm == 0.0 and alpha.imag == 0.0:
            tau[k] = 0.0
            e[k] = alpha.real
            continue
        beta = -np.copysign(np.hypot(abs(alpha), xnorm), alpha.real)
        tk = (beta - alpha) / beta
        scale = 1.0 / (alpha - beta)
        a[k + 2 :, k] = xtail * scale
        tau[k] = tk
        e[k] = beta
        # apply H on both sides of the trailing block
        v = np.empty(n - k - 1, dtype=np.complex128)
        v[0] = 1.0
        v[1:] = a[k + 2 :, k]
        sub = a[k + 1 :, k + 1 :]
        p = tk * (sub @ v)
        p -= (0.5 * tk * np.vdot(p, v)) * v
        sub -= np.outer(v, p.conj())
        sub -= np.outer(p, v.conj())
    d[:] = a.diagonal().real
    return d, e, a, tau


def apply_reflectors(href, tau, x):
    """Return ``Q @ x`` for the reflectors stored by :func:`tridiag_reduce`."""
    n = href.shape[0]
    x = np.array(x, dtype=np.complex128, order="C")
    if x.ndim == 1:
        x = x[:, None]
        squeeze = True
    else:
        squeeze = False
    for k in range(n - 2, -1, -1):
        if tau[k] == 0.0:
            continue
        v = np.empty(n - k - 1, dtype=np.complex128)
        v[0] = 1.0
        v[1:] = href[k + 2 :, k]
        block = x[k + 1 :, :]
        block -= np.outer(tau[k] * v, v.conj() @ block)
    return x[:, 0] if squeeze else x


def accumulate_q(href, tau):
    """Assemble the full unitary Q from stored reflectors."""
    n = href.shape[0]
    return apply_reflectors(href, tau, np.eye(n, dtype=np.complex128))


# ---------------------------------------------------------------------------
# Tridiagonal eigenvalues: bisection on Sturm counts
# ---------------------------------------------------------------------------

def _sturm_counts(d, e2, shifts, pivmin):
    """Number of eigenvalues of T strictly below each shift."""
    q = d[0] - shifts
    np.copyto(q, -pivmin, where=np.abs(q) < pivmin)
    count = (q < 0.0).astype(np.int64)
    for i in range(1, d.size):
        q = d[i] - shifts - e2[i - 1] / q
        np.copyto(q, -pivmin, where=np.abs(q) < pivmin)
        count += q < 0.0
    return count


def eigvals_tridiag(d, e):
    """All eigenvalues of the real symmetric tridiagonal (d, e), ascending."""
    d = np.asarray(d, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    n = d.size
    if n == 1:
        return d.copy()
    e2 = e * e
    radius = np.zeros(n)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    pad = _EPS * max(abs(lo), abs(hi), 1.0)
    lo -= pad
    hi += pad
    pivmin = _TINY * max(float(e2.max()) if n > 1 else 1.0, 1.0)
    los = np.full(n, lo)
    his = np.full(n, hi)
    need = np.arange(1, n + 1)
    for _ in range(90):
        mid = 0.5 * (los + his)
        cnt = _sturm_counts(d, e2, mid, pivmin)
        above = cnt >= need
        his = np.where(above, mid, his)
        los = np.where(above, los, mid)
        width = his - los
        if float(width.max()) <= 2.0 * _EPS * max(abs(lo), abs(hi)):
            break
    return 0.5 * (los + his)


# ---------------------------------------------------------------------------
# Selected tridiagonal eigenvectors: inverse iteration
# ---------------------------------------------------------------------------

def _lcg_vector(n, salt):
    """Deterministic pseudo-random start vector in [-1, 1)."""
    out = np.empty(n)
    state = 0x9E3779B97F4A7C15 ^ ((salt * 0xBF58476D1CE4E5B9 + 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF)
    for i in range(n):
        state = (6364136223846793005 * state + 1442695040888963407) & 0xFFFFFFFFFFFFFFFF
        out[i] = (state >> 11) / 9007199254740992.0 * 2.0 - 1.0
    return out


def _tridiag_factor(d, e, w):
    """LU factorization with partial pivoting of T - w*I (dgttrf layout)."""
    n = d.size
    dl = np.concatenate([e, [0.0]]).astype(np.float64)
    dd = (d - w).astype(np.float64)
    du = np.concatenate([e, [0.0]]).astype(np.float64)
    du2 = np.zeros(max(n - 2, 0))
    piv = np.zeros(n, dtype=np.int64)
    for i in range(n - 1):
        if abs(dd[i]) >= abs(dl[i]):
            piv[i] = 0
            if dd[i] == 0.0:
                dd[i] = _TINY
            fact = dl[i] / dd[i]
            dl[i] = fact
            dd[i + 1] -= fact * du[i]
        else:
            piv[i] = 1
            fact = dd[i] / dl[i]
            dd[i] = dl[i]
            dl[i] = fact
            tmp = du[i]
            du[i] = dd[i + 1]
            dd[i + 1] = tmp - fact * dd[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
    if dd[n - 1] == 0.0:
        dd[n - 1] = _TINY
    return dl, dd, du, du2, piv


def _tridiag_solve(factors, b):
    dl, dd, du, du2, piv = factors
    n = dd.size
    x = b.copy()
    for i in range(n - 1):
        if piv[i] == 0:
            x[i + 1] -= dl[i] * x[i]
        else:
            tmp = x[i]
            x[i] = x[i + 1]
            x[i + 1] = tmp - dl[i] * x[i]
    x[n - 1] /= dd[n - 1]
    if n > 1:
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i]
    return x


def eigvecs_tridiag(d, e, w):
    """Eigenvectors of (d, e) for the selected eigenvalues ``w`` (ascending).

    Inverse iteration with Gram-Schmidt re-orthogonalization inside clusters
    of close eigenvalues, following the classic LAPACK ``stein`` strategy.
    """
    d = np.asarray(d, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n = d.size
    k = w.size
    y = np.zeros((n, k))
    if n == 1:
        y[:] = 1.0
        return y
    tnorm = max(float(np.max(np.abs(d))), float(np.max(np.abs(e))), _TINY)
    ortho_gap = 1e-3 * tnorm
    sep = 2.0 * _EPS * tnorm
    cluster_start = 0
    w_used = np.empty(k)
    for j in range(k):
        wj = w[j]
        if j > 0:
            if wj - w[j - 1] > ortho_gap:
                cluster_start = j
            if wj <= w_used[j - 1] + sep:
                wj = w_used[j - 1] + sep
        w_used[j] = wj
        factors = _tridiag_factor(d, e, wj)
        x = _lcg_vector(n, j + 1)
        x /= np.linalg.norm(x)
        ok = False
        for _ in range(10):
            x = _tridiag_solve(factors, x)
            for m in range(cluster_start, j):
                x -= (y[:, m] @ x) * y[:, m]
            nrm = np.linalg.norm(x)
            if nrm == 0.0:
                x = _lcg_vector(n, 7 * (j + 3))
                nrm = np.linalg.norm(x)
            x /= nrm
            resid = (d - wj) * x
            resid[:-1] += e * x[1:]
            resid[1:] += e * x[:-1]
            if float(np.max(np.abs(resid))) <= 500.0 * _EPS * tnorm + 10.0 * sep:
                ok = True
                break
        if not ok:
            raise ConvergenceFailure(
                f"inverse iteration stalled for eigenvalue index {j}"
            )
        y[:, j] = x
    return y


def eigh_tridiag_full(d, e, z0):
    """Full eigensystem of (d, e); vectors returned in the basis ``z0``."""
    w = eigvals_tridiag(d, e)
    y = eigvecs_tridiag(d, e, w)
    return w, np.asarray(z0, dtype=np.complex128) @ y


# ---------------------------------------------------------------------------
# Cholesky and triangular substitution
# ---------------------------------------------------------------------------

def cholesky_lower(b):
    """Lower Cholesky factor of a Hermitian positive definite matrix."""
    a = np.array(b, dtype=np.complex128, order="C")
    n = a.shape[0]
    for j in range(n):
        pivot = a[j, j].real - float(np.vdot(a[j, :j], a[j, :j]).real)
        if pivot <= 0.0 or not np.isfinite(pivot):
            raise NotPositiveDefinite(f"pivot {pivot!r} at column {j}")
        pivot = np.sqrt(pivot)
        a[j, j] = pivot
        if j + 1 < n:
            a[j + 1 :, j] = (a[j + 1 :, j] - a[j + 1 :, :j] @ a[j, :j].conj()) / pivot
    return np.tril(a)


def solve_lower(l, b):
    """Solve ``L x = b`` (forward substitution); b may be a matrix."""
    b = np.array(b, dtype=np.complex128, order="C")
    squeeze = b.ndim == 1
    if squeeze:
        b = b[:, None]
    n = l.shape[0]
    for i in range(n):
        if i:
            b[i, :] -= l[i, :i] @ b[:i, :]
        b[i, :] /= l[i, i]
    return b[:, 0] if squeeze else b


def solve_lower_ct(l, b):
    """Solve ``L^H x = b`` (backward substitution); b may be a matrix."""
    b = np.array(b, dtype=np.complex128, order="C")
    squeeze = b.ndim == 1
    if squeeze:
        b = b[:, None]
    n = l.shape[0]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            b[i, :] -= l[i + 1 :, i].conj() @ b[i + 1 :, :]
        b[i, :] /= l[i, i].conj()
    return b[:, 0] if squeeze else b
