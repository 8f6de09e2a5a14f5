# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled kernels for the dense Hermitian eigenproblem pipeline.

Householder reduction to real symmetric tridiagonal form, implicit-shift QL
iteration for the tridiagonal eigenvalues (with optional accumulation of the
transformations for full eigensystems), inverse iteration for selected
eigenvectors, and unblocked Cholesky / triangular substitution.  The NumPy
module ``_pyref`` implements the same contract and is used as a fallback.
"""

import numpy as np

from ..errors import ConvergenceFailure, NotPositiveDefinite

from libc.math cimport sqrt, fabs, hypot, copysign

NAME = "compiled"

cdef double EPS = 2.220446049250313e-16
cdef double TINY = 2.2250738585072014e-308


cdef inline double complex _conj(double complex z):
    return z.real - 1j * z.imag


# ---------------------------------------------------------------------------
# Householder reduction
# ---------------------------------------------------------------------------

def tridiag_reduce(a_in):
    """Reduce a Hermitian matrix to real symmetric tridiagonal form.

    Returns ``(d, e, href, tau)`` where ``d`` (n) and ``e`` (n-1) are the real
    diagonal and subdiagonal of ``T = Q^H A Q`` and the Householder vectors
    defining ``Q = H_0 H_1 ... H_{n-2}`` are stored below the first
    subdiagonal of ``href`` with ``tau`` their scalar factors
    (``H_k = I - tau_k v_k v_k^H``, ``v_k[0] = 1``).
    """
    a_arr = np.array(a_in, dtype=np.complex128, order="C")
    cdef double complex[:, ::1] a = a_arr
    cdef Py_ssize_t n = a_arr.shape[0]
    d_arr = np.empty(n)
    e_arr = np.empty(max(n - 1, 0))
    tau_arr = np.zeros(max(n - 1, 0), dtype=np.complex128)
    v_arr = np.zeros(n, dtype=np.complex128)
    p_arr = np.zeros(n, dtype=np.complex128)
    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef double complex[::1] tau = tau_arr
    cdef double complex[::1] v = v_arr
    cdef double complex[::1] p = p_arr
    cdef Py_ssize_t k, i, j, m
    cdef double xnorm, beta, are, aim
    cdef double complex alpha, tk, scale, acc, vi, pi

    for k in range(n - 1):
        m = k + 1
        alpha = a[m, k]
        xnorm = 0.0
        for i in range(k + 2, n):
            are = a[i, k].real
            aim = a[i, k].imag
            xnorm += are * are + aim * aim
        xnorm = sqrt(xnorm)
        if xnorm == 0.0 and alpha.imag == 0.0:
            tau[k] = 0.0
            e[k] = alpha.real
            continue
        beta = -copysign(hypot(abs(alpha), xnorm), alpha.real)
        tk = (beta - alpha) / beta
        scale = 1.0 / (alpha - beta)
        v[m] = 1.0
        for i in range(k + 2, n):
            v[i] = a[i, k] * scale
            a[i, k] = v[i]
        tau[k] = tk
        e[k] = beta
        # p = tk * A[m:, m:] @ v
        for i in range(m, n):
            acc = 0.0
            for j in range(m, n):
                acc = acc + a[i, j] * v[j]
            p[i] = tk * acc
        # p <- p - (tk/2) (p^H v) v
        acc = 0.0
        for j in range(m, n):
            acc = acc + _conj(p[j]) * v[j]
        acc = 0.5 * tk * acc
        for i in range(m, n):
            p[i] = p[i] - acc * v[i]
        # A[m:, m:] -= v p^H + p v^H
        for i in range(m, n):
            vi = v[i]
            pi = p[i]
            for j in range(m, n):
                a[i, j] = a[i, j] - vi * _conj(p[j]) - pi * _conj(v[j])
    for i in range(n):
        d[i] = a[i, i].real
    return d_arr, e_arr, a_arr, tau_arr


def apply_reflectors(href, tau, x_in):
    """Return ``Q @ x`` for the reflectors stored by :func:`tridiag_reduce`."""
    cdef double complex[:, ::1] h = np.ascontiguousarray(href, dtype=np.complex128)
    cdef double complex[::1] tau_v = np.ascontiguousarray(tau, dtype=np.complex128)
    x_arr = np.array(x_in, dtype=np.complex128, order="C")
    squeeze = x_arr.ndim == 1
    if squeeze:
        x_arr = np.ascontiguousarray(x_arr[:, None])
    cdef double complex[:, ::1] x = x_arr
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t ncol = x.shape[1]
    cdef Py_ssize_t k, i, c
    cdef double complex acc, tk
    for k in range(n - 2, -1, -1):
        tk = tau_v[k]
        if tk == 0.0:
            continue
        for c in range(ncol):
            acc = x[k + 1, c]
            for i in range(k + 2, n):
                acc = acc + _conj(h[i, k]) * x[i, c]
            acc = tk * acc
            x[k + 1, c] = x[k + 1, c] - acc
            for i in range(k + 2, n):
                x[i, c] = x[i, c] - h[i, k] * acc
    return x_arr[:, 0] if squeeze else x_arr


def accumulate_q(href, tau):
    """Assemble the full unitary Q from stored reflectors."""
    n = href.shape[0]
    return apply_reflectors(href, tau, np.eye(n, dtype=np.complex128))


# ---------------------------------------------------------------------------
# Implicit-shift QL iteration
# ---------------------------------------------------------------------------

cdef int _tql(double[::1] d, double[::1] ee, double complex[:, ::1] z,
              bint want_z, Py_ssize_t n, Py_ssize_t maxiter_per_eig) except -1:
    """EISPACK-style implicit-shift QL sweeps on (d, ee); plane rotations are
    applied to the columns of ``z`` when requested.  ``ee`` has length n with
    the last slot used as scratch."""
    cdef Py_ssize_t l, m, i, k, it
    cdef bint interrupted
    cdef double dd, g, r, s, c, p, f, b
    cdef double complex zki, zki1
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(ee[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > maxiter_per_eig:
                raise ConvergenceFailure(
                    f"QL iteration exceeded {maxiter_per_eig} sweeps at index {l}"
                )
            g = (d[l + 1] - d[l]) / (2.0 * ee[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + ee[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            interrupted = False
            for i in range(m - 1, l - 1, -1):
                f = s * ee[i]
                b = c * ee[i]
                r = hypot(f, g)
                ee[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    ee[m] = 0.0
                    interrupted = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_z:
                    for k in range(n):
                        zki = z[k, i]
                        zki1 = z[k, i + 1]
                        z[k, i + 1] = s * zki + c * zki1
                        z[k, i] = c * zki - s * zki1
            if not interrupted:
                d[l] -= p
                ee[l] = g
                ee[m] = 0.0
    return 0


def eigvals_tridiag(d_in, e_in):
    """All eigenvalues of the real symmetric tridiagonal (d, e), ascending."""
    d_arr = np.array(d_in, dtype=np.float64)
    cdef Py_ssize_t n = d_arr.shape[0]
    ee_arr = np.zeros(n)
    if n > 1:
        ee_arr[: n - 1] = np.asarray(e_in, dtype=np.float64)
    cdef double[::1] d = d_arr
    cdef double[::1] ee = ee_arr
    cdef double complex[:, ::1] z = np.zeros((1, 1), dtype=np.complex128)
    _tql(d, ee, z, False, n, 50)
    d_arr.sort()
    return d_arr


def eigh_tridiag_full(d_in, e_in, z0):
    """Full eigensystem of (d, e); vectors returned in the basis ``z0``."""
    d_arr = np.array(d_in, dtype=np.float64)
    cdef Py_ssize_t n = d_arr.shape[0]
    ee_arr = np.zeros(n)
    if n > 1:
        ee_arr[: n - 1] = np.asarray(e_in, dtype=np.float64)
    z_arr = np.array(z0, dtype=np.complex128, order="C")
    cdef double[::1] d = d_arr
    cdef double[::1] ee = ee_arr
    cdef double complex[:, ::1] z = z_arr
    _tql(d, ee, z, True, n, 50)
    order = np.argsort(d_arr, kind="stable")
    return d_arr[order], z_arr[:, order]


# ---------------------------------------------------------------------------
# Inverse iteration for selected eigenvectors
# ---------------------------------------------------------------------------

def eigvecs_tridiag(d_in, e_in, w_in):
    """Eigenvectors of (d, e) for the selected eigenvalues ``w`` (ascending).

    Inverse iteration with Gram-Schmidt re-orthogonalization inside clusters
    of close eigenvalues, following the classic LAPACK ``stein`` strategy.
    """
    d_arr = np.asarray(d_in, dtype=np.float64)
    e_arr = np.asarray(e_in, dtype=np.float64)
    w_arr = np.asarray(w_in, dtype=np.float64)
    cdef Py_ssize_t n = d_arr.shape[0]
    cdef Py_ssize_t nsel = w_arr.shape[0]
    y_arr = np.zeros((n, nsel))
    if n == 1:
        y_arr[:] = 1.0
        return y_arr
    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef double[::1] w = w_arr
    cdef double[:, ::1] y = y_arr

    dl_arr = np.zeros(n)
    dd_arr = np.zeros(n)
    du_arr = np.zeros(n)
    du2_arr = np.zeros(max(n - 2, 1))
    piv_arr = np.zeros(n, dtype=np.int64)
    x_arr = np.zeros(n)
    cdef double[::1] dl = dl_arr
    cdef double[::1] ddv = dd_arr
    cdef double[::1] du = du_arr
    cdef double[::1] du2 = du2_arr
    cdef long[::1] piv = piv_arr
    cdef double[::1] x = x_arr

    cdef double tnorm = TINY
    cdef Py_ssize_t i, j, m, it
    for i in range(n):
        if fabs(d[i]) > tnorm:
            tnorm = fabs(d[i])
    for i in range(n - 1):
        if fabs(e[i]) > tnorm:
            tnorm = fabs(e[i])
    cdef double ortho_gap = 1e-3 * tnorm
    cdef double sep = 2.0 * EPS * tnorm
    cdef double rtol = 500.0 * EPS * tnorm + 10.0 * sep
    cdef Py_ssize_t cluster_start = 0
    cdef double wj, fact, tmp, nrm, dot, resid, rmax
    cdef double wprev = 0.0
    cdef unsigned long long state
    cdef bint ok

    for j in range(nsel):
        wj = w[j]
        if j > 0:
            if w[j] - w[j - 1] > ortho_gap:
                cluster_start = j
            if wj <= wprev + sep:
                wj = wprev + sep
        wprev = wj
        # factor T - wj I  (partial pivoting, gttrf layout)
        for i in range(n - 1):
            dl[i] = e[i]
            du[i] = e[i]
        dl[n - 1] = 0.0
        du[n - 1] = 0.0
        for i in range(n):
            ddv[i] = d[i] - wj
        for i in range(du2.shape[0]):
            du2[i] = 0.0
        for i in range(n - 1):
            if fabs(ddv[i]) >= fabs(dl[i]):
                piv[i] = 0
                if ddv[i] == 0.0:
                    ddv[i] = TINY
                fact = dl[i] / ddv[i]
                dl[i] = fact
                ddv[i + 1] -= fact * du[i]
            else:
                piv[i] = 1
                fact = ddv[i] / dl[i]
                ddv[i] = dl[i]
                dl[i] = fact
                tmp = du[i]
                du[i] = ddv[i + 1]
                ddv[i + 1] = tmp - fact * ddv[i + 1]
                if i < n - 2:
                    du2[i] = du[i + 1]
                    du[i + 1] = -fact * du[i + 1]
        if ddv[n - 1] == 0.0:
            ddv[n - 1] = TINY
        # deterministic start vector
        state = 0x9E3779B97F4A7C15ULL ^ (
            (<unsigned long long> (j + 1)) * 0xBF58476D1CE4E5B9ULL
            + 0x94D049BB133111EBULL
        )
        nrm = 0.0
        for i in range(n):
            state = 6364136223846793005ULL * state + 1442695040888963407ULL
            x[i] = (<double> (state >> 11)) / 9007199254740992.0 * 2.0 - 1.0
            nrm += x[i] * x[i]
        nrm = sqrt(nrm)
        for i in range(n):
            x[i] /= nrm
        ok = False
        for it in range(10):
            # solve (T - wj I) y = x in place
            for i in range(n - 1):
                if piv[i] == 0:
                    x[i + 1] -= dl[i] * x[i]
                else:
                    tmp = x[i]
                    x[i] = x[i + 1]
                    x[i + 1] = tmp - dl[i] * x[i]
            x[n - 1] /= ddv[n - 1]
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / ddv[n - 2]
            for i in range(n - 3, -1, -1):
                x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / ddv[i]
            # orthogonalize inside the cluster
            for m in range(cluster_start, j):
                dot = 0.0
                for i in range(n):
                    dot += y[i, m] * x[i]
                for i in range(n):
                    x[i] -= dot * y[i, m]
            nrm = 0.0
            for i in range(n):
                nrm += x[i] * x[i]
            nrm = sqrt(nrm)
            if nrm == 0.0:
                state = 0x94D049BB133111EBULL ^ (<unsigned long long> (7 * (j + 3)))
                nrm = 0.0
                for i in range(n):
                    state = 6364136223846793005ULL * state + 1442695040888963407ULL
                    x[i] = (<double> (state >> 11)) / 9007199254740992.0 * 2.0 - 1.0
                    nrm += x[i] * x[i]
                nrm = sqrt(nrm)
            for i in range(n):
                x[i] /= nrm
            rmax = 0.0
            for i in range(n):
                resid = d[i] * x[i] - wj * x[i]
                if i > 0:
                    resid += e[i - 1] * x[i - 1]
                if i < n - 1:
                    resid += e[i] * x[i + 1]
                if fabs(resid) > rmax:
                    rmax = fabs(resid)
            if rmax <= rtol:
                ok = True
                break
        if not ok:
            raise ConvergenceFailure(
                f"inverse iteration stalled for eigenvalue index {j}"
            )
        for i in range(n):
            y[i, j] = x[i]
    return y_arr


# ---------------------------------------------------------------------------
# Cholesky and triangular substitution
# ---------------------------------------------------------------------------

def cholesky_lower(b_in):
    """Lower Cholesky factor of a Hermitian positive definite matrix."""
    a_arr = np.array(b_in, dtype=np.complex128, order="C")
    cdef double complex[:, ::1] a = a_arr
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef Py_ssize_t i, j, m
    cdef double pivot
    cdef double complex acc
    for j in range(n):
        pivot = a[j, j].real
        for m in range(j):
            pivot -= a[j, m].real * a[j, m].real + a[j, m].imag * a[j, m].imag
        if pivot <= 0.0 or pivot != pivot:
            raise NotPositiveDefinite(f"pivot {pivot!r} at column {j}")
        pivot = sqrt(pivot)
        a[j, j] = pivot
        for i in range(j + 1, n):
            acc = a[i, j]
            for m in range(j):
                acc = acc - a[i, m] * _conj(a[j, m])
            a[i, j] = acc / pivot
    for i in range(n):
        for j in range(i + 1, n):
            a[i, j] = 0.0
    return a_arr


def solve_lower(l_in, b_in):
    """Solve ``L x = b`` by forward substitution; b may be a matrix."""
    cdef double complex[:, ::1] l = np.ascontiguousarray(l_in, dtype=np.complex128)
    b_arr = np.array(b_in, dtype=np.complex128, order="C")
    squeeze = b_arr.ndim == 1
    if squeeze:
        b_arr = np.ascontiguousarray(b_arr[:, None])
    cdef double complex[:, ::1] b = b_arr
    cdef Py_ssize_t n = l.shape[0]
    cdef Py_ssize_t ncol = b.shape[1]
    cdef Py_ssize_t i, c, m
    cdef double complex coef
    for i in range(n):
        for m in range(i):
            coef = l[i, m]
            for c in range(ncol):
                b[i, c] = b[i, c] - coef * b[m, c]
        coef = l[i, i]
        for c in range(ncol):
            b[i, c] = b[i, c] / coef
    return b_arr[:, 0] if squeeze else b_arr


def solve_lower_ct(l_in, b_in):
    """Solve ``L^H x = b`` by backward substitution; b may be a matrix."""
    cdef double complex[:, ::1] l = np.ascontiguousarray(l_in, dtype=np.complex128)
    b_arr = np.array(b_in, dtype=np.complex128, order="C")
    squeeze = b_arr.ndim == 1
    if squeeze:
        b_arr = np.ascontiguousarray(b_arr[:, None])
    cdef double complex[:, ::1] b = b_arr
    cdef Py_ssize_t n = l.shape[0]
    cdef Py_ssize_t ncol = b.shape[1]
    cdef Py_ssize_t i, c, m
    cdef double complex coef
    for i in range(n - 1, -1, -1):
        for m in range(i + 1, n):
            coef = _conj(l[m, i])
            for c in range(ncol):
                b[i, c] = b[i, c] - coef * b[m, c]
        coef = _conj(l[i, i])
        for c in range(ncol):
            b[i, c] = b[i, c] / coef
    return b_arr[:, 0] if squeeze else b_arr
