"""Dense Hermitian eigensolvers built on the kernel backends.

``eigh_full`` tridiagonalizes with Householder reflections and diagonalizes
the tridiagonal matrix, accumulating the transformations; ``eigh_smallest``
computes all eigenvalues but reconstructs only the requested number of
eigenvectors (inverse iteration on the tridiagonal plus reflector
back-transform), which is what the pencil solver uses at large dimensions.
"""

import numpy as np

from . import _kernels as kern


def hermitize(a):
    """Exactly Hermitian copy of ``a``: upper triangle mirrors the lower."""
    a = np.asarray(a, dtype=np.complex128)
    low = np.tril(a, -1)
    return low + low.conj().T + np.diag(a.diagonal().real)


def eigh_full(a):
    """All eigenpairs of a Hermitian matrix, eigenvalues ascending.

    Returns ``(w, v)`` with orthonormal eigenvector columns.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0].real]), np.ones((1, 1), dtype=np.complex128)
    d, e, href, tau = kern.tridiag_reduce(a)
    q = kern.accumulate_q(href, tau)
    return kern.eigh_tridiag_full(d, e, q)


def eigh_smallest(a, k):
    """The ``k`` algebraically smallest eigenpairs of a Hermitian matrix.

    Returns ``(w_all, x)`` where ``w_all`` holds the full ascending spectrum
    and ``x`` the eigenvectors for ``w_all[:k]``.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0].real]), np.ones((1, 1), dtype=np.complex128)
    d, e, href, tau = kern.tridiag_reduce(a)
    w = kern.eigvals_tridiag(d, e)
    y = kern.eigvecs_tridiag(d, e, w[:k])
    x = kern.apply_reflectors(href, tau, y.astype(np.complex128))
    return w, x


def unitary_eigensystem(u, cluster_tol=1e-8):
    """Spectral decomposition of a unitary matrix.

    Diagonalizes the Hermitian part ``(U + U^H)/2`` to obtain invariant
    subspaces, then resolves degeneracies (conjugate phase pairs share the
    same cosine) by diagonalizing the projected anti-Hermitian part
    ``(U - U^H)/(2i)`` inside each cluster.  Eigenvalues are returned on the
    unit circle, ordered by phase in (-pi, pi], with orthonormal columns.
    """
    u = np.asarray(u, dtype=np.complex128)
    n = u.shape[0]
    h_cos = hermitize(0.5 * (u + u.conj().T))
    h_sin = hermitize((u - u.conj().T) / 2j)
    wc, vecs = eigh_full(h_cos)
    vecs = np.array(vecs)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and wc[stop] - wc[stop - 1] <= cluster_tol:
            stop += 1
        if stop - start > 1:
            block = vecs[:, start:stop]
            m = hermitize(block.conj().T @ h_sin @ block)
            _, rot = eigh_full(m)
            vecs[:, start:stop] = block @ rot
        start = stop
    # Rayleigh quotients of U give the eigenvalues; renormalize to |z| = 1.
    lam = np.einsum("ij,ij->j", vecs.conj(), u @ vecs)
    lam = lam / np.abs(lam)
    order = np.argsort(np.angle(lam), kind="stable")
    return lam[order], vecs[:, order]
