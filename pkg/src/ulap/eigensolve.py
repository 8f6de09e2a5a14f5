"""Generalized Hermitian-definite eigensolver and eigenfunction utilities.

``solve_pencil`` reduces A x = lambda B x to a standard Hermitian problem
through the triangular Cholesky factor of B, tridiagonalizes, computes the
full tridiagonal spectrum, reconstructs the k requested eigenvectors, and
back-transforms.  Eigenvectors come out B-orthonormal, deterministically
phased (first significant coefficient real positive), with degenerate
clusters re-orthonormalized in the B inner product.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import _kernels as kern
from .assembly import trace_of
from .errors import IndexOutOfRange
from .hermitian import hermitize

TOL_EIG = 1e-9

_GAUSS_T, _GAUSS_W = leggauss(5)
_GAUSS_X = 0.5 * (_GAUSS_T + 1.0)
_GAUSS_W = 0.5 * _GAUSS_W


@dataclass(frozen=True)
class SpectralResult:
    """Computed eigenpairs of a spectral pencil.

    ``eigenvalues`` ascend; ``coefficients[:, i]`` is the i-th B-orthonormal
    eigenvector in the FEM basis; ``traces`` holds the per-eigenvector
    boundary data (phi, phid) as 2n x k matrices; ``residuals`` are
    ||A x - lambda B x||_2 / ||B x||_2.
    """

    eigenvalues: np.ndarray
    coefficients: np.ndarray
    traces: tuple
    residuals: np.ndarray
    mesh: object
    bfs: object

    @property
    def count(self):
        return self.eigenvalues.size


def _fix_phase(x):
    mags = np.abs(x)
    top = mags.max()
    if top == 0.0:
        return x
    idx = int(np.argmax(mags > 1e-8 * top))
    pivot = x[idx]
    if pivot != 0.0:
        x = x * (np.conj(pivot) / abs(pivot))
        x[idx] = complex(x[idx].real, 0.0)
    return x


def solve_pencil(pencil, k=10, tol_eig=TOL_EIG):
    """Lowest ``k`` eigenpairs of the Hermitian-definite pencil (A, B).

    Raises :class:`NotPositiveDefinite` when B fails to factor and
    :class:`ConvergenceFailure` when an eigensolver iteration exceeds its
    budget; warns when a residual exceeds ``tol_eig`` at the local scale.
    """
    dim = pencil.dim
    if not (1 <= k <= dim):
        raise IndexOutOfRange(f"k = {k} outside 1..{dim}")
    a = pencil.A
    b = pencil.B
    l = kern.cholesky_lower(b)
    m = kern.solve_lower(l, a)
    n = kern.solve_lower(l, m.conj().T)
    a_std = hermitize(n.conj().T)
    d, e, href, tau = kern.tridiag_reduce(a_std)
    w_all = kern.eigvals_tridiag(d, e)
    y = kern.eigvecs_tridiag(d, e, w_all[:k])
    z = kern.apply_reflectors(href, tau, y.astype(np.complex128))
    x = kern.solve_lower_ct(l, z)
    w = w_all[:k].copy()

    # re-orthonormalize inside degenerate clusters, in the B inner product
    bx = b @ x
    start = 0
    while start < k:
        stop = start + 1
        while stop < k and abs(w[stop] - w[stop - 1]) <= 1e-10 * max(1.0, abs(w[stop])):
            stop += 1
        for i in range(start, stop):
            for j in range(start, i):
                x[:, i] -= (bx[:, j].conj() @ x[:, i]) * x[:, j]
                bx[:, i] = b @ x[:, i]
            nrm = np.sqrt((x[:, i].conj() @ bx[:, i]).real)
            x[:, i] /= nrm
            bx[:, i] /= nrm
        start = stop
    for i in range(k):
        x[:, i] = _fix_phase(x[:, i])

    bx = b @ x
    residuals = np.array(
        [
            np.linalg.norm(a @ x[:, i] - w[i] * bx[:, i]) / np.linalg.norm(bx[:, i])
            for i in range(k)
        ]
    )
    bad = residuals > tol_eig * np.maximum(1.0, np.abs(w))
    if np.any(bad):
        warnings.warn(
            f"{int(bad.sum())} eigenpair(s) exceed the residual tolerance "
            f"{tol_eig:.1e}; worst {residuals.max():.3e}"
        )
    phi = np.empty((pencil.bfs.V.shape[0], k), dtype=np.complex128)
    phid = np.empty_like(phi)
    for i in range(k):
        phi[:, i], phid[:, i] = trace_of(x[:, i], pencil.bfs)
    return SpectralResult(
        eigenvalues=w,
        coefficients=x,
        traces=(phi, phid),
        residuals=residuals,
        mesh=pencil.mesh,
        bfs=pencil.bfs,
    )


def reconstruct(result, index, mesh=None, bfs=None):
    """Node values of eigenfunction ``index``, one array per interval.

    Interior node values equal the chain coefficients; endpoint values come
    from the boundary traces.  The eigenfunction is the piecewise-linear
    interpolant of these values.
    """
    if not (0 <= index < result.count):
        raise IndexOutOfRange(f"eigenpair index {index} outside 0..{result.count - 1}")
    mesh = result.mesh if mesh is None else mesh
    bfs = result.bfs if bfs is None else bfs
    c = result.coefficients[:, index]
    phi, _ = trace_of(c, bfs)
    out = []
    s = 0
    for alpha, r in enumerate(mesh.counts):
        vals = np.empty(r + 2, dtype=np.complex128)
        vals[0] = phi[2 * alpha]
        vals[1 : r + 1] = c[s : s + r]
        vals[r + 1] = phi[2 * alpha + 1]
        out.append(vals)
        s += r
    return out


def _segment_l2(values, mesh):
    total = 0.0
    for vals, h in zip(values, mesh.steps):
        lo = vals[:-1]
        hi = vals[1:]
        total += h * float(
            np.sum(
                (np.abs(lo) ** 2 + np.abs(hi) ** 2 + (lo.conj() * hi).real) / 3.0
            )
        )
    return total


def h1_error(values, analytic, mesh):
    """H1 distance between a piecewise-linear function and a reference.

    ``values`` holds node values per interval (as from :func:`reconstruct`);
    ``analytic`` is a pair of callables (value, derivative).  The numeric
    function is scaled to unit L2 norm and aligned to the reference by the
    unimodular phase maximizing Re<numeric, analytic>; the squared error sums
    5-point Gauss integrals of |u - f|^2 + |u' - f'|^2 over every
    subinterval.
    """
    f, fprime = analytic
    scale = np.sqrt(_segment_l2(values, mesh))
    values = [v / scale for v in values]

    overlap = 0.0 + 0.0j
    for vals, nodes, h in zip(values, mesh.nodes, mesh.steps):
        lo = vals[:-1]
        hi = vals[1:]
        xl = nodes[:-1]
        for t, wq in zip(_GAUSS_X, _GAUSS_W):
            xs = xl + t * h
            u = lo + (hi - lo) * t
            overlap += wq * h * np.sum(u.conj() * f(xs))
    if abs(overlap) > 0.0:
        phase = overlap / abs(overlap)
        values = [v * phase for v in values]

    err2 = 0.0
    for vals, nodes, h in zip(values, mesh.nodes, mesh.steps):
        lo = vals[:-1]
        hi = vals[1:]
        du = (hi - lo) / h
        xl = nodes[:-1]
        for t, wq in zip(_GAUSS_X, _GAUSS_W):
            xs = xl + t * h
            u = lo + (hi - lo) * t
            err2 += wq * h * float(
                np.sum(np.abs(u - f(xs)) ** 2 + np.abs(du - fprime(xs)) ** 2)
            )
    return float(np.sqrt(err2))
