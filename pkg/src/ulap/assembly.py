"""Non-local finite-element assembly.

The approximation space on a mesh couples two families of piecewise-linear
elements:

* bulk hat functions at the interior nodes x_2 .. x_{r-1} of each interval,
  vanishing with vanishing derivative at every endpoint;
* one delocalised boundary function per endpoint, equal to 1 at the interior
  node adjacent to its endpoint and taking the solved endpoint values V[l, k]
  at every boundary point l, so that each satisfies the boundary condition of
  the chosen unitary exactly.

The endpoint values solve the 2n x 2n linear system F V = C with

    F = diag(1 - i/h) - U diag(1 + i/h),      C = -i (I + U) diag(1/h),

after which V is symmetrized so that the scaled Hermitian relation
(1/h_j) conj(V[j,k]) = (1/h_k) V[k,j] holds exactly as stored; this is what
makes the assembled pencil (A, B) exactly Hermitian.

Basis ordering per interval is (boundary-left, bulk..., boundary-right), the
intervals concatenated, which renders both matrices tridiagonal apart from
the sparse block coupling the 2n boundary functions.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryUnitary, validate_unitary
from .errors import (
    DimensionMismatch,
    IllConditioned,
    PerturbationTooLarge,
    SingularBoundaryMatrix,
)
from .hermitian import eigh_full, hermitize, unitary_eigensystem
from .manifold import Mesh

KAPPA_WARN = 1e8


# ---------------------------------------------------------------------------
# Basis layout
# ---------------------------------------------------------------------------

def interval_starts(mesh):
    """Global index of the first basis element of each interval."""
    starts = []
    s = 0
    for r in mesh.counts:
        starts.append(s)
        s += r
    return tuple(starts)


def boundary_positions(mesh):
    """Global basis indices of the 2n boundary functions, in endpoint order."""
    starts = interval_starts(mesh)
    pos = []
    for alpha, r in enumerate(mesh.counts):
        pos.append(starts[alpha])
        pos.append(starts[alpha] + r - 1)
    return np.array(pos, dtype=np.intp)


@dataclass(frozen=True)
class BulkBasis:
    """The |r| - 2n bulk hat functions, indexed by (interval, node)."""

    mesh: Mesh
    functions: tuple  # (alpha, k) with hat node x_k, k = 2..r_alpha-1

    @property
    def count(self):
        return len(self.functions)

    def value(self, alpha, k, x):
        nodes = self.mesh.nodes[alpha]
        vals = np.zeros(len(nodes))
        vals[k] = 1.0
        return np.interp(x, nodes, vals)

    def slope(self, alpha, k, x):
        nodes = self.mesh.nodes[alpha]
        h = self.mesh.steps[alpha]
        x = np.asarray(x, dtype=np.float64)
        seg = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, len(nodes) - 2)
        out = np.zeros_like(x)
        out[seg == k - 1] = 1.0 / h
        out[seg == k] = -1.0 / h
        return out


def bulk_basis(mesh):
    """Descriptor of the bulk hat functions of a mesh."""
    functions = []
    for alpha, r in enumerate(mesh.counts):
        for k in range(2, r):
            functions.append((alpha, k))
    return BulkBasis(mesh, tuple(functions))


# ---------------------------------------------------------------------------
# Boundary linear system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryLinearSystem:
    """The system F V = C fixing the boundary-function endpoint values."""

    unitary: BoundaryUnitary
    mesh: Mesh
    F: np.ndarray
    C: np.ndarray
    D: np.ndarray
    U0: np.ndarray
    kappa_bound: float

    @property
    def dim(self):
        return self.F.shape[0]


def boundary_system(u, mesh, singular_tol=1e-12):
    """Build F, C and the conditioning data for a unitary on a mesh.

    Raises :class:`SingularBoundaryMatrix` when 1 lies in the spectrum of
    U0 = U D conj(D)^{-1} within ``singular_tol`` (remedy: change N).
    """
    if not isinstance(u, BoundaryUnitary):
        u = validate_unitary(u)
    h = mesh.endpoint_steps
    if u.dim != h.size:
        raise DimensionMismatch(
            f"unitary dimension {u.dim} does not match 2n = {h.size}"
        )
    dvec = 1.0 + 1j / h
    f = np.diag(dvec.conj()) - u.matrix * dvec[None, :]
    c = -1j * (np.eye(u.dim) + u.matrix) / h[None, :]
    u0 = u.matrix * (dvec / dvec.conj())[None, :]
    lam0, _ = unitary_eigensystem(u0)
    sep = float(np.min(np.abs(1.0 - lam0)))
    if sep <= singular_tol:
        raise SingularBoundaryMatrix(
            f"1 is in the spectrum of U0 within {sep:.3e}; perturb the mesh (change N)"
        )
    kappa_bound = (max(h) / min(h)) * 2.0 / sep
    return BoundaryLinearSystem(
        unitary=u, mesh=mesh, F=f, C=c, D=np.diag(dvec), U0=u0, kappa_bound=float(kappa_bound)
    )


def kappa_spectral(m):
    """2-norm condition number via the singular values of ``m``."""
    w, _ = eigh_full(hermitize(m.conj().T @ m))
    w = np.clip(w, 0.0, None)
    smin = np.sqrt(w[0])
    smax = np.sqrt(w[-1])
    return float(smax / smin) if smin > 0 else np.inf


@dataclass(frozen=True)
class BoundaryFunctionSet:
    """Endpoint values V and normal derivatives of the boundary functions.

    Column k of ``V`` holds the endpoint values of boundary function k;
    ``derivs[l, k] = -(1/h_l)(delta_lk - V[l, k])`` are the outward normal
    derivatives.  ``raw_residual`` records ``max|F V - C|`` before the
    Hermitian symmetrization.
    """

    V: np.ndarray
    derivs: np.ndarray
    mesh: Mesh
    unitary: BoundaryUnitary
    raw_residual: float


def solve_boundary_values(system):
    """Solve F V = C and symmetrize so the Hermitian relation is exact.

    Warns :class:`IllConditioned` when the computed condition number of F
    exceeds 1e8 (the useful regime is about 1e4 to 1e5).
    """
    kappa = kappa_spectral(system.F)
    if kappa > KAPPA_WARN:
        warnings.warn(
            f"boundary matrix has condition number {kappa:.3e} > {KAPPA_WARN:.0e}; "
            "increase N to improve it",
            IllConditioned,
        )
    v_raw = np.linalg.solve(system.F, system.C)
    raw_residual = float(np.max(np.abs(system.F @ v_raw - system.C)))
    h = system.mesh.endpoint_steps
    dim = system.dim
    v = v_raw.copy()
    for j in range(dim):
        v[j, j] = complex(v_raw[j, j].real, 0.0)
        for k in range(j + 1, dim):
            avg = 0.5 * (v_raw[j, k] + (h[j] / h[k]) * np.conj(v_raw[k, j]))
            v[j, k] = avg
            v[k, j] = (h[k] / h[j]) * np.conj(avg)
    derivs = -(np.eye(dim) - v) / h[:, None]
    return BoundaryFunctionSet(
        V=v, derivs=derivs, mesh=system.mesh, unitary=system.unitary, raw_residual=raw_residual
    )


def hermitian_relation_gap(bfs):
    """Maximum violation of the scaled Hermitian relation, bit-for-bit.

    Zero exactly when V[k, j] == (h_k / h_j) conj(V[j, k]) as stored and the
    diagonal is exactly real.
    """
    v = bfs.V
    h = bfs.mesh.endpoint_steps
    gap = float(np.max(np.abs(v.diagonal().imag)))
    for j in range(v.shape[0]):
        for k in range(j + 1, v.shape[0]):
            gap = max(gap, abs(v[k, j] - (h[k] / h[j]) * np.conj(v[j, k])))
    return gap


@dataclass(frozen=True)
class PerturbationBound:
    """First-order conditioning data for step perturbations."""

    eigenvalue_shift_lower: float
    kappa_estimate: float
    diagonal: np.ndarray


def perturbation_bounds(system, delta_h, growth_constant=1.0):
    """Lower bound on the shift of the unit eigenvalue of U0 under a step
    perturbation, plus the simplified condition-number estimate.

    The perturbation of D conj(D)^{-1} is diagonal with entries
    -2i delta_h_k / (h_k - i)^2; the bound is
    (sigma_min - C sigma_max^2) / (1 + C sigma_max) with C the eigenvector
    growth constant, and the estimate is (h_max/h_min) / min|delta_h|.
    """
    h = system.mesh.endpoint_steps
    delta_h = np.broadcast_to(np.asarray(delta_h, dtype=np.float64), h.shape)
    diag = -2j * delta_h / (h - 1j) ** 2
    sig = np.abs(diag)
    smin = float(sig.min())
    smax = float(sig.max())
    lower = (smin - growth_constant * smax**2) / (1.0 + growth_constant * smax)
    if lower <= 0.0:
        raise PerturbationTooLarge(
            f"first-order lower bound {lower:.3e} is not positive"
        )
    kappa_estimate = float((h.max() / h.min()) / np.min(np.abs(delta_h)))
    return PerturbationBound(lower, kappa_estimate, diag)


# ---------------------------------------------------------------------------
# Pencil assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralPencil:
    """Hermitian pencil (A, B) of the Galerkin eigenproblem A x = lambda B x."""

    A: np.ndarray
    B: np.ndarray
    mesh: Mesh
    bfs: BoundaryFunctionSet

    @property
    def dim(self):
        return self.A.shape[0]


def _mirror_upper(m):
    """Exact Hermitian matrix from an accumulated upper triangle."""
    up = np.triu(m, 1)
    return up + up.conj().T + np.diag(m.diagonal().real)


def assemble_pencil(mesh, bfs, manifold=None):
    """Assemble the Hermitian pencil (A, B) by exact closed-form integration.

    A carries the stiffness inner products minus the boundary trace term
    sum_l conj(gamma(f_a))_l (normal derivative of f_b)_l; B is the mass
    matrix.  Only the upper triangle is computed; the lower is mirrored, so
    both matrices are exactly Hermitian as stored.
    """
    if manifold is None:
        manifold = mesh.manifold
    dim = mesh.dim
    n2 = manifold.n_boundary
    v = bfs.V
    derivs = bfs.derivs
    a = np.zeros((dim, dim), dtype=np.complex128)
    b = np.zeros((dim, dim), dtype=np.complex128)
    starts = interval_starts(mesh)
    pos = boundary_positions(mesh)

    for alpha in range(manifold.n_intervals):
        r = mesh.counts[alpha]
        h = mesh.steps[alpha]
        p = manifold.sl_coeff[alpha]
        wgt = np.sqrt(manifold.metric[alpha])
        s = starts[alpha]
        stiff_diag = p / h
        stiff_off = -p / h
        mass_diag = wgt * h / 3.0
        mass_off = wgt * h / 6.0
        # interior segments [x_j, x_{j+1}], j = 1..r-1: chain elements j-1, j
        for j in range(1, r):
            lo = s + j - 1
            hi = s + j
            a[lo, lo] += stiff_diag
            a[hi, hi] += stiff_diag
            a[lo, hi] += stiff_off
            b[lo, lo] += mass_diag
            b[hi, hi] += mass_diag
            b[lo, hi] += mass_off

    # boundary subintervals: only boundary functions are supported there
    for l in range(n2):
        alpha = l // 2
        h = mesh.steps[alpha]
        p = manifold.sl_coeff[alpha]
        wgt = np.sqrt(manifold.metric[alpha])
        for m in range(n2):
            wm = 1.0 if m == l else 0.0
            dm = wm - v[l, m]
            for m2 in range(m, n2):
                wm2 = 1.0 if m2 == l else 0.0
                dm2 = wm2 - v[l, m2]
                a[pos[m], pos[m2]] += p * np.conj(dm) * dm2 / h
                b[pos[m], pos[m2]] += (
                    wgt
                    * h
                    * (
                        np.conj(v[l, m]) * v[l, m2] / 3.0
                        + (np.conj(v[l, m]) * wm2 + wm * v[l, m2]) / 6.0
                        + wm * wm2 / 3.0
                    )
                )

    # boundary trace term of A
    for m in range(n2):
        for m2 in range(m, n2):
            a[pos[m], pos[m2]] -= np.vdot(v[:, m], derivs[:, m2])

    return SpectralPencil(A=_mirror_upper(a), B=_mirror_upper(b), mesh=mesh, bfs=bfs)


def trace_of(coefficients, bfs):
    """Boundary traces (phi, phid) of a coefficient vector in the FEM basis.

    Bulk functions contribute nothing; the boundary-function coefficients
    combine linearly through V and the normal-derivative matrix.
    """
    c = np.asarray(coefficients, dtype=np.complex128)
    if c.shape != (bfs.mesh.dim,):
        raise DimensionMismatch(
            f"expected {bfs.mesh.dim} coefficients, got shape {c.shape}"
        )
    cb = c[boundary_positions(bfs.mesh)]
    return bfs.V @ cb, bfs.derivs @ cb


# ---------------------------------------------------------------------------
# Evaluation helpers and debug output
# ---------------------------------------------------------------------------

def basis_node_values(mesh, bfs, index):
    """Node values of basis function ``index`` on every interval.

    Returns one complex array of length r_alpha + 2 per interval; every basis
    function is the piecewise-linear interpolant of these values.
    """
    if not (0 <= index < mesh.dim):
        raise DimensionMismatch(f"basis index {index} out of range")
    starts = interval_starts(mesh)
    values = [np.zeros(r + 2, dtype=np.complex128) for r in mesh.counts]
    alpha = max(i for i, s in enumerate(starts) if s <= index)
    local = index - starts[alpha]
    r = mesh.counts[alpha]
    if local == 0 or local == r - 1:
        m = 2 * alpha if local == 0 else 2 * alpha + 1
        for ap in range(mesh.manifold.n_intervals):
            values[ap][0] = bfs.V[2 * ap, m]
            values[ap][-1] = bfs.V[2 * ap + 1, m]
        values[alpha][1 if local == 0 else r] = 1.0
    else:
        values[alpha][local + 1] = 1.0
    return values


def dump_csv(path, matrix, threshold=0.0):
    """Write nonzero entries of a matrix as ``row,col,re,im`` CSV."""
    m = np.asarray(matrix)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("row,col,re,im\n")
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                z = complex(m[i, j])
                if abs(z) > threshold or i == j:
                    fh.write(
                        f"{i},{j},{format(z.real, '.17g')},{format(z.imag, '.17g')}\n"
                    )
