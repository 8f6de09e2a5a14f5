"""Algebra of the boundary unitary U in U(2n).

A self-adjoint boundary condition on endpoint traces phi and outward normal
derivatives phid is the equation

    phi - i*phid = U (phi + i*phid),

which for a unitary with gap at -1 (automatic in finite dimension) splits
into P_perp phi = 0 and P phid = A_U phi, where P_perp projects onto the -1
eigenspace and A_U is the partial Cayley transform.  This module validates
unitaries, builds their spectral data, provides the standard presets, and
checks finite-group invariance through the commutant criterion.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AngleAtMinusPi, DimensionMismatch, InvalidPairing, NotUnitary
from .hermitian import hermitize, unitary_eigensystem

TOL_UNITARY = 1e-12
TOL_GAP = 1e-8


@dataclass(frozen=True)
class BoundaryUnitary:
    """Validated boundary unitary with its spectral data.

    ``minus_one_projector`` (P_perp) spans the eigenvectors with
    |lambda + 1| <= tol_gap; ``invertibility_projector`` is P = I - P_perp;
    ``cayley`` is the partial Cayley transform assembled from the spectral
    form sum_j -tan(theta_j / 2) |v_j><v_j| over the gapped eigenvectors.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    minus_one_projector: np.ndarray
    invertibility_projector: np.ndarray
    cayley: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __post_init__(self):
        for name in (
            "matrix",
            "eigenvalues",
            "eigenvectors",
            "minus_one_projector",
            "invertibility_projector",
            "cayley",
        ):
            getattr(self, name).setflags(write=False)


@dataclass(frozen=True)
class SymmetryRep:
    """Finite list of boundary-space unitaries representing group elements
    (or a generating set)."""

    elements: tuple

    def __post_init__(self):
        checked = []
        for g in self.elements:
            g = np.asarray(g, dtype=np.complex128)
            if g.ndim != 2 or g.shape[0] != g.shape[1]:
                raise DimensionMismatch(f"representation element has shape {g.shape}")
            gap = np.max(np.abs(g.conj().T @ g - np.eye(g.shape[0])))
            if gap > TOL_UNITARY * 10:
                raise NotUnitary(f"representation element deviates by {gap:.3e}")
            g.setflags(write=False)
            checked.append(g)
        object.__setattr__(self, "elements", tuple(checked))


def validate_unitary(matrix, tol_unitary=TOL_UNITARY, tol_gap=TOL_GAP):
    """Check unitarity and build the full spectral data.

    The matrix must be square with even dimension 2n.  Raises
    :class:`NotUnitary` when ``max|U^H U - I|`` exceeds ``tol_unitary`` and
    :class:`DimensionMismatch` for odd or non-square input.
    """
    u = np.asarray(matrix, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {u.shape}")
    dim = u.shape[0]
    if dim % 2 != 0 or dim == 0:
        raise DimensionMismatch(f"boundary dimension must be even, got {dim}")
    defect = np.max(np.abs(u.conj().T @ u - np.eye(dim)))
    if defect > tol_unitary:
        raise NotUnitary(f"max|U^H U - I| = {defect:.3e} > {tol_unitary:.1e}")

    lam, vecs = unitary_eigensystem(u)
    at_minus_one = np.abs(lam + 1.0) <= tol_gap
    vm = vecs[:, at_minus_one]
    p_perp = hermitize(vm @ vm.conj().T)
    p = hermitize(np.eye(dim) - p_perp)

    vg = vecs[:, ~at_minus_one]
    theta = np.angle(lam[~at_minus_one])
    a_u = hermitize(vg @ np.diag(-np.tan(0.5 * theta)) @ vg.conj().T)
    return BoundaryUnitary(
        matrix=u.copy(),
        eigenvalues=lam,
        eigenvectors=vecs,
        minus_one_projector=p_perp,
        invertibility_projector=p,
        cayley=a_u,
    )


def partial_cayley(u):
    """Partial Cayley transform A_U of a validated boundary unitary.

    Equals i P (U - I)(U + I)^{-1} on the invertibility space; assembled from
    the spectral form so it stays finite when eigenvalues approach -1.
    """
    if not isinstance(u, BoundaryUnitary):
        u = validate_unitary(u)
    return u.cayley


def _as_unitary(obj):
    return obj if isinstance(obj, BoundaryUnitary) else validate_unitary(obj)


def _check_pairing(pairing, dim):
    seen = set()
    for pair in pairing:
        if len(pair) != 2:
            raise InvalidPairing(f"pair {pair!r} does not have two entries")
        for l in pair:
            if not (0 <= int(l) < dim) or int(l) in seen:
                raise InvalidPairing(f"index {l} repeats or is out of range")
            seen.add(int(l))
        if int(pair[0]) == int(pair[1]):
            raise InvalidPairing(f"pair {pair!r} matches an endpoint with itself")
    if len(seen) != dim:
        raise InvalidPairing(f"pairing covers {len(seen)} of {dim} endpoints")


def preset(name, *, n=1, beta=None, pairing=None, alpha=None, theta=None):
    """Standard boundary-condition presets, returned validated.

    dirichlet            -I
    neumann              I
    robin                diag(e^{i beta_l}) for 2n angles in (-pi, pi]
    periodic             swap matrix over a perfect matching of endpoints
    quasi_periodic       per matched pair [[0, e^{i alpha}], [e^{-i alpha}, 0]]
    robin_local          diag(1, e^{-i theta}) on a single interval

    ``pairing`` uses 0-based global endpoint indices (a_1, b_1, a_2, b_2,
    ...); it defaults to matching each interval's own endpoints.
    """
    name = str(name).lower()
    if name == "dirichlet":
        return validate_unitary(-np.eye(2 * n, dtype=np.complex128))
    if name == "neumann":
        return validate_unitary(np.eye(2 * n, dtype=np.complex128))
    if name == "robin":
        if beta is None:
            raise InvalidPairing("robin preset needs the list of 2n angles")
        beta = np.atleast_1d(np.asarray(beta, dtype=np.float64))
        if beta.size % 2 != 0:
            raise DimensionMismatch(f"robin needs an even count of angles, got {beta.size}")
        if np.any(np.abs(np.abs(beta) - np.pi) <= 1e-15):
            warnings.warn(
                "a Robin angle sits at pi: the -1 eigenvalue is handled via the "
                "projector, not the Cayley transform",
                AngleAtMinusPi,
            )
        return validate_unitary(np.diag(np.exp(1j * beta)))
    if name in ("periodic", "quasi_periodic"):
        if pairing is None:
            pairing = [(2 * k, 2 * k + 1) for k in range(n)]
        pairing = [tuple(int(x) for x in pair) for pair in pairing]
        dim = 2 * len(pairing)
        _check_pairing(pairing, dim)
        if name == "quasi_periodic" and alpha is None:
            raise InvalidPairing("quasi_periodic preset needs the angle alpha")
        u = np.zeros((dim, dim), dtype=np.complex128)
        phase = np.exp(1j * float(alpha)) if name == "quasi_periodic" else 1.0
        for l, m in pairing:
            u[l, m] = phase
            u[m, l] = np.conj(phase)
        return validate_unitary(u)
    if name == "robin_local":
        if theta is None:
            raise InvalidPairing("robin_local preset needs the angle theta")
        return validate_unitary(np.diag([1.0, np.exp(-1j * float(theta))]))
    raise InvalidPairing(f"unknown preset {name!r}")


def boundary_condition_residual(u, phi, phid):
    """Residual norm ``||(phi - i phid) - U (phi + i phid)||_2``."""
    u = _as_unitary(u)
    phi = np.asarray(phi, dtype=np.complex128)
    phid = np.asarray(phid, dtype=np.complex128)
    if phi.shape != (u.dim,) or phid.shape != (u.dim,):
        raise DimensionMismatch(
            f"trace vectors must have shape ({u.dim},), got {phi.shape} and {phid.shape}"
        )
    return float(np.linalg.norm((phi - 1j * phid) - u.matrix @ (phi + 1j * phid)))


def split_boundary_residuals(u, phi, phid):
    """The equivalent split-form residuals ``(||P phid - A_U phi||, ||P_perp phi||)``."""
    u = _as_unitary(u)
    phi = np.asarray(phi, dtype=np.complex128)
    phid = np.asarray(phid, dtype=np.complex128)
    if phi.shape != (u.dim,) or phid.shape != (u.dim,):
        raise DimensionMismatch(
            f"trace vectors must have shape ({u.dim},), got {phi.shape} and {phid.shape}"
        )
    robin = np.linalg.norm(u.invertibility_projector @ phid - u.cayley @ phi)
    dirichlet = np.linalg.norm(u.minus_one_projector @ phi)
    return float(robin), float(dirichlet)


def max_commutator(u, reps):
    """Largest entrywise commutator norm ``max_g ||v(g) U - U v(g)||_max``."""
    u = _as_unitary(u)
    worst = 0.0
    for g in reps.elements:
        if g.shape[0] != u.dim:
            raise DimensionMismatch(
                f"representation is {g.shape[0]}-dimensional, boundary is {u.dim}"
            )
        worst = max(worst, float(np.max(np.abs(g @ u.matrix - u.matrix @ g))))
    return worst


def commutant_check(u, reps, tol=1e-10):
    """True iff the boundary condition is invariant under the represented
    group, i.e. every element commutes with U within ``tol``."""
    return max_commutator(u, reps) <= tol
