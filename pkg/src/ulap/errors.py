"""Exception and warning types raised across the package."""


class UlapError(Exception):
    """Base class for all package errors."""


class EmptyManifold(UlapError):
    """No intervals were supplied."""


class DegenerateInterval(UlapError):
    """An interval has non-positive length (a >= b)."""


class NonPositiveMetric(UlapError):
    """A metric coefficient is not strictly positive."""


class ResolutionTooSmall(UlapError):
    """The requested resolution leaves some interval with fewer than two
    interior nodes, or N < 2n."""


class NotUnitary(UlapError):
    """Matrix fails the unitarity test within tolerance."""


class DimensionMismatch(UlapError):
    """Operands have incompatible dimensions."""


class InvalidPairing(UlapError):
    """Endpoint pairing is not a perfect matching of the 2n endpoints."""


class SingularBoundaryMatrix(UlapError):
    """The boundary matrix F is singular (1 is in the spectrum of U0);
    the caller should perturb the mesh by changing N."""


class PerturbationTooLarge(UlapError):
    """The first-order eigenvalue lower bound is not positive for the
    requested step perturbation."""


class NotPositiveDefinite(UlapError):
    """Cholesky factorization of the mass matrix failed."""


class ConvergenceFailure(UlapError):
    """An eigensolver iteration exceeded its rotation budget."""


class RootBracketFailure(UlapError):
    """A transcendental root could not be bracketed on its branch."""


class IndexOutOfRange(UlapError):
    """Eigenpair index outside the computed range."""


class ConfigError(UlapError):
    """Run configuration is malformed or fails validation."""


class IllConditioned(UserWarning):
    """Estimated condition number of the boundary matrix exceeds 1e8."""


class AngleAtMinusPi(UserWarning):
    """A Robin angle equals pi, so the preset touches the -1 eigenvalue and
    the condition is handled through the projector rather than the Cayley
    transform."""
