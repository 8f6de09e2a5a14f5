"""Interval-union manifolds and their uniform subdivisions.

A manifold here is a disjoint union of n compact intervals with a positive
piecewise-constant metric coefficient per interval.  Endpoints carry a global
index l = 0..2n-1 ordered (a_1, b_1, a_2, b_2, ...).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInterval, EmptyManifold, NonPositiveMetric, ResolutionTooSmall


@dataclass(frozen=True)
class IntervalManifold:
    """Disjoint union of intervals [a, b] with constant metric weight per
    interval.

    ``sl_weight`` and ``sl_coeff`` are the Sturm-Liouville coefficients
    W = 1/(2 sqrt(eta)) and p = 1/sqrt(eta) derived from the metric; the mass
    measure carries sqrt(eta) and the stiffness integrand carries 1/sqrt(eta).
    """

    intervals: tuple
    metric: tuple
    lengths: tuple = field(init=False)
    sl_weight: tuple = field(init=False)
    sl_coeff: tuple = field(init=False)

    def __post_init__(self):
        lengths = tuple(b - a for a, b in self.intervals)
        weights = tuple(1.0 / (2.0 * math.sqrt(eta)) for eta in self.metric)
        coeffs = tuple(1.0 / math.sqrt(eta) for eta in self.metric)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "sl_weight", weights)
        object.__setattr__(self, "sl_coeff", coeffs)

    @property
    def n_intervals(self):
        return len(self.intervals)

    @property
    def n_boundary(self):
        """Number of boundary points, 2n."""
        return 2 * len(self.intervals)

    @property
    def total_length(self):
        return sum(self.lengths)

    def endpoint(self, l):
        """Coordinate of global boundary point l (a_1, b_1, a_2, b_2, ...)."""
        a, b = self.intervals[l // 2]
        return a if l % 2 == 0 else b


def build_manifold(intervals, metric):
    """Validate and construct an :class:`IntervalManifold`.

    ``intervals`` is a sequence of (a, b) coordinate pairs and ``metric`` the
    per-interval positive weights; the lists must be non-empty and of equal
    length.
    """
    intervals = [(float(a), float(b)) for a, b in intervals]
    metric = [float(m) for m in metric]
    if not intervals or not metric:
        raise EmptyManifold("at least one interval and metric entry required")
    if len(intervals) != len(metric):
        raise EmptyManifold(
            f"{len(intervals)} intervals but {len(metric)} metric entries"
        )
    for a, b in intervals:
        if not (a < b) or not math.isfinite(a) or not math.isfinite(b):
            raise DegenerateInterval(f"invalid interval ({a}, {b})")
    for eta in metric:
        if not (eta > 0.0) or not math.isfinite(eta):
            raise NonPositiveMetric(f"metric coefficient {eta} must be > 0")
    return IntervalManifold(tuple(intervals), tuple(metric))


@dataclass(frozen=True)
class Mesh:
    """Uniform per-interval subdivision of a manifold.

    Interval alpha gets r_alpha = floor(L_alpha N / L) + 1 interior nodes and
    step h_alpha = L_alpha / (r_alpha + 1); the node coordinates are
    x_k = a_alpha + k h_alpha for k = 0..r_alpha+1 with the last node pinned
    to b_alpha exactly.
    """

    manifold: IntervalManifold
    resolution: int
    counts: tuple
    steps: tuple
    nodes: tuple

    @property
    def dim(self):
        """Total basis dimension |r|."""
        return sum(self.counts)

    def endpoint_step(self, l):
        """Step h_l of the interval owning global boundary point l."""
        return self.steps[l // 2]

    @property
    def endpoint_steps(self):
        return np.array([self.steps[l // 2] for l in range(self.manifold.n_boundary)])


def subdivide(manifold, resolution):
    """Mesh the manifold at global resolution N (deterministic)."""
    n = manifold.n_intervals
    resolution = int(resolution)
    if resolution < 2 * n:
        raise ResolutionTooSmall(f"N = {resolution} < 2n = {2 * n}")
    total = manifold.total_length
    counts = []
    for length in manifold.lengths:
        r = int(math.floor(length * resolution / total)) + 1
        if r < 2:
            raise ResolutionTooSmall(
                f"interval of length {length} got r = {r} < 2 at N = {resolution}"
            )
        counts.append(r)
    steps = [length / (r + 1) for length, r in zip(manifold.lengths, counts)]
    nodes = []
    for (a, b), r, h in zip(manifold.intervals, counts, steps):
        x = a + h * np.arange(r + 2)
        x[-1] = b
        x.setflags(write=False)
        nodes.append(x)
    return Mesh(manifold, resolution, tuple(counts), tuple(steps), tuple(nodes))
