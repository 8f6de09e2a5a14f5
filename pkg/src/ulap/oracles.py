"""Closed-form and transcendental reference spectra on [0, 2pi].

These are the acceptance oracles: classical Dirichlet/Neumann/periodic
spectra, the quasi-periodic family lambda_n = (n + eps)^2, and the
Neumann-Robin interval problem

    -u'' = lambda u,   u'(0) = 0,   u'(2pi) = c u(2pi),

whose positive eigenvalues are squares of the roots of tan(2pi t) = -c/t and
whose unique negative eigenvalue (present iff c > 0) is -mu^2 with mu solving
exp(-4 pi mu) = (mu - c)/(mu + c), equivalently mu tanh(2 pi mu) = c.

Roots are found by bisection between consecutive poles of the tangent (or a
bracketed, safeguarded Newton iteration for mu) to 1e-13 bracket width, then
polished with two Newton steps.  Other interval lengths rescale into the
constant c, so everything is standardized to [0, 2pi].
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import RootBracketFailure

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OracleSpectrum:
    """Reference spectrum with (optional) normalized eigenfunctions.

    ``eigenfunctions`` is a tuple of (value, derivative) callable pairs
    aligned with ``eigenvalues``, or None when no closed form is available.
    """

    family: str
    eigenvalues: tuple
    eigenfunctions: tuple


def robin_parameter_from_angle(theta):
    """Robin constant c = tan(theta/2) of the robin_local preset angle."""
    return math.tan(0.5 * float(theta))


def _cos_mode(freq):
    if freq == 0.0:
        norm = 1.0 / math.sqrt(TWO_PI)
        return (
            lambda x, c=norm: np.full_like(np.asarray(x, dtype=float), c),
            lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        )
    norm2 = math.pi + math.sin(2.0 * TWO_PI * freq) / (4.0 * freq)
    norm = 1.0 / math.sqrt(norm2)
    return (
        lambda x, f=freq, c=norm: c * np.cos(f * np.asarray(x, dtype=float)),
        lambda x, f=freq, c=norm: -c * f * np.sin(f * np.asarray(x, dtype=float)),
    )


def _sin_mode(freq):
    norm2 = math.pi - math.sin(2.0 * TWO_PI * freq) / (4.0 * freq)
    norm = 1.0 / math.sqrt(norm2)
    return (
        lambda x, f=freq, c=norm: c * np.sin(f * np.asarray(x, dtype=float)),
        lambda x, f=freq, c=norm: c * f * np.cos(f * np.asarray(x, dtype=float)),
    )


def _exp_mode(freq):
    norm = 1.0 / math.sqrt(TWO_PI)
    return (
        lambda x, f=freq, c=norm: c * np.exp(-1j * f * np.asarray(x, dtype=float)),
        lambda x, f=freq, c=norm: -1j * f * c * np.exp(-1j * f * np.asarray(x, dtype=float)),
    )


def _cosh_edge(mu):
    # cosh(mu x)/cosh(2 pi mu), evaluated without overflow; unit L2 norm via
    # the closed form  pi/cosh^2(2 pi mu) + tanh(2 pi mu)/(2 mu).
    norm2 = math.pi / math.cosh(TWO_PI * mu) ** 2 if TWO_PI * mu < 350 else 0.0
    norm2 += math.tanh(TWO_PI * mu) / (2.0 * mu)
    norm = 1.0 / math.sqrt(norm2)

    def scaled_cosh(x):
        x = np.asarray(x, dtype=float)
        damp = math.exp(-4.0 * math.pi * mu) if 4.0 * math.pi * mu < 700 else 0.0
        return (np.exp(mu * (x - TWO_PI)) + np.exp(-mu * (x + TWO_PI))) / (1.0 + damp)

    def scaled_sinh(x):
        x = np.asarray(x, dtype=float)
        damp = math.exp(-4.0 * math.pi * mu) if 4.0 * math.pi * mu < 700 else 0.0
        return (np.exp(mu * (x - TWO_PI)) - np.exp(-mu * (x + TWO_PI))) / (1.0 + damp)

    return (
        lambda x: norm * scaled_cosh(x),
        lambda x: norm * mu * scaled_sinh(x),
    )


def quasi_periodic_spectrum(eps, count):
    """The ``count`` smallest values of (n + eps)^2 with eigenfunctions
    e^{-i(n+eps)x}/sqrt(2 pi)."""
    eps = float(eps)
    count = int(count)
    span = range(-(count + 2), count + 3)
    ranked = sorted(span, key=lambda n: ((n + eps) ** 2, n))[:count]
    values = tuple((n + eps) ** 2 for n in ranked)
    functions = tuple(_exp_mode(n + eps) for n in ranked)
    return OracleSpectrum("quasi_periodic", values, functions)


def classical_spectrum(kind, count):
    """Dirichlet (m^2/4, m>=1), Neumann (m^2/4, m>=0) or periodic (m^2 with
    multiplicity two for m >= 1) reference spectra on [0, 2pi]."""
    kind = str(kind).lower()
    count = int(count)
    if kind == "dirichlet":
        values = tuple((m / 2.0) ** 2 for m in range(1, count + 1))
        functions = tuple(_sin_mode(m / 2.0) for m in range(1, count + 1))
    elif kind == "neumann":
        values = tuple((m / 2.0) ** 2 for m in range(count))
        functions = tuple(_cos_mode(m / 2.0) for m in range(count))
    elif kind == "periodic":
        modes = [0]
        m = 1
        while len(modes) < count:
            modes.extend([-m, m])
            m += 1
        modes = modes[:count]
        values = tuple(float(m * m) for m in modes)
        functions = tuple(_exp_mode(float(m)) for m in modes)
    else:
        raise ValueError(f"unknown classical family {kind!r}")
    return OracleSpectrum(kind, values, functions)


# ---------------------------------------------------------------------------
# Neumann-Robin interval problem
# ---------------------------------------------------------------------------

def _positive_branch_function(c):
    # g(t) = t sin(2 pi t) + c cos(2 pi t): continuous, shares the roots of
    # tan(2 pi t) = -c/t away from the tangent poles.
    def g(t):
        return t * math.sin(TWO_PI * t) + c * math.cos(TWO_PI * t)

    def gprime(t):
        return (
            math.sin(TWO_PI * t)
            + TWO_PI * t * math.cos(TWO_PI * t)
            - TWO_PI * c * math.sin(TWO_PI * t)
        )

    return g, gprime


def _bisect_root(g, lo, hi, width=1e-13):
    glo = g(lo)
    ghi = g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if glo * ghi > 0.0:
        raise RootBracketFailure(f"no sign change on [{lo}, {hi}]")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if glo * gm < 0.0:
            hi = mid
        else:
            lo = mid
            glo = gm
    return 0.5 * (lo + hi)


def _newton_polish(g, gprime, t, steps=2):
    for _ in range(steps):
        slope = gprime(t)
        if slope == 0.0:
            break
        t = t - g(t) / slope
    return t


def robin_negative_root(c):
    """The unique mu > 0 with mu tanh(2 pi mu) = c, for c > 0.

    Safeguarded Newton started at max(c, 0.1); the left-hand side is strictly
    increasing from 0, so the root is simple and bracketable.
    """
    c = float(c)
    if c <= 0.0:
        raise RootBracketFailure("negative eigenvalue exists only for c > 0")

    def g(mu):
        return mu * math.tanh(TWO_PI * mu) - c

    def gprime(mu):
        t = math.tanh(TWO_PI * mu)
        return t + TWO_PI * mu * (1.0 - t * t)

    lo, hi = 0.0, max(c, 0.1)
    while g(hi) < 0.0:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise RootBracketFailure("failed to bracket the negative-branch root")
    mu = max(c, 0.1)
    for _ in range(200):
        val = g(mu)
        if val > 0.0:
            hi = mu
        else:
            lo = mu
        step = val / gprime(mu)
        nxt = mu - step
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - mu) <= 1e-16 * max(1.0, abs(mu)):
            mu = nxt
            break
        mu = nxt
    return mu


def robin_interval_spectrum(c, count):
    """Spectrum of the Neumann-Robin interval problem with constant ``c``.

    At most one negative eigenvalue, present iff c > 0; the trivial zero
    eigenvalue appears for c = 0.  Positive eigenvalues are bracketed between
    consecutive poles t_m = (2m - 1)/4 of tan(2 pi t).
    """
    c = float(c)
    count = int(count)
    g, gprime = _positive_branch_function(c)
    values = []
    functions = []
    if c > 0.0:
        mu = robin_negative_root(c)
        values.append(-mu * mu)
        functions.append(_cosh_edge(mu))
    elif c == 0.0:
        values.append(0.0)
        functions.append(_cos_mode(0.0))
    m = 0
    while len(values) < count:
        lo = (2 * m - 1) / 4.0 if m > 0 else 0.0
        hi = (2 * m + 1) / 4.0
        pad = 1e-12 * max(1.0, hi)
        glo = g(lo + pad)
        ghi = g(hi - pad)
        if glo * ghi <= 0.0:
            t = _bisect_root(g, lo + pad, hi - pad)
            t = _newton_polish(g, gprime, t)
            if t > 0.0:
                values.append(t * t)
                functions.append(_cos_mode(t))
        m += 1
        if m > 4 * count + 8:
            raise RootBracketFailure("ran out of branches hunting positive roots")
    return OracleSpectrum("robin_interval", tuple(values[:count]), tuple(functions[:count]))


def robin_residual(c, eigenvalue):
    """Substitution residual of an eigenvalue in its defining equation,
    scaled by the local magnitudes."""
    c = float(c)
    if eigenvalue < 0.0:
        mu = math.sqrt(-eigenvalue)
        return abs(mu * math.tanh(TWO_PI * mu) - c) / (1.0 + abs(c) + mu)
    t = math.sqrt(eigenvalue)
    if t == 0.0:
        return 0.0 if c == 0.0 else abs(c)
    g, _ = _positive_branch_function(c)
    return abs(g(t)) / ((1.0 + abs(c) + t) * max(1.0, t))
