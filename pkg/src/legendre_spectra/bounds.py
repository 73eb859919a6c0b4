"""Decay and truncation bounds for Legendre coefficients of products.

Notation: for a function ``f`` with ``j`` derivatives of bounded variation,

    ||f^{(j)}|| = int_{-1}^{1} |f^{(j+1)}(x)| / (1 - x^2)^{1/4} dx,

and ``A_j = sqrt(2/pi) ||f^{(j)}||`` (likewise ``B_j`` for ``g`` and ``C_j``
for ``f g``). The norm labelled ``j`` integrates the ``(j+1)``-st derivative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .errors import DataError, DomainError
from .legendre_core import gauss_legendre_rule

__all__ = [
    "SQRT_2_OVER_PI",
    "SmoothnessData",
    "BoundEstimate",
    "weighted_norm",
    "smoothness_constant",
    "smoothness_data",
    "wang_coefficient_bound",
    "tail_bound_j1",
    "tail_bound_general",
    "mu_truncation_term",
    "mu_truncation_bound_general",
    "mu_truncation_bound_j1",
    "mu_truncation_bound_j2",
    "bound_curve",
    "DEFAULT_M_RANGE",
]

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
DEFAULT_NORM_ORDER = 400
# default M ranges for the tabulated j = 1 and j = 2 curves
DEFAULT_M_RANGE = {1: (3, 100), 2: (4, 100)}

_GENERAL_RTOL = 1e-14
_GENERAL_MAX_M = 10**6


@dataclass(frozen=True)
class SmoothnessData:
    """Smoothness order ``j`` and the scaled weighted norms of f, g and f g."""

    j: int
    A_j: float
    B_j: float
    C_j: float

    def __post_init__(self):
        if self.j < 1:
            raise DomainError(f"smoothness order must be >= 1, got {self.j}")
        for name in ("A_j", "B_j", "C_j"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise DomainError(f"{name} must be a finite non-negative number, got {v!r}")


@dataclass(frozen=True)
class BoundEstimate:
    """Partial sum of a positive infinite series, with its stopping record.

    The value underestimates the full series; ``stop_reason`` is
    ``"relative"`` when the last term fell below ``rtol`` times the running
    sum and ``"max_m"`` when the index cap was reached.
    """

    value: float
    first_m: int
    last_m: int
    terms: int
    stop_reason: str
    rtol: float
    underestimate: bool = True

    def __float__(self):
        return self.value


def _check_int(v, name, minimum):
    if isinstance(v, bool) or int(v) != v or v < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {v!r}")
    return int(v)


def weighted_norm(d, rule_order: int = DEFAULT_NORM_ORDER) -> float:
    """``int_{-1}^{1} |d(x)| (1 - x^2)^{-1/4} dx`` for a derivative sampler ``d``.

    With ``x = sin(theta)`` the integral becomes
    ``int_{-pi/2}^{pi/2} |d(sin theta)| sqrt(cos theta) dtheta``, which has no
    singularity; it is evaluated with a Gauss-Legendre rule of ``rule_order``
    nodes on the theta interval.
    """
    rule = gauss_legendre_rule(rule_order)
    theta = 0.5 * math.pi * rule.nodes
    values = np.broadcast_to(np.asarray(d(np.sin(theta)), dtype=float), theta.shape)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise DataError(f"derivative sampler returned {values[bad[0]]!r} at x = {np.sin(theta[bad[0]])!r}")
    return 0.5 * math.pi * float(np.dot(rule.weights, np.abs(values) * np.sqrt(np.cos(theta))))


def smoothness_constant(d, rule_order: int = DEFAULT_NORM_ORDER) -> float:
    """``sqrt(2/pi) * weighted_norm(d)``, i.e. ``A_j`` when ``d`` is ``f^{(j+1)}``."""
    return SQRT_2_OVER_PI * weighted_norm(d, rule_order)


def smoothness_data(j, f_deriv, g_deriv, fg_deriv, rule_order=DEFAULT_NORM_ORDER) -> SmoothnessData:
    """Build :class:`SmoothnessData` from samplers of the ``(j+1)``-st derivatives."""
    return SmoothnessData(
        j,
        smoothness_constant(f_deriv, rule_order),
        smoothness_constant(g_deriv, rule_order),
        smoothness_constant(fg_deriv, rule_order),
    )


def wang_coefficient_bound(j: int, n: int, norm: float, simplified: bool = False) -> float:
    """Upper bound on ``|alpha_n|`` from the weighted norm of ``f^{(j)}``.

    Sharp form::

        sqrt(2/pi) norm / (sqrt(n - (2j+1)/2) * prod_{i=1}^{j} (n - (2i-1)/2))

    and simplified form ``sqrt(2/pi) norm / (n - j)^((2j+1)/2)``, which is never
    smaller. For ``j = 0`` the bound is ``sqrt(2/pi) norm / sqrt(n - 1/2)``
    and both forms coincide.

    Raises
    ------
    DomainError
        Unless ``n >= j + 1`` (``n >= 1`` when ``j = 0``) and ``norm >= 0``.
    """
    j = _check_int(j, "j", 0)
    n = _check_int(n, "n", max(j + 1, 1))
    if not norm >= 0.0:
        raise DomainError(f"norm must be non-negative, got {norm!r}")
    if j == 0:
        return SQRT_2_OVER_PI * norm / math.sqrt(n - 0.5)
    if simplified:
        return SQRT_2_OVER_PI * norm / (n - j) ** ((2 * j + 1) / 2)
    denom = math.sqrt(n - (2 * j + 1) / 2)
    for i in range(1, j + 1):
        denom *= n - (2 * i - 1) / 2
    return SQRT_2_OVER_PI * norm / denom


def tail_bound_j1(N: int, C1: float) -> tuple[float, float]:
    """Uniform bound on ``|f g - sum_{n<=N} mu_n P_n|`` for once-smooth factors.

    Returns ``(C1 [pi - 2 arctan sqrt(N - 3/2)], 2 C1 / sqrt(N - 1))``; the
    first never exceeds the second.
    """
    N = _check_int(N, "N", 2)
    if not C1 >= 0.0:
        raise DomainError(f"C1 must be non-negative, got {C1!r}")
    exact = C1 * (math.pi - 2.0 * math.atan(math.sqrt(N - 1.5)))
    return exact, 2.0 * C1 / math.sqrt(N - 1)


def tail_bound_general(N: int, j: int, Cj: float) -> float:
    """Uniform bound on ``|f g - sum_{n<N} mu_n P_n|`` for ``j >= 2``::

        Cj / ((j-1) sqrt(N - (2j+1)/2)) * prod_{k=2}^{j} 1/(N - (2k-1)/2)
    """
    j = _check_int(j, "j", 2)
    N = _check_int(N, "N", j + 1)
    if not Cj >= 0.0:
        raise DomainError(f"Cj must be non-negative, got {Cj!r}")
    out = Cj / ((j - 1) * math.sqrt(N - (2 * j + 1) / 2))
    for k in range(2, j + 1):
        out /= N - (2 * k - 1) / 2
    return out


def _term_batch(k, j, ms):
    # int_{m-1}^{k+m+1} dx / ((k+2m-x-j)^p (x-j)^p) for each m, p = (2j+1)/2.
    # Mapped to s in [0, 1] and divided by the midpoint value so every
    # component is O(1) and one relative tolerance fits the whole batch.
    p = (2 * j + 1) / 2.0
    length = k + 2.0
    ms = ms.astype(float)

    def integrand(s):
        x = ms - 1.0 + length * s
        return length / ((k + 2.0 * ms - x - j) ** p * (x - j) ** p)

    scale = integrand(0.5)
    res, _ = quad_vec(lambda s: integrand(s) / scale, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, norm="max")
    return res * scale


def mu_truncation_term(k: int, m: int, j: int) -> float:
    """One outer term ``int_{m-1}^{k+m+1}`` of the general truncation bound (unit norms)."""
    return float(_term_batch(k, j, np.array([m]))[0])


def mu_truncation_bound_general(k: int, M: int, j: int, Aj: float, Bj: float,
                                rtol: float = _GENERAL_RTOL,
                                max_m: int = _GENERAL_MAX_M) -> BoundEstimate:
    """Bound on ``|mu_k - (mu_k truncated after m = M)|`` for ``j``-smooth factors::

        Aj Bj sum_{m=M+1}^{inf} int_{m-1}^{k+m+1} dx / ((k+2m-x-j)^((2j+1)/2) (x-j)^((2j+1)/2))

    Inner integrals use adaptive Gauss-Kronrod quadrature. The outer sum stops
    at the first term below ``rtol`` times the running sum, or at ``m = max_m``.
    """
    k = _check_int(k, "k", 0)
    j = _check_int(j, "j", 1)
    M = _check_int(M, "M", j + 1)
    for name, v in (("Aj", Aj), ("Bj", Bj)):
        if not v >= 0.0:
            raise DomainError(f"{name} must be non-negative, got {v!r}")
    if Aj == 0.0 or Bj == 0.0:
        return BoundEstimate(0.0, M + 1, M + 1, 0, "zero_norm", rtol)
    acc = 0.0
    start = M + 1
    chunk = 256
    while True:
        stop = min(start + chunk, max_m + 1)
        ms = np.arange(start, stop)
        terms = _term_batch(k, j, ms)
        running = acc + np.cumsum(terms)
        small = np.flatnonzero(terms < rtol * running)
        if small.size:
            i = small[0]
            acc = float(running[i])
            last, reason = int(ms[i]), "relative"
            break
        acc = float(running[-1])
        if stop > max_m:
            last, reason = max_m, "max_m"
            break
        start = stop
        chunk = min(chunk * 2, 1 << 16)
    return BoundEstimate(Aj * Bj * acc, M + 1, last, last - M, reason, rtol)


def mu_truncation_bound_j1(k: int, M: int) -> float:
    """Closed-form truncation bound for ``j = 1``, divided by ``A_1 B_1``::

        4 (k+2) / ((k+2M-2) (2 (sqrt((M-2)(k+M)) + M - 1) + k))
    """
    k = _check_int(k, "k", 0)
    M = _check_int(M, "M", 3)
    return 4.0 * (k + 2) / ((k + 2 * M - 2) * (2.0 * (math.sqrt((M - 2) * (k + M)) + M - 1) + k))


def mu_truncation_bound_j2(k: int, M: int) -> float:
    """Closed-form truncation bound for ``j = 2``, divided by ``A_2 B_2``."""
    k = _check_int(k, "k", 0)
    M = _check_int(M, "M", 4)
    u = k + 2 * M - 4
    num = 3.0 * u**2 * (u * math.log((k + M - 1) / (M - 3)) - 2.0 * (k + 2)) + 4.0 * (k + 2) ** 3
    den = 9.0 * (k + 2) ** 2 * u**3 * math.sqrt((M - 3) * (k + M - 1))
    return 4.0 * num / den


def bound_curve(k: int, j: int, M_lo: int | None = None, M_hi: int | None = None):
    """Rows ``(M, bound, log10(bound))`` of the closed-form bound over ``M_lo..M_hi``."""
    if j not in (1, 2):
        raise DomainError(f"closed-form bound curves exist for j = 1, 2; got j = {j}")
    lo_default, hi_default = DEFAULT_M_RANGE[j]
    lo = lo_default if M_lo is None else M_lo
    hi = hi_default if M_hi is None else M_hi
    if lo < lo_default:
        raise DomainError(f"j = {j} bound needs M >= {lo_default}, got {lo}")
    if hi < lo:
        raise DomainError(f"empty M range {lo}..{hi}")
    fn = mu_truncation_bound_j1 if j == 1 else mu_truncation_bound_j2
    rows = []
    for M in range(lo, hi + 1):
        v = fn(k, M)
        rows.append((M, v, math.log10(v)))
    return rows
