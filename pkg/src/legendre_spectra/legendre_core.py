"""Legendre polynomials, rising factorials, linearization coefficients and
Gauss-Legendre quadrature.

The product of two Legendre polynomials expands as

.. math::

    P_{k-\\ell}(x) P_\\ell(x) = \\sum_{j=0}^{\\min(k-\\ell, \\ell)} A_{jk\\ell} P_{k-2j}(x)

with strictly positive weights :math:`A_{jk\\ell}` that sum to one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "QuadratureRule",
    "legendre_eval",
    "legendre_eval_all",
    "legendre_vandermonde",
    "rising_factorial",
    "half_ratio_table",
    "linearization_coefficient",
    "product_linearization",
    "gauss_legendre_rule",
]

# Below this length rising factorials are plain products; above, log-gamma.
_PRODUCT_CUTOFF = 64
_NEWTON_MAX_ITER = 100
_NEWTON_TOL = 1e-15
_LOG_GAMMA_HALF = math.lgamma(0.5)
_LOG_GAMMA_THREE_HALVES = math.lgamma(1.5)


def _check_unit_interval(x):
    xa = np.asarray(x, dtype=float)
    if not np.all(np.abs(xa) <= 1.0):
        raise DomainError(f"x must lie in [-1, 1], got {x!r}")
    return xa


def _check_degree(n, name="n"):
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {n!r}")
    return int(n)


def legendre_eval(n: int, x: float) -> float:
    """Evaluate :math:`P_n(x)` with the three-term recurrence.

    Raises
    ------
    DomainError
        If ``n`` is negative or ``|x| > 1``.
    """
    n = _check_degree(n)
    x = float(_check_unit_interval(x))
    p_prev, p = 0.0, 1.0
    for k in range(n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p


def legendre_eval_all(n_max: int, x):
    """Return ``[P_0(x), ..., P_{n_max}(x)]``.

    ``x`` may be a scalar (result has shape ``(n_max + 1,)``) or an array
    (result has shape ``(n_max + 1,) + x.shape``).
    """
    n_max = _check_degree(n_max, "n_max")
    xa = _check_unit_interval(x)
    out = np.empty((n_max + 1,) + xa.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = xa
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1) * xa * out[k] - k * out[k - 1]) / (k + 1)
    return out


def legendre_vandermonde(n_max: int, x) -> np.ndarray:
    """Matrix ``V[i, n] = P_n(x_i)`` for a 1-D array of points."""
    return legendre_eval_all(n_max, np.atleast_1d(np.asarray(x, dtype=float))).T


def _legendre_and_derivative(n, x):
    # P_n and P_n' at interior points; x is an array with |x| < 1.
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    for k in range(n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def rising_factorial(a: float, r: int) -> float:
    """Pochhammer symbol :math:`(a)_r = a (a+1) \\cdots (a+r-1)`, with ``(a)_0 = 1``.

    Products longer than 64 factors with ``a > 0`` go through log-gamma; the
    result overflows to ``inf`` rather than raising.
    """
    r = _check_degree(r, "r")
    if r > _PRODUCT_CUTOFF and a > 0:
        log_val = math.lgamma(a + r) - math.lgamma(a)
        return math.exp(log_val) if log_val < 709.78 else math.inf
    out = 1.0
    for i in range(r):
        out *= a + i
    return out


def half_ratio_table(n: int) -> np.ndarray:
    """Return ``lam[r] = (1/2)_r / r!`` for ``r = 0..n``.

    Built by the ratio recurrence ``lam[r] = lam[r-1] (r - 1/2) / r``; the
    values decay like ``1/sqrt(pi r)`` so no overflow is possible.
    """
    n = _check_degree(n)
    lam = np.empty(n + 1)
    lam[0] = 1.0
    for r in range(1, n + 1):
        lam[r] = lam[r - 1] * (r - 0.5) / r
    return lam


def _log_half_ratio(r):
    # log((1/2)_r / r!)
    return math.lgamma(r + 0.5) - _LOG_GAMMA_HALF - math.lgamma(r + 1)


@lru_cache(maxsize=65536)
def _linearization_cached(j, k, ell):
    s = k - j
    log_a = (
        _log_half_ratio(j)
        + _log_half_ratio(k - ell - j)
        + _log_half_ratio(ell - j)
        + math.lgamma(s + 1)
        - (math.lgamma(s + 1.5) - _LOG_GAMMA_THREE_HALVES)
    )
    return math.exp(log_a) * (2 * (k - 2 * j) + 1)


def linearization_coefficient(j: int, k: int, ell: int) -> float:
    """The weight :math:`A_{jk\\ell}` of :math:`P_{k-2j}` in :math:`P_{k-\\ell} P_\\ell`.

    Evaluated as a sum of log-gamma terms followed by one exponential, which
    stays finite for any degree since every factor is positive and the result
    lies in ``(0, 1]``.

    Raises
    ------
    DomainError
        Unless ``0 <= j <= min(k - ell, ell)`` and ``0 <= ell <= k``.
    """
    for name, v in (("j", j), ("k", k), ("ell", ell)):
        _check_degree(v, name)
    j, k, ell = int(j), int(k), int(ell)
    if ell > k or j > min(k - ell, ell):
        raise DomainError(
            f"A[j={j}, k={k}, ell={ell}] is undefined: need 0 <= j <= min(k-ell, ell), ell <= k"
        )
    if ell == 0 or ell == k:
        # P_k P_0 = P_k exactly; log-gamma would give 1 + O(eps)
        return 1.0
    return _linearization_cached(j, k, ell)


def product_linearization(m: int, n: int) -> list[tuple[int, float]]:
    """Expand :math:`P_m P_n` as ``[(degree, weight), ...]``, highest degree first."""
    m = _check_degree(m, "m")
    n = _check_degree(n, "n")
    # canonical order makes the result bit-identical under m <-> n
    lo, hi = min(m, n), max(m, n)
    k = lo + hi
    return [(k - 2 * j, linearization_coefficient(j, k, lo)) for j in range(lo + 1)]


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1].

    Nodes are strictly increasing and symmetric about zero; the rule
    integrates polynomials of degree ``2 * order - 1`` exactly.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        """Apply the rule to function values sampled at :attr:`nodes`."""
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=128)
def gauss_legendre_rule(order: int) -> QuadratureRule:
    """Gauss-Legendre rule with ``order`` nodes.

    Roots of :math:`P_{order}` are found by Newton iteration started from
    ``cos(pi (i + 0.75) / (order + 0.5))``.

    Raises
    ------
    ConvergenceError
        If Newton has not converged to 1e-15 within 100 iterations.
    """
    if isinstance(order, bool) or int(order) != order or order < 1:
        raise DomainError(f"order must be a positive integer, got {order!r}")
    order = int(order)
    if order == 1:
        nodes, weights = np.array([0.0]), np.array([2.0])
    else:
        half = (order + 1) // 2
        i = np.arange(half)
        x = np.cos(np.pi * (i + 0.75) / (order + 0.5))
        for _ in range(_NEWTON_MAX_ITER):
            p, dp = _legendre_and_derivative(order, x)
            dx = p / dp
            x = x - dx
            if np.max(np.abs(dx)) <= _NEWTON_TOL:
                break
        else:
            raise ConvergenceError(
                f"Newton iteration for Gauss-Legendre order {order} did not converge "
                f"(last max |dx| = {np.max(np.abs(dx)):.3e})"
            )
        _, dp = _legendre_and_derivative(order, x)
        w = 2.0 / ((1.0 - x * x) * dp * dp)
        if order % 2:
            # middle root is exactly zero by symmetry
            x[-1] = 0.0
        # x holds the non-negative half in decreasing order; mirror it
        nodes = np.concatenate([-x, x[::-1][order % 2:]])
        weights = np.concatenate([w, w[::-1][order % 2:]])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order, nodes, weights)
