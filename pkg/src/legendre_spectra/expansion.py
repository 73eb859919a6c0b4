"""Fourier-Legendre series and the coefficients of products of series.

A :class:`LegendreSeries` stores ``c_0..c_N`` of ``sum_n c_n P_n(x)``; reading
an index past ``N`` yields zero, so finite series stand in for infinite ones
whose tail vanishes.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _backend
from .errors import DataError, DomainError
from .legendre_core import (
    QuadratureRule,
    gauss_legendre_rule,
    legendre_eval_all,
    linearization_coefficient,
)

__all__ = [
    "LegendreSeries",
    "FunctionSampler",
    "REGISTRY",
    "get_sampler",
    "parse_sampler",
    "sampler_from_series",
    "quadrature_margin",
    "default_quadrature_order",
    "project",
    "project_power_series",
    "monomial_projection",
    "evaluate",
    "product_coefficients_finite",
    "mu_coefficient",
    "mu_coefficients",
    "power_series",
    "partial_product_sum_direct",
    "partial_product_sum_reindexed",
]

QUAD_MARGIN_ENV = "LEGENDRE_SPECTRA_QUAD_MARGIN"
DEFAULT_QUAD_MARGIN = 16


@dataclass(frozen=True)
class LegendreSeries:
    """Finite Legendre series; ``coefficients[n]`` multiplies ``P_n``."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float).ravel()
        if c.size == 0:
            raise DataError("a Legendre series needs at least one coefficient")
        bad = np.flatnonzero(~np.isfinite(c))
        if bad.size:
            raise DataError(f"non-finite coefficient at index {bad[0]}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __len__(self):
        return self.coefficients.size

    def __iter__(self):
        return iter(self.coefficients.tolist())

    def __eq__(self, other):
        if not isinstance(other, LegendreSeries):
            return NotImplemented
        return np.array_equal(self.coefficients, other.coefficients)

    def __hash__(self):
        return hash(self.coefficients.tobytes())

    def coefficient(self, n: int) -> float:
        """Coefficient ``n``, or 0.0 beyond the stored degree."""
        if n < 0:
            raise DomainError(f"negative coefficient index {n}")
        return float(self.coefficients[n]) if n <= self.degree else 0.0

    def truncate(self, degree: int) -> "LegendreSeries":
        """Cut or zero-pad to exactly ``degree + 1`` coefficients."""
        if degree < 0:
            raise DomainError(f"degree must be non-negative, got {degree}")
        out = np.zeros(degree + 1)
        keep = min(degree, self.degree) + 1
        out[:keep] = self.coefficients[:keep]
        return LegendreSeries(out)

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class FunctionSampler:
    """A named real function on [-1, 1], vectorized over NumPy arrays.

    ``monomials`` optionally holds power-series coefficients (``s[m]``
    multiplies ``x**m``) accurate on the whole interval; when present the
    function can be projected exactly with :func:`project_power_series`.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    monomials: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))


# Taylor series of exp(scale * x**2) * poly(x**2) are summed to x**(2*_TAYLOR_TERMS).
_TAYLOR_TERMS = 100


def _exp_square_monomials(scale, shift, poly_in_x2=(1.0,)):
    """Power series of exp(scale x^2 + shift) * sum_i poly[i] x^(2i)."""
    k = np.arange(_TAYLOR_TERMS + 1)
    log_fact = np.array([math.lgamma(i + 1) for i in k])
    exp_terms = np.exp(k * math.log(scale) - log_fact + shift)
    even = np.zeros(_TAYLOR_TERMS + len(poly_in_x2))
    for i, p in enumerate(poly_in_x2):
        even[i : i + exp_terms.size] += p * exp_terms
    s = np.zeros(2 * even.size - 1)
    s[::2] = even
    return s


def _poly_sampler(coeffs):
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise DataError("poly sampler needs a non-empty list of monomial coefficients")
    return FunctionSampler(
        f"poly:{c.tolist()}",
        lambda x: np.polynomial.polynomial.polyval(x, c),
        monomials=c,
    )


def _sin_k(k=1.0):
    k = float(k)
    return FunctionSampler(f"sin_k:{k:g}", lambda x: np.sin(k * x))


REGISTRY: dict[str, Callable[..., FunctionSampler]] = {
    "exp": lambda: FunctionSampler("exp", np.exp),
    "sin_k": _sin_k,
    "runge": lambda: FunctionSampler("runge", lambda x: 1.0 / (1.0 + 25.0 * x * x)),
    "manufactured_g": lambda: FunctionSampler(
        "manufactured_g",
        lambda x: np.exp(x * x - 2.0),
        monomials=_exp_square_monomials(1.0, -2.0),
    ),
    # e^{x^2-2}(4x^4 + 2x^2 - 3): spatial part of the e^{-t} forcing term
    "manufactured_forcing_decay": lambda: FunctionSampler(
        "manufactured_forcing_decay",
        lambda x: np.exp(x * x - 2.0) * (4 * x**4 + 2 * x**2 - 3),
        monomials=_exp_square_monomials(1.0, -2.0, (-3.0, 2.0, 4.0)),
    ),
    # -e^{2x^2-4}: spatial part of the e^{-2t} forcing term
    "manufactured_forcing_square": lambda: FunctionSampler(
        "manufactured_forcing_square",
        lambda x: -np.exp(2 * x * x - 4.0),
        monomials=-_exp_square_monomials(2.0, -4.0),
    ),
    "poly": _poly_sampler,
}


def get_sampler(name: str, param=None) -> FunctionSampler:
    """Look up a built-in sampler; ``param`` feeds ``sin_k`` (wavenumber) and ``poly``."""
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise DomainError(
            f"unknown function {name!r}; known: {', '.join(sorted(REGISTRY))}"
        ) from None
    if name == "poly":
        if param is None:
            raise DomainError("poly needs monomial coefficients, e.g. poly:[0,0,1]")
        return factory(param)
    if name == "sin_k":
        return factory() if param is None else factory(param)
    if param is not None:
        raise DomainError(f"function {name!r} takes no parameter")
    return factory()


def parse_sampler(text: str) -> FunctionSampler:
    """Parse ``name`` or ``name:param``, e.g. ``sin_k:3`` or ``poly:[0,0,1]``."""
    name, _, raw = text.partition(":")
    name = name.strip()
    if not raw:
        return get_sampler(name)
    raw = raw.strip()
    if name == "poly":
        body = raw.strip("[]() ")
        try:
            coeffs = [float(v) for v in body.split(",") if v.strip()]
        except ValueError:
            raise DomainError(f"cannot parse poly coefficients {raw!r}") from None
        return get_sampler("poly", coeffs)
    try:
        return get_sampler(name, float(raw))
    except ValueError:
        raise DomainError(f"cannot parse parameter {raw!r} for {name!r}") from None


def sampler_from_series(series: LegendreSeries, name="series") -> FunctionSampler:
    """Sampler backed by tabulated Legendre coefficients."""
    return FunctionSampler(name, lambda x: evaluate(series, x))


def quadrature_margin() -> int:
    raw = os.environ.get(QUAD_MARGIN_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_QUAD_MARGIN
    try:
        margin = int(raw)
    except ValueError:
        raise DomainError(f"{QUAD_MARGIN_ENV} must be an integer, got {raw!r}") from None
    if margin < 1:
        raise DomainError(f"{QUAD_MARGIN_ENV} must be at least 1, got {margin}")
    return margin


def default_quadrature_order(degree: int) -> int:
    """Quadrature order used to project onto degree ``degree``: ``degree + margin``."""
    return degree + quadrature_margin()


def project(f, degree: int, rule: QuadratureRule | None = None) -> LegendreSeries:
    """Legendre coefficients ``0..degree`` of ``f`` by Gauss-Legendre quadrature.

    ``c_n = (2n+1)/2 * sum_i w_i f(x_i) P_n(x_i)``.

    Raises
    ------
    DomainError
        If the rule has fewer than ``degree + 1`` nodes.
    DataError
        If ``f`` returns a non-finite value; the message names the node.
    """
    if degree < 0:
        raise DomainError(f"degree must be non-negative, got {degree}")
    if rule is None:
        rule = gauss_legendre_rule(default_quadrature_order(degree))
    if rule.order < degree + 1:
        raise DomainError(
            f"quadrature order {rule.order} too low for degree {degree}; need >= {degree + 1}"
        )
    values = np.broadcast_to(np.asarray(f(rule.nodes), dtype=float), rule.nodes.shape)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = bad[0]
        raise DataError(
            f"sampler returned {values[i]!r} at quadrature node {i} (x = {rule.nodes[i]!r})"
        )
    basis = legendre_eval_all(degree, rule.nodes)
    n = np.arange(degree + 1)
    return LegendreSeries((2 * n + 1) / 2.0 * (basis @ (rule.weights * values)))


def monomial_projection(m: int, n: int) -> float:
    """Coefficient of ``P_n`` in ``x**m``.

    Zero unless ``m >= n`` and ``m - n`` is even, otherwise
    ``(2n+1) 2^n m! ((m+n)/2)! / (((m-n)/2)! (m+n+1)!)``.
    """
    if n > m or (m - n) % 2:
        return 0.0
    h_plus, h_minus = (m + n) // 2, (m - n) // 2
    log_val = (
        n * math.log(2.0)
        + math.lgamma(m + 1)
        + math.lgamma(h_plus + 1)
        - math.lgamma(h_minus + 1)
        - math.lgamma(m + n + 2)
    )
    return (2 * n + 1) * math.exp(log_val)


def project_power_series(monomials, degree: int) -> LegendreSeries:
    """Exact Legendre coefficients of ``sum_m s[m] x**m``, truncated to ``degree``.

    Each coefficient is a sum over monomials with closed-form weights, so no
    quadrature noise enters; coefficients far below machine epsilon keep their
    relative accuracy when the contributing monomial terms share a sign.
    Accepts a :class:`FunctionSampler` that carries ``monomials``.
    """
    if isinstance(monomials, FunctionSampler):
        if monomials.monomials is None:
            raise DomainError(f"sampler {monomials.name!r} has no power series")
        monomials = monomials.monomials
    s = np.asarray(monomials, dtype=float)
    out = np.zeros(degree + 1)
    for n in range(degree + 1):
        acc = [s[m] * monomial_projection(m, n) for m in range(n, s.size, 2) if s[m] != 0.0]
        out[n] = math.fsum(acc)
    return LegendreSeries(out)


def evaluate(s: LegendreSeries, x):
    """Partial sum ``sum_n c_n P_n(x)``; ``x`` scalar or array in [-1, 1]."""
    coeffs = s.coefficients if isinstance(s, LegendreSeries) else np.asarray(s, float)
    basis = legendre_eval_all(coeffs.size - 1, x)
    out = np.tensordot(coeffs, basis, axes=1)
    return float(out) if np.ndim(out) == 0 else out


def _coeffs(s):
    return s.coefficients if isinstance(s, LegendreSeries) else np.asarray(s, dtype=float)


def product_coefficients_finite(a, b, degree: int | None = None) -> LegendreSeries:
    """Exact Legendre coefficients of the product of two finite series.

    The result has degree ``deg(a) + deg(b)`` unless ``degree`` asks for a
    truncation (or zero padding).
    """
    ac, bc = _coeffs(a), _coeffs(b)
    if ac.size == 0 or bc.size == 0:
        raise DataError("product needs non-empty series")
    if degree is None:
        degree = ac.size + bc.size - 2
    return LegendreSeries(_backend.legendre_product(ac, bc, degree + 1, -1))


def mu_coefficients(alpha, beta, n_out: int, M: int) -> np.ndarray:
    """``[mu_0, ..., mu_{n_out-1}]`` with the outer series cut after ``m = M``."""
    if M < 0:
        raise DomainError(f"M must be non-negative, got {M}")
    return _backend.legendre_product(_coeffs(alpha), _coeffs(beta), n_out, M)


def mu_coefficient(alpha, beta, k: int, M: int) -> float:
    """Coefficient ``k`` of the product series, outer sum truncated at ``m = M``::

        sum_{m=0}^{M} sum_{ell=m}^{k+m} alpha[k+2m-ell] beta[ell] A[m, k+2m, ell]
    """
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    return float(mu_coefficients(alpha, beta, k + 1, M)[k])


def power_series(a, p: int, cap: int) -> LegendreSeries:
    """Coefficients of ``f**p`` by repeated products, each truncated to degree ``cap``."""
    if p < 1:
        raise DomainError(f"p must be a positive integer, got {p}")
    if cap < 0:
        raise DomainError(f"cap must be non-negative, got {cap}")
    base = _coeffs(a)
    acc = np.zeros(cap + 1)
    keep = min(cap + 1, base.size)
    acc[:keep] = base[:keep]
    for _ in range(p - 1):
        acc = _backend.legendre_product(acc, base, cap + 1, -1)
    return LegendreSeries(acc)


def partial_product_sum_direct(alpha, beta, N: int, x):
    """``sum_{k<=N} sum_{ell<=k} sum_{j<=min(k-ell,ell)} a[k-ell] b[ell] A[j,k,ell] P_{k-2j}(x)``.

    Evaluated literally in this summation order; a reference for the
    reindexed form.
    """
    ac, bc = _coeffs(alpha), _coeffs(beta)
    basis = legendre_eval_all(N, x)
    total = np.zeros_like(basis[0])
    for k in range(N + 1):
        for ell in range(k + 1):
            if k - ell >= ac.size or ell >= bc.size:
                continue
            w = ac[k - ell] * bc[ell]
            for j in range(min(k - ell, ell) + 1):
                total = total + w * linearization_coefficient(j, k, ell) * basis[k - 2 * j]
    return total


def partial_product_sum_reindexed(alpha, beta, N: int, x):
    """``sum_{n<=N} [sum_{m<=(N-n)/2} sum_{ell=m}^{n+m} a[n+2m-ell] b[ell] A[m,n+2m,ell]] P_n(x)``.

    Evaluated literally in this summation order.
    """
    ac, bc = _coeffs(alpha), _coeffs(beta)
    basis = legendre_eval_all(N, x)
    total = np.zeros_like(basis[0])
    for n in range(N + 1):
        bracket = 0.0
        for m in range((N - n) // 2 + 1):
            for ell in range(m, n + m + 1):
                ia = n + 2 * m - ell
                if ia >= ac.size or ell >= bc.size:
                    continue
                bracket += ac[ia] * bc[ell] * linearization_coefficient(m, n + 2 * m, ell)
        total = total + bracket * basis[n]
    return total
