import math

import numpy as np
import pytest
from scipy.integrate import quad

from legendre_spectra import (
    DataError,
    DomainError,
    SmoothnessData,
    bound_curve,
    evaluate,
    get_sampler,
    mu_coefficients,
    mu_truncation_bound_general,
    mu_truncation_bound_j1,
    mu_truncation_bound_j2,
    project,
    smoothness_constant,
    tail_bound_general,
    tail_bound_j1,
    wang_coefficient_bound,
    weighted_norm,
)
from legendre_spectra.bounds import SQRT_2_OVER_PI, mu_truncation_term

SQRT_PI_2 = math.sqrt(math.pi / 2)


def g2(x):
    # second derivative of exp(x^2 - 2)
    return (2.0 + 4.0 * x * x) * np.exp(x * x - 2.0)


# --- weighted norm --------------------------------------------------------

def test_weighted_norm_zero():
    assert weighted_norm(lambda x: np.zeros_like(x)) == 0.0


def test_weighted_norm_of_one_is_beta_function():
    # int (1-x^2)^(-1/4) dx = B(1/2, 3/4)
    exact = math.gamma(0.5) * math.gamma(0.75) / math.gamma(1.25)
    assert weighted_norm(lambda x: np.ones_like(x), 2000) == pytest.approx(exact, rel=1e-9)
    assert weighted_norm(lambda x: np.ones_like(x)) == pytest.approx(exact, rel=1e-7)


def test_weighted_norm_of_abs_x():
    # int |x| (1-x^2)^(-1/4) dx = 4/3; |x| has a kink, so convergence is slow
    assert weighted_norm(lambda x: x, 2000) == pytest.approx(4 / 3, rel=1e-6)


def test_weighted_norm_smooth_against_scipy():
    oracle, _ = quad(lambda x: abs(g2(x)), -1, 1, weight="alg", wvar=(-0.25, -0.25), epsabs=0, epsrel=1e-13)
    assert weighted_norm(g2) == pytest.approx(oracle, rel=1e-7)


def test_weighted_norm_non_finite():
    with pytest.raises(DataError):
        weighted_norm(lambda x: np.where(x > 0.5, np.nan, 1.0))


def test_smoothness_data_validation():
    with pytest.raises(DomainError):
        SmoothnessData(0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        SmoothnessData(1, -1.0, 1.0, 1.0)


# --- Wang-type coefficient bound -----------------------------------------

def test_wang_examples():
    assert wang_coefficient_bound(1, 2, SQRT_PI_2) == pytest.approx(1 / (math.sqrt(0.5) * 1.5))
    assert wang_coefficient_bound(0, 1, SQRT_PI_2) == pytest.approx(math.sqrt(2.0))
    assert wang_coefficient_bound(1, 2, SQRT_PI_2, simplified=True) == pytest.approx(1.0)


def test_wang_domain():
    with pytest.raises(DomainError):
        wang_coefficient_bound(2, 2, 1.0)
    with pytest.raises(DomainError):
        wang_coefficient_bound(0, 0, 1.0)
    with pytest.raises(DomainError):
        wang_coefficient_bound(1, 3, -1.0)


def test_sharp_denominator_dominates_simplified():
    for j in range(1, 7):
        for n in range(j + 1, 201):
            sharp = math.sqrt(n - (2 * j + 1) / 2) * math.prod(n - (2 * i - 1) / 2 for i in range(1, j + 1))
            assert sharp >= (n - j) ** ((2 * j + 1) / 2) * (1 - 1e-14)
            assert wang_coefficient_bound(j, n, 1.0) <= wang_coefficient_bound(j, n, 1.0, simplified=True) * (1 + 1e-14)


def test_wang_bound_holds_for_exp():
    alpha = project(get_sampler("exp"), 30).coefficients
    norm = weighted_norm(np.exp)  # f'' = exp
    for n in range(2, 31):
        assert abs(alpha[n]) <= wang_coefficient_bound(1, n, norm)


# --- tail bounds --------------------------------------------------------

def test_tail_j1_examples():
    exact, simple = tail_bound_j1(2, 1.0)
    assert simple == pytest.approx(2.0)
    assert exact == pytest.approx(math.pi - 2 * math.atan(math.sqrt(0.5)))
    assert exact == pytest.approx(1.9106332362490186)
    assert tail_bound_j1(101, 1.0)[1] == pytest.approx(0.2)
    with pytest.raises(DomainError):
        tail_bound_j1(1, 1.0)


def test_tail_j1_exact_below_simplified():
    for N in range(2, 500):
        exact, simple = tail_bound_j1(N, 1.3)
        assert exact <= simple


def test_tail_general_examples():
    assert tail_bound_general(3, 2, 1.0) == pytest.approx(1 / (math.sqrt(0.5) * 1.5))
    # sqrt(N - (2j+1)/2) = sqrt(7.5) at N = 10, j = 2
    assert tail_bound_general(10, 2, 2.0) == pytest.approx(2 / (math.sqrt(7.5) * 8.5))
    assert tail_bound_general(7, 3, 0.0) == 0.0
    with pytest.raises(DomainError):
        tail_bound_general(2, 2, 1.0)
    with pytest.raises(DomainError):
        tail_bound_general(5, 1, 1.0)


def test_tail_dominance_for_product():
    # f = g = exp(x^2 - 2), so fg = exp(2x^2 - 4) and (fg)'' = (4 + 16 x^2) exp(2x^2 - 4)
    C1 = smoothness_constant(lambda x: (4 + 16 * x * x) * np.exp(2 * x * x - 4))
    a = project(get_sampler("manufactured_g"), 40)
    mu = mu_coefficients(a, a, 41, 40)
    x = np.linspace(-1, 1, 50)
    fg = np.exp(2 * x * x - 4)
    for N in range(2, 25):
        err = np.max(np.abs(fg - evaluate(mu[: N + 1], x)))
        assert err <= tail_bound_j1(N, C1)[0]


# --- mu truncation bounds ------------------------------------------------

def test_j1_examples():
    assert mu_truncation_bound_j1(2, 10) == pytest.approx(16 / (20 * (2 * (math.sqrt(96) + 9) + 2)))
    assert mu_truncation_bound_j1(2, 10) == pytest.approx(0.020204, abs=1e-6)
    assert mu_truncation_bound_j1(0, 3) == pytest.approx(0.26795, abs=1e-5)
    with pytest.raises(DomainError):
        mu_truncation_bound_j1(2, 2)


def test_j2_examples():
    v = mu_truncation_bound_j2(2, 4)
    u = 6
    by_hand = 4 * (3 * u**2 * (u * math.log(5) - 8) + 4 * 64) / (9 * 16 * u**3 * math.sqrt(5))
    assert v == pytest.approx(by_hand)
    assert 0 < v < math.inf
    with pytest.raises(DomainError):
        mu_truncation_bound_j2(2, 3)


def test_j2_decreasing():
    for k in range(21):
        vals = [mu_truncation_bound_j2(k, M) for M in range(5, 200)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_j2_decays_faster_than_j1():
    def slope(fn, k):
        return math.log(fn(k, 200) / fn(k, 100)) / math.log(2)

    for k in (0, 2, 10):
        assert slope(mu_truncation_bound_j2, k) < slope(mu_truncation_bound_j1, k) - 0.5


def _exact_term_j1(k, m):
    # closed-form antiderivative of ((x-p)(q-x))^(-3/2) with p = 1, q = k + 2m - 1
    p, q = 1.0, k + 2.0 * m - 1.0

    def F(x):
        return 2 * (2 * x - p - q) / ((q - p) ** 2 * math.sqrt((x - p) * (q - x)))

    return F(k + m + 1.0) - F(m - 1.0)


@pytest.mark.parametrize("k,m", [(0, 4), (2, 11), (2, 50), (10, 300)])
def test_general_term_matches_closed_form(k, m):
    assert mu_truncation_term(k, m, 1) == pytest.approx(_exact_term_j1(k, m), rel=1e-11)


def test_general_term_j2_against_scipy():
    f = lambda x: 1.0 / ((2 + 2 * 9 - x - 2) ** 2.5 * (x - 2) ** 2.5)
    oracle, _ = quad(f, 8, 2 + 9 + 1, epsabs=0, epsrel=1e-13)
    assert mu_truncation_term(2, 9, 2) == pytest.approx(oracle, rel=1e-11)


# 30-digit sums of the closed-form terms (mpmath nsum)
GENERAL_ORACLE = {
    (2, 10): 0.0182659862830079193720481879971,
    (0, 5): 0.049389988145357666867370789874,
    (10, 20): 0.0101459996418768071805064309104,
}


@pytest.mark.parametrize("k,M", sorted(GENERAL_ORACLE))
def test_general_bound_against_oracle(k, M):
    est = mu_truncation_bound_general(k, M, 1, 1.0, 1.0)
    assert est.stop_reason == "relative"
    assert est.underestimate
    assert est.first_m == M + 1
    assert est.value <= GENERAL_ORACLE[k, M]
    assert est.value == pytest.approx(GENERAL_ORACLE[k, M], rel=1e-8)


def test_general_bound_trivial_and_monotone():
    assert mu_truncation_bound_general(2, 10, 1, 0.0, 3.0).value == 0.0
    assert mu_truncation_bound_general(2, 20, 1, 1, 1).value < mu_truncation_bound_general(2, 10, 1, 1, 1).value
    scaled = mu_truncation_bound_general(2, 10, 1, 2.0, 3.0).value
    assert scaled == pytest.approx(6 * mu_truncation_bound_general(2, 10, 1, 1, 1).value)
    with pytest.raises(DomainError):
        mu_truncation_bound_general(2, 1, 1, 1, 1)


def test_general_bound_max_m_cap():
    est = mu_truncation_bound_general(2, 10, 1, 1, 1, max_m=500)
    assert est.stop_reason == "max_m"
    assert est.last_m == 500


def test_general_bound_below_closed_form():
    # The closed form bounds the sum by one more integral comparison, so it is
    # larger; the ratio approaches 1 as M grows.
    for k in range(0, 11, 2):
        ratios = []
        for M in (5, 10, 20):
            general = mu_truncation_bound_general(k, M, 1, 1, 1).value
            ratios.append(general / mu_truncation_bound_j1(k, M))
        assert all(0.75 < r < 1 for r in ratios)
        assert ratios == sorted(ratios)


@pytest.mark.xfail(strict=True, reason="numeric sum is 4-22% below the closed form; see notes")
def test_general_bound_within_five_percent_of_closed_form():
    for k in range(11):
        for M in (5, 10, 20):
            general = mu_truncation_bound_general(k, M, 1, 1, 1).value
            assert general == pytest.approx(mu_truncation_bound_j1(k, M), rel=0.05)


def test_bound_dominance_on_smooth_product():
    a = project(get_sampler("manufactured_g"), 60)
    A1 = SQRT_2_OVER_PI * weighted_norm(g2)
    full = mu_coefficients(a, a, 5, 60)
    for k in (0, 2, 4):
        for M in range(3, 31):
            err = abs(full[k] - mu_coefficients(a, a, k + 1, M)[k])
            assert err <= A1 * A1 * mu_truncation_bound_j1(k, M)


# --- curves ---------------------------------------------------------------

def test_bound_curve_rows():
    rows = bound_curve(2, 1)
    assert rows[0][0] == 3 and rows[-1][0] == 100
    row10 = rows[10 - 3]
    assert row10[1] == pytest.approx(0.020204, abs=1e-6)
    assert row10[2] == pytest.approx(math.log10(row10[1]))
    assert bound_curve(2, 2)[0][0] == 4
    with pytest.raises(DomainError):
        bound_curve(2, 2, 3, 10)
    with pytest.raises(DomainError):
        bound_curve(2, 3)
    with pytest.raises(DomainError):
        bound_curve(2, 1, 10, 5)


@pytest.mark.parametrize("j", [1, 2])
def test_bound_curves_decreasing(j):
    vals = [r[1] for r in bound_curve(2, j)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
