import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from funkineq import core
from funkineq.core import MeasureSpec, QuadratureConfig
from funkineq.errors import DivergentIntegral, DomainError
from funkineq.functions import Function1D, linear, quadratic_capped


def erf_taylor(x: float, terms: int = 60) -> float:
    # erf x = 2/sqrt(pi) sum (-1)^n x^{2n+1} / (n! (2n+1))
    s, term = 0.0, x
    for n in range(terms):
        s += term / (2 * n + 1)
        term *= -x * x / (n + 1)
    return 2 / math.sqrt(math.pi) * s


def test_normal_cdf_against_series():
    assert abs(float(core.normal_cdf(1.0)) - 0.841345) < 5e-7
    for x in (-2.5, -1.0, 0.0, 0.3, 1.7, 3.0):
        ref = 0.5 * (1 + erf_taylor(x / math.sqrt(2)))
        assert abs(float(core.normal_cdf(x)) - ref) < 1e-14


def test_normal_quantile_inverts_series_cdf():
    for p in (0.01, 0.2, 0.5, 0.8413447460685429, 0.975):
        z = float(core.normal_quantile(p))
        assert abs(0.5 * (1 + erf_taylor(z / math.sqrt(2))) - p) < 1e-13


def test_mills_ratio_against_quad():
    for r in (0.0, 0.5, 2.0, 6.0):
        tail, _ = integrate.quad(lambda x: math.exp(-(x * x - r * r) / 2), r, math.inf,
                                 epsabs=0, epsrel=1e-13)
        assert abs(float(core.mills_ratio(r)) - tail) < 1e-11 * tail


def test_mills_sup_is_sqrt_half_pi():
    ms = core.mills_sup()
    assert abs(ms.value - math.sqrt(math.pi / 2)) < 1e-12
    assert ms.argmax == 0.0 and ms.monotone


@pytest.mark.parametrize("k,ref", [(0, 1.0), (2, 1.0), (4, 3.0), (6, 15.0)])
def test_gaussian_moments(k, ref):
    v, e = core.weighted_integral(lambda x: x ** k, MeasureSpec.gaussian1d())
    assert abs(v - ref) < 1e-10 * ref and e < 1e-8


def test_gaussian_exponential_moment_and_log_form():
    mu = MeasureSpec.gaussian1d()
    v, _ = core.weighted_integral(lambda x: np.exp(0.7 * x), mu)
    assert abs(v - math.exp(0.245)) < 1e-12
    # 400 x is far beyond the float range after exponentiation; the log form copes
    lv, _ = core.weighted_log_integral(lambda x: 40.0 * x, mu)
    assert abs(lv - 800.0) < 1e-9


def test_subgaussian_second_moment():
    # p = 1.5 against scipy quadrature of the normalized density
    z, _ = integrate.quad(lambda x: math.exp(-abs(x) ** 1.5), -math.inf, math.inf, epsrel=1e-13)
    m2, _ = integrate.quad(lambda x: x * x * math.exp(-abs(x) ** 1.5), -math.inf, math.inf,
                           epsrel=1e-13)
    v, _ = core.weighted_integral(lambda x: x * x, MeasureSpec.subgaussian(1.5))
    assert abs(v - m2 / z) < 1e-9
    # p = 2: exp(-x^2)/sqrt(pi) has variance 1/2
    v, _ = core.weighted_integral(lambda x: x * x, MeasureSpec.subgaussian(2.0))
    assert abs(v - 0.5) < 1e-10


def test_kinked_integrand_uses_panels():
    f = quadratic_capped(1.5)
    v, _ = core.weighted_integral(f, MeasureSpec.gaussian1d())
    ref, _ = integrate.quad(lambda x: 0.5 * min(abs(x), 1.5) ** 2 * math.exp(-x * x / 2)
                            / math.sqrt(2 * math.pi), -40, 40, points=[-1.5, 1.5],
                            epsabs=1e-14, epsrel=1e-13, limit=200)
    assert abs(v - ref) < 1e-11


def test_divergent_weight_is_flagged():
    with pytest.raises(DivergentIntegral):
        core.weighted_integral(lambda x: np.exp(x * x), MeasureSpec.gaussian1d())


def test_halfline_integral():
    # the weight e^{-x^2/2} is built in
    v, _ = core.halfline_integral(lambda x: 1.0 + 0 * x)
    assert abs(v - math.sqrt(math.pi / 2)) < 1e-12
    lv, _ = core.halfline_log_integral(lambda x: 0 * x)
    assert abs(lv - math.log(math.sqrt(math.pi / 2))) < 1e-12


def test_centered_has_zero_mean():
    g = core.centered(linear(0.3).shifted(-2.0))
    assert abs(core.mean(g, MeasureSpec.gaussian1d())) < 1e-13


def test_poisson_pmf_and_tail():
    for lam in (0.5, 1.0, 5.0):
        k = np.arange(core.poisson_truncation(lam) + 1)
        assert abs(float(np.sum(core.poisson_pmf(lam, k))) - 1) < 1e-14
        direct = float(np.sum(core.poisson_pmf(lam, np.arange(4, 400))))
        assert abs(float(core.poisson_tail(lam, 3)) - direct) < 1e-14 * max(1, direct) + 1e-300


@pytest.mark.parametrize("n", [1, 10, 100, 1000])
def test_stirling_bounds(n):
    rep = core.stirling_bounds_check(n)
    assert rep.passed
    assert rep.lower <= rep.log_ratio + rep.rounding


def test_quadrature_config_validation_and_env(monkeypatch):
    with pytest.raises(ValueError):
        QuadratureConfig(order=4)
    monkeypatch.setenv("FUNKINEQ_QUAD_ORDER", "64")
    assert QuadratureConfig().order == 64
    monkeypatch.setenv("FUNKINEQ_QUAD_ORDER", "x")
    with pytest.raises(ValueError):
        QuadratureConfig()


def test_perturbed_measure_bounds():
    h = Function1D(lambda x: 1 + 0.5 * np.cos(x), lambda x: -0.5 * np.sin(x))
    nu = MeasureSpec.perturbed(MeasureSpec.gaussian1d(), h)
    v, _ = core.weighted_integral(lambda x: 1.0 + 0 * x, nu)
    assert abs(v - 1) < 1e-12 and 0 < nu.a <= nu.b
    with pytest.raises(DomainError):
        MeasureSpec.perturbed(MeasureSpec.gaussian1d(), h, a=0.9, b=1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 2.0))
def test_linear_exponential_moment_property(b, a):
    # int e^{a x + b} dgamma = e^{b + a^2/2}
    v, _ = core.weighted_log_integral(lambda x: a * x + b, MeasureSpec.gaussian1d())
    assert abs(v - (b + a * a / 2)) < 1e-11


@pytest.mark.parametrize("order", [16, 24, 48])
def test_low_orders_escalate_instead_of_failing(order):
    q = QuadratureConfig(order=order)
    v, _ = core.weighted_integral(lambda x: np.exp(0.5 * x), MeasureSpec.gaussian1d(), q)
    assert abs(v - math.exp(0.125)) < 1e-10
    f = quadratic_capped(1.5)
    v, _ = core.weighted_integral(f, MeasureSpec.gaussian1d(), q)
    ref, _ = integrate.quad(lambda x: 0.5 * min(abs(x), 1.5) ** 2 * math.exp(-x * x / 2)
                            / math.sqrt(2 * math.pi), -40, 40, points=[-1.5, 1.5],
                            epsabs=1e-14, epsrel=1e-13, limit=200)
    assert abs(v - ref) < 1e-10
