import math

import numpy as np
import pytest
from scipy import integrate, special

from funkineq import checkers as K
from funkineq import functions as F
from funkineq.core import MeasureSpec
from funkineq.errors import DomainError, NotLogConcave
from funkineq.functions import Function1D

SUITE = F.default_suite()
SQ2PI = math.sqrt(2 * math.pi)


def ok(r):
    return r.satisfied or r.vacuous


def gauss_quad(fn, pts=()):
    v, _ = integrate.quad(lambda x: fn(x) * math.exp(-x * x / 2) / SQ2PI, -30, 30,
                          points=list(pts) or None, epsabs=1e-14, epsrel=1e-12, limit=400)
    return v


# ---------------------------------------------------------------------------
# closed forms and independent quadrature

@pytest.mark.parametrize("a", [0.2, 0.5, 1.0])
def test_bg_linear_closed_form(a):
    # centered a x: lhs a^2/2, rhs (c/(alpha - c)) alpha a^2
    for alpha in (1.0, 2.0):
        r = K.check_bg(F.linear(a), alpha)
        assert abs(r.lhs - a * a / 2) < 1e-12
        assert abs(r.rhs - 0.5 / (alpha - 0.5) * alpha * a * a) < 1e-12


def test_ir_linear_and_quad_oracle():
    r = K.check_ir(F.linear(1.0))
    assert abs(r.lhs - 0.5) < 1e-12 and abs(r.rhs - 10 * math.exp(0.5) / 2) < 1e-11
    f = F.sin_scaled(1.0)
    m = gauss_quad(lambda x: math.sin(x))
    lhs = math.log(gauss_quad(lambda x: math.exp(math.sin(x) - m)))
    rhs = 10 * gauss_quad(lambda x: math.exp(math.cos(x) ** 2 / 2) / (1 + abs(math.cos(x))))
    r = K.check_ir(f)
    assert abs(r.lhs - lhs) < 1e-10 and abs(r.rhs - rhs) < 1e-9


def test_ir_sqrt_chain():
    for f in SUITE:
        r = K.check_ir_sqrt(f)
        assert ok(r) and (r.vacuous or r.params["chain_ok"])


def test_exp_hardy_at_zero():
    r = K.check_exp_hardy(F.constant(0.0))
    assert abs(r.lhs - math.log(math.sqrt(math.pi / 2))) < 1e-12
    assert abs(r.rhs - (math.sqrt(math.pi / 2) + 5.14)) < 1e-12


def test_beta_constants():
    assert abs(K.c_beta(1.5) - (5 / 0.25 - math.log(1.5 - math.sqrt(5) + 1))) < 1e-12
    assert abs(K.c_beta(1.5) - 21.332) < 1e-3
    assert abs(K.kappa_hardy(1.5) - math.sqrt(2) * 1.5 / 3.5) < 1e-15
    assert abs(K.kappa_cmp(2.0) - (1 / math.sqrt(2) + 1 / math.sqrt(2))) < 1e-15


# ---------------------------------------------------------------------------
# suites

@pytest.mark.parametrize("f", SUITE, ids=lambda f: f.tag)
def test_gaussian_checkers_on_suite(f):
    reps = [K.check_bg(f), K.check_bg(f, 2.0), K.check_ir(f), K.check_ir_sqrt(f),
            K.check_exp_hardy(f), K.check_cmp(f, 1.5), K.median_variant_check(f)]
    reps += [K.check_beta_hardy(f, b) for b in (1.3, 1.5, 1.8)]
    bad = [(r.inequality_id, r.margin) for r in reps if not ok(r)]
    assert not bad


def test_admissibility_gate():
    with pytest.raises(DomainError, match="alpha must exceed c=0.5"):
        K.check_bg(F.linear(1.0), 0.4)
    with pytest.raises(DomainError):
        K.check_cmp(F.linear(1.0), 1.5, kappa=10.0)


@pytest.mark.parametrize("f", SUITE, ids=lambda f: f.tag)
def test_reduction_pipeline(f):
    r = K.reduction_pipeline_check(f)
    assert ok(r), r.params


# ---------------------------------------------------------------------------
# transfers

def test_holley_stroock_transfer():
    h = Function1D(lambda x: 1 + 0.5 * np.cos(x), lambda x: -0.5 * np.sin(x))
    for f in SUITE[:8]:
        for base in ("ir", "ir-sqrt", "bg"):
            assert ok(K.holley_stroock_transfer(base, h, f))


def test_transport_to_scaled_gaussian():
    # V = 0.5 x^2 gives N(0, 1/2); the monotone map is x / sqrt 2
    mu = MeasureSpec.logconcave(F.quadratic(0.5))
    tr = K.monotone_transport(mu, [-2.0, -0.5, 0.0, 1.0, 3.0])
    assert np.allclose(tr.T, np.array([-2.0, -0.5, 0.0, 1.0, 3.0]) / math.sqrt(2), atol=1e-9)
    assert abs(tr.lipschitz - 1 / math.sqrt(2)) < 1e-6


def test_contraction_transfer_and_rejection():
    quartic = Function1D(lambda x: 0.1 * x ** 4, lambda x: 0.4 * x ** 3, lambda x: 1.2 * x * x)
    mu = MeasureSpec.logconcave(quartic)
    for f in SUITE[:8]:
        assert ok(K.contraction_transfer_1d(mu, f))
    wide = MeasureSpec.logconcave(F.quadratic(-0.3))
    with pytest.raises(NotLogConcave):
        K.contraction_transfer_1d(wide, F.linear(1.0))


def test_maximal_median_and_median_variant():
    assert abs(K.maximal_median(F.linear(1.0))) < 1e-9
    assert abs(K.maximal_median(F.exp_scaled(1.0)) - 1.0) < 1e-9
    # a step: gamma(g > t) = 1/2 on a whole interval; the maximal median is its top
    step = F.piecewise([-1e-3, 1e-3], [0.0, 1.0])
    assert abs(K.maximal_median(step) - 0.5) < 2e-3
    for f in SUITE:
        assert ok(K.median_variant_check(f))


# ---------------------------------------------------------------------------
# optimality family

def lhs_closed(N):
    # int e^{min(|x|, N)^2/2} dgamma = (2N + 2 e^{N^2/2} int_N^inf e^{-x^2/2} dx) / sqrt(2 pi)
    return math.log((2 * N + 2 * special.erfcx(N / math.sqrt(2)) * math.sqrt(math.pi / 2)) / SQ2PI)


def rhs_quad(H, N):
    inner, _ = integrate.quad(lambda t: 1 / max(1.0, H(t)), 0, N, epsabs=1e-14, epsrel=1e-13,
                              limit=200)
    return 2 * inner / SQ2PI + 2 * special.ndtr(-N)


FROZEN_LOG_SQUARED = [-0.396557, 0.018996, 0.546582, 1.148368, 1.785258, 2.440515]


def test_falsification_log_squared():
    r = K.falsify_h(K.h_log_squared)
    H = lambda t: t * math.log(math.e + t) ** 2
    for N, l, rr in zip(r.N, r.lhs, r.rhs):
        assert abs(l - lhs_closed(N)) < 1e-10
        assert abs(rr - rhs_quad(H, N)) < 1e-9
    assert np.allclose(r.difference, FROZEN_LOG_SQUARED, atol=1e-6)
    assert r.strictly_increasing and r.difference[-1] > 2.0 and r.divergent
    assert all(r.lower_bound_ok) and all(r.upper_bound_ok)


def test_falsification_linear_not_flagged():
    r = K.falsify_h(K.h_linear)
    for N, rr in zip(r.N, r.rhs):
        assert abs(rr - (2 * math.log1p(N) / SQ2PI + 2 * special.ndtr(-N))) < 1e-10
    assert not r.divergent and r.increment_ratio > 0.5


def test_falsify_rejects_bad_grid():
    with pytest.raises(DomainError):
        K.falsify_h(K.h_linear, [4, 2])


def test_exploratory_probe_is_labelled():
    probes = K.exploratory_square_scan(SUITE[:4])
    assert all(p.label == "exploratory" for p in probes)


def test_sqrt3_comparison():
    r = K.sqrt3_comparison()
    assert r["passed"] and abs(r["max"] - math.sqrt(3)) < 1e-12 and abs(r["argmax"] - 2) < 1e-5


# ---------------------------------------------------------------------------
# constants of the reduction

def test_paris_constant_closed_form():
    pc = K.paris_constant()
    # x/G(x) = x sqrt(1 + x^2/2) e^{-x^2/2} peaks at x^4 = 2
    x = 2 ** 0.25
    ref = math.sqrt(math.pi / 2) * x * math.sqrt(1 + x * x / 2) * math.exp(-x * x / 2)
    assert abs(pc.d - ref) < 1e-12 and abs(pc.argmax - x) < 1e-6
    assert 0.960 <= pc.d <= 0.961


def test_psi():
    r = K.psi_check()
    assert r["passed"] and abs(r["psi_e"] - 7.799246878584907) < 1e-9


def test_halfline_base_check_suite():
    for f in F.halfline_suite():
        assert K.halfline_base_check(f)["margin"] >= -1e-6
