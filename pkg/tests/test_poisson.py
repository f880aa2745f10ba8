import math
import warnings

import mpmath as mp
import numpy as np
import pytest

from funkineq import core
from funkineq import poisson as P
from funkineq.errors import DomainError, RangeError
from funkineq.poisson import ChainSpec, DiscreteFunction

LAMS = [0.5, 1.0, 5.0]
SUITE = P.discrete_suite()


def mp_log_g(lam, x):
    # log G on (1, inf), written out independently at high precision
    return lam * (x + (1 + 2 / x) * mp.log(lam * x)) * mp.e ** x


def mp_scaled_conjugate(lam, ell):
    """sup_{x > 0} {x - e^ell G(x)} at 50 digits.

    On (0, 1] the sup is 1 - e^ell (ell <= 0).  Beyond 1 the objective is concave
    and its stationary point solves ell + log G'(x) = 0, bisected in x.
    """
    with mp.workdps(50):
        lam, ell = mp.mpf(lam), mp.mpf(ell)
        lg = lambda x: mp_log_g(lam, x)
        slope = lambda x: ell + lg(x) + mp.log(mp.diff(lg, x))
        best = max(mp.mpf(0), 1 - mp.e ** ell)
        lo, hi = mp.mpf(1), mp.mpf(2)
        while slope(hi) < 0:
            hi *= 2
        if slope(lo) < 0:
            for _ in range(180):
                mid = (lo + hi) / 2
                lo, hi = (mid, hi) if slope(mid) < 0 else (lo, mid)
            x = (lo + hi) / 2
            best = max(best, x - mp.e ** (ell + lg(x)))
        return float(best)


# ---------------------------------------------------------------------------
# chain

@pytest.mark.parametrize("lam", LAMS)
def test_detailed_balance(lam):
    assert P.detailed_balance_exact(lam, 100)
    # the same identity in floating point through the library pmf
    k = np.arange(100)
    lhs = core.poisson_pmf(lam, k) * lam
    rhs = core.poisson_pmf(lam, k + 1) * (k + 1)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=0)


@pytest.mark.parametrize("lam", LAMS)
def test_generator_matrix(lam):
    L = P.generator_matrix(ChainSpec(lam), 60)
    assert np.allclose(L.sum(axis=1), 0, atol=1e-12)
    # irreducible: every state reaches every other
    A = (L != 0) | np.eye(61, dtype=bool)
    reach = A.copy()
    for _ in range(6):
        reach = (reach.astype(float) @ reach.astype(float)) > 0
    assert reach.all()
    f = SUITE[6]
    k = np.arange(60)
    direct = L[:60] @ f(np.arange(61))
    assert np.allclose(P.mm_infinity_generator(ChainSpec(lam), f, k)[:-1], direct[:-1], atol=1e-12)


def test_entropy_against_mpmath():
    f = SUITE[3]  # indicator of {0}
    with mp.workdps(40):
        pi = [mp.e ** -1 / mp.factorial(k) for k in range(120)]
        g = [mp.e ** (1 if k == 0 else 0) for k in range(120)]
        Z = mp.fsum(p * x for p, x in zip(pi, g))
        ent = mp.fsum(p * x * mp.log(x) for p, x in zip(pi, g)) - Z * mp.log(Z)
        # each edge (k, k+1) with k in {0}: both orientations
        dir_ = 2 * pi[0] * 1 * (g[1] - g[0]) * (0 - 1)
    form = P.modified_lsi_form(ChainSpec(1.0), f)
    assert abs(form.entropy - float(ent)) < 1e-14
    assert abs(form.dirichlet - float(dir_)) < 1e-14


def test_constant_has_zero_forms():
    form = P.modified_lsi_form(ChainSpec(1.0), DiscreteFunction.from_callable(lambda k: 0 * k + 2.0))
    assert abs(form.entropy) < 1e-12 and form.dirichlet == 0


@pytest.mark.parametrize("lam", LAMS)
@pytest.mark.parametrize("f", SUITE, ids=lambda f: f.tag)
def test_modified_lsi_quotient(lam, f):
    form = P.modified_lsi_form(ChainSpec(lam), f)
    assert form.dirichlet >= 0
    assert abs(form.dirichlet - 2 * form.pairing) <= 1e-12 * max(1.0, form.dirichlet)
    assert form.quotient <= lam + 1e-8


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("f", SUITE, ids=lambda f: f.tag)
def test_discrete_exponential_bound(lam, f):
    r = P.theorem_51_check(ChainSpec(lam), f, 2 * lam)
    assert r.satisfied or r.vacuous


def test_discrete_exponential_bound_examples():
    ch = ChainSpec(1.0)
    zero = DiscreteFunction.from_callable(lambda k: 0.0 * k)
    r = P.theorem_51_check(ch, zero, 2.0)
    assert r.lhs == 0 and r.satisfied
    assert P.theorem_51_check(ch, DiscreteFunction.from_callable(lambda k: 0.2 * k, 200, "linear"),
                              3.0).satisfied
    assert P.theorem_51_check(ch, SUITE[4], 2.5).satisfied
    with pytest.raises(DomainError):
        P.theorem_51_check(ch, zero, 1.0)


# ---------------------------------------------------------------------------
# the weight and its conjugate

def test_g_lambda_values():
    assert P.g_lambda(1.0, 0.5) == 0.5
    assert P.g_lambda(1.0, 1.2) < P.g_lambda(1.0, 1.5) < P.g_lambda(1.0, 2.0)
    with mp.workdps(30):
        assert abs(float(P.log_g_lambda(1.0, 1.5)) - float(mp_log_g(1, mp.mpf(1.5)))) < 1e-13
    # overflow is a sentinel, not a clamp
    assert P.g_lambda(1.0, 8.0) == math.inf
    with pytest.raises(DomainError):
        P.g_lambda(1.0, 0.0)


@pytest.mark.parametrize("lam", LAMS)
def test_scaled_conjugate_against_mpmath(lam):
    for ell in (-0.5, -2.0, -10.0, -40.0, float(core.poisson_logpmf(lam, 50))):
        s, _ = P.scaled_conjugate(lam, ell)
        ref = mp_scaled_conjugate(lam, ell)
        assert abs(s - ref) < 1e-10 * max(1.0, ref)


def test_g_star_small_y():
    # for y <= 1 the sup sits at the kink x = 1: G*(y) = y - 1 < 0 would lose to x -> 0
    assert P.g_lambda_star(1.0, 0.5) == 0.0
    assert P.g_lambda_star(1.0, 0.0) == 0.0
    assert abs(P.g_lambda_star(1.0, 3.0) - 3 * mp_scaled_conjugate(1.0, -math.log(3.0))) < 1e-10


def test_fenchel_young_g_lambda():
    rng = np.random.default_rng(11)
    for x, y in zip(rng.uniform(0.01, 1.0, 100), rng.uniform(0.0, 5.0, 100)):
        assert x * y <= P.g_lambda(1.0, x) + P.g_lambda_star(1.0, y) + 1e-12
    # beyond 1 in scaled log form: x - e^ell G(x) <= sup
    for x, ell in zip(rng.uniform(1.0, 4.0, 100), rng.uniform(-60.0, -1.0, 100)):
        lhs = x - math.exp(min(700.0, ell + float(P.log_g_lambda(1.0, x))))
        assert lhs <= P.scaled_conjugate(1.0, ell)[0] + 1e-12


# k_min of the conjugate bound on [2, 200], determined by the brute-force conjugate
K_MIN = {0.5: 2, 1.0: 2, 5.0: 14}


@pytest.mark.parametrize("lam", LAMS)
def test_g_star_bound(lam):
    r = P.g_star_bound_check(lam)
    assert r.passed and r.k_min == K_MIN[lam]
    m = np.array(r.margins)
    ks = np.array(r.k)
    assert np.all(m[ks >= r.k_min] >= 0)
    if r.k_min > 2:
        assert m[ks == r.k_min - 1][0] < 0
    # spot values against the independent conjugate
    for k in (50, 100):
        ref = float(P.g_star_bound_rhs(lam, k)) - mp_scaled_conjugate(lam, float(core.poisson_logpmf(lam, k)))
        assert abs(m[ks == k][0] - ref) < 1e-9


@pytest.mark.xfail(strict=True, reason="margins decrease slowly towards a positive level; "
                   "they are not eventually increasing")
@pytest.mark.parametrize("lam", LAMS)
def test_g_star_margins_eventually_increasing(lam):
    assert P.g_star_bound_check(lam).eventually_increasing


# ---------------------------------------------------------------------------
# Phi lemma

def test_phi_lemma():
    r = P.phi_lemma_check()
    assert r.lower_ok and r.upper_ok and r.upper_points > 150
    e2 = math.e ** 2
    assert P.phi0_inverse(e2) >= e2 / 2
    assert abs(P.phi0_inverse(float(P.phi0(10.0))) - 10) < 1e-9
    x = math.e ** 10
    assert P.phi1_inverse(x) <= x / 10 * 1.1
    # Phi1 starts at (1 + 1/log 2) 2 e^2 on [e^2, inf)
    assert abs(P.PHI1_MIN - (1 + 1 / math.log(2)) * 2 * e2) < 1e-12
    with pytest.raises(RangeError):
        P.phi1_inverse(4 * e2)


# ---------------------------------------------------------------------------
# constants and the exponential inequality

@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_constants_cd(lam):
    cst = P.constants_cd_estimate(lam)
    assert cst.c > 0 and cst.remainder < 1e-20
    assert abs(cst.A - math.expm1(lam)) < 1e-12 * cst.A
    assert abs(cst.d - (1 + cst.A * cst.sup_x_over_g)) < 1e-12
    # the exact part of the series, recomputed term by term at the same truncation
    S = 0.0
    tot = math.exp(float(core.poisson_logpmf(lam, 0)))
    for n in range(1, 40):
        S += mp_scaled_conjugate(lam, float(core.poisson_logpmf(lam, n - 1)))
        tot += math.exp(S + float(core.poisson_logpmf(lam, n)))
    assert math.log(tot) <= cst.c + 1e-12


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_poisson_exponential_suite(lam):
    cst = P.constants_cd_estimate(lam)
    for f in SUITE:
        r = P.poisson_exponential_check(lam, f, cst)
        assert r.satisfied or r.vacuous, (f.tag, r.margin)
    zero = DiscreteFunction.from_callable(lambda k: 0.0 * k)
    r = P.poisson_exponential_check(lam, zero, cst)
    assert abs(r.lhs) < 1e-15 and r.margin == pytest.approx(cst.c)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 100, 1000])
def test_stirling(n):
    assert core.stirling_bounds_check(n).passed


def test_truncation_warning_raised_for_heavy_tail():
    f = DiscreteFunction.from_callable(lambda k: 3.0 * k, 50, "linear")
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        P.modified_lsi_form(ChainSpec(5.0, 50), f)
    assert any("boundary" in str(x.message) for x in w)
