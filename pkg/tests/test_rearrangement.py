import math

import mpmath as mp
import numpy as np
import pytest
from scipy import special

from funkineq import functions as F
from funkineq import rearrangement as R
from funkineq.errors import DomainError

PS_FUNCTIONS = [F.quadratic(0.2), F.sin_scaled(1.0), F.hermite_mix((0.3, 0.2)),
                F.abs_smoothed(0.1), F.cos_scaled(1.0)]
PS_WEIGHTS = [("square", lambda x: x * x), ("exp", lambda x: np.expm1(x))]


@pytest.mark.parametrize("f", [F.linear(1.0), F.linear(0.3), F.exp_scaled(0.5)],
                         ids=lambda f: f.tag)
def test_monotone_functions_are_fixed_points(f):
    z = np.linspace(-4, 4, 161)
    errs = []
    for n in (1024, 2048, 4096):
        fs = R.gaussian_rearrangement(f, n)
        errs.append(float(np.max(np.abs(fs(z) - f(z)))))
    assert errs[-1] < 1e-4
    assert errs[1] <= 0.5 * errs[0] and errs[2] <= 0.5 * errs[1]


def test_rearranged_quadratic_closed_form():
    # gamma(0.2 x^2 <= a) = 2 Phi(sqrt(5 a)) - 1, so f*(z) = 0.2 Phi^{-1}((1 + Phi(z))/2)^2
    f = F.quadratic(0.2)
    fs = R.gaussian_rearrangement(f, 4096)
    z = np.linspace(-3, 3, 121)
    ref = 0.2 * special.ndtri((1 + special.ndtr(z)) / 2) ** 2
    assert np.max(np.abs(fs(z) - ref)) < 2e-4
    assert np.all(np.diff(fs(z)) >= 0)


@pytest.mark.parametrize("f", PS_FUNCTIONS, ids=lambda f: f.tag)
def test_equimeasurability_and_convergence(f):
    reps = {n: R.equimeasurability_check(f, R.gaussian_rearrangement(f, n))
            for n in (256, 512, 1024, 2048, 4096)}
    assert reps[4096].passed
    # the exponential moment defect at least halves under each grid doubling
    e = [reps[n].exp_rel_defect for n in sorted(reps)]
    assert all(b <= 0.5 * a for a, b in zip(e, e[1:]))
    # level-set defect halves until it reaches the measuring grid's floor (~2e-5)
    d = [reps[n].level_defect for n in (256, 512, 1024)]
    assert d[1] <= 0.5 * d[0] and d[2] <= 0.5 * d[1]


@pytest.mark.parametrize("f", PS_FUNCTIONS, ids=lambda f: f.tag)
@pytest.mark.parametrize("name,G", PS_WEIGHTS, ids=[w[0] for w in PS_WEIGHTS])
def test_polya_szego_defect_nonnegative(f, name, G):
    rep = R.polya_szego_check(f, G)
    assert rep.status == "pass", rep
    assert rep.defect >= -1e-4 * max(1.0, abs(rep.lhs))


def test_polya_szego_equality_for_monotone():
    rep = R.polya_szego_check(F.linear(0.7), lambda x: x * x)
    assert abs(rep.defect) < 1e-5 and rep.passed


def test_grid_too_small():
    with pytest.raises(DomainError):
        R.gaussian_rearrangement(F.linear(1.0), 64)


@pytest.mark.parametrize("g", F.default_suite() + [F.cubic_ratio(1.0)], ids=lambda f: f.tag)
def test_monotone_split(g):
    env = R.monotone_split(g)
    assert env.check()["passed"]


def test_f2_convex_and_bound():
    F_exp = lambda x: np.exp(x) - 0.5
    for x in (0.0, 0.5, 3.0):
        r = R.f2(F_exp, x, convex=True)
        assert r.bound_ok and r.convex_ok
        assert abs(r.value - (math.exp(x) - 0.5 + 0.5)) < 1e-9 * math.exp(x)
    # concave F: the even split wins
    r = R.f2(np.sqrt, 4.0)
    assert abs(r.value - 2 * math.sqrt(2)) < 1e-9 and abs(r.split - 2) < 1e-5


def test_gaussian_hardy_constant():
    assert abs(R.hardy_constant_gaussian() - math.sqrt(math.pi / 2)) < 1e-12


@pytest.mark.parametrize("lam", [0.5, 1.0, 5.0])
def test_poisson_hardy_constant(lam):
    # tail(0) / pi(0) = (1 - e^{-lam}) / e^{-lam}, and the ratio is maximal at k = 0
    hp = R.hardy_constant_poisson(lam)
    assert hp.argmax == 0
    assert abs(hp.value - math.expm1(lam)) < 1e-13 * math.expm1(lam)
    with mp.workdps(120):
        L = mp.mpf(lam)
        for k in (0, 3, 10, 30):
            pmf = mp.e ** -L * L ** k / mp.factorial(k)
            tail = 1 - sum(mp.e ** -L * L ** j / mp.factorial(j) for j in range(k + 1))
            ref = float(tail / pmf)
            assert abs(R.poisson_tail_ratio(lam, k) - ref) < 1e-13 * ref


@pytest.mark.parametrize("g", F.halfline_suite(), ids=lambda f: f.tag)
def test_hardy_inequality(g):
    assert R.hardy_check(g)["passed"]
