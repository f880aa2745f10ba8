import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from funkineq import conjugates as C
from funkineq.checkers import log_g_sqrt
from funkineq.errors import DomainError, RangeError

mp.mp.dps = 40


def mp_conjugate(V, y):
    """sup_x {x y - e^{V(x)}} at 40 digits, via the stationarity equation."""
    y = mp.mpf(y)
    G = lambda x: mp.e ** V(x)
    # log G'(x) = V(x) + log V'(x) is increasing; bisect log G' = log y
    phi = lambda x: V(x) + mp.log(mp.diff(V, x)) - mp.log(y)
    lo, hi = mp.mpf("1e-6"), mp.mpf(60)
    for _ in range(200):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if phi(mid) < 0 else (lo, mid)
    x0 = (lo + hi) / 2
    return float(x0 * y - G(x0))


def v_gauss(x):
    return x * x / 2 - mp.log(1 + x * x / 2) / 2


def test_gauss_weight_is_g_sqrt():
    x = np.linspace(0, 6, 25)
    assert np.allclose(C.gauss_triple().V(x), log_g_sqrt(x), rtol=1e-15, atol=1e-15)


@pytest.mark.parametrize("y", [1.5, 10.0, 1e3, 1e6])
def test_gauss_conjugate_against_mpmath(y):
    t = C.gauss_triple()
    ref = mp_conjugate(v_gauss, y)
    assert abs(C.g_star_closed(t, y) - ref) < 1e-11 * abs(ref)


@pytest.mark.parametrize("beta", [1.3, 1.5, 1.8])
def test_beta_conjugate_against_mpmath(beta):
    t = C.beta_triple(beta)
    k = C.kappa_beta_hardy(beta)
    for y in (2.0, 50.0, 1e4):
        ref = mp_conjugate(lambda x: (k * x) ** beta, y)
        assert abs(C.g_star_closed(t, y) - ref) < 1e-10 * abs(ref)


@pytest.mark.parametrize("case", ["gauss", "beta"])
def test_closed_matches_numeric_on_log_grid(case):
    t = C.gauss_triple() if case == "gauss" else C.beta_triple(1.5)
    for y in np.geomspace(1.01, 1e8, 50):
        a, b = C.g_star_closed(t, y), C.g_star_numeric(t.G, y)
        assert abs(a - b) <= 1e-7 * abs(a)


def test_closed_form_domain():
    with pytest.raises(DomainError):
        C.g_star_closed(C.gauss_triple(), 0.5)
    with pytest.raises(DomainError):
        C.beta_triple(2.5)
    with pytest.raises(RangeError):
        C.h_inverse(C.gauss_triple(), 1.5)


def test_inverses_round_trip():
    t = C.gauss_triple()
    for w in (-1.0, 0.0, 2.0, 30.0):
        assert abs(float(t.W(C.w_inverse(t, w))) - w) < 1e-12 * max(1, abs(w))
    for y in (0.2, 1.0, 1.4):
        assert abs(float(t.H(C.h_inverse(t, y))) - y) < 1e-13


def test_technical_lemma_audit():
    rep = C.technical_lemma_audit()
    assert rep.passed, [i for i in rep.items if not i.passed]
    assert {i.id for i in rep.items} == {"a0", "x0", "iii", "iv", "sqrt-e-h", "i4"}
    assert 2.13 < rep.item("a0").computed < 2.14


@pytest.mark.parametrize("beta", [1.3, 1.5, 1.8])
def test_preparation_lemma_audit(beta):
    rep = C.preparation_lemma_audit(beta)
    assert rep.passed, [i for i in rep.items if not i.passed]


def test_preparation_threshold_closed_form():
    for beta in (1.3, 1.5, 1.8):
        k = C.kappa_beta_hardy(beta)
        closed = math.log(math.e * beta) / beta + math.log(k)
        assert abs(C.preparation_threshold(beta) - closed) < 1e-14


def test_fenchel_young_200_pairs():
    rng = np.random.default_rng(7)
    ys = np.geomspace(1.1, 1e4, 20)
    pairs = [(float(x), float(y)) for y in ys for x in rng.uniform(0, 5, 10)]
    for t in (C.gauss_triple(), C.beta_triple(1.5)):
        rep = C.fenchel_young_check(t.G, pairs)
        assert rep.pairs == 200 and rep.passed and rep.min_slack >= -1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 6.0), st.floats(1.0, 1e5))
def test_young_inequality_property(x, y):
    t = C.gauss_triple()
    assert x * y <= float(t.G(np.array(x))) + C.g_star_closed(t, y) + 1e-9 * max(1, x * y)
