import math

import mpmath as mp
import pytest

from funkineq import audit
from funkineq.conjugates import kappa_beta_hardy

mp.mp.dps = 40


def mp_H(x):
    return mp.sqrt(2) * x * (1 + x * x) / (2 + x * x) ** mp.mpf(1.5)


def mp_W(x):
    return x * x / 2 + mp.log(mp_H(x))


def mp_root(fn, lo, hi):
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    sgn = fn(lo) < 0
    for _ in range(150):
        mid = (lo + hi) / 2
        if (fn(mid) < 0) == sgn:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


T0 = mp.sqrt(2 * mp_W(4))
ORACLES = {
    "a0": lambda: mp_root(lambda x: mp_H(x) - 1, 1.5, 3),
    "x0": lambda: mp_root(mp_W, 0.5, 2),
    "t0": lambda: T0,
    "five-fourteen": lambda: T0 + 1 / (mp.mpf("0.228") * T0),
    "psi-e": lambda: mp.log(1 + (mp.e ** mp.mpf("5.14") / mp.sqrt(2 * mp.pi)) * mp.e ** 3.5
                            + (mp.e ** mp.mpf("5.14") / mp.sqrt(2 * mp.pi) - 1) * mp.e),
    "muckenhoupt": lambda: mp.sqrt(mp.pi / 2),
    "sqrt-e-h": lambda: mp.sqrt(mp.e) * mp_H(mp.mpf(2) ** 0.25),
}


def w_beta_oracle(beta):
    b = mp.mpf(beta)
    k = mp.sqrt(2) * b / (b + 2)
    x = 1 / (k * b ** (1 / b))
    return (k * x) ** b + mp.log(b * k ** b * x ** (b - 1))


def test_ids_and_table():
    assert set(audit.AUDIT_IDS) == {"a0", "x0", "d", "t0", "five-fourteen", "psi-e", "muckenhoupt",
                                    "sqrt-e-h", "i4", "w-beta-1.3", "w-beta-1.5", "w-beta-1.8"}
    rows = audit.constants_table()
    assert [r["id"] for r in rows] == list(audit.AUDIT_IDS)
    assert all(set(r) >= {"id", "claimed", "computed", "tolerance", "pass"} for r in rows)


@pytest.mark.parametrize("item_id", audit.AUDIT_IDS)
def test_each_audit_passes(item_id):
    rep = audit.run_audit([item_id])
    assert rep.passed and rep.items[0].id == item_id


@pytest.mark.parametrize("item_id", sorted(ORACLES))
def test_audit_against_mpmath(item_id):
    v = audit.run_audit([item_id]).items[0].computed
    ref = float(ORACLES[item_id]())
    assert abs(v - ref) < 1e-9 * max(1.0, abs(ref))


@pytest.mark.parametrize("beta", [1.3, 1.5, 1.8])
def test_w_beta_against_mpmath(beta):
    v = audit.run_audit([f"w-beta-{beta:g}"]).items[0].computed
    ref = float(w_beta_oracle(beta))
    assert abs(v - ref) < 1e-12
    assert abs(ref - (math.log(math.e * beta) / beta + math.log(kappa_beta_hardy(beta)))) < 1e-14
    assert 1 / 3 <= ref <= 1 / 2


def test_frozen_values():
    # stated intervals, checked again on the returned numbers
    v = {it.id: it.computed for it in audit.run_audit().items}
    assert 2.13 < v["a0"] < 2.14 and 1.05 < v["x0"] < 1.06
    assert 0.960 <= v["d"] <= 0.961 and 4.056 <= v["t0"] <= 4.058
    assert 5.13 <= v["five-fourteen"] <= 5.14 and v["psi-e"] <= 8
    assert v["sqrt-e-h"] >= 1 and v["i4"] >= 0.228


def test_unknown_id():
    with pytest.raises(KeyError):
        audit.run_audit(["nope"])
