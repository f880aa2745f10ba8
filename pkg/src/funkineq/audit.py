"""The table of explicit constants, each recomputed from scratch and checked at its claimed bounds."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import core
from .checkers import EXP_HARDY_CONSTANT, log_g_sqrt, paris_constant, psi
from .conjugates import (AuditItem, AuditReport, beta_triple, gauss_triple, h_inverse, i_of,
                         kappa_beta_hardy, sign_change, w_inverse)

BETAS = (1.3, 1.5, 1.8)


def _a0() -> AuditItem:
    t = gauss_triple()
    v = h_inverse(t, 1.0)
    ok = sign_change(lambda s: t.H(s) - 1.0, 2.13, 2.14) and 2.13 < v < 2.14
    return AuditItem("a0", "H^{-1}(1) in (2.13, 2.14)", v, 0.0, ok)


def _x0() -> AuditItem:
    t = gauss_triple()
    v = w_inverse(t, 0.0)
    ok = sign_change(t.W, 1.05, 1.06) and 1.05 < v < 1.06
    return AuditItem("x0", "W^{-1}(0) in (1.05, 1.06)", v, 0.0, ok)


def _d() -> AuditItem:
    pc = paris_constant(log_g_sqrt)
    target = 2 ** 0.25
    closed = core.SQRT_HALF_PI * math.sqrt(1 + math.sqrt(2)) * math.exp(-1 / math.sqrt(2))
    ok = 0.960 <= pc.d <= 0.961 and abs(pc.argmax - target) <= 1e-4
    return AuditItem("d", "sqrt(pi/2) max x/G(x) in [0.960, 0.961], argmax 2^{1/4}", pc.d, 1e-4, ok,
                     {"argmax": pc.argmax, "closed_form": closed, "d_plus_b": pc.d + math.sqrt(2 * math.pi)})


def _t0_value() -> float:
    return math.sqrt(2 * float(gauss_triple().W(4.0)))


def _t0() -> AuditItem:
    v = _t0_value()
    t = gauss_triple()
    # sqrt(2 W(4)) in [lo, hi]  <=>  W(4) in [lo^2/2, hi^2/2]
    w4 = float(t.W(4.0))
    ok = 4.056 ** 2 / 2 < w4 < 4.058 ** 2 / 2
    return AuditItem("t0", "sqrt(2 W(4)) in [4.056, 4.058]", v, 0.0, ok)


def _five_fourteen() -> AuditItem:
    t0 = _t0_value()
    v = t0 + 1 / (0.228 * t0)
    ok = 5.13 <= v <= EXP_HARDY_CONSTANT
    return AuditItem("five-fourteen", "t0 + 1/(0.228 t0) in [5.13, 5.14]", v, 0.0, ok)


def _psi_e() -> AuditItem:
    v = float(psi(math.e))
    return AuditItem("psi-e", "Psi(e) <= 8", v, 0.0, v <= 8.0)


def _muckenhoupt() -> AuditItem:
    ms = core.mills_sup()
    ref = math.sqrt(math.pi / 2)
    ok = abs(ms.value - ref) <= 1e-8 and ms.monotone and ms.argmax == 0.0
    return AuditItem("muckenhoupt", "sup_r e^{r^2/2} int_r^inf e^{-x^2/2} dx = sqrt(pi/2)",
                     ms.value, 1e-8, ok, {"argmax": ms.argmax, "monotone": ms.monotone})


def _sqrt_e_h() -> AuditItem:
    v = math.sqrt(math.e) * float(gauss_triple().H(2 ** 0.25))
    return AuditItem("sqrt-e-h", "sqrt(e) H(2^{1/4}) >= 1", v, 0.0, v >= 1.0)


def _i4() -> AuditItem:
    v = i_of(4.0)
    return AuditItem("i4", "I(4) >= 0.228", v, 0.0, v >= 0.228)


def _w_beta(beta: float) -> Callable[[], AuditItem]:
    def run() -> AuditItem:
        t = beta_triple(beta)
        x = 1.0 / (kappa_beta_hardy(beta) * beta ** (1.0 / beta))
        v = float(t.W(x))
        closed = math.log(math.e * beta) / beta + math.log(kappa_beta_hardy(beta))
        return AuditItem(f"w-beta-{beta:g}", "W(1/(kappa beta^{1/beta})) in [1/3, 1/2]", v, 0.0,
                         1 / 3 <= v <= 0.5, {"beta": beta, "closed_form": closed})
    return run


AUDITS: dict[str, Callable[[], AuditItem]] = {
    "a0": _a0,
    "x0": _x0,
    "d": _d,
    "t0": _t0,
    "five-fourteen": _five_fourteen,
    "psi-e": _psi_e,
    "muckenhoupt": _muckenhoupt,
    "sqrt-e-h": _sqrt_e_h,
    "i4": _i4,
    **{f"w-beta-{b:g}": _w_beta(b) for b in BETAS},
}

AUDIT_IDS = tuple(AUDITS)


def run_audit(ids: list[str] | tuple[str, ...] | None = None) -> AuditReport:
    ids = AUDIT_IDS if ids is None else tuple(ids)
    unknown = [i for i in ids if i not in AUDITS]
    if unknown:
        raise KeyError(f"unknown audit id(s): {', '.join(unknown)}; choose from {', '.join(AUDIT_IDS)}")
    return AuditReport("constants", tuple(AUDITS[i]() for i in ids))


def constants_table() -> list[dict]:
    return [it.to_dict() for it in run_audit().items]


if __name__ == "__main__":  # pragma: no cover
    for row in constants_table():
        print(row)
    print(np.all([r["pass"] for r in constants_table()]))
