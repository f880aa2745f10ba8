"""Legendre-Fenchel conjugates of G = exp(V) for the two weight families.

For G = e^V with V convex increasing on (0, inf), the sup of xy - G(x) is
attained where y = V'(x) e^{V(x)}, i.e. at x = W^{-1}(log y) with
W = V + log V'.  Since G(x) = y / V'(x) there, the conjugate reads

    G*(y) = y * (W^{-1}(log y) - 1 / V'(W^{-1}(log y))).

The same computation applies verbatim to V = (kappa x)^beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .errors import DomainError, RangeError, Unbounded
from .functions import Function1D

SQRT2 = math.sqrt(2.0)
BETA_MIN = math.sqrt(5.0) - 1.0


def kappa_beta_hardy(beta: float) -> float:
    """kappa = sqrt(2) beta / (beta + 2)."""
    return SQRT2 * beta / (beta + 2.0)


@dataclass(frozen=True)
class WeightTriple:
    """V, V', H, W for one weight family; W = V + log V'."""

    case: str
    V: Function1D
    V_prime: Function1D
    H: Function1D
    W: Function1D
    domain_lo: float = 0.0
    beta: float | None = None
    kappa: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def G(self) -> Function1D:
        V, Vp = self.V, self.V_prime
        return Function1D(lambda x: np.exp(V(x)), lambda x: Vp(x) * np.exp(V(x)),
                          domain=(0.0, math.inf), tag=f"exp(V[{self.case}])")


def gauss_triple() -> WeightTriple:
    def V(x):
        return 0.5 * x * x - 0.5 * np.log1p(0.5 * x * x)

    def Vp(x):
        return x * (1 + x * x) / (2 + x * x)

    def Vpp(x):
        x2 = x * x
        return (x2 * x2 + 5 * x2 + 2) / (2 + x2) ** 2

    def H(x):
        return SQRT2 * x * (1 + x * x) / (2 + x * x) ** 1.5

    def W(x):
        with np.errstate(divide="ignore"):
            return V(x) + np.log(Vp(x))

    def Wp(x):
        return Vp(x) + Vpp(x) / Vp(x)

    dom = (0.0, math.inf)
    return WeightTriple(
        "gauss",
        Function1D(V, Vp, Vpp, domain=dom, tag="V[gauss]"),
        Function1D(Vp, Vpp, domain=dom, tag="V'[gauss]"),
        Function1D(H, domain=dom, tag="H[gauss]"),
        Function1D(W, Wp, domain=dom, tag="W[gauss]"),
    )


def beta_triple(beta: float) -> WeightTriple:
    if not 1.0 < beta < 2.0:
        raise DomainError("beta must lie in (1, 2)")
    k = kappa_beta_hardy(beta)
    kb = k ** beta

    def V(x):
        return (k * x) ** beta

    def Vp(x):
        return beta * kb * x ** (beta - 1)

    def Vpp(x):
        return beta * (beta - 1) * kb * x ** (beta - 2)

    def W(x):
        with np.errstate(divide="ignore"):
            return V(x) + math.log(beta * kb) + (beta - 1) * np.log(x)

    def Wp(x):
        return Vp(x) + (beta - 1) / x

    def H(x):
        return np.exp(W(x) - 0.5 * x * x)

    dom = (0.0, math.inf)
    tag = f"beta({beta:g})"
    return WeightTriple(
        "beta",
        Function1D(V, Vp, Vpp, domain=dom, tag=f"V[{tag}]"),
        Function1D(Vp, Vpp, domain=dom, tag=f"V'[{tag}]"),
        Function1D(H, domain=dom, tag=f"H[{tag}]"),
        Function1D(W, Wp, domain=dom, tag=f"W[{tag}]"),
        beta=float(beta), kappa=k,
    )


def _monotone_inverse(fn, target: float, lo: float, hi: float, what: str) -> float:
    f_lo = float(fn(np.array(lo))) - target
    while f_lo > 0:
        lo *= 1e-3
        if lo < 1e-300:
            raise RangeError(f"{what}: value {target:g} is below the range on the working domain")
        f_lo = float(fn(np.array(lo))) - target
    f_hi = float(fn(np.array(hi))) - target
    while f_hi < 0:
        hi *= 2.0
        if hi > 1e150:
            raise RangeError(f"{what}: value {target:g} is above the range")
        f_hi = float(fn(np.array(hi))) - target
    return optimize.brentq(lambda s: float(fn(np.array(s))) - target, lo, hi,
                           xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def w_inverse(t: WeightTriple, w: float) -> float:
    """x with W(x) = w, by bracket expansion from [1e-6, 64] and Brent's method."""
    return _monotone_inverse(t.W, float(w), 1e-6, 64.0, "W^{-1}")


def h_inverse(t: WeightTriple, y: float) -> float:
    if t.case != "gauss":
        raise DomainError("H^{-1} is only used for the gauss case")
    if not 0 < y < SQRT2:
        raise RangeError("H maps (0, inf) onto (0, sqrt 2)")
    return _monotone_inverse(t.H, float(y), 1e-6, 64.0, "H^{-1}")


def g_star_closed(t: WeightTriple, y: float) -> float:
    """Closed-form conjugate of G = e^V at y >= 1."""
    if y < 1:
        raise DomainError("g_star_closed expects y >= 1")
    x = w_inverse(t, math.log(y))
    return y * (x - 1.0 / float(t.V_prime(x)))


def g_star_numeric(G: Function1D, y: float, window: tuple[float, float] | None = None,
                   points: int = 4001) -> float:
    """sup_x {x y - G(x)} by a grid scan followed by bounded Brent refinement."""
    if window is None:
        lo = max(0.0, G.domain[0])
        hi = max(10.0, 3.0 * math.log(y)) if y > 1 else 10.0
        hi = min(hi, G.domain[1])
    else:
        lo, hi = window
    xs = np.linspace(lo, hi, points)
    with np.errstate(over="ignore"):
        vals = xs * y - G(xs)
    i = int(np.nanargmax(vals))
    if i == points - 1:
        if hi < G.domain[1]:
            raise Unbounded(f"x*y - G(x) still increasing at window edge x={hi:g}")
        return float(vals[i])
    if i == 0:
        return float(vals[0])
    a, b = xs[i - 1], xs[i + 1]
    res = optimize.minimize_scalar(lambda s: -(s * y - float(G(np.array(s)))),
                                   bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-14 * max(1.0, b)})
    return max(float(-res.fun), float(vals[i]))


# ---------------------------------------------------------------------------
# audits

@dataclass(frozen=True)
class AuditItem:
    id: str
    claimed: str
    computed: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"id": self.id, "claimed": self.claimed, "computed": self.computed,
                "tolerance": self.tolerance, "pass": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class AuditReport:
    name: str
    items: tuple[AuditItem, ...]

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    def item(self, id: str) -> AuditItem:
        for it in self.items:
            if it.id == id:
                return it
        raise KeyError(id)


def sign_change(fn, lo: float, hi: float) -> bool:
    """True iff fn(lo) < 0 < fn(hi), the certificate for a root in (lo, hi)."""
    return float(fn(np.array(lo))) < 0.0 < float(fn(np.array(hi)))


def technical_gap(t: WeightTriple, x):
    """x - 1/V'(x) - sqrt(2 W(x)), defined where W(x) >= 0."""
    x = np.asarray(x, dtype=float)
    return x - 1.0 / t.V_prime(x) - np.sqrt(2.0 * np.maximum(t.W(x), 0.0))


def i_of(x: float, t: WeightTriple | None = None) -> float:
    """I(x) = 2 log H(x) / (1 + sqrt(1 + 2 log H(x) / x^2))."""
    t = t or gauss_triple()
    lh = math.log(float(t.H(x)))
    return 2 * lh / (1 + math.sqrt(1 + 2 * lh / (x * x)))


def technical_lemma_audit(grid: Sequence[float] | None = None) -> AuditReport:
    t = gauss_triple()
    x0 = w_inverse(t, 0.0)
    if grid is None:
        grid = np.geomspace(x0, 50.0, 10_000)
    g = np.asarray(grid, dtype=float)
    items = []
    a0 = h_inverse(t, 1.0)
    items.append(AuditItem("a0", "H^{-1}(1) in (2.13, 2.14)", a0, 0.0,
                           sign_change(lambda s: t.H(s) - 1.0, 2.13, 2.14) and 2.13 < a0 < 2.14))
    items.append(AuditItem("x0", "W^{-1}(0) in (1.05, 1.06)", x0, 0.0,
                           sign_change(t.W, 1.05, 1.06) and 1.05 < x0 < 1.06))
    g3 = g[g >= x0]
    gap3 = technical_gap(t, g3)
    items.append(AuditItem("iii", "x - 1/V'(x) - sqrt(2W(x)) <= 0 for x >= x0",
                           float(gap3.max()), 0.0, bool(np.all(gap3 <= 0.0)),
                           {"points": int(g3.size)}))
    g4 = g[g >= 4.0]
    gap4 = technical_gap(t, g4) + 1.228 / g4
    items.append(AuditItem("iv", "x - 1/V'(x) - sqrt(2W(x)) <= -1.228/x for x >= 4",
                           float(gap4.max()), 0.0, bool(np.all(gap4 <= 0.0)),
                           {"points": int(g4.size),
                            "gap_at_4": float(technical_gap(t, 4.0))}))
    se = math.sqrt(math.e) * float(t.H(2 ** 0.25))
    items.append(AuditItem("sqrt-e-h", "sqrt(e) H(2^{1/4}) >= 1", se, 0.0, se >= 1.0))
    i4 = i_of(4.0, t)
    items.append(AuditItem("i4", "I(4) >= 0.228", i4, 0.0, i4 >= 0.228))
    return AuditReport("technical-lemma", tuple(items))


def preparation_threshold(beta: float) -> float:
    """W(1 / (kappa beta^{1/beta})) = log(e beta)/beta + log kappa for the beta case."""
    t = beta_triple(beta)
    return float(t.W(1.0 / (t.kappa * beta ** (1.0 / beta))))


def preparation_lemma_audit(beta: float, grid: Sequence[float] | None = None) -> AuditReport:
    if not BETA_MIN < beta < 2.0:
        raise DomainError("beta must lie strictly inside (sqrt(5) - 1, 2)")
    t = beta_triple(beta)
    if grid is None:
        grid = np.geomspace(1e-3, 400.0, 10_000)
    g = np.asarray(grid, dtype=float)
    g = g[g > 0]
    inv = np.array([w_inverse(t, s) for s in g])
    bound = (1.0 / t.kappa) * (g - (beta - 1) / beta * np.log(g) + 1.0) ** (1.0 / beta)
    slack = bound - inv
    items = [AuditItem("inverse-bound", "W^{-1}(x) <= (x - (b-1)/b log x + 1)^{1/b} / kappa",
                       float(slack.min()), 0.0, bool(np.all(slack >= -1e-12)),
                       {"points": int(g.size)})]
    thr = preparation_threshold(beta)
    sign = inv - 1.0 / t.V_prime(inv)
    agree = np.where(np.abs(g - thr) > 1e-9, (g <= thr) == (sign <= 0), True)
    items.append(AuditItem("sign-equivalence", "x <= W(x*) iff W^{-1}(x) - 1/V'(W^{-1}(x)) <= 0",
                           float(thr), 0.0, bool(np.all(agree)),
                           {"disagreements": int(np.count_nonzero(~agree))}))
    items.append(AuditItem("threshold-range", "1/3 <= W(1/(kappa beta^{1/beta})) <= 1/2",
                           float(thr), 0.0, 1.0 / 3.0 <= thr <= 0.5, {"beta": beta}))
    rt = float(t.W(w_inverse(t, 1.0)))
    items.append(AuditItem("round-trip", "W(W^{-1}(1)) = 1", rt, 1e-10, abs(rt - 1.0) <= 1e-10))
    return AuditReport(f"preparation-lemma(beta={beta:g})", tuple(items))


@dataclass(frozen=True)
class YoungReport:
    pairs: int
    min_slack: float
    passed: bool
    slacks: tuple[float, ...]


def fenchel_young_check(G: Function1D, samples: Sequence[tuple[float, float]]) -> YoungReport:
    """Check x y <= G(x) + G*(y) with G* from the numeric sup."""
    cache: dict[float, float] = {}
    slacks = []
    for x, y in samples:
        if y not in cache:
            cache[y] = g_star_numeric(G, y)
        gx = float(G(np.array(x)))
        s = gx + cache[y] - x * y
        slacks.append(s / max(1.0, abs(x * y), abs(gx)))
    slacks_t = tuple(float(s) for s in slacks)
    m = min(slacks_t) if slacks_t else 0.0
    return YoungReport(len(slacks_t), m, m >= -1e-12, slacks_t)
