"""Poisson measure, the M/M/infinity birth-death chain and its exponential inequalities.

Generator (birth rate lambda, death rate k):
    L f(k) = lambda (f(k+1) - f(k)) + k (f(k-1) - f(k)).
It is reversible for pi = Poisson(lambda).  Sums over the integers are cut at
K = max(table length, core.poisson_truncation(lambda)); the birth out of K is
dropped so the truncated rows still sum to zero, and the size of the dropped
boundary terms is reported.

The convex-duality weight G and its conjugate are evaluated in log space: G
is doubly exponential beyond 1, and the quantity that matters,
pi(k) G*(1/pi(k)) = sup_x {x - pi(k) G(x)}, never needs G* itself.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special

from . import core
from .errors import DomainError, RangeError, TruncationWarning
from .rearrangement import hardy_constant_poisson
from .reports import DEFAULT_TOL, InequalityReport, make_report, vacuous_report

BOUNDARY_RTOL = 1e-9
_EXP_MAX = 709.0


@dataclass(frozen=True)
class DiscreteFunction:
    """f on {0, ..., K} with an explicit extension beyond K.

    tail is "constant" (f(k) = f(K)) or "linear" (f(k) = f(K) + slope (k - K)).
    """

    values: tuple[float, ...]
    tail: str = "constant"
    slope: float = 0.0
    tag: str = "discrete"

    def __post_init__(self):
        if len(self.values) < 11:
            raise DomainError("a discrete function needs K >= 10")
        if self.tail not in ("constant", "linear"):
            raise DomainError("tail must be 'constant' or 'linear'")
        if self.tail == "constant" and self.slope != 0.0:
            raise DomainError("a constant tail has no slope")

    @property
    def K(self) -> int:
        return len(self.values) - 1

    @staticmethod
    def from_callable(fn: Callable[[np.ndarray], np.ndarray], K: int = 200, tail: str = "constant",
                      slope: float | None = None, tag: str = "discrete") -> "DiscreteFunction":
        k = np.arange(K + 1, dtype=float)
        v = np.asarray(fn(k), dtype=float) * np.ones_like(k)
        if tail == "linear" and slope is None:
            slope = float(v[-1] - v[-2])
        return DiscreteFunction(tuple(v.tolist()), tail, float(slope or 0.0), tag)

    def __call__(self, k) -> np.ndarray:
        k = np.asarray(k)
        v = np.asarray(self.values)
        inside = np.minimum(k, self.K).astype(int)
        out = v[inside]
        if self.tail == "linear":
            out = out + self.slope * np.maximum(k - self.K, 0)
        return out

    def gradient(self, k) -> np.ndarray:
        k = np.asarray(k)
        return self(k + 1) - self(k)

    def shifted(self, c: float) -> "DiscreteFunction":
        return DiscreteFunction(tuple(x - c for x in self.values), self.tail, self.slope, self.tag)


@dataclass(frozen=True)
class ChainSpec:
    lam: float
    K: int | None = None

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("lambda must be positive")
        if self.K is not None and self.K < core.poisson_truncation(self.lam):
            raise DomainError(f"K must be at least {core.poisson_truncation(self.lam)}")

    def support(self, f: DiscreteFunction | None = None) -> np.ndarray:
        K = self.K or core.poisson_truncation(self.lam)
        if f is not None:
            K = max(K, f.K)
        return np.arange(K + 1)

    def logpmf(self, k) -> np.ndarray:
        return core.poisson_logpmf(self.lam, k)


def mm_infinity_generator(chain: ChainSpec, f: DiscreteFunction, k):
    """L f(k) = lambda (f(k+1) - f(k)) + k (f(k-1) - f(k)); no death term at k = 0."""
    k = np.asarray(k)
    if np.any(k < 0):
        raise DomainError("k must be non-negative")
    fk = f(k)
    death = np.where(k > 0, k * (f(np.maximum(k - 1, 0)) - fk), 0.0)
    return chain.lam * (f(k + 1) - fk) + death


def generator_matrix(chain: ChainSpec, K: int | None = None) -> np.ndarray:
    """Truncated generator on {0..K}; the birth out of K is dropped so rows sum to 0."""
    K = K if K is not None else int(chain.support()[-1])
    L = np.zeros((K + 1, K + 1))
    for k in range(K + 1):
        if k < K:
            L[k, k + 1] = chain.lam
        if k > 0:
            L[k, k - 1] = k
        L[k, k] = -L[k].sum()
    return L


def detailed_balance_exact(lam: float, K: int = 100) -> bool:
    """pi(k) lambda == pi(k+1) (k+1) in exact rationals (the common e^{-lambda} factors out)."""
    lq = Fraction(lam)
    w = Fraction(1)  # lambda^k / k!
    for k in range(K + 1):
        w_next = w * lq / (k + 1)
        if w * lq != w_next * (k + 1):
            return False
        w = w_next
    return True


@dataclass(frozen=True)
class MLSIForm:
    entropy: float
    dirichlet: float
    pairing: float
    boundary: float
    quotient: float


def _weights(chain: ChainSpec, f: DiscreteFunction):
    k = chain.support(f)
    return k, chain.logpmf(k)


def modified_lsi_form(chain: ChainSpec, f: DiscreteFunction) -> MLSIForm:
    """Ent_pi(e^f), the double-sum Dirichlet form, and int e^f (-L f) dpi.

    The double sum counts each edge twice, so dirichlet = 2 * pairing.
    """
    k, lp = _weights(chain, f)
    fv = f(k)
    m = float(np.max(fv))
    ef = np.exp(fv - m)  # everything below is scaled by e^{-m}
    p = np.exp(lp)
    Z = math.fsum((p * ef).tolist())
    ent = math.fsum((p * ef * fv).tolist()) - Z * math.log(Z) - Z * m
    df = np.diff(fv)
    dexp = np.diff(ef)
    edge = chain.lam * p[:-1] * dexp * df
    pairing_terms = edge
    pairing = math.fsum(pairing_terms.tolist())
    # direct double sum over the truncated generator (both orientations of each edge)
    L = generator_matrix(chain, int(k[-1]))
    D = (ef[None, :] - ef[:, None]) * (fv[None, :] - fv[:, None])
    off = L.copy()
    np.fill_diagonal(off, 0.0)
    dirichlet = float(np.sum(p[:, None] * off * D))
    # boundary: the dropped edge K -> K+1 and the mass beyond K
    kb = int(k[-1])
    fK1 = float(f(kb + 1))
    bnd = abs(chain.lam * p[-1] * (math.exp(fK1 - m) - ef[-1]) * (fK1 - fv[-1]))
    bnd += float(core.poisson_tail(chain.lam, kb)) * max(ef[-1], math.exp(fK1 - m))
    total = abs(pairing) + Z
    if bnd > BOUNDARY_RTOL * total:
        warnings.warn(f"boundary terms are {bnd / total:.3g} of the total", TruncationWarning)
    scale = math.exp(m)
    ent, dirichlet, pairing = ent * scale, dirichlet * scale, pairing * scale
    q = ent / dirichlet if dirichlet > 0 else (0.0 if ent <= 0 else math.inf)
    return MLSIForm(ent, dirichlet, pairing, bnd * scale, q)


def mean(chain: ChainSpec, f: DiscreteFunction) -> float:
    k, lp = _weights(chain, f)
    return math.fsum((np.exp(lp) * f(k)).tolist())


def centered(chain: ChainSpec, f: DiscreteFunction) -> DiscreteFunction:
    return f.shifted(mean(chain, f))


def log_expectation(chain: ChainSpec, logf: np.ndarray, lp: np.ndarray) -> float:
    return float(special.logsumexp(logf + lp))


def theorem_51_check(chain: ChainSpec, f: DiscreteFunction, alpha: float,
                     c_lsi: float | None = None, tol: float = DEFAULT_TOL) -> InequalityReport:
    """log sum e^f pi <= (c/(alpha - c)) sum e^{alpha |L f|} pi for pi-centered f."""
    c = chain.lam if c_lsi is None else c_lsi
    if alpha <= c:
        raise DomainError(f"alpha must exceed c={c:g}")
    g = centered(chain, f)
    k, lp = _weights(chain, g)
    lhs = log_expectation(chain, g(k), lp)
    Lg = mm_infinity_generator(chain, g, k)
    lr = log_expectation(chain, alpha * np.abs(Lg), lp)
    params = {"lambda": chain.lam, "alpha": alpha, "c_lsi": c}
    bnd = float(core.poisson_tail(chain.lam, int(k[-1]))) * math.exp(
        min(_EXP_MAX, alpha * float(np.abs(Lg[-1]))))
    if bnd > BOUNDARY_RTOL * math.exp(min(lr, _EXP_MAX)):
        warnings.warn("truncated tail of the exponential moment is not negligible",
                      TruncationWarning)
    if lr > _EXP_MAX:
        return vacuous_report("poisson-thm51", lhs, params, f.tag)
    return make_report("poisson-thm51", lhs, c / (alpha - c) * math.exp(lr), tol=tol,
                       params=params, function_tag=f.tag)


# ---------------------------------------------------------------------------
# the weight G and its conjugate

def log_g_lambda(lam: float, x):
    """log G(x): log x on (0, 1], lambda (x + (1 + 2/x) log(lambda x)) e^x beyond."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("G is defined for x > 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        big = lam * (x + (1 + 2 / x) * np.log(lam * x)) * np.exp(x)
    return np.where(x <= 1, np.log(np.minimum(x, 1.0)), big)


def g_lambda(lam: float, x):
    """G(x); +inf is the overflow sentinel when log G exceeds the float range."""
    lg = log_g_lambda(lam, x)
    with np.errstate(over="ignore"):
        out = np.where(lg > _EXP_MAX, np.inf, np.exp(np.minimum(lg, _EXP_MAX)))
    return float(out) if np.ndim(out) == 0 else out


def _x_window(lam: float, ell: float) -> float:
    """A point beyond which x - e^{ell} G(x) < 0 (so the sup lies to its left)."""
    X = 2.0
    while ell + float(log_g_lambda(lam, X)) < math.log(X) + 5:
        X *= 1.5
        if X > 1e3:
            raise RangeError("search window for the conjugate does not close")
    return X


def scaled_conjugate(lam: float, ell: float, points: int = 4001) -> tuple[float, float]:
    """sup_{x > 0} {x - e^{ell} G(x)} and its maximizer.

    With ell = log pi(k) this is pi(k) G*(1/pi(k)).  On (0, 1] the sup is
    1 - e^{ell} at x = 1 (for ell <= 0); beyond 1 a grid plus a bounded
    refinement is used.
    """
    best, arg = max(0.0, 1.0 - math.exp(ell)), 1.0 if ell <= 0 else 0.0
    X = _x_window(lam, ell)
    xs = np.linspace(1.0, X, points)[1:]

    def h(x):
        with np.errstate(over="ignore"):
            return x - np.exp(np.minimum(ell + log_g_lambda(lam, x), _EXP_MAX))

    v = h(xs)
    i = int(np.argmax(v))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    res = optimize.minimize_scalar(lambda s: -float(h(s)), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-13})
    cand = max((float(v[i]), float(xs[i])), (-float(res.fun), float(res.x)))
    if cand[0] > best:
        best, arg = cand
    return best, arg


def g_lambda_star(lam: float, y: float) -> float:
    """G*(y) = sup_{x > 0} {x y - G(x)}; +inf when it overflows."""
    if y < 0:
        raise DomainError("y must be non-negative")
    if y == 0:
        return 0.0
    s, _ = scaled_conjugate(lam, -math.log(y))
    v = y * s
    return v if math.isfinite(v) else math.inf


def g_star_pi(lam: float, k) -> np.ndarray:
    """pi(k) G*(1/pi(k)) for each k."""
    ks = np.atleast_1d(np.asarray(k))
    lp = core.poisson_logpmf(lam, ks)
    return np.array([scaled_conjugate(lam, float(l))[0] for l in lp])


def g_star_bound_rhs(lam: float, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return np.log(k) - math.log(lam) - 1 / k + 3 / (k * np.log(k))


@dataclass(frozen=True)
class GStarBoundReport:
    lam: float
    k: tuple[int, ...]
    margins: tuple[float, ...]
    k_min: int | None
    passed: bool
    eventually_increasing: bool


def g_star_bound_check(lam: float, k_range: Sequence[int] | None = None) -> GStarBoundReport:
    """Margins of pi(k) G*(1/pi(k)) <= log k - log lambda - 1/k + 3/(k log k).

    k_min is the smallest k in the range from which the bound holds for every
    larger k in the range.
    """
    ks = np.arange(2, 201) if k_range is None else np.asarray(list(k_range))
    if np.any(ks < 2):
        raise DomainError("the bound needs k >= 2")
    m = g_star_bound_rhs(lam, ks) - g_star_pi(lam, ks)
    ok = m >= 0
    k_min = None
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        k_min = int(ks[0])
    elif bad[-1] + 1 < ks.size:
        k_min = int(ks[bad[-1] + 1])
    tail = m[-min(20, m.size):]
    inc = bool(np.all(np.diff(tail) > 0))
    return GStarBoundReport(lam, tuple(int(k) for k in ks), tuple(float(x) for x in m), k_min,
                            k_min is not None, inc)


# ---------------------------------------------------------------------------
# Phi lemma

def phi0(x):
    x = np.asarray(x, dtype=float)
    return x * np.log(x)


def phi1(x):
    x = np.asarray(x, dtype=float)
    return (1 + 1 / np.log(np.log(x))) * x * np.log(x)


PHI1_MIN = float(phi1(math.e ** 2))


def _inverse(fn, y: float, lo: float) -> float:
    if y < float(fn(lo)):
        raise RangeError(f"{y:g} lies below the range of the map")
    hi = max(2 * lo, y)
    while float(fn(hi)) < y:
        hi *= 2
    return optimize.brentq(lambda s: float(fn(s)) - y, lo, hi, xtol=1e-14, rtol=1e-15)


def phi0_inverse(y: float) -> float:
    return _inverse(phi0, y, math.e)


def phi1_inverse(y: float) -> float:
    return _inverse(phi1, y, math.e ** 2)


@dataclass(frozen=True)
class PhiReport:
    lower_ok: bool
    upper_ok: bool
    min_lower_margin: float
    min_upper_margin: float
    upper_points: int
    range_start: float


def phi_lemma_check(x_grid: Sequence[float] | None = None) -> PhiReport:
    """x/log x <= Phi0^{-1}(x) and Phi1^{-1}(x) <= (x/log x)(1 + 1/log x).

    Phi1 maps [e^2, inf) onto [Phi1(e^2), inf) with Phi1(e^2) ~ 36.1, so the
    upper bound is only checked at grid points in that range.
    """
    xs = np.exp(np.linspace(2, 20, 200)) if x_grid is None else np.asarray(x_grid, dtype=float)
    lo = [phi0_inverse(x) - x / math.log(x) for x in xs]
    up_x = [x for x in xs if x >= PHI1_MIN]
    up = [x / math.log(x) * (1 + 1 / math.log(x)) - phi1_inverse(x) for x in up_x]
    return PhiReport(bool(min(lo) >= -1e-12 * max(xs)), bool(not up or min(up) >= -1e-9),
                     float(min(lo)), float(min(up)) if up else math.nan, len(up_x), PHI1_MIN)


# ---------------------------------------------------------------------------
# the Poisson exponential inequality

@dataclass(frozen=True)
class PoissonConstants:
    lam: float
    c: float
    d: float
    A: float
    sup_x_over_g: float
    exact_terms: int
    bound_terms: int
    remainder: float
    k_min: int | None
    details: dict = field(default_factory=dict)


def _sup_x_over_g(lam: float) -> float:
    """sup_{x > 0} x / G(x): 1 on (0, 1]; beyond 1 by grid and refinement."""
    xs = np.linspace(1.0, 60.0, 60001)[1:]
    lr = np.log(xs) - log_g_lambda(lam, xs)
    i = int(np.argmax(lr))
    res = optimize.minimize_scalar(
        lambda s: -(math.log(s) - float(log_g_lambda(lam, s))),
        bounds=(xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]), method="bounded",
        options={"xatol": 1e-12})
    return max(1.0, math.exp(max(float(lr[i]), -float(res.fun))))


def constants_cd_estimate(lam: float, K_exact: int = 200, N_bound: int = 100_000
                          ) -> PoissonConstants:
    """Admissible (c, d) from the majorant series of the duality argument.

    c = log(pi(0) + sum_{n >= 1} exp{S_n} pi(n)), S_n = sum_{k < n} pi(k) G*(1/pi(k)).
    S_n is exact for n <= K_exact; beyond it each new term is replaced by the
    bound log k - log lambda - 1/k + 3/(k log k) (valid there once
    K_exact >= k_min), summed to N_bound; the rest of the series is bounded by
    an integral comparison of its summands, which decay like (log n)^3 / n^2.
    d = 1 + A max(1, sup x/G(x)) with A the Poisson Hardy constant.
    """
    gsb = g_star_bound_check(lam, range(2, K_exact + 1))
    if gsb.k_min is None or gsb.k_min > K_exact:
        raise RangeError("the conjugate bound does not settle inside the exact range")
    ks = np.arange(K_exact)
    terms = g_star_pi(lam, ks)
    S_exact = np.concatenate([[0.0], np.cumsum(terms)])  # S_0 .. S_K
    n1 = np.arange(1, K_exact + 1)
    log_sum = [float(core.poisson_logpmf(lam, 0))]
    log_sum.extend((S_exact[1:] + core.poisson_logpmf(lam, n1)).tolist())
    # bound terms for k = K_exact .. N_bound - 1
    kb = np.arange(K_exact, N_bound, dtype=float)
    S_b = S_exact[-1] + np.cumsum(g_star_bound_rhs(lam, kb))
    nb = kb + 1
    lb = S_b + core.poisson_logpmf(lam, nb)
    log_sum.extend(lb.tolist())
    total_log = float(special.logsumexp(log_sum))
    # remainder: summand ~ C (log n)^3 / n^2, sum_{n > N} <= C (log N)^3 / N (1 + 3/log N + ...)
    last = float(np.exp(lb[-1]))
    N = float(nb[-1])
    remainder = last * N * (1 + 3 / math.log(N) + 6 / math.log(N) ** 2 + 6 / math.log(N) ** 3)
    c = math.log(math.exp(total_log) + remainder)
    hp = hardy_constant_poisson(lam)
    sx = _sup_x_over_g(lam)
    d = 1 + hp.value * sx
    return PoissonConstants(lam, c, d, hp.value, sx, K_exact, int(kb.size), remainder, gsb.k_min,
                            {"hardy_argmax": hp.argmax, "series_log": total_log})


def _log_mean_g(chain: ChainSpec, grad: np.ndarray, lp: np.ndarray) -> float:
    ag = np.abs(grad)
    with np.errstate(divide="ignore"):
        lg = np.where(ag > 0, log_g_lambda(chain.lam, np.where(ag > 0, ag, 1.0)), -np.inf)
    return float(special.logsumexp(lg + lp))


def poisson_exponential_check(lam: float, f: DiscreteFunction,
                              constants: PoissonConstants | None = None,
                              form: str = "both", tol: float = DEFAULT_TOL) -> InequalityReport:
    """log sum e^{|f|} pi <= c + sum G(|grad f|) pi for f(0) = 0, and <= c + d sum G pi centered.

    form is "anchored", "centered" or "both" (margin is then the smaller one).
    """
    if form not in ("anchored", "centered", "both"):
        raise DomainError("form must be anchored, centered or both")
    chain = ChainSpec(lam)
    cst = constants or constants_cd_estimate(lam)
    params = {"lambda": lam, "c": cst.c, "d": cst.d, "form": form}
    margins = {}
    lhs_main = rhs_main = math.nan
    for which in ("anchored", "centered"):
        if form not in (which, "both"):
            continue
        g = f.shifted(float(f(0))) if which == "anchored" else centered(chain, f)
        k, lp = _weights(chain, g)
        lhs = log_expectation(chain, np.abs(g(k)), lp)
        lG = _log_mean_g(chain, g.gradient(k), lp)
        if lG > _EXP_MAX:
            return vacuous_report("poisson", lhs, params, f.tag, reason="G(|grad f|) overflows")
        I = math.exp(lG)
        rhs = cst.c + (I if which == "anchored" else cst.d * I)
        margins[which] = rhs - lhs
        params[f"{which}_lhs"], params[f"{which}_rhs"] = lhs, rhs
        if math.isnan(lhs_main):
            lhs_main, rhs_main = lhs, rhs
    return make_report("poisson", lhs_main, rhs_main, margin=min(margins.values()), tol=tol,
                       params=params, function_tag=f.tag)


# ---------------------------------------------------------------------------
# test families on the integers

def discrete_suite(K: int = 200) -> list[DiscreteFunction]:
    """Ten functions on the integers used by the discrete property checks."""
    F = DiscreteFunction.from_callable
    return [
        F(lambda k: 0.1 * k, K, "linear", tag="linear(0.1)"),
        F(lambda k: 0.3 * k, K, "linear", tag="linear(0.3)"),
        F(lambda k: -0.2 * k, K, "linear", tag="linear(-0.2)"),
        F(lambda k: (k == 0).astype(float), K, tag="indicator(0)"),
        F(lambda k: (k >= 3).astype(float), K, tag="indicator(>=3)"),
        F(lambda k: 0.3 * np.minimum(k, 3), K, tag="capped(3,0.3)"),
        F(lambda k: 0.5 * np.sqrt(k), K, "linear", tag="sqrt(0.5)"),
        F(lambda k: 0.5 * np.sin(k), K, tag="sin(0.5)"),
        F(lambda k: 0.5 * np.log1p(k), K, "linear", tag="log1p(0.5)"),
        F(lambda k: 0.3 * (-1.0) ** k, K, tag="alternating(0.3)"),
    ]
