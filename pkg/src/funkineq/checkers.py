"""Checkers for the one-dimensional exponential inequalities and their transfers.

Every checker takes an unnormalized test function, performs the centering
(or re-anchoring) it needs, and returns an :class:`InequalityReport`.  A
right-hand side that diverges makes the inequality trivially true; such
reports carry ``vacuous=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from . import core
from .core import LOG_SQRT_2PI, SQRT_HALF_PI, MeasureSpec, QuadratureConfig
from .errors import DivergentIntegral, DomainError, NonFiniteIntegrand, NotLogConcave
from .functions import Function1D, quadratic_capped, sign_changes
from .rearrangement import f2, hardy_constant_gaussian, monotone_split
from .reports import DEFAULT_TOL, InequalityReport, make_report, vacuous_report

C_BG = 0.5
IR_CONSTANT = 10.0
IR_SQRT_CONSTANTS = (8.0, 14.0)
EXP_HARDY_CONSTANT = 5.14
FD_TOL = 1e-4
SQRT5M1 = math.sqrt(5) - 1

_DIVERGENT = (DivergentIntegral, NonFiniteIntegrand)


def _tol(*fs: Function1D) -> float:
    """1e-6 for analytic derivatives, 1e-4 once a finite difference is involved."""
    return FD_TOL if any(f.df is None for f in fs) else DEFAULT_TOL


def log_g_ir(x):
    """log of e^{x^2/2} / (1 + x)."""
    x = np.abs(np.asarray(x, dtype=float))
    return 0.5 * x * x - np.log1p(x)


def log_g_sqrt(x):
    """log of e^{x^2/2} / sqrt(1 + x^2/2)."""
    x = np.asarray(x, dtype=float)
    return 0.5 * x * x - 0.5 * np.log1p(0.5 * x * x)


def g_sqrt(x):
    return np.exp(log_g_sqrt(x))


def g_ir(x):
    return np.exp(log_g_ir(x))


def _gaussian_log_mean(logf, kinks=(), q=None):
    return core.weighted_log_integral(logf, MeasureSpec.gaussian1d(), q, kinks=kinks)


def _log_rhs(logf, kinks, q, mu=None):
    """log int exp(logf) dmu, or +inf when the integral diverges."""
    mu = mu or MeasureSpec.gaussian1d()
    try:
        return core.weighted_log_integral(logf, mu, q, kinks=kinks)
    except _DIVERGENT:
        return math.inf, 0.0


# ---------------------------------------------------------------------------
# Gaussian inequalities

def check_bg(f: Function1D, alpha: float = 1.0, c: float = C_BG,
             q: QuadratureConfig | None = None) -> InequalityReport:
    """int e^f dgamma <= (int e^{alpha f'^2} dgamma)^{c/(alpha-c)}, compared on log scale."""
    if alpha <= c:
        raise DomainError(f"alpha must exceed c={c:g}")
    g = core.centered(f, None, q)
    d = g.deriv
    expo = c / (alpha - c)
    params = {"alpha": alpha, "c": c, "exponent": expo}
    lr, e2 = _log_rhs(lambda x: alpha * d(x) ** 2, g.kinks, q)
    lhs, e1 = _gaussian_log_mean(g, q=q)
    if not math.isfinite(lr):
        return vacuous_report("bg", lhs, params, f.tag)
    return make_report("bg", lhs, expo * lr, tol=_tol(f), params=params,
                       quadrature_error=e1 + expo * e2, function_tag=f.tag)


def check_ir(f: Function1D, q: QuadratureConfig | None = None) -> InequalityReport:
    """log int e^f dgamma <= 10 int e^{f'^2/2} / (1 + |f'|) dgamma."""
    g = core.centered(f, None, q)
    d = g.deriv
    params = {"constant": IR_CONSTANT}
    lr, e2 = _log_rhs(lambda x: log_g_ir(d(x)), g.kinks, q)
    lhs, e1 = _gaussian_log_mean(g, q=q)
    if not math.isfinite(lr):
        return vacuous_report("ir", lhs, params, f.tag)
    I = math.exp(lr)
    return make_report("ir", lhs, IR_CONSTANT * I, tol=_tol(f), params=params,
                       quadrature_error=e1 + IR_CONSTANT * I * e2, function_tag=f.tag)


def check_ir_sqrt(f: Function1D, q: QuadratureConfig | None = None) -> InequalityReport:
    """Both corollary forms: 8 int G_sqrt(f') and 14 int e^{f'^2/2}/(1+|f'|)."""
    g = core.centered(f, None, q)
    d = g.deriv
    k8, k14 = IR_SQRT_CONSTANTS
    l8, e8 = _log_rhs(lambda x: log_g_sqrt(d(x)), g.kinks, q)
    l14, e14 = _log_rhs(lambda x: log_g_ir(d(x)), g.kinks, q)
    lhs, e1 = _gaussian_log_mean(g, q=q)
    params = {"constant_sqrt": k8, "constant_ir": k14}
    if not math.isfinite(l8) or not math.isfinite(l14):
        return vacuous_report("ir-sqrt", lhs, params, f.tag)
    r8, r14 = k8 * math.exp(l8), k14 * math.exp(l14)
    params.update({"rhs_sqrt": r8, "rhs_ir": r14, "chain_ok": r8 <= r14 * (1 + 1e-12)})
    return make_report("ir-sqrt", lhs, r8, margin=min(r8, r14) - lhs, tol=_tol(f), params=params,
                       quadrature_error=e1 + r8 * e8 + r14 * e14, function_tag=f.tag)


def c_beta(beta: float) -> float:
    """5/(2-beta)^2 - log(beta - sqrt 5 + 1), beta in (sqrt 5 - 1, 2)."""
    if not SQRT5M1 < beta < 2:
        raise DomainError("beta must lie in (sqrt(5) - 1, 2)")
    return 5 / (2 - beta) ** 2 - math.log(beta - SQRT5M1)


def kappa_hardy(beta: float) -> float:
    return math.sqrt(2) * beta / (beta + 2)


def kappa_cmp(beta: float) -> float:
    """kappa_beta = 1/sqrt 2 + sqrt 2 / beta."""
    return 1 / math.sqrt(2) + math.sqrt(2) / beta


def _anchor(f: Function1D) -> Function1D:
    f0 = float(f(0.0))
    return f.shifted(f0) if f0 != 0.0 else f


def check_exp_hardy(f: Function1D, q: QuadratureConfig | None = None) -> InequalityReport:
    """log int_0^inf e^{|f|} e^{-x^2/2} dx <= int_0^inf G_sqrt(|f'|) e^{-x^2/2} dx + 5.14.

    f is re-anchored to f(0) = 0 first.
    """
    g = _anchor(f)
    fn, d = g.f, g.deriv
    params = {"constant": EXP_HARDY_CONSTANT}
    try:
        lr, e2 = core.halfline_log_integral(lambda x: log_g_sqrt(d(x)), q, kinks=g.kinks)
    except _DIVERGENT:
        lr, e2 = math.inf, 0.0
    lhs, e1 = core.halfline_log_integral(lambda x: np.abs(fn(x)), q, kinks=g.kinks)
    if not math.isfinite(lr) or lr > 700:
        return vacuous_report("exp-hardy", lhs, params, f.tag)
    I = math.exp(lr)
    return make_report("exp-hardy", lhs, I + EXP_HARDY_CONSTANT, tol=_tol(f), params=params,
                       quadrature_error=e1 + I * e2, function_tag=f.tag)


def check_beta_hardy(f: Function1D, beta: float,
                     q: QuadratureConfig | None = None) -> InequalityReport:
    """log int_0^inf e^{|f|^g} e^{-x^2/2} <= (int_0^inf e^{(kappa |f'|)^beta} e^{-x^2/2})^g + c_beta.

    g = 2 beta/(beta + 2) and kappa = sqrt(2) beta/(beta + 2).  The statement is
    for non-negative f; |f| is used, whose derivative has the same modulus.
    """
    cb = c_beta(beta)
    gam = 2 * beta / (beta + 2)
    kap = kappa_hardy(beta)
    g = _anchor(f)
    fn, d = g.f, g.deriv
    params = {"beta": beta, "c_beta": cb, "kappa": kap, "power": gam}
    try:
        lr, e2 = core.halfline_log_integral(lambda x: (kap * np.abs(d(x))) ** beta, q,
                                            kinks=g.kinks)
    except _DIVERGENT:
        lr, e2 = math.inf, 0.0
    lhs, e1 = core.halfline_log_integral(lambda x: np.abs(fn(x)) ** gam, q, kinks=g.kinks)
    if not math.isfinite(lr) or gam * lr > 700:
        return vacuous_report("beta-hardy", lhs, params, f.tag)
    P = math.exp(gam * lr)
    return make_report("beta-hardy", lhs, P + cb, tol=_tol(f), params=params,
                       quadrature_error=e1 + gam * P * e2, function_tag=f.tag)


def check_cmp(f: Function1D, beta: float, kappa: float | None = None,
              q: QuadratureConfig | None = None) -> InequalityReport:
    """Report the pair (M, int exp{|f|^{2 beta/(beta+2)}} dgamma); no bound is asserted.

    lhs carries M, rhs the output integral; ``satisfied`` means the output
    integral is finite whenever M is.
    """
    kb = kappa_cmp(beta)
    kappa = kb if kappa is None else kappa
    if not 0 < kappa <= kb * (1 + 1e-12):
        raise DomainError(f"kappa must lie in (0, {kb:.6g}]")
    g = core.centered(f, None, q)
    fn, d = g.f, g.deriv
    gam = 2 * beta / (beta + 2)
    params = {"beta": beta, "kappa": kappa, "kappa_beta": kb, "power": gam}
    lm, em = _log_rhs(lambda x: np.abs(d(x)) ** beta / kappa ** beta, g.kinks, q)
    if not math.isfinite(lm):
        return vacuous_report("cmp", math.nan, params, f.tag, reason="M is infinite")
    lo, eo = _log_rhs(lambda x: np.abs(fn(x)) ** gam, g.kinks, q)
    M, out = math.exp(lm), math.exp(lo) if math.isfinite(lo) else math.inf
    params["output_finite"] = math.isfinite(out)
    rep = make_report("cmp", M, out, margin=0.0 if math.isfinite(out) else -math.inf,
                      params=params, quadrature_error=M * em + (out * eo if math.isfinite(out) else 0),
                      function_tag=f.tag)
    return rep


# ---------------------------------------------------------------------------
# transfers

@dataclass(frozen=True)
class BaseInequality:
    """int e^f dmu <= F(int G(|f'|) dmu) for mean-zero f."""

    name: str
    F: Callable[[float], float]
    log_G: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)


def base_inequality(name: str, alpha: float = 1.0, c: float = C_BG) -> BaseInequality:
    if name == "ir":
        return BaseInequality("ir", lambda t: math.exp(IR_CONSTANT * t), log_g_ir)
    if name == "ir-sqrt":
        return BaseInequality("ir-sqrt", lambda t: math.exp(IR_SQRT_CONSTANTS[0] * t), log_g_sqrt)
    if name == "bg":
        if alpha <= c:
            raise DomainError(f"alpha must exceed c={c:g}")
        e = c / (alpha - c)
        return BaseInequality("bg", lambda t: t ** e, lambda x: alpha * np.asarray(x) ** 2,
                              {"alpha": alpha, "c": c})
    raise DomainError(f"unknown base inequality {name!r}; choose ir, ir-sqrt or bg")


def _exp_or_inf(x: float) -> float:
    return math.exp(x) if x < 709 else math.inf


def holley_stroock_transfer(base: BaseInequality | str, h: Function1D, f: Function1D,
                            a: float | None = None, b: float | None = None,
                            q: QuadratureConfig | None = None) -> InequalityReport:
    """int e^f dnu <= 1 + b F((1/a) int G(|f'|) dnu), nu = h gamma normalized, f centered under nu."""
    base = base_inequality(base) if isinstance(base, str) else base
    nu = MeasureSpec.perturbed(MeasureSpec.gaussian1d(), h, a, b)
    g = core.centered(f, nu, q)
    d, lG = g.deriv, base.log_G
    params = {"base": base.name, "a": nu.a, "b": nu.b, **base.params}
    lr, e2 = _log_rhs(lambda x: lG(np.abs(d(x))), g.kinks, q, nu)
    ll, e1 = core.weighted_log_integral(g, nu, q)
    lhs = math.exp(ll)
    if not math.isfinite(lr):
        return vacuous_report("hs-transfer", lhs, params, f.tag)
    I = math.exp(lr)
    Fv = base.F(I / nu.a)
    rhs = 1 + nu.b * Fv
    return make_report("hs-transfer", lhs, rhs, tol=_tol(f), params=params,
                       quadrature_error=lhs * e1, function_tag=f.tag)


@dataclass(frozen=True)
class Transport:
    """Monotone map T = F_mu^{-1} o Phi sampled on a grid."""

    x: np.ndarray
    T: np.ndarray
    lipschitz: float


def _cdf_table(mu: MeasureSpec, lo: float, hi: float, cells: int = 4000):
    u = np.linspace(lo, hi, cells + 1)
    gx, gw = np.polynomial.legendre.leggauss(20)
    mid, half = 0.5 * (u[1:] + u[:-1]), 0.5 * (u[1:] - u[:-1])
    nodes = mid[:, None] + half[:, None] * gx[None, :]
    mass = (np.exp(mu.log_density(nodes)) * gw[None, :]).sum(axis=1) * half
    left, _ = core.weighted_integral(lambda s: (s < lo).astype(float), mu, kinks=(lo,))
    cdf = left + np.concatenate([[0.0], np.cumsum(mass)])
    return u, cdf, gx, gw


def monotone_transport(mu: MeasureSpec, x: Sequence[float] | None = None) -> Transport:
    """T = F_mu^{-1}(Phi(x)) on a grid, by Brent root finding on the CDF of mu."""
    x = np.linspace(-5.0, 5.0, 401) if x is None else np.asarray(x, dtype=float)
    u, cdf, gx, gw = _cdf_table(mu, -12.0, 12.0)

    def F(s):
        j = int(np.clip(np.searchsorted(u, s, side="right") - 1, 0, u.size - 2))
        half = 0.5 * (s - u[j])
        nodes = u[j] + half * (gx + 1)
        return cdf[j] + half * float(np.exp(mu.log_density(nodes)) @ gw)

    targets = core.normal_cdf(x)
    T = np.empty_like(x)
    for i, p in enumerate(targets):
        j = int(np.clip(np.searchsorted(cdf, p) - 1, 0, u.size - 2))
        a, b = u[j], u[j + 1]
        while F(a) > p:
            a -= 1.0
        while F(b) < p:
            b += 1.0
        T[i] = optimize.brentq(lambda s: F(s) - p, a, b, xtol=1e-14, rtol=1e-15)
    lip = float(np.max(np.abs(np.diff(T) / np.diff(x))))
    return Transport(x, T, lip)


def contraction_transfer_1d(mu: MeasureSpec, g: Function1D, base: BaseInequality | str = "ir",
                            q: QuadratureConfig | None = None,
                            lip_tol: float = 1e-6) -> InequalityReport:
    """int e^g dmu <= F(int G(|g'|) dmu) for mu strongly log-concave, g centered under mu."""
    base = base_inequality(base) if isinstance(base, str) else base
    tr = monotone_transport(mu)
    if tr.lipschitz > 1 + lip_tol:
        raise NotLogConcave(f"transport has Lipschitz constant {tr.lipschitz:.8g} > 1")
    gc = core.centered(g, mu, q)
    d, lG = gc.deriv, base.log_G
    params = {"base": base.name, "lipschitz": tr.lipschitz, **base.params}
    lr, e2 = _log_rhs(lambda x: lG(np.abs(d(x))), gc.kinks, q, mu)
    ll, e1 = core.weighted_log_integral(gc, mu, q)
    lhs = math.exp(ll)
    if not math.isfinite(lr):
        return vacuous_report("contraction-1d", lhs, params, g.tag)
    rhs = base.F(math.exp(lr))
    return make_report("contraction-1d", lhs, rhs, tol=_tol(g), params=params,
                       quadrature_error=lhs * e1, function_tag=g.tag)


def gaussian_superlevel(g: Function1D, t: float, R: float = 12.0) -> float:
    """gamma({g > t}) from the sign changes of g - t on [-R, R]."""
    fn = g.f
    roots = sign_changes(lambda x: np.asarray(fn(x)) - t, -R, R)
    pts = np.concatenate([[-math.inf], np.asarray(roots), [math.inf]])
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if a == -math.inf and b == math.inf:
            m = 0.0
        elif a == -math.inf:
            m = b - 1.0
        elif b == math.inf:
            m = a + 1.0
        else:
            m = 0.5 * (a + b)
        if float(fn(np.array(m))) > t:
            total += float(core.normal_cdf(b) - core.normal_cdf(a))
    return total


def maximal_median(g: Function1D, R: float = 12.0, tol: float = 1e-12) -> float:
    """inf{t : gamma(g > t) <= 1/2} by bisection."""
    xs = np.linspace(-R, R, 4001)
    v = g(xs)
    lo, hi = float(v.min()) - 1.0, float(v.max()) + 1.0
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if gaussian_superlevel(g, mid, R) <= 0.5:
            hi = mid
        else:
            lo = mid
    return hi


def median_variant_check(g: Function1D, a: float = IR_CONSTANT, c_cheeger: float = SQRT_HALF_PI,
                         q: QuadratureConfig | None = None) -> InequalityReport:
    """log int e^g dgamma <= (a + 2c) int G_ir(|g'|) dgamma for g with maximal median 0."""
    m = maximal_median(g)
    gm = g.shifted(m)
    d = gm.deriv
    params = {"a": a, "c_cheeger": c_cheeger, "median": m}
    lr, e2 = _log_rhs(lambda x: log_g_ir(d(x)), gm.kinks, q)
    lhs, e1 = _gaussian_log_mean(gm, q=q)
    if not math.isfinite(lr):
        return vacuous_report("median", lhs, params, g.tag)
    I = math.exp(lr)
    k = a + 2 * c_cheeger
    return make_report("median", lhs, k * I, tol=_tol(g), params=params,
                       quadrature_error=e1 + k * I * e2, function_tag=g.tag)


# ---------------------------------------------------------------------------
# optimality

@dataclass(frozen=True)
class FalsificationReport:
    N: tuple[float, ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    difference: tuple[float, ...]
    lower_bound_ok: tuple[bool, ...]
    upper_bound_ok: tuple[bool, ...]
    strictly_increasing: bool
    increment_ratio: float
    divergent: bool
    label: str

    def to_dict(self) -> dict:
        return {"N": list(self.N), "lhs": list(self.lhs), "rhs": list(self.rhs),
                "difference": list(self.difference), "lower_bound_ok": list(self.lower_bound_ok),
                "upper_bound_ok": list(self.upper_bound_ok),
                "strictly_increasing": self.strictly_increasing,
                "increment_ratio": self.increment_ratio, "divergent": self.divergent,
                "label": self.label}


DEFAULT_N_LIST = (2, 4, 8, 16, 32, 64)


def falsify_h(H: Callable[[np.ndarray], np.ndarray], N_list: Sequence[float] = DEFAULT_N_LIST,
              q: QuadratureConfig | None = None, ratio_threshold: float = 0.5,
              label: str = "claim") -> FalsificationReport:
    """Evaluate the quadratic-capped family against log int e^f <= int f + F(int e^{f'^2/2}/H(f')).

    H is clamped below by 1.  The difference LHS_N - RHS_N (F = identity) is
    flagged divergent when it is strictly increasing and, over the last
    doubling of N, the RHS grew by less than ``ratio_threshold`` times the
    growth of the LHS.
    """
    def Hc(t):
        return np.maximum(1.0, np.asarray(H(np.abs(np.asarray(t, dtype=float))), dtype=float))

    Ns = [float(n) for n in N_list]
    if len(Ns) < 2 or any(n <= 0 for n in Ns) or any(np.diff(Ns) <= 0):
        raise DomainError("N_list needs at least two increasing positive values")
    lhs, rhs, lb, ub = [], [], [], []
    for N in Ns:
        fN = quadratic_capped(N)
        L, _ = _gaussian_log_mean(fN, q=q)
        d = fN.deriv
        lR, _ = _gaussian_log_mean(lambda x: 0.5 * d(x) ** 2 - np.log(Hc(d(x))), fN.kinks, q)
        Rv = math.exp(lR)
        invH, _ = core.integrate_interval(lambda t: 1.0 / Hc(t), 0.0, N, (), q)
        mean_f, _ = core.weighted_integral(fN, MeasureSpec.gaussian1d(), q)
        lhs.append(L)
        rhs.append(Rv)
        lb.append(bool(L >= math.log(2 * N) - 1))
        ub.append(bool(mean_f + Rv <= 0.5 + 2 * invH + 1 + 1e-9))
    diff = [a - b for a, b in zip(lhs, rhs)]
    inc = bool(all(b > a for a, b in zip(diff[:-1], diff[1:])))
    dl = lhs[-1] - lhs[-2]
    ratio = (rhs[-1] - rhs[-2]) / dl if dl > 0 else math.inf
    return FalsificationReport(tuple(Ns), tuple(lhs), tuple(rhs), tuple(diff), tuple(lb),
                               tuple(ub), inc, float(ratio), inc and ratio < ratio_threshold, label)


def h_log_squared(t):
    t = np.asarray(t, dtype=float)
    return t * np.log(math.e + t) ** 2


def h_linear(t):
    return 1.0 + np.asarray(t, dtype=float)


@dataclass(frozen=True)
class SquareProbe:
    """Outcome of the exploratory probe of int e^f <= (int e^{f'^2/2})^2."""

    tag: str
    lhs: float
    rhs: float
    holds: bool
    label: str = "exploratory"


def exploratory_square_scan(functions: Sequence[Function1D],
                            q: QuadratureConfig | None = None) -> list[SquareProbe]:
    """Probe int e^f dgamma <= (int e^{f'^2/2} dgamma)^2 for centered f; never a claim."""
    out = []
    for f in functions:
        g = core.centered(f, None, q)
        d = g.deriv
        ll, _ = _gaussian_log_mean(g, q=q)
        lr, _ = _log_rhs(lambda x: 0.5 * d(x) ** 2, g.kinks, q)
        out.append(SquareProbe(f.tag, ll, 2 * lr, bool(ll <= 2 * lr + 1e-9)))
    return out


def sqrt3_comparison(x_max: float = 50.0, points: int = 50001) -> dict:
    """(1 + x)/sqrt(1 + x^2/2) <= sqrt 3 on [0, x_max]; the maximum sits at x = 2."""
    x = np.linspace(0.0, x_max, points)
    r = (1 + x) / np.sqrt(1 + 0.5 * x * x)
    i = int(np.argmax(r))
    res = optimize.minimize_scalar(lambda s: -(1 + s) / math.sqrt(1 + 0.5 * s * s),
                                   bounds=(x[max(i - 1, 0)], x[min(i + 1, points - 1)]),
                                   method="bounded", options={"xatol": 1e-12})
    mx = -float(res.fun)
    return {"max": mx, "argmax": float(res.x), "sqrt3": math.sqrt(3),
            "passed": bool(mx <= math.sqrt(3) * (1 + 1e-12) and abs(res.x - 2) < 1e-5)}


# ---------------------------------------------------------------------------
# reduction to the half-line

PARIS_A = math.exp(EXP_HARDY_CONSTANT) / math.sqrt(2 * math.pi)
PARIS_B = math.sqrt(2 * math.pi)
PARIS_C = 0.5


def paris_F(x):
    """F(x) = a e^{bx} - c with a = e^{5.14}/sqrt(2 pi), b = sqrt(2 pi), c = 1/2."""
    return PARIS_A * np.exp(PARIS_B * np.asarray(x, dtype=float)) - PARIS_C


def psi(x):
    """log(1 + a x^{3.5} + (a - 1) x) / log x."""
    x = np.asarray(x, dtype=float)
    return np.log1p(PARIS_A * x ** 3.5 + (PARIS_A - 1) * x) / np.log(x)


def psi_check(points: int = 1001) -> dict:
    x = np.linspace(math.e, math.e ** 4, points)
    v = psi(x)
    return {"psi_e": float(psi(math.e)), "decreasing": bool(np.all(np.diff(v) < 0)),
            "passed": bool(psi(math.e) <= 8 and np.all(np.diff(v) < 0))}


@dataclass(frozen=True)
class ParisConstant:
    d: float
    argmax: float
    max_ratio: float


def paris_constant(log_G: Callable = log_g_sqrt, A: float | None = None) -> ParisConstant:
    """d = A max_{x >= 0} x/G(x), A the Gaussian Hardy constant (sqrt(pi/2))."""
    A = hardy_constant_gaussian() if A is None else A
    xs = np.linspace(1e-6, 12.0, 24001)
    lr = np.log(xs) - log_G(xs)
    i = int(np.argmax(lr))
    res = optimize.minimize_scalar(lambda s: -(math.log(s) - float(log_G(s))),
                                   bounds=(xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]),
                                   method="bounded", options={"xatol": 1e-12})
    m = math.exp(-float(res.fun))
    return ParisConstant(A * m, float(res.x), m)


def halfline_base_check(f: Function1D, q: QuadratureConfig | None = None) -> dict:
    """int_0^inf e^f dgamma - 1/2 <= F(int_0^inf G_sqrt(|f'|) dgamma) for f(0) = 0."""
    g = _anchor(f)
    d = g.deriv
    lI, _ = core.halfline_log_integral(lambda x: log_g_sqrt(d(x)), q, kinks=g.kinks)
    lE, _ = core.halfline_log_integral(g, q, kinks=g.kinks)
    lhs = math.exp(lE - LOG_SQRT_2PI) - 0.5
    rhs = float(paris_F(math.exp(lI - LOG_SQRT_2PI)))
    return {"lhs": lhs, "rhs": rhs, "margin": rhs - lhs}


def reduction_pipeline_check(g: Function1D, q: QuadratureConfig | None = None,
                             tol: float | None = None) -> InequalityReport:
    """Run the half-line reduction on centered g and check every assembled bound.

    Steps: monotone envelopes f_+ and f_-, the half-line base inequality on
    each, the F_2 bound, the bound with the Hardy constant, and the form with
    d = A max x/G(x).  ``margin`` is the smallest margin over the steps.
    """
    gc = core.centered(g, None, q)
    tol = _tol(g) if tol is None else tol
    env = monotone_split(gc)
    env_ok = env.check(tol=1e-8)
    bp = halfline_base_check(env.f_plus, q)
    bm = halfline_base_check(env.f_minus, q)
    d = gc.deriv
    lI, _ = _log_rhs(lambda x: log_g_sqrt(d(x)), gc.kinks, q)
    params = {"A": hardy_constant_gaussian()}
    lE, e1 = _gaussian_log_mean(gc, q=q)
    E = math.exp(lE)
    if not math.isfinite(lI):
        return vacuous_report("reduction", E, params, g.tag)
    I = math.exp(lI)
    F2 = f2(paris_F, I, convex=True)
    absd = core.weighted_integral(lambda x: np.abs(d(x)), MeasureSpec.gaussian1d(), q,
                                  kinks=gc.kinks)[0]
    A = params["A"]
    pc = paris_constant()
    g0 = float(gc(0.0))
    # first part of the reduction (int g = 0, so exp{int g} = 1)
    first = math.exp(g0) * F2.value - (E - 1.0)
    final = 1 + math.exp(A * absd) * F2.value
    eq13 = (1 + PARIS_A * math.exp((pc.d + PARIS_B) * I)
            + (PARIS_A - 2 * PARIS_C) * math.exp(pc.d * I))
    hardy_lhs = core.weighted_integral(lambda x: np.abs(gc(x) - g0), MeasureSpec.gaussian1d(), q,
                                       kinks=gc.kinks)[0]
    hardy_ok = hardy_lhs <= A * absd + 1e-9
    margins = {"base_plus": bp["margin"], "base_minus": bm["margin"], "first_part": first,
               "final": final - E, "paris": eq13 - E}
    params.update({"d": pc.d, "d_argmax": pc.argmax, "F2": F2.value,
                   "F2_convex_ok": bool(F2.convex_ok), "envelope_ok": bool(env_ok["passed"]),
                   "hardy_ok": bool(hardy_ok), "int_G": I, "int_abs_grad": absd,
                   **{f"margin_{k}": v for k, v in margins.items()}})
    m = min(margins.values())
    rep = make_report("reduction", E, eq13, margin=m, tol=tol, params=params,
                      quadrature_error=E * e1, function_tag=g.tag)
    if rep.satisfied and not (env_ok["passed"] and F2.convex_ok and hardy_ok):
        rep = InequalityReport(rep.inequality_id, rep.lhs, rep.rhs, rep.margin, False, False,
                               rep.params, rep.quadrature_error, rep.function_tag)
    return rep
