"""One-dimensional Ornstein-Uhlenbeck semigroup and the inequalities built on it.

P_t f(x) = E f(e^{-t} x + sqrt(1 - e^{-2t}) Y) with Y standard normal.  The
curvature-rho semigroup (generator f'' - rho x f') is reached by a time
change: P^rho_t f(x) = P_{rho t}[f(. / sqrt rho)](sqrt(rho) x).

Smooth functions are integrated with Gauss-Hermite nodes in the noise
variable.  Functions with kinks go through a Gauss-Legendre rule in the
landing variable u = e^{-t} x + sigma y, whose panels are split at the kinks
and are therefore shared by every x; the integration window is widened
until the integrand is negligible at its edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import special

from . import core
from .core import LOG_SQRT_2PI, MeasureSpec, QuadratureConfig, panel_edges
from .errors import DivergentIntegral, DomainError, NonFiniteIntegrand
from .functions import Function1D, abs_of_derivative
from .reports import InequalityReport, make_report, vacuous_report

_CHUNK = 1 << 22
_MAX_NODES = 400_000
_GL_ORDER = 16
_EDGE_LOG_DROP = 40.0


@lru_cache(maxsize=8)
def _gh_rule(order: int):
    y, w = np.polynomial.hermite_e.hermegauss(order)
    return y, np.log(w) - LOG_SQRT_2PI


@lru_cache(maxsize=4)
def _gl_rule(n: int):
    return np.polynomial.legendre.leggauss(n)


def _scalar_out(x, out):
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def _check_finite(v, what="integrand"):
    if not np.all(np.isfinite(v)):
        raise NonFiniteIntegrand(f"{what} is not finite at a quadrature node")


def _gh_apply(f: Function1D, m: np.ndarray, sigma: float, order: int,
              scale: float | None) -> tuple[np.ndarray, bool]:
    """Fixed Gauss-Hermite rule; the flag is False when the outermost nodes still matter."""
    y, logw = _gh_rule(order)
    out = np.empty(m.size)
    resolved = True
    rows = max(1, _CHUNK // y.size)
    for i in range(0, m.size, rows):
        Z = m[i:i + rows, None] + sigma * y[None, :]
        with np.errstate(over="ignore", invalid="ignore"):
            fv = f(Z)
        if not np.all(np.isfinite(fv)):
            return out, False
        if scale is None:
            terms = fv * np.exp(logw)[None, :]
            out[i:i + rows] = terms.sum(axis=1)
            edge = np.maximum(np.abs(terms[:, 0]), np.abs(terms[:, -1]))
            resolved &= bool(np.all(edge <= 1e-17 * np.abs(terms).sum(axis=1)))
        else:
            lt = scale * fv + logw[None, :]
            tot = special.logsumexp(lt, axis=1)
            out[i:i + rows] = tot
            resolved &= bool(np.all(np.maximum(lt[:, 0], lt[:, -1]) <= tot - _EDGE_LOG_DROP))
    return out, resolved


def _kernel_apply(f: Function1D, m: np.ndarray, sigma: float, scale: float | None) -> np.ndarray:
    r = 12.0
    gx, gw = _gl_rule(_GL_ORDER)
    width = 0.5 * min(1.0, sigma)
    for _ in range(6):
        lo, hi = float(m.min()) - r * sigma, float(m.max()) + r * sigma
        edges = panel_edges(lo, hi, f.kinks, width)
        if (edges.size - 1) * _GL_ORDER > _MAX_NODES:
            raise NonFiniteIntegrand("kernel window too wide for the node budget")
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        u = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        nu = (half[:, None] * gw[None, :]).ravel()
        with np.errstate(over="ignore", invalid="ignore"):
            fu = f(u)
        _check_finite(fu)
        out = np.empty(m.size)
        edge_ok = True
        rows = max(1, _CHUNK // u.size)
        for i in range(0, m.size, rows):
            mm = m[i:i + rows, None]
            logk = -0.5 * ((u[None, :] - mm) / sigma) ** 2 - LOG_SQRT_2PI - math.log(sigma)
            if scale is None:
                terms = np.exp(logk) * (nu * fu)[None, :]
                out[i:i + rows] = terms.sum(axis=1)
                ref = np.abs(terms).sum(axis=1)
                edge = np.maximum(np.abs(terms[:, 0]), np.abs(terms[:, -1]))
                edge_ok &= bool(np.all(edge <= 1e-17 * np.maximum(ref, 1e-300)))
            else:
                lt = logk + (np.log(nu) + scale * fu)[None, :]
                tot = special.logsumexp(lt, axis=1)
                out[i:i + rows] = tot
                edge = np.maximum(lt[:, 0], lt[:, -1])
                edge_ok &= bool(np.all(edge <= tot - _EDGE_LOG_DROP))
        if edge_ok:
            return out
        r *= 1.6
    raise DivergentIntegral("Mehler integrand does not decay inside the kernel window")


def _time_change(f: Function1D, rho: float) -> Function1D:
    s = math.sqrt(rho)
    fn = f.f
    return Function1D(lambda u: fn(np.asarray(u) / s), domain=f.domain,
                      kinks=tuple(k * s for k in f.kinks), smooth=f.smooth, tag=f.tag)


def _mehler(f: Function1D, t: float, x, q: QuadratureConfig | None, rho: float,
            scale: float | None):
    if t < 0:
        raise DomainError("t must be non-negative")
    if rho <= 0:
        raise DomainError("rho must be positive")
    if rho != 1.0:
        return _mehler(_time_change(f, rho), rho * t, np.asarray(x) * math.sqrt(rho), q, 1.0, scale)
    xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if t == 0:
        v = f(xa)
        out = v if scale is None else scale * v
        return _scalar_out(x, out)
    q = q or core.default_config()
    m = math.exp(-t) * xa
    sigma = math.sqrt(-math.expm1(-2 * t))
    resolved = False
    if f.smooth:
        out, resolved = _gh_apply(f, m, sigma, max(q.order, 64), scale)
    if not resolved:
        out = _kernel_apply(f, m, sigma, scale)
    return _scalar_out(x, out)


def mehler_apply(f: Function1D, t: float, x, q: QuadratureConfig | None = None,
                 rho: float = 1.0):
    """P_t f(x), vectorized in x."""
    return _mehler(f, t, x, q, rho, None)


def mehler_log_exp(f: Function1D, t: float, x, scale: float = 1.0,
                   q: QuadratureConfig | None = None, rho: float = 1.0):
    """log P_t(exp(scale * f))(x), computed without forming exp(scale * f)."""
    return _mehler(f, t, x, q, rho, float(scale))


def semigroup_image(f: Function1D, s: float, rho: float = 1.0,
                    q: QuadratureConfig | None = None) -> Function1D:
    """P_s f as a Function1D (analytic for s > 0, so no kinks are declared)."""
    if s == 0:
        return f
    return Function1D(lambda z: mehler_apply(f, s, z, q, rho), smooth=f.smooth,
                      tag=f"P_{s:g}[{f.tag}]")


def gamma(f: Function1D, x):
    """Carre du champ of the OU operator: f'(x)^2."""
    d = f.deriv(x)
    return d * d


def gamma_function(f: Function1D) -> Function1D:
    d = f.deriv
    return Function1D(lambda x: d(x) ** 2, domain=f.domain, kinks=f.kinks,
                      smooth=f.smooth, tag=f"Gamma({f.tag})")


def ou_generator(f: Function1D, x):
    """L f(x) = f''(x) - x f'(x)."""
    x = np.asarray(x, dtype=float)
    return f.deriv2(x) - x * f.deriv(x)


def semigroup_derivative(f: Function1D, t: float, x, rho: float = 1.0,
                         q: QuadratureConfig | None = None):
    """d/dx P_t f(x) by a centered difference, Richardson-extrapolated once."""
    x = np.asarray(x, dtype=float)
    h = 1e-4 * np.maximum(1.0, np.abs(x))

    def D(hh):
        return (mehler_apply(f, t, x + hh, q, rho) - mehler_apply(f, t, x - hh, q, rho)) / (2 * hh)

    return (4 * D(h / 2) - D(h)) / 3


# ---------------------------------------------------------------------------
# local inequalities

@dataclass(frozen=True)
class GridCheck:
    name: str
    max_violation: float
    passed: bool
    detail: dict


def commutation_check(f: Function1D, t: float, grid: Sequence[float],
                      q: QuadratureConfig | None = None, tol: float = 1e-7) -> GridCheck:
    """Gamma(P_t f) <= e^{-2t} P_t Gamma(f) and |d P_t f| <= e^{-t} P_t |f'| on a grid."""
    x = np.asarray(grid, dtype=float)
    dP = semigroup_derivative(f, t, x, q=q)
    lhs = dP * dP
    rhs = math.exp(-2 * t) * mehler_apply(gamma_function(f), t, x, q)
    v1 = float(np.max(lhs - rhs))
    absd = abs_of_derivative(f)
    rhs2 = math.exp(-t) * mehler_apply(absd, t, x, q)
    v2 = float(np.max(np.abs(dP) - rhs2))
    return GridCheck("commutation", max(v1, v2), v1 <= tol and v2 <= tol,
                     {"gamma_form": v1, "sqrt_form": v2, "t": t, "points": int(x.size)})


@dataclass(frozen=True)
class LocalLSIReport:
    entropy: float
    rhs: float
    margin: float
    passed: bool


def local_lsi_check(f: Function1D, t: float, x: float, rho: float = 1.0,
                    q: QuadratureConfig | None = None, tol: float = 1e-7) -> LocalLSIReport:
    """Ent_{P_t}(f^2)(x) <= (2/rho)(1 - e^{-2 rho t}) P_t(Gamma f)(x) for positive f."""
    fn = f.f
    sq = Function1D(lambda u: np.asarray(fn(u)) ** 2, kinks=f.kinks, smooth=f.smooth)

    def ent_integrand(u):
        v = np.asarray(fn(u)) ** 2
        if np.any(v <= 0):
            raise DomainError("local_lsi_check needs a strictly positive f")
        return v * np.log(v)

    sl = Function1D(ent_integrand, kinks=f.kinks, smooth=f.smooth)
    a = float(mehler_apply(sq, t, x, q, rho))
    b = float(mehler_apply(sl, t, x, q, rho))
    ent = b - a * math.log(a)
    rhs = (2 / rho) * (-math.expm1(-2 * rho * t)) * float(mehler_apply(gamma_function(f), t, x, q, rho))
    margin = rhs - ent
    return LocalLSIReport(ent, rhs, margin, margin >= -tol)


# ---------------------------------------------------------------------------
# exponent of the semigroup inequality

@dataclass(frozen=True)
class ExponentParams:
    alpha: float
    rho: float
    t: float

    def __post_init__(self):
        if self.rho <= 0 or self.t <= 0:
            raise DomainError("rho and t must be positive")

    @property
    def a_t(self) -> float:
        return math.sqrt(2 * self.rho * self.alpha * math.expm1(2 * self.rho * self.t))

    @property
    def threshold(self) -> float:
        return admissibility_threshold(self.rho, self.t)

    @property
    def admissible(self) -> bool:
        return self.alpha > self.threshold


def admissibility_threshold(rho: float, t: float) -> float:
    """(e^{2 rho t} + e^{-2 rho t} - 2) / (2 rho (e^{2 rho t} - 1))."""
    u = 2 * rho * t
    return (math.expm1(u) + math.expm1(-u)) / (2 * rho * math.expm1(u))


def c_alpha(params: ExponentParams) -> float:
    """Closed-form exponent c_alpha(t) of the local semigroup inequality."""
    rho, al, t = params.rho, params.alpha, params.t
    if al <= 0:
        raise DomainError("alpha must be positive")
    a = params.a_t
    e = math.exp(rho * t)
    em = math.exp(-2 * rho * t)
    num = (e * a - 1) * (e * a + 1 + a * a - em)
    den = (e * a + 1) * (-e * a + 1 + a * a - em)
    # below e^{rho t} a_t = 1 both factors are negative; only the ratio matters
    if den == 0 or not num / den > 0:
        raise DomainError("log argument is not positive: alpha is inadmissible")
    val = math.sqrt(-math.expm1(-2 * rho * t)) / (2 * math.sqrt(2 * rho * al)) * math.log(num / den)
    if not val > 0:
        raise DomainError("c_alpha is not positive")
    return val


def c_alpha_limit(alpha: float, rho: float = 1.0) -> float:
    """t -> infinity limit: (1/(2x)) log((x+1)/(x-1)), x = sqrt(2 rho alpha) > 1."""
    x = math.sqrt(2 * rho * alpha)
    if x <= 1:
        raise DomainError("alpha must exceed 1/(2 rho)")
    return math.log((x + 1) / (x - 1)) / (2 * x)


def exponent_chain(x: float) -> tuple[float, float, float]:
    """(1/(2x)) log((x+1)/(x-1)), log(x^2/(x^2-1)), 1/(x^2-1) for x > 1."""
    if x <= 1:
        raise DomainError("x must exceed 1")
    return (math.log((x + 1) / (x - 1)) / (2 * x), math.log(x * x / (x * x - 1)), 1 / (x * x - 1))


def lemma_integrand(rho: float, alpha: float, t: float):
    E = math.expm1(2 * rho * t)

    def g(s):
        s = np.asarray(s, dtype=float)
        return 2 * rho * E / (2 * rho * alpha * np.exp(2 * rho * s) * E
                              + np.expm1(2 * rho * (t - s)) * np.expm1(-2 * rho * (t - s)))
    return g


@dataclass(frozen=True)
class IdentityReport:
    closed: float
    quadrature: float
    rel_err: float
    passed: bool


def integral_identity_check(rho: float, alpha: float, t: float,
                            q: QuadratureConfig | None = None, tol: float = 1e-9) -> IdentityReport:
    p = ExponentParams(alpha, rho, t)
    if not p.admissible:
        raise DomainError("parameters are not admissible")
    closed = c_alpha(p)
    q = q or QuadratureConfig(rel_tol=1e-13, abs_tol=1e-15)
    num, _ = core.integrate_interval(lemma_integrand(rho, alpha, t), 0.0, t, (), q)
    rel = abs(closed - num) / abs(num)
    return IdentityReport(closed, num, rel, rel <= tol)


# ---------------------------------------------------------------------------
# inequality checks

def _log_integral_or_inf(fn):
    try:
        return fn()
    except (DivergentIntegral, NonFiniteIntegrand):
        return math.inf, 0.0


def theorem_bg_check(f: Function1D, t: float, alpha: float, x: float = 0.0, rho: float = 1.0,
                     q: QuadratureConfig | None = None, tol: float = 1e-7) -> InequalityReport:
    """log P_t(e^f)(x) - P_t f(x) <= c_alpha(t) log P_t(e^{alpha Gamma f})(x)."""
    p = ExponentParams(alpha, rho, t)
    if not p.admissible:
        raise DomainError(f"alpha must exceed {p.threshold:.6g} at t={t:g}, rho={rho:g}")
    c = c_alpha(p)
    lhs = float(mehler_log_exp(f, t, x, 1.0, q, rho)) - float(mehler_apply(f, t, x, q, rho))
    params = {"t": t, "alpha": alpha, "x": x, "rho": rho, "c_alpha": c}
    try:
        lg = float(mehler_log_exp(gamma_function(f), t, x, alpha, q, rho))
    except (DivergentIntegral, NonFiniteIntegrand):
        return vacuous_report("bg-local", lhs, params, f.tag)
    return make_report("bg-local", lhs, c * lg, tol=tol, params=params, function_tag=f.tag)


def _gaussian_scaled(f: Function1D, rho: float) -> Function1D:
    if rho == 1.0:
        return f
    s = math.sqrt(rho)
    fn, d = f.f, f.deriv
    return Function1D(lambda y: fn(np.asarray(y) / s), lambda y: d(np.asarray(y) / s) / s,
                      kinks=tuple(k * s for k in f.kinks), smooth=f.smooth, tag=f.tag)


def theorem_bg_global_check(f: Function1D, alpha: float, rho: float = 1.0,
                            q: QuadratureConfig | None = None, tol: float = 1e-7) -> InequalityReport:
    """int e^f dmu <= (int e^{alpha Gamma f} dmu)^{exponent}, mu = N(0, 1/rho), f centered."""
    expo = c_alpha_limit(alpha, rho)
    g = _gaussian_scaled(f, rho)
    mu = MeasureSpec.gaussian1d()
    g = core.centered(g, mu, q)
    gd = g.deriv
    lhs, e1 = core.weighted_log_integral(g, mu, q)
    params = {"alpha": alpha, "rho": rho, "exponent": expo}
    # Gamma is taken in the original variable: f'(y/sqrt rho)^2 = rho g'(y)^2
    lr, e2 = _log_integral_or_inf(lambda: core.weighted_log_integral(
        lambda y: alpha * rho * gd(y) ** 2, mu, q, kinks=g.kinks))
    if not math.isfinite(lr):
        return vacuous_report("bg-global", lhs, params, f.tag)
    return make_report("bg-global", lhs, expo * lr, tol=tol, params=params,
                       quadrature_error=e1 + expo * e2, function_tag=f.tag)


@dataclass(frozen=True)
class HyperReport:
    s: tuple[float, ...]
    psi: tuple[float, ...]
    max_increase: float
    passed: bool


def hypercontractivity_monotonicity_check(f: Function1D, t: float, p: float,
                                          s_grid: Sequence[float] | None = None, x0: float = 0.0,
                                          rho: float = 1.0, q: QuadratureConfig | None = None,
                                          tol: float = 1e-6) -> HyperReport:
    """psi(s) = (1/q(s)) log P_{t-s}(exp(q(s) P_s f))(x0) should not increase in s."""
    if s_grid is None:
        s_grid = [t * k / 20 for k in range(20)]
    s_arr = [float(s) for s in s_grid]
    if any(not 0 <= s < t for s in s_arr):
        raise DomainError("s_grid must lie in [0, t)")
    psi = []
    for s in s_arr:
        qs = p * math.expm1(2 * rho * t) / math.expm1(2 * rho * (t - s))
        g = semigroup_image(f, s, rho, q)
        if s > 0 and not f.smooth:
            g = Function1D(g.f, smooth=False, tag=g.tag)
        psi.append(float(mehler_log_exp(g, t - s, x0, qs, q, rho)) / qs)
    inc = float(np.max(np.diff(psi))) if len(psi) > 1 else 0.0
    return HyperReport(tuple(s_arr), tuple(psi), inc, inc <= tol)


def cmp_lf_check(f: Function1D, alpha: float, c: float = 0.5,
                 q: QuadratureConfig | None = None, tol: float = 1e-7) -> InequalityReport:
    """log int e^f <= (c/(alpha-c)) int e^{alpha |Lf|}, plus the |f| form."""
    if alpha <= c:
        raise DomainError(f"alpha must exceed c={c:g}")
    mu = MeasureSpec.gaussian1d()
    g = core.centered(f, mu, q)
    lhs1, e1 = core.weighted_log_integral(g, mu, q)
    gf = g.f
    lhs2, e2 = core.weighted_log_integral(lambda x: np.abs(gf(x)), mu, q, kinks=g.kinks)
    params = {"alpha": alpha, "c": c}
    li, e3 = _log_integral_or_inf(lambda: core.weighted_log_integral(
        lambda x: alpha * np.abs(ou_generator(g, x)), mu, q, kinks=g.kinks))
    if not math.isfinite(li):
        return vacuous_report("cmp-lf", lhs1, params, f.tag)
    I = math.exp(li)
    rhs1 = c / (alpha - c) * I
    k2 = c / (math.e * alpha) + math.log(2) + 2 * c / (alpha - c)
    rhs2 = k2 * I
    params.update({"abs_lhs": lhs2, "abs_rhs": rhs2, "abs_margin": rhs2 - lhs2,
                   "signed_margin": rhs1 - lhs1})
    margin = min(rhs1 - lhs1, rhs2 - lhs2)
    return make_report("cmp-lf", lhs1, rhs1, margin=margin, tol=tol, params=params,
                       quadrature_error=e1 + e2 + I * e3, function_tag=f.tag)


def conjugate_exponent(p: float) -> float:
    """q = p/(p-1)."""
    return p / (p - 1)


def modified_lsi_conclusion_check(p: float, f: Function1D, alpha: float, c_assumed: float,
                                  q: QuadratureConfig | None = None,
                                  tol: float = 1e-7) -> InequalityReport:
    """int e^f dmu_p <= (int exp{alpha H(f'/2)} dmu_p)^{c/(alpha-c)}, H = max(x^2, |x|^q).

    Conditional on the assumed modified log-Sobolev constant; the report says so.
    """
    if not 1 < p <= 2:
        raise DomainError("p must lie in (1, 2]")
    if alpha <= c_assumed:
        raise DomainError(f"alpha must exceed c={c_assumed:g}")
    qe = conjugate_exponent(p)
    mu = MeasureSpec.subgaussian(p)
    g = core.centered(f, mu, q)
    gd = g.deriv
    lhs, e1 = _log_integral_or_inf(lambda: core.weighted_log_integral(g, mu, q))
    expo = c_assumed / (alpha - c_assumed)
    params = {"p": p, "q": qe, "alpha": alpha, "c_assumed": c_assumed, "exponent": expo,
              "conditional": True}

    def logf(x):
        h = np.abs(gd(x)) / 2
        return alpha * np.maximum(h * h, h ** qe)

    lr, e2 = _log_integral_or_inf(lambda: core.weighted_log_integral(logf, mu, q, kinks=g.kinks))
    if not math.isfinite(lr):
        return vacuous_report("mlsi-p", lhs, params, f.tag)
    if not math.isfinite(lhs):
        return make_report("mlsi-p", math.inf, expo * lr, margin=-math.inf, params=params,
                           function_tag=f.tag)
    return make_report("mlsi-p", lhs, expo * lr, tol=tol, params=params,
                       quadrature_error=e1 + expo * e2, function_tag=f.tag)
