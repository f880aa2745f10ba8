"""Test-function carrier and the parameterized families used by every checker."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from numpy.polynomial import hermite_e

Array = np.ndarray
Fn = Callable[[Array], Array]


def _as_array_fn(fn: Fn, x) -> Array:
    x = np.asarray(x, dtype=float)
    y = np.asarray(fn(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).copy()
    return y


def _fd1(fn: Fn, x: Array) -> Array:
    h = 1e-5 * np.maximum(1.0, np.abs(x))
    return (_as_array_fn(fn, x + h) - _as_array_fn(fn, x - h)) / (2 * h)


@dataclass(frozen=True)
class Function1D:
    """A real function of one variable with derivatives and declared kinks.

    ``smooth`` marks functions analytic enough for fixed Gauss-Hermite rules;
    anything with kinks or sharp corners should leave it False so integrals go
    through the adaptive panel rule.
    """

    f: Fn
    df: Fn | None = None
    d2f: Fn | None = None
    domain: tuple[float, float] = (-math.inf, math.inf)
    kinks: tuple[float, ...] = ()
    smooth: bool = True
    tag: str = "anonymous"
    params: Mapping[str, float] = field(default_factory=dict)

    def __call__(self, x) -> Array:
        return _as_array_fn(self.f, x)

    def deriv(self, x) -> Array:
        if self.df is None:
            return _fd1(self.f, np.asarray(x, dtype=float))
        return _as_array_fn(self.df, x)

    def deriv2(self, x) -> Array:
        if self.d2f is None:
            return _fd1(self.deriv, np.asarray(x, dtype=float))
        return _as_array_fn(self.d2f, x)

    def shifted(self, c: float) -> "Function1D":
        """Return f - c (same derivatives)."""
        f = self.f
        return Function1D(lambda x: _as_array_fn(f, x) - c, self.df, self.d2f,
                          self.domain, self.kinks, self.smooth, self.tag, self.params)

    def scaled(self, s: float) -> "Function1D":
        """Return s * f."""
        f, df, d2f = self.f, self.df, self.d2f
        return Function1D(
            lambda x: s * _as_array_fn(f, x),
            None if df is None else (lambda x: s * _as_array_fn(df, x)),
            None if d2f is None else (lambda x: s * _as_array_fn(d2f, x)),
            self.domain, self.kinks, self.smooth, f"{s:g}*{self.tag}", self.params)

    def reflected(self) -> "Function1D":
        """Return x -> f(-x)."""
        f, df, d2f = self.f, self.df, self.d2f
        return Function1D(
            lambda x: _as_array_fn(f, -np.asarray(x, dtype=float)),
            None if df is None else (lambda x: -_as_array_fn(df, -np.asarray(x, dtype=float))),
            None if d2f is None else (lambda x: _as_array_fn(d2f, -np.asarray(x, dtype=float))),
            (-self.domain[1], -self.domain[0]), tuple(sorted(-k for k in self.kinks)),
            self.smooth, f"reflect({self.tag})", self.params)

    def composed_exp(self, scale: float = 1.0) -> "Function1D":
        """Return exp(scale * f) with matching derivatives."""
        f, d = self.f, self.deriv
        return Function1D(lambda x: np.exp(scale * _as_array_fn(f, x)),
                          lambda x: scale * d(x) * np.exp(scale * _as_array_fn(f, x)),
                          None, self.domain, self.kinks, self.smooth,
                          f"exp({scale:g}*{self.tag})", self.params)


def constant(c: float = 0.0) -> Function1D:
    return Function1D(lambda x: np.full_like(x, c), lambda x: np.zeros_like(x),
                      lambda x: np.zeros_like(x), tag=f"constant({c:g})", params={"c": c})


def identity() -> Function1D:
    return linear(1.0)


def linear(a: float) -> Function1D:
    return Function1D(lambda x: a * x, lambda x: np.full_like(x, a),
                      lambda x: np.zeros_like(x), tag=f"linear({a:g})", params={"a": a})


def quadratic(a: float = 1.0) -> Function1D:
    return Function1D(lambda x: a * x * x, lambda x: 2 * a * x,
                      lambda x: np.full_like(x, 2 * a), tag=f"quadratic({a:g})", params={"a": a})


def quadratic_capped(N: float) -> Function1D:
    """f_N(x) = min(|x|, N)^2 / 2, the optimality family."""
    if N <= 0:
        raise ValueError("N must be positive")

    def f(x):
        m = np.minimum(np.abs(x), N)
        return 0.5 * m * m

    def df(x):
        return np.where(np.abs(x) < N, x, 0.0)

    def d2f(x):
        return np.where(np.abs(x) < N, 1.0, 0.0)

    return Function1D(f, df, d2f, kinks=(-float(N), float(N)), smooth=False,
                      tag=f"quadratic-capped({N:g})", params={"N": float(N)})


def abs_smoothed(eps: float) -> Function1D:
    if eps <= 0:
        raise ValueError("eps must be positive")
    return Function1D(lambda x: np.sqrt(x * x + eps * eps),
                      lambda x: x / np.sqrt(x * x + eps * eps),
                      lambda x: eps * eps / (x * x + eps * eps) ** 1.5,
                      smooth=False, tag=f"abs-smoothed({eps:g})", params={"eps": eps})


def sin_scaled(a: float) -> Function1D:
    return Function1D(lambda x: a * np.sin(x), lambda x: a * np.cos(x),
                      lambda x: -a * np.sin(x), tag=f"sin-scaled({a:g})", params={"a": a})


def cos_scaled(a: float) -> Function1D:
    return Function1D(lambda x: a * np.cos(x), lambda x: -a * np.sin(x),
                      lambda x: -a * np.cos(x), tag=f"cos-scaled({a:g})", params={"a": a})


def exp_scaled(a: float = 1.0) -> Function1D:
    return Function1D(lambda x: np.exp(a * x), lambda x: a * np.exp(a * x),
                      lambda x: a * a * np.exp(a * x), tag=f"exp({a:g})", params={"a": a})


def piecewise(knots: Sequence[float], values: Sequence[float]) -> Function1D:
    """Piecewise-linear interpolant, constant outside the knot range."""
    k = np.asarray(knots, dtype=float)
    v = np.asarray(values, dtype=float)
    if k.ndim != 1 or k.shape != v.shape or k.size < 2 or np.any(np.diff(k) <= 0):
        raise ValueError("knots must be strictly increasing and match values")
    slopes = np.diff(v) / np.diff(k)

    def df(x):
        i = np.clip(np.searchsorted(k, x, side="right") - 1, 0, k.size - 2)
        inside = (x >= k[0]) & (x < k[-1])
        return np.where(inside, slopes[i], 0.0)

    return Function1D(lambda x: np.interp(x, k, v), df, lambda x: np.zeros_like(x),
                      kinks=tuple(float(t) for t in k), smooth=False,
                      tag="piecewise(" + ",".join(f"{t:g}" for t in k) + ")",
                      params={f"v{i}": float(t) for i, t in enumerate(v)})


def hermite_mix(coeffs: Sequence[float]) -> Function1D:
    """sum_k c_k He_k(x), k >= 1 (probabilists' Hermite polynomials)."""
    c = np.concatenate([[0.0], np.asarray(coeffs, dtype=float)])
    dc = hermite_e.hermeder(c)
    d2c = hermite_e.hermeder(dc)
    return Function1D(lambda x: hermite_e.hermeval(x, c), lambda x: hermite_e.hermeval(x, dc),
                      lambda x: hermite_e.hermeval(x, d2c),
                      tag="hermite-mix(" + ",".join(f"{t:g}" for t in coeffs) + ")",
                      params={f"c{i + 1}": float(t) for i, t in enumerate(coeffs)})


def cubic_ratio(s: float = 1.0) -> Function1D:
    """s * x^3 / (1 + x^2): odd, unbounded, with bounded derivative."""
    return Function1D(lambda x: s * x ** 3 / (1 + x * x),
                      lambda x: s * x * x * (3 + x * x) / (1 + x * x) ** 2,
                      lambda x: s * 2 * x * (3 - x * x) / (1 + x * x) ** 3,
                      tag=f"cubic-ratio({s:g})", params={"s": s})


@dataclass(frozen=True)
class FamilySpec:
    """Name plus parameters of a test-function family member."""

    name: str
    params: Mapping[str, object] = field(default_factory=dict)
    mean_normalized: bool = True

    def build(self) -> Function1D:
        return make_family(self.name, **dict(self.params))


_BUILDERS: dict[str, Callable[..., Function1D]] = {
    "constant": lambda c=0.0: constant(c),
    "linear": lambda a=1.0: linear(a),
    "quadratic": lambda a=1.0: quadratic(a),
    "quadratic-capped": lambda N=2.0: quadratic_capped(N),
    "abs-smoothed": lambda eps=0.1: abs_smoothed(eps),
    "sin-scaled": lambda a=1.0: sin_scaled(a),
    "cos-scaled": lambda a=1.0: cos_scaled(a),
    "piecewise": lambda knots=(-1.0, 0.0, 1.0), values=(0.0, 0.5, 0.0): piecewise(knots, values),
    "hermite-mix": lambda coeffs=(0.3, 0.2): hermite_mix(coeffs),
    "cubic-ratio": lambda s=1.0: cubic_ratio(s),
}

FAMILY_NAMES = tuple(_BUILDERS)


def make_family(name: str, **params) -> Function1D:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}") from None
    return builder(**params)


def default_suite() -> list[Function1D]:
    """The ten-member suite every line checker is run against."""
    return [
        quadratic_capped(1), quadratic_capped(2), quadratic_capped(3),
        linear(0.2), linear(0.5), linear(1.0),
        sin_scaled(0.5), sin_scaled(1.0),
        hermite_mix((0.3, 0.2)), hermite_mix((0.2, -0.3)),
    ]


def halfline_suite() -> list[Function1D]:
    """Members of the default suite re-anchored so that f(0) = 0."""
    out = []
    for g in default_suite():
        g0 = float(g(0.0))
        out.append(g.shifted(g0) if g0 != 0.0 else g)
    return out


def sign_changes(fn: Fn, lo: float, hi: float, n: int = 4001) -> tuple[float, ...]:
    """Zeros of fn on [lo, hi] located by sign changes on a grid and refined by Brent."""
    from scipy.optimize import brentq

    xs = np.linspace(lo, hi, n)
    v = _as_array_fn(fn, xs)
    out = []
    for i in np.nonzero(v[:-1] * v[1:] < 0)[0]:
        out.append(brentq(lambda s: float(_as_array_fn(fn, np.array(s))), xs[i], xs[i + 1],
                          xtol=1e-15))
    out.extend(float(x) for x in xs[v == 0])
    return tuple(sorted(out))


def abs_of_derivative(g: Function1D, R: float = 24.0) -> Function1D:
    """|g'| with the zeros of g' on [-R, R] declared as kinks."""
    zeros = sign_changes(g.deriv, -R, R)
    d = g.deriv
    return Function1D(lambda x: np.abs(d(x)), domain=g.domain,
                      kinks=tuple(sorted(set(g.kinks) | set(zeros))), smooth=False,
                      tag=f"|d {g.tag}|")
