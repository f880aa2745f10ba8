"""Structured outcome of one inequality check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

DEFAULT_TOL = 1e-6

# How ``margin`` is formed for each registered id.  "log" margins compare the
# logarithms of both sides, "linear" margins compare the sides themselves.
MARGIN_FORMS = {
    "bg": "log: (c/(alpha-c)) log int e^{alpha f'^2} - log int e^f",
    "ir": "linear: rhs - log int e^f",
    "ir-sqrt": "linear: rhs - log int e^f (min over the 8 and 14 forms)",
    "exp-hardy": "linear: rhs - lhs, both already on log scale",
    "beta-hardy": "linear: rhs - lhs, both already on log scale",
    "cmp": "observation only: margin 0 when the output integral is finite",
    "bg-local": "linear: c_alpha(t) log P_t e^{alpha Gamma f} - (log P_t e^f - P_t f)",
    "bg-global": "log: exponent * log int e^{alpha Gamma f} - log int e^f",
    "cmp-lf": "linear: rhs - lhs (min over the signed and |f| forms)",
    "mlsi-p": "log: (c/(alpha-c)) log int e^{alpha H(f'/2)} - log int e^f",
    "poisson": "linear: c + d sum G(|grad f|) pi - log sum e^{|f|} pi",
    "poisson-thm51": "linear: (c/(alpha-c)) sum e^{alpha |Lf|} pi - log sum e^f pi",
    "hs-transfer": "linear: 1 + b F(int G/a) - int e^f dnu",
    "contraction-1d": "linear: F(int G(|g'|) dmu) - int e^g dmu",
    "median": "linear: (a + 2c) int G(|g'|) - log int e^g",
    "reduction": "linear: bound - int e^g, minimum over every assembled step",
}


@dataclass(frozen=True)
class InequalityReport:
    inequality_id: str
    lhs: float
    rhs: float
    margin: float
    satisfied: bool
    vacuous: bool = False
    params: Mapping[str, Any] = field(default_factory=dict)
    quadrature_error: float = 0.0
    function_tag: str = ""

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "margin": _num(self.margin),
            "satisfied": bool(self.satisfied),
            "vacuous": bool(self.vacuous),
            "params": {k: _num(v) for k, v in sorted(self.params.items())},
            "quadrature_error": _num(self.quadrature_error),
            "function_tag": self.function_tag,
        }


FIELDS = ("inequality_id", "lhs", "rhs", "margin", "satisfied", "vacuous", "params",
          "quadrature_error", "function_tag")


def _num(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int,)):
        return v
    try:
        x = float(v)
    except (TypeError, ValueError):
        return str(v)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def make_report(inequality_id: str, lhs: float, rhs: float, margin: float | None = None,
                tol: float = DEFAULT_TOL, params: Mapping[str, Any] | None = None,
                quadrature_error: float = 0.0, function_tag: str = "",
                vacuous: bool = False) -> InequalityReport:
    if margin is None:
        margin = rhs - lhs
    if vacuous:
        return InequalityReport(inequality_id, lhs, math.inf, math.inf, True, True,
                                dict(params or {}), quadrature_error, function_tag)
    ok = bool(margin >= -tol)
    return InequalityReport(inequality_id, float(lhs), float(rhs), float(margin), ok, False,
                            dict(params or {}), float(quadrature_error), function_tag)


def vacuous_report(inequality_id: str, lhs: float = math.nan, params=None,
                   function_tag: str = "", reason: str = "rhs diverges") -> InequalityReport:
    p = dict(params or {})
    p["vacuous_reason"] = reason
    return make_report(inequality_id, lhs, math.inf, params=p, function_tag=function_tag,
                       vacuous=True)
