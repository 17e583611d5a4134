"""Numeric check of the two-term asymptotic expansions of Qf.

For each test function f = g^delta the exact generator sum Qf(x) is
compared with the closed-form expansion in R, alpha, beta, gamma, vartheta.
When both expansion terms vanish identically (e.g. alpha = beta = 0 with
f = log x) the expansion predicts only the order of the remainder; the row
is flagged and ``order_ratio`` = |Qf(x)| / (prefactor * x^(R-3)) is reported
instead of a meaningful relative error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from ..chain import ChainSpec, TestFunction, apply_generator
from ..parameters import Parameters, compute_parameters


class ExpansionError(ValueError):
    pass


@dataclass(frozen=True)
class ExpansionRow:
    x: int
    exact: float
    expansion: float
    rel_error: Optional[float]
    flagged: bool = False
    order_ratio: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "exact": self.exact,
            "expansion": self.expansion,
            "rel_error": self.rel_error,
            "flagged": self.flagged,
            "order_ratio": self.order_ratio,
        }


def expansion_terms(p: Parameters, family: str, delta: float, x: float) -> tuple[float, list]:
    """Prefactor and the list of bracket terms of the expansion at x."""
    if p.beta is None:
        raise ExpansionError("the expansion needs beta")
    a, b, g, th = float(p.alpha), float(p.beta), float(p.gamma), float(p.vartheta)
    R, d = p.R, delta
    L = math.log(x)
    x1 = x ** (R - 1)
    x2 = x ** (R - 2)
    if family == "pow":
        return d * x**d, [a * x1, (b + d * th) * x2]
    if family == "x-over-log":
        return d * (x / L) ** d, [a * (1 - 1 / L) * x1, ((b + d * th) - (b + 2 * d * th) / L) * x2]
    if family == "x-log":
        return d * (x * L) ** d, [a * (1 + 1 / L) * x1, (b + d * th) * x2, (g + d * th) * x2 / L]
    if family == "log":
        return d * L ** (d - 1), [a * x1, b * x2, (d - 1) * th * x2 / L]
    if family == "loglog":
        ll = math.log(L)
        return d * ll ** (d - 1) / L, [a * x1, b * x2, -th * x2 / L]
    raise ExpansionError(f"unknown family {family!r}")


def check_generator_expansion(
    spec: ChainSpec,
    family: str,
    delta: float,
    x_grid: Iterable[int],
    params: Optional[Parameters] = None,
) -> list[ExpansionRow]:
    p = params or compute_parameters(spec)
    f = TestFunction(family, delta)
    rows = []
    for x in x_grid:
        x = int(x)
        if x < 3:
            raise ExpansionError("grid points must be >= 3 so that log log x > 0")
        exact = apply_generator(spec, f, x)
        if delta == 0:
            rows.append(ExpansionRow(x, exact, 0.0, 0.0 if exact == 0 else math.inf))
            continue
        pref, terms = expansion_terms(p, family, delta, float(x))
        expv = pref * math.fsum(terms)
        if all(t == 0 for t in terms):
            scale = abs(pref) * float(x) ** (p.R - 3)
            rel = None if exact == 0 else abs(exact - expv) / abs(exact)
            rows.append(ExpansionRow(x, exact, expv, rel, True, abs(exact) / scale))
        else:
            rows.append(ExpansionRow(x, exact, expv, abs(exact - expv) / abs(expv) if expv else math.inf))
    return rows
