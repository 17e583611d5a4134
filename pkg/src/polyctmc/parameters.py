"""Threshold parameters R, alpha, beta, gamma, vartheta of a chain.

All parameters are tail quantities, read off the exact drift and
second-moment polynomials; small-state overrides play no role.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .chain import ChainSpec, FiniteKernel
from .polynomials import Polynomial


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Parameters:
    R: int
    alpha: Fraction
    gamma: Fraction
    beta: Optional[Fraction]
    vartheta: Optional[Fraction]
    support_finite: bool
    drift: Polynomial
    second_moment_poly: Optional[Polynomial]

    @property
    def beta_informational(self) -> bool:
        # infinite jump sets: beta is reported but never used by the classifier
        return self.beta is not None and not self.support_finite

    def require_beta(self) -> Fraction:
        if self.beta is None:
            raise ParameterError("beta-undefined")
        return self.beta

    def to_dict(self) -> dict:
        def q(v):
            return None if v is None else f"{v.numerator}/{v.denominator}"

        return {
            "R": self.R,
            "alpha": q(self.alpha),
            "beta": q(self.beta),
            "gamma": q(self.gamma),
            "vartheta": q(self.vartheta),
            "support_finite": self.support_finite,
            "beta_informational": self.beta_informational,
            "drift": str(self.drift),
            "second_moment_poly": None if self.second_moment_poly is None else str(self.second_moment_poly),
        }


def _degree_R(spec: ChainSpec) -> int:
    kernel = spec.kernel
    if isinstance(kernel, FiniteKernel):
        polys = list(kernel.rates.values())
    else:
        polys = list(kernel.negative_part.values()) + [f.rate for f in kernel.positive_part]
    if not polys:
        raise ParameterError("kernel has no jumps")
    return int(max(p.degree for p in polys))


def drift_polynomial(spec: ChainSpec) -> Polynomial:
    """Sum over jumps of lambda_w(x) * w on the tail."""
    kernel = spec.kernel
    out = Polynomial()
    if isinstance(kernel, FiniteKernel):
        for w, p in kernel.rates.items():
            out = out + p.scale(w)
        return out
    for w, p in kernel.negative_part.items():
        out = out + p.scale(w)
    for fam in kernel.positive_part:
        _, m1, _ = fam.law.forward_moments(fam.shift)
        out = out + fam.rate.scale(m1)
    return out


def second_moment_polynomial(spec: ChainSpec) -> Polynomial:
    """Sum over jumps of lambda_w(x) * w^2 on the tail."""
    kernel = spec.kernel
    out = Polynomial()
    if isinstance(kernel, FiniteKernel):
        for w, p in kernel.rates.items():
            out = out + p.scale(w * w)
        return out
    for w, p in kernel.negative_part.items():
        out = out + p.scale(w * w)
    for fam in kernel.positive_part:
        _, _, m2 = fam.law.forward_moments(fam.shift)
        out = out + fam.rate.scale(m2)
    return out


def compute_parameters(spec: ChainSpec) -> Parameters:
    R = _degree_R(spec)
    drift = drift_polynomial(spec)
    if drift.degree > R:
        raise ParameterError("drift degree exceeds R")  # cannot happen for valid kernels
    alpha = drift.coeff(R)
    gamma = drift.coeff(R - 1) if R > 0 else Fraction(0)
    # every law carries an exact second moment, so beta is always computable;
    # it is informational only when the jump set is infinite
    second = second_moment_polynomial(spec)
    beta = gamma - second.coeff(R) / 2
    return Parameters(
        R=R,
        alpha=alpha,
        gamma=gamma,
        beta=beta,
        vartheta=gamma - beta,
        support_finite=spec.support_finite,
        drift=drift,
        second_moment_poly=second,
    )


def from_values(R: int, alpha, beta, gamma, support_finite: bool = True) -> Parameters:
    """Parameters from bare values (for sweeps and tests); polynomials are left empty."""
    alpha = Fraction(alpha)
    gamma = Fraction(gamma)
    beta = None if beta is None else Fraction(beta)
    return Parameters(
        R=int(R),
        alpha=alpha,
        gamma=gamma,
        beta=beta,
        vartheta=None if beta is None else gamma - beta,
        support_finite=support_finite,
        drift=Polynomial(),
        second_moment_poly=None,
    )
