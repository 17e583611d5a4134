"""Jump-size laws for kernels with unbounded forward jumps.

All laws live on the non-negative integers.  Moments are exact rationals
(declared analytically for the named families); point masses are exact
where they are rational and ``None`` otherwise (Poisson).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .polynomials import as_fraction

TAIL_EPS = 1e-12

KINDS = ("dirac", "pmf", "geom", "poisson", "negbin")


class LawError(ValueError):
    pass


@dataclass(frozen=True)
class JumpLaw:
    """A probability law mu on {0, 1, 2, ...}.

    ``params`` holds the exact parameters of the named family:
    dirac -> (k,), geom -> (p,), poisson -> (lam,), negbin -> (r, p),
    pmf -> ((k, w), ...) sorted by k.
    """

    kind: str
    params: tuple
    mean: Fraction = field(init=False)
    second_moment: Fraction = field(init=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise LawError(f"unknown law {self.kind!r}")
        mean, second = _moments(self.kind, self.params)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "second_moment", second)

    # constructors

    @classmethod
    def dirac(cls, k: int) -> "JumpLaw":
        if int(k) != k or k < 0:
            raise LawError("dirac(k) needs an integer k >= 0")
        return cls("dirac", (int(k),))

    @classmethod
    def geom(cls, p) -> "JumpLaw":
        p = as_fraction(p)
        if not 0 < p < 1:
            raise LawError("geom(p) needs 0 < p < 1")
        return cls("geom", (p,))

    @classmethod
    def poisson(cls, lam) -> "JumpLaw":
        lam = as_fraction(lam)
        if lam <= 0:
            raise LawError("poisson(l) needs l > 0")
        return cls("poisson", (lam,))

    @classmethod
    def negbin(cls, r, p) -> "JumpLaw":
        r = as_fraction(r)
        p = as_fraction(p)
        if r.denominator != 1 or r < 1:
            raise LawError("negbin(r, p) needs an integer r >= 1")
        if not 0 < p < 1:
            raise LawError("negbin(r, p) needs 0 < p < 1")
        return cls("negbin", (int(r), p))

    @classmethod
    def pmf(cls, weights: dict) -> "JumpLaw":
        items = []
        for k, w in weights.items():
            if int(k) != k or k < 0:
                raise LawError("pmf support must be non-negative integers")
            w = as_fraction(w)
            if w < 0:
                raise LawError("pmf weights must be non-negative")
            if w > 0:
                items.append((int(k), w))
        items.sort()
        if sum(w for _, w in items) != 1:
            raise LawError("pmf weights must sum to exactly 1")
        return cls("pmf", tuple(items))

    # properties

    @property
    def finite_support(self) -> bool:
        return self.kind in ("dirac", "pmf")

    @property
    def factorial_moment(self) -> Fraction:
        """Sum of k(k-1) mu(k)."""
        return self.second_moment - self.mean

    def mass(self, k: int) -> Optional[Fraction]:
        """Exact mu(k), or None when it is irrational."""
        if k < 0:
            return Fraction(0)
        kind, ps = self.kind, self.params
        if kind == "dirac":
            return Fraction(int(k == ps[0]))
        if kind == "pmf":
            return dict(ps).get(k, Fraction(0))
        if kind == "geom":
            p = ps[0]
            return p * (1 - p) ** k
        if kind == "negbin":
            r, p = ps
            return math.comb(k + r - 1, k) * p**r * (1 - p) ** k
        return None

    def forward_moments(self, shift: int) -> tuple[Fraction, Fraction, Fraction]:
        """Exact sums over k > shift of mu(k), (k-shift) mu(k), (k-shift)^2 mu(k).

        The first entry is None when it is irrational (Poisson, shift 0).
        """
        low = [self.mass(k) for k in range(shift + 1)]
        if shift == 0 and low[0] is None:
            # k = 0 carries weight 0 in both moments; only P(k > 0) is irrational
            return None, self.mean, self.second_moment
        if any(m is None for m in low):
            raise LawError(
                f"{self.render()}: point masses below the shift are irrational"
            )
        tot = 1 - sum(low)
        m1 = self.mean - shift + sum((shift - k) * m for k, m in enumerate(low))
        m2 = (
            self.second_moment
            - 2 * shift * self.mean
            + shift * shift
            - sum((k - shift) ** 2 * m for k, m in enumerate(low))
        )
        return tot, m1, m2

    def support_max(self) -> int:
        """Largest k carrying mass, or the 1e-12 tail-truncation point."""
        if self.kind == "dirac":
            return self.params[0]
        if self.kind == "pmf":
            return self.params[-1][0]
        probs = self.float_pmf()
        return len(probs) - 1

    def float_pmf(self) -> list[float]:
        """mu(0..K) in floats, truncated where the remaining tail mass < 1e-12."""
        kind, ps = self.kind, self.params
        if kind == "dirac":
            return [0.0] * ps[0] + [1.0]
        if kind == "pmf":
            out = [0.0] * (ps[-1][0] + 1)
            for k, w in ps:
                out[k] = float(w)
            return out
        if kind == "geom":
            p = float(ps[0])
            first = p
            ratio = lambda k: 1.0 - p  # noqa: E731
        elif kind == "poisson":
            lam = float(ps[0])
            first = math.exp(-lam)
            ratio = lambda k: lam / (k + 1)  # noqa: E731
        else:
            r, p = ps
            p = float(p)
            first = p**r
            ratio = lambda k: (k + r) / (k + 1) * (1.0 - p)  # noqa: E731
        out = [first]
        acc = first
        k = 0
        mean = float(self.mean)
        while 1.0 - acc >= TAIL_EPS or k < mean:
            nxt = out[-1] * ratio(k)
            out.append(nxt)
            acc += nxt
            k += 1
            if k > 10_000_000:
                raise LawError("pmf truncation did not converge")
        return out

    def render(self) -> str:
        kind, ps = self.kind, self.params
        if kind == "dirac":
            return f"dirac({ps[0]})"
        if kind == "geom":
            return f"geom({ps[0]})"
        if kind == "poisson":
            return f"poisson({ps[0]})"
        if kind == "negbin":
            return f"negbin({ps[0]},{ps[1]})"
        return "pmf{" + ",".join(f"{k}:{w}" for k, w in ps) + "}"

    def __str__(self):
        return self.render()


def _moments(kind: str, ps: tuple) -> tuple[Fraction, Fraction]:
    if kind == "dirac":
        k = Fraction(ps[0])
        return k, k * k
    if kind == "pmf":
        return (
            sum((k * w for k, w in ps), Fraction(0)),
            sum((k * k * w for k, w in ps), Fraction(0)),
        )
    if kind == "geom":
        p = ps[0]
        mean = (1 - p) / p
        return mean, (1 - p) / p**2 + mean**2
    if kind == "poisson":
        lam = ps[0]
        return lam, lam + lam * lam
    r, p = ps
    mean = r * (1 - p) / p
    return mean, r * (1 - p) / p**2 + mean**2
