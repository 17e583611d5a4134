"""Flattening a ChainSpec into the channel table both kernels consume.

At a state x the chain has ``n_finite`` finite channels (one per jump size)
followed by one channel per forward family.  ``rates(x)`` returns the
channel totals as floats; each is an exact rational rounded once.  A family
channel's total is r_m(x) P(k > shift), and its jump is drawn from the law
conditioned on k > shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..chain import ChainSpec, FiniteKernel

FAM_DIRAC = 0
FAM_ALIAS = 1
FAM_GEOM = 2
FAM_POISSON = 3
FAM_NEGBIN = 4

POISSON_CHUNK = 10.0


class SimulationError(RuntimeError):
    pass


def build_alias(weights: list) -> tuple[list, list]:
    """Walker alias table (Vose's construction) for positive weights."""
    n = len(weights)
    total = math.fsum(weights)
    scaled = [w * n / total for w in weights]
    prob = [0.0] * n
    alias = [0] * n
    small = [i for i, s in enumerate(scaled) if s < 1.0]
    large = [i for i, s in enumerate(scaled) if s >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        (small if scaled[g] < 1.0 else large).append(g)
    for i in large + small:
        prob[i] = 1.0
        alias[i] = i
    return prob, alias


@dataclass
class Family:
    kind: int
    shift: int
    iparam: int = 0  # dirac k, negbin r, alias offset, poisson chunk count
    dparam: float = 0.0  # log1p(-p) for geom/negbin, chunk lambda for poisson
    dparam2: float = 0.0  # exp(-chunk lambda) for poisson
    alias_len: int = 0


class SimModel:
    """Picklable, read-only view of a chain for the simulation kernels."""

    CACHE_STATES = 1 << 20

    def __init__(self, spec: ChainSpec):
        self.spec = spec
        kernel = spec.kernel
        self.absorbing = frozenset(spec.absorbing_set)
        self.finite_kernel = isinstance(kernel, FiniteKernel)
        self.jumps = list(kernel.finite_jumps())
        self.n_finite = len(self.jumps)
        self.families: list[Family] = []
        self.alias_prob: list = []
        self.alias_idx: list = []
        self.alias_val: list = []
        self._fam_mass: list = []  # exact P(k > shift), or a float when irrational
        if not self.finite_kernel:
            for fam in kernel.positive_part:
                self._add_family(fam)
        self.n_channels = self.n_finite + len(self.families)

    def _add_family(self, fam):
        law, s = fam.law, fam.shift
        tot, _, _ = law.forward_moments(s)
        if tot is None:
            tot = -math.expm1(-float(law.params[0]))
        self._fam_mass.append(tot)
        kind = law.kind
        if kind == "dirac":
            self.families.append(Family(FAM_DIRAC, s, iparam=law.params[0]))
        elif kind == "pmf":
            ks = [k for k, w in law.params if k > s]
            ws = [float(w) for k, w in law.params if k > s]
            off = len(self.alias_prob)
            if ks:
                prob, alias = build_alias(ws)
                self.alias_prob.extend(prob)
                self.alias_idx.extend(off + a for a in alias)
                self.alias_val.extend(ks)
            self.families.append(Family(FAM_ALIAS, s, iparam=off, alias_len=len(ks)))
        elif kind == "geom":
            self.families.append(Family(FAM_GEOM, s, dparam=math.log1p(-float(law.params[0]))))
        elif kind == "poisson":
            lam = float(law.params[0])
            chunks = max(1, math.ceil(lam / POISSON_CHUNK))
            lam_c = lam / chunks
            self.families.append(Family(FAM_POISSON, s, iparam=chunks, dparam=lam_c, dparam2=math.exp(-lam_c)))
        elif kind == "negbin":
            r, p = law.params
            self.families.append(Family(FAM_NEGBIN, s, iparam=r, dparam=math.log1p(-float(p))))
        else:  # pragma: no cover
            raise SimulationError(f"no sampler for {kind}")

    def _int_forms(self):
        # (numerators, denominator, float factor) per tail channel; rates are
        # N(x) / D rounded once, times the factor for irrational masses
        forms = []
        kernel = self.spec.kernel
        polys = kernel.rates if self.finite_kernel else kernel.negative_part
        for w in self.jumps:
            p = polys.get(w)
            forms.append(None if p is None else (*p.int_form(), 1.0))
        if not self.finite_kernel:
            for fam, mass in zip(kernel.positive_part, self._fam_mass):
                nums, den = fam.rate.int_form()
                if isinstance(mass, Fraction):
                    forms.append((tuple(c * mass.numerator for c in nums), den * mass.denominator, 1.0))
                else:
                    forms.append((nums, den, mass))
        return forms

    def rates(self, x: int) -> list:
        """Channel totals at x as floats, each an exact value rounded once."""
        kernel = self.spec.kernel
        out = [0.0] * self.n_channels
        if x in kernel.overrides:
            row = kernel.overrides[x]
            for i, w in enumerate(self.jumps):
                r = row.get(w)
                if r:
                    out[i] = self._checked(x, w, r)
            return out
        forms = self.__dict__.get("_forms")
        if forms is None:
            forms = self._forms = self._int_forms()
        for i, form in enumerate(forms):
            if form is None:
                continue
            nums, den, factor = form
            acc = 0
            for c in reversed(nums):
                acc = acc * x + c
            if acc < 0:
                raise SimulationError(f"negative rate for channel {i} at state {x}")
            if acc == 0:
                continue
            if i < self.n_finite:
                w = self.jumps[i]
                if x + w < 0:
                    raise SimulationError(f"positive rate from {x} to negative state {x + w}")
                out[i] = acc / den
            else:
                out[i] = acc / den if factor == 1.0 else (acc / den) * factor
        return out

    @staticmethod
    def _checked(x: int, w: int, r) -> float:
        if r < 0:
            raise SimulationError(f"negative rate {r} for jump {w} at state {x}")
        if r > 0 and x + w < 0:
            raise SimulationError(f"positive rate from {x} to negative state {x + w}")
        return float(r)

    def family_arrays(self):
        """Column arrays describing the families, for the compiled kernel."""
        f = self.families
        return (
            [x.kind for x in f],
            [x.shift for x in f],
            [x.iparam for x in f],
            [x.dparam for x in f],
            [x.dparam2 for x in f],
            [x.alias_len for x in f],
        )
