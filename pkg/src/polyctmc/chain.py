"""Chain models: jump kernels on the non-negative integers.

Two kernel shapes are supported.  A :class:`FiniteKernel` has finitely many
jump sizes, each with a polynomial rate.  A :class:`DistributionFamily` adds
forward jumps drawn from a :class:`~polyctmc.laws.JumpLaw`, at rate
``r_m(x) * mu_m(k)`` for a jump of size ``k - shift``.

Both shapes carry *row overrides*: for states below the tail threshold ``u``
a row can be given explicitly, in which case every jump not listed in the
row has rate zero at that state.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Union

from .laws import JumpLaw
from .polynomials import Polynomial, as_fraction

DEFAULT_REACH_CAP = 4096
FORWARD_REACH_JUMPS = 64


class ChainError(ValueError):
    pass


def _freeze_overrides(overrides) -> dict:
    out = {}
    for x, row in (overrides or {}).items():
        x = int(x)
        if x < 0:
            raise ChainError(f"override state {x} is negative")
        clean = {}
        for w, r in row.items():
            w = int(w)
            r = as_fraction(r)
            if r < 0:
                raise ChainError(f"override rate at state {x}, jump {w} is negative")
            if w == 0:
                raise ChainError("jump size 0 is not a transition")
            if r > 0:
                clean[w] = r
        out[x] = clean
    return out


@dataclass(frozen=True)
class FiniteKernel:
    rates: Mapping[int, Polynomial]
    tail_threshold: int = 0
    overrides: Mapping[int, Mapping[int, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        rates = {}
        for w, p in self.rates.items():
            w = int(w)
            if w == 0:
                raise ChainError("jump size 0 is not a transition")
            if not isinstance(p, Polynomial):
                p = Polynomial(p)
            if p.is_zero():
                continue
            rates[w] = p
        object.__setattr__(self, "rates", dict(sorted(rates.items())))
        object.__setattr__(self, "overrides", _freeze_overrides(self.overrides))
        if self.tail_threshold < 0:
            raise ChainError("tail threshold must be >= 0")
        for x in self.overrides:
            if x >= self.tail_threshold:
                raise ChainError(f"override at state {x} is not below u={self.tail_threshold}")

    support_finite = True

    @property
    def tail_rates(self) -> dict[int, Polynomial]:
        return self.rates

    @property
    def negative_jumps(self) -> list[int]:
        return [w for w in self.rates if w < 0]

    @property
    def positive_jumps(self) -> list[int]:
        return [w for w in self.rates if w > 0]

    def finite_jumps(self) -> list[int]:
        """Every jump size appearing in the tail rates or an override row."""
        ws = set(self.rates)
        for row in self.overrides.values():
            ws.update(row)
        return sorted(ws)

    def rate(self, x: int, w: int) -> Fraction:
        """Exact rate of the jump x -> x + w."""
        if x in self.overrides:
            return self.overrides[x].get(w, Fraction(0))
        p = self.rates.get(w)
        return p.eval(x) if p is not None else Fraction(0)

    def row(self, x: int) -> dict[int, Fraction]:
        if x in self.overrides:
            return dict(self.overrides[x])
        return {w: p.eval(x) for w, p in self.rates.items()}

    def scaled(self, c) -> "FiniteKernel":
        c = as_fraction(c)
        return FiniteKernel(
            {w: p.scale(c) for w, p in self.rates.items()},
            self.tail_threshold,
            {x: {w: r * c for w, r in row.items()} for x, row in self.overrides.items()},
        )


@dataclass(frozen=True)
class ForwardFamily:
    """Forward jumps of size k - shift at rate ``rate(x) * law(k)``, for k > shift."""

    rate: Polynomial
    law: JumpLaw
    shift: int = 0

    def __post_init__(self):
        if not isinstance(self.rate, Polynomial):
            object.__setattr__(self, "rate", Polynomial(self.rate))
        if self.shift < 0:
            raise ChainError("shift must be >= 0")

    def forward_mass(self) -> float:
        """P(k > shift) in floats (exact when the low point masses are rational)."""
        low = [self.law.mass(k) for k in range(self.shift + 1)]
        if all(m is not None for m in low):
            return float(1 - sum(low))
        probs = self.law.float_pmf()
        return 1.0 - math.fsum(probs[: self.shift + 1])

    def jump_sizes(self, limit: Optional[int] = None) -> list[int]:
        """Forward jump sizes with positive mass, up to ``limit`` of them."""
        out = []
        if self.law.kind == "dirac":
            ks = [self.law.params[0]]
        elif self.law.kind == "pmf":
            ks = [k for k, _ in self.law.params]
        else:
            ks = range(self.shift + 1, self.shift + 1 + (limit or FORWARD_REACH_JUMPS))
        for k in ks:
            if k > self.shift:
                out.append(k - self.shift)
            if limit is not None and len(out) >= limit:
                break
        return out


@dataclass(frozen=True)
class DistributionFamily:
    positive_part: tuple
    negative_part: Mapping[int, Polynomial]
    tail_threshold: int = 0
    overrides: Mapping[int, Mapping[int, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "positive_part", tuple(self.positive_part))
        neg = {}
        for w, p in self.negative_part.items():
            w = int(w)
            if w >= 0:
                raise ChainError("negative_part keys must be negative jumps")
            if not isinstance(p, Polynomial):
                p = Polynomial(p)
            if not p.is_zero():
                neg[w] = p
        object.__setattr__(self, "negative_part", dict(sorted(neg.items())))
        object.__setattr__(self, "overrides", _freeze_overrides(self.overrides))
        for x in self.overrides:
            if x >= self.tail_threshold:
                raise ChainError(f"override at state {x} is not below u={self.tail_threshold}")

    @property
    def support_finite(self) -> bool:
        return all(fam.law.finite_support for fam in self.positive_part)

    @property
    def negative_jumps(self) -> list[int]:
        return list(self.negative_part)

    @property
    def positive_jumps(self) -> list[int]:
        ws = set()
        for fam in self.positive_part:
            ws.update(fam.jump_sizes(limit=FORWARD_REACH_JUMPS))
        return sorted(ws)

    def finite_jumps(self) -> list[int]:
        """Jumps simulated as individual channels: negatives plus override rows."""
        ws = set(self.negative_part)
        for row in self.overrides.values():
            ws.update(row)
        return sorted(ws)

    def rate_positive(self, x: int, w: int) -> bool:
        if x in self.overrides:
            return self.overrides[x].get(w, 0) > 0
        if w < 0:
            p = self.negative_part.get(w)
            return p is not None and p.sign_at(x) > 0
        for fam in self.positive_part:
            m = fam.law.mass(w + fam.shift)
            positive = (m is None and fam.law.kind == "poisson") or (m is not None and m > 0)
            if positive and fam.rate.sign_at(x) > 0:
                return True
        return False

    def rate(self, x: int, w: int) -> Union[Fraction, float]:
        """Rate of x -> x + w; a float when a point mass is irrational."""
        if x in self.overrides:
            return self.overrides[x].get(w, Fraction(0))
        if w < 0:
            p = self.negative_part.get(w)
            return p.eval(x) if p is not None else Fraction(0)
        total = Fraction(0)
        inexact = 0.0
        for fam in self.positive_part:
            m = fam.law.mass(w + fam.shift)
            if m is None:
                probs = fam.law.float_pmf()
                k = w + fam.shift
                inexact += float(fam.rate.eval(x)) * (probs[k] if k < len(probs) else 0.0)
            else:
                total += fam.rate.eval(x) * m
        return total if inexact == 0.0 else float(total) + inexact

    def scaled(self, c) -> "DistributionFamily":
        c = as_fraction(c)
        return DistributionFamily(
            tuple(ForwardFamily(f.rate.scale(c), f.law, f.shift) for f in self.positive_part),
            {w: p.scale(c) for w, p in self.negative_part.items()},
            self.tail_threshold,
            {x: {w: r * c for w, r in row.items()} for x, row in self.overrides.items()},
        )


Kernel = Union[FiniteKernel, DistributionFamily]


@dataclass(frozen=True)
class ChainSpec:
    kernel: Kernel
    absorbing_set: frozenset = frozenset()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "absorbing_set", frozenset(int(s) for s in self.absorbing_set))
        if any(s < 0 for s in self.absorbing_set):
            raise ChainError("absorbing states must be non-negative")

    @property
    def support_finite(self) -> bool:
        return self.kernel.support_finite

    @property
    def tail_threshold(self) -> int:
        return self.kernel.tail_threshold

    def max_negative_jump(self) -> int:
        neg = list(self.kernel.negative_jumps)
        for row in self.kernel.overrides.values():
            neg.extend(w for w in row if w < 0)
        return max((-w for w in neg), default=0)

    def max_finite_jump(self) -> int:
        """max |w| over the finitely many jumps (forward laws with finite support included)."""
        ws = [abs(w) for w in self.kernel.finite_jumps()]
        if isinstance(self.kernel, FiniteKernel):
            return max(ws, default=0)
        for fam in self.kernel.positive_part:
            if fam.law.finite_support:
                ws.extend(fam.jump_sizes())
        return max(ws, default=0)

    def rate_positive(self, x: int, w: int) -> bool:
        if isinstance(self.kernel, FiniteKernel):
            return self.kernel.rate(x, w) > 0
        return self.kernel.rate_positive(x, w)

    def candidate_jumps(self) -> list[int]:
        ws = set(self.kernel.finite_jumps())
        ws.update(self.kernel.positive_jumps)
        ws.update(self.kernel.negative_jumps)
        return sorted(ws)

    def scaled(self, c) -> "ChainSpec":
        return ChainSpec(self.kernel.scaled(c), self.absorbing_set, self.label)


# ---------------------------------------------------------------------------
# assumption checks


VERIFIED = "verified"
UP_TO_BOUND = "verified-up-to-bound"
VIOLATED = "violated"
NOT_CHECKED = "not-checked"


@dataclass(frozen=True)
class AssumptionStatus:
    status: str
    bound: Optional[int] = None
    witness: Optional[str] = None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status in (VERIFIED, UP_TO_BOUND)

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.bound is not None:
            out["bound"] = self.bound
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class AssumptionReport:
    A1: AssumptionStatus
    A2: AssumptionStatus
    A3: AssumptionStatus
    A4: AssumptionStatus
    A5: AssumptionStatus
    positivity_bound: int
    reach_radius: int
    excluded_states: tuple = ()

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.statuses().values())

    def statuses(self) -> dict:
        return {"A1": self.A1, "A2": self.A2, "A3": self.A3, "A4": self.A4, "A5": self.A5}

    def violations(self) -> dict:
        return {k: s for k, s in self.statuses().items() if s.status == VIOLATED}

    def to_dict(self) -> dict:
        out = {k: s.to_dict() for k, s in self.statuses().items()}
        out["positivity_bound"] = self.positivity_bound
        out["reach_radius"] = self.reach_radius
        out["excluded_states"] = list(self.excluded_states)
        return out


def _tail_polynomials(kernel: Kernel) -> list[tuple[str, Polynomial]]:
    if isinstance(kernel, FiniteKernel):
        return [(f"lambda_{w}", p) for w, p in kernel.rates.items()]
    out = [(f"lambda_{w}", p) for w, p in kernel.negative_part.items()]
    out += [(f"r_{m}", fam.rate) for m, fam in enumerate(kernel.positive_part)]
    return out


def _check_positivity(name: str, p: Polynomial, u: int, bound: int):
    """First non-positive integer in [u, bound], or a certificate beyond it."""
    for x in range(u, bound + 1):
        if p.sign_at(x) <= 0:
            return AssumptionStatus(VIOLATED, witness=f"{name}({x}) = {p.eval(x)} <= 0")
    lead = p.coeff(int(p.degree))
    if lead > 0 and p.cauchy_root_bound() <= bound:
        return None
    return AssumptionStatus(UP_TO_BOUND, bound=bound, note=f"{name} not certified beyond {bound}")


def check_assumptions(spec: ChainSpec, positivity_bound: int, reach_cap: int = DEFAULT_REACH_CAP) -> AssumptionReport:
    """Decide the regularity assumptions as far as they are decidable.

    A4 positivity past ``positivity_bound`` is certified with the Cauchy root
    bound: a polynomial with positive leading coefficient that is positive on
    every integer of ``[u, B]`` with ``B`` above all real roots stays positive.
    A5 is checked by breadth-first reachability on a truncated state space.
    """
    kernel = spec.kernel
    u = kernel.tail_threshold
    if positivity_bound < u:
        raise ChainError(f"positivity bound {positivity_bound} is below u={u}")

    neg = kernel.negative_jumps
    pos = kernel.positive_jumps
    if not pos:
        a1 = AssumptionStatus(VIOLATED, witness="no positive jump size")
    elif not neg:
        a1 = AssumptionStatus(VIOLATED, witness="no negative jump size")
    else:
        a1 = AssumptionStatus(VERIFIED)

    a2 = AssumptionStatus(VERIFIED, note=f"{len(neg)} negative jump size(s)")

    if isinstance(kernel, FiniteKernel):
        a3 = AssumptionStatus(VERIFIED, note="finite jump set")
    else:
        means = [fam.law.mean for fam in kernel.positive_part]
        a3 = AssumptionStatus(VERIFIED, note="declared finite means " + ", ".join(str(m) for m in means))

    a4 = AssumptionStatus(VERIFIED)
    for name, p in _tail_polynomials(kernel):
        st = _check_positivity(name, p, u, positivity_bound)
        if st is None:
            continue
        if st.status == VIOLATED:
            a4 = st
            break
        if a4.status == VERIFIED:
            a4 = st
    if a4.status != VIOLATED:
        for w in neg:
            if u + w < 0:
                a4 = AssumptionStatus(
                    VIOLATED,
                    witness=f"lambda_{w} positive at x={u} but target {u + w} < 0",
                )
                break
    if a4.status != VIOLATED:
        a4 = _check_small_states(spec, a4) or a4
    if a4.status != VIOLATED and not isinstance(kernel, FiniteKernel):
        for m, fam in enumerate(kernel.positive_part):
            if fam.forward_mass() <= 0:
                a4 = AssumptionStatus(VIOLATED, witness=f"family {m} has no mass beyond shift {fam.shift}")
                break

    radius = _reach_radius(spec, positivity_bound, reach_cap)
    a5, excluded = _check_irreducible(spec, positivity_bound, radius)
    if a5.status == UP_TO_BOUND and a4.status == VERIFIED and a1.status == VERIFIED:
        if _tail_translates(spec, radius):
            a5 = AssumptionStatus(VERIFIED, bound=radius, note=a5.note + "; u and u+1 communicate above u")
    return AssumptionReport(a1, a2, a3, a4, a5, positivity_bound, radius, tuple(excluded))


def _check_small_states(spec: ChainSpec, current: AssumptionStatus):
    kernel = spec.kernel
    for x in range(kernel.tail_threshold):
        if isinstance(kernel, FiniteKernel):
            for w, r in kernel.row(x).items():
                if r < 0:
                    return AssumptionStatus(VIOLATED, witness=f"rate of jump {w} at state {x} is {r} < 0")
                if r > 0 and x + w < 0:
                    return AssumptionStatus(VIOLATED, witness=f"positive rate from {x} to {x + w} < 0")
        else:
            if x in kernel.overrides:
                row = kernel.overrides[x]
                for w, r in row.items():
                    if x + w < 0:
                        return AssumptionStatus(VIOLATED, witness=f"positive rate from {x} to {x + w} < 0")
                continue
            for w, p in kernel.negative_part.items():
                r = p.eval(x)
                if r < 0:
                    return AssumptionStatus(VIOLATED, witness=f"rate of jump {w} at state {x} is {r} < 0")
                if r > 0 and x + w < 0:
                    return AssumptionStatus(VIOLATED, witness=f"positive rate from {x} to {x + w} < 0")
            for m, fam in enumerate(kernel.positive_part):
                if fam.rate.eval(x) < 0:
                    return AssumptionStatus(VIOLATED, witness=f"family {m} rate at state {x} is negative")
    return None


def _reach_radius(spec: ChainSpec, bound: int, cap: int) -> int:
    fwd = spec.max_finite_jump()
    if not spec.support_finite:
        fwd = max(fwd, FORWARD_REACH_JUMPS)
    return min(bound + spec.max_negative_jump() + fwd, max(cap, bound + 1))


def _successors(spec: ChainSpec, x: int, jumps: list[int], top: int) -> list[int]:
    return [x + w for w in jumps if 0 <= x + w <= top and spec.rate_positive(x, w)]


def _check_irreducible(spec: ChainSpec, bound: int, top: int):
    jumps = spec.candidate_jumps()
    succ = {x: _successors(spec, x, jumps, top) for x in range(top + 1)}
    pred: dict[int, list[int]] = {x: [] for x in range(top + 1)}
    for x, ys in succ.items():
        for y in ys:
            pred[y].append(x)
    absorbing = spec.absorbing_set

    for s in sorted(absorbing):
        for w in jumps:
            if s + w not in absorbing and s + w >= 0 and spec.rate_positive(s, w):
                return AssumptionStatus(
                    VIOLATED, witness=f"absorbing state {s} jumps to {s + w} outside the absorbing set"
                ), []

    anchor = bound
    while anchor in absorbing:
        anchor += 1
    fwd = _bfs(anchor, succ, absorbing)
    bwd = _bfs(anchor, pred, absorbing)
    main = fwd & bwd

    u = spec.tail_threshold
    for x in range(max(u, 0), bound + 1):
        if x not in absorbing and x not in main:
            return AssumptionStatus(
                VIOLATED,
                witness=f"state {x} does not communicate with state {anchor}",
                bound=top,
            ), []

    excluded = []
    for x in range(0, u):
        if x in absorbing or x in main:
            continue
        if x in fwd:
            return AssumptionStatus(
                VIOLATED,
                witness=f"state {x} is reachable but cannot return (undeclared trap)",
                bound=top,
            ), []
        excluded.append(x)
    note = "single communicating class on the explored range"
    if excluded:
        note += f"; states {excluded} are unreachable and lie outside the state space"
    return AssumptionStatus(UP_TO_BOUND, bound=top, note=note), excluded


def _tail_translates(spec: ChainSpec, top: int) -> bool:
    # with every jump available at x >= u, paths between u and u+1 that stay
    # above u translate to every state, which certifies irreducibility there
    u = spec.tail_threshold
    if u + 1 > top:
        return False
    jumps = spec.candidate_jumps()
    succ = {}
    pred: dict[int, list[int]] = {x: [] for x in range(u, top + 1)}
    for x in range(u, top + 1):
        succ[x] = [y for y in _successors(spec, x, jumps, top) if y >= u]
        for y in succ[x]:
            pred[y].append(x)
    blocked = frozenset()
    return u + 1 in _bfs(u, succ, blocked) and u + 1 in _bfs(u, pred, blocked)


def _bfs(start: int, adj: dict, blocked: frozenset) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen and y not in blocked:
                seen.add(y)
                queue.append(y)
    return seen


# ---------------------------------------------------------------------------
# generator application


class TestFunction:
    """A Lyapunov-type test function f = g^delta with a stable increment.

    ``family`` picks g: ``pow`` -> x, ``log`` -> log x, ``loglog`` -> log log x,
    ``x-log`` -> x log x, ``x-over-log`` -> x / log x.  The increment
    f(x+w) - f(x) is computed as f(x) * expm1(delta * (log g(x+w) - log g(x)))
    with ``log1p`` differences, so the generator sum keeps its precision
    when the individual increments are tiny.
    """

    __test__ = False  # not a pytest class
    FAMILIES = ("pow", "log", "loglog", "x-log", "x-over-log")

    def __init__(self, family: str, delta: float = 1.0):
        if family not in self.FAMILIES:
            raise ValueError(f"unknown test-function family {family!r}")
        self.family = family
        self.delta = float(delta)

    def __repr__(self):
        return f"TestFunction({self.family!r}, {self.delta})"

    def _log_g(self, x: float) -> float:
        lx = math.log(x)
        fam = self.family
        if fam == "pow":
            return lx
        if fam == "log":
            return math.log(lx)
        if fam == "loglog":
            return math.log(math.log(lx))
        if fam == "x-log":
            return lx + math.log(lx)
        return lx - math.log(lx)

    def _dlog_g(self, x: int, w: int) -> float:
        r = math.log1p(w / x)
        fam = self.family
        if fam == "pow":
            return r
        lx = math.log(x)
        dl = math.log1p(r / lx)  # log(log(x+w)) - log(log x)
        if fam == "log":
            return dl
        if fam == "loglog":
            return math.log1p(dl / math.log(lx))
        if fam == "x-log":
            return r + dl
        return r - dl

    def __call__(self, x) -> float:
        if self.delta == 0:
            return 1.0
        return math.exp(self.delta * self._log_g(float(x)))

    def increment(self, x: int, w: int) -> float:
        if self.delta == 0 or w == 0:
            return 0.0
        if self.family == "pow" and (x == 0 or x + w == 0):
            return float(x + w) ** self.delta - float(x) ** self.delta
        return self(x) * math.expm1(self.delta * self._dlog_g(x, w))


def _increment(f, x: int, w: int) -> float:
    inc = getattr(f, "increment", None)
    if inc is not None:
        d = inc(x, w)
    else:
        d = float(f(x + w)) - float(f(x))
    if not math.isfinite(d):
        raise ChainError(f"test function is not finite near state {x} (jump {w})")
    return d


def apply_generator(spec: ChainSpec, f: Callable, x: int) -> float:
    """Qf(x) = sum_w lambda_w(x) (f(x+w) - f(x)).

    Forward laws with unbounded support are summed until the remaining pmf
    tail mass drops below 1e-12.
    """
    if x < 0:
        raise ChainError("state must be non-negative")
    if not isinstance(f, TestFunction):
        v = f(x)
        if not math.isfinite(v):
            raise ChainError(f"test function is not finite at state {x}")
    kernel = spec.kernel
    terms = []
    if isinstance(kernel, FiniteKernel):
        for w, r in kernel.row(x).items():
            if r > 0 and x + w >= 0:
                terms.append(float(r) * _increment(f, x, w))
        return math.fsum(terms)

    if x in kernel.overrides:
        for w, r in kernel.overrides[x].items():
            if r > 0 and x + w >= 0:
                terms.append(float(r) * _increment(f, x, w))
        return math.fsum(terms)
    for w, p in kernel.negative_part.items():
        r = p.eval(x)
        if r > 0 and x + w >= 0:
            terms.append(float(r) * _increment(f, x, w))
    for fam in kernel.positive_part:
        base = float(fam.rate.eval(x))
        if base <= 0:
            continue
        probs = fam.law.float_pmf()
        for k in range(fam.shift + 1, len(probs)):
            if probs[k] > 0:
                terms.append(base * probs[k] * _increment(f, x, k - fam.shift))
    return math.fsum(terms)


def identity(x) -> float:
    return float(x)
