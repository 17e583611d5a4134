"""One-species reaction networks and the builder models.

Model file format (line oriented, ``#`` starts a comment)::

    S <-> 2S @ 1, 2          # reversible: forward constant first
    2S -> 3S @ 4
    0 -> S @ 1/2
    absorbing = {0}

Builder models replace reactions by parameter assignments::

    model = verhulst
    c = 1
    K = 10
    mu = dirac(1)

Polynomials (key ``r``) are written in ``x`` with ``+ - * ^`` and
parentheses, e.g. ``x^2 + 1/2*x``.  Laws are ``dirac(k)``, ``geom(p)``,
``poisson(l)``, ``negbin(r,p)`` or ``pmf{k1:w1,k2:w2}``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .chain import ChainSpec, DistributionFamily, FiniteKernel, ForwardFamily
from .laws import JumpLaw, LawError
from .polynomials import Polynomial, as_fraction, descending_factorial

MODEL_KINDS = ("network", "branching", "gene", "verhulst", "runaway")
BUILDER_KEYS = ("r", "mu", "c", "K", "E", "E2", "q0")


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}: {message} (column {column})")


class HypothesisError(ValueError):
    """A builder's modelling hypothesis (H1..H6) does not hold."""

    def __init__(self, hypothesis: str, message: str):
        self.hypothesis = hypothesis
        super().__init__(f"{hypothesis} violated: {message}")


@dataclass(frozen=True)
class Reaction:
    n: int
    m: int
    kappa: Fraction

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("complex sizes must be non-negative")
        if self.n == self.m:
            raise ValueError("no net change")
        k = as_fraction(self.kappa)
        if k <= 0:
            raise ValueError("rate constant must be positive")
        object.__setattr__(self, "kappa", k)

    @property
    def jump(self) -> int:
        return self.m - self.n

    def render(self) -> str:
        return f"{_complex(self.n)} -> {_complex(self.m)} @ {_rational(self.kappa)}"


@dataclass(frozen=True)
class Network:
    reactions: tuple
    label: str = ""
    absorbing: Optional[frozenset] = None  # None: auto-detect

    def __post_init__(self):
        object.__setattr__(self, "reactions", tuple(self.reactions))
        if not self.reactions:
            raise ValueError("network has no reactions")
        if self.absorbing is not None:
            object.__setattr__(self, "absorbing", frozenset(self.absorbing))

    def __add__(self, other: "Network") -> "Network":
        return Network(self.reactions + other.reactions, self.label or other.label)


@dataclass(frozen=True)
class ModelFile:
    """Everything a model file can say: a network or a builder with its parameters."""

    kind: str
    network: Optional[Network] = None
    params: dict = field(default_factory=dict)
    absorbing: Optional[frozenset] = None
    label: str = ""

    def build(self) -> ChainSpec:
        if self.kind == "network":
            spec = compile_mass_action(self.network)
        else:
            spec = _build_from_params(self.kind, self.params, self.label)
        if self.absorbing is not None:
            spec = ChainSpec(spec.kernel, self.absorbing, spec.label)
        return spec

    def render(self) -> str:
        if self.kind == "network":
            return render(self.network)
        lines = [f"model = {self.kind}"]
        for k in BUILDER_KEYS:
            if k in self.params:
                lines.append(f"{k} = {_render_value(self.params[k])}")
        if self.absorbing is not None:
            lines.append(_render_absorbing(self.absorbing))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# rendering


def _complex(n: int) -> str:
    return "0" if n == 0 else "S" if n == 1 else f"{n}S"


def _rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _render_absorbing(states) -> str:
    return "absorbing = {" + ", ".join(str(s) for s in sorted(states)) + "}"


def _render_value(v) -> str:
    if isinstance(v, Polynomial):
        return _render_poly(v)
    if isinstance(v, JumpLaw):
        return v.render()
    if isinstance(v, Fraction):
        return _rational(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_rational(w)}" for k, w in sorted(v.items())) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_render_value(x) for x in v) + "]"
    return str(v)


def _render_poly(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    terms = []
    for i in range(int(p.degree), -1, -1):
        c = p.coeff(i)
        if c == 0:
            continue
        mono = "" if i == 0 else "x" if i == 1 else f"x^{i}"
        mag = _rational(abs(c))
        body = mag if not mono else (mono if abs(c) == 1 else f"{mag}*{mono}")
        terms.append(("-" if c < 0 else "+", body))
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for s, b in terms[1:]:
        out += f" {s} {b}"
    return out


def render(net: Network) -> str:
    """Canonical text: one irreversible reaction per line."""
    lines = [r.render() for r in net.reactions]
    if net.absorbing is not None:
        lines.append(_render_absorbing(net.absorbing))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# lexing helpers

_RATE_RE = re.compile(r"\s*(-?\d+(?:\.\d*)?|-?\.\d+)(?:\s*/\s*(\d+))?")
_COMPLEX_RE = re.compile(r"\s*(0|[1-9]\d*S|S)(?![\w.])")
_ARROW_RE = re.compile(r"\s*(<->|->)")
_KEY_RE = re.compile(r"\s*([A-Za-z][A-Za-z0-9]*)\s*=(?![>=])")
DIRECTIVES = ("absorbing", "model") + BUILDER_KEYS


class _Cursor:
    def __init__(self, text: str, lineno: int):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str, pos: Optional[int] = None) -> ParseError:
        p = self.pos if pos is None else pos
        while p < len(self.text) and self.text[p] == " ":
            p += 1
        return ParseError(self.lineno, p + 1, message)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def match(self, regex):
        m = regex.match(self.text, self.pos)
        if m:
            self.pos = m.end()
        return m

    def expect(self, literal: str, what: Optional[str] = None):
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            raise self.error(f"expected {what or repr(literal)}")
        self.pos += len(literal)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""


def _parse_rate(cur: _Cursor, positive: bool = True) -> Fraction:
    start = cur.pos
    m = cur.match(_RATE_RE)
    if not m:
        raise cur.error("expected a rate constant (decimal or p/q)")
    num, den = m.group(1), m.group(2)
    value = Fraction(num)
    if den is not None:
        if "." in num:
            raise cur.error("fraction numerator must be an integer", start)
        if int(den) == 0:
            raise cur.error("division by zero", start)
        value = value / int(den)
    if positive and value <= 0:
        raise cur.error("rate constant must be positive", start)
    return value


def _parse_int(cur: _Cursor) -> int:
    cur.skip_ws()
    m = cur.match(re.compile(r"\d+"))
    if not m:
        raise cur.error("expected a non-negative integer")
    return int(m.group(0))


def _complex_size(token: str) -> int:
    if token == "0":
        return 0
    if token == "S":
        return 1
    return int(token[:-1])


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


# ---------------------------------------------------------------------------
# polynomial and law literals


def _parse_poly_expr(cur: _Cursor) -> Polynomial:
    sign = 1
    c = cur.peek()
    if c in "+-":
        cur.pos += 1
        sign = -1 if c == "-" else 1
    out = _parse_poly_term(cur).scale(sign)
    while True:
        c = cur.peek()
        if c not in ("+", "-"):
            return out
        cur.pos += 1
        t = _parse_poly_term(cur)
        out = out + t if c == "+" else out - t


def _parse_poly_term(cur: _Cursor) -> Polynomial:
    out = _parse_poly_power(cur)
    while True:
        c = cur.peek()
        if c == "*":
            cur.pos += 1
            out = out * _parse_poly_power(cur)
        elif c == "/":
            at = cur.pos
            cur.pos += 1
            d = _parse_poly_power(cur)
            if d.degree != 0:
                raise cur.error("can only divide by a non-zero constant", at)
            out = out.scale(1 / d.coeff(0))
        elif c == "(" or c == "x":
            out = out * _parse_poly_power(cur)  # implicit product, e.g. 2x or x(x-1)
        else:
            return out


def _parse_poly_power(cur: _Cursor) -> Polynomial:
    base = _parse_poly_atom(cur)
    if cur.peek() == "^":
        cur.pos += 1
        e = _parse_int(cur)
        out = Polynomial.constant(1)
        for _ in range(e):
            out = out * base
        return out
    return base


def _parse_poly_atom(cur: _Cursor) -> Polynomial:
    c = cur.peek()
    if c == "(":
        cur.pos += 1
        out = _parse_poly_expr(cur)
        cur.expect(")")
        return out
    if c == "x":
        cur.pos += 1
        return Polynomial.x()
    m = cur.match(re.compile(r"\s*(\d+(?:\.\d*)?|\.\d+)"))
    if not m:
        raise cur.error("expected a number, 'x' or '('")
    return Polynomial.constant(Fraction(m.group(1)))


def parse_polynomial(text: str) -> Polynomial:
    cur = _Cursor(text, 1)
    p = _parse_poly_expr(cur)
    if not cur.at_end():
        raise cur.error("unexpected text after polynomial")
    return p


_LAW_RE = re.compile(r"\s*(dirac|geom|poisson|negbin|pmf)\b")


def _parse_law(cur: _Cursor) -> JumpLaw:
    start = cur.pos
    m = cur.match(_LAW_RE)
    if not m:
        raise cur.error("expected a jump law (dirac, geom, poisson, negbin, pmf)")
    kind = m.group(1)
    try:
        if kind == "pmf":
            cur.expect("{")
            weights = {}
            while True:
                k = _parse_int(cur)
                cur.expect(":")
                weights[k] = weights.get(k, Fraction(0)) + _parse_rate(cur, positive=False)
                if cur.peek() == ",":
                    cur.pos += 1
                    continue
                cur.expect("}", "',' or '}'")
                break
            return JumpLaw.pmf(weights)
        cur.expect("(")
        args = [_parse_rate(cur, positive=False)]
        while cur.peek() == ",":
            cur.pos += 1
            args.append(_parse_rate(cur, positive=False))
        cur.expect(")", "',' or ')'")
        arity = {"dirac": 1, "geom": 1, "poisson": 1, "negbin": 2}[kind]
        if len(args) != arity:
            raise cur.error(f"{kind} takes {arity} argument(s)", start)
        if kind == "dirac":
            if args[0].denominator != 1:
                raise LawError("dirac(k) needs an integer k >= 0")
            return JumpLaw.dirac(int(args[0]))
        return getattr(JumpLaw, kind)(*args)
    except LawError as exc:
        raise cur.error(str(exc), start) from None


def parse_law(text: str) -> JumpLaw:
    cur = _Cursor(text, 1)
    law = _parse_law(cur)
    if not cur.at_end():
        raise cur.error("unexpected text after law")
    return law


def _parse_list(cur: _Cursor, item):
    cur.expect("[")
    out = []
    if cur.peek() == "]":
        cur.pos += 1
        return out
    while True:
        out.append(item(cur))
        if cur.peek() == ",":
            cur.pos += 1
            continue
        cur.expect("]", "',' or ']'")
        return out


def _parse_state_map(cur: _Cursor) -> dict:
    cur.expect("{")
    out = {}
    if cur.peek() == "}":
        cur.pos += 1
        return out
    while True:
        k = _parse_int(cur)
        cur.expect(":")
        out[k] = out.get(k, Fraction(0)) + _parse_rate(cur)
        if cur.peek() == ",":
            cur.pos += 1
            continue
        cur.expect("}", "',' or '}'")
        return out


def _parse_value(cur: _Cursor, key: str):
    if key == "r":
        if cur.peek() == "[":
            return _parse_list(cur, lambda c: _parse_rate(c, positive=False))
        return _parse_poly_expr(cur)
    if key == "mu":
        if cur.peek() == "[":
            return _parse_list(cur, _parse_law)
        return _parse_law(cur)
    if key == "q0":
        return _parse_state_map(cur)
    if key == "c" and cur.peek() == "[":
        return _parse_list(cur, lambda c: _parse_rate(c, positive=False))
    if key == "K":
        return Fraction(_parse_int(cur))
    return _parse_rate(cur, positive=False)


# ---------------------------------------------------------------------------
# parsing


def parse_model(text: str, label: str = "") -> ModelFile:
    """Parse a model file: reactions or a builder model, plus directives."""
    reactions: list[Reaction] = []
    params: dict = {}
    kind = None
    absorbing = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        cur = _Cursor(line, lineno)
        if cur.at_end():
            continue
        km = _KEY_RE.match(line)
        if km and (km.group(1) in DIRECTIVES or not _COMPLEX_RE.match(line)):
            key = km.group(1)
            cur.pos = km.end()
            if key == "absorbing":
                if absorbing is not None:
                    raise cur.error("duplicate 'absorbing' directive", 0)
                cur.expect("{")
                states = set()
                if cur.peek() != "}":
                    states.add(_parse_int(cur))
                    while cur.peek() == ",":
                        cur.pos += 1
                        states.add(_parse_int(cur))
                cur.expect("}", "',' or '}'")
                absorbing = frozenset(states)
            elif key == "model":
                m = cur.match(re.compile(r"\s*([a-z]+)"))
                if not m or m.group(1) not in MODEL_KINDS:
                    raise cur.error("expected one of " + ", ".join(MODEL_KINDS))
                if kind is not None:
                    raise cur.error("duplicate 'model' directive", 0)
                kind = m.group(1)
            elif key in BUILDER_KEYS:
                if key in params:
                    raise cur.error(f"duplicate key {key!r}", 0)
                params[key] = _parse_value(cur, key)
            else:
                raise cur.error(f"unknown key {key!r}", 0)
            if not cur.at_end():
                raise cur.error("unexpected text after directive")
            continue
        reactions.extend(_parse_reaction_line(cur))

    kind = kind or "network"
    if kind == "network":
        if params:
            raise ParseError(1, 1, f"builder keys {sorted(params)} need a 'model = ...' directive")
        if not reactions:
            raise ParseError(1, 1, "network has no reactions")
        net = Network(tuple(reactions), label, absorbing)
        return ModelFile("network", net, {}, absorbing, label)
    if reactions:
        raise ParseError(1, 1, f"model '{kind}' takes parameters, not reactions")
    return ModelFile(kind, None, params, absorbing, label)


def _parse_reaction_line(cur: _Cursor) -> list[Reaction]:
    m = cur.match(_COMPLEX_RE)
    if not m:
        raise cur.error("expected a complex ('0', 'S' or 'nS')")
    n = _complex_size(m.group(1))
    a = cur.match(_ARROW_RE)
    if not a:
        raise cur.error("expected '->' or '<->'")
    reversible = a.group(1) == "<->"
    at = cur.pos
    m = cur.match(_COMPLEX_RE)
    if not m:
        raise cur.error("expected a complex ('0', 'S' or 'nS')")
    mm = _complex_size(m.group(1))
    if n == mm:
        raise cur.error("no net change", at)
    cur.expect("@")
    k1 = _parse_rate(cur)
    out = [Reaction(n, mm, k1)]
    if reversible:
        cur.expect(",", "',' and a reverse rate constant")
        out.append(Reaction(mm, n, _parse_rate(cur)))
    if not cur.at_end():
        raise cur.error("unexpected text after reaction")
    return out


def parse_network(text: str, label: str = "") -> Network:
    mf = parse_model(text, label)
    if mf.kind != "network":
        raise ParseError(1, 1, f"expected a reaction network, found model '{mf.kind}'")
    return mf.network


# ---------------------------------------------------------------------------
# compilation


def mass_action_rates(net: Network) -> dict[int, Polynomial]:
    rates: dict[int, Polynomial] = {}
    for rx in net.reactions:
        p = descending_factorial(rx.n).scale(rx.kappa)
        rates[rx.jump] = rates.get(rx.jump, Polynomial()) + p
    return rates


def compile_mass_action(net: Network, absorbing: Optional[Sequence[int]] = None) -> ChainSpec:
    """Kernel of the mass-action network; absorbing states auto-detected unless given."""
    rates = mass_action_rates(net)
    u = max(rx.n for rx in net.reactions)
    overrides = {x: {w: p.eval(x) for w, p in rates.items()} for x in range(u)}
    kernel = FiniteKernel(rates, u, overrides)
    if absorbing is None:
        absorbing = net.absorbing
    if absorbing is None:
        absorbing = detect_absorbing(kernel)
    return ChainSpec(kernel, frozenset(absorbing), net.label)


def detect_absorbing(kernel) -> frozenset:
    """States that cannot climb back to the tail but are entered from it.

    A state is trapped when nothing reachable from it lies at or above
    the tail threshold u.  Trapped states that the chain never enters from
    the tail are neutral and stay outside the state space, like 0 for a
    network without inflow or outflow reactions.
    """
    u = kernel.tail_threshold
    jumps = sorted(set(kernel.finite_jumps()) | set(kernel.negative_jumps) | set(kernel.positive_jumps))
    spec = ChainSpec(kernel)

    def succ(x):
        return [x + w for w in jumps if x + w >= 0 and spec.rate_positive(x, w)]

    trapped = set()
    for x in range(u):
        seen = {x}
        q = deque([x])
        escapes = False
        while q and not escapes:
            y = q.popleft()
            for z in succ(y):
                if z >= u:
                    escapes = True
                    break
                if z not in seen:
                    seen.add(z)
                    q.append(z)
        if not escapes:
            trapped.add(x)
    # trapped states entered from escaping states (one jump suffices: the
    # escaping set is closed under reachability from u)
    entered = set()
    top = u + max((-w for w in jumps if w < 0), default=0)
    q = deque(z for x in range(u, top + 1) for z in succ(x) if z in trapped)
    for x in range(u):
        if x not in trapped:
            q.extend(z for z in succ(x) if z in trapped)
    while q:
        z = q.popleft()
        if z in entered:
            continue
        entered.add(z)
        q.extend(y for y in succ(z) if y in trapped)
    return frozenset(entered)


# ---------------------------------------------------------------------------
# builders


def _positive_from(p: Polynomial, start: int) -> int:
    """Smallest u >= start with p > 0 at every integer x >= u."""
    if p.is_zero() or p.coeff(int(p.degree)) <= 0:
        raise ValueError("polynomial is not eventually positive")
    bound = int(p.cauchy_root_bound()) + 1
    u = max(start, bound)
    while u > start and p.sign_at(u - 1) > 0:
        u -= 1
    return u


def _check_declared_moments(mu: JumpLaw, E=None, E2=None):
    if E is not None and as_fraction(E) != mu.mean:
        raise HypothesisError("declared moments", f"E = {E} but {mu.render()} has mean {mu.mean}")
    if E2 is not None and as_fraction(E2) != mu.second_moment:
        raise HypothesisError(
            "declared moments", f"E2 = {E2} but {mu.render()} has second moment {mu.second_moment}"
        )


def build_branching(r: Polynomial, mu: JumpLaw, q0_row: Optional[dict] = None, label: str = "branching") -> ChainSpec:
    """Extended branching process: q(x, x+k-1) = r(x) mu(k) for x >= 1.

    The row at 0 is ``q0_row`` (target state -> rate); an empty row makes
    0 absorbing.
    """
    if not isinstance(r, Polynomial):
        r = Polynomial(r)
    q0_row = {int(k): as_fraction(v) for k, v in (q0_row or {}).items()}
    if r.is_zero() or r.degree < 1:
        raise HypothesisError("H3", "r must be a polynomial of degree >= 1")
    if r.coeff(int(r.degree)) <= 0:
        raise HypothesisError("H3", "r must be positive for large x")
    m0 = mu.mass(0)
    m1 = mu.mass(1)
    if m0 is None or m1 is None:
        raise HypothesisError("H1", f"{mu.render()}: mu(0) is irrational, so the death rate r(x) mu(0) is not exact")
    if m0 <= 0:
        raise HypothesisError("H1", "mu(0) > 0 is required")
    if m0 + m1 >= 1:
        raise HypothesisError("H1", "mu(0) + mu(1) < 1 is required")
    for y, v in q0_row.items():
        if y <= 0 or v < 0:
            raise HypothesisError("H2", "q0 row needs targets y >= 1 and non-negative rates")
    u = _positive_from(r, 1)
    for x in range(1, u):
        if r.sign_at(x) <= 0:
            raise HypothesisError("H3", f"r must be positive on x >= 1 (r({x}) = {r.eval(x)})")
    u = 1
    overrides = {0: q0_row}
    kernel = DistributionFamily((ForwardFamily(r, mu, shift=1),), {-1: r.scale(m0)}, u, overrides)
    absorbing = frozenset() if any(v > 0 for v in q0_row.values()) else frozenset({0})
    return ChainSpec(kernel, absorbing, label)


def build_gene_model(c: Sequence, r: Sequence, mus: Sequence[JumpLaw], label: str = "gene") -> ChainSpec:
    """Bursty gene expression: m S -> (m+k) S at c_m mu_m(k), m S -> (m-1) S at r_m.

    ``c`` is indexed from m = 0, ``r`` from m = 1.  A burst law with mass
    at 0 is read as a thinned law on k >= 1: a zero burst changes nothing.
    """
    c = [as_fraction(v) for v in c]
    r = [as_fraction(v) for v in r]
    J1 = len(c) - 1
    J2 = len(r)
    if len(mus) != len(c):
        raise HypothesisError("H5", "one burst law per production reaction is required")
    if J2 < 1 or J1 > J2:
        raise HypothesisError("H4", "J1 <= J2 and J2 >= 1 are required")
    if c[0] <= 0 or c[J1] <= 0 or r[0] <= 0 or r[J2 - 1] <= 0:
        raise HypothesisError("H4", "c_0, c_J1, r_1 and r_J2 must be positive")
    if any(v < 0 for v in c + r):
        raise HypothesisError("H4", "rates must be non-negative")
    death = Polynomial()
    for j, rj in enumerate(r, start=1):
        death = death + descending_factorial(j).scale(rj)
    fams = tuple(
        ForwardFamily(descending_factorial(m).scale(cm), mus[m], 0) for m, cm in enumerate(c) if cm > 0
    )
    u = J1
    kernel = DistributionFamily(fams, {-1: death}, max(u, 1))
    return ChainSpec(kernel, frozenset(), label)


def build_verhulst(c, K, mu: JumpLaw, label: str = "verhulst") -> ChainSpec:
    """Logistic population with bursty reproduction; 0 is absorbing."""
    c, K = as_fraction(c), as_fraction(K)
    _check_population(c, K, mu)
    death = Polynomial([0, 1, c / K])
    kernel = DistributionFamily((ForwardFamily(Polynomial([0, c]), mu, 0),), {-1: death}, 1)
    return ChainSpec(kernel, frozenset({0}), label)


def build_runaway(c, K, mu: JumpLaw, label: str = "runaway") -> ChainSpec:
    """Runaway population with bursty pair reproduction; {0, 1} is absorbing."""
    c, K = as_fraction(c), as_fraction(K)
    _check_population(c, K, mu)
    birth = descending_factorial(2).scale(c / K)
    kernel = DistributionFamily((ForwardFamily(birth, mu, 0),), {-1: Polynomial([0, 1])}, 2)
    return ChainSpec(kernel, frozenset({0, 1}), label)


def _check_population(c, K, mu: JumpLaw):
    if c <= 0:
        raise HypothesisError("H6", "reproduction rate c must be positive")
    if K <= 0 or K.denominator != 1:
        raise HypothesisError("H6", "K must be a positive integer")
    if mu.mean <= 0:
        raise HypothesisError("H6", f"burst law {mu.render()} never reproduces")


def _build_from_params(kind: str, params: dict, label: str) -> ChainSpec:
    def need(key):
        if key not in params:
            raise HypothesisError("model parameters", f"model '{kind}' needs key {key!r}")
        return params[key]

    allowed = {
        "branching": {"r", "mu", "q0", "E", "E2"},
        "gene": {"c", "r", "mu", "E", "E2"},
        "verhulst": {"c", "K", "mu", "E", "E2"},
        "runaway": {"c", "K", "mu", "E", "E2"},
    }[kind]
    extra = set(params) - allowed
    if extra:
        raise HypothesisError("model parameters", f"model '{kind}' does not take {sorted(extra)}")
    mu = need("mu")
    laws = mu if isinstance(mu, list) else [mu]
    E, E2 = params.get("E"), params.get("E2")
    if len(laws) == 1:
        _check_declared_moments(laws[0], E, E2)
    elif E is not None or E2 is not None:
        raise HypothesisError("declared moments", "E/E2 apply to a single law only")
    label = label or kind
    if kind == "branching":
        r = need("r")
        if not isinstance(r, Polynomial):
            raise HypothesisError("H3", "r must be a polynomial in x")
        return build_branching(r, laws[0], params.get("q0", {}), label)
    if kind == "gene":
        c, r = need("c"), need("r")
        if not isinstance(c, list) or not isinstance(r, list):
            raise HypothesisError("H4", "gene model needs c = [...] and r = [...]")
        if not isinstance(mu, list):
            laws = [mu] * len(c)
        return build_gene_model(c, r, laws, label)
    if isinstance(mu, list):
        raise HypothesisError("H6", "a single burst law is expected")
    if kind == "verhulst":
        return build_verhulst(need("c"), need("K"), mu, label)
    return build_runaway(need("c"), need("K"), mu, label)


def srn2_network(m: int, kappa: Sequence) -> Network:
    """0 <-> mS <-> (m+1)S -> (m+3)S with constants kappa_1..kappa_5."""
    k1, k2, k3, k4, k5 = (as_fraction(k) for k in kappa)
    return Network(
        (
            Reaction(0, m, k1),
            Reaction(m, 0, k2),
            Reaction(m, m + 1, k3),
            Reaction(m + 1, m, k4),
            Reaction(m + 1, m + 3, k5),
        ),
        label=f"SRN-2 m={m}",
    )
