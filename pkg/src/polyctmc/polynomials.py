"""Exact univariate polynomials over the rationals.

Coefficients are stored in the power basis, lowest degree first, as
:class:`fractions.Fraction`.  Trailing zeros are trimmed, so the zero
polynomial has an empty coefficient tuple.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence, Union

MAX_DEGREE = 64

Scalar = Union[int, Fraction]


class PolynomialError(ValueError):
    pass


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and decimal/ratio strings to an exact Fraction.

    Floats are rejected: every rate constant must be exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rates")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class Polynomial:
    """Immutable polynomial with rational coefficients."""

    __slots__ = ("_coeffs", "_int_form")

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if len(cs) - 1 > MAX_DEGREE:
            raise PolynomialError(f"degree {len(cs) - 1} exceeds cap {MAX_DEGREE}")
        self._coeffs = tuple(cs)
        self._int_form = None

    # construction helpers

    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        return cls([c])

    @classmethod
    def monomial(cls, degree: int, c: Scalar = 1) -> "Polynomial":
        return cls([0] * degree + [c])

    @classmethod
    def x(cls) -> "Polynomial":
        return cls([0, 1])

    # basic accessors

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    @property
    def degree(self) -> float:
        # -inf for the zero polynomial so that max() over degrees behaves
        return len(self._coeffs) - 1 if self._coeffs else float("-inf")

    def is_zero(self) -> bool:
        return not self._coeffs

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self._coeffs):
            return self._coeffs[i]
        return Fraction(0)

    # arithmetic

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        res = list(a)
        for i, c in enumerate(b):
            res[i] += c
        return Polynomial(res)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self._coeffs])

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return Polynomial()
        res = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a:
                for j, b in enumerate(other._coeffs):
                    res[i + j] += a * b
        return Polynomial(res)

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "Polynomial":
        c = as_fraction(c)
        return Polynomial([c * a for a in self._coeffs])

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self._coeffs)][1:])

    # evaluation

    def __call__(self, x) -> Fraction:
        return self.eval(x)

    def eval(self, x) -> Fraction:
        """Exact Horner evaluation."""
        acc = Fraction(0)
        for c in reversed(self._coeffs):
            acc = acc * x + c
        return acc

    def int_form(self) -> tuple[tuple[int, ...], int]:
        """Integer numerators over a common denominator: p(x) = N(x) / D."""
        if self._int_form is None:
            den = 1
            for c in self._coeffs:
                den = den * c.denominator // _gcd(den, c.denominator)
            nums = tuple(int(c * den) for c in self._coeffs)
            self._int_form = (nums, den)
        return self._int_form

    def eval_float(self, x: int) -> float:
        """Exact evaluation at an integer, rounded once to the nearest double."""
        nums, den = self.int_form()
        acc = 0
        for c in reversed(nums):
            acc = acc * x + c
        return acc / den  # int / int is correctly rounded

    def sign_at(self, x: int) -> int:
        nums, _ = self.int_form()
        acc = 0
        for c in reversed(nums):
            acc = acc * x + c
        return (acc > 0) - (acc < 0)

    def cauchy_root_bound(self) -> Fraction:
        """Every real root r satisfies |r| < this bound."""
        if self.is_zero():
            raise PolynomialError("zero polynomial has no root bound")
        lead = abs(self._coeffs[-1])
        if len(self._coeffs) == 1:
            return Fraction(0)
        return 1 + max(abs(c) for c in self._coeffs[:-1]) / lead

    # comparison / hashing

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self._coeffs == Polynomial([other])._coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self._coeffs:
            return "0"
        parts = []
        for i in range(len(self._coeffs) - 1, -1, -1):
            c = self._coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = "x" if i == 1 else f"x^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __reduce__(self):
        return (Polynomial, (self._coeffs,))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _coerce(value):
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Polynomial([value])
    return NotImplemented


def evaluate(p: Polynomial, x) -> Fraction:
    return p.eval(x)


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def scale(p: Polynomial, c: Scalar) -> Polynomial:
    return p.scale(c)


@lru_cache(maxsize=None)
def descending_factorial(n: int) -> Polynomial:
    """x(x-1)...(x-n+1) in the power basis; 1 for n == 0.

    The coefficients are the signed Stirling numbers of the first kind,
    built with the recurrence s(n+1, k) = s(n, k-1) - n s(n, k).
    """
    if n < 0:
        raise PolynomialError("descending factorial needs n >= 0")
    if n > MAX_DEGREE:
        raise PolynomialError(f"degree {n} exceeds cap {MAX_DEGREE}")
    row = [1]
    for j in range(n):
        nxt = [0] * (len(row) + 1)
        for k, s in enumerate(row):
            nxt[k + 1] += s
            nxt[k] -= j * s
        row = nxt
    return Polynomial(row)


def leading_coeffs(p: Polynomial) -> tuple[int, Fraction, Fraction]:
    """Return ``(d, a, b)`` with p(x) = a x^d + b x^(d-1) + lower terms."""
    if p.is_zero():
        raise PolynomialError("no leading coefficient")
    d = int(p.degree)
    return d, p.coeff(d), p.coeff(d - 1) if d > 0 else Fraction(0)


def from_descending_factorials(coeffs: Sequence) -> Polynomial:
    """Sum of c_n * x^(underline n) over the given coefficients."""
    out = Polynomial()
    for n, c in enumerate(coeffs):
        if c:
            out = out + descending_factorial(n).scale(c)
    return out
