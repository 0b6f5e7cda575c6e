# apps/ghm/services/exact_arith.py
"""
Exact rational / complex-rational arithmetic, P-bit big floats and the
q-series primitives (finite and infinite q-Pochhammer symbols, Gaussian
binomials, terminating basic hypergeometric sums) used by every other module.

Rationals are plain ``fractions.Fraction`` values. Big floats wrap raw mpmath
values together with their working precision so that precision is always
passed explicitly and no global mpmath context is involved.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence, Union

from mpmath import libmp

from apps.ghm.services.errors import (
    IndexOutOfRange,
    MalformedRational,
    NonConvergent,
    ParameterError,
    PrecisionError,
    ZeroDenominator,
)

Rational = Fraction

DEFAULT_PRECISION = 256
MIN_PRECISION = 64

ROUND_NEAREST = libmp.round_nearest
ROUND_FLOOR = libmp.round_floor
ROUND_CEILING = libmp.round_ceiling

_RATIONAL_RE = re.compile(r"^-?\d+(?:/\d+)?$")
_COMPLEX_RE = re.compile(
    r"^(?P<re>-?\d+(?:/\d+)?)(?:(?P<sign>[+-])(?P<im>\d+(?:/\d+)?)?i)?$"
)
_IMAGINARY_RE = re.compile(r"^(?P<sign>-)?(?P<im>\d+(?:/\d+)?)?i$")


# -------------------------------
#   Rational text format
# -------------------------------
def _clean(text: str) -> str:
    return str(text).strip().replace("−", "-").replace(" ", "")


def parse_rational(text: str) -> Fraction:
    """
    Parse "p/q" or "p" (decimal integers, optional leading minus).
    """
    s = _clean(text)
    if not _RATIONAL_RE.fullmatch(s):
        raise MalformedRational(f"malformed rational {text!r}")
    num, _, den = s.partition("/")
    if den and int(den) == 0:
        raise MalformedRational(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(r: Union[Fraction, int]) -> str:
    r = Fraction(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


# -------------------------------
#   Complex rationals
# -------------------------------
@dataclass(frozen=True, eq=False, slots=True)
class ComplexRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    # -- constructors / text --
    @classmethod
    def parse(cls, text: str) -> "ComplexRational":
        """
        Accepts "re", "re+imi", "re-imi" (and "imi" / "i" shorthands).
        """
        s = _clean(text)
        m = _COMPLEX_RE.fullmatch(s)
        if m:
            real = parse_rational(m.group("re"))
            if m.group("sign") is None:
                return cls(real)
            imag = parse_rational(m.group("im")) if m.group("im") else Fraction(1)
            return cls(real, -imag if m.group("sign") == "-" else imag)
        m = _IMAGINARY_RE.fullmatch(s)
        if m:
            imag = parse_rational(m.group("im")) if m.group("im") else Fraction(1)
            return cls(0, -imag if m.group("sign") else imag)
        raise MalformedRational(f"malformed complex rational {text!r}")

    def __str__(self) -> str:
        if self.im == 0:
            return format_rational(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{format_rational(self.re)}{sign}{format_rational(abs(self.im))}i"

    def __repr__(self) -> str:
        return f"ComplexRational({str(self)!r})"

    # -- predicates --
    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def real_value(self) -> Fraction:
        if self.im != 0:
            raise ParameterError(f"{self} is not real")
        return self.re

    # -- field operations --
    def __add__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        return ComplexRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        if o.im == 0:
            return ComplexRational(self.re * o.re, self.im * o.re)
        return ComplexRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        if not o:
            raise ZeroDivisionError("complex rational division by zero")
        if o.im == 0:
            return ComplexRational(self.re / o.re, self.im / o.re)
        d = o.abs2()
        return ComplexRational(
            (self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d
        )

    def __rtruediv__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return ComplexRational(1) / (self ** (-n))
        result = ComplexRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))


def _lift(x) -> ComplexRational:
    if isinstance(x, ComplexRational):
        return x
    if isinstance(x, (int, Fraction)):
        return ComplexRational(x)
    return NotImplemented


def as_complex(x) -> ComplexRational:
    z = _lift(x)
    if z is NotImplemented:
        raise ParameterError(f"cannot convert {x!r} to a complex rational")
    return z


def parse_complex(text: str) -> ComplexRational:
    return ComplexRational.parse(text)


def format_complex(z) -> str:
    return str(as_complex(z))


def complex_abs2(z) -> Fraction:
    return as_complex(z).abs2()


# -------------------------------
#   q-series (exact)
# -------------------------------
def qpoch_finite(a, q, m: int):
    """
    (a;q)_m = prod_{k=0}^{m-1} (1 - a q^k). The result has the type of ``a``
    (Fraction for rational a, ComplexRational for complex a).
    """
    if m < 0:
        raise IndexOutOfRange(f"q-Pochhammer length must be >= 0, got {m}")
    q = Fraction(q)
    result = ComplexRational(1) if isinstance(a, ComplexRational) else Fraction(1)
    if not isinstance(a, ComplexRational):
        a = Fraction(a)
    qk = Fraction(1)
    for _ in range(m):
        result = result * (1 - a * qk)
        qk *= q
    return result


def qpoch_multi(params: Iterable, q, m: int):
    """(a_1, ..., a_r; q)_m"""
    result = Fraction(1)
    for a in params:
        result = result * qpoch_finite(a, q, m)
    return result


def qbinomial(m: int, j: int, q) -> Fraction:
    if not 0 <= j <= m:
        raise IndexOutOfRange(f"q-binomial needs 0 <= j <= m, got m={m}, j={j}")
    q = Fraction(q)
    if q == 0:
        raise ParameterError("q-binomial undefined at q = 0")
    top = qpoch_finite(q, q, m)
    if top == 0:
        raise ParameterError(f"(q;q)_{m} vanishes at q = {format_rational(q)}")
    return top / (qpoch_finite(q, q, j) * qpoch_finite(q, q, m - j))


def qhyper_terminating(upper: Sequence, lower: Sequence, q, z, terms: int):
    """
    Partial sum over k < terms of the basic hypergeometric series r phi s:
        (a_1..a_r;q)_k / (q, b_1..b_s;q)_k * z^k * ((-1)^k q^{k(k-1)/2})^{1+s-r}
    For a terminating series (one upper parameter q^{-n}) pass terms = n + 1.
    """
    q = Fraction(q)
    e = 1 + len(lower) - len(upper)
    total = Fraction(0)
    term = Fraction(1)
    qk = Fraction(1)
    for k in range(terms):
        total = total + term
        if k + 1 == terms:
            break
        num = Fraction(1)
        for a in upper:
            num = num * (1 - a * qk)
        den = 1 - q * qk
        for b in lower:
            den = den * (1 - b * qk)
        if den == 0:
            raise ZeroDenominator(f"lower q-Pochhammer vanishes at k = {k}")
        term = term * num * z / den
        if e:
            twist = (-qk) ** e
            term = term * twist
        qk *= q
    return total


# -------------------------------
#   Big floats
# -------------------------------
def check_precision(prec: int) -> int:
    if int(prec) < MIN_PRECISION:
        raise PrecisionError(f"precision must be at least {MIN_PRECISION} bits, got {prec}")
    return int(prec)


def decimal_digits(prec: int) -> int:
    return math.ceil(prec * math.log10(2))


@total_ordering
@dataclass(frozen=True, eq=False)
class BigFloat:
    mpf: tuple
    prec: int

    @classmethod
    def from_rational(cls, r, prec: int, rounding: str = ROUND_NEAREST) -> "BigFloat":
        prec = check_precision(prec)
        r = Fraction(r)
        return cls(libmp.from_rational(r.numerator, r.denominator, prec, rounding), prec)

    def to_fraction(self) -> Fraction:
        p, q = libmp.to_rational(self.mpf)
        return Fraction(int(p), int(q))

    def _other(self, other) -> "BigFloat":
        if isinstance(other, BigFloat):
            return other
        if isinstance(other, (int, Fraction)):
            return BigFloat.from_rational(other, self.prec)
        return NotImplemented

    def _binary(self, other, op, swap=False):
        o = self._other(other)
        if o is NotImplemented:
            return o
        prec = max(self.prec, o.prec)
        a, b = (o.mpf, self.mpf) if swap else (self.mpf, o.mpf)
        return BigFloat(op(a, b, prec, ROUND_NEAREST), prec)

    def __add__(self, other):
        return self._binary(other, libmp.mpf_add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, libmp.mpf_sub)

    def __rsub__(self, other):
        return self._binary(other, libmp.mpf_sub, swap=True)

    def __mul__(self, other):
        return self._binary(other, libmp.mpf_mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is not NotImplemented and o.mpf == libmp.fzero:
            raise ZeroDivisionError("big float division by zero")
        return self._binary(other, libmp.mpf_div)

    def __rtruediv__(self, other):
        if self.mpf == libmp.fzero:
            raise ZeroDivisionError("big float division by zero")
        return self._binary(other, libmp.mpf_div, swap=True)

    def __neg__(self):
        return BigFloat(libmp.mpf_neg(self.mpf), self.prec)

    def __abs__(self):
        return BigFloat(libmp.mpf_abs(self.mpf), self.prec)

    def sqrt(self, rounding: str = ROUND_NEAREST) -> "BigFloat":
        if libmp.mpf_sign(self.mpf) < 0:
            raise ParameterError("square root of a negative big float")
        return BigFloat(libmp.mpf_sqrt(self.mpf, self.prec, rounding), self.prec)

    def __eq__(self, other):
        if isinstance(other, BigFloat):
            return self.to_fraction() == other.to_fraction()
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, BigFloat):
            return self.to_fraction() < other.to_fraction()
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() < other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __float__(self):
        return libmp.to_float(self.mpf)

    def __str__(self) -> str:
        return libmp.to_str(self.mpf, decimal_digits(self.prec))

    def __repr__(self) -> str:
        return f"BigFloat({str(self)}, prec={self.prec})"


def as_bigfloat(x, prec: int) -> BigFloat:
    if isinstance(x, BigFloat):
        return x
    return BigFloat.from_rational(x, prec)


def reciprocal_lower(den: Fraction, prec: int) -> BigFloat:
    """1/den rounded toward zero (den > 0)."""
    den = Fraction(den)
    if den <= 0:
        raise ParameterError(f"expected a positive denominator, got {format_rational(den)}")
    return BigFloat.from_rational(1 / den, prec, ROUND_FLOOR)


def modulus_upper(abs2: Fraction, prec: int) -> Fraction:
    """
    Rational r >= sqrt(abs2); exact when abs2 is the square of a rational.
    """
    abs2 = Fraction(abs2)
    if abs2 < 0:
        raise ParameterError("squared modulus cannot be negative")
    n, d = abs2.numerator, abs2.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    prec = check_precision(prec)
    return BigFloat.from_rational(abs2, prec + 8, ROUND_CEILING).sqrt(ROUND_CEILING).to_fraction()


def qpoch_infinite(a, q, eps, prec: int) -> BigFloat:
    """
    (a;q)_oo truncated at the first M with |a| q^M / (1 - q) < eps / 2.
    """
    prec = check_precision(prec)
    a, q, eps = as_bigfloat(a, prec), as_bigfloat(q, prec), as_bigfloat(eps, prec)
    if not (0 < q < 1):
        raise NonConvergent(f"(a;q)_oo needs 0 < q < 1, got q = {q}")
    if not eps > 0:
        raise ParameterError("eps must be positive")
    one = BigFloat.from_rational(1, prec)
    if a == 0:
        return one
    tail = abs(a) / (one - q)
    half_eps = eps / 2
    result = one
    term = a
    while tail >= half_eps:
        result = result * (one - term)
        term = term * q
        tail = tail * q
    return result
