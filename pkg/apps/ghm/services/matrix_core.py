# apps/ghm/services/matrix_core.py
"""
Exact dense linear algebra over complex rationals: Bareiss determinants and
inverses, leading minors, Faddeev-LeVerrier characteristic polynomials and a
Sturm-certified smallest eigenvalue. These are the oracles every closed form
is checked against.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from apps.ghm.services.errors import (
    ExactnessViolation,
    NotHermitian,
    NotPositiveDefinite,
    NotTriangular,
    ParameterError,
    SingularMatrix,
    ZeroDiagonal,
    ZeroScaleFactor,
)
from apps.ghm.services.exact_arith import (
    BigFloat,
    ComplexRational,
    as_complex,
    check_precision,
    format_rational,
)

log = logging.getLogger(__name__)

ZERO = ComplexRational(0)
ONE = ComplexRational(1)


# -------------------------------
#   ExactMatrix
# -------------------------------
class ExactMatrix:
    """
    Square matrix of ComplexRational entries held in a read-only numpy
    object array. Products use ``@`` and stay exact.
    """

    __slots__ = ("entries",)

    def __init__(self, rows):
        src = np.asarray(rows, dtype=object) if not isinstance(rows, np.ndarray) else rows
        if src.ndim != 2 or src.shape[0] != src.shape[1]:
            raise ParameterError(f"matrix must be square, got shape {src.shape}")
        if src.shape[0] == 0:
            raise ParameterError("matrix order must be at least 1")
        n = src.shape[0]
        arr = np.empty((n, n), dtype=object)
        for j in range(n):
            for k in range(n):
                arr[j, k] = as_complex(src[j, k])
        arr.setflags(write=False)
        self.entries = arr

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_function(n, lambda j, k: ONE if j == k else ZERO)

    @classmethod
    def from_function(cls, n: int, fn: Callable[[int, int], object]) -> "ExactMatrix":
        if n < 1:
            raise ParameterError("matrix order must be at least 1")
        arr = np.empty((n, n), dtype=object)
        for j in range(n):
            for k in range(n):
                arr[j, k] = fn(j, k)
        return cls(arr)

    @classmethod
    def diagonal(cls, values: Sequence) -> "ExactMatrix":
        values = [as_complex(v) for v in values]
        return cls.from_function(len(values), lambda j, k: values[j] if j == k else ZERO)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, idx) -> ComplexRational:
        return self.entries[idx]

    def to_array(self) -> np.ndarray:
        return self.entries.copy()

    def conj_transpose(self) -> "ExactMatrix":
        n = self.order
        return ExactMatrix.from_function(n, lambda j, k: self.entries[k, j].conjugate())

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.entries.T)

    def is_hermitian(self) -> bool:
        n = self.order
        return all(
            self.entries[j, k] == self.entries[k, j].conjugate()
            for j in range(n)
            for k in range(j, n)
        )

    def is_lower_triangular(self) -> bool:
        n = self.order
        return all(not self.entries[j, k] for j in range(n) for k in range(j + 1, n))

    def trace(self) -> ComplexRational:
        return sum((self.entries[j, j] for j in range(self.order)), ZERO)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if other.order != self.order:
            raise ParameterError(f"order mismatch: {self.order} vs {other.order}")
        return ExactMatrix(self.entries @ other.entries)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix(self.entries - other.entries)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix(self.entries + other.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if other.order != self.order:
            return False
        return all(a == b for a, b in zip(self.entries.flat, other.entries.flat))

    __hash__ = None

    def minor(self, row: int, col: int) -> "ExactMatrix":
        """The matrix with one row and one column removed (order >= 2)."""
        keep_r = [i for i in range(self.order) if i != row]
        keep_c = [i for i in range(self.order) if i != col]
        return ExactMatrix(self.entries[np.ix_(keep_r, keep_c)])

    def leading(self, m: int) -> "ExactMatrix":
        """Leading principal m x m block."""
        return ExactMatrix(self.entries[:m, :m])

    def to_strings(self) -> List[List[str]]:
        return [[str(z) for z in row] for row in self.entries]

    def __repr__(self) -> str:
        return f"ExactMatrix({self.to_strings()})"


def _work_array(M: ExactMatrix, extra: Optional[np.ndarray] = None) -> np.ndarray:
    a = M.to_array()
    if extra is not None:
        a = np.concatenate([a, extra], axis=1)
    return a


# -------------------------------
#   Fraction-free elimination
# -------------------------------
def _bareiss(a: np.ndarray, n: int) -> int:
    """
    In-place Bareiss elimination of the first n columns of ``a`` with row
    pivoting. Returns the permutation sign, or 0 when a column has no pivot.
    After return a[n-1, n-1] * sign is the determinant of the leading block.
    """
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not a[k, k]:
            swap = next((i for i in range(k + 1, n) if a[i, k]), None)
            if swap is None:
                return 0
            a[[k, swap]] = a[[swap, k]]
            sign = -sign
        pivot = a[k, k]
        for i in range(k + 1, n):
            a[i, k + 1:] = (a[i, k + 1:] * pivot - a[k, k + 1:] * a[i, k]) / prev
            a[i, k] = ZERO
        prev = pivot
    return sign


def bareiss_det(M: ExactMatrix) -> ComplexRational:
    n = M.order
    a = _work_array(M)
    sign = _bareiss(a, n)
    if sign == 0:
        return ZERO
    return a[n - 1, n - 1] * sign


def exact_inverse(M: ExactMatrix) -> ExactMatrix:
    """Bareiss on [M | I] followed by exact back substitution."""
    n = M.order
    a = _work_array(M, ExactMatrix.identity(n).to_array())
    sign = _bareiss(a, n)
    if sign == 0 or not a[n - 1, n - 1]:
        raise SingularMatrix("matrix is singular (determinant 0)")
    x = np.empty((n, n), dtype=object)
    for i in range(n - 1, -1, -1):
        row = a[i, n:].copy()
        for j in range(i + 1, n):
            if a[i, j]:
                row = row - x[j, :] * a[i, j]
        x[i, :] = row / a[i, i]
    return ExactMatrix(x)


def lower_triangular_inverse(L: ExactMatrix) -> ExactMatrix:
    if not L.is_lower_triangular():
        raise NotTriangular("expected a lower-triangular matrix")
    n = L.order
    if any(not L[j, j] for j in range(n)):
        raise SingularMatrix("lower-triangular matrix has a zero diagonal entry")
    x = np.empty((n, n), dtype=object)
    x.fill(ZERO)
    for k in range(n):
        x[k, k] = ONE / L[k, k]
        for i in range(k + 1, n):
            acc = ZERO
            for j in range(k, i):
                acc = acc + L[i, j] * x[j, k]
            x[i, k] = -acc / L[i, i]
    return ExactMatrix(x)


def leading_minors(M: ExactMatrix) -> List[ComplexRational]:
    """All leading principal minors from one Bareiss pass without pivoting."""
    n = M.order
    a = _work_array(M)
    minors = [a[0, 0]]
    prev = ONE
    for k in range(n - 1):
        pivot = a[k, k]
        if not pivot:
            # elimination cannot continue without pivoting
            minors.extend(bareiss_det(M.leading(m)) for m in range(k + 2, n + 1))
            return minors
        for i in range(k + 1, n):
            a[i, k + 1:] = (a[i, k + 1:] * pivot - a[k, k + 1:] * a[i, k]) / prev
            a[i, k] = ZERO
        prev = pivot
        minors.append(a[k + 1, k + 1])
    return minors


def _require_hermitian(M: ExactMatrix) -> None:
    if not M.is_hermitian():
        raise NotHermitian("matrix is not Hermitian")


def is_positive_definite(M: ExactMatrix) -> bool:
    _require_hermitian(M)
    for m in leading_minors(M):
        if not m.is_real:
            raise ExactnessViolation(f"leading minor {m} of a Hermitian matrix is not real")
        if m.re <= 0:
            return False
    return True


# -------------------------------
#   Characteristic polynomial
# -------------------------------
@dataclass(frozen=True)
class RationalPolynomial:
    """Coefficients in ascending order of powers."""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = [Fraction(c) for c in self.coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_sympy(self, var: sympy.Symbol) -> sympy.Poly:
        dense = [sympy.Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)]
        return sympy.Poly(dense, var, domain=sympy.QQ)

    @classmethod
    def from_sympy(cls, poly: sympy.Poly) -> "RationalPolynomial":
        return cls(tuple(Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())))

    def __str__(self) -> str:
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0 and len(self.coeffs) > 1:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            body = format_rational(abs(c))
            if mono:
                body = mono if abs(c) == 1 else f"{body}*{mono}"
            terms.append(("-" if c < 0 else "+", body))
        if not terms:
            return "0"
        head_sign, head = terms[0]
        text = ("-" if head_sign == "-" else "") + head
        for s, body in terms[1:]:
            text += f" {s} {body}"
        return text


def char_poly(M: ExactMatrix) -> RationalPolynomial:
    """
    det(x I - M) by Faddeev-LeVerrier. Coefficients of a Hermitian matrix are
    real; any imaginary residue is an exactness failure.
    """
    _require_hermitian(M)
    n = M.order
    A = M.entries
    identity = ExactMatrix.identity(n).entries
    coeffs: List[ComplexRational] = [ZERO] * (n + 1)
    coeffs[n] = ONE
    Mk = np.empty((n, n), dtype=object)
    Mk.fill(ZERO)
    for k in range(1, n + 1):
        Mk = A @ Mk + identity * coeffs[n - k + 1]
        AMk = A @ Mk
        tr = sum((AMk[i, i] for i in range(n)), ZERO)
        coeffs[n - k] = -tr / k
    for c in coeffs:
        if not c.is_real:
            raise ExactnessViolation(f"characteristic polynomial coefficient {c} is not real")
    return RationalPolynomial(tuple(c.re for c in coeffs))


# -------------------------------
#   Sturm isolation
# -------------------------------
_VAR = sympy.Symbol("x")


def sturm_chain(p: RationalPolynomial) -> List[RationalPolynomial]:
    """
    Sturm sequence of the square-free part. Counts taken with it are of
    distinct roots: a repeated eigenvalue counts once.
    """
    return [RationalPolynomial.from_sympy(s) for s in p.to_sympy(_VAR).sqf_part().sturm()]


def sign_changes(chain: Sequence[RationalPolynomial], x) -> int:
    """Sign changes of the chain evaluated at x, ignoring zeros."""
    signs = [v > 0 for v in (s(x) for s in chain) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(chain: Sequence[RationalPolynomial], a, b) -> int:
    """Number of distinct real roots in (a, b]."""
    return sign_changes(chain, a) - sign_changes(chain, b)


@dataclass(frozen=True)
class EigenvalueEnclosure:
    """
    The eigenvalue lies in (lo, hi]. ``exact`` is set when it is rational and
    was hit by bisection, in which case it equals hi.
    """

    lo: Fraction
    hi: Fraction
    value: BigFloat
    prec: int
    exact: bool = False

    def contains(self, x) -> bool:
        return self.lo < x <= self.hi

    def certifies_below(self, bound: Fraction) -> bool:
        """True when ``bound`` is provably <= the enclosed eigenvalue."""
        bound = Fraction(bound)
        return bound <= self.lo or (self.exact and bound <= self.hi)


def smallest_eigenvalue(M: ExactMatrix, prec: int) -> EigenvalueEnclosure:
    """
    Smallest eigenvalue of a Hermitian positive-definite matrix as a certified
    interval (lo, hi] with hi - lo <= hi * 2^-prec. Isolation counts distinct
    roots, so a repeated smallest eigenvalue is enclosed once.
    """
    prec = check_precision(prec)
    _require_hermitian(M)
    if not is_positive_definite(M):
        raise NotPositiveDefinite("smallest_eigenvalue needs a positive-definite matrix")

    p = char_poly(M)
    chain = sturm_chain(p)
    lo = Fraction(0)
    hi = M.trace().re
    while count_roots(chain, lo, hi) > 1:
        mid = (lo + hi) / 2
        if count_roots(chain, lo, mid) >= 1:
            hi = mid
        else:
            lo = mid
    log.debug("[Sturm] smallest root isolated in (%s, %s]", lo, hi)

    p_lo, p_hi = p(lo), p(hi)
    simple = p_hi != 0 and (p_lo > 0) != (p_hi > 0)
    tol = Fraction(1, 2 ** prec)
    steps = 0
    while hi - lo > hi * tol:
        mid = (lo + hi) / 2
        if simple:
            v = p(mid)
            if v == 0:
                hi, simple = mid, False
            elif (v > 0) == (p_lo > 0):
                lo, p_lo = mid, v
            else:
                hi = mid
        elif count_roots(chain, lo, mid) >= 1:
            hi = mid
        else:
            lo = mid
        steps += 1
    log.debug("[Sturm] bisection finished after %d steps at %d bits", steps, prec)
    if p(hi) == 0:
        return EigenvalueEnclosure(lo, hi, BigFloat.from_rational(hi, prec), prec, exact=True)
    return EigenvalueEnclosure(lo, hi, BigFloat.from_rational((lo + hi) / 2, prec), prec)


# -------------------------------
#   Factored triangular coefficients
# -------------------------------
@dataclass(frozen=True)
class FactoredTriangular:
    """
    Lower-triangular A = D * core with D = diag(sqrt(d2)); the square roots
    are never formed.
    """

    core: ExactMatrix
    d2: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "d2", tuple(Fraction(x) for x in self.d2))
        if len(self.d2) != self.core.order:
            raise ParameterError("d2 length must match the core order")
        if not self.core.is_lower_triangular():
            raise NotTriangular("coefficient core must be lower triangular")
        for ell, x in enumerate(self.d2):
            if x == 0:
                raise ZeroScaleFactor(f"d2[{ell}] is zero")
        for ell in range(self.core.order):
            if not self.core[ell, ell]:
                raise ZeroDiagonal(f"coefficient core has a zero diagonal at {ell}")

    @property
    def order(self) -> int:
        return self.core.order

    def __getitem__(self, idx) -> ComplexRational:
        return self.core[idx]

    def row(self, ell: int) -> List[ComplexRational]:
        return [self.core[ell, k] for k in range(ell + 1)]

    def is_positive_scaled(self) -> bool:
        return all(x > 0 for x in self.d2)
