# apps/ghm/services/gram_engine.py
"""
Generic moment-matrix engine.

An ``OrthoSystemSpec`` bundles the generators of one orthonormal system
p_n = sum_j a_{n,j} u_j (stored as a = d * a_hat with d^2 rational) and,
optionally, a second graded system v_n = sum_j c_{n,j} u_j with
p_n = sum_k b_{n,k} v_k. From it the engine builds

    H = A^-1 (B^-1)^*        H^-1 = B^* A        det G = prod a_jj^-2

in exact arithmetic, recovers G = H (C^*)^-1, and evaluates the smallest
eigenvalue lower bounds of G (Frobenius / row-sum bounds, the unimodular
point bound and its Christoffel-Darboux form).
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

from apps.ghm.services.errors import (
    GeneratorUnavailable,
    IndexOutOfRange,
    InvalidModulus,
    NotApplicable,
    NotHermitian,
    NotPositiveDefinite,
    ParameterError,
    SignAlignmentWarning,
    ZeroDenominator,
    ZeroScaleFactor,
)
from apps.ghm.services.exact_arith import (
    BigFloat,
    ComplexRational,
    as_complex,
    format_rational,
    modulus_upper,
    reciprocal_lower,
)
from apps.ghm.services.matrix_core import (
    ONE,
    ZERO,
    EigenvalueEnclosure,
    ExactMatrix,
    FactoredTriangular,
    bareiss_det,
    leading_minors,
    lower_triangular_inverse,
)

log = logging.getLogger(__name__)

Generator2 = Callable[[int, int], ComplexRational]


def kronecker(n: int, k: int) -> ComplexRational:
    return ONE if n == k else ZERO


# -------------------------------
#   Generator bundle
# -------------------------------
@dataclass(frozen=True)
class OrthoSystemSpec:
    """
    acoef / bcoef return the rational cores (zero above the diagonal is
    enforced by the engine), d2 the squared diagonal scales shared by A and B.
    ``max_order`` is the highest n the generators are defined for (None when
    unbounded). ``polynomial`` marks systems with u_k = y^k in one variable y
    and a Hankel moment matrix, the setting of the Christoffel-Darboux form.
    """

    name: str
    acoef: Generator2
    d2: Callable[[int], Fraction]
    c: Generator2 = kronecker
    same_uv: bool = True
    bcoef: Optional[Generator2] = None
    max_order: Optional[int] = None
    polynomial: bool = False
    entry: Optional[Generator2] = None

    def __post_init__(self):
        if self.same_uv and self.bcoef is not None:
            raise ParameterError("bcoef is only meaningful when same_uv is false")
        if not self.same_uv and self.bcoef is None:
            raise ParameterError("a system with v != u needs bcoef")

    def check_order(self, n: int) -> None:
        if n < 0:
            raise IndexOutOfRange(f"order must be >= 0, got {n}")
        if self.max_order is not None and n > self.max_order:
            raise GeneratorUnavailable(
                f"{self.name}: generators are defined up to order {self.max_order}, requested {n}"
            )

    def gram_system(self) -> "OrthoSystemSpec":
        """The u-system alone; its H is the Gram matrix G."""
        if self.same_uv:
            return self
        return OrthoSystemSpec(
            name=self.name,
            acoef=self.acoef,
            d2=self.d2,
            max_order=self.max_order,
            polynomial=self.polynomial,
        )


def _factored(gen: Generator2, d2: Callable[[int], Fraction], n: int) -> FactoredTriangular:
    core = ExactMatrix.from_function(
        n + 1, lambda ell, k: as_complex(gen(ell, k)) if k <= ell else ZERO
    )
    return FactoredTriangular(core, tuple(Fraction(d2(ell)) for ell in range(n + 1)))


def build_A(sys: OrthoSystemSpec, n: int) -> FactoredTriangular:
    sys.check_order(n)
    return _factored(sys.acoef, sys.d2, n)


def build_B(sys: OrthoSystemSpec, n: int) -> FactoredTriangular:
    sys.check_order(n)
    if sys.same_uv:
        return build_A(sys, n)
    return _factored(sys.bcoef, sys.d2, n)


def connection_matrix(sys: OrthoSystemSpec, n: int) -> ExactMatrix:
    sys.check_order(n)
    return ExactMatrix.from_function(n + 1, lambda j, k: as_complex(sys.c(j, k)) if k <= j else ZERO)


def build_H(sys: OrthoSystemSpec, n: int) -> ExactMatrix:
    """H = A_hat^-1 D^-2 (B_hat^-1)^*; the square roots pair up and cancel."""
    A = build_A(sys, n)
    B = build_B(sys, n)
    a_inv = lower_triangular_inverse(A.core)
    b_inv = a_inv if sys.same_uv else lower_triangular_inverse(B.core)
    inv_d2 = ExactMatrix.diagonal([1 / x for x in A.d2])
    return a_inv @ inv_d2 @ b_inv.conj_transpose()


def build_G(sys: OrthoSystemSpec, n: int) -> ExactMatrix:
    return build_H(sys.gram_system(), n)


def gram_inverse(sys: OrthoSystemSpec, n: int) -> ExactMatrix:
    """gamma_{j,k} = sum_{l >= max(j,k)} d2_l conj(b_hat_{l,j}) a_hat_{l,k}"""
    A = build_A(sys, n)
    B = build_B(sys, n)

    def gamma(j: int, k: int) -> ComplexRational:
        acc = ZERO
        for ell in range(max(j, k), n + 1):
            acc = acc + B[ell, j].conjugate() * A[ell, k] * A.d2[ell]
        return acc

    return ExactMatrix.from_function(n + 1, gamma)


class ClosedDeterminants(NamedTuple):
    det_g: Fraction
    det_h: ComplexRational
    det_c: ComplexRational


def closed_dets(sys: OrthoSystemSpec, n: int) -> ClosedDeterminants:
    A = build_A(sys, n)
    det_g = Fraction(1)
    det_c = ONE
    for j in range(n + 1):
        det_g /= A.d2[j] * A[j, j].abs2()
        det_c = det_c * as_complex(sys.c(j, j))
    return ClosedDeterminants(det_g, det_c.conjugate() * det_g, det_c)


def recover_G(H: ExactMatrix, C: ExactMatrix) -> ExactMatrix:
    """G = H (C^*)^-1 = H (C^-1)^*."""
    if H.order != C.order:
        raise ParameterError(f"order mismatch: H is {H.order}, C is {C.order}")
    return H @ lower_triangular_inverse(C).conj_transpose()


def diagonal_rescale_inverse(
    Y: ExactMatrix, e, cvec: Sequence, dvec: Sequence
) -> ExactMatrix:
    """
    Inverse of X~ = (e x_{jk} c_j d_k) from the inverse Y of X:
    y~_{jk} = y_{jk} / (e d_j c_k).
    """
    e = as_complex(e)
    cvec = [as_complex(x) for x in cvec]
    dvec = [as_complex(x) for x in dvec]
    if len(cvec) != Y.order or len(dvec) != Y.order:
        raise ParameterError("scale vectors must match the matrix order")
    if not e or any(not x for x in cvec) or any(not x for x in dvec):
        raise ZeroScaleFactor("scale factors must be nonzero")
    return ExactMatrix.from_function(Y.order, lambda j, k: Y[j, k] / (e * dvec[j] * cvec[k]))


def determinantal_system(G: ExactMatrix, name: str = "determinantal") -> OrthoSystemSpec:
    """
    Orthonormal system of a Hermitian moment matrix from the bordered
    determinant representation of p_n:
        a_hat_{n,j} = (-1)^{n+j} det(G_n^T without row n and column j)
        d2_n = 1 / (det G_n det G_{n-1}),  det G_{-1} = 1
    """
    if not G.is_hermitian():
        raise NotHermitian("determinantal system needs a Hermitian moment matrix")
    minors = leading_minors(G)
    if any(not m for m in minors):
        raise NotPositiveDefinite("a leading principal minor vanishes")
    N = G.order - 1
    core: List[List[ComplexRational]] = [[ONE]]
    for n in range(1, N + 1):
        block = G.leading(n + 1).transpose()
        core.append(
            [bareiss_det(block.minor(n, j)) * (-1) ** (n + j) for j in range(n + 1)]
        )
    d2 = []
    prev = ONE
    for m in minors:
        d2.append((1 / (m * prev)).real_value())
        prev = m

    def acoef(n: int, k: int) -> ComplexRational:
        return core[n][k] if k <= n else ZERO

    return OrthoSystemSpec(name=name, acoef=acoef, d2=lambda n: d2[n], max_order=N)


# -------------------------------
#   Lower bounds
# -------------------------------
@dataclass(frozen=True)
class LowerBound:
    """
    ``exact`` is the rational the decimal ``value`` is rounded down from.
    ``certified`` is false when a hypothesis of the bound failed; the number
    is then reported but is not a proven bound.
    """

    exact: Fraction
    value: BigFloat
    certified: bool = True
    note: str = ""

    def holds_for(self, enclosure: EigenvalueEnclosure) -> bool:
        return enclosure.certifies_below(self.exact)


def lower_bound(den: Fraction, prec: int, certified: bool = True, note: str = "") -> LowerBound:
    if den <= 0:
        raise ZeroDenominator(f"bound denominator must be positive, got {format_rational(den)}")
    return LowerBound(1 / Fraction(den), reciprocal_lower(den, prec), certified, note)


def _require_positive_scales(A: FactoredTriangular) -> None:
    if not A.is_positive_scaled():
        raise NotPositiveDefinite("bounds need positive squared scales d2")


def theorem_bounds(sys: OrthoSystemSpec, n: int, prec: int) -> Tuple[LowerBound, LowerBound]:
    """
    b1 = 1 / sum_l d2_l sum_j |a_hat_lj|^2 and
    b2 = 1 / sum_l d2_l (sum_j |a_hat_lj|)^2, moduli rounded up.
    """
    if not sys.same_uv:
        raise NotApplicable("eigenvalue bounds are stated for u = v systems")
    A = build_A(sys, n)
    _require_positive_scales(A)
    den1 = Fraction(0)
    den2 = Fraction(0)
    for ell in range(n + 1):
        row = A.row(ell)
        den1 += A.d2[ell] * sum((z.abs2() for z in row), Fraction(0))
        den2 += A.d2[ell] * sum((modulus_upper(z.abs2(), prec) for z in row), Fraction(0)) ** 2
    return lower_bound(den1, prec), lower_bound(den2, prec)


def sign_aligned(values: Sequence) -> bool:
    """
    True when every nonzero value is a positive multiple of the first
    nonzero one (same sign for reals, same argument for complex values).
    """
    ref = None
    for v in values:
        t = as_complex(v)
        if not t:
            continue
        if ref is None:
            ref = t
            continue
        prod = t * ref.conjugate()
        if prod.im != 0 or prod.re <= 0:
            return False
    return True


def _check_unimodular(z0: ComplexRational) -> ComplexRational:
    z0 = as_complex(z0)
    if z0.abs2() != 1:
        raise InvalidModulus(f"|z0| must be 1, got |z0|^2 = {format_rational(z0.abs2())}")
    return z0


def _row_terms(A: FactoredTriangular, ell: int, z0: ComplexRational) -> List[ComplexRational]:
    return [A[ell, k] * z0 ** k for k in range(ell + 1)]


def _alignment_note(sys: OrthoSystemSpec, rows: List[int], z0: ComplexRational) -> str:
    note = f"terms a_hat(l,k) z0^k are not aligned at z0 = {z0} for l in {rows}"
    log.warning("[Bounds] %s: %s", sys.name, note)
    warnings.warn(f"{sys.name}: {note}", SignAlignmentWarning, stacklevel=3)
    return note


def corollary_bound(sys: OrthoSystemSpec, n: int, z0, prec: int) -> LowerBound:
    """1 / sum_l d2_l |sum_k a_hat_lk z0^k|^2, certified when every row is aligned."""
    if not sys.same_uv:
        raise NotApplicable("eigenvalue bounds are stated for u = v systems")
    z0 = _check_unimodular(z0)
    A = build_A(sys, n)
    _require_positive_scales(A)
    den = Fraction(0)
    misaligned = []
    for ell in range(n + 1):
        terms = _row_terms(A, ell, z0)
        if not sign_aligned(terms):
            misaligned.append(ell)
        den += A.d2[ell] * sum(terms, ZERO).abs2()
    if misaligned:
        return lower_bound(den, prec, certified=False, note=_alignment_note(sys, misaligned, z0))
    return lower_bound(den, prec)


def _poly_value(A: FactoredTriangular, ell: int, z: Fraction) -> Tuple[ComplexRational, ComplexRational]:
    value = ZERO
    slope = ZERO
    for k in range(ell, -1, -1):
        slope = slope * z + value
        value = value * z + A[ell, k]
    return value, slope


def cd_bound(sys: OrthoSystemSpec, n: int, z0, prec: int) -> LowerBound:
    """
    Christoffel-Darboux form of the unimodular point bound:
        a_hat_{n+1,n+1} / (d2_n a_hat_{n,n} W),
        W = P'_{n+1}(z0) P_n(z0) - P'_n(z0) P_{n+1}(z0)
    with P_m = sum_k a_hat_{m,k} y^k.
    """
    if not sys.same_uv:
        raise NotApplicable("eigenvalue bounds are stated for u = v systems")
    if not sys.polynomial:
        raise NotApplicable(f"{sys.name}: Christoffel-Darboux needs a polynomial system")
    z0 = _check_unimodular(z0)
    if not z0.is_real:
        raise NotApplicable("Christoffel-Darboux needs real values at z0")
    sys.check_order(n + 1)
    A = build_A(sys, n + 1)
    _require_positive_scales(A)
    for ell in (n, n + 1):
        if any(not A[ell, k].is_real for k in range(ell + 1)):
            raise NotApplicable("Christoffel-Darboux needs real polynomial coefficients")
    x = z0.re
    pn, dpn = _poly_value(A, n, x)
    pn1, dpn1 = _poly_value(A, n + 1, x)
    w = dpn1 * pn - dpn * pn1
    if not w:
        raise ZeroDenominator("p_n(z0) and p_{n+1}(z0) vanish together")
    exact = (A[n + 1, n + 1] / (A[n, n] * w * A.d2[n])).real_value()
    if exact <= 0:
        raise ZeroDenominator("Christoffel-Darboux sum is not positive")
    misaligned = [ell for ell in range(n + 1) if not sign_aligned(_row_terms(A, ell, z0))]
    if misaligned:
        return lower_bound(1 / exact, prec, certified=False, note=_alignment_note(sys, misaligned, z0))
    return lower_bound(1 / exact, prec)


# -------------------------------
#   Verification payload
# -------------------------------
@dataclass
class Erratum:
    """A printed closed form evaluated next to the validated one."""

    name: str
    printed: object
    corrected: object
    matches: bool
    note: str = ""


@dataclass
class GramReport:
    family: str
    n: int
    prec: int
    command: str = "verify"
    z0: Optional[ComplexRational] = None
    entries: Optional[ExactMatrix] = None
    det_closed: Optional[ComplexRational] = None
    det_oracle: Optional[ComplexRational] = None
    inverse_closed: Optional[ExactMatrix] = None
    inverse_oracle: Optional[ExactMatrix] = None
    bounds: Dict[str, Optional[LowerBound]] = field(default_factory=dict)
    bound_notes: Dict[str, str] = field(default_factory=dict)
    enclosure: Optional[EigenvalueEnclosure] = None
    checks: Dict[str, bool] = field(default_factory=dict)
    errata: List[Erratum] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    parameter_error: bool = False

    @property
    def det_match(self) -> Optional[bool]:
        if self.det_closed is None or self.det_oracle is None:
            return None
        return self.det_closed == self.det_oracle

    @property
    def inverse_match(self) -> Optional[bool]:
        if self.inverse_closed is None or self.inverse_oracle is None:
            return None
        return self.inverse_closed == self.inverse_oracle

    @property
    def bounds_certified(self) -> Optional[bool]:
        present = [b for b in self.bounds.values() if b is not None]
        if not present:
            return None
        if not all(b.certified for b in present):
            return False
        if self.enclosure is None:
            return True
        return all(b.holds_for(self.enclosure) for b in present)

    @property
    def ok(self) -> bool:
        flags = [self.det_match, self.inverse_match, self.bounds_certified]
        if any(f is False for f in flags):
            return False
        return not self.errors and all(self.checks.values())
