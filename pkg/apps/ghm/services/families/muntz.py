# apps/ghm/services/families/muntz.py
"""
Muntz family: u_k = x^{alpha_k} on [0, 1], entries 1 / (alpha_j + conj(alpha_k) + 1).
The orthonormal system is the Muntz-Legendre one, p_n = sqrt(1 + 2 Re alpha_n) L_n.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from apps.ghm.services.errors import IndexOutOfRange, ParameterError
from apps.ghm.services.exact_arith import ComplexRational, as_complex, modulus_upper
from apps.ghm.services.families.base import Family, bound_from_den, check_index
from apps.ghm.services.gram_engine import Erratum, LowerBound, OrthoSystemSpec
from apps.ghm.services.matrix_core import ONE, ZERO, ExactMatrix


@dataclass(frozen=True)
class MuntzParams:
    alphas: Tuple[ComplexRational, ...]

    def __post_init__(self):
        alphas = tuple(as_complex(a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if not alphas:
            raise ParameterError("at least one exponent is required")
        for j, aj in enumerate(alphas):
            for k, ak in enumerate(alphas):
                if j < k and aj == ak:
                    raise ParameterError(f"exponents must be distinct: alpha_{j} = alpha_{k} = {aj}")
                if not (aj + ak.conjugate() + 1):
                    raise ParameterError(f"alpha_{j} + conj(alpha_{k}) + 1 vanishes")

    @property
    def order(self) -> int:
        return len(self.alphas) - 1

    def is_real(self) -> bool:
        return all(a.is_real for a in self.alphas)


def _alpha(p: MuntzParams, n: int) -> ComplexRational:
    if not 0 <= n <= p.order:
        raise IndexOutOfRange(f"exponent index {n} outside 0..{p.order}")
    return p.alphas[n]


def muntz_pd_mode(p: MuntzParams, n: Optional[int] = None) -> bool:
    upto = p.order if n is None else n
    return all(a.re > Fraction(-1, 2) for a in p.alphas[: upto + 1])


def muntz_entry(p: MuntzParams, j: int, k: int) -> ComplexRational:
    return ONE / (_alpha(p, j) + _alpha(p, k).conjugate() + 1)


def muntz_d2(p: MuntzParams, n: int) -> Fraction:
    return 1 + 2 * _alpha(p, n).re


def muntz_acoef(p: MuntzParams, n: int, k: int) -> ComplexRational:
    """Core coefficient of x^{alpha_k} in L_n."""
    if k > n:
        return ZERO
    a = p.alphas
    ak = _alpha(p, k)
    _alpha(p, n)
    num = ONE
    for j in range(n):
        num = num * (ak + a[j].conjugate() + 1)
    den = ONE
    for j in range(n + 1):
        if j != k:
            den = den * (ak - a[j])
    return num / den


def muntz_printed_acoef(p: MuntzParams, n: int, k: int) -> ComplexRational:
    """The coefficient with its denominator product stopping at n - 1."""
    if k > n:
        return ZERO
    a = p.alphas
    ak = _alpha(p, k)
    num = ONE
    den = ONE
    for j in range(n):
        num = num * (ak + a[j].conjugate() + 1)
        if j != k:
            den = den * (ak - a[j])
    return num / den


def muntz_system(p: MuntzParams) -> OrthoSystemSpec:
    return OrthoSystemSpec(
        name="muntz",
        acoef=lambda n, k: muntz_acoef(p, n, k),
        d2=lambda n: muntz_d2(p, n),
        max_order=p.order,
        polynomial=all(a == k for k, a in enumerate(p.alphas)),
        entry=lambda j, k: muntz_entry(p, j, k),
    )


def muntz_closed_det(p: MuntzParams, n: int) -> Fraction:
    a = p.alphas
    _alpha(p, n)
    det = Fraction(1)
    for k in range(n + 1):
        num = Fraction(1)
        den = 1 + 2 * a[k].re
        for j in range(k):
            num *= (a[k] - a[j]).abs2()
            den *= (a[k] + a[j].conjugate() + 1).abs2()
        det *= num / den
    return det


def _inverse_sum(p: MuntzParams, n: int, j: int, k: int, top) -> ComplexRational:
    """
    sum_m (1 + 2 Re alpha_m) prod_{r<m} (conj(alpha_j) + alpha_r + 1)(alpha_k + conj(alpha_r) + 1)
      / (prod_{p != j, p <= top(m)} (conj(alpha_j) - conj(alpha_p)) prod_{q != k, q <= top(m)} (alpha_k - alpha_q))
    """
    check_index(n, j, k)
    _alpha(p, n)
    a = p.alphas
    aj, ak = a[j].conjugate(), a[k]
    total = ZERO
    for m in range(max(j, k), n + 1):
        num = ComplexRational(1 + 2 * a[m].re)
        for r in range(m):
            num = num * (aj + a[r] + 1) * (ak + a[r].conjugate() + 1)
        den = ONE
        for q in range(top(m) + 1):
            if q != j:
                den = den * (aj - a[q].conjugate())
            if q != k:
                den = den * (ak - a[q])
        total = total + num / den
    return total


def muntz_closed_inverse_entry(p: MuntzParams, n: int, j: int, k: int) -> ComplexRational:
    return _inverse_sum(p, n, j, k, top=lambda m: m)


def muntz_printed_inverse_entry(p: MuntzParams, n: int, j: int, k: int) -> ComplexRational:
    """Denominator products stopping at m - 1."""
    return _inverse_sum(p, n, j, k, top=lambda m: m - 1)


def _bound_den(p: MuntzParams, n: int, prec: int, top) -> Fraction:
    a = p.alphas
    den = Fraction(0)
    for ell in range(n + 1):
        row = Fraction(0)
        for j in range(ell + 1):
            num2 = Fraction(1)
            for k in range(ell):
                num2 *= (a[j] + a[k].conjugate() + 1).abs2()
            den2 = Fraction(1)
            for k in range(top(ell) + 1):
                if k != j:
                    den2 *= (a[j] - a[k]).abs2()
            row += modulus_upper(num2 / den2, prec)
        den += (1 + 2 * a[ell].re) * row * row
    return den


def muntz_closed_bound(p: MuntzParams, n: int, prec: int) -> LowerBound:
    _alpha(p, n)
    den = _bound_den(p, n, prec, top=lambda ell: ell)
    return bound_from_den(den, prec, muntz_pd_mode(p, n), "muntz")


def muntz_printed_bound(p: MuntzParams, n: int, prec: int) -> LowerBound:
    _alpha(p, n)
    den = _bound_den(p, n, prec, top=lambda ell: ell - 1)
    return bound_from_den(den, prec, muntz_pd_mode(p, n), "muntz")


def _rows(n: int, fn) -> List[List[str]]:
    return [[str(fn(ell, k)) for k in range(ell + 1)] for ell in range(n + 1)]


class MuntzFamily(Family):
    name = "muntz"

    def __init__(self, alphas: Sequence):
        super().__init__(MuntzParams(tuple(alphas)))

    def build_system(self) -> OrthoSystemSpec:
        return muntz_system(self.params)

    def entry(self, j: int, k: int) -> ComplexRational:
        return muntz_entry(self.params, j, k)

    def closed_det(self, n: int) -> Fraction:
        return muntz_closed_det(self.params, n)

    def closed_inverse_entry(self, n: int, j: int, k: int) -> ComplexRational:
        return muntz_closed_inverse_entry(self.params, n, j, k)

    def closed_bound(self, n: int, prec: int) -> LowerBound:
        return muntz_closed_bound(self.params, n, prec)

    def pd_mode(self) -> bool:
        return muntz_pd_mode(self.params)

    def default_z0(self) -> Optional[ComplexRational]:
        return ComplexRational(-1) if self.params.is_real() else None

    def printed_errata(self, n: int, prec: int) -> List[Erratum]:
        p = self.params
        printed_coef = _rows(n, lambda ell, k: muntz_printed_acoef(p, ell, k))
        coef = _rows(n, lambda ell, k: muntz_acoef(p, ell, k))
        printed_inv = ExactMatrix.from_function(
            n + 1, lambda j, k: muntz_printed_inverse_entry(p, n, j, k)
        )
        inv = self.gram_inverse(n)
        errata = [
            Erratum("muntz.coefficients", printed_coef, coef, printed_coef == coef,
                    "denominator product of c(n,k) over j <= n-1"),
            Erratum("muntz.inverse", printed_inv.to_strings(), inv.to_strings(), printed_inv == inv,
                    "denominator products of gamma(j,k) over p, q <= m-1"),
        ]
        if muntz_pd_mode(p, n):
            printed_b = muntz_printed_bound(p, n, prec)
            b = muntz_closed_bound(p, n, prec)
            errata.append(
                Erratum("muntz.bound", str(printed_b.exact), str(b.exact), printed_b.exact == b.exact,
                        "denominator product of the bound over k <= l-1")
            )
        return errata
