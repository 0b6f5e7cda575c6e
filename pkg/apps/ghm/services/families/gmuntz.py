# apps/ghm/services/families/gmuntz.py
"""
Generalized Muntz family with kernel
    K(x, y) = c x conj(y) - a (x + conj(y)) - b
and entries 1 / K(alpha_j, alpha_k).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from apps.ghm.services.errors import IndexOutOfRange, NotPositiveDefinite, ParameterError
from apps.ghm.services.exact_arith import ComplexRational, as_complex, modulus_upper
from apps.ghm.services.families.base import Family, bound_from_den, check_index
from apps.ghm.services.gram_engine import Erratum, LowerBound, OrthoSystemSpec
from apps.ghm.services.matrix_core import ONE, ZERO, ExactMatrix


@dataclass(frozen=True)
class GenMuntzParams:
    a: Fraction
    b: Fraction
    c: Fraction
    alphas: Tuple[ComplexRational, ...]

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        alphas = tuple(as_complex(x) for x in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if not alphas:
            raise ParameterError("at least one exponent is required")
        if self.disc == 0:
            raise ParameterError("a^2 + b c must be nonzero")
        for j, aj in enumerate(alphas):
            for k, ak in enumerate(alphas):
                if j < k and aj == ak:
                    raise ParameterError(f"exponents must be distinct: alpha_{j} = alpha_{k} = {aj}")
                if not self.kernel(aj, ak):
                    raise ParameterError(f"kernel vanishes at (alpha_{j}, alpha_{k})")

    @property
    def disc(self) -> Fraction:
        return self.a * self.a + self.b * self.c

    @property
    def order(self) -> int:
        return len(self.alphas) - 1

    def kernel(self, x: ComplexRational, y: ComplexRational) -> ComplexRational:
        yc = y.conjugate()
        return self.c * x * yc - self.a * (x + yc) - self.b

    def diag_kernel(self, n: int) -> Fraction:
        """c |alpha_n|^2 - 2 a Re alpha_n - b"""
        return self.kernel(self.alphas[n], self.alphas[n]).real_value()

    def pole_factor(self, j: int) -> ComplexRational:
        """c conj(alpha_j) - a"""
        return self.c * self.alphas[j].conjugate() - self.a

    def is_real(self) -> bool:
        return all(x.is_real for x in self.alphas)


def _check(p: GenMuntzParams, n: int) -> None:
    if not 0 <= n <= p.order:
        raise IndexOutOfRange(f"exponent index {n} outside 0..{p.order}")


def gmuntz_pd_mode(p: GenMuntzParams, n: Optional[int] = None) -> bool:
    upto = p.order if n is None else n
    return p.disc > 0 and all(p.diag_kernel(k) > 0 for k in range(upto + 1))


def gmuntz_entry(p: GenMuntzParams, j: int, k: int) -> ComplexRational:
    _check(p, j)
    _check(p, k)
    return ONE / p.kernel(p.alphas[j], p.alphas[k])


def _uses_beta(p: GenMuntzParams) -> bool:
    return all(p.pole_factor(j) for j in range(p.order))


def _kernel_acoef(p: GenMuntzParams, n: int, k: int) -> ComplexRational:
    """prod_{j<n} K(alpha_k, alpha_j) / prod_{j<=n, j!=k} (alpha_k - alpha_j)"""
    a = p.alphas
    num = ONE
    for j in range(n):
        num = num * p.kernel(a[k], a[j])
    den = ONE
    for j in range(n + 1):
        if j != k:
            den = den * (a[k] - a[j])
    return num / den


def gmuntz_acoef(p: GenMuntzParams, n: int, k: int) -> ComplexRational:
    """
    A_{n,k} = prod_{j<n} (alpha_k - beta_j) / prod_{j<=n, j!=k} (alpha_k - alpha_j),
    beta_j = (a conj(alpha_j) + b) / (c conj(alpha_j) - a). When some
    c conj(alpha_j) - a vanishes the rows are kept in kernel form instead
    (each row scaled by prod_{j<n} (c conj(alpha_j) - a)).
    """
    _check(p, n)
    if k > n:
        return ZERO
    row = _kernel_acoef(p, n, k)
    if not _uses_beta(p):
        return row
    for j in range(n):
        row = row / p.pole_factor(j)
    return row


def gmuntz_d2(p: GenMuntzParams, n: int) -> Fraction:
    _check(p, n)
    d2 = p.diag_kernel(n) / p.disc ** n
    if _uses_beta(p):
        for j in range(n):
            d2 *= p.pole_factor(j).abs2()
    return d2


def gmuntz_system(p: GenMuntzParams) -> OrthoSystemSpec:
    return OrthoSystemSpec(
        name="gmuntz",
        acoef=lambda n, k: gmuntz_acoef(p, n, k),
        d2=lambda n: gmuntz_d2(p, n),
        max_order=p.order,
        polynomial=p.c == 0 and all(x == k for k, x in enumerate(p.alphas)),
        entry=lambda j, k: gmuntz_entry(p, j, k),
    )


def gmuntz_closed_det(p: GenMuntzParams, n: int) -> Fraction:
    _check(p, n)
    a = p.alphas
    num = p.disc ** (n * (n + 1) // 2)
    den = Fraction(1)
    for k in range(n + 1):
        num *= p.diag_kernel(k)
        for j in range(k):
            num *= (a[k] - a[j]).abs2()
        for j in range(k + 1):
            den *= p.kernel(a[k], a[j]).abs2()
    return num / den


def _inverse_sum(p: GenMuntzParams, n: int, j: int, k: int, printed: bool) -> ComplexRational:
    check_index(n, j, k)
    _check(p, n)
    a = p.alphas
    total = ZERO
    for m in range(max(j, k), n + 1):
        num = ComplexRational(p.diag_kernel(m))
        for r in range(m):
            num = num * p.kernel(a[r], a[j]) * p.kernel(a[k], a[r])
        den = ComplexRational(p.disc ** m)
        top = m - 1 if printed else m
        for q in range(top + 1):
            if q != j:
                diff = a[j].conjugate() - a[q].conjugate()
                den = den * (-diff if printed else diff)
            if q != k:
                diff = a[k] - a[q]
                den = den * (-diff if printed else diff)
        total = total + num / den
    return total


def gmuntz_closed_inverse_entry(p: GenMuntzParams, n: int, j: int, k: int) -> ComplexRational:
    return _inverse_sum(p, n, j, k, printed=False)


def gmuntz_printed_inverse_entry(p: GenMuntzParams, n: int, j: int, k: int) -> ComplexRational:
    """Denominators (conj(alpha_p) - conj(alpha_j)), (alpha_q - alpha_k) over p, q <= m - 1."""
    return _inverse_sum(p, n, j, k, printed=True)


def gmuntz_closed_bound(p: GenMuntzParams, n: int, prec: int) -> LowerBound:
    _check(p, n)
    a = p.alphas
    den = Fraction(0)
    for ell in range(n + 1):
        scale = p.diag_kernel(ell) / p.disc ** ell
        if scale <= 0:
            raise NotPositiveDefinite("generalized Muntz bound needs positive norms")
        row = Fraction(0)
        for j in range(ell + 1):
            num2 = Fraction(1)
            for r in range(ell):
                num2 *= p.kernel(a[j], a[r]).abs2()
            den2 = Fraction(1)
            for q in range(ell + 1):
                if q != j:
                    den2 *= (a[j] - a[q]).abs2()
            row += modulus_upper(num2 / den2, prec)
        den += scale * row * row
    return bound_from_den(den, prec, gmuntz_pd_mode(p, n), "gmuntz")


class GenMuntzFamily(Family):
    name = "gmuntz"

    def __init__(self, a, b, c, alphas: Sequence):
        super().__init__(GenMuntzParams(a, b, c, tuple(alphas)))

    def build_system(self) -> OrthoSystemSpec:
        return gmuntz_system(self.params)

    def entry(self, j: int, k: int) -> ComplexRational:
        return gmuntz_entry(self.params, j, k)

    def closed_det(self, n: int) -> Fraction:
        return gmuntz_closed_det(self.params, n)

    def closed_inverse_entry(self, n: int, j: int, k: int) -> ComplexRational:
        return gmuntz_closed_inverse_entry(self.params, n, j, k)

    def closed_bound(self, n: int, prec: int) -> LowerBound:
        return gmuntz_closed_bound(self.params, n, prec)

    def pd_mode(self) -> bool:
        return gmuntz_pd_mode(self.params)

    def default_z0(self) -> Optional[ComplexRational]:
        return ComplexRational(-1) if self.params.is_real() else None

    def printed_errata(self, n: int, prec: int) -> List[Erratum]:
        p = self.params
        printed = ExactMatrix.from_function(n + 1, lambda j, k: gmuntz_printed_inverse_entry(p, n, j, k))
        inv = self.gram_inverse(n)
        return [
            Erratum("gmuntz.inverse", printed.to_strings(), inv.to_strings(), printed == inv,
                    "denominator products of gamma(j,k) over p, q <= m-1"),
        ]
