# apps/ghm/services/families/lommel.py
"""
q-Lommel family: moment matrix (s_{j+k+1,nu}) with basis u_j = v_j = x^{2j}.

Everything is parameterized by q and V = q^{nu+1} (both rational in (0, 1));
q^nu enters only as V / q. The moments themselves are sums over q-Bessel
zeros, so H is always produced from the Gram identity.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from apps.ghm.services.errors import IndexOutOfRange, ParameterError
from apps.ghm.services.exact_arith import (
    ComplexRational,
    format_rational,
    qbinomial,
    qpoch_finite,
)
from apps.ghm.services.families.base import Family, check_index
from apps.ghm.services.gram_engine import (
    Erratum,
    LowerBound,
    OrthoSystemSpec,
    corollary_bound,
    lower_bound,
)
from apps.ghm.services.matrix_core import ExactMatrix

log = logging.getLogger(__name__)

MINUS_ONE = ComplexRational(-1)


@dataclass(frozen=True)
class LommelParams:
    q: Fraction
    V: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "V", Fraction(self.V))
        if not 0 < self.q < 1:
            raise ParameterError(f"q must lie in (0, 1), got {format_rational(self.q)}")
        if not 0 < self.V < 1:
            raise ParameterError(f"V = q^(nu+1) must lie in (0, 1), got {format_rational(self.V)}")


def lommel_h_coeff(n: int, k: int, q, V) -> Fraction:
    """Coefficient of x^{2k} in h_{2n,nu+1}(x; q)."""
    if n < 0 or not 0 <= k <= n:
        raise IndexOutOfRange(f"coefficient index k = {k} outside 0..{n}")
    q, V = Fraction(q), Fraction(V)
    num = (
        q ** (n * n - n) * V ** n
        * qpoch_finite(V, q, n + k) * qpoch_finite(q, q, n + k)
        * (-4) ** k * q ** (k * k - 2 * n * k + k) / V ** k
    )
    den = (-1) ** n * qpoch_finite(V, q, n - k) * qpoch_finite(q, q, n - k) * qpoch_finite(q, q, 2 * k)
    return num / den


def lommel_d2(p: LommelParams, n: int) -> Fraction:
    """(1 - V q^{2n}) / q^{2n nu + n(2n+1)}, with q^{2n nu} = (V/q)^{2n}."""
    return (1 - p.V * p.q ** (2 * n)) / (p.V ** (2 * n) * p.q ** (2 * n * n - n))


def lommel_system(p: LommelParams) -> OrthoSystemSpec:
    return OrthoSystemSpec(
        name="lommel",
        acoef=lambda n, k: ComplexRational(lommel_h_coeff(n, k, p.q, p.V)) if k <= n else ComplexRational(0),
        d2=lambda n: lommel_d2(p, n),
        polynomial=True,
    )


def lommel_closed_det(p: LommelParams, n: int) -> Fraction:
    """
    V^{n(n+1)} q^{n(n+1)(4n-1)/6}
      / (2^{2n(n+1)} (V; q^2)_{n+1} prod_{m=1}^{n} (V; q)_{2m}^2)
    """
    if n < 0:
        raise IndexOutOfRange(f"order must be >= 0, got {n}")
    q, V = p.q, p.V
    e = n * (n + 1) * (4 * n - 1)
    assert e % 6 == 0
    num = V ** (n * (n + 1)) * q ** (e // 6)
    den = Fraction(2) ** (2 * n * (n + 1)) * qpoch_finite(V, q * q, n + 1)
    for m in range(1, n + 1):
        den *= qpoch_finite(V, q, 2 * m) ** 2
    return num / den


def lommel_printed_det(p: LommelParams, n: int) -> Fraction:
    """
    2^{-n(n+1)} q^{n(n+1)(4n+6nu+5)} / ((V; q^2)_{n+1} prod_{m=1}^{n} (V; q)_{2m})
    with q^{6 nu} = (V/q)^6.
    """
    q, V = p.q, p.V
    t = n * (n + 1)
    num = Fraction(1, 2 ** t) * q ** (t * (4 * n - 1)) * V ** (6 * t)
    den = qpoch_finite(V, q * q, n + 1)
    for m in range(1, n + 1):
        den *= qpoch_finite(V, q, 2 * m)
    return num / den


def lommel_closed_inverse_entry(p: LommelParams, n: int, j: int, k: int) -> Fraction:
    """
    (-4)^{j+k} q^{j(j-nu)+k(k-nu)} sum_{l >= max(j,k)} [l+j, l-j]_q [l+k, l-k]_q
      (1 - V q^{2l}) / q^{(2j+2k+1) l} (V;q)_{l+j}/(V;q)_{l-j} (V;q)_{l+k}/(V;q)_{l-k}
    """
    check_index(n, j, k)
    q, V = p.q, p.V
    total = Fraction(0)
    for ell in range(max(j, k), n + 1):
        total += (
            qbinomial(ell + j, ell - j, q) * qbinomial(ell + k, ell - k, q)
            * (1 - V * q ** (2 * ell)) / q ** ((2 * j + 2 * k + 1) * ell)
            * qpoch_finite(V, q, ell + j) / qpoch_finite(V, q, ell - j)
            * qpoch_finite(V, q, ell + k) / qpoch_finite(V, q, ell - k)
        )
    prefactor = Fraction(-4) ** (j + k) * q ** (j * j + k * k) * (q / V) ** (j + k)
    return prefactor * total


def _value_at_minus_one(p: LommelParams, ell: int) -> Fraction:
    """h_{2l,nu+1}(i; q): the polynomial in x^2 evaluated at x^2 = -1."""
    return sum((lommel_h_coeff(ell, k, p.q, p.V) * (-1) ** k for k in range(ell + 1)), Fraction(0))


def lommel_closed_bound(p: LommelParams, n: int, prec: int) -> LowerBound:
    """1 / sum_l d2_l h_{2l,nu+1}(i; q)^2"""
    if n < 0:
        raise IndexOutOfRange(f"order must be >= 0, got {n}")
    den = sum((lommel_d2(p, ell) * _value_at_minus_one(p, ell) ** 2 for ell in range(n + 1)), Fraction(0))
    return lower_bound(den, prec)


def lommel_printed_bound(p: LommelParams, n: int, prec: int) -> LowerBound:
    """The bound with q-exponent 2 l nu + l(2n + 1) in the norms."""
    q, V = p.q, p.V
    den = Fraction(0)
    for ell in range(n + 1):
        norm = V ** (2 * ell) * q ** (2 * ell * n - ell)
        den += (1 - V * q ** (2 * ell)) * _value_at_minus_one(p, ell) ** 2 / norm
    return lower_bound(den, prec)


class LommelFamily(Family):
    name = "lommel"

    def __init__(self, q, V):
        super().__init__(LommelParams(q, V))

    def build_system(self) -> OrthoSystemSpec:
        return lommel_system(self.params)

    def closed_det(self, n: int) -> Fraction:
        return lommel_closed_det(self.params, n)

    def closed_inverse_entry(self, n: int, j: int, k: int) -> Fraction:
        return lommel_closed_inverse_entry(self.params, n, j, k)

    def closed_bound(self, n: int, prec: int) -> LowerBound:
        return lommel_closed_bound(self.params, n, prec)

    def default_z0(self) -> Optional[ComplexRational]:
        return MINUS_ONE

    def printed_errata(self, n: int, prec: int) -> List[Erratum]:
        p = self.params
        printed_det = lommel_printed_det(p, n)
        det = lommel_closed_det(p, n)
        inv = self.gram_inverse(n)
        closed_inv = self.closed_inverse(n)
        printed_b = lommel_printed_bound(p, n, prec)
        b = corollary_bound(self.system, n, MINUS_ONE, prec)
        return [
            Erratum("lommel.det", format_rational(printed_det), format_rational(det), printed_det == det,
                    "q-exponent, power of 2 and unsquared Pochhammer products"),
            Erratum("lommel.inverse", closed_inv.to_strings(), inv.to_strings(), closed_inv == inv,
                    "printed gamma(j,k) evaluated as is"),
            Erratum("lommel.bound", format_rational(printed_b.exact), format_rational(b.exact),
                    printed_b.exact == b.exact, "norm exponent l(2n+1) against l(2l+1)"),
        ]
