# apps/ghm/services/families/askey.py
"""
Askey-Wilson moment family, realized through little q-Jacobi polynomials.

Entries are the normalized moments (alpha;q)_{j+k} / (alpha beta;q)_{j+k}
(the infinite products mu_0 cancel). The orthonormal polynomials are
p_n(x) = d_n * (-1)^n 2phi1(q^-n, alpha beta q^{n-1}; alpha; q; q x).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import List, Optional

from apps.ghm.services.errors import (
    IndexOutOfRange,
    NonConvergent,
    NotPositiveDefinite,
    ParameterError,
    ZeroDenominator,
)
from apps.ghm.services.exact_arith import (
    BigFloat,
    ComplexRational,
    as_bigfloat,
    as_complex,
    check_precision,
    format_rational,
    qbinomial,
    qhyper_terminating,
    qpoch_finite,
    qpoch_infinite,
    qpoch_multi,
)
from apps.ghm.services.families.base import Family, bound_from_den, check_index
from apps.ghm.services.gram_engine import Erratum, LowerBound, OrthoSystemSpec
from apps.ghm.services.matrix_core import ExactMatrix

log = logging.getLogger(__name__)

MINUS_ONE = ComplexRational(-1)


@dataclass(frozen=True)
class AskeyParams:
    alpha: Fraction
    beta: Fraction
    q: Fraction

    def __post_init__(self):
        for name in ("alpha", "beta", "q"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.alpha == 0:
            raise ParameterError("alpha must be nonzero")
        if self.q == 0:
            raise ParameterError("q must be nonzero")
        if self.q in (1, -1):
            raise ParameterError("q must not be a root of unity")

    @property
    def ab(self) -> Fraction:
        return self.alpha * self.beta

    def check_order(self, n: int) -> None:
        """Invertibility at order n: q, alpha, beta avoid q^-k and the entries are defined."""
        if n < 0:
            raise IndexOutOfRange(f"order must be >= 0, got {n}")
        q = self.q
        if qpoch_finite(q, q, n) == 0:
            raise ParameterError("(q;q)_n vanishes")
        if qpoch_finite(self.alpha, q, n + 1) == 0:
            raise ParameterError("alpha = q^-k for some k <= n")
        if qpoch_finite(self.beta, q, n + 1) == 0:
            raise ParameterError("beta = q^-k for some k <= n")
        if qpoch_finite(self.ab, q, 2 * n + 1) == 0:
            raise ParameterError("alpha beta q^k = 1 for some k <= 2n")


def askey_pd_mode(p: AskeyParams) -> bool:
    return 0 < p.q < 1 and 0 < p.alpha < 1 and 0 < p.beta < 1


def askey_moment_ratio(n: int, p: AskeyParams) -> Fraction:
    """mu_n / mu_0 = (alpha;q)_n / (alpha beta;q)_n"""
    if n < 0:
        raise IndexOutOfRange(f"moment index must be >= 0, got {n}")
    den = qpoch_finite(p.ab, p.q, n)
    if den == 0:
        raise ZeroDenominator(f"(alpha beta;q)_{n} vanishes")
    return qpoch_finite(p.alpha, p.q, n) / den


def askey_entry(p: AskeyParams, j: int, k: int) -> Fraction:
    if j < 0 or k < 0:
        raise IndexOutOfRange(f"entry ({j}, {k}) has a negative index")
    return askey_moment_ratio(j + k, p)


def askey_acoef(p: AskeyParams, n: int, k: int) -> Fraction:
    """(-1)^n (q^-n, alpha beta q^{n-1};q)_k q^k / (q, alpha;q)_k"""
    if k > n:
        return Fraction(0)
    q = p.q
    num = qpoch_multi((q ** -n, p.ab * q ** (n - 1)), q, k) * q ** k
    den = qpoch_multi((q, p.alpha), q, k)
    if den == 0:
        raise ZeroDenominator(f"(q, alpha;q)_{k} vanishes")
    return (-1) ** n * num / den


def askey_d2(p: AskeyParams, n: int) -> Fraction:
    """
    mu_0 / h_n in the cancelled form
    (1 - alpha beta q^{2n-1}) (alpha;q)_n (alpha beta;q)_{n-1} / ((q, beta;q)_n alpha^n),
    d2_0 = 1.
    """
    if n == 0:
        return Fraction(1)
    q = p.q
    num = (1 - p.ab * q ** (2 * n - 1)) * qpoch_finite(p.alpha, q, n) * qpoch_finite(p.ab, q, n - 1)
    den = qpoch_multi((q, p.beta), q, n) * p.alpha ** n
    if den == 0:
        raise ZeroDenominator(f"(q, beta;q)_{n} vanishes")
    return num / den


def askey_system(p: AskeyParams) -> OrthoSystemSpec:
    return OrthoSystemSpec(
        name="askey",
        acoef=lambda n, k: ComplexRational(askey_acoef(p, n, k)),
        d2=lambda n: askey_d2(p, n),
        polynomial=True,
        entry=lambda j, k: ComplexRational(askey_entry(p, j, k)),
    )


def askey_closed_det(p: AskeyParams, n: int) -> Fraction:
    """
    alpha^{n(n+1)/2} q^{n(n^2-1)/3} prod_{m=1}^{n} (q, alpha, beta;q)_m
      / prod_{m=1}^{n} (alpha beta q^{m-1};q)_m (alpha beta;q)_{2m}
    """
    p.check_order(n)
    q = p.q
    num = p.alpha ** (n * (n + 1) // 2) * q ** (n * (n * n - 1) // 3)
    den = Fraction(1)
    for m in range(1, n + 1):
        num *= qpoch_multi((q, p.alpha, p.beta), q, m)
        den *= qpoch_finite(p.ab * q ** (m - 1), q, m) * qpoch_finite(p.ab, q, 2 * m)
    return num / den


def _qbinom(m: int, j: int, q: Fraction) -> Fraction:
    return qbinomial(m, j, q) if 0 <= j <= m else Fraction(0)


def _inverse_prefactor(p: AskeyParams, j: int, k: int) -> Fraction:
    q = p.q
    return (
        (-1) ** (j + k) * q ** (comb(j + 1, 2) + comb(k + 1, 2))
        / (qpoch_finite(p.alpha, q, j) * qpoch_finite(p.alpha, q, k))
    )


def askey_closed_inverse_entry(p: AskeyParams, n: int, j: int, k: int) -> Fraction:
    """
    prefactor * sum_{m >= max(j,k)} [m,j]_q [m,k]_q (ab q^{m-1};q)_j (ab q^{m-1};q)_k
      (alpha;q)_m (ab;q)_{2m} / ((alpha q^{j+k})^m (q, beta;q)_m (ab q^{m-1};q)_m)
    """
    check_index(n, j, k)
    p.check_order(n)
    q, ab = p.q, p.ab
    total = Fraction(0)
    for m in range(max(j, k), n + 1):
        shifted = ab * q ** (m - 1)
        num = (
            _qbinom(m, j, q) * _qbinom(m, k, q)
            * qpoch_finite(shifted, q, j) * qpoch_finite(shifted, q, k)
            * qpoch_finite(p.alpha, q, m) * qpoch_finite(ab, q, 2 * m)
        )
        den = (p.alpha * q ** (j + k)) ** m * qpoch_multi((q, p.beta), q, m) * qpoch_finite(shifted, q, m)
        total += num / den
    return _inverse_prefactor(p, j, k) * total


def askey_printed_inverse_entry(p: AskeyParams, n: int, j: int, k: int) -> Fraction:
    """
    prefactor * sum_{m=0}^{n} [m,j]_q [m,k]_q (ab q^{m-1};q)_j (ab q^{m-1};q)_k
      / ((alpha q^{j+k})^m (q, beta;q)_m (ab;q)_{2m} (ab q^{m-1};q)_m)
    """
    check_index(n, j, k)
    p.check_order(n)
    q, ab = p.q, p.ab
    total = Fraction(0)
    for m in range(n + 1):
        shifted = ab * q ** (m - 1)
        num = _qbinom(m, j, q) * _qbinom(m, k, q) * qpoch_finite(shifted, q, j) * qpoch_finite(shifted, q, k)
        den = (
            (p.alpha * q ** (j + k)) ** m * qpoch_multi((q, p.beta), q, m)
            * qpoch_finite(ab, q, 2 * m) * qpoch_finite(shifted, q, m)
        )
        total += num / den
    return _inverse_prefactor(p, j, k) * total


def little_q_jacobi_eval(n: int, x, p: AskeyParams):
    """2phi1(q^-n, alpha beta q^{n-1}; alpha; q; q x), exact."""
    if n < 0:
        raise IndexOutOfRange(f"degree must be >= 0, got {n}")
    q = p.q
    return qhyper_terminating((q ** -n, p.ab * q ** (n - 1)), (p.alpha,), q, q * as_complex(x), n + 1)


def _value_at_minus_one(p: AskeyParams, ell: int) -> Fraction:
    return as_complex(little_q_jacobi_eval(ell, -1, p)).real_value()


def askey_closed_bound(p: AskeyParams, n: int, prec: int) -> LowerBound:
    """1 / sum_l d2_l p_l(-1)^2 (the infinite products cancel)."""
    p.check_order(n)
    den = sum((askey_d2(p, ell) * _value_at_minus_one(p, ell) ** 2 for ell in range(n + 1)), Fraction(0))
    return bound_from_den(den, prec, askey_pd_mode(p), "askey")


def askey_mu0(p: AskeyParams, prec: int) -> BigFloat:
    """(alpha beta;q)_oo / (alpha;q)_oo"""
    eps = BigFloat.from_rational(Fraction(1, 2 ** prec), prec)
    return qpoch_infinite(p.ab, p.q, eps, prec) / qpoch_infinite(p.alpha, p.q, eps, prec)


def askey_norm(p: AskeyParams, n: int, prec: int, mu0: Optional[BigFloat] = None) -> BigFloat:
    """
    h_n = mu_0 (1 - ab/q) (q, beta;q)_n alpha^n / ((1 - ab q^{2n-1}) (alpha, ab/q;q)_n)
    """
    mu0 = askey_mu0(p, prec) if mu0 is None else mu0
    q, ab = p.q, p.ab
    if ab == q:
        # removable singularity at n = 0; use the cancelled form
        return mu0 / as_bigfloat(askey_d2(p, n), prec)
    ratio = (
        (1 - ab / q) * qpoch_multi((q, p.beta), q, n) * p.alpha ** n
        / ((1 - ab * q ** (2 * n - 1)) * qpoch_multi((p.alpha, ab / q), q, n))
    )
    return mu0 * ratio


def askey_bound_infinite_product(p: AskeyParams, n: int, prec: int, printed: bool = False) -> BigFloat:
    """
    The bound through the infinite products: (1/mu_0) {sum_l p_l(-1)^2 / h_l}^-1.
    With ``printed`` the prefactor mu_0 multiplies instead.
    """
    prec = check_precision(prec)
    p.check_order(n)
    if not askey_pd_mode(p):
        raise NotPositiveDefinite("Askey bound needs 0 < q, alpha, beta < 1")
    mu0 = askey_mu0(p, prec)
    s = BigFloat.from_rational(0, prec)
    for ell in range(n + 1):
        s = s + as_bigfloat(_value_at_minus_one(p, ell) ** 2, prec) / askey_norm(p, ell, prec, mu0)
    return mu0 / s if printed else 1 / (mu0 * s)


def askey_moment_series(n: int, p: AskeyParams, prec: int) -> BigFloat:
    """
    Partial sums of sum_m (beta;q)_m alpha^m q^{nm} / (q;q)_m, normalized by the
    n = 0 series; equals (alpha;q)_n / (alpha beta;q)_n.
    """
    prec = check_precision(prec)
    if not (0 < p.q < 1 and abs(p.alpha) < 1):
        raise NonConvergent("moment series needs 0 < q < 1 and |alpha| < 1")
    return _moment_sum(n, p, prec) / _moment_sum(0, p, prec)


def _moment_sum(n: int, p: AskeyParams, prec: int) -> BigFloat:
    q = as_bigfloat(p.q, prec)
    beta = as_bigfloat(p.beta, prec)
    z = as_bigfloat(p.alpha * p.q ** n, prec)
    one = BigFloat.from_rational(1, prec)
    eps = BigFloat.from_rational(Fraction(1, 2 ** (prec + 4)), prec)
    total = BigFloat.from_rational(0, prec)
    term = one
    qm = one
    m = 0
    while True:
        total = total + term
        term = term * (one - beta * qm) * z / (one - q * qm)
        qm = qm * q
        # later term ratios are at most |z| (1 + |beta| q^m) / (1 - q^{m+1})
        rho = abs(z) * (one + abs(beta) * qm) / (one - q * qm)
        m += 1
        if rho < one and abs(term) <= eps * abs(total) * (one - rho):
            break
        if m > 64 * prec:
            raise NonConvergent("moment series did not settle")
    log.debug("[Askey] moment series n=%d summed %d terms", n, m)
    return total


class AskeyFamily(Family):
    name = "askey"

    def __init__(self, alpha, beta, q):
        super().__init__(AskeyParams(alpha, beta, q))

    def build_system(self) -> OrthoSystemSpec:
        return askey_system(self.params)

    def check_order(self, n: int) -> None:
        self.params.check_order(n)

    def entry(self, j: int, k: int) -> ComplexRational:
        return ComplexRational(askey_entry(self.params, j, k))

    def closed_det(self, n: int) -> Fraction:
        return askey_closed_det(self.params, n)

    def closed_inverse_entry(self, n: int, j: int, k: int) -> Fraction:
        return askey_closed_inverse_entry(self.params, n, j, k)

    def closed_bound(self, n: int, prec: int) -> LowerBound:
        return askey_closed_bound(self.params, n, prec)

    def pd_mode(self) -> bool:
        return askey_pd_mode(self.params)

    def default_z0(self) -> Optional[ComplexRational]:
        return MINUS_ONE

    def printed_errata(self, n: int, prec: int) -> List[Erratum]:
        p = self.params
        printed_inv = ExactMatrix.from_function(n + 1, lambda j, k: askey_printed_inverse_entry(p, n, j, k))
        inv = self.gram_inverse(n)
        det = askey_closed_det(p, n)
        errata = [
            Erratum("askey.det", format_rational(det), format_rational(det), True,
                    "printed determinant evaluated as is"),
            Erratum("askey.inverse", printed_inv.to_strings(), inv.to_strings(), printed_inv == inv,
                    "(alpha beta;q)_{2m} in the denominator and no (alpha;q)_m"),
        ]
        if askey_pd_mode(p):
            printed_b = askey_bound_infinite_product(p, n, prec, printed=True)
            b = askey_bound_infinite_product(p, n, prec)
            tol = abs(b) * Fraction(1, 2 ** (prec // 2))
            errata.append(
                Erratum("askey.bound", str(printed_b), str(b), abs(printed_b - b) <= tol,
                        "prefactor (alpha beta;q)_oo/(alpha;q)_oo multiplies instead of dividing")
            )
        return errata
