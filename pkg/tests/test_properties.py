"""Randomized identities, seeded for reproducibility."""
import random
from fractions import Fraction as F

import pytest

from apps.ghm.services.exact_arith import ComplexRational, qbinomial, qpoch_finite
from apps.ghm.services.families.lommel import LommelParams, lommel_h_coeff
from apps.ghm.services.families.muntz import MuntzFamily
from apps.ghm.services.gram_engine import diagonal_rescale_inverse, recover_G
from apps.ghm.services.matrix_core import ExactMatrix, bareiss_det, exact_inverse, smallest_eigenvalue

pytestmark = pytest.mark.slow

CASES = 200


def rational(rng: random.Random, lo: int = -9, hi: int = 9) -> F:
    return F(rng.randint(lo, hi), rng.randint(1, 9))


def nonzero(rng: random.Random) -> F:
    while True:
        x = rational(rng)
        if x:
            return x


def unit_interval(rng: random.Random) -> F:
    den = rng.randint(2, 12)
    return F(rng.randint(1, den - 1), den)


def complex_value(rng: random.Random) -> ComplexRational:
    return ComplexRational(rational(rng), rational(rng))


def test_qpoch_functional_equation():
    rng = random.Random(1)
    for _ in range(CASES):
        a, q = rational(rng), nonzero(rng)
        m, k = rng.randint(0, 6), rng.randint(0, 6)
        assert qpoch_finite(a, q, m + k) == qpoch_finite(a, q, m) * qpoch_finite(a * q ** m, q, k)
        assert qpoch_finite(a, q, m + 1) == qpoch_finite(a, q, m) * (1 - a * q ** m)


def test_q_pascal():
    rng = random.Random(2)
    for _ in range(CASES):
        q = unit_interval(rng)
        m = rng.randint(2, 8)
        j = rng.randint(1, m - 1)
        assert qbinomial(m, j, q) == qbinomial(m - 1, j - 1, q) + q ** j * qbinomial(m - 1, j, q)


def test_lommel_rows_are_sign_aligned():
    rng = random.Random(3)
    for _ in range(CASES):
        p = LommelParams(unit_interval(rng), unit_interval(rng))
        assert all(
            lommel_h_coeff(ell, k, p.q, p.V) * (-1) ** (ell + k) > 0 for ell in range(5) for k in range(ell + 1)
        )


def _lower_triangular(rng: random.Random, size: int) -> ExactMatrix:
    def entry(j, k):
        if k > j:
            return ComplexRational(0)
        if k == j:
            return ComplexRational(nonzero(rng), rational(rng))
        return complex_value(rng)

    return ExactMatrix.from_function(size, entry)


def test_recover_G_round_trip():
    rng = random.Random(4)
    for _ in range(CASES):
        size = rng.randint(1, 3)
        alphas = rng.sample(range(0, 12), size)
        G = MuntzFamily([F(a, 3) for a in alphas]).matrix(size - 1)
        C = _lower_triangular(rng, size)
        assert recover_G(G @ C.conj_transpose(), C) == G


def test_diagonal_rescale_inverse():
    rng = random.Random(5)
    for _ in range(CASES):
        size = rng.randint(1, 3)
        X = ExactMatrix.from_function(size, lambda j, k: F(1, j + k + 1) + (rng.randint(1, 5) if j == k else 0))
        Y = exact_inverse(X)
        e = complex_value(rng) or ComplexRational(1)
        c = [nonzero(rng) for _ in range(size)]
        d = [ComplexRational(nonzero(rng), rational(rng)) for _ in range(size)]
        Xt = ExactMatrix.from_function(size, lambda j, k: X[j, k] * e * c[j] * d[k])
        assert Xt @ diagonal_rescale_inverse(Y, e, c, d) == ExactMatrix.identity(size)


def test_bareiss_det_is_multiplicative():
    rng = random.Random(6)
    for _ in range(CASES):
        size = rng.randint(1, 4)
        A = ExactMatrix.from_function(size, lambda j, k: rational(rng))
        B = ExactMatrix.from_function(size, lambda j, k: rational(rng))
        assert bareiss_det(A @ B) == bareiss_det(A) * bareiss_det(B)


def test_enclosure_of_diagonal_matrices():
    rng = random.Random(7)
    for _ in range(CASES):
        diag = [F(rng.randint(1, 40), rng.randint(1, 9)) for _ in range(rng.randint(1, 4))]
        enc = smallest_eigenvalue(ExactMatrix.diagonal(diag), 64)
        assert enc.contains(min(diag))
        assert enc.certifies_below(min(diag) * (1 - F(1, 2 ** 40)))
