"""Every closed form against its oracle over the parameter grids."""
from fractions import Fraction as F
from itertools import product

import pytest

from apps.ghm.main import RunConfig, exit_code, run_verify
from apps.ghm.services.exact_arith import ComplexRational
from apps.ghm.services.matrix_core import ExactMatrix

H = F(1, 2)
I = ComplexRational(0, 1)

MUNTZ_REAL = [
    tuple(range(7)),
    (0, H, 1, F(3, 2), 2, F(5, 2), 3),
    (F(1, 3), 1, F(5, 3), F(7, 3), 3, F(11, 3), F(13, 3)),
]
MUNTZ_COMPLEX = [
    (0, I, 1, 1 - I, 2, 2 + I, 3),
    (H, 1 + H * I, 2 - I, 3, 4 + 2 * I, 5, 6 - H * I),
]
GMUNTZ = [
    ((-H, -H, 0), tuple(range(7))),
    ((-1, 0, 1), tuple(range(1, 8))),
    ((-2, -1, 1), tuple(range(7))),
]
GRID = (F(1, 3), H, F(2, 3))
LOMMEL = list(product(GRID, repeat=2))
ASKEY = list(product((F(1, 5), H, F(2, 3)), repeat=3))
HILBERT_DETS = {0: 1, 1: F(1, 12), 2: F(1, 2160)}


def verify(family, n, **params):
    report = run_verify(RunConfig(family=family, command="verify", n=n, **params))
    assert report.errors == []
    assert report.det_match is True
    assert report.inverse_match is True
    assert report.bounds_certified is not False
    failed = [name for name, ok in report.checks.items() if not ok]
    assert failed == []
    assert exit_code(report) == 0
    return report


def orders(fast: int, slow: int = 6):
    return list(range(fast + 1)) + [pytest.param(n, marks=pytest.mark.slow) for n in range(fast + 1, slow + 1)]


@pytest.mark.parametrize("n", orders(3))
@pytest.mark.parametrize("alphas", MUNTZ_REAL + MUNTZ_COMPLEX)
def test_muntz(alphas, n):
    verify("muntz", n, alphas=tuple(ComplexRational(0) + a for a in alphas))


@pytest.mark.parametrize("n", orders(3))
@pytest.mark.parametrize("abc, alphas", GMUNTZ)
def test_gmuntz(abc, alphas, n):
    a, b, c = (F(x) for x in abc)
    report = verify("gmuntz", n, a=a, b=b, c=c, alphas=tuple(ComplexRational(x) for x in alphas))
    assert report.bounds["closed"].certified


@pytest.mark.parametrize("n", orders(2))
@pytest.mark.parametrize("q, V", LOMMEL)
def test_lommel(q, V, n):
    report = verify("lommel", n, q=q, V=V)
    assert report.bounds["corollary"].exact == report.bounds["closed"].exact


@pytest.mark.parametrize("n", orders(2))
@pytest.mark.parametrize("alpha, beta, q", ASKEY)
def test_askey(alpha, beta, q, n):
    report = verify("askey", n, alpha=alpha, beta=beta, q=q)
    assert report.bounds["corollary"].exact == report.bounds["closed"].exact


@pytest.mark.parametrize("n", orders(3))
def test_synthetic(n):
    connection = ((2,), (I, 3), (0, H, -1), (1, 0, 0, 4), (0, 0, 0, 0, 5), (0, 0, 0, 0, 0, 6), (0, 0, 0, 0, 0, 0, 7))
    rows = tuple(tuple(ComplexRational(0) + x for x in row) for row in connection)
    verify("synthetic", n, alphas=tuple(ComplexRational(k) for k in range(7)), connection=rows)


def test_errata_grid_reports_printed_forms():
    report = run_verify(RunConfig(family="lommel", command="verify", n=2, q=H, V=H, printed_formulas=True))
    assert {e.name for e in report.errata} == {"lommel.det", "lommel.inverse", "lommel.bound"}
    assert exit_code(report) == 0


@pytest.mark.parametrize("n", range(8))
def test_hilbert_reproduction(n):
    report = verify("muntz", n, alphas=tuple(ComplexRational(k) for k in range(8)))
    assert report.entries == ExactMatrix.from_function(n + 1, lambda j, k: F(1, j + k + 1))
    if n in HILBERT_DETS:
        assert report.det_closed == HILBERT_DETS[n]
