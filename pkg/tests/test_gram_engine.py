from fractions import Fraction as F

import pytest

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
from apps.ghm.services.exact_arith import ComplexRational
from apps.ghm.services.families.muntz import MuntzParams, muntz_system
from apps.ghm.services.families.synthetic import SyntheticParams, synthetic_system
from apps.ghm.services.gram_engine import (
    Erratum,
    GramReport,
    OrthoSystemSpec,
    build_A,
    build_G,
    build_H,
    cd_bound,
    closed_dets,
    connection_matrix,
    corollary_bound,
    determinantal_system,
    diagonal_rescale_inverse,
    gram_inverse,
    kronecker,
    lower_bound,
    recover_G,
    sign_aligned,
    theorem_bounds,
)
from apps.ghm.services.matrix_core import ExactMatrix, exact_inverse, smallest_eigenvalue
from tests.conftest import hilbert, mat

I = ComplexRational(0, 1)


def legendre(size: int) -> OrthoSystemSpec:
    return muntz_system(MuntzParams(tuple(range(size))))


def test_kronecker():
    assert kronecker(2, 2) == 1
    assert kronecker(2, 1) == 0


def test_system_validation():
    with pytest.raises(ParameterError):
        OrthoSystemSpec(name="x", acoef=kronecker, d2=lambda n: 1, bcoef=kronecker)
    with pytest.raises(ParameterError):
        OrthoSystemSpec(name="x", acoef=kronecker, d2=lambda n: 1, same_uv=False)


def test_check_order():
    sys = legendre(2)
    with pytest.raises(GeneratorUnavailable):
        build_H(sys, 2)
    with pytest.raises(IndexOutOfRange):
        build_H(sys, -1)


def test_identity_system():
    sys = OrthoSystemSpec(name="unit", acoef=kronecker, d2=lambda n: 1)
    assert build_H(sys, 3) == ExactMatrix.identity(4)
    assert closed_dets(sys, 3).det_g == 1


def test_build_A_legendre():
    A = build_A(legendre(2), 1)
    assert A.core == mat([[1, 0], [-1, 2]])
    assert A.d2 == (1, 3)


def test_build_H_reproduces_hilbert():
    for size in range(1, 6):
        assert build_H(legendre(size), size - 1) == hilbert(size)


def test_gram_inverse_matches_exact_inverse():
    assert gram_inverse(legendre(2), 1) == mat([[4, -6], [-6, 12]])
    assert gram_inverse(legendre(4), 3) == exact_inverse(hilbert(4))


def test_closed_dets_legendre():
    dets = closed_dets(legendre(3), 2)
    assert dets.det_g == F(1, 2160)
    assert dets.det_h == F(1, 2160)
    assert dets.det_c == 1


def test_non_identity_connection():
    params = SyntheticParams((0, 1, 2))
    sys = synthetic_system(params)
    H = build_H(sys, 2)
    C = connection_matrix(sys, 2)
    dets = closed_dets(sys, 2)
    assert dets.det_c == 2 * 3 * 4
    assert dets.det_h == dets.det_g * 24
    assert recover_G(H, C) == hilbert(3)
    assert build_G(sys, 2) == hilbert(3)
    assert gram_inverse(sys, 2) == exact_inverse(H)


def test_recover_G_order_mismatch():
    with pytest.raises(ParameterError):
        recover_G(hilbert(2), ExactMatrix.identity(3))


def test_diagonal_rescale_inverse():
    X = hilbert(3)
    Y = exact_inverse(X)
    e, c, d = F(2), [1, 3, I], [2, F(1, 5), -1]
    Xt = ExactMatrix.from_function(3, lambda j, k: X[j, k] * e * c[j] * d[k])
    assert Xt @ diagonal_rescale_inverse(Y, e, c, d) == ExactMatrix.identity(3)
    with pytest.raises(ZeroScaleFactor):
        diagonal_rescale_inverse(Y, e, [1, 0, 1], d)
    with pytest.raises(ZeroScaleFactor):
        diagonal_rescale_inverse(Y, 0, c, d)
    with pytest.raises(ParameterError):
        diagonal_rescale_inverse(Y, e, [1, 2], d)


def test_determinantal_system_reproduces_matrix():
    G = hilbert(4)
    dsys = determinantal_system(G)
    assert build_H(dsys, 3) == G
    A, D = build_A(legendre(4), 3), build_A(dsys, 3)
    for ell in range(4):
        assert D.d2[ell] * D[ell, ell].abs2() == A.d2[ell] * A[ell, ell].abs2()


def test_determinantal_system_complex():
    G = ExactMatrix([[2, I], [-I, 2]])
    assert build_H(determinantal_system(G), 1) == G


def test_determinantal_system_rejects():
    with pytest.raises(NotHermitian):
        determinantal_system(mat([[1, 2], [3, 4]]))
    with pytest.raises(NotPositiveDefinite):
        determinantal_system(mat([[0, 1], [1, 0]]))


# === Bounds ===

def test_theorem_bounds_hilbert2():
    b1, b2 = theorem_bounds(legendre(2), 1, 256)
    assert b1.exact == F(1, 16)
    assert b2.exact == F(1, 28)
    assert b1.certified and b2.certified
    assert b1.value.to_fraction() <= F(1, 16)
    enc = smallest_eigenvalue(hilbert(2), 256)
    assert b1.holds_for(enc) and b2.holds_for(enc)


def test_theorem_bounds_need_u_equal_v():
    with pytest.raises(NotApplicable):
        theorem_bounds(synthetic_system(SyntheticParams((0, 1))), 1, 256)


def test_theorem_bounds_need_positive_scales():
    sys = OrthoSystemSpec(name="indef", acoef=kronecker, d2=lambda n: -1 if n else 1)
    with pytest.raises(NotPositiveDefinite):
        theorem_bounds(sys, 1, 128)


def test_corollary_bound_at_minus_one():
    b = corollary_bound(legendre(2), 1, -1, 256)
    assert b.exact == F(1, 28)
    assert b.certified


def test_corollary_bound_misaligned_warns():
    with pytest.warns(SignAlignmentWarning):
        b = corollary_bound(legendre(2), 1, 1, 256)
    assert not b.certified
    assert "not aligned" in b.note
    # |p_1(1)|^2 = 1 at z0 = 1
    assert b.exact == F(1, 4)


def test_corollary_bound_needs_unit_modulus():
    with pytest.raises(InvalidModulus):
        corollary_bound(legendre(2), 1, 2, 128)
    # 3/5 + 4/5 i is unimodular
    with pytest.warns(SignAlignmentWarning):
        b = corollary_bound(legendre(2), 1, ComplexRational(F(3, 5), F(4, 5)), 128)
    assert not b.certified


def test_cd_bound_agrees_with_corollary():
    sys = legendre(6)
    for n in range(5):
        cd = cd_bound(sys, n, -1, 256)
        cor = corollary_bound(sys, n, -1, 256)
        assert cd.exact == cor.exact
    assert cd_bound(sys, 0, -1, 256).exact == 1


def test_cd_bound_requires_polynomial_basis():
    sys = muntz_system(MuntzParams((0, F(1, 2), 2)))
    with pytest.raises(NotApplicable):
        cd_bound(sys, 1, -1, 128)


def test_cd_bound_requires_real_point():
    with pytest.raises(NotApplicable):
        cd_bound(legendre(3), 1, I, 128)


def test_cd_bound_needs_next_order():
    with pytest.raises(GeneratorUnavailable):
        cd_bound(legendre(2), 1, -1, 128)


def test_lower_bound_denominator():
    with pytest.raises(ZeroDenominator):
        lower_bound(F(0), 128)
    b = lower_bound(F(3), 128)
    assert b.exact == F(1, 3)
    assert b.value.to_fraction() <= F(1, 3)


@pytest.mark.parametrize("values, expected", [
    ([1, 2, 0, 3], True),
    ([0, -1, -F(1, 2)], True),
    ([1, -1], False),
    ([ComplexRational(1, 1), ComplexRational(2, 2)], True),
    ([I, 1], False),
    ([], True),
])
def test_sign_aligned(values, expected):
    assert sign_aligned(values) is expected


# === Report flags ===

def test_report_flags():
    report = GramReport(family="muntz", n=1, prec=256)
    assert report.ok
    report.det_closed, report.det_oracle = ComplexRational(F(1, 12)), ComplexRational(F(1, 12))
    assert report.det_match and report.ok
    report.det_closed = ComplexRational(F(1, 13))
    assert report.det_match is False
    assert not report.ok


def test_report_bounds_certified():
    report = GramReport(family="muntz", n=1, prec=256)
    assert report.bounds_certified is None
    report.bounds["b2"] = lower_bound(F(28), 256)
    report.bounds["cd"] = None
    report.enclosure = smallest_eigenvalue(hilbert(2), 256)
    assert report.bounds_certified is True
    report.bounds["b1"] = lower_bound(F(1), 256)
    assert report.bounds_certified is False


def test_errata_do_not_fail_the_report():
    report = GramReport(family="lommel", n=1, prec=256)
    report.errata.append(Erratum("x", "1", "2", False))
    assert report.ok
