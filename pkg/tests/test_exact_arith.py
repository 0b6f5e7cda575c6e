from fractions import Fraction as F

import pytest

from apps.ghm.services.errors import (
    IndexOutOfRange,
    MalformedRational,
    NonConvergent,
    ParameterError,
    PrecisionError,
    ZeroDenominator,
)
from apps.ghm.services.exact_arith import (
    ROUND_CEILING,
    ROUND_FLOOR,
    BigFloat,
    ComplexRational,
    complex_abs2,
    decimal_digits,
    format_complex,
    format_rational,
    modulus_upper,
    parse_complex,
    parse_rational,
    qbinomial,
    qhyper_terminating,
    qpoch_finite,
    qpoch_infinite,
    qpoch_multi,
    reciprocal_lower,
)


# === Text formats ===

@pytest.mark.parametrize("text, expected", [
    ("3/4", F(3, 4)),
    ("-7", F(-7)),
    ("6/4", F(3, 2)),
    (" 1/3 ", F(1, 3)),
    ("−1/2", F(-1, 2)),
])
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("text", ["1/0", "abc", "1.5", "", "1//2", "--1"])
def test_parse_rational_rejects(text):
    with pytest.raises(MalformedRational):
        parse_rational(text)


def test_format_rational():
    assert format_rational(F(4, 2)) == "2"
    assert format_rational(F(-1, 3)) == "-1/3"
    assert format_rational(0) == "0"


@pytest.mark.parametrize("text, re, im", [
    ("1/2", F(1, 2), 0),
    ("1/2-3i", F(1, 2), -3),
    ("0+1/2i", 0, F(1, 2)),
    ("i", 0, 1),
    ("-2i", 0, -2),
    ("-1+i", -1, 1),
])
def test_parse_complex(text, re, im):
    z = parse_complex(text)
    assert (z.re, z.im) == (F(re), F(im))


def test_complex_text_roundtrip():
    for z in (ComplexRational(1, -3), ComplexRational(F(-2, 5), F(7, 3)), ComplexRational(4)):
        assert parse_complex(format_complex(z)) == z
    assert str(ComplexRational(1, -3)) == "1-3i"
    assert str(ComplexRational(F(1, 2))) == "1/2"


def test_complex_malformed():
    with pytest.raises(MalformedRational):
        parse_complex("1+2j")
    with pytest.raises(MalformedRational):
        parse_complex("1/0+i")


# === ComplexRational ===

def test_complex_field_operations():
    z = ComplexRational(1, 2)
    w = ComplexRational(3, -1)
    assert z + w == ComplexRational(4, 1)
    assert z * w == ComplexRational(5, 5)
    assert (z * w) / w == z
    assert z.conjugate() == ComplexRational(1, -2)
    assert z.abs2() == 5
    assert z ** 2 == ComplexRational(-3, 4)
    assert z ** -1 == ComplexRational(F(1, 5), F(-2, 5))
    assert 1 - z == ComplexRational(0, -2)
    assert F(1, 2) * z == ComplexRational(F(1, 2), 1)


def test_complex_real_equality_and_hash():
    assert ComplexRational(3) == 3
    assert ComplexRational(F(1, 2)) == F(1, 2)
    assert hash(ComplexRational(F(1, 2))) == hash(F(1, 2))
    assert ComplexRational(0, 1) != 0
    assert not ComplexRational(0)


def test_complex_real_value():
    assert ComplexRational(F(2, 3)).real_value() == F(2, 3)
    with pytest.raises(ParameterError):
        ComplexRational(1, 1).real_value()


def test_complex_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ComplexRational(1, 1) / 0


def test_complex_abs2_accepts_plain_numbers():
    assert complex_abs2(ComplexRational(F(3, 5), F(-4, 5))) == 1
    assert complex_abs2(F(-2, 3)) == F(4, 9)
    assert complex_abs2(2) == 4


# === q-series ===

def test_qpoch_finite_values():
    q = F(1, 2)
    assert qpoch_finite(q, q, 0) == 1
    assert qpoch_finite(q, q, 2) == F(3, 8)
    assert qpoch_finite(F(1, 4), q, 3) == F(3, 4) * F(7, 8) * F(15, 16)
    assert qpoch_finite(1, q, 5) == 0
    assert qpoch_finite(F(1, 2), q, 3) == F(21, 64)
    assert qpoch_finite(2, q, 2) == 0
    assert qpoch_finite(1, F(2, 3), 1) == 0


def test_qpoch_finite_keeps_complex_type():
    z = qpoch_finite(ComplexRational(0, 1), F(1, 2), 2)
    assert isinstance(z, ComplexRational)
    assert z == (1 - ComplexRational(0, 1)) * (1 - ComplexRational(0, F(1, 2)))


def test_qpoch_negative_length():
    with pytest.raises(IndexOutOfRange):
        qpoch_finite(F(1, 2), F(1, 2), -1)


def test_qpoch_multi():
    q = F(1, 3)
    assert qpoch_multi((q, F(1, 2)), q, 2) == qpoch_finite(q, q, 2) * qpoch_finite(F(1, 2), q, 2)


def test_qbinomial():
    q = F(1, 2)
    assert qbinomial(2, 1, q) == F(3, 2)
    assert qbinomial(4, 0, q) == 1
    assert qbinomial(4, 4, q) == 1
    assert qbinomial(3, 1, q) == 1 + q + q * q
    assert qbinomial(2, 1, F(1, 3)) == F(4, 3)
    assert qbinomial(4, 2, q) == F(35, 16)


@pytest.mark.parametrize("m", range(7))
def test_qbinomial_symmetry(m):
    q = F(2, 5)
    for j in range(m + 1):
        assert qbinomial(m, j, q) == qbinomial(m, m - j, q)


def test_qbinomial_errors():
    with pytest.raises(IndexOutOfRange):
        qbinomial(2, 3, F(1, 2))
    with pytest.raises(ParameterError):
        qbinomial(2, 1, 0)
    with pytest.raises(ParameterError):
        qbinomial(2, 1, 1)


def test_qhyper_terminating_finite_geometric():
    # 1phi0(q^-2; ; q, z) terminates after three terms
    q = F(1, 2)
    z = F(1, 3)
    expected = sum(
        (qpoch_finite(q ** -2, q, k) / qpoch_finite(q, q, k) * z ** k * ((-1) ** k * q ** (k * (k - 1) // 2)) ** 0
         for k in range(3)),
        F(0),
    )
    # 1 + s - r = 0 for r = 1, s = 0 as well, so no twist
    assert qhyper_terminating((q ** -2,), (), q, z, 3) == expected


def test_qhyper_twist_for_extra_lower_parameter():
    # r = 1, s = 1: every term carries (-1)^k q^{k(k-1)/2}
    q = F(1, 3)
    a, b, z = F(1, 5), F(2, 7), F(1, 2)
    expected = F(0)
    for k in range(4):
        expected += (
            qpoch_finite(a, q, k) / (qpoch_finite(q, q, k) * qpoch_finite(b, q, k))
            * z ** k * (-1) ** k * q ** (k * (k - 1) // 2)
        )
    assert qhyper_terminating((a,), (b,), q, z, 4) == expected


def test_qhyper_zero_denominator():
    q = F(1, 2)
    with pytest.raises(ZeroDenominator):
        qhyper_terminating((q ** -1,), (1,), q, 1, 2)


# === Big floats ===

def test_precision_floor():
    with pytest.raises(PrecisionError):
        BigFloat.from_rational(1, 63)
    assert decimal_digits(256) == 78


def test_directed_rounding_brackets_the_rational():
    r = F(1, 3)
    lo = BigFloat.from_rational(r, 64, ROUND_FLOOR)
    hi = BigFloat.from_rational(r, 64, ROUND_CEILING)
    assert lo.to_fraction() < r < hi.to_fraction()
    assert lo < r < hi


def test_bigfloat_arithmetic():
    a = BigFloat.from_rational(F(1, 4), 128)
    b = BigFloat.from_rational(F(3, 4), 128)
    assert a + b == 1
    assert (b - a).to_fraction() == F(1, 2)
    assert (a * 4) == 1
    assert 1 / a == 4
    assert BigFloat.from_rational(F(9, 4), 128).sqrt() == F(3, 2)
    with pytest.raises(ZeroDivisionError):
        a / 0
    with pytest.raises(ParameterError):
        (-a).sqrt()


def test_bigfloat_str_digits():
    x = BigFloat.from_rational(F(1, 3), 64)
    assert str(x).startswith("0.33333333333333333")


def test_reciprocal_lower_rounds_down():
    for den in (F(3), F(7, 2), F(28)):
        assert reciprocal_lower(den, 128).to_fraction() <= 1 / den
    with pytest.raises(ParameterError):
        reciprocal_lower(0, 128)


def test_modulus_upper():
    assert modulus_upper(F(9, 4), 64) == F(3, 2)
    r = modulus_upper(F(2), 128)
    assert r * r >= 2
    assert r * r - 2 < F(1, 2 ** 100)
    with pytest.raises(ParameterError):
        modulus_upper(F(-1), 64)


def test_qpoch_infinite():
    # (1/2; 1/2)_oo = 0.288788095086602421278899721929...
    prec = 256
    value = qpoch_infinite(F(1, 2), F(1, 2), F(1, 2 ** prec), prec)
    assert abs(value.to_fraction() - F(288788095086602421278899721929, 10 ** 30)) < F(1, 10 ** 29)
    assert qpoch_infinite(0, F(1, 2), F(1, 2 ** 64), 64) == 1
    assert qpoch_infinite(1, F(1, 2), F(1, 10 ** 6), 64) == 0


def test_qpoch_infinite_tightening_eps_agrees():
    coarse = qpoch_infinite(F(1, 3), F(1, 2), F(1, 2 ** 40), 256).to_fraction()
    fine = qpoch_infinite(F(1, 3), F(1, 2), F(1, 2 ** 120), 256).to_fraction()
    assert coarse != fine
    assert abs(coarse - fine) <= fine / 2 ** 39


def test_qpoch_infinite_needs_q_below_one():
    with pytest.raises(NonConvergent):
        qpoch_infinite(F(1, 2), 1, F(1, 2 ** 64), 64)
    with pytest.raises(NonConvergent):
        qpoch_infinite(F(1, 2), F(-1, 2), F(1, 2 ** 64), 64)
