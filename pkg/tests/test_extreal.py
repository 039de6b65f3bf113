import math

import pytest
from hypothesis import given, strategies as st

from adjrisk.extreal import (NEG_INF, POS_INF, ZERO, ExtReal, ext, ext_max, ext_mul_indicator,
                             ext_sub, format_ext, parse_ext)

finite = st.floats(-1e12, 1e12, allow_nan=False)


def test_inf_minus_inf_is_minus_inf():
    assert ext_sub(POS_INF, POS_INF) == NEG_INF
    assert (POS_INF - POS_INF).is_neg_inf


def test_finite_minus_inf():
    assert ext_sub(3.0, POS_INF) == NEG_INF
    assert ext_sub(3.0, NEG_INF) == POS_INF
    assert ext_sub(POS_INF, 3.0) == POS_INF


def test_neg_inf_minus_neg_inf_raises():
    with pytest.raises(ArithmeticError):
        ext_sub(NEG_INF, NEG_INF)


def test_indicator_product():
    assert ext_mul_indicator(POS_INF, 0) == ZERO
    assert ext_mul_indicator(POS_INF, 1) == POS_INF
    assert ext_mul_indicator(2.5, 0) == 0.0
    with pytest.raises(ValueError):
        ext_mul_indicator(1.0, 2)


def test_nan_rejected():
    with pytest.raises(ValueError):
        ExtReal(float("nan"))


def test_immutable():
    x = ext(1.0)
    with pytest.raises(AttributeError):
        x._v = 2.0


def test_ordering_and_max():
    assert NEG_INF < ext(-1e300) < ZERO < ext(1e300) < POS_INF
    assert ext_max([1.0, NEG_INF, 3.0]) == 3.0
    assert ext_max([NEG_INF, NEG_INF]).is_neg_inf
    with pytest.raises(ValueError):
        ext_max([])


@given(finite, finite)
def test_sub_matches_floats(a, b):
    assert float(ext_sub(a, b)) == a - b


@given(finite)
def test_format_parse_roundtrip(a):
    assert parse_ext(format_ext(a)) == a


def test_format_tokens():
    assert format_ext(POS_INF) == "inf"
    assert format_ext(NEG_INF) == "-inf"
    assert format_ext(1 / 3, 10) == "0.3333333333"
    assert parse_ext("-inf").is_neg_inf and parse_ext(" Inf ").is_pos_inf
    assert math.isinf(float(parse_ext("infinity")))
