"""Parser / pretty-printer tests, including the round-trip property."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lgresolve.parse import ParseError, format_poly, parse_poly
from lgresolve.poly import Polynomial, VarRegistry

REG = VarRegistry(["l0", "l1", "a23_1", "P1", "x"])


@st.composite
def polys(draw, max_terms=5, max_exp=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = tuple(draw(st.integers(0, max_exp)) for _ in range(len(REG)))
        terms[exp] = draw(
            st.fractions(min_value=-9, max_value=9, max_denominator=6)
        )
    return Polynomial(REG, terms)


@given(polys())
def test_roundtrip(f):
    assert parse_poly(format_poly(f), REG) == f


def test_basic_forms():
    x = Polynomial.variable(REG, "x")
    cases = {
        "0": Polynomial.zero(REG),
        "1": Polynomial.const(REG, 1),
        "-x": -x,
        "x^3": x ** 3,
        "2*x + 1": 2 * x + 1,
        "(x + 1)^2": (x + 1) ** 2,
        "x - (x - 1)": Polynomial.const(REG, 1),
        "1/2*x": Polynomial.const(REG, Fraction(1, 2)) * x,
    }
    for text, expect in cases.items():
        assert parse_poly(text, REG) == expect, text


def test_precedence():
    got = parse_poly("-2*l1*a23_1^2", REG)
    l1 = Polynomial.variable(REG, "l1")
    a = Polynomial.variable(REG, "a23_1")
    assert got == -2 * l1 * a * a


def test_format_is_canonical():
    f = parse_poly("a23_1*l1 + l1*a23_1 + x", REG)
    g = parse_poly("x + 2*l1*a23_1", REG)
    assert format_poly(f) == format_poly(g)


def test_errors_carry_positions():
    with pytest.raises(ParseError) as err:
        parse_poly("x + unknown_var", REG)
    assert err.value.pos >= 4

    for bad in ("x +", "x ^", "((x)", "x ** 2", ""):
        with pytest.raises(ParseError):
            parse_poly(bad, REG)
