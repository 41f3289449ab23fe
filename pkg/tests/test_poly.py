"""Property tests for the exact polynomial arithmetic core."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgresolve.poly import (
    Polynomial,
    VarRegistry,
    exact_div,
    poly_sum,
    try_exact_div,
)

REG = VarRegistry(["x", "y", "z"])


def _coeffs():
    return st.fractions(
        min_value=-5, max_value=5, max_denominator=4
    )


@st.composite
def polys(draw, max_terms=4, max_exp=3):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = tuple(draw(st.integers(0, max_exp)) for _ in range(len(REG)))
        terms[exp] = draw(_coeffs())
    return Polynomial(REG, terms)


@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + Polynomial.zero(REG) == f
    assert f * Polynomial.const(REG, 1) == f
    assert f - f == Polynomial.zero(REG)


@given(polys(), polys())
def test_leibniz_rule(f, g):
    for name in REG.names:
        lhs = (f * g).derivative(name)
        rhs = f.derivative(name) * g + f * g.derivative(name)
        assert lhs == rhs


@given(polys(), polys())
def test_exact_division_roundtrip(f, g):
    if g.is_zero():
        return
    assert exact_div(f * g, g) == f
    got = try_exact_div(f * g, g)
    assert got == f


@given(polys(), polys())
def test_try_exact_div_is_sound(f, g):
    if g.is_zero():
        return
    q = try_exact_div(f, g)
    if q is not None:
        assert q * g == f


@given(polys())
def test_content_and_primitive(f):
    c, prim = f.content_and_primitive()
    assert Polynomial.const(REG, c) * prim == f
    if not f.is_zero():
        assert c != 0
        # primitive part has integer coefficients with unit content
        denominators = [t.denominator for t in prim.terms.values()]
        numerators = [t.numerator for t in prim.terms.values()]
        assert all(d == 1 for d in denominators)
        from math import gcd
        g = 0
        for n in numerators:
            g = gcd(g, abs(n))
        assert g == 1


@given(polys())
def test_evaluate_is_a_ring_map(f):
    point = {"x": Fraction(2), "y": Fraction(-1, 2), "z": Fraction(3)}
    g = Polynomial.variable(REG, "x") + Polynomial.const(REG, 1)
    assert (f * g).evaluate(point) == f.evaluate(point) * g.evaluate(point)
    assert (f + g).evaluate(point) == f.evaluate(point) + g.evaluate(point)


@given(polys())
def test_substitute_identity(f):
    sigma = {n: Polynomial.variable(REG, n) for n in REG.names}
    assert f.substitute(sigma) == f


@given(st.lists(polys(), max_size=5))
def test_poly_sum_matches_fold(fs):
    acc = Polynomial.zero(REG)
    for f in fs:
        acc = acc + f
    assert poly_sum(fs, REG) == acc


def test_degree_and_leading():
    f = Polynomial.variable(REG, "x") ** 3 + Polynomial.variable(REG, "y")
    assert f.total_degree() == 3
    assert f.degree_in("x") == 3
    assert f.degree_in("z") == 0
    exp, coeff = f.leading()
    assert exp == (3, 0, 0) and coeff == 1


def test_map_registry_roundtrip():
    big = REG.extend(["w"])
    f = Polynomial.variable(REG, "x") * 2 + Polynomial.variable(REG, "y")
    lifted = f.map_registry(big)
    assert lifted.variables() == ("x", "y")
    back = lifted.map_registry(REG)
    assert back == f


def test_exact_div_rejects_inexact():
    x = Polynomial.variable(REG, "x")
    y = Polynomial.variable(REG, "y")
    assert try_exact_div(x + y, x) is None
    with pytest.raises(ValueError):
        exact_div(x + y, x)
