"""Polynomial matrix tests: determinants, minors, alternation."""

from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from lgresolve.matrix import PolyMatrix
from lgresolve.poly import Polynomial, VarRegistry

REG = VarRegistry(["x", "y", "z"])


def _rand_poly(rng: random.Random, max_terms=3, max_exp=2) -> Polynomial:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        exp = tuple(rng.randint(0, max_exp) for _ in range(len(REG)))
        terms[exp] = rng.randint(-4, 4)
    return Polynomial(REG, {e: c for e, c in terms.items() if c})


def _rand_matrix(rng: random.Random, n: int) -> PolyMatrix:
    return PolyMatrix(
        REG, [[_rand_poly(rng) for _ in range(n)] for _ in range(n)]
    )


def test_bareiss_matches_cofactor():
    rng = random.Random(7)
    for _ in range(25):
        m = _rand_matrix(rng, rng.randint(1, 4))
        assert m.det(method="bareiss") == m.det(method="cofactor")


def test_det_alternation_and_linearity():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.randint(2, 4)
        m = _rand_matrix(rng, n)
        i, j = rng.sample(range(n), 2)
        rows = [list(r) for r in m.entries]
        rows[i], rows[j] = rows[j], rows[i]
        swapped = PolyMatrix(REG, rows)
        assert swapped.det() == -m.det()
        # repeated row kills the determinant
        rows = [list(r) for r in m.entries]
        rows[i] = list(rows[j])
        assert PolyMatrix(REG, rows).det().is_zero()


def test_det_multiplicative():
    rng = random.Random(13)
    for _ in range(10):
        n = rng.randint(1, 3)
        a, b = _rand_matrix(rng, n), _rand_matrix(rng, n)
        assert (a * b).det() == a.det() * b.det()


def test_identity_and_submatrix():
    ident = PolyMatrix.identity(REG, 4)
    assert ident.det() == Polynomial.const(REG, 1)
    sub = ident.submatrix([0, 2], [0, 2])
    assert sub.det() == Polynomial.const(REG, 1)
    assert ident.minor([0, 1], [0, 2]).is_zero()


def test_transpose_involution():
    rng = random.Random(17)
    m = _rand_matrix(rng, 3)
    assert m.transpose().transpose() == m
    assert m.transpose().det() == m.det()
