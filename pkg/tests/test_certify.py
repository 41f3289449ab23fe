"""Certification engine tests: piece contexts, unit minors, the
semistability / smoothness / normal-crossings drivers."""

from __future__ import annotations

from lgresolve.certify import (
    PieceContext,
    nc_intersection,
    semistable,
    smooth_center,
    unit_minor,
)
from lgresolve.chart import ChartPresentation
from lgresolve.groebner import Budget
from lgresolve.parse import parse_poly
from lgresolve.poly import Polynomial, VarRegistry

REG = VarRegistry(["x", "y", "z"])


def _model_chart(n: int, r: int, m: int) -> ChartPresentation:
    """The standard torsor: scaling l, monomial l*T1*...*Tr (= p), the
    exceptional exclusion keeping one of T_r..T_{r+m} invertible."""
    variables = [{"name": "l", "weights": [-1]}]
    for i in range(1, n + 1):
        w = 1 if r <= i <= r + m else 0
        variables.append({"name": f"T{i}", "weights": [w]})
    return ChartPresentation.from_json({
        "schema": 1,
        "name": f"model-{n}-{r}-{m}",
        "parent": None,
        "torus_rank": 1,
        "ambient_dim": n + 1,
        "variables": variables,
        "monomial": ["l"] + [f"T{i}" for i in range(1, r + 1)],
        "equations": [],
        "excluded": [[f"T{i}" for i in range(r, r + m + 1)]],
        "substitution": {},
        "fresh_scalings": ["l"],
    })


def test_semistable_model_sweep():
    for r in (1, 2, 3):
        for m in (1, 2, 3):
            for n in range(r + m, 7):
                chart = _model_chart(n, r, m)
                assert chart.validate() == []
                rep = semistable(chart, with_certificates=False)
                assert rep["status"] == "pass", (n, r, m, rep)


def test_semistable_rejects_non_model():
    bad = ChartPresentation.from_json({
        "schema": 1,
        "name": "BAD",
        "parent": None,
        "torus_rank": 1,
        "ambient_dim": 3,
        "variables": [
            {"name": "x", "weights": [-1]},
            {"name": "y", "weights": [0]},
            {"name": "z", "weights": [1]},
        ],
        "monomial": ["x", "y", "z"],
        "equations": ["z - x - y"],
        "excluded": [],
        "substitution": {},
        "fresh_scalings": [],
    })
    rep = semistable(bad)
    assert rep["status"] == "fail"
    obstructions = [pe.get("detail", "") for pe in rep["pieces"]
                    if pe["status"] == "fail"]
    assert obstructions and all(obstructions)


def test_piece_context_contradiction():
    x = Polynomial.variable(REG, "x")
    ctx = PieceContext(REG, [x, x - 1], [])
    assert ctx.contradictory()
    ctx = PieceContext(REG, [x], [])
    assert not ctx.contradictory()
    # inverting a generator of the ideal is contradictory
    ctx = PieceContext(REG, [x], [x])
    assert ctx.contradictory()


def test_piece_context_units():
    x, y, z = (Polynomial.variable(REG, n) for n in "xyz")
    ctx = PieceContext(REG, [], [x, y])
    f = -3 * x * x * y
    assert ctx.quick_unit(f)
    cert = ctx.product_unit_certificate(f)
    assert cert is not None and cert.verify()
    assert not ctx.quick_unit(z)
    # binomial closure: x*y - z with x, y inverted makes z a unit
    ctx = PieceContext(REG, [x * y - z], [x, y])
    assert ctx.quick_unit(z)


def test_reduces_to_zero_syntactic_path():
    x, y = (Polynomial.variable(REG, n) for n in "xy")
    g = x * y + y * y
    ctx = PieceContext(REG, [g], [])
    assert ctx.reduces_to_zero(-2 * g)
    assert ctx.reduces_to_zero(x * g)
    assert not ctx.reduces_to_zero(x)


def test_unit_minor_simple():
    x, y, z = (Polynomial.variable(REG, n) for n in "xyz")
    rows = [x * y - 1, z]
    ctx = PieceContext(REG, rows, [])
    rep = unit_minor(ctx, rows, ["x", "y", "z"], Budget())
    assert rep["status"] == "pass"
    # the bare-variable row z is pivoted syntactically, x*y - 1 by search
    total = len(rep["pivots"]) + len(rep.get("variable_pivots", []))
    assert total == 2
    assert "certificate" in rep or "minor_det" in rep


def test_unit_minor_refinement_branches():
    # no pivot is a unit outright: the search must split on x
    x, y = (Polynomial.variable(REG, n) for n in "xy")
    rows = [x * y]
    ctx = PieceContext(REG, rows, [])
    rep = unit_minor(ctx, rows, ["x", "y"], Budget(), with_certificate=False)
    # x*y cuts a reducible divisor; a smoothness certificate must fail
    assert rep["status"] == "fail"


def test_smooth_center_steps(charts, center_steps):
    for step in center_steps[:3]:
        rep = smooth_center(charts, step, with_certificates=True)
        assert rep["status"] == "pass", (step["step"], rep)
        for entry in rep["centers"]:
            assert entry["codimension"] >= 1


def test_smooth_center_step3_minor_entries(charts, center_steps):
    rep = smooth_center(charts, center_steps[2], with_certificates=True)
    entries = set()
    for center in rep["centers"]:
        for pe in center["pieces"]:
            for piv in pe.get("pivots", []):
                entries.add(piv["entry"])
    # the determinant relation row contributes the printed entries
    assert entries & {"a33_1", "-2*l1*a23_1", "a22_1"}


def test_nc_intersection_steps(charts, center_steps):
    for step in center_steps[:4]:
        rep = nc_intersection(charts, step)
        assert rep["status"] == "pass", (step["step"], rep)


def test_two_center_disjointness(charts, center_steps):
    step = center_steps[3]  # the double-center step
    assert len(step["centers"]) == 2
    rep = smooth_center(charts, step, with_certificates=False)
    assert rep["status"] == "pass"
    assert rep.get("disjoint") == "pass"
