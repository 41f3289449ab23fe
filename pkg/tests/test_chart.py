"""Chart presentation, blow-up replay, and covering tests."""

from __future__ import annotations

import pytest

from lgresolve.chart import (
    BlowupCenter,
    ChartPresentation,
    blowup_step,
    charts_equivalent,
    check_step,
    covering_check,
    dedup_groups,
    exclusion_pieces,
    load_elements,
    pullback_check,
    replay_step,
    total_substitution,
)
from lgresolve.parse import format_poly, parse_poly
from lgresolve.poly import Polynomial

AMBIENT_DIMS = {"T0": 8, "T1": 9, "T2": 11, "T3": 15, "T4": 16, "T5": 18}


def test_validate_all(charts):
    for name, chart in charts.items():
        assert chart.validate() == [], name


def test_ambient_dimensions(charts):
    for name, want in AMBIENT_DIMS.items():
        assert charts[name].ambient_dim == want, name


def test_monomial_is_squarefree(charts):
    # distinct monomial variables <=> the special fiber divisor is
    # reduced as a monomial divisor
    for name, chart in charts.items():
        assert len(set(chart.monomial)) == len(chart.monomial), name


def test_exclusion_cover_sizes(charts):
    sizes = {
        name: len(exclusion_pieces(chart)) for name, chart in charts.items()
    }
    assert sizes["L0"] == 1
    assert sizes["T5"] == 192
    for name, chart in charts.items():
        want = 1
        for grp in dedup_groups(chart.excluded):
            want *= len(grp)
        assert sizes[name] == want, name


def test_pullbacks(charts):
    for name, chart in charts.items():
        if chart.parent is None:
            continue
        rep = pullback_check(chart, charts[chart.parent])
        assert rep["status"] == "pass", (name, rep)


def test_total_substitution_composes(charts):
    tau = total_substitution(charts, "T2", "L0")
    assert set(tau) == set(charts["L0"].registry.names)
    # composing the single steps by hand gives the same answer
    t2, t1 = charts["T2"], charts["T1"]
    step = {
        v: p.substitute(dict(t2.substitution), target=t2.registry)
        for v, p in t1.substitution.items()
    }
    t0 = charts["T0"]
    for v, p in t0.substitution.items():
        img = p.substitute(step, target=t2.registry)
        assert img == tau[v], v


def test_replay_step_reproduces_shipped(charts, center_steps):
    rep = check_step(charts, center_steps[1])  # step 2: T0 -> T1
    assert rep["status"] == "pass", rep


def test_model_chart_blowup():
    """Blowing the standard local model up along a coordinate center
    reproduces the explicit torsor: t_i -> l*T_i on the center, one new
    scaling slot, and the exceptional exclusion group."""
    base = ChartPresentation.from_json({
        "schema": 1,
        "name": "model",
        "parent": None,
        "torus_rank": 0,
        "ambient_dim": 4,
        "variables": [
            {"name": "t1", "weights": []},
            {"name": "t2", "weights": []},
            {"name": "t3", "weights": []},
            {"name": "t4", "weights": []},
        ],
        "monomial": ["t1", "t2"],  # t1*t2 = p
        "equations": [],
        "excluded": [],
        "substitution": {},
        "fresh_scalings": [],
    })
    center = BlowupCenter(
        scaling="l",
        generators=(
            Polynomial.variable(base.registry, "t2"),
            Polynomial.variable(base.registry, "t3"),
        ),
        replacements=("T2", "T3"),
    )
    child = blowup_step(base, center, name="model-blowup")
    assert child.validate() == []
    assert child.torus_rank == 1
    assert set(child.registry.names) == {"l", "T2", "T3", "t1", "t4"}
    # substitution: center variables gain the scaling, others unchanged
    assert format_poly(child.substitution["t2"]) == "l*T2"
    assert format_poly(child.substitution["t3"]) == "l*T3"
    assert format_poly(child.substitution["t1"]) == "t1"
    # the uniformizer factors through the exceptional scaling
    assert tuple(child.monomial) == ("t1", "l", "T2")
    # the exceptional locus keeps one replacement invertible
    assert any(
        tuple(format_poly(g) for g in grp) == ("T2", "T3")
        for grp in child.excluded
    )
    # weights: the new slot scales the divided variables against l
    wmap = child.weight_map()
    assert wmap["l"] == (-1,)
    assert wmap["T2"] == (1,) and wmap["T3"] == (1,)
    assert wmap["t1"] == (0,) and wmap["t4"] == (0,)


def test_blowup_rejects_center_off_the_fiber():
    base = ChartPresentation.from_json({
        "schema": 1,
        "name": "model",
        "parent": None,
        "torus_rank": 0,
        "ambient_dim": 2,
        "variables": [{"name": "t1", "weights": []},
                      {"name": "t2", "weights": []}],
        "monomial": ["t1"],
        "equations": [],
        "excluded": [],
        "substitution": {},
        "fresh_scalings": [],
    })
    center = BlowupCenter(
        scaling="l",
        generators=(Polynomial.variable(base.registry, "t2"),),
        replacements=("T2",),
    )
    with pytest.raises(ValueError):
        blowup_step(base, center)


def test_charts_equivalent_detects_mutation(charts, center_steps):
    step = center_steps[0]  # step 1: L0 -> T0
    replayed = replay_step(charts, step)
    shipped = charts[step["child"]]
    good = charts_equivalent(replayed, shipped, step.get("match_rescale"))
    assert good["status"] == "pass"
    # mutate one shipped equation set: drop an exclusion group
    mutated = ChartPresentation(
        name=shipped.name,
        parent=shipped.parent,
        registry=shipped.registry,
        torus_rank=shipped.torus_rank,
        weights=shipped.weights,
        monomial=shipped.monomial,
        equations=shipped.equations + (
            Polynomial.variable(shipped.registry, shipped.registry.names[0]),
        ),
        excluded=shipped.excluded,
        substitution=shipped.substitution,
        fresh_scalings=shipped.fresh_scalings,
    )
    bad = charts_equivalent(replayed, mutated, step.get("match_rescale"))
    assert bad["status"] == "fail"


def test_covering_check_and_refutation(charts):
    elements = load_elements()
    rep = covering_check(charts, elements)
    assert rep["status"] == "pass"
    assert len(rep["translates"]) == 6  # identity plus the five elements

    partial = covering_check(charts, elements, omit=["g5"])
    assert partial["status"] == "fail"
    points = [pe.get("point") for pe in partial["pieces"]
              if pe["status"] == "fail"]
    assert any(p is not None for p in points)
