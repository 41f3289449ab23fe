"""Minor tables, factorization identities, and non-vanishing tests."""

from __future__ import annotations

import copy
import random

from lgresolve.groebner import UnitCertificate
from lgresolve.parse import format_poly, parse_poly
from lgresolve.pluecker import (
    check_pluecker_relations,
    m_table,
    raw_minors,
    verify_cofactor_identities,
    verify_factorization,
    verify_nonvanishing,
)


def test_pluecker_relations():
    assert check_pluecker_relations(2) == []
    assert check_pluecker_relations(3) == []


def test_m_table_emission(charts, pl_steps):
    t2 = m_table(pl_steps[2], charts)
    assert t2["k"] == 2 and len(t2["rows"]) == 10
    by_index = {r["index"]: r for r in t2["rows"]}
    assert by_index["1,2"]["m"] == "-p^2"
    assert by_index["1,3"]["m"] == "-p*a11"

    t3 = m_table(pl_steps[3], charts)
    assert len(t3["rows"]) == 20
    by_index = {r["index"]: r for r in t3["rows"]}
    assert by_index["1,2,3"]["m"] == "-p^3"
    assert by_index["2,3,4"]["m"] == by_index["1,2,6"]["m"]
    assert "\n" in t3["text"]


def test_minor_antisymmetry_spot_check(charts, pl_steps):
    step = pl_steps[3]
    reg = charts["L0"].registry
    minors = raw_minors(3, reg, step.minor_rows, step.minor_cols)
    assert minors[(1, 3, 4)] == -minors[(1, 2, 5)]


def test_factorizations(charts, pl_steps):
    for k in (1, 2, 3):
        rep = verify_factorization(pl_steps[k], charts)
        assert rep["status"] == "pass", (k, rep)


def test_cofactor_identities(charts):
    rep = verify_cofactor_identities(charts)
    assert rep["status"] == "pass", rep
    assert len(rep["checks"]) == 4  # three relations + the determinant


def test_cofactor_mutation_caught(charts):
    from lgresolve.chart import read_data

    cof = read_data("pluecker.json")["cofactors"]
    mutated = list(cof["identities"])
    # drop a scaling factor from the first relation
    assert "l2*" in mutated[0]
    mutated[0] = mutated[0].replace("l2*", "", 1)
    rep = verify_cofactor_identities(charts, identities=mutated)
    assert rep["status"] == "fail"
    assert any("residual" in c.get("detail", "") for c in rep["checks"])


def test_factorization_mutation_caught(charts, pl_steps):
    step = copy.copy(pl_steps[2])
    step.table = dict(step.table)
    rng = random.Random(5)
    subset = rng.choice(sorted(step.table))
    expr, clear = step.table[subset]
    reg = charts[step.chart].registry
    step.table[subset] = (expr + parse_poly("a22_4", reg), clear)
    rep = verify_factorization(step, charts)
    assert rep["status"] == "fail"


def test_nonvanishing_certificates(charts, pl_steps):
    for k in (1, 2):
        rep = verify_nonvanishing(pl_steps[k], charts)
        assert rep["status"] == "pass", (k, rep)
        assert all(isinstance(c, UnitCertificate) and c.verify()
                   for c in rep["certificates"])


def test_nonvanishing_k1_targets(pl_steps):
    names = [format_poly(t) for t in pl_steps[1].target_exprs]
    assert names == ["n3*P3", "a11_3", "a12_3", "a13_3"]
