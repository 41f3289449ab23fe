"""Isotropic-subset combinatorics tests."""

from __future__ import annotations

import json

from lgresolve.schubert import (
    SchubertPoset,
    big_cell_ideal,
    big_cell_registry,
    bruhat_leq,
    dimension,
    frame_matrices,
    hasse_dot,
    hasse_json,
    is_isotropic,
    isotropic_subsets,
)


def test_isotropic_counts():
    for g in (1, 2, 3, 4):
        assert len(isotropic_subsets(g)) == 2 ** g


def test_g2_chain():
    doc = json.loads(hasse_json(2))
    assert len(doc["nodes"]) == 4
    assert len(doc["edges"]) == 3
    dims = [n["dimension"] for n in doc["nodes"]]
    assert dims == [0, 1, 2, 3]
    # a chain: each consecutive pair is an edge
    labels = [n["label"] for n in doc["nodes"]]
    got = {(e["from"], e["to"]) for e in doc["edges"]}
    assert got == {(labels[i], labels[i + 1]) for i in range(3)}


def test_g3_diagram():
    doc = json.loads(hasse_json(3))
    assert len(doc["nodes"]) == 8
    subsets = {tuple(n["subset"]): n["dimension"] for n in doc["nodes"]}
    assert subsets == {
        (4, 5, 6): 0, (3, 5, 6): 1, (2, 4, 6): 2, (1, 4, 5): 3,
        (2, 3, 6): 3, (1, 3, 5): 4, (1, 2, 4): 5, (1, 2, 3): 6,
    }
    edges = {(e["from"], e["to"]) for e in doc["edges"]}
    want = {
        ("{4,5,6}", "{3,5,6}"), ("{3,5,6}", "{2,4,6}"),
        ("{2,4,6}", "{1,4,5}"), ("{2,4,6}", "{2,3,6}"),
        ("{1,4,5}", "{1,3,5}"), ("{2,3,6}", "{1,3,5}"),
        ("{1,3,5}", "{1,2,4}"), ("{1,2,4}", "{1,2,3}"),
    }
    assert edges == want


def test_hasse_dot_shape():
    dot = hasse_dot(3)
    assert dot.strip().startswith("digraph")
    assert dot.count("->") == 8
    assert dot.count("label=") == 8


def test_bruhat_partial_order():
    subsets = isotropic_subsets(3)
    for s in subsets:
        assert bruhat_leq(s, s)
    for s in subsets:
        for t in subsets:
            if bruhat_leq(s, t) and bruhat_leq(t, s):
                assert tuple(s) == tuple(t)
            for u in subsets:
                if bruhat_leq(s, t) and bruhat_leq(t, u):
                    assert bruhat_leq(s, u)


def test_isotropy_predicate():
    assert is_isotropic((1, 2, 3), 3)
    assert not is_isotropic((1, 2, 6), 3)  # 1 and 6 pair under the form
    assert not is_isotropic((3, 4), 3)


def test_frame_matrices_shapes():
    j, k, pi = frame_matrices(3)
    assert (j.rows, j.cols) == (6, 6)
    assert (pi.rows, pi.cols) == (6, 6)
    assert (k.rows, k.cols) == (3, 3)
    # the shift matrix is invertible up to p: Pi^6 = p * identity
    power = pi
    for _ in range(5):
        power = power * pi
    assert all(
        power[i, j_].is_zero() if i != j_ else not power[i, j_].is_zero()
        for i in range(6) for j_ in range(6)
    )


def test_big_cell_ideals():
    reg = big_cell_registry(3)
    assert big_cell_ideal(3, (1, 2, 3)) == []  # the big cell itself
    ideal = big_cell_ideal(3, (4, 5, 6))
    assert ideal  # the point stratum has equations
    poset = SchubertPoset.build(3)
    assert dimension((4, 5, 6), 3) == 0
    assert dimension((1, 2, 3), 3) == 6
