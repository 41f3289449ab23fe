"""Combinatorics of the isotropic strata of the local model.

The symplectic form on Z^(2g) pairs index i with 2g+1-i.  A stratum is
labelled by an isotropic subset S of {1, ..., 2g}: |S| = g and S contains
no dual pair {i, 2g+1-i}.  Writing lambda_1 < ... < lambda_g for the
elements of S and r = |S intersect [1, g]|, the stratum dimension is

    dim(S) = r*(g+1) - (lambda_1 + ... + lambda_r).

Containment of strata is componentwise comparison of the sorted labels;
the Hasse diagram of that order is what ``hasse_dot`` / ``hasse_json``
emit.  For g <= 3 the module also ships the ideal of each stratum inside
the big cell (coordinates a^i_j of a symmetric g x g matrix, plus p).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from .parse import parse_poly
from .poly import Polynomial, VarRegistry

Subset = Tuple[int, ...]


def frame_matrices(g: int, registry: VarRegistry | None = None):
    """(J, K, Pi) for genus g, over a registry containing 'p'.

    K is the g x g antidiagonal permutation, J = [[0, K], [-K, 0]] the
    symplectic form, and Pi the cyclic shift sending e_i to e_{i+1} with
    Pi e_{2g} = p e_1.
    """
    from .matrix import PolyMatrix

    if registry is None:
        registry = VarRegistry(["p"])
    p = Polynomial.variable(registry, "p")
    one = Polynomial.const(registry, 1)
    zero = Polynomial.zero(registry)
    K = PolyMatrix(
        registry,
        [[one if j == g - 1 - i else zero for j in range(g)] for i in range(g)],
    )
    n = 2 * g
    J = PolyMatrix(
        registry,
        [
            [
                K.entries[i][j - g]
                if (i < g and j >= g)
                else (-K.entries[i - g][j] if (i >= g and j < g) else zero)
                for j in range(n)
            ]
            for i in range(n)
        ],
    )
    Pi = PolyMatrix(
        registry,
        [
            [
                one
                if i == j + 1
                else (p if (i == 0 and j == n - 1) else zero)
                for j in range(n)
            ]
            for i in range(n)
        ],
    )
    return J, K, Pi


def is_isotropic(subset: Iterable[int], g: int) -> bool:
    s = set(subset)
    if len(s) != g or not all(1 <= i <= 2 * g for i in s):
        return False
    return all((2 * g + 1 - i) not in s for i in s)


def isotropic_subsets(g: int) -> List[Subset]:
    """All isotropic subsets, sorted by (dimension, label)."""
    out = [
        tuple(sorted(c))
        for c in itertools.combinations(range(1, 2 * g + 1), g)
        if is_isotropic(c, g)
    ]
    out.sort(key=lambda s: (dimension(s, g), s))
    return out


def dimension(subset: Sequence[int], g: int) -> int:
    """Dimension of the stratum labelled by the subset."""
    s = tuple(sorted(subset))
    if not is_isotropic(s, g):
        raise ValueError(f"{s} is not an isotropic subset for g={g}")
    r = sum(1 for i in s if i <= g)
    return r * (g + 1) - sum(s[:r])


def bruhat_leq(s: Sequence[int], t: Sequence[int]) -> bool:
    """Componentwise lambda_i(s) <= lambda_i(t): the variety labelled t
    sits inside the variety labelled s."""
    ss, tt = tuple(sorted(s)), tuple(sorted(t))
    if len(ss) != len(tt):
        raise ValueError("subsets of different genus")
    return all(a <= b for a, b in zip(ss, tt))


def contains_variety(big: Sequence[int], small: Sequence[int]) -> bool:
    """Variety(small) is contained in Variety(big)."""
    return bruhat_leq(big, small)


@dataclass(frozen=True)
class SchubertPoset:
    """The strata of genus g ordered by variety containment."""

    g: int
    nodes: Tuple[Subset, ...]
    covers: Tuple[Tuple[Subset, Subset], ...]  # (smaller variety, larger variety)

    @staticmethod
    def build(g: int) -> "SchubertPoset":
        nodes = tuple(isotropic_subsets(g))
        leq = {
            (a, b): contains_variety(b, a) and a != b
            for a in nodes
            for b in nodes
        }
        covers = []
        for a in nodes:
            for b in nodes:
                if not leq[(a, b)]:
                    continue
                if any(leq[(a, c)] and leq[(c, b)] for c in nodes):
                    continue
                covers.append((a, b))
        covers.sort(key=lambda ab: (dimension(ab[0], g), ab[0], ab[1]))
        return SchubertPoset(g, nodes, tuple(covers))

    @property
    def minimum(self) -> Subset:
        return tuple(range(self.g + 1, 2 * self.g + 1))

    @property
    def maximum(self) -> Subset:
        return tuple(range(1, self.g + 1))


def _label(s: Subset) -> str:
    return "{" + ",".join(str(i) for i in s) + "}"


def hasse_json(g: int) -> str:
    poset = SchubertPoset.build(g)
    doc = {
        "genus": g,
        "nodes": [
            {"subset": list(s), "label": _label(s), "dimension": dimension(s, g)}
            for s in poset.nodes
        ],
        "edges": [
            {"from": _label(a), "to": _label(b)} for a, b in poset.covers
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def hasse_dot(g: int) -> str:
    poset = SchubertPoset.build(g)
    lines = [f"digraph schubert_g{g} {{", "  rankdir=BT;"]
    for s in poset.nodes:
        lines.append(
            f'  "{_label(s)}" [label="{_label(s)}\\ndim {dimension(s, g)}"];'
        )
    for a, b in poset.covers:
        lines.append(f'  "{_label(a)}" -> "{_label(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# big-cell ideals (g <= 3, from the shipped table)


def big_cell_registry(g: int) -> VarRegistry:
    names = ["p"] + [f"a{i}{j}" for i in range(1, g + 1) for j in range(i, g + 1)]
    return VarRegistry(names)


_TABLE_CACHE: Dict[int, dict] = {}


def _load_table() -> dict:
    if "t" not in _TABLE_CACHE:
        text = resources.files("lgresolve.data").joinpath("bigcell.json").read_text()
        _TABLE_CACHE["t"] = json.loads(text)
    return _TABLE_CACHE["t"]


def big_cell_ideal(g: int, subset: Sequence[int]) -> List[Polynomial]:
    """Generators (possibly empty: the zero ideal) of the stratum ideal
    inside the big cell, over :func:`big_cell_registry`."""
    s = tuple(sorted(subset))
    if not is_isotropic(s, g):
        raise ValueError(f"{s} is not an isotropic subset for g={g}")
    table = _load_table()
    key = str(g)
    if key not in table:
        raise KeyError(f"no big-cell table for g={g}")
    skey = ",".join(str(i) for i in s)
    if skey not in table[key]:
        raise KeyError(f"subset {s} missing from the g={g} big-cell table")
    reg = big_cell_registry(g)
    return [parse_poly(src, reg) for src in table[key][skey]]
