"""Chart presentations of the blow-up tower.

A chart is a torus-torsor presentation of an open piece of the tower: an
affine space with

* a torus weight vector per variable,
* a distinguished squarefree monomial (the product of the listed
  variables is the base uniformizer ``p``),
* equations (weight-homogeneous),
* excluded loci: each group lists polynomials whose common zero locus is
  removed from the chart,
* a substitution expressing every parent-chart variable in the chart's
  coordinates.

The module loads the shipped tower, validates it, replays each blow-up
step from its center data (in every center order, for the two-center
step), and checks chart-to-chart pullbacks, group actions and the
covering by translates of the base open.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .groebner import (
    DEFAULT_BUDGET,
    Budget,
    BudgetExceeded,
    LocalizedPresentation,
    NoCertificate,
    UnitCertificate,
    contains,
    groebner,
    nonvanishing,
    saturate_many,
)
from .matrix import PolyMatrix
from .parse import format_poly, parse_poly
from .poly import Polynomial, VarRegistry, exact_div, grevlex_key

DATA_ENV = "RESOLVE_DATA_DIR"
CHART_NAMES = ("L0", "T0", "T1", "T2", "T3", "T4", "T5")


def read_data(filename: str) -> dict:
    """Load a shipped JSON data file, honoring the data-dir override."""
    override = os.environ.get(DATA_ENV)
    if override:
        with open(os.path.join(override, filename)) as fh:
            return json.load(fh)
    text = resources.files("lgresolve.data").joinpath(filename).read_text()
    return json.loads(text)


# ---------------------------------------------------------------------------
# chart presentations


@dataclass(frozen=True)
class ChartPresentation:
    name: str
    parent: Optional[str]
    registry: VarRegistry
    torus_rank: int
    weights: Tuple[Tuple[int, ...], ...]  # aligned with registry.names
    monomial: Tuple[str, ...]
    equations: Tuple[Polynomial, ...]
    excluded: Tuple[Tuple[Polynomial, ...], ...]
    substitution: Mapping[str, Polynomial]  # parent var -> poly here
    fresh_scalings: Tuple[str, ...]

    # -- construction ------------------------------------------------------

    @staticmethod
    def from_json(doc: Mapping) -> "ChartPresentation":
        registry = VarRegistry([v["name"] for v in doc["variables"]])
        weights = tuple(tuple(v["weights"]) for v in doc["variables"])
        equations = tuple(parse_poly(s, registry) for s in doc["equations"])
        excluded = tuple(
            tuple(parse_poly(s, registry) for s in group)
            for group in doc["excluded"]
        )
        substitution = {
            k: parse_poly(v, registry) for k, v in doc["substitution"].items()
        }
        if len(registry) != doc["ambient_dim"]:
            raise ValueError(f"{doc['name']}: ambient_dim does not match variables")
        return ChartPresentation(
            name=doc["name"],
            parent=doc["parent"],
            registry=registry,
            torus_rank=doc["torus_rank"],
            weights=weights,
            monomial=tuple(doc["monomial"]),
            equations=equations,
            excluded=excluded,
            substitution=substitution,
            fresh_scalings=tuple(doc["fresh_scalings"]),
        )

    @staticmethod
    def load(name: str) -> "ChartPresentation":
        return ChartPresentation.from_json(read_data(name + ".json"))

    # -- queries -----------------------------------------------------------

    @property
    def ambient_dim(self) -> int:
        return len(self.registry)

    def weight_map(self) -> Dict[str, Tuple[int, ...]]:
        return dict(zip(self.registry.names, self.weights))

    def scaling_names(self) -> Tuple[str, ...]:
        """Variables whose weight is minus a unit vector (one per torus
        slot, in slot order)."""
        by_slot: Dict[int, str] = {}
        for name, w in zip(self.registry.names, self.weights):
            if sum(1 for x in w if x) == 1 and sum(w) == -1:
                slot = next(i for i, x in enumerate(w) if x == -1)
                by_slot.setdefault(slot, name)
        return tuple(by_slot[i] for i in sorted(by_slot))

    def weight_of(self, poly: Polynomial) -> Optional[Tuple[int, ...]]:
        """Common weight of all terms; raises ValueError if mixed."""
        if poly.is_zero():
            return None
        wmap = self.weights
        result: Optional[Tuple[int, ...]] = None
        for exp in poly.terms:
            cur = [0] * self.torus_rank
            for i, k in enumerate(exp):
                if k:
                    for s in range(self.torus_rank):
                        cur[s] += k * wmap[i][s]
            cur_t = tuple(cur)
            if result is None:
                result = cur_t
            elif result != cur_t:
                raise ValueError(
                    f"inhomogeneous polynomial in chart {self.name}: "
                    f"{format_poly(poly)}"
                )
        return result

    def validate(self) -> List[str]:
        """Structural problems with this presentation (empty = valid)."""
        problems: List[str] = []
        for w in self.weights:
            if len(w) != self.torus_rank:
                problems.append(f"{self.name}: weight vector of wrong length")
        slots = self.scaling_names()
        if len(slots) != self.torus_rank:
            problems.append(
                f"{self.name}: expected one scaling variable per torus slot"
            )
        mono = Polynomial.const(self.registry, 1)
        for v in self.monomial:
            if v not in self.registry:
                problems.append(f"{self.name}: monomial variable {v} missing")
                continue
            mono = mono * Polynomial.variable(self.registry, v)
        if len(set(self.monomial)) != len(self.monomial):
            problems.append(f"{self.name}: monomial is not squarefree")
        try:
            w = self.weight_of(mono)
            if w is not None and any(w):
                problems.append(f"{self.name}: monomial weight is not zero")
        except ValueError as exc:
            problems.append(str(exc))
        for f in self.equations:
            if f.is_zero():
                problems.append(f"{self.name}: zero equation")
                continue
            try:
                self.weight_of(f)
            except ValueError as exc:
                problems.append(str(exc))
        for group in self.excluded:
            for g in group:
                if g.is_zero():
                    problems.append(f"{self.name}: zero excluded generator")
                    continue
                try:
                    self.weight_of(g)
                except ValueError as exc:
                    problems.append(str(exc))
        return problems

    def localized(self, names: Sequence[str]) -> "ChartPresentation":
        """The open piece where each listed variable is invertible,
        recorded as singleton exclusion groups."""
        extra = []
        current = {tuple(format_poly(g) for g in grp) for grp in self.excluded}
        for n in names:
            grp = (Polynomial.variable(self.registry, n),)
            if (format_poly(grp[0]),) not in current:
                extra.append(grp)
        return ChartPresentation(
            name=self.name,
            parent=self.parent,
            registry=self.registry,
            torus_rank=self.torus_rank,
            weights=self.weights,
            monomial=self.monomial,
            equations=self.equations,
            excluded=self.excluded + tuple(extra),
            substitution=self.substitution,
            fresh_scalings=self.fresh_scalings,
        )


def load_tower() -> Dict[str, ChartPresentation]:
    return {name: ChartPresentation.load(name) for name in CHART_NAMES}


# ---------------------------------------------------------------------------
# exclusion bookkeeping


def dedup_groups(
    groups: Sequence[Sequence[Polynomial]],
) -> List[Tuple[Polynomial, ...]]:
    """Drop groups that are supersets of another group (their excluded
    locus is already contained in the smaller group's)."""
    as_sets = [frozenset(format_poly(g) for g in grp) for grp in groups]
    keep: List[Tuple[Polynomial, ...]] = []
    for i, grp in enumerate(groups):
        redundant = any(
            j != i
            and as_sets[j] <= as_sets[i]
            and (as_sets[j] != as_sets[i] or j < i)
            for j in range(len(groups))
        )
        if not redundant:
            keep.append(tuple(grp))
    return keep


def exclusion_pieces(chart: ChartPresentation) -> List[Tuple[Polynomial, ...]]:
    """All choice functions over the (deduplicated) exclusion groups: on
    each piece the chosen polynomial from every group is invertible, and
    the pieces jointly cover the chart."""
    groups = dedup_groups(chart.excluded)
    if not groups:
        return [()]
    return [tuple(choice) for choice in itertools.product(*groups)]


# ---------------------------------------------------------------------------
# substitutions along the tower


def chart_path(
    charts: Mapping[str, ChartPresentation], name: str, ancestor: str
) -> List[str]:
    """Chart names from ancestor down to name (inclusive)."""
    path = [name]
    while path[-1] != ancestor:
        parent = charts[path[-1]].parent
        if parent is None:
            raise ValueError(f"{ancestor} is not an ancestor of {name}")
        path.append(parent)
    return list(reversed(path))


def total_substitution(
    charts: Mapping[str, ChartPresentation], name: str, ancestor: str = "L0"
) -> Dict[str, Polynomial]:
    """Every ancestor-chart variable expressed in the named chart's
    coordinates, by composing the per-step substitutions."""
    path = chart_path(charts, name, ancestor)
    if len(path) == 1:
        reg = charts[name].registry
        return {n: Polynomial.variable(reg, n) for n in reg.names}
    cur = dict(charts[path[1]].substitution)
    for step_name in path[2:]:
        step = charts[step_name]
        cur = {
            v: p.substitute(dict(step.substitution), target=step.registry)
            for v, p in cur.items()
        }
    return cur


# ---------------------------------------------------------------------------
# pullback check


def _chart_system(
    chart: ChartPresentation, inverted: Sequence[Polynomial]
) -> LocalizedPresentation:
    return LocalizedPresentation.make(chart.registry, chart.equations, inverted)


def pullback_check(
    child: ChartPresentation,
    parent: ChartPresentation,
    budget: Budget = DEFAULT_BUDGET,
) -> dict:
    """Certify that the child substitution really maps the child chart
    into the parent chart:

    * every parent equation pulls back into the child ideal (with a
      membership witness),
    * the distinguished monomials agree under the substitution,
    * the pullback of every parent excluded locus misses the child chart
      (checked piece by piece over the child exclusion cover).
    """
    checks: List[dict] = []
    status = "pass"

    def note(name: str, st: str, detail: str = ""):
        nonlocal status
        checks.append({"check": name, "status": st, "detail": detail})
        if st == "fail":
            status = "fail"
        elif st == "inconclusive" and status == "pass":
            status = "inconclusive"

    missing = [n for n in parent.registry.names if n not in child.substitution]
    extra = [k for k in child.substitution if k not in parent.registry]
    if missing or extra:
        note(
            "substitution-domain",
            "fail",
            f"missing={missing} extra={extra}",
        )
        return {"child": child.name, "parent": parent.name, "status": "fail",
                "checks": checks}
    note("substitution-domain", "pass")

    bindings = dict(child.substitution)

    # equations pull back into the child ideal
    for k, f in enumerate(parent.equations):
        pulled = f.substitute(bindings, target=child.registry)
        res = contains(list(child.equations), pulled, child.registry, budget)
        if res.status == "yes" and not res.verify(list(child.equations), pulled):
            note(f"equation[{k}]", "fail", "witness failed re-expansion")
        else:
            note(f"equation[{k}]", {"yes": "pass", "no": "fail",
                                    "inconclusive": "inconclusive"}[res.status],
                 res.detail)

    # monomials agree
    pm = Polynomial.const(parent.registry, 1)
    for v in parent.monomial:
        pm = pm * Polynomial.variable(parent.registry, v)
    cm = Polynomial.const(child.registry, 1)
    for v in child.monomial:
        cm = cm * Polynomial.variable(child.registry, v)
    pulled_mono = pm.substitute(bindings, target=child.registry)
    note("monomial", "pass" if pulled_mono == cm else "fail",
         "" if pulled_mono == cm else
         f"{format_poly(pulled_mono)} != {format_poly(cm)}")

    # excluded loci are avoided
    child_groups = dedup_groups(child.excluded)
    pieces = exclusion_pieces(child)
    for k, group in enumerate(parent.excluded):
        pulled = [g.substitute(bindings, target=child.registry) for g in group]
        pulled_set = {format_poly(g) for g in pulled}
        fast = any(
            all(format_poly(g) in pulled_set for g in cg) for cg in child_groups
        )
        if fast:
            note(f"excluded[{k}]", "pass", "syntactic")
            continue
        st = "pass"
        detail = f"unit certificates on {len(pieces)} pieces"
        for piece in pieces:
            cert = nonvanishing(_chart_system(child, piece), pulled, budget)
            if isinstance(cert, UnitCertificate):
                if not cert.verify():
                    st, detail = "fail", "certificate failed re-expansion"
                    break
                continue
            st = "fail" if cert.status == "no" else "inconclusive"
            detail = cert.detail
            break
        note(f"excluded[{k}]", st, detail)

    return {"child": child.name, "parent": parent.name, "status": status,
            "checks": checks}


# ---------------------------------------------------------------------------
# blow-up replay


@dataclass(frozen=True)
class BlowupCenter:
    """A smooth center: generators in the coordinates of the chart being
    blown up, with the new name of each divided generator."""

    scaling: str
    generators: Tuple[Polynomial, ...]
    replacements: Tuple[str, ...]


def _as_variable(p: Polynomial) -> Optional[str]:
    if len(p.terms) != 1:
        return None
    (exp, coeff), = p.terms.items()
    if coeff != 1 or sum(exp) != 1:
        return None
    return p.registry.names[exp.index(1)]


def blowup_step(
    base: ChartPresentation,
    center: BlowupCenter,
    rename: Optional[Mapping[str, str]] = None,
    name: str = "",
) -> ChartPresentation:
    """One torsor-presentation blow-up along a smooth center.

    Every center generator g becomes ``scaling * g'`` in the new chart:
    plain-variable generators are divided in place (under their
    replacement name), expression generators produce a fresh variable and
    the defining equation ``scaling * fresh - g(substituted)``.  Base
    equations are pulled through the substitution and stripped of their
    scaling-monomial content; excluded groups pull back as-is, and the
    replacement variables form one new group (the exceptional locus keeps
    at least one of them invertible).
    """
    rename = dict(rename or {})
    reg = base.registry
    lam = center.scaling
    var_gens: Dict[str, str] = {}  # base var -> replacement name
    expr_gens: List[Tuple[Polynomial, str]] = []
    for g, r in zip(center.generators, center.replacements):
        v = _as_variable(g)
        if v is not None:
            var_gens[v] = r
        else:
            expr_gens.append((g, r))

    def new_name(v: str) -> str:
        if v in var_gens:
            return var_gens[v]
        return rename.get(v, v)

    scalings = base.scaling_names()
    non_scalings = [n for n in reg.names if n not in scalings]
    new_names = (
        [new_name(s) for s in scalings]
        + [lam]
        + [r for _, r in expr_gens]
        + [new_name(v) for v in non_scalings]
    )
    new_reg = VarRegistry(new_names)
    rank = base.torus_rank + 1

    # substitution of base variables
    lam_poly = Polynomial.variable(new_reg, lam)
    subst: Dict[str, Polynomial] = {}
    for v in reg.names:
        img = Polynomial.variable(new_reg, new_name(v))
        if v in var_gens:
            img = lam_poly * img
        subst[v] = img

    # weights: divided variables gain +1 in the new slot, the scaling -1
    wmap: Dict[str, Tuple[int, ...]] = {}
    base_w = base.weight_map()
    for v in reg.names:
        extra = 1 if v in var_gens else 0
        wmap[new_name(v)] = base_w[v] + (extra,)
    wmap[lam] = (0,) * (rank - 1) + (-1,)

    def weight_of(p: Polynomial) -> Tuple[int, ...]:
        result = None
        for exp in p.terms:
            cur = [0] * rank
            for i, k in enumerate(exp):
                if k:
                    w = wmap[new_reg.names[i]]
                    for s in range(rank):
                        cur[s] += k * w[s]
            if result is None:
                result = tuple(cur)
            elif result != tuple(cur):
                raise ValueError(
                    f"blow-up produced an inhomogeneous polynomial: "
                    f"{format_poly(p)}"
                )
        return result or (0,) * rank

    new_equations: List[Polynomial] = []
    for g, r in expr_gens:
        rhs = g.substitute(subst, target=new_reg)
        wmap[r] = tuple(
            a + b for a, b in zip(weight_of(rhs), (0,) * (rank - 1) + (1,))
        )
        new_equations.append(lam_poly * Polynomial.variable(new_reg, r) - rhs)

    for f in base.equations:
        pulled = f.substitute(subst, target=new_reg)
        pulled = pulled.strip_monomial(only=[lam])
        weight_of(pulled)  # homogeneity sanity
        new_equations.append(pulled)

    # monomial: divided monomial variables contribute the scaling once
    new_monomial: List[str] = []
    lam_added = False
    for v in base.monomial:
        if v in var_gens:
            if not lam_added:
                new_monomial.append(lam)
                lam_added = True
            new_monomial.append(var_gens[v])
        else:
            new_monomial.append(new_name(v))
    if not lam_added:
        raise ValueError(
            "no monomial variable lies on the center: the uniformizer "
            "would not factor through the exceptional scaling"
        )

    new_excluded = [
        tuple(g.substitute(subst, target=new_reg) for g in group)
        for group in base.excluded
    ]
    new_excluded.append(
        tuple(Polynomial.variable(new_reg, r) for r in center.replacements)
    )

    weights = tuple(wmap[n] for n in new_reg.names)
    return ChartPresentation(
        name=name or f"{base.name}+{lam}",
        parent=base.name,
        registry=new_reg,
        torus_rank=rank,
        weights=weights,
        monomial=tuple(new_monomial),
        equations=tuple(new_equations),
        excluded=tuple(new_excluded),
        substitution=subst,
        fresh_scalings=(lam,),
    )


def transport_center(
    current: ChartPresentation,
    center: BlowupCenter,
    sigma: Mapping[str, Polynomial],
    fresh: Sequence[str],
    budget: Budget = DEFAULT_BUDGET,
) -> BlowupCenter:
    """Strict transform of a center through earlier blow-ups of the same
    step.

    The generators move through the cumulative substitution and lose
    their scaling-monomial content; the ideal is then saturated by the
    fresh scalings (this can pick up additional plain-variable
    generators) and pruned to a minimal list modulo the chart ideal.
    """
    reg = current.registry
    moved: List[Polynomial] = []
    for g in center.generators:
        img = g.substitute(dict(sigma), target=reg)
        moved.append(img.strip_monomial(only=list(fresh)))

    system = list(current.equations) + moved
    sat = saturate_many(
        system, reg, [Polynomial.variable(reg, f) for f in fresh], budget
    )

    moved_keys = {format_poly(p.content_and_primitive()[1]) for p in moved}
    extras = [
        s
        for s in sat
        if format_poly(s.content_and_primitive()[1]) not in moved_keys
    ]
    extras.sort(key=lambda p: (p.total_degree(), format_poly(p)))

    kept: List[Polynomial] = []
    names: List[str] = []
    for g, r in zip(moved, center.replacements):
        res = contains(list(current.equations) + kept, g, reg, budget,
                       witness=False)
        if res.status == "yes":
            continue
        kept.append(g)
        names.append(r)
    for s in extras:
        v = _as_variable(s.content_and_primitive()[1])
        if v is None:
            continue  # equation combinations; not part of the center list
        res = contains(list(current.equations) + kept, s, reg, budget,
                       witness=False)
        if res.status == "yes":
            continue
        kept.append(Polynomial.variable(reg, v))
        names.append(v)  # divided in place, keeping its name
    return BlowupCenter(center.scaling, tuple(kept), tuple(names))


def load_centers() -> List[dict]:
    return read_data("centers.json")["steps"]


def parse_step_centers(
    step: Mapping, base: ChartPresentation
) -> List[BlowupCenter]:
    out = []
    for c in step["centers"]:
        gens = tuple(parse_poly(s, base.registry) for s in c["generators"])
        out.append(BlowupCenter(c["scaling"], gens, tuple(c["replacements"])))
    return out


def replay_step(
    charts: Mapping[str, ChartPresentation],
    step: Mapping,
    order: Optional[Sequence[int]] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> ChartPresentation:
    """Rebuild the child chart of one tower step from its center data,
    blowing up the step's centers in the given order."""
    base = charts[step["base"]].localized(step.get("localize", []))
    centers = parse_step_centers(step, charts[step["base"]])
    order = list(order if order is not None else range(len(centers)))
    rename = step.get("rename", {})

    current = base
    sigma: Optional[Dict[str, Polynomial]] = None
    fresh: List[str] = []
    for pos, idx in enumerate(order):
        c = centers[idx]
        if pos > 0:
            assert sigma is not None
            c = transport_center(current, c, sigma, fresh, budget)
        nxt = blowup_step(current, c, rename=rename,
                          name=f"{step['child']}~replay")
        if sigma is None:
            sigma = dict(nxt.substitution)
        else:
            sigma = {
                v: p.substitute(dict(nxt.substitution), target=nxt.registry)
                for v, p in sigma.items()
            }
        fresh.append(c.scaling)
        current = nxt
    return current


# ---------------------------------------------------------------------------
# chart equivalence


def _singleton_inverses(chart: ChartPresentation) -> List[Polynomial]:
    out = []
    for group in chart.excluded:
        if len(group) == 1:
            out.append(group[0])
    return out


def charts_equivalent(
    replayed: ChartPresentation,
    shipped: ChartPresentation,
    rescale: Optional[Mapping[str, str]] = None,
    budget: Budget = DEFAULT_BUDGET,
) -> dict:
    """Certify that a replayed chart presents the same torsor as the
    shipped one.

    ``rescale`` maps a replayed variable name to a unit (a polynomial in
    the shipped coordinates): the replayed variable equals unit * shipped
    variable.  The check compares variables, torus weights (up to the
    slot permutation induced by matching scaling variables), monomials,
    equation ideals (mutually, localized at the singleton exclusions) and
    excluded loci (mutual union containment over exclusion pieces).
    """
    checks: List[dict] = []
    status = "pass"

    def note(check: str, st: str, detail: str = ""):
        nonlocal status
        checks.append({"check": check, "status": st, "detail": detail})
        if st == "fail":
            status = "fail"
        elif st == "inconclusive" and status == "pass":
            status = "inconclusive"

    if set(replayed.registry.names) != set(shipped.registry.names):
        note("variables", "fail",
             f"{sorted(set(replayed.registry.names) ^ set(shipped.registry.names))}")
        return {"status": "fail", "checks": checks}
    note("variables", "pass")

    # slot permutation via scaling variables
    r_slots = {n: i for i, n in enumerate(replayed.scaling_names())}
    s_slots = {n: i for i, n in enumerate(shipped.scaling_names())}
    if replayed.torus_rank != shipped.torus_rank or set(r_slots) != set(s_slots):
        note("torus", "fail", "scaling variables differ")
        return {"status": "fail", "checks": checks}
    perm = [0] * shipped.torus_rank  # shipped slot -> replayed slot
    for n, i in s_slots.items():
        perm[i] = r_slots[n]

    # the coordinate change replayed -> shipped
    rescale = dict(rescale or {})
    phi: Dict[str, Polynomial] = {}
    for n in replayed.registry.names:
        img = Polynomial.variable(shipped.registry, n)
        if n in rescale:
            img = parse_poly(rescale[n], shipped.registry) * img
        phi[n] = img

    rw = replayed.weight_map()
    weights_ok = True
    for n in shipped.registry.names:
        want = tuple(rw[n][perm[i]] for i in range(shipped.torus_rank))
        have = shipped.weight_of(phi[n])
        if want != have:
            weights_ok = False
            note("weights", "fail", f"{n}: replayed {want} shipped {have}")
            break
    if weights_ok:
        note("weights", "pass")

    if set(replayed.monomial) != set(shipped.monomial):
        note("monomial", "fail",
             f"{sorted(set(replayed.monomial) ^ set(shipped.monomial))}")
    else:
        note("monomial", "pass")

    inverses = _singleton_inverses(shipped) + [
        parse_poly(u, shipped.registry) for u in rescale.values()
    ]
    mapped = [f.substitute(phi, target=shipped.registry)
              for f in replayed.equations]

    def in_localized_ideal(f: Polynomial, gens: List[Polynomial]) -> str:
        from .groebner import _aux_system

        lp = LocalizedPresentation.make(shipped.registry, gens, inverses)
        ext, labelled = _aux_system(lp, [])
        res = contains([g for _, g in labelled], f.map_registry(ext), ext, budget)
        return {"yes": "pass", "no": "fail", "inconclusive": "inconclusive"}[
            res.status
        ]

    st = "pass"
    for k, f in enumerate(mapped):
        got = in_localized_ideal(f, list(shipped.equations))
        if got != "pass":
            st = got
            note("ideal-forward", st, f"replayed equation {k}")
            break
    else:
        note("ideal-forward", "pass")
    for k, f in enumerate(shipped.equations):
        got = in_localized_ideal(f, mapped)
        if got != "pass":
            note("ideal-backward", got, f"shipped equation {k}")
            break
    else:
        note("ideal-backward", "pass")

    # excluded loci: mutual union containment
    rep_groups = dedup_groups(
        [tuple(g.substitute(phi, target=shipped.registry) for g in grp)
         for grp in replayed.excluded]
    )
    ship_groups = dedup_groups(shipped.excluded)

    def union_contained(
        from_groups: List[Tuple[Polynomial, ...]],
        to_groups: List[Tuple[Polynomial, ...]],
        label: str,
    ):
        to_sets = [{format_poly(g) for g in grp} for grp in to_groups]
        pieces = list(itertools.product(*to_groups)) if to_groups else [()]
        for k, grp in enumerate(from_groups):
            grp_set = {format_poly(g) for g in grp}
            if any(ts <= grp_set for ts in to_sets):
                continue
            for piece in pieces:
                lp = LocalizedPresentation.make(
                    shipped.registry, tuple(shipped.equations),
                    tuple(piece) + tuple(inverses)
                )
                cert = nonvanishing(lp, list(grp), budget)
                if isinstance(cert, UnitCertificate):
                    if not cert.verify():
                        note(label, "fail",
                             f"group {k}: certificate failed re-expansion")
                        return
                    continue
                note(label, "fail" if cert.status == "no" else "inconclusive",
                     f"group {k}: {cert.detail}")
                return
        note(label, "pass")

    union_contained(rep_groups, ship_groups, "excluded-forward")
    union_contained(ship_groups, rep_groups, "excluded-backward")

    return {"status": status, "checks": checks}


def check_step(
    charts: Mapping[str, ChartPresentation],
    step: Mapping,
    budget: Budget = DEFAULT_BUDGET,
) -> dict:
    """Replay one tower step in every center order and certify that each
    replay is equivalent to the shipped child chart."""
    n = len(step["centers"])
    shipped = charts[step["child"]]
    orders = list(itertools.permutations(range(n)))
    results = []
    status = "pass"
    for order in orders:
        try:
            replayed = replay_step(charts, step, order, budget)
        except BudgetExceeded as exc:
            results.append({"order": list(order), "status": "inconclusive",
                            "detail": str(exc)})
            if status == "pass":
                status = "inconclusive"
            continue
        rep = charts_equivalent(replayed, shipped,
                                step.get("match_rescale"), budget)
        results.append({"order": list(order), **rep})
        if rep["status"] == "fail":
            status = "fail"
        elif rep["status"] == "inconclusive" and status == "pass":
            status = "inconclusive"
    return {"step": step["step"], "base": step["base"], "child": step["child"],
            "status": status, "orders": results}


# ---------------------------------------------------------------------------
# group elements and the covering check


@dataclass(frozen=True)
class SymplecticElement:
    """A 2g x 2g matrix preserving the symplectic form, together with its
    induced action on the big-cell coordinates (p, a^i_j)."""

    name: str
    matrix: PolyMatrix
    action: Mapping[str, Polynomial]  # big-cell var -> image

    @staticmethod
    def from_json(name: str, doc: Mapping, g: int = 3) -> "SymplecticElement":
        from .schubert import big_cell_registry, frame_matrices

        reg = big_cell_registry(g)
        J, K, _ = frame_matrices(g, reg)
        zero = Polynomial.zero(reg)

        def const_matrix(rows):
            return PolyMatrix.from_rows(reg, rows)

        if doc["type"] == "block":
            gamma = [[Fraction(x) for x in row] for row in doc["gamma"]]
            inv = _fraction_inverse(gamma)
            gamma_m = const_matrix(doc["gamma"])
            inv_t = const_matrix([[inv[j][i] for j in range(g)]
                                  for i in range(g)])
            block = K * inv_t * K
            entries = [
                [gamma_m.entries[i][j] if (i < g and j < g)
                 else (block.entries[i - g][j - g] if (i >= g and j >= g)
                       else zero)
                 for j in range(2 * g)]
                for i in range(2 * g)
            ]
            matrix = PolyMatrix(reg, entries)
            # induced action on the big cell: A -> gamma * A * t(gamma)
            A = _symmetric_matrix(reg, g)
            gamma_t = const_matrix([[doc["gamma"][j][i] for j in range(g)]
                                    for i in range(g)])
            A2 = gamma_m * A * gamma_t
        elif doc["type"] == "shear":
            N = PolyMatrix.from_rows(reg, doc["N"])
            NK = N * K
            if NK != NK.transpose():
                raise ValueError(f"{name}: N*K is not symmetric")
            ident = PolyMatrix.identity(reg, g)
            entries = [
                [ident.entries[i][j] if (i < g and j < g) else
                 (N.entries[i][j - g] if (i < g and j >= g) else
                  (ident.entries[i - g][j - g] if (i >= g and j >= g)
                   else zero))
                 for j in range(2 * g)]
                for i in range(2 * g)
            ]
            matrix = PolyMatrix(reg, entries)
            # induced action on the big cell: A -> A + N*K
            A2 = _symmetric_matrix(reg, g) + NK
        else:
            raise ValueError(f"unknown element type {doc['type']!r}")

        mt = matrix.transpose()
        if mt * J * matrix != J:
            raise ValueError(f"{name}: matrix does not preserve the form")
        action = {"p": Polynomial.variable(reg, "p")}
        for i in range(1, g + 1):
            for j in range(i, g + 1):
                action[f"a{i}{j}"] = A2.entries[i - 1][j - 1]
        return SymplecticElement(name, matrix, action)


def _symmetric_matrix(reg: VarRegistry, g: int) -> PolyMatrix:
    return PolyMatrix(
        reg,
        [[Polynomial.variable(reg, f"a{min(i, j)}{max(i, j)}")
          for j in range(1, g + 1)] for i in range(1, g + 1)],
    )


def _fraction_inverse(m: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def load_elements() -> Dict[str, SymplecticElement]:
    doc = read_data("elements.json")
    return {
        name: SymplecticElement.from_json(name, doc["elements"][name])
        for name in doc["order"]
    }


def act(
    charts: Mapping[str, ChartPresentation],
    chart_name: str,
    element: SymplecticElement,
) -> Dict[str, Polynomial]:
    """Lift the element's big-cell action to a chart of the tower.

    Supported charts: L0, T0, T1 (the centers further up are not
    preserved by these elements, so no canonical lift exists there).
    Each chart variable v satisfies tau(x_v) = m_v * v for a base
    variable x_v and a scaling monomial m_v; the lift divides the moved
    total substitution by that monomial and checks weight homogeneity.
    """
    if chart_name not in ("L0", "T0", "T1"):
        raise ValueError(
            f"no lifted action on chart {chart_name}: only L0, T0, T1 "
            "carry these elements"
        )
    chart = charts[chart_name]
    reg = chart.registry
    if chart_name == "L0":
        return {v: p.map_registry(reg) for v, p in element.action.items()}
    tau = total_substitution(charts, chart_name, "L0")
    scalings = set(chart.scaling_names())
    lift: Dict[str, Polynomial] = {
        s: Polynomial.variable(reg, s) for s in scalings
    }
    for x, expr in tau.items():
        mono = Polynomial.monomial(
            reg,
            tuple(
                k if reg.names[i] in scalings else 0
                for i, k in enumerate(expr.monomial_content())
            ),
        )
        stripped = expr.strip_monomial(only=list(scalings))
        v = _as_variable(stripped)
        if v is None:
            raise ValueError(
                f"total substitution of {x} is not a scaled variable"
            )
        moved = element.action[x].substitute(dict(tau), target=reg)
        lift[v] = exact_div(moved, mono)
        want = chart.weight_of(Polynomial.variable(reg, v))
        have = chart.weight_of(lift[v])
        if want != have:
            raise ValueError(
                f"lifted image of {v} has weight {have}, expected {want}"
            )
    return lift


def covering_check(
    charts: Mapping[str, ChartPresentation],
    elements: Mapping[str, SymplecticElement],
    omit: Sequence[str] = (),
    budget: Budget = DEFAULT_BUDGET,
) -> dict:
    """Certify that the base open and its element translates cover the
    covering chart (piece by piece over its exclusion cover)."""
    doc = read_data("elements.json")
    chart_name = doc["covering"]["chart"]
    base_var = doc["covering"]["base_open"]
    chart = charts[chart_name]
    reg = chart.registry

    tau = total_substitution(charts, chart_name, "L0")
    scalings = list(chart.scaling_names())
    units: List[Tuple[str, Polynomial]] = []
    base_expr = tau[base_var].strip_monomial(only=scalings)
    units.append(("identity", base_expr))
    for name in doc["order"]:
        if name in omit:
            continue
        lifted = act(charts, chart_name, elements[name])
        v = _as_variable(tau[base_var].strip_monomial(only=scalings))
        units.append((name, lifted[v]))

    pieces = exclusion_pieces(chart)
    piece_reports = []
    status = "pass"
    for piece in pieces:
        lp = LocalizedPresentation.make(reg, chart.equations, piece)
        cert = nonvanishing(lp, [u for _, u in units], budget,
                            search_point=True)
        entry = {"piece": [format_poly(g) for g in piece]}
        if isinstance(cert, UnitCertificate):
            ok = cert.verify()
            entry["status"] = "pass" if ok else "fail"
            entry["certificate_parts"] = len(cert.parts)
            if not ok:
                status = "fail"
        else:
            entry["status"] = "fail" if cert.status == "no" else "inconclusive"
            entry["detail"] = cert.detail
            if cert.point is not None:
                entry["point"] = {
                    k: str(v) for k, v in sorted(cert.point.items())
                }
            if entry["status"] == "fail":
                status = "fail"
            elif status == "pass":
                status = "inconclusive"
        piece_reports.append(entry)
    return {
        "chart": chart_name,
        "base_open": base_var,
        "translates": [n for n, _ in units],
        "status": status,
        "pieces": piece_reports,
    }
