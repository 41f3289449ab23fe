"""Smoothness, normal-crossing and semistability certificates.

All checks run piece by piece over a chart's exclusion cover: a piece
inverts one chosen generator from every exclusion group, and the pieces
jointly cover the chart.  On each piece the certificates are Jacobian
unit-minor certificates:

* ``smooth_center`` -- each blow-up center, cut out by the chart
  equations plus its generators, has a Jacobian minor of full size that
  is a unit on the piece (so the center is smooth of the expected
  codimension at every point);
* ``nc_intersection`` -- the center meets the singular locus of the
  special fiber in a normal-crossings divisor: for every subset of the
  scaling variables, adding their vanishing keeps the intersection
  smooth of the right codimension (or empty);
* ``semistable`` -- the chart equations can be solved for non-monomial
  variables (unit minor of the Jacobian restricted to those columns), so
  the chart is etale-locally the product of the standard semistable
  model with an affine space.

When no single minor works on a piece, the piece is refined: it splits
into the locus where a chosen entry is invertible and the locus where it
vanishes, and both halves are certified separately (smoothness is a
pointwise condition, so a certificate on each stratum covers the piece).
"""

from __future__ import annotations

import itertools
from typing import List, Mapping, Optional, Sequence, Tuple

from .chart import (
    BlowupCenter,
    ChartPresentation,
    dedup_groups,
    parse_step_centers,
)
from .groebner import (
    DEFAULT_BUDGET,
    Budget,
    BudgetExceeded,
    GroebnerBasis,
    LocalizedPresentation,
    MonomialOrder,
    UnitCertificate,
    fresh_names,
    groebner,
    is_unit,
)
from .matrix import PolyMatrix
from .parse import format_poly, parse_poly
from .poly import Polynomial, VarRegistry, exact_div, try_exact_div


class PieceContext:
    """One piece of an exclusion cover: an ideal plus a list of inverted
    polynomials, with a cached Groebner basis for the localized system
    (inverses handled by Rabinowitsch relations)."""

    def __init__(
        self,
        registry: VarRegistry,
        ideal: Sequence[Polynomial],
        inverted: Sequence[Polynomial],
        budget: Budget = DEFAULT_BUDGET,
    ):
        self.registry = registry
        self.ideal = tuple(ideal)
        self.inverted = tuple(inverted)
        self.budget = budget
        unames = fresh_names(registry, "u_pc", len(self.inverted))
        self.ext = registry.extend(unames)
        system = [g.map_registry(self.ext) for g in self.ideal]
        for u, g in zip(unames, self.inverted):
            system.append(
                Polynomial.variable(self.ext, u) * g.map_registry(self.ext) - 1
            )
        self.system = system
        self._gb_cache = None
        # labelled generators of the localized system, for building
        # expansion-verifiable unit certificates
        self.labelled: List[Tuple[str, Polynomial]] = [
            (f"equation[{k}]", g) for k, g in enumerate(system[: len(ideal)])
        ] + [
            (f"inverse[{k}]", g)
            for k, g in enumerate(system[len(ideal):])
        ]
        # unit factors usable in the syntactic test: each entry is
        # (factor, inverse, defect) with factor in the base registry,
        # inverse in the extended one, and defect a dict mapping
        # generator labels to combiners such that
        #     factor * inverse = 1 + sum(gen[label] * defect[label]).
        # Sources: primitive parts of the inverted polynomials; variable
        # factors of single-term inverted polynomials; and the binomial
        # closure below.
        self._factors: List[Tuple[Polynomial, Polynomial, dict]] = []
        one = Polynomial.const(self.ext, 1)
        for k, g in enumerate(self.inverted):
            u = Polynomial.variable(self.ext, unames[k])
            c, prim = g.content_and_primitive()
            if not prim.is_constant():
                # prim * (c*u) = u*g = 1 + (u*g - 1)
                self._factors.append(
                    (prim, u * c, {f"inverse[{k}]": one})
                )
            if len(g.terms) == 1:
                gx = g.map_registry(self.ext)
                (expo,) = g.terms.keys()
                for pos, e in enumerate(expo):
                    if e > 0:
                        v = Polynomial.variable(registry, registry.names[pos])
                        vx = v.map_registry(self.ext)
                        # v * (u * g/v) = u*g = 1 + (u*g - 1)
                        self._factors.append(
                            (v, u * exact_div(gx, vx),
                             {f"inverse[{k}]": one})
                        )
        self._nilpotent: dict = {}
        self._contra: Optional[bool] = None
        self._propagate_units()

    def _nilpotent_var(self, name: str) -> bool:
        """Does a small power of the variable lie in the localized ideal?
        (Cached; used to discard nilpotent terms in the unit test.)"""
        hit = self._nilpotent.get(name)
        if hit is None:
            v = Polynomial.variable(self.ext, name)
            hit = any(
                self._gb.normal_form(v ** k).is_zero() for k in (2, 3)
            )
            self._nilpotent[name] = hit
        return hit

    def _propagate_units(self) -> None:
        """Binomial closure: if an ideal generator is t1 + t2 and t1 is a
        product of unit factors, then -t2 equals a unit on the piece, so
        every variable dividing t2 is itself a unit."""
        changed = True
        while changed:
            changed = False
            for k, g in enumerate(self.ideal):
                if len(g.terms) != 2:
                    continue
                label = f"equation[{k}]"
                gx = g.map_registry(self.ext)
                monos = [
                    Polynomial.monomial(self.registry, expo, c)
                    for expo, c in g.terms.items()
                ]
                for t1, t2 in (monos, reversed(monos)):
                    inv1 = self._factorize(t1)
                    if inv1 is None:
                        continue
                    inv_t1, defect1 = inv1
                    (expo,) = t2.terms.keys()
                    t2x = t2.map_registry(self.ext)
                    for pos, e in enumerate(expo):
                        if e > 0:
                            v = Polynomial.variable(
                                self.registry, self.registry.names[pos]
                            )
                            if self._unit_product(v):
                                continue
                            # v * (-inv_t1 * t2/v) = -inv_t1*(g - t1)
                            #   = 1 + sum(defect1) - inv_t1*g
                            vx = v.map_registry(self.ext)
                            defect = dict(defect1)
                            defect[label] = (
                                defect.get(label, Polynomial.zero(self.ext))
                                - inv_t1
                            )
                            self._factors.append(
                                (v, -inv_t1 * exact_div(t2x, vx), defect)
                            )
                            changed = True
                    break

    def with_more(
        self,
        ideal: Sequence[Polynomial] = (),
        inverted: Sequence[Polynomial] = (),
    ) -> "PieceContext":
        return PieceContext(
            self.registry,
            self.ideal + tuple(ideal),
            self.inverted + tuple(inverted),
            self.budget,
        )

    @property
    def _gb(self):
        """A (possibly partial) Groebner basis of the localized system,
        built on first use under a tight budget.

        The basis backs one-directional checks only -- detected
        contradictions, reductions to zero and nilpotence are genuine,
        while misses just mean more work elsewhere -- so a partial basis
        (or, at worst, the raw generators) is sound.  Contradictory
        systems terminate early regardless, because Buchberger stops as
        soon as a constant enters the basis."""
        if self._gb_cache is None:
            cap = Budget(
                max_spairs=min(self.budget.max_spairs, 1_500),
                max_degree=min(self.budget.max_degree, 26),
            )
            try:
                self._gb_cache = groebner(self.system, self.ext, budget=cap)
            except BudgetExceeded:
                order = MonomialOrder.grevlex()
                basis = [
                    g * (1 / g.leading(order.key)[1])
                    for g in self.system
                    if not g.is_zero()
                ]
                self._gb_cache = GroebnerBasis(
                    self.ext, order, basis, None, list(self.system)
                )
        return self._gb_cache

    def contradictory(self) -> bool:
        """Is the piece provably empty (1 in the localized ideal)?

        Staged to stay cheap on the common path: first a syntactic scan
        (an ideal generator that is a product of inverted factors puts 1
        straight into the ideal), then a small-budget Buchberger probe
        (contradictory systems terminate early when a constant enters
        the basis), and the cached basis when one was already built.  A
        False may be a miss; callers treat it as "not provably empty"
        and their own fail paths re-establish emptiness at full budget
        before refuting anything.
        """
        if self._contra is None:
            self._contra = self._contradictory()
        return self._contra

    def _contradictory(self) -> bool:
        if any(self._unit_product(g) for g in self.ideal):
            return True
        if self._gb_cache is not None:
            return self._gb_cache.contains_one()
        probe = Budget(
            max_spairs=min(self.budget.max_spairs, 300),
            max_degree=min(self.budget.max_degree, 18),
        )
        try:
            gb = groebner(self.system, self.ext, budget=probe)
        except BudgetExceeded:
            return False
        self._gb_cache = gb  # a completed basis; reuse it
        return gb.contains_one()

    def reduces_to_zero(self, f: Polynomial) -> bool:
        if f.is_zero():
            return True
        # syntactic multiples of ideal generators first: normal form
        # against the raw-generator fallback basis can miss even literal
        # members of the ideal
        for g in self.ideal:
            if not g.is_zero() and try_exact_div(f, g) is not None:
                return True
        return self._gb.normal_form(f.map_registry(self.ext)).is_zero()

    def _factorize(
        self, f: Polynomial
    ) -> Optional[Tuple[Polynomial, dict]]:
        """Write f as a scalar times a product of known unit factors.

        Returns (inverse, defect) with f * inverse = 1 + sum of
        generator-times-combiner given by ``defect``, or None if f is
        not such a product.  The identity is exact (expansion-level), so
        it converts directly into a re-verifiable unit certificate.
        """
        if f.is_zero():
            return None
        work = f
        used: List[int] = []
        progress = True
        # composite factors first: peeling off shared variable factors
        # too eagerly can leave a remainder the multi-term factors no
        # longer divide
        order = sorted(
            range(len(self._factors)),
            key=lambda k: (
                -len(self._factors[k][0].terms),
                -self._factors[k][0].total_degree(),
            ),
        )
        while not work.is_constant() and progress:
            progress = False
            for idx in order:
                q = try_exact_div(work, self._factors[idx][0])
                if q is not None:
                    work = q
                    used.append(idx)
                    progress = True
                    break
        if not work.is_constant() or work.is_zero():
            return None
        inverse = Polynomial.const(self.ext, 1 / work.constant_value())
        prod = Polynomial.const(self.ext, 1)
        defect: dict = {}
        for idx in used:
            g, inv_g, d = self._factors[idx]
            for lab, comb in d.items():
                defect[lab] = (
                    defect.get(lab, Polynomial.zero(self.ext)) + prod * comb
                )
            prod = prod * (g.map_registry(self.ext) * inv_g)
            inverse = inverse * inv_g
        return inverse, defect

    def _unit_product(self, f: Polynomial) -> bool:
        if f.is_zero():
            return False
        _, work = f.content_and_primitive()
        progress = True
        factors = sorted(
            (g for g, _, _ in self._factors),
            key=lambda g: (-len(g.terms), -g.total_degree()),
        )
        while not work.is_constant() and progress:
            progress = False
            for g in factors:
                q = try_exact_div(work, g)
                if q is not None:
                    work = q
                    progress = True
                    break
        return work.is_constant() and not work.is_zero()

    def quick_unit(self, f: Polynomial, use_nil: bool = True) -> bool:
        """Syntactic unit test: f is a nonzero scalar times a product of
        inverted polynomials, possibly plus nilpotent terms (a unit plus
        a nilpotent is a unit).  Nilpotence detection consults the
        cached Groebner basis; ``use_nil=False`` stays purely
        syntactic."""
        if self._unit_product(f):
            return True
        if not use_nil or len(f.terms) < 2:
            return False
        names = f.registry.names
        kept = {
            expo: c
            for expo, c in f.terms.items()
            if not any(
                e > 0 and self._nilpotent_var(names[pos])
                for pos, e in enumerate(expo)
            )
        }
        if len(kept) == len(f.terms):
            return False
        return self._unit_product(Polynomial(f.registry, kept))

    def product_unit_certificate(
        self, f: Polynomial
    ) -> Optional[UnitCertificate]:
        """Direct (Groebner-free) unit certificate when f is a scalar
        times a product of known unit factors: the telescoping identity
        f*inverse - sum(gen*defect) = 1 expands to exactly 1."""
        got = self._factorize(f)
        if got is None:
            return None
        inverse, defect = got
        gens = dict(self.labelled)
        parts: List[Tuple[str, Polynomial, Polynomial]] = [
            ("target[0]", f.map_registry(self.ext), inverse)
        ]
        for lab, comb in defect.items():
            if not comb.is_zero():
                parts.append((lab, gens[lab], -comb))
        cert = UnitCertificate(self.ext, parts)
        return cert if cert.verify() else None

    def is_unit(self, f: Polynomial, budget: Budget | None = None) -> bool:
        """Unit test modulo the localized ideal (cached-basis seeded)."""
        if self.quick_unit(f):
            return True
        (u,) = fresh_names(self.ext, "u_piv", 1)
        reg2 = self.ext.extend([u])
        gens = [b.map_registry(reg2) for b in self._gb.basis]
        gens.append(Polynomial.variable(reg2, u) * f.map_registry(reg2) - 1)
        return groebner(gens, reg2, budget=budget or self.budget).contains_one()

    def describe(self) -> List[str]:
        return [format_poly(g) for g in self.inverted]


def cover_pieces(
    chart: ChartPresentation,
    extra_ideal: Sequence[Polynomial] = (),
    budget: Budget = DEFAULT_BUDGET,
) -> Tuple[List[PieceContext], List[List[str]]]:
    """Piece contexts for the chart's exclusion cover over the chart
    ideal plus ``extra_ideal``.  Contradictory pieces (empty loci) are
    dropped and reported separately."""
    groups = dedup_groups(chart.excluded)
    ideal = list(chart.equations) + list(extra_ideal)
    kept: List[PieceContext] = []
    dropped: List[List[str]] = []
    choices = itertools.product(*groups) if groups else [()]
    for choice in choices:
        ctx = PieceContext(chart.registry, ideal, tuple(choice), budget)
        if ctx.contradictory():
            dropped.append([format_poly(g) for g in choice])
        else:
            kept.append(ctx)
    return kept, dropped


# ---------------------------------------------------------------------------
# unit-minor search


def _jacobian(
    rows: Sequence[Polynomial], cols: Sequence[str], registry: VarRegistry
) -> List[List[Polynomial]]:
    return [[f.derivative(c) for c in cols] for f in rows]


def _split_variable_rows(
    rows: Sequence[Polynomial], cols: Sequence[str]
) -> Tuple[List[Tuple[int, str]], List[int], List[str]]:
    """Rows that are plain variables take their own column (Jacobian row
    is a unit vector); the rest form the hard submatrix."""
    taken: List[Tuple[int, str]] = []
    used_cols = set()
    hard: List[int] = []
    for i, f in enumerate(rows):
        terms = list(f.terms.items())
        v = None
        if len(terms) == 1 and terms[0][1] == 1 and sum(terms[0][0]) == 1:
            v = f.registry.names[terms[0][0].index(1)]
        if v is not None and v in cols and v not in used_cols:
            taken.append((i, v))
            used_cols.add(v)
        else:
            hard.append(i)
    free_cols = [c for c in cols if c not in used_cols]
    return taken, hard, free_cols


def unit_minor(
    ctx: PieceContext,
    rows: Sequence[Polynomial],
    cols: Sequence[str],
    budget: Budget = DEFAULT_BUDGET,
    max_depth: int = 5,
    with_certificate: bool = True,
) -> dict:
    """Find (and certify) a full-size Jacobian unit minor on a piece.

    Plain-variable rows pivot trivially on their own columns; the
    remaining rows are pivoted greedily with fraction-free updates,
    preferring entries that are syntactically units.  If the piece
    admits no unit pivot, it is refined on a candidate entry and both
    halves are certified.  The result records the pivots, the selected
    minor, and (optionally) a re-verifiable unit certificate for the
    minor's determinant.
    """
    var_pivots, hard_idx, free_cols = _split_variable_rows(rows, cols)
    report = {
        "variable_pivots": [
            {"row": format_poly(rows[i]), "col": c} for i, c in var_pivots
        ],
    }
    if not hard_idx:
        report["status"] = "pass"
        report["pivots"] = []
        return report
    hard_rows = [rows[i] for i in hard_idx]
    out = _pivot_search(ctx, hard_rows, free_cols, budget, max_depth,
                        with_certificate)
    report.update(out)
    return report


def _pivot_search(
    ctx: PieceContext,
    hard_rows: Sequence[Polynomial],
    cols: Sequence[str],
    budget: Budget,
    depth: int,
    with_certificate: bool,
) -> dict:
    reg = ctx.registry
    mat = _jacobian(hard_rows, cols, reg)
    n = len(hard_rows)
    rows_left = list(range(n))
    cols_left = list(range(len(cols)))
    pivots: List[dict] = []
    chosen_cols: List[int] = []
    prev = Polynomial.const(reg, 1)

    screen = Budget(max_spairs=400, max_degree=22)
    while rows_left:
        found = None
        # pass 1: syntactic units (then syntactic-plus-nilpotent units).
        # Serve the most constrained row first (fewest unit entries), so
        # greedy choices don't starve a later row of its only usable
        # column.
        for use_nil in (False, True):
            options = {
                i: [
                    j
                    for j in cols_left
                    if not mat[i][j].is_zero()
                    and ctx.quick_unit(mat[i][j], use_nil)
                ]
                for i in rows_left
            }
            ranked = sorted(
                (i for i in rows_left if options[i]),
                key=lambda i: len(options[i]),
            )
            if ranked:
                i = ranked[0]
                found = (i, options[i][0])
                break
        if found is None:
            # pass 2: units modulo the localized ideal, cheapest entries
            # first, under a screening budget
            candidates = sorted(
                ((len(mat[i][j].terms), mat[i][j].total_degree(), i, j)
                 for i in rows_left for j in cols_left
                 if not mat[i][j].is_zero()
                 and not ctx.reduces_to_zero(mat[i][j]))
            )
            for _, _, i, j in candidates[:4]:
                try:
                    if ctx.is_unit(mat[i][j], screen):
                        found = (i, j)
                        break
                except BudgetExceeded:
                    continue
        if found is None:
            # no unit pivot: refine on a low-degree nonzero entry, or
            # declare the matrix degenerate if everything vanishes
            candidates = [
                (len(mat[i][j].terms), mat[i][j].total_degree(), i, j)
                for i in rows_left
                for j in cols_left
                if not mat[i][j].is_zero() and not ctx.reduces_to_zero(mat[i][j])
            ]
            if not candidates:
                # all remaining entries vanish on the stratum -- genuine
                # degeneracy, unless the stratum is in fact empty and
                # the budget-capped cached basis missed it: settle the
                # emptiness question at full budget before failing
                try:
                    full = groebner(ctx.system, ctx.ext, budget=budget)
                except BudgetExceeded as exc:
                    return {
                        "status": "inconclusive",
                        "pivots": pivots,
                        "detail": f"degenerate-looking stratum, emptiness "
                        f"undecided: {exc}",
                    }
                if full.contains_one():
                    return {
                        "status": "pass",
                        "pivots": pivots,
                        "detail": "empty stratum",
                    }
                return {
                    "status": "fail",
                    "pivots": pivots,
                    "detail": "Jacobian degenerate: all remaining entries "
                    "vanish on a nonempty piece",
                }
            if depth <= 0:
                return {
                    "status": "inconclusive",
                    "pivots": pivots,
                    "detail": "refinement depth exhausted",
                }
            candidates.sort()
            _, _, i, j = candidates[0]
            f = mat[i][j]
            if len(f.terms) == 1:
                # a monomial entry vanishes iff one of its non-unit
                # variable factors does: branch on that variable instead
                (expo,) = f.terms.keys()
                for pos, e in enumerate(expo):
                    v = Polynomial.variable(ctx.registry,
                                            ctx.registry.names[pos])
                    if e > 0 and not ctx.quick_unit(v):
                        f = v
                        break
            branches = []
            overall = "pass"
            for tag, sub in (
                ("invertible", ctx.with_more(inverted=[f])),
                ("vanishing", ctx.with_more(ideal=[f])),
            ):
                entry = {"case": f"{format_poly(f)} {tag}"}
                # either refined stratum may be empty (e.g. inverting an
                # entry that in fact vanishes identically on the piece);
                # the staged check is cheap, so run it on both sides
                if sub.contradictory():
                    entry["status"] = "pass"
                    entry["detail"] = "empty stratum"
                else:
                    inner = _pivot_search(sub, hard_rows, cols, budget,
                                          depth - 1, with_certificate)
                    entry.update(inner)
                if entry["status"] == "fail":
                    overall = "fail"
                elif entry["status"] == "inconclusive" and overall == "pass":
                    overall = "inconclusive"
                branches.append(entry)
            return {"status": overall, "pivots": pivots,
                    "refined_on": format_poly(f), "branches": branches}

        i, j = found
        piv = mat[i][j]
        pivots.append({"row": format_poly(hard_rows[i]), "col": cols[j],
                       "entry": format_poly(piv)})
        chosen_cols.append(j)
        for r in rows_left:
            if r == i:
                continue
            for c in cols_left:
                if c == j:
                    continue
                num = mat[r][c] * piv - mat[r][j] * mat[i][c]
                mat[r][c] = exact_div(num, prev) if not prev.is_constant() \
                    or prev.constant_value() != 1 else num
        rows_left.remove(i)
        cols_left.remove(j)
        prev = piv

    result: dict = {"status": "pass", "pivots": pivots}
    if with_certificate:
        minor = PolyMatrix(
            reg, _jacobian(hard_rows, [cols[j] for j in chosen_cols], reg)
        )
        det = minor.det()
        result["minor_columns"] = [cols[j] for j in chosen_cols]
        result["minor_det"] = format_poly(det)
        direct = ctx.product_unit_certificate(det)
        if direct is not None:
            result["certificate"] = direct.to_json()
            return result
        lp = LocalizedPresentation.make(reg, ctx.ideal, ctx.inverted)
        try:
            cert = is_unit(lp, det, budget)
        except BudgetExceeded as exc:
            result["status"] = "inconclusive"
            result["detail"] = str(exc)
            return result
        if isinstance(cert, UnitCertificate):
            if cert.verify():
                result["certificate"] = cert.to_json()
            else:
                result["status"] = "fail"
                result["detail"] = "minor certificate failed re-expansion"
        else:
            result["status"] = ("fail" if cert.status == "no"
                                else "inconclusive")
            result["detail"] = cert.detail
    return result


def _merge(report: dict, piece_entry: dict) -> None:
    st = piece_entry["status"]
    if st == "fail":
        report["status"] = "fail"
    elif st == "inconclusive" and report["status"] == "pass":
        report["status"] = "inconclusive"


# ---------------------------------------------------------------------------
# step-level certificates


def _center_system(
    base: ChartPresentation, step: Mapping, center: BlowupCenter
) -> Tuple[VarRegistry, List[Polynomial], List[Polynomial], List[str]]:
    """(registry, ideal rows, extra localized, columns) for one center.

    When the step ships an extended presentation (an auxiliary variable
    with its defining relation) and the center has a non-variable
    generator, the extended system replaces the raw one: the auxiliary
    relation joins the equations and the center's expression generator is
    rewritten through the shipped substitute.
    """
    ext_doc = step.get("extended")
    has_expr = any(len(g.terms) > 1 for g in center.generators)
    if ext_doc and has_expr:
        reg = base.registry.extend([ext_doc["aux_name"]])
        eqs = [f.map_registry(reg) for f in base.equations]
        eqs.append(parse_poly(ext_doc["aux_relation"], reg))
        gens: List[Polynomial] = []
        for g in center.generators:
            if len(g.terms) == 1:
                gens.append(g.map_registry(reg))
            else:
                gens.append(parse_poly(ext_doc["delta"], reg))
        return reg, eqs + gens, [], _ordered_columns(reg, base)
    reg = base.registry
    rows = list(base.equations) + list(center.generators)
    return reg, rows, [], _ordered_columns(reg, base)


def _ordered_columns(reg: VarRegistry, base: ChartPresentation) -> List[str]:
    """Pivot column order: affine coordinates first, the monomial
    (toric) variables last, so pivots land on honest chart coordinates
    whenever possible."""
    mono = set(base.monomial)
    return [n for n in reg.names if n not in mono] + \
        [n for n in reg.names if n in mono]


def smooth_center(
    charts: Mapping[str, ChartPresentation],
    step: Mapping,
    budget: Budget = DEFAULT_BUDGET,
    with_certificates: bool = True,
) -> dict:
    """Certify that every center of a tower step is smooth of the
    expected codimension on the base chart, and that the centers of a
    two-center step are disjoint."""
    base = charts[step["base"]].localized(step.get("localize", []))
    centers = parse_step_centers(step, charts[step["base"]])
    report = {"step": step["step"], "base": step["base"], "status": "pass",
              "centers": []}
    groups = dedup_groups(base.excluded)

    for c_idx, center in enumerate(centers):
        reg, rows, _, cols = _center_system(base, step, center)
        entry = {"scaling": center.scaling, "codimension": len(rows),
                 "pieces": []}
        choices = itertools.product(*groups) if groups else [()]
        for choice in choices:
            inverted = [g.map_registry(reg) for g in choice]
            ctx = PieceContext(reg, rows, inverted, budget)
            pe = {"piece": [format_poly(g) for g in choice]}
            if ctx.contradictory():
                pe["status"] = "pass"
                pe["detail"] = "piece misses the center"
            else:
                pe.update(unit_minor(ctx, rows, cols, budget,
                                     with_certificate=with_certificates))
            entry["pieces"].append(pe)
            _merge(report, pe)
        report["centers"].append(entry)

    if len(centers) == 2:
        both = list(base.equations)
        for c in centers:
            both.extend(c.generators)
        disjoint = "pass"
        choices = itertools.product(*groups) if groups else [()]
        for choice in choices:
            ctx = PieceContext(base.registry, both, tuple(choice), budget)
            if ctx.contradictory():
                continue
            # the staged check can miss; settle it at full budget
            try:
                full = groebner(ctx.system, ctx.ext, budget=budget)
                if full.contains_one():
                    continue
                disjoint = "fail"
            except BudgetExceeded:
                disjoint = "inconclusive"
            break
        report["disjoint"] = disjoint
        _merge(report, {"status": disjoint})
    return report


def nc_intersection(
    charts: Mapping[str, ChartPresentation],
    step: Mapping,
    budget: Budget = DEFAULT_BUDGET,
    with_certificates: bool = False,
) -> dict:
    """Certify the normal-crossings hypothesis: the center lies in the
    branch cut out by the distinguished non-scaling monomial variable,
    and for every subset of the scaling variables the further
    intersection is smooth of the matching codimension, or empty."""
    base = charts[step["base"]].localized(step.get("localize", []))
    centers = parse_step_centers(step, charts[step["base"]])
    scalings = [n for n in base.monomial if n in base.scaling_names()]
    report = {"step": step["step"], "base": step["base"], "status": "pass",
              "centers": []}
    groups = dedup_groups(base.excluded)

    branch = [n for n in base.monomial if n not in base.scaling_names()]

    for center in centers:
        reg, rows, _, cols = _center_system(base, step, center)
        entry = {"scaling": center.scaling, "subsets": []}
        choices = list(itertools.product(*groups)) if groups else [()]
        piece_ctxs = []
        for choice in choices:
            inverted = [g.map_registry(reg) for g in choice]
            ctx = PieceContext(reg, rows, inverted, budget)
            piece_ctxs.append((choice, ctx, ctx.contradictory()))

        # the center must lie inside the exceptional branch {P = 0}
        contained = "pass"
        for name in branch:
            pvar = Polynomial.variable(reg, name)
            if any(r == pvar or r == -pvar for r in rows):
                continue  # the branch variable is literally a generator
            for choice, ctx, contra in piece_ctxs:
                if contra or ctx.reduces_to_zero(pvar):
                    continue
                try:
                    full = groebner(list(rows), reg, budget=budget)
                    if full.normal_form(pvar).is_zero():
                        continue
                    contained = "fail"
                except BudgetExceeded:
                    contained = "inconclusive"
                break
        entry["contained"] = contained
        _merge(report, {"status": contained})

        # walk subsets by size; a contradictory subset kills its supersets
        dead: List[frozenset] = []
        for size in range(1, len(scalings) + 1):
            for subset in itertools.combinations(scalings, size):
                sset = frozenset(subset)
                if any(d <= sset for d in dead):
                    continue
                sub_entry = {"subset": list(subset), "pieces": []}
                tvars = [Polynomial.variable(reg, t) for t in subset]
                sub_cols = [c for c in cols if c not in sset]
                all_empty = True
                for choice, ctx, contra in piece_ctxs:
                    pe = {"piece": [format_poly(g) for g in choice]}
                    if contra:
                        pe["status"] = "pass"
                        pe["detail"] = "piece misses the center"
                        sub_entry["pieces"].append(pe)
                        continue
                    sctx = ctx.with_more(ideal=tvars)
                    if sctx.contradictory():
                        pe["status"] = "pass"
                        pe["detail"] = "empty intersection"
                        sub_entry["pieces"].append(pe)
                        continue
                    all_empty = False
                    pe.update(unit_minor(sctx, list(rows) + tvars,
                                         list(sub_cols) + list(subset),
                                         budget,
                                         with_certificate=with_certificates))
                    sub_entry["pieces"].append(pe)
                    _merge(report, pe)
                if all_empty:
                    dead.append(sset)
                entry["subsets"].append(sub_entry)
        report["centers"].append(entry)
    return report


def semistable(
    chart: ChartPresentation,
    budget: Budget = DEFAULT_BUDGET,
    with_certificates: bool = True,
) -> dict:
    """Certify semistability of a chart presentation: on every piece of
    the exclusion cover the equations admit a Jacobian unit minor using
    only non-monomial columns, so the chart is etale-locally the
    standard model (product of the monomial variables = p) times an
    affine space."""
    reg = chart.registry
    cols = [n for n in reg.names if n not in chart.monomial]
    rows = list(chart.equations)
    report = {"chart": chart.name, "status": "pass", "pieces": []}
    groups = dedup_groups(chart.excluded)
    choices = itertools.product(*groups) if groups else [()]
    for choice in choices:
        ctx = PieceContext(reg, rows, tuple(choice), budget)
        pe = {"piece": [format_poly(g) for g in choice]}
        if ctx.contradictory():
            pe["status"] = "pass"
            pe["detail"] = "empty piece"
        elif not rows:
            pe["status"] = "pass"
            pe["detail"] = "no equations"
        else:
            pe.update(unit_minor(ctx, rows, cols, budget,
                                 with_certificate=with_certificates))
        report["pieces"].append(pe)
        _merge(report, pe)
    return report
