"""Groebner bases over Q with witness tracking and explicit budgets.

Everything here is deliberately certificate-oriented:

* ``groebner`` runs Buchberger's algorithm; with ``witness=True`` every
  basis element carries cofactors over the input generators, so ideal
  membership answers come with a re-checkable combination.
* ``contains`` / ``is_unit`` / ``nonvanishing`` return explicit
  certificates (or a refutation point / "inconclusive").
* All computations respect a :class:`Budget` (S-pair count and total
  degree cap).  Exceeding the budget raises :class:`BudgetExceeded`,
  which callers surface as *inconclusive* -- never as "false".

Localization is handled with the Rabinowitsch trick: a declared inverse
g contributes a relation ``u*g - 1`` in a fresh variable u.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .poly import Exponent, Polynomial, VarRegistry, grevlex_key, poly_sum

Terms = Dict[Exponent, Fraction]


@dataclass(frozen=True)
class Budget:
    """Resource limits for a single Groebner computation."""

    max_spairs: int = 1_000_000
    max_degree: int = 40


DEFAULT_BUDGET = Budget()


class BudgetExceeded(Exception):
    """The computation hit its budget; the answer is inconclusive."""

    def __init__(self, what: str):
        super().__init__(f"budget exceeded: {what}")
        self.what = what


# ---------------------------------------------------------------------------
# term orders


class MonomialOrder:
    """A term order given as a sort key on exponent tuples."""

    def __init__(self, name: str, key):
        self.name = name
        self.key = key

    @staticmethod
    def grevlex() -> "MonomialOrder":
        return MonomialOrder("grevlex", grevlex_key)

    @staticmethod
    def elimination(registry: VarRegistry, drop: Sequence[str]) -> "MonomialOrder":
        """Block order: the ``drop`` variables dominate; grevlex in each
        block.  A Groebner basis w.r.t. this order intersects to a basis
        of the elimination ideal."""
        drop_idx = tuple(registry.index(n) for n in drop)
        drop_set = set(drop_idx)
        keep_idx = tuple(i for i in range(len(registry)) if i not in drop_set)

        def key(exp: Exponent):
            d = tuple(exp[i] for i in drop_idx)
            k = tuple(exp[i] for i in keep_idx)
            return (
                sum(d),
                tuple(-e for e in reversed(d)),
                sum(k),
                tuple(-e for e in reversed(k)),
            )

        return MonomialOrder(f"elim({','.join(drop)})", key)


# ---------------------------------------------------------------------------
# low-level term-dict helpers (hot path: avoid Polynomial object churn)


def _sub_scaled(d: Terms, other: Terms, exp: Exponent, coeff: Fraction) -> None:
    """In place: d -= coeff * x^exp * other."""
    for e, c in other.items():
        t = tuple(a + b for a, b in zip(e, exp))
        nv = d.get(t, 0) - coeff * c
        if nv:
            d[t] = nv
        else:
            d.pop(t, None)


def _wit_sub_scaled(
    wit: Dict[int, Terms], other: Mapping[int, Terms], exp: Exponent, coeff: Fraction
) -> None:
    for idx, terms in other.items():
        dst = wit.setdefault(idx, {})
        _sub_scaled(dst, terms, exp, coeff)
        if not dst:
            del wit[idx]


def _scale(d: Terms, c: Fraction) -> Terms:
    return {e: v * c for e, v in d.items()}


def _max_degree(d: Terms) -> int:
    return max((sum(e) for e in d), default=-1)


# ---------------------------------------------------------------------------


class GroebnerBasis:
    """A (reduced, monic) Groebner basis, optionally with witnesses.

    ``witnesses[k]`` expresses ``basis[k]`` as ``sum_i w[i] * gens[i]``
    over the *original* generators.
    """

    def __init__(
        self,
        registry: VarRegistry,
        order: MonomialOrder,
        basis: List[Polynomial],
        witnesses: Optional[List[Dict[int, Polynomial]]],
        gens: List[Polynomial],
    ):
        self.registry = registry
        self.order = order
        self.basis = basis
        self.witnesses = witnesses
        self.gens = gens
        self._leads = [p.leading(order.key)[0] for p in basis]

    def contains_one(self) -> bool:
        return any(p.is_constant() and not p.is_zero() for p in self.basis)

    def normal_form(self, f: Polynomial, with_witness: bool = False):
        """Fully reduce f; returns remainder (and a witness over the
        original generators when requested)."""
        rem, qwit = _reduce_full(
            dict(f.terms),
            {} if with_witness else None,
            [dict(p.terms) for p in self.basis],
            self._leads,
            [p.total_degree() for p in self.basis],
            self.order.key,
            DEFAULT_BUDGET,
        )
        remainder = Polynomial(self.registry, rem)
        if not with_witness:
            return remainder
        if self.witnesses is None:
            raise ValueError("basis was computed without witness tracking")
        # qwit maps basis index -> quotient terms, with f = sum q_k b_k + rem;
        # compose with the basis witnesses to land on the original gens.
        acc: Dict[int, Polynomial] = {}
        for k, qterms in qwit.items():
            q = Polynomial(self.registry, qterms)
            for gi, w in self.witnesses[k].items():
                prev = acc.get(gi)
                term = q * w
                acc[gi] = term if prev is None else prev + term
        return remainder, {gi: w for gi, w in acc.items() if not w.is_zero()}

    def one_witness(self) -> Dict[int, Polynomial]:
        """Witness for 1 when the ideal is the unit ideal."""
        one = Polynomial.const(self.registry, 1)
        rem, wit = self.normal_form(one, with_witness=True)
        if not rem.is_zero():
            raise ValueError("ideal is not the unit ideal")
        return wit

    def extended(self, extra: Sequence[Polynomial], budget: Budget = DEFAULT_BUDGET,
                 witness: bool = False) -> "GroebnerBasis":
        """Groebner basis of (self) + extra, restarting Buchberger from the
        already-completed basis."""
        seed = list(self.basis) + list(extra)
        return groebner(seed, self.registry, self.order, budget, witness=witness)


def _reduce_full(work: Terms, qwit, basis_terms, leads, tot_degs, key, budget: Budget):
    """Full normal form of the term-dict ``work`` against ``basis_terms``.

    Returns (remainder_terms, quotients) where quotients maps basis index
    to quotient terms with: input = sum_k q_k * b_k + remainder.
    ``qwit=None`` disables quotient tracking.
    """
    rem: Terms = {}
    nb = len(basis_terms)
    while work:
        e = max(work, key=key)
        c = work.pop(e)
        for k in range(nb):
            le = leads[k]
            if all(a >= b for a, b in zip(e, le)):
                t = tuple(a - b for a, b in zip(e, le))
                if sum(t) + tot_degs[k] > budget.max_degree:
                    raise BudgetExceeded("degree cap during reduction")
                # basis is monic: quotient coefficient is c itself
                work[e] = c  # reinstate before subtracting the full multiple
                _sub_scaled(work, basis_terms[k], t, c)
                if qwit is not None:
                    q = qwit.setdefault(k, {})
                    q[t] = q.get(t, Fraction(0)) + c
                break
        else:
            rem[e] = c
    return rem, (qwit if qwit is not None else {})


def groebner(
    gens: Sequence[Polynomial],
    registry: VarRegistry,
    order: MonomialOrder | None = None,
    budget: Budget = DEFAULT_BUDGET,
    witness: bool = False,
) -> GroebnerBasis:
    """Buchberger's algorithm with pair pruning and full interreduction."""
    order = order or MonomialOrder.grevlex()
    key = order.key
    gens = [g for g in gens]
    for g in gens:
        if g.registry != registry:
            raise ValueError("generator registry mismatch")
        if g.total_degree() > budget.max_degree:
            raise BudgetExceeded("input degree above cap")

    basis_terms: List[Terms] = []
    leads: List[Exponent] = []
    tot_degs: List[int] = []
    wits: List[Dict[int, Terms]] = []

    def add_poly(terms: Terms, wit: Dict[int, Terms]):
        lead = max(terms, key=key)
        lc = terms[lead]
        if lc != 1:
            inv = 1 / lc
            terms = _scale(terms, inv)
            wit = {i: _scale(w, inv) for i, w in wit.items()}
        basis_terms.append(terms)
        leads.append(lead)
        tot_degs.append(_max_degree(terms))
        wits.append(wit)
        return len(basis_terms) - 1

    for i, g in enumerate(gens):
        if g.is_zero():
            continue
        one_exp = (0,) * len(registry)
        add_poly(dict(g.terms), {i: {one_exp: Fraction(1)}} if witness else {})

    import heapq

    # pair queue: (sort key, i, j, lcm)
    pairs: List[Tuple] = []

    def lcm_of(i: int, j: int) -> Exponent:
        return tuple(max(a, b) for a, b in zip(leads[i], leads[j]))

    def push_pairs(j: int):
        for i in range(j):
            l = lcm_of(i, j)
            heapq.heappush(pairs, (key(l), i, j, l))

    for j in range(len(basis_terms)):
        push_pairs(j)

    done_pairs = set()
    spairs = 0
    while pairs:
        _, i, j, l = heapq.heappop(pairs)
        done_pairs.add((i, j))
        # Buchberger's first criterion: coprime leading terms.
        if all(a + b == c for a, b, c in zip(leads[i], leads[j], l)):
            continue
        # Chain criterion: some k with lead_k | lcm and both sub-pairs done.
        skip = False
        for k in range(len(basis_terms)):
            if k in (i, j):
                continue
            if all(a <= b for a, b in zip(leads[k], l)):
                p1 = (min(i, k), max(i, k))
                p2 = (min(j, k), max(j, k))
                if p1 in done_pairs and p2 in done_pairs:
                    skip = True
                    break
        if skip:
            continue
        spairs += 1
        if spairs > budget.max_spairs:
            raise BudgetExceeded("S-pair cap")
        if sum(l) > budget.max_degree:
            raise BudgetExceeded("degree cap on S-pair lcm")
        ti = tuple(a - b for a, b in zip(l, leads[i]))
        tj = tuple(a - b for a, b in zip(l, leads[j]))
        if max(sum(ti) + tot_degs[i], sum(tj) + tot_degs[j]) > budget.max_degree:
            raise BudgetExceeded("degree cap on S-polynomial")
        s: Terms = {}
        _sub_scaled(s, basis_terms[i], ti, Fraction(-1))  # += x^ti * b_i
        _sub_scaled(s, basis_terms[j], tj, Fraction(1))  # -= x^tj * b_j
        swit: Dict[int, Terms] = {}
        if witness:
            _wit_sub_scaled(swit, wits[i], ti, Fraction(-1))
            _wit_sub_scaled(swit, wits[j], tj, Fraction(1))
        rem, q = _reduce_full(
            s, {} if witness else None, basis_terms, leads, tot_degs, key, budget
        )
        if not rem:
            continue
        if _max_degree(rem) > budget.max_degree:
            raise BudgetExceeded("degree cap on new basis element")
        if witness:
            for k, qterms in q.items():
                for e, c in list(qterms.items()):
                    _wit_sub_scaled(swit, wits[k], e, c)
        idx = add_poly(rem, swit)
        if sum(leads[idx]) == 0:
            break  # the ideal is the whole ring; no need to continue
        push_pairs(idx)

    # -- interreduce to the reduced basis ----------------------------------
    # Drop elements whose lead is divisible by another remaining lead.
    order_idx = sorted(range(len(basis_terms)), key=lambda k: key(leads[k]))
    keep: List[int] = []
    for k in order_idx:
        if any(all(a <= b for a, b in zip(leads[m], leads[k])) for m in keep):
            continue
        keep.append(k)
    red_terms = [basis_terms[k] for k in keep]
    red_leads = [leads[k] for k in keep]
    red_wits = [wits[k] for k in keep]
    # Tail-reduce each element against the others.
    final_terms: List[Terms] = []
    final_wits: List[Dict[int, Terms]] = []
    for pos in range(len(red_terms)):
        others_t = red_terms[:pos] + red_terms[pos + 1 :]
        others_l = red_leads[:pos] + red_leads[pos + 1 :]
        rem, q = _reduce_full(
            dict(red_terms[pos]),
            {} if witness else None,
            others_t,
            others_l,
            [_max_degree(t) for t in others_t],
            key,
            budget,
        )
        wit = {i: dict(w) for i, w in red_wits[pos].items()}
        if witness:
            omap = list(range(len(red_terms)))
            omap.pop(pos)
            for k, qterms in q.items():
                for e, c in list(qterms.items()):
                    _wit_sub_scaled(wit, red_wits[omap[k]], e, c)
        final_terms.append(rem)
        final_wits.append(wit)

    basis = [Polynomial(registry, t) for t in final_terms]
    witnesses = None
    if witness:
        witnesses = [
            {i: Polynomial(registry, w) for i, w in fw.items()} for fw in final_wits
        ]
    return GroebnerBasis(registry, order, basis, witnesses, list(gens))


# ---------------------------------------------------------------------------
# membership / elimination / saturation


@dataclass
class ContainsResult:
    status: str  # "yes" | "no" | "inconclusive"
    witness: Optional[Dict[int, Polynomial]] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.status == "yes"

    def verify(self, gens: Sequence[Polynomial], f: Polynomial) -> bool:
        """Re-check the membership combination by pure expansion."""
        if self.status != "yes":
            return False
        acc = Polynomial.zero(f.registry)
        for i, w in (self.witness or {}).items():
            acc = acc + w * gens[i]
        return acc == f


def contains(
    gens: Sequence[Polynomial],
    f: Polynomial,
    registry: VarRegistry,
    budget: Budget = DEFAULT_BUDGET,
    witness: bool = True,
) -> ContainsResult:
    """Is f in the ideal generated by gens?  With a combination witness."""
    try:
        gb = groebner(gens, registry, None, budget, witness=witness)
        if witness:
            rem, wit = gb.normal_form(f, with_witness=True)
        else:
            rem, wit = gb.normal_form(f), None
    except BudgetExceeded as exc:
        return ContainsResult("inconclusive", detail=str(exc))
    if rem.is_zero():
        return ContainsResult("yes", witness=wit)
    return ContainsResult("no", detail="nonzero normal form")


def eliminate(
    gens: Sequence[Polynomial],
    registry: VarRegistry,
    drop: Sequence[str],
    budget: Budget = DEFAULT_BUDGET,
) -> Tuple[VarRegistry, List[Polynomial]]:
    """Generators of the elimination ideal (drop the listed variables)."""
    order = MonomialOrder.elimination(registry, drop)
    gb = groebner(gens, registry, order, budget)
    dropset = set(drop)
    target = VarRegistry([n for n in registry.names if n not in dropset])
    kept = []
    for p in gb.basis:
        if all(v not in dropset for v in p.variables()):
            kept.append(p.map_registry(target))
    return target, kept


def fresh_names(registry: VarRegistry, base: str, count: int) -> List[str]:
    names: List[str] = []
    k = 0
    while len(names) < count:
        cand = f"{base}{k}"
        if cand not in registry and cand not in names:
            names.append(cand)
        k += 1
    return names


def saturate(
    gens: Sequence[Polynomial],
    registry: VarRegistry,
    f: Polynomial,
    budget: Budget = DEFAULT_BUDGET,
) -> List[Polynomial]:
    """The saturation (gens) : f^infty via Rabinowitsch + elimination."""
    (u,) = fresh_names(registry, "usat", 1)
    ext = registry.extend([u])
    lifted = [g.map_registry(ext) for g in gens]
    rab = Polynomial.variable(ext, u) * f.map_registry(ext) - 1
    _, result = eliminate(lifted + [rab], ext, [u], budget)
    return [p.map_registry(registry) for p in result]


def saturate_many(
    gens: Sequence[Polynomial],
    registry: VarRegistry,
    factors: Sequence[Polynomial],
    budget: Budget = DEFAULT_BUDGET,
) -> List[Polynomial]:
    """Saturate successively by each factor (equals saturation by the
    product, since each step is a full saturation)."""
    out = list(gens)
    for f in factors:
        out = saturate(out, registry, f, budget)
    return out


# ---------------------------------------------------------------------------
# localization and unit certificates


@dataclass(frozen=True)
class LocalizedPresentation:
    """An affine patch: V(gens) with the listed polynomials inverted."""

    registry: VarRegistry
    gens: Tuple[Polynomial, ...]
    inverted: Tuple[Polynomial, ...] = ()

    @staticmethod
    def make(registry, gens, inverted=()):
        return LocalizedPresentation(registry, tuple(gens), tuple(inverted))


@dataclass
class UnitCertificate:
    """A Nullstellensatz-style certificate that the targets have no
    common zero on a localized patch.

    ``parts`` pairs each generator of the auxiliary system (patch
    equations, Rabinowitsch relations u*g - 1, and the targets) with a
    combiner; the combination must expand to exactly 1.  ``verify`` does
    that expansion with plain polynomial arithmetic -- no Groebner.
    """

    registry: VarRegistry  # extended registry (with u-variables)
    parts: List[Tuple[str, Polynomial, Polynomial]]  # (label, generator, combiner)

    def verify(self) -> bool:
        acc = poly_sum((g * c for _, g, c in self.parts), self.registry)
        return acc == Polynomial.const(self.registry, 1)

    def to_json(self) -> dict:
        from .parse import format_poly

        return {
            "registry": list(self.registry.names),
            "parts": [
                {"label": lab, "generator": format_poly(g), "combiner": format_poly(c)}
                for lab, g, c in self.parts
            ],
        }


@dataclass
class NoCertificate:
    """Failure outcome for a certificate search."""

    status: str  # "no" (refuted) | "inconclusive"
    detail: str = ""
    point: Optional[Dict[str, Fraction]] = None

    def __bool__(self) -> bool:
        return False


def _aux_system(lp: LocalizedPresentation, targets: Sequence[Polynomial]):
    """Extended registry + labelled generator list for emptiness checks."""
    n_inv = len(lp.inverted)
    unames = fresh_names(lp.registry, "u_inv", n_inv)
    ext = lp.registry.extend(unames)
    labelled: List[Tuple[str, Polynomial]] = []
    for k, g in enumerate(lp.gens):
        labelled.append((f"equation[{k}]", g.map_registry(ext)))
    for k, (g, u) in enumerate(zip(lp.inverted, unames)):
        rel = Polynomial.variable(ext, u) * g.map_registry(ext) - 1
        labelled.append((f"inverse[{k}]", rel))
    for k, t in enumerate(targets):
        labelled.append((f"target[{k}]", t.map_registry(ext)))
    return ext, labelled


def nonvanishing(
    lp: LocalizedPresentation,
    targets: Sequence[Polynomial],
    budget: Budget = DEFAULT_BUDGET,
    search_point: bool = False,
) -> UnitCertificate | NoCertificate:
    """Certify that the targets have no common zero on the patch.

    On success the result is a re-verifiable :class:`UnitCertificate`;
    otherwise a :class:`NoCertificate` (with a rational refutation point
    when ``search_point`` finds one on a small grid).
    """
    ext, labelled = _aux_system(lp, targets)
    system = [g for _, g in labelled]
    res = contains(system, Polynomial.const(ext, 1), ext, budget, witness=True)
    if res.status == "yes":
        parts = [
            (lab, g, res.witness.get(i, Polynomial.zero(ext)))
            for i, (lab, g) in enumerate(labelled)
        ]
        parts = [(lab, g, c) for lab, g, c in parts if not c.is_zero()]
        return UnitCertificate(ext, parts)
    if res.status == "inconclusive":
        return NoCertificate("inconclusive", detail=res.detail)
    point = None
    if search_point:
        point = _find_zero(lp, targets)
    return NoCertificate("no", detail="1 not in the auxiliary ideal", point=point)


def is_unit(
    lp: LocalizedPresentation,
    f: Polynomial,
    budget: Budget = DEFAULT_BUDGET,
    search_point: bool = False,
) -> UnitCertificate | NoCertificate:
    """Is f a unit (nowhere vanishing) on the localized patch?"""
    return nonvanishing(lp, [f], budget, search_point)


def _find_zero(
    lp: LocalizedPresentation,
    targets: Sequence[Polynomial],
    values: Sequence[int] = (0, 1, -1),
) -> Optional[Dict[str, Fraction]]:
    """Small-grid search for a common zero of the targets on the patch."""
    used: List[str] = []
    for p in list(lp.gens) + list(lp.inverted) + list(targets):
        for v in p.variables():
            if v not in used:
                used.append(v)
    if len(used) > 12:  # grid too large; give up quietly
        return None

    import itertools

    for combo in itertools.product(values, repeat=len(used)):
        point = dict(zip(used, combo))
        if any(g.evaluate(point) != 0 for g in lp.gens):
            continue
        if any(g.evaluate(point) == 0 for g in lp.inverted):
            continue
        if all(t.evaluate(point) == 0 for t in targets):
            full = {n: Fraction(pv) for n, pv in point.items()}
            return full
    return None
