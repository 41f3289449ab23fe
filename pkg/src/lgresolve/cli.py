"""Command-line driver: data ingestion, verification plans, reports.

The ``resolve`` entry point assembles a :class:`VerificationPlan` from
the subcommand, runs its goals (optionally in parallel), prints one
status line per goal, and optionally writes a JSON report.  Reports are
deterministic: a plan plus the shipped data fully determines the bytes
written, independent of ``--jobs`` and of wall-clock conditions (all
timing output goes to stderr).

Exit codes: 0 every goal passed, 2 at least one goal failed (refuted),
3 no failure but at least one goal inconclusive (budget), 1 usage or
data error.
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Mapping, Optional, Sequence, Tuple

import click

from . import certify, pluecker, schubert
from .chart import (
    ChartPresentation,
    load_centers,
    load_elements,
    load_tower,
    parse_step_centers,
    pullback_check,
    covering_check,
)
from .certify import _center_system, _jacobian
from .groebner import Budget, BudgetExceeded, DEFAULT_BUDGET
from .parse import format_poly

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_FAIL = 2
EXIT_INCONCLUSIVE = 3

_STATUS_RANK = {"pass": 0, "inconclusive": 1, "fail": 2}
_EXIT_FOR = {"pass": EXIT_PASS, "inconclusive": EXIT_INCONCLUSIVE,
             "fail": EXIT_FAIL}


# ---------------------------------------------------------------------------
# plans


@dataclass
class VerificationPlan:
    """A named list of goals plus budgets and output paths.

    Each goal is a (name, thunk) pair; the thunk returns a JSON-ready
    report dict with at least a ``"status"`` field.  A plan plus the
    shipped data fully determines the report.
    """

    goals: List[Tuple[str, Callable[[], dict]]] = field(default_factory=list)
    budget: Budget = DEFAULT_BUDGET
    jobs: int = 1
    report_path: Optional[str] = None


def _jsonable(obj):
    """Recursively convert a report to plain JSON types (certificates
    and other rich objects serialize through their ``to_json``)."""
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def _combine(statuses: Sequence[str]) -> str:
    worst = "pass"
    for s in statuses:
        if _STATUS_RANK.get(s, 2) > _STATUS_RANK[worst]:
            worst = s
    return worst


def _run_goal(name: str, thunk: Callable[[], dict]) -> dict:
    t0 = time.monotonic()
    try:
        report = thunk()
    except BudgetExceeded as exc:
        report = {"status": "inconclusive", "detail": str(exc)}
    dt = time.monotonic() - t0
    print(f"[{name}] {report.get('status', '?')} in {dt:.1f}s",
          file=sys.stderr, flush=True)
    return report


def run(plan: VerificationPlan) -> int:
    """Execute a plan; emit status lines, optionally a report file.

    Returns the process exit code.  Goal order (and therefore report
    bytes) is fixed by the plan; only scheduling varies with ``jobs``.
    """
    if plan.jobs > 1 and len(plan.goals) > 1:
        with ThreadPoolExecutor(max_workers=plan.jobs) as pool:
            futures = [pool.submit(_run_goal, n, t) for n, t in plan.goals]
            reports = [f.result() for f in futures]
    else:
        reports = [_run_goal(n, t) for n, t in plan.goals]

    entries = []
    for (name, _), report in zip(plan.goals, reports):
        entries.append({"goal": name, **_jsonable(report)})
        print(f"{name}: {report.get('status', '?')}")
    overall = _combine([r.get("status", "fail") for r in reports])
    print(f"overall: {overall}")

    if plan.report_path is not None:
        doc = {"schema": 1, "status": overall, "goals": entries}
        with open(plan.report_path, "w") as fh:
            fh.write(json.dumps(doc, indent=2, sort_keys=True))
            fh.write("\n")
    return _EXIT_FOR[overall]


# ---------------------------------------------------------------------------
# goal builders (each thunk loads its own data so goals stay independent)


def _load_steps() -> List[Mapping]:
    try:
        return load_centers()
    except Exception as exc:  # malformed shipped/overridden data
        raise click.ClickException(f"data error reading centers: {exc}")


def _step_doc(n: int) -> Mapping:
    for s in _load_steps():
        if s["step"] == n:
            return s
    raise click.ClickException(f"no shipped data for step {n}")


def _charts() -> Mapping[str, ChartPresentation]:
    try:
        return load_tower()
    except Exception as exc:
        raise click.ClickException(f"data error reading charts: {exc}")


def chart_goal(name: str, budget: Budget) -> Callable[[], dict]:
    def thunk() -> dict:
        charts = _charts()
        chart = charts[name]
        problems = chart.validate()
        report = {"chart": name,
                  "validate": problems,
                  "status": "fail" if problems else "pass"}
        if chart.parent is not None:
            pb = pullback_check(chart, charts[chart.parent], budget)
            report["pullback"] = pb
            report["status"] = _combine([report["status"], pb["status"]])
        return report

    return thunk


def step_goal(n: int, budget: Budget) -> Callable[[], dict]:
    def thunk() -> dict:
        charts = _charts()
        step = _step_doc(n)
        smooth = certify.smooth_center(charts, step, budget)
        nc = certify.nc_intersection(charts, step, budget)
        return {"step": n,
                "smooth": smooth,
                "normal_crossings": nc,
                "status": _combine([smooth["status"], nc["status"]])}

    return thunk


def semistable_goal(name: str, budget: Budget) -> Callable[[], dict]:
    def thunk() -> dict:
        charts = _charts()
        return certify.semistable(charts[name], budget)

    return thunk


# tower step -> which identity blocks live on that step's child chart
_IDENTITY_STEPS = {3: ("cofactors",),
                   4: ("factorization-1",),
                   5: ("factorization-2", "determinant"),
                   6: ("factorization-3",)}


def identities_goal(budget: Budget,
                    step: Optional[int] = None) -> Callable[[], dict]:
    def thunk() -> dict:
        charts = _charts()
        wanted = _IDENTITY_STEPS.get(step) if step is not None else None
        if step is not None and wanted is None:
            raise click.ClickException(
                f"step {step} ships no identity tables")
        steps = pluecker.load_steps(charts)
        blocks: dict = {}
        if wanted is None or "cofactors" in wanted or "determinant" in wanted:
            blocks["cofactors"] = pluecker.verify_cofactor_identities(
                charts, budget)
        for k in (1, 2, 3):
            tag = f"factorization-{k}"
            if wanted is None or tag in wanted:
                blocks[tag] = pluecker.verify_factorization(
                    steps[k], charts, budget)
        if wanted is None:
            failures = (pluecker.check_pluecker_relations(2)
                        + pluecker.check_pluecker_relations(3))
            blocks["pluecker-relations"] = {
                "status": "fail" if failures else "pass",
                "failures": failures,
            }
        return {"blocks": blocks,
                "status": _combine([b["status"] for b in blocks.values()])}

    return thunk


def nonvanishing_goal(k: int, budget: Budget) -> Callable[[], dict]:
    def thunk() -> dict:
        charts = _charts()
        steps = pluecker.load_steps(charts)
        return pluecker.verify_nonvanishing(steps[k], charts, budget)

    return thunk


def cover_goal(budget: Budget,
               omit: Sequence[str] = ()) -> Callable[[], dict]:
    def thunk() -> dict:
        charts = _charts()
        elements = load_elements()
        return covering_check(charts, elements, omit, budget)

    return thunk


def full_plan(budget: Budget, jobs: int,
              report_path: Optional[str]) -> VerificationPlan:
    goals: List[Tuple[str, Callable[[], dict]]] = []
    goals.append(("chart-L0", chart_goal("L0", budget)))
    for name in ("T0", "T1", "T2", "T3", "T4", "T5"):
        goals.append((f"chart-{name}", chart_goal(name, budget)))
    for n in range(1, 7):
        goals.append((f"step-{n}", step_goal(n, budget)))
    for name in ("T0", "T1", "T2", "T3", "T4", "T5"):
        goals.append((f"semistable-{name}", semistable_goal(name, budget)))
    goals.append(("identities", identities_goal(budget)))
    for k in (1, 2, 3):
        goals.append((f"nonvanishing-k{k}", nonvanishing_goal(k, budget)))
    goals.append(("cover", cover_goal(budget)))
    return VerificationPlan(goals, budget, jobs, report_path)


# ---------------------------------------------------------------------------
# explain


def _aligned(rows: List[List[str]]) -> List[str]:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip()
            for r in rows]


def explain_step(n: int) -> str:
    """The smoothness certificate data for one tower step, as the
    Jacobian matrix of each center system with labelled columns."""
    charts = _charts()
    step = _step_doc(n)
    base = charts[step["base"]].localized(step.get("localize", []))
    centers = parse_step_centers(step, charts[step["base"]])
    out: List[str] = [f"step {n}: centers on chart {step['base']}"]
    for idx, center in enumerate(centers):
        reg, rows, _, cols = _center_system(base, step, center)
        jac = _jacobian(rows, cols, reg)
        out.append("")
        out.append(f"center {idx + 1} (scaling variable {center.scaling}), "
                   f"system of {len(rows)} equations:")
        for g in rows:
            out.append(f"  {format_poly(g)} = 0")
        out.append("Jacobian (rows follow the system, columns are partial "
                   "derivatives):")
        table = [[""] + [f"d/d{c}" for c in cols]]
        for r_idx, row in enumerate(jac):
            table.append([f"row {r_idx + 1}"]
                         + [format_poly(e) for e in row])
        out.extend("  " + line for line in _aligned(table))
        if reg is not base.registry:
            # the system above uses the extended presentation; show the
            # raw expression generator's own Jacobian row as well
            from .certify import _ordered_columns

            raw_cols = _ordered_columns(base.registry, base)
            for g in center.generators:
                if len(g.terms) < 2:
                    continue
                out.append("raw expression generator "
                           f"{format_poly(g)}, Jacobian row:")
                (raw_row,) = _jacobian([g], raw_cols, base.registry)
                for col, e in zip(raw_cols, raw_row):
                    if not e.is_zero():
                        out.append(f"  d/d{col} = {format_poly(e)}")
    return "\n".join(out)


_K3_CHAIN = """\
non-vanishing of the twenty reduced minors on the final chart

The targets are the entries of the reduced minor table; their common
vanishing is refuted piece by piece over the exclusion cover.  The
derivation the certificates mechanize:

  1. M_{4,5,6} = a23_5^2 * D_5 with a23_5 invertible, so if all targets
     vanish then D_5 = 0.
  2. The chart relation a23_5^2*l5*D_5 + a23_5*d11_5*d23_5
     + m3*d13_5*(l2*a13_5*d11_5 + l4*a33_5*d13_5) = 0 then pins the
     remaining terms; M_{3,5,6} = P5*d11_5 and the exclusion P5 != 0 or
     D_5 != 0 make P5 a unit on the pieces at stake, so d11_5 = 0.
  3. With d11_5 = 0 the relation collapses to m3*l4*a33_5*d13_5^2 = 0;
     the exclusions m3 != 0, l4 != 0 leave a33_5*d13_5^2, and the
     targets containing d13_5 and d23_5 force d13_5 = d23_5 = 0.
  4. The remaining chart equations then force l5*P5 to be a unit while
     l1 and a33_5 vanish, contradicting an excluded locus -- so on every
     piece some target is a unit, and the emitted certificate writes 1
     as an explicit combination.
"""


def explain_nonvanishing(k: int) -> str:
    charts = _charts()
    steps = pluecker.load_steps(charts)
    report = pluecker.verify_nonvanishing(steps[k], charts)
    routes: dict = {}
    for pe in report["pieces"]:
        routes[pe.get("route", "?")] = routes.get(pe.get("route", "?"), 0) + 1
    out = []
    if k == 3:
        out.append(_K3_CHAIN)
    out.append(f"status: {report['status']} over {len(report['pieces'])} "
               f"cover pieces of {report['chart']}")
    out.append("certificate routes:")
    for route in sorted(routes):
        out.append(f"  {routes[route]:4d}  {route}")
    return "\n".join(out)


def explain_goal_text(goal: str) -> str:
    goal = goal.strip().lower().replace(" ", "-")
    if goal.startswith("step-"):
        try:
            n = int(goal[5:])
        except ValueError:
            n = 0
        if 1 <= n <= 6:
            return explain_step(n)
    for k in (1, 2, 3):
        if goal in (f"nonvanishing-k{k}", f"k{k}-nonvanishing",
                    f"k={k}-non-vanishing", f"k={k}-nonvanishing"):
            return explain_nonvanishing(k)
    known = [f"step-{n}" for n in range(1, 7)] + \
        [f"nonvanishing-k{k}" for k in (1, 2, 3)]
    raise click.ClickException(
        f"unknown goal {goal!r}; known goals: {', '.join(known)}")


# ---------------------------------------------------------------------------
# command line


def _budget(budget_spairs: Optional[int]) -> Budget:
    if budget_spairs is None:
        return DEFAULT_BUDGET
    if budget_spairs <= 0:
        raise click.ClickException("--budget-spairs must be positive")
    return Budget(max_spairs=budget_spairs,
                  max_degree=DEFAULT_BUDGET.max_degree)


@click.group()
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Goal-level parallelism (reports stay deterministic).")
@click.option("--budget-spairs", type=int, default=None,
              help="Cap on S-pair reductions per Groebner run.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False),
              default=None, help="Write the JSON report to this path.")
@click.pass_context
def cli(ctx: click.Context, jobs: int, budget_spairs: Optional[int],
        report_path: Optional[str]) -> None:
    """Certificate-producing verifier for the blow-up tower."""
    ctx.obj = {
        "jobs": max(1, jobs),
        "budget": _budget(budget_spairs),
        "report_path": report_path,
    }


def _run_single(ctx: click.Context, name: str,
                thunk: Callable[[], dict]) -> int:
    obj = ctx.obj
    plan = VerificationPlan([(name, thunk)], obj["budget"], obj["jobs"],
                            obj["report_path"])
    return run(plan)


@cli.group()
def verify() -> None:
    """Run verification goals against the shipped data."""


@verify.command("all")
@click.pass_context
def verify_all(ctx: click.Context) -> int:
    """Every goal: charts, the six steps, semistability, identities,
    non-vanishing, and the covering certificate."""
    obj = ctx.obj
    plan = full_plan(obj["budget"], obj["jobs"], obj["report_path"])
    return run(plan)


@verify.command("chart")
@click.argument("name")
@click.pass_context
def verify_chart(ctx: click.Context, name: str) -> int:
    """Validate one chart presentation and its pullback to the parent."""
    if name not in _charts():
        raise click.ClickException(f"unknown chart {name!r}")
    return _run_single(ctx, f"chart-{name}", chart_goal(name, ctx.obj["budget"]))


@verify.command("step")
@click.argument("n", type=click.IntRange(1, 6))
@click.pass_context
def verify_step(ctx: click.Context, n: int) -> int:
    """Smoothness and normal-crossings certificates for one tower step."""
    return _run_single(ctx, f"step-{n}", step_goal(n, ctx.obj["budget"]))


@verify.command("identities")
@click.option("--step", type=click.IntRange(1, 6), default=None,
              help="Restrict to the identity tables of one tower step.")
@click.pass_context
def verify_identities(ctx: click.Context, step: Optional[int]) -> int:
    """Cofactor, determinant and minor-factorization identities."""
    name = "identities" if step is None else f"identities-step-{step}"
    return _run_single(ctx, name, identities_goal(ctx.obj["budget"], step))


@verify.command("nonvanishing")
@click.option("--k", type=click.IntRange(1, 3), required=True,
              help="Which reduced minor table (1, 2 or 3).")
@click.pass_context
def verify_nonvanishing_cmd(ctx: click.Context, k: int) -> int:
    """Non-vanishing certificates for one reduced minor table."""
    return _run_single(ctx, f"nonvanishing-k{k}",
                       nonvanishing_goal(k, ctx.obj["budget"]))


@verify.command("cover")
@click.option("--omit", multiple=True,
              help="Leave out named group elements (for refutation tests).")
@click.pass_context
def verify_cover(ctx: click.Context, omit: Tuple[str, ...]) -> int:
    """Covering certificate from the shipped group-element translates."""
    return _run_single(ctx, "cover", cover_goal(ctx.obj["budget"], omit))


@verify.command("semistable")
@click.argument("name")
@click.pass_context
def verify_semistable(ctx: click.Context, name: str) -> int:
    """Semistability certificate for one chart."""
    if name not in _charts():
        raise click.ClickException(f"unknown chart {name!r}")
    return _run_single(ctx, f"semistable-{name}",
                       semistable_goal(name, ctx.obj["budget"]))


@cli.group("schubert")
def schubert_group() -> None:
    """Isotropic-subset combinatorics."""


@schubert_group.command("hasse")
@click.option("--g", "genus", type=click.IntRange(1, 6), required=True)
@click.option("--format", "fmt", type=click.Choice(["dot", "json"]),
              default="json", show_default=True)
def schubert_hasse(genus: int, fmt: str) -> int:
    """Emit the containment diagram of the Schubert varieties."""
    if fmt == "dot":
        click.echo(schubert.hasse_dot(genus))
    else:
        click.echo(schubert.hasse_json(genus))
    return EXIT_PASS


@cli.command("explain")
@click.argument("goal")
def explain(goal: str) -> int:
    """Print a goal's certificate data in human-readable notation."""
    click.echo(explain_goal_text(goal))
    return EXIT_PASS


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Console entry point with the documented exit codes."""
    try:
        rc = cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        sys.exit(EXIT_USAGE)
    except click.Abort:
        sys.exit(EXIT_USAGE)
    sys.exit(rc if isinstance(rc, int) else EXIT_PASS)


if __name__ == "__main__":
    main()
