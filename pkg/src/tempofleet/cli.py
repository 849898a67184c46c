"""Command-line pipeline: translate, build-ts, plan, simulate, verify.

Exit codes: 0 success, 2 formula/scenario parse error, 3 infeasible task,
4 search budget exhausted, 5 simulation or behavior-verification failure.
Log level comes from the TEMPOFLEET_LOG environment variable.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import time
from pathlib import Path

import click

from .executor import execute_plan, verify_behavior
from .ltl import LassoWord, ParseError, UnknownAtomError, conjoin, \
    eval_lasso, parse_ltl, nba_accepts_lasso, to_nnf, translate
from .planner import PlannerParams, plan_sampling
from .product import exact_plan, verify_plan
from .control.runner import ControlParams, write_log_csv, \
    write_trajectory_svg
from .ts import BudgetExceeded, build_ts
from .world import load_scenario

EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4
EXIT_SIMFAIL = 5

log = logging.getLogger("tempofleet")


def _fail(code, message):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_scenario(path):
    try:
        sc = load_scenario(path)
        sc.validate()
        return sc
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        _fail(EXIT_PARSE, f"scenario {path}: {exc}")


def _parse_formulas(formulas, scenario):
    universe = scenario.atom_universe() if scenario else None
    try:
        parsed = [parse_ltl(f, universe=universe) for f in formulas]
    except (ParseError, UnknownAtomError) as exc:
        _fail(EXIT_PARSE, f"formula: {exc}")
    return to_nnf(conjoin(parsed))


def _write(out, text):
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


@click.group()
def main():
    level = os.environ.get("TEMPOFLEET_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


@main.command("translate")
@click.option("--formula", "formulas", multiple=True, required=True,
              help="LTL formula; repeat to conjoin")
@click.option("--scenario", type=click.Path(exists=True),
              help="scenario JSON fixing the atom universe")
@click.option("--out", type=click.Path(), help="write the automaton here")
def cmd_translate(formulas, scenario, out):
    """Translate LTL into a Büchi automaton."""
    sc = _load_scenario(scenario) if scenario else None
    f = _parse_formulas(formulas, sc)
    t0 = time.perf_counter()
    nba = translate(f)
    dt = time.perf_counter() - t0
    click.echo(f"states: {nba.n_states}  edges: {len(nba.edges)}  "
               f"accepting: {len(nba.accepting)}  ({dt:.2f}s)")
    if out:
        _write(out, nba.export_text())


@main.command("build-ts")
@click.option("--scenario", type=click.Path(exists=True), required=True)
@click.option("--n-max", type=int, default=100000, show_default=True,
              help="state budget")
@click.option("--out", type=click.Path(), help="write the state graph here")
def cmd_build_ts(scenario, n_max, out):
    """Build the coupled robots-objects transition system."""
    sc = _load_scenario(scenario)
    t0 = time.perf_counter()
    try:
        ts = build_ts(sc, max_states=n_max)
    except BudgetExceeded as exc:
        _fail(EXIT_BUDGET, str(exc))
    dt = time.perf_counter() - t0
    click.echo(f"states: {ts.n_states}  transitions: {len(ts.transitions)}  "
               f"({dt:.2f}s)")
    if out:
        _write(out, ts.export_text())


def _make_plan(sc, formulas, mode, n_max, seed, bias, jobs):
    if jobs < 1:
        _fail(EXIT_PARSE, "--jobs must be >= 1")
    f = _parse_formulas(formulas, sc)
    nba = translate(f)
    log.info("NBA: %d states, %d accepting", nba.n_states, len(nba.accepting))
    try:
        if mode == "exact":
            plan = exact_plan(sc, nba, max_states=n_max)
            if plan is None:
                _fail(EXIT_INFEASIBLE, "task is infeasible in this scenario")
        else:
            plan = plan_sampling(
                sc, nba, PlannerParams(n_max=n_max, seed=seed, bias=bias))
            if plan is None:
                _fail(EXIT_BUDGET,
                      "no plan found within the sampling budget "
                      "(the task may be infeasible)")
    except BudgetExceeded as exc:
        _fail(EXIT_BUDGET, str(exc))
    if not verify_plan(plan, nba, sc):
        _fail(EXIT_INFEASIBLE, "planner produced an unaccepted lasso")
    return plan, f


_plan_options = [
    click.option("--scenario", type=click.Path(exists=True), required=True),
    click.option("--formula", "formulas", multiple=True, required=True,
                 help="LTL formula; repeat to conjoin"),
    click.option("--mode", type=click.Choice(["exact", "sampling"]),
                 default="exact", show_default=True),
    click.option("--n-max", type=int, default=100000, show_default=True,
                 help="product state budget / sampling iterations"),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--bias", type=float, default=0.3, show_default=True,
                 help="newest-node expansion probability (sampling)"),
    click.option("--jobs", type=int, default=1, show_default=True,
                 help="worker bound (current planners are single-worker)"),
]


def _with_plan_options(fn):
    for opt in reversed(_plan_options):
        fn = opt(fn)
    return fn


@main.command("plan")
@_with_plan_options
@click.option("--out", type=click.Path(), help="write the action table here")
def cmd_plan(scenario, formulas, mode, n_max, seed, bias, jobs, out):
    """Synthesize a minimum-cost prefix-suffix plan."""
    sc = _load_scenario(scenario)
    plan, _ = _make_plan(sc, formulas, mode, n_max, seed, bias, jobs)
    _write(out, plan.export_table())


@main.command("simulate")
@_with_plan_options
@click.option("--dt", type=float, help="integration step override")
@click.option("--suffix-reps", type=int, default=2, show_default=True)
@click.option("--out", type=click.Path(), default="out", show_default=True,
              help="output directory")
@click.option("--plot", is_flag=True, help="also write a trajectory SVG")
def cmd_simulate(scenario, formulas, mode, n_max, seed, bias, jobs, dt,
                 suffix_reps, out, plot):
    """Plan, then execute the plan with the continuous controllers."""
    sc = _load_scenario(scenario)
    plan, f = _make_plan(sc, formulas, mode, n_max, seed, bias, jobs)
    params = ControlParams.from_scenario(sc).with_overrides(dt=dt)
    report = execute_plan(sc, plan, params=params, suffix_reps=suffix_reps,
                          log_every=100)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "plan.txt").write_text(plan.export_table())
    report.export_json(outdir / "report.json")
    for name, pts in report.trails:
        rows = [(i,) + p for i, p in enumerate(pts)]
        with open(outdir / f"trail_{name}.csv", "w") as fh:
            fh.write("i,x,y\n")
            fh.writelines(f"{i},{x},{y}\n" for i, x, y in rows)
    if plot:
        write_trajectory_svg(outdir / "trajectories.svg", sc, report.trails)
    click.echo(f"wrote {outdir}/plan.txt, report.json"
               + (", trajectories.svg" if plot else ""))
    if not report.success:
        _fail(EXIT_SIMFAIL, report.failure)
    if not verify_behavior(report.behavior, f):
        _fail(EXIT_SIMFAIL, "executed behavior does not satisfy the task")
    click.echo(f"simulated {report.sim_time:.1f}s of motion; task satisfied")


@main.command("verify")
@click.option("--scenario", type=click.Path(exists=True), required=True)
@click.option("--formula", "formulas", multiple=True, required=True)
@click.option("--report", type=click.Path(exists=True), required=True,
              help="report.json produced by simulate")
def cmd_verify(scenario, formulas, report):
    """Re-check a simulation report's behavior against the task."""
    sc = _load_scenario(scenario)
    f = _parse_formulas(formulas, sc)
    with open(report) as fh:
        d = json.load(fh)
    if not d.get("success") or not d.get("behavior"):
        _fail(EXIT_SIMFAIL, "report records a failed execution")
    word = LassoWord(
        tuple(frozenset(a) for a in d["behavior"]["prefix"]),
        tuple(frozenset(a) for a in d["behavior"]["cycle"]))
    direct = eval_lasso(f, word)
    automaton = nba_accepts_lasso(translate(f), word)
    if direct != automaton:
        _fail(EXIT_SIMFAIL, "semantics/automaton disagreement on the word")
    if not direct:
        _fail(EXIT_SIMFAIL, "behavior does not satisfy the task")
    click.echo("behavior satisfies the task")


if __name__ == "__main__":
    main()
