"""Command-line front end: ``cepshed estimate|plan|simulate|verify``.

Exit codes: 0 success, 1 usage or parse error, 2 infeasible or unsupported
request, 3 internal numerical failure. Errors print one line
``error[<code>]: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections.abc import Callable, Sequence

import numpy as np

from . import __version__
from .errors import CepShedError, IncompatiblePlan, UnsupportedVariant
from .estimation import expected_matches_analytic
from .event_model import MatchSemantics, Query
from .matcher import count_windowed_matches
from .planner import (
    Coupling,
    ProblemInstance,
    Variant,
    brute_force_integral,
    evaluate_fractional,
    evaluate_integral,
    fcls_greedy,
    fmls_grid_search,
    icls_dp,
    icls_fptas,
    idls_2d_knapsack,
    idls_tricriteria,
    imls_bicriteria,
    imls_knapsack_greedy,
    imls_multitenant_dp,
)
from .simulator import SimulationConfig, generate_stream, simulate
from .verify import DEFAULT_EPS, DEFAULT_KS, DEFAULT_TAUS, example_checks, random_suite, run_checks
from .workload import (
    EvaluationSpec,
    GuaranteeSpec,
    PlanFile,
    WorkloadFile,
    emit,
    load_plan,
    load_workload,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise _UsageError(message)


# (variant, algorithm) -> (solver call, parameter names)
_Solver = Callable[[ProblemInstance, argparse.Namespace], tuple]
SOLVERS: dict[str, dict[str, tuple[_Solver, tuple[str, ...]]]] = {
    "imls": {
        "brute": (lambda i, a: brute_force_integral(i, Variant.IMLS), ()),
        "multitenant": (lambda i, a: imls_multitenant_dp(i, a.resolution), ("resolution",)),
        "bicriteria": (lambda i, a: imls_bicriteria(i, a.tau), ("tau",)),
        "greedy": (lambda i, a: imls_knapsack_greedy(i), ()),
    },
    "fmls": {"grid": (lambda i, a: fmls_grid_search(i, a.k), ("k",))},
    "icls": {
        "dp": (lambda i, a: icls_dp(i, a.resolution), ("resolution",)),
        "fptas": (lambda i, a: icls_fptas(i, a.eps), ("eps",)),
        "brute": (lambda i, a: brute_force_integral(i, Variant.ICLS), ()),
    },
    "fcls": {"greedy": (lambda i, a: fcls_greedy(i), ())},
    "idls": {
        "brute": (lambda i, a: brute_force_integral(i, Variant.IDLS), ()),
        "tricriteria": (lambda i, a: idls_tricriteria(i, a.tau), ("tau",)),
        "knapsack2d": (lambda i, a: idls_2d_knapsack(i, a.resolution), ("resolution",)),
    },
}
DEFAULT_ALGORITHM = {"imls": "multitenant", "fmls": "grid", "icls": "dp", "fcls": "greedy", "idls": "brute"}


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise _UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise _UsageError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def cmd_estimate(args) -> int:
    wl = load_workload(args.workload)
    sem = wl.match_semantics
    rates = {t.name: t.arrival_rate for t in wl.event_types}
    stream = None
    queries = []
    for q in wl.queries:
        if q.expected_matches is None:
            query = Query(q.name, tuple(q.pattern), q.window)
            if sem is MatchSemantics.ANY:
                n = expected_matches_analytic(query, rates)
            else:
                if stream is None:
                    stream = generate_stream(rates, args.duration, args.seed)
                windows = math.floor(args.duration / q.window)
                if windows < 1:
                    raise _UsageError(f"--duration is shorter than the window of {q.name!r}")
                span = windows * q.window
                n = count_windowed_matches(stream.filter(stream.times < span), query, sem) / span
            q = q.model_copy(update={"expected_matches": n})
        queries.append(q)
    _write(emit(wl.model_copy(update={"queries": queries})), args.out)
    return 0


def cmd_plan(args) -> int:
    variant = args.variant
    if variant in ("fdls", "fdls-eval"):
        raise UnsupportedVariant(
            "no synthesizer exists for fractional dual-bound shedding; "
            "supply a plan and use 'simulate' to evaluate it"
        )
    algorithm = args.algorithm or DEFAULT_ALGORITHM[variant]
    if algorithm not in SOLVERS[variant]:
        raise _UsageError(
            f"algorithm {algorithm!r} is not available for {variant}; choose from {sorted(SOLVERS[variant])}"
        )
    solver, params = SOLVERS[variant][algorithm]
    inst = load_workload(args.workload).instance()
    plan, ev = solver(inst, args)
    g = ev.guarantee
    doc = PlanFile(
        tool_version=__version__,
        variant=variant,
        algorithm=algorithm,
        parameters={p: getattr(args, p) for p in params},
        evaluation=EvaluationSpec(
            expected_utility=ev.expected_utility, memory_use=ev.memory_use, cpu_use=ev.cpu_use,
            feasible_memory=ev.feasible_memory, feasible_cpu=ev.feasible_cpu,
        ),
        guarantee=None if g is None else GuaranteeSpec(
            kind=g.kind.value, parameter=g.parameter, bound=g.bound, extras=_json_safe(dict(g.extras)),
        ),
        **(
            {"keep_event": dict(plan.keep_event), "keep_query": dict(plan.keep_query)}
            if hasattr(plan, "keep_event")
            else {"sample_event": dict(plan.sample_event), "sample_query": dict(plan.sample_query)}
        ),
    )
    _write(emit(doc), args.out)
    return 0


def _stated_limits(plan: PlanFile, inst: ProblemInstance) -> tuple[float, float]:
    extras = plan.guarantee.extras if plan.guarantee else {}
    mem = extras.get("memory_bound", inst.memory_budget)
    cpu = extras.get("cpu_bound", inst.cpu_budget)
    return (math.inf if mem is None else mem), (math.inf if cpu is None else cpu)


def _rows(report, ev, limits) -> list[tuple[str, object]]:
    rows: list[tuple[str, object]] = [
        ("tool_version", __version__),
        ("trials", report.trials_run),
        ("window_mode", report.window_mode),
        ("mean_utility_per_unit_time", report.mean_utility_per_unit_time),
        ("utility_standard_error", report.utility_standard_error),
        ("planned_utility_per_unit_time", ev.expected_utility),
        ("cpu_consumed_per_unit_time", report.cpu_consumed_per_unit_time),
        ("planned_memory_use", ev.memory_use),
        ("peak_memory_occupancy", report.peak_memory_occupancy),
        ("mean_memory_occupancy", report.mean_memory_occupancy),
        ("memory_limit", limits[0]),
        ("cpu_limit", limits[1]),
    ]
    for q, v in report.mean_matches_per_query.items():
        rows.append((f"matches[{q}]", v))
    for q, v in report.match_rate_per_query.items():
        rows.append((f"match_rate[{q}]", v))
    return rows


def _emit_rows(rows, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for k, v in rows:
            writer.writerow([k, repr(v) if isinstance(v, float) else v])
        return buf.getvalue()
    return json.dumps(_json_safe(dict(rows)), indent=2) + "\n"


def cmd_simulate(args) -> int:
    wl = load_workload(args.workload)
    inst = wl.instance()
    plan_doc = load_plan(args.plan)
    plan_doc.check_compatible(inst)
    plan = plan_doc.plan()
    coupling = Coupling.EQUALITY if plan_doc.variant in ("imls", "fmls") else Coupling.INEQUALITY
    ev = (evaluate_integral if plan_doc.is_integral else evaluate_fractional)(inst, plan, coupling)
    config = SimulationConfig(args.duration, args.trials, args.seed, wl.match_semantics, args.window_mode)
    report = simulate(inst, plan, config)
    limits = _stated_limits(plan_doc, inst)
    _write(_emit_rows(_rows(report, ev, limits), args.format), args.out)
    over = ev.memory_use > limits[0] + 1e-9 or ev.cpu_use > limits[1] + 1e-9
    if over:
        print("error[budget-exceeded]: the plan exceeds its own stated budgets", file=sys.stderr)
        return 2
    return 0


def cmd_verify(args) -> int:
    taus = _floats(args.tau) if args.tau else list(DEFAULT_TAUS)
    eps = _floats(args.eps) if args.eps else list(DEFAULT_EPS)
    ks = _ints(args.k) if args.k else list(DEFAULT_KS)
    instances = []
    if args.workload:
        instances.append((args.workload, load_workload(args.workload).instance()))
    if args.random:
        instances.extend(random_suite(args.random, args.seed, args.max_types, args.max_queries))
    checks = []
    if args.examples:
        checks.extend(example_checks())
    usable = [(lbl, inst) for lbl, inst in instances if inst.num_queries]
    for lbl, inst in usable:
        if inst.memory_budget is None or inst.cpu_budget is None:
            raise _UsageError(f"{lbl}: verification needs both a memory and a CPU budget")
    checks.extend(run_checks(usable, taus, eps, ks))
    rows = [("instance", "check", "margin", "status")]
    rows += [(c.instance, c.name, repr(c.margin), "pass" if c.passed else "FAIL") for c in checks]
    failed = sum(not c.passed for c in checks)
    if args.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        text = buf.getvalue()
    else:
        widths = [max(len(str(r[i])) for r in rows) for i in range(4)]
        text = "".join("  ".join(str(v).ljust(w) for v, w in zip(r, widths)).rstrip() + "\n" for r in rows)
        text += f"{len(checks) - failed}/{len(checks)} checks passed\n"
    _write(text, args.out)
    return 0 if failed == 0 else 2


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cepshed", description="Load shedding for sequence queries over event streams.")
    p.add_argument("--version", action="version", version=f"cepshed {__version__}")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (accepted for compatibility; results never depend on it)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("estimate", help="fill in missing expected match rates")
    e.add_argument("workload")
    e.add_argument("--duration", type=float, default=10_000.0)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)

    pl = sub.add_parser("plan", help="compute a shedding plan")
    pl.add_argument("workload")
    pl.add_argument("--variant", required=True, choices=[*SOLVERS, "fdls", "fdls-eval"])
    pl.add_argument("--algorithm")
    pl.add_argument("--tau", type=float, default=0.5)
    pl.add_argument("--eps", type=float, default=0.1)
    pl.add_argument("--k", type=int, default=8)
    pl.add_argument("--resolution", type=float, default=None)
    pl.add_argument("--out")
    pl.set_defaults(func=cmd_plan)

    s = sub.add_parser("simulate", help="simulate a plan on Poisson streams")
    s.add_argument("workload")
    s.add_argument("plan")
    s.add_argument("--duration", type=float, default=1000.0)
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--window-mode", choices=["tumbling", "sliding"], default="tumbling")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="check solvers against brute-force oracles")
    v.add_argument("workload", nargs="?")
    v.add_argument("--random", type=int, default=0)
    v.add_argument("--max-types", type=int, default=10)
    v.add_argument("--max-queries", type=int, default=8)
    v.add_argument("--tau")
    v.add_argument("--eps")
    v.add_argument("--k")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--examples", action="store_true", help="also check the running example's optima")
    v.add_argument("--format", choices=["table", "csv"], default="table")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise _UsageError("--threads must be >= 1")
        return args.func(args)
    except _UsageError as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return 1
    except CepShedError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
