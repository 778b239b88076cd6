"""Command line entry point: ``run``, ``sweep`` and ``gen-input``.

Exit codes: 0 success, 1 simulation error, 2 bad spec or input,
3 post-run invariant violation (the report is still written).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .algorithms import inputs as gen
from .core import SimulationError
from .efficiency import check_efficiency
from .mapreduce import write_trace_csv
from .report import dumps, emit_report, emit_sweep_report
from .workload import RunOutcome, SpecError, load_spec, run_workload

log = logging.getLogger("bspmr")

EXIT_OK, EXIT_SIM, EXIT_PARSE, EXIT_INVARIANT = 0, 1, 2, 3


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    for name, typ in (("n", int), ("p", int), ("q", int), ("r", int), ("g", float), ("l", float), ("seed", int)):
        parser.add_argument(f"--{name}", type=typ, default=None, help=f"override {name} from the spec file")
    parser.add_argument("--model", default=None)
    parser.add_argument("--algorithm", default=None)


def _overrides(args: argparse.Namespace) -> dict:
    return {k: getattr(args, k) for k in ("n", "p", "q", "r", "g", "l", "seed", "model", "algorithm")}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bspmr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one workload and write report.json")
    run.add_argument("--spec", required=True)
    run.add_argument("--out", default=".")
    run.add_argument("--trace", action="store_true", help="also write trace.csv (tasks) / messages.csv (BSP)")
    _add_overrides(run)

    sweep = sub.add_parser("sweep", help="run a workload at several sizes")
    sweep.add_argument("--spec", required=True)
    sweep.add_argument("--sizes", default=None, help="comma-separated sizes; defaults to the spec's sweep")
    sweep.add_argument("--check-efficiency", action="store_true")
    sweep.add_argument("--out", default=".")
    _add_overrides(sweep)

    g = sub.add_parser("gen-input", help="write a seeded random input file")
    g.add_argument("--kind", choices=("ints", "matrix", "graph"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--edge-prob", type=float, default=0.05)
    g.add_argument("--out", default="-", help="output file, '-' for stdout")
    return parser


def _write_traces(outcome: RunOutcome, out_dir: Path) -> None:
    if outcome.traces:
        with open(out_dir / "trace.csv", "w", newline="") as fh:
            write_trace_csv(outcome.traces, fh)
    if outcome.messages:
        with open(out_dir / "messages.csv", "w") as fh:
            fh.write("superstep,src,dest,seq,size\n")
            for row in outcome.messages:
                fh.write(",".join(str(x) for x in row) + "\n")


def cmd_run(args: argparse.Namespace) -> int:
    spec = load_spec(args.spec, **_overrides(args))
    outcome = run_workload(spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(dumps(emit_report(outcome)))
    if args.trace:
        _write_traces(outcome, out_dir)
    for check in outcome.checks:
        if not check.passed:
            log.error("check failed: %s %s", check.name, check.detail)
    return EXIT_OK if outcome.passed else EXIT_INVARIANT


def cmd_sweep(args: argparse.Namespace) -> int:
    sizes = None
    if args.sizes:
        try:
            sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
        except ValueError as exc:
            raise SpecError(f"bad --sizes: {exc}") from exc
    spec = load_spec(args.spec, **_overrides(args), sweep=sizes)
    if len(spec.sweep) < 1:
        raise SpecError("no sweep sizes given")
    if args.check_efficiency and spec.model != "bsp-on-mr":
        raise SpecError("--check-efficiency needs model = bsp-on-mr")
    outcomes = []
    for n in spec.sweep:
        log.info("sweep point n=%d", n)
        outcomes.append(run_workload(spec.with_overrides(n=n, input=None)))
    efficiency = None
    if args.check_efficiency:
        runs = [(o.spec.n, o.bsp_ledger, o.mr_ledger) for o in outcomes]
        try:
            efficiency = check_efficiency(runs, outcomes[0].bsp_procs)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sweep.json").write_text(dumps(emit_sweep_report(outcomes, efficiency)))
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_INVARIANT


def cmd_gen_input(args: argparse.Namespace) -> int:
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        if args.kind == "ints":
            gen.write_ints(gen.random_ints(args.n, args.seed), fh)
        elif args.kind == "matrix":
            gen.write_matrix_csv(gen.random_matrix(args.n, args.seed), fh)
        else:
            gen.write_edge_list(gen.random_graph(args.n, args.seed, args.edge_prob), fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": cmd_run, "sweep": cmd_sweep, "gen-input": cmd_gen_input}[args.command]
    try:
        return handler(args)
    except SpecError as exc:
        log.error("%s", exc)
        return EXIT_PARSE
    except SimulationError as exc:
        log.error("simulation failed: %s", exc)
        return EXIT_SIM


if __name__ == "__main__":
    sys.exit(main())
