"""Command-line entry point: ``flatlp {solve,gen,oracle,compare,bench}``.

Exit codes: 0 success/agreement, 1 usage or parse error, 2 disagreement
found, 3 non-optimal terminal status with ``--expect-optimal``.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import FlatLPError, InfeasibleDetected, ParseError
from .fileformat import dumps, fmt, format_problem, parse_problem_file, solution_dict, write_solution_json
from .harness import BatchConfig, compare, csv_row, generate_instance, render_csv, run_batch
from .model import Tolerances
from .oracle import oracle_solve
from .reduce import SolveConfig, SolveOutcome, Status, solve

EXIT_OK, EXIT_USAGE, EXIT_DISAGREE, EXIT_NOT_OPTIMAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write_output(text: str, path=None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _solve_config(args) -> SolveConfig:
    return SolveConfig(
        redundancy=args.redundancy,
        samples=args.samples,
        min_hits=args.min_hits,
        seed=args.seed,
        tol=Tolerances(feas=args.tol_feas, norm=args.tol_norm, dir=args.tol_dir),
    )


def _load(args, config):
    try:
        return parse_problem_file(_read_input(args.input), config.tol.feas), None
    except InfeasibleDetected as exc:
        return None, SolveOutcome(Status.INFEASIBLE, message=str(exc), config=config)


def _text_report(outcome: SolveOutcome) -> str:
    lines = [f"status: {outcome.status.value}"]
    if outcome.x is not None:
        lines.append("x: " + " ".join(fmt(v) for v in outcome.x))
        lines.append(f"z: {fmt(outcome.z)}")
    for s in outcome.trace:
        extra = f" deleted={list(s.deleted)}" if s.deleted else ""
        lines.append(f"stage {s.stage}: plane {s.row_id} eliminates x{s.pivot + 1} (t={s.cosine:.6f}){extra}")
    if outcome.message:
        lines.append(f"note: {outcome.message}")
    return "\n".join(lines) + "\n"


def cmd_solve(args) -> int:
    config = _solve_config(args)
    parsed, outcome = _load(args, config)
    if outcome is None:
        outcome = solve(parsed.problem, parsed.point, config)
    _write_output(write_solution_json(outcome) if args.json else _text_report(outcome), args.out)
    if args.expect_optimal and outcome.status is not Status.OPTIMAL:
        return EXIT_NOT_OPTIMAL
    return EXIT_OK


def cmd_gen(args) -> int:
    problem, point = generate_instance(args.n, args.m, args.seed, args.box_bound)
    comment = f"generated: n={args.n} m={args.m} seed={args.seed} box={fmt(args.box_bound)}"
    _write_output(format_problem(problem, point, comment), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    parsed = parse_problem_file(_read_input(args.input), args.tol_feas)
    res = oracle_solve(parsed.problem)
    out = {"status": "optimal" if res.optimal else "infeasible"}
    if res.optimal:
        out["x"] = [float(v) for v in res.x]
        out["z"] = res.z
        out["active_set"] = list(res.active_set)
    out["candidates"] = res.n_candidates
    _write_output(dumps(out) + "\n", args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _solve_config(args)
    parsed = parse_problem_file(_read_input(args.input), config.tol.feas)
    report = compare(parsed.problem, parsed.point, config, m=parsed.m)
    out = {
        "agree": report.agree,
        "status_solver": report.solver_status.value,
        "status_oracle": report.oracle_status.value,
        "z_solver": report.z_solver,
        "z_oracle": report.z_oracle,
        "abs_gap": report.abs_gap,
        "stages": [{"k": k, "j": j + 1, "t_k": t, "deleted": list(d)} for k, j, t, d in report.stages],
    }
    if report.x_solver is not None:
        out["x_solver"] = [float(v) for v in report.x_solver]
    if report.x_oracle is not None:
        out["x_oracle"] = [float(v) for v in report.x_oracle]
    _write_output(dumps(out) + "\n", args.out)
    return EXIT_OK if report.agree else EXIT_DISAGREE


def _int_list(text: str):
    try:
        vals = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("n values must be positive")
    return vals


def cmd_bench(args) -> int:
    config = BatchConfig(
        n_list=args.n_list, m_rule=args.m_rule, trials=args.trials, seed=args.seed, mode=args.mode,
        samples=args.samples, min_hits=args.min_hits, timing=args.timing,
    )
    result = run_batch(config)
    _write_output(result.csv, args.out)
    if args.out and args.out != "-":
        out = Path(args.out)
        out.with_name(out.stem + "_summary.txt").write_text(result.summary)
        if result.counterexamples:
            cdir = out.with_name(out.stem + "_counterexamples")
            cdir.mkdir(exist_ok=True)
            for iid, text in result.counterexamples.items():
                (cdir / f"instance_{iid:05d}.flatlp").write_text(text)
    sys.stderr.write(result.summary)
    return result.exit_code


def _add_solver_flags(p):
    p.add_argument("--redundancy", choices=("mc", "exact", "auto"), default="auto",
                   help="redundancy test for flattest planes (default: exact while enumeration fits)")
    p.add_argument("--samples", type=int, default=1000, help="Monte Carlo rays per query")
    p.add_argument("--min-hits", type=int, default=32, help="witness hits required before eliminating")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-feas", type=float, default=1e-7)
    p.add_argument("--tol-norm", type=float, default=1e-12)
    p.add_argument("--tol-dir", type=float, default=1e-10)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flatlp", description="LP by recursive flattest-plane reduction")
    parser.add_argument("--version", action="version", version=f"flatlp {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve a flatlp problem file")
    p.add_argument("--input", required=True, help="problem file ('-' for stdin)")
    _add_solver_flags(p)
    p.add_argument("--json", action="store_true", help="emit solution JSON")
    p.add_argument("--out")
    p.add_argument("--expect-optimal", action="store_true", help="exit 3 unless the status is optimal")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="write a random bounded instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box-bound", type=float, default=10.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="solve by exhaustive vertex enumeration")
    p.add_argument("--input", required=True)
    p.add_argument("--tol-feas", type=float, default=1e-7)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="solver against oracle on one file")
    p.add_argument("--input", required=True)
    _add_solver_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="batch comparison over generated instances, CSV output")
    p.add_argument("--n-list", type=_int_list, default=[2])
    p.add_argument("--m-rule", default="3n", help="'3n', a fixed count, or an inclusive range 'lo:hi'")
    p.add_argument("--trials", type=int, default=10, help="instances per n")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--mode", choices=("mc", "exact", "auto"), default="exact")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--min-hits", type=int, default=32)
    p.add_argument("--timing", action="store_true", help="fill the wall-time columns (not reproducible)")
    p.add_argument("--out", help="CSV path; summary and counterexamples are written beside it")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"flatlp: error: {exc}\n")
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, FlatLPError, OSError, ValueError) as exc:
        sys.stderr.write(f"flatlp: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
