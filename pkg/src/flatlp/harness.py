"""Random instances and solver-versus-oracle comparison batches."""
from __future__ import annotations

import csv
import io
import re
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import FlatLPError
from .fileformat import fmt, format_problem
from .model import LpProblem, is_feasible, normalize_rows
from .oracle import oracle_solve
from .reduce import SolveConfig, Status, solve

CSV_COLUMNS = (
    "instance_id", "n", "m", "seed", "status_solver", "status_oracle", "z_solver", "z_oracle",
    "abs_gap", "agree", "stages", "deleted_redundant", "wall_solver_ms", "wall_oracle_ms",
)
PLANE_EQ_TOL = 1e-9


def _unit(rng, size):
    while True:
        v = rng.standard_normal(size)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm


def generate_instance(n: int, m: int, seed: int, box_bound: float = 10.0) -> Tuple[LpProblem, np.ndarray]:
    """Random bounded instance with the origin strictly inside.

    ``m`` rows with uniformly random unit normals and slack in [0.1, 1] at the
    origin, followed by the 2n box rows +-x_i <= box_bound.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    rng = np.random.default_rng(seed)
    normals = np.array([_unit(rng, n) for _ in range(m)])
    slack = rng.uniform(0.1, 1.0, size=m)
    box = np.vstack([s * e for e in np.eye(n) for s in (1.0, -1.0)])
    rows = np.vstack([normals, box])
    rhs = np.concatenate([slack, np.full(2 * n, float(box_bound))])
    objective = _unit(rng, n)
    return normalize_rows(LpProblem(rows, rhs, objective)), np.zeros(n)


@dataclass
class ComparisonReport:
    instance_id: int
    n: int
    m: int
    seed: Optional[int]
    solver_status: Status
    oracle_status: Status
    z_solver: Optional[float] = None
    z_oracle: Optional[float] = None
    abs_gap: Optional[float] = None
    agree: bool = False
    wall_solver_ms: float = 0.0
    wall_oracle_ms: float = 0.0
    stages: List[tuple] = field(default_factory=list)  # (row id k, pivot j, cosine t_k, deleted ids)
    solver_feasible: Optional[bool] = None
    plane_residual: Optional[float] = None  # worst elimination-plane equality error at the solution
    x_solver: Optional[np.ndarray] = None
    x_oracle: Optional[np.ndarray] = None
    message: str = ""

    @property
    def deleted(self):
        return tuple(r for s in self.stages for r in s[3])


def agreement(solver_status, oracle_status, z_solver, z_oracle) -> bool:
    if solver_status != oracle_status:
        return False
    if solver_status is Status.OPTIMAL:
        return abs(z_solver - z_oracle) <= 1e-6 * max(1.0, abs(z_oracle))
    return True


def compare(problem: LpProblem, interior_point=None, config: Optional[SolveConfig] = None,
            instance_id: int = 0, seed: Optional[int] = None, m: Optional[int] = None) -> ComparisonReport:
    """Solve with both routes and record the result; disagreement is data, never an exception.

    ``m`` is the reported constraint count (defaults to the row count).
    """
    config = config or SolveConfig()
    t0 = time.perf_counter()
    outcome = solve(problem, interior_point, config)
    t1 = time.perf_counter()
    oracle = oracle_solve(problem, cap=config.oracle_cap)
    t2 = time.perf_counter()

    oracle_status = Status.OPTIMAL if oracle.optimal else Status.INFEASIBLE
    report = ComparisonReport(
        instance_id=instance_id,
        n=problem.n_vars,
        m=problem.n_rows if m is None else m,
        seed=seed,
        solver_status=outcome.status,
        oracle_status=oracle_status,
        z_solver=outcome.z,
        z_oracle=oracle.z,
        wall_solver_ms=(t1 - t0) * 1e3,
        wall_oracle_ms=(t2 - t1) * 1e3,
        stages=[(s.row_id, s.pivot, s.cosine, s.deleted) for s in outcome.trace],
        x_solver=outcome.x,
        x_oracle=oracle.x,
        message=outcome.message,
    )
    if outcome.z is not None and oracle.z is not None:
        report.abs_gap = abs(outcome.z - oracle.z)
    agree = agreement(outcome.status, oracle_status, outcome.z, oracle.z)
    if outcome.status is Status.OPTIMAL:
        report.solver_feasible = is_feasible(problem, outcome.x, config.tol.feas)
        report.plane_residual = max(
            (abs(r.plane_coeffs @ outcome.x - r.plane_rhs) for r in outcome.records), default=0.0
        )
        agree = agree and report.solver_feasible
    report.agree = agree
    return report


# -- batches -----------------------------------------------------------------


def m_for(rule: str, n: int, rng: np.random.Generator) -> int:
    """Constraint count from a rule: ``"3n"``, ``"12"``, or an inclusive range ``"3:12"``."""
    rule = rule.strip()
    if mt := re.fullmatch(r"(\d*)n", rule):
        return int(mt.group(1) or 1) * n
    if mt := re.fullmatch(r"(\d+)[:-](\d+)", rule):
        lo, hi = int(mt.group(1)), int(mt.group(2))
        if lo > hi:
            raise ValueError(f"empty m range {rule!r}")
        return int(rng.integers(lo, hi + 1))
    if rule.isdigit():
        return int(rule)
    raise ValueError(f"unrecognized m rule {rule!r}")


@dataclass(frozen=True)
class BatchConfig:
    n_list: Sequence[int] = (2,)
    m_rule: str = "3n"
    trials: int = 10  # per n
    seed: int = 42
    mode: str = "exact"
    samples: int = 1000
    min_hits: int = 32
    box_bound: float = 10.0
    timing: bool = False  # wall times make the CSV non-reproducible

    def solve_config(self, instance_seed: int) -> SolveConfig:
        return SolveConfig(redundancy=self.mode, samples=self.samples, min_hits=self.min_hits,
                           seed=instance_seed)


@dataclass
class BatchResult:
    csv: str
    reports: List[ComparisonReport]
    summary: str
    exit_code: int
    counterexamples: Dict[int, str]

    @property
    def agreement_rate(self) -> float:
        return sum(r.agree for r in self.reports) / len(self.reports) if self.reports else 1.0


def _opt(v):
    return "" if v is None else fmt(v)


def csv_row(report: ComparisonReport, timing: bool = False) -> list:
    stages = ";".join(f"{k}/{j + 1}/{fmt(t)}" for k, j, t, _ in report.stages)
    deleted = ";".join(f"{i + 1}:{rid}" for i, s in enumerate(report.stages) for rid in s[3])
    return [
        report.instance_id, report.n, report.m, "" if report.seed is None else report.seed,
        report.solver_status.value, report.oracle_status.value,
        _opt(report.z_solver), _opt(report.z_oracle), _opt(report.abs_gap),
        "true" if report.agree else "false", stages, deleted,
        fmt(report.wall_solver_ms) if timing else "", fmt(report.wall_oracle_ms) if timing else "",
    ]


def render_csv(reports, timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(reports, key=lambda r: r.instance_id):
        w.writerow(csv_row(r, timing))
    return buf.getvalue()


def _error_report(instance_id, n, m, seed, exc) -> ComparisonReport:
    return ComparisonReport(instance_id, n, m, seed, Status.ERROR, Status.ERROR, agree=False,
                            message=f"{type(exc).__name__}: {exc}")


def summarize(reports: List[ComparisonReport]) -> str:
    lines = ["# summary", f"instances: {len(reports)}"]
    groups = defaultdict(list)
    for r in reports:
        groups[(r.n, r.m)].append(r)
    for (n, m), rs in sorted(groups.items()):
        agree = sum(r.agree for r in rs)
        lines.append(f"n={n} m={m}: agree {agree}/{len(rs)} rate={agree / len(rs):.4f}")
    solver = Counter(r.solver_status.value for r in reports)
    oracle = Counter(r.oracle_status.value for r in reports)
    lines.append("solver status: " + ", ".join(f"{k}={v}" for k, v in sorted(solver.items())))
    lines.append("oracle status: " + ", ".join(f"{k}={v}" for k, v in sorted(oracle.items())))
    gaps = [r.abs_gap for r in reports if r.abs_gap is not None]
    lines.append(f"max gap: {fmt(max(gaps)) if gaps else 'n/a'}")
    total = sum(r.agree for r in reports)
    lines.append(f"agreement rate: {total}/{len(reports)}" + (f" = {total / len(reports):.4f}" if reports else ""))
    bad = [r for r in reports if not r.agree]
    if bad:
        lines.append("disagreements (instance_id n m seed solver/oracle gap):")
        for r in bad:
            lines.append(f"  {r.instance_id} {r.n} {r.m} {r.seed} {r.solver_status.value}/"
                         f"{r.oracle_status.value} {_opt(r.abs_gap)} {r.message}".rstrip())
    return "\n".join(lines) + "\n"


def run_batch(config: BatchConfig) -> BatchResult:
    """Compare solver and oracle over a family of generated instances.

    Instance seeds and sizes come from one master generator, so the batch is
    reproducible and every row can be regenerated alone from its seed.
    Exit code is 0 when every instance agrees and 2 otherwise.
    """
    master = np.random.default_rng(config.seed)
    reports, counterexamples = [], {}
    instance_id = 0
    for n in config.n_list:
        for _ in range(config.trials):
            instance_id += 1
            m = m_for(config.m_rule, n, master)
            seed = int(master.integers(2**31 - 1))
            problem = interior = None
            try:
                problem, interior = generate_instance(n, m, seed, config.box_bound)
                report = compare(problem, interior, config.solve_config(seed), instance_id, seed, m)
            except (FlatLPError, ValueError, np.linalg.LinAlgError) as exc:
                report = _error_report(instance_id, n, m, seed, exc)
            reports.append(report)
            if not report.agree and problem is not None:
                counterexamples[instance_id] = format_problem(
                    problem, interior,
                    comment=f"instance {instance_id}: n={n} m={m} seed={seed} "
                            f"solver={report.solver_status.value} z={_opt(report.z_solver)} "
                            f"oracle={report.oracle_status.value} z={_opt(report.z_oracle)}",
                )
    exit_code = 0 if all(r.agree for r in reports) else 2
    return BatchResult(render_csv(reports, config.timing), reports, summarize(reports), exit_code, counterexamples)
