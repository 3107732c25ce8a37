"""Recursive flattest-plane reduction.

Each stage picks the constraint whose outward normal is closest in angle to
the objective direction, checks that it actually touches the feasible
region, and uses it as an equation to eliminate one variable from every
other row and from the objective.  At one live variable the problem is
solved directly and the eliminated variables are recovered in reverse order.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateObjective,
    IncompleteTrace,
    InfeasibleDetected,
    NoCandidates,
    NotInterior,
    UnboundedChord,
    UnboundedDirection,
    ZeroRow,
)
from .model import (
    DEFAULT_TOL,
    ZERO_ROW_NORM,
    LpProblem,
    Tolerances,
    drop_vacuous_rows,
    normalize_rows,
    objective_value,
    prepare,
    residual,
)
from .oracle import ENUMERATION_CAP, oracle_solve, pin_lineality, within_cap
from . import redundancy

log = logging.getLogger(__name__)

TIE_TOL = 1e-12


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    STALLED = "stalled"
    ERROR = "error"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class EliminationRecord:
    plane_coeffs: np.ndarray
    plane_rhs: float
    pivot: int
    stage: int
    row_id: int


@dataclass(frozen=True)
class Stage:
    """Per-stage metadata kept in the solve trace."""

    record: EliminationRecord
    cosine: float
    deleted: tuple = ()  # row ids dropped as redundant before this plane was accepted
    witnesses: Optional[int] = None
    mode: str = "exact"

    @property
    def stage(self):
        return self.record.stage

    @property
    def row_id(self):
        return self.record.row_id

    @property
    def pivot(self):
        return self.record.pivot


@dataclass(frozen=True)
class SolveConfig:
    redundancy: str = "auto"  # "exact", "mc", or "auto" (exact while enumeration fits the cap)
    samples: int = 1000
    min_hits: int = 32
    retry_cap: int = 3
    seed: int = 0
    tol: Tolerances = DEFAULT_TOL
    oracle_cap: int = ENUMERATION_CAP

    def __post_init__(self):
        if self.redundancy not in ("exact", "mc", "auto"):
            raise ValueError(f"unknown redundancy mode {self.redundancy!r}")


@dataclass
class SolveOutcome:
    status: Status
    x: Optional[np.ndarray] = None
    z: Optional[float] = None
    trace: List[Stage] = field(default_factory=list)
    message: str = ""
    config: SolveConfig = field(default_factory=SolveConfig)
    reduced_z: Optional[float] = None  # d0 + d.x of the final reduced problem

    @property
    def records(self) -> List[EliminationRecord]:
        return [s.record for s in self.trace]

    @property
    def deleted(self) -> tuple:
        return tuple(r for s in self.trace for r in s.deleted)


# -- selection ---------------------------------------------------------------


def unit_objective(problem: LpProblem, tol_dir: float = DEFAULT_TOL.dir) -> np.ndarray:
    norm = np.linalg.norm(problem.obj_dir)
    if norm <= tol_dir:
        raise DegenerateObjective(f"objective direction has norm {norm:.3g}")
    return problem.obj_dir / norm


def cosines(problem: LpProblem, tol_dir: float = DEFAULT_TOL.dir) -> np.ndarray:
    """Cosine between each (unit) row normal and the objective direction."""
    return problem.rows @ unit_objective(problem, tol_dir)


def select_flattest(t, rejected: Iterable[int] = (), row_ids: Optional[Sequence[int]] = None,
                    tol_dir: float = DEFAULT_TOL.dir) -> int:
    """Position of the largest cosine among non-rejected rows.

    Ties within 1e-12 go to the lowest row id.
    """
    t = np.asarray(t, dtype=float)
    ids = range(1, len(t) + 1) if row_ids is None else row_ids
    rejected = set(rejected)
    avail = [i for i in range(len(t)) if i not in rejected]
    if not avail:
        raise NoCandidates("every row has been rejected")
    tmax = max(t[i] for i in avail)
    if tmax <= tol_dir:
        raise UnboundedDirection(f"largest cosine {tmax:.3g} does not oppose the objective")
    ties = [i for i in avail if t[i] >= tmax - TIE_TOL]
    return min(ties, key=lambda i: ids[i])


def select_pivot(row, live) -> int:
    """Live variable with the largest-magnitude coefficient (lowest index on ties)."""
    row = np.asarray(row, dtype=float)
    live = np.asarray(live, dtype=bool)
    mag = np.where(live, np.abs(row), -1.0)
    norm = np.linalg.norm(row[live])
    if norm < ZERO_ROW_NORM:
        raise ZeroRow(None, norm)
    return int(np.flatnonzero(mag >= mag.max() - TIE_TOL)[0])


# -- elimination -------------------------------------------------------------


def substitute_row(coeffs, rhs, plane, plane_rhs, j):
    """Replace x_j in ``coeffs . x <= rhs`` using ``plane . x = plane_rhs``.

    Works on a single row or a stack of rows.  Column j of the result is
    exactly zero.  No renormalization.
    """
    coeffs = np.array(coeffs, dtype=float)
    plane = np.asarray(plane, dtype=float)
    single = coeffs.ndim == 1
    coeffs = np.atleast_2d(coeffs)
    coupling = coeffs[:, j].copy()
    out = coeffs - np.outer(coupling, plane / plane[j])
    out[:, j] = 0.0
    new_rhs = np.asarray(rhs, dtype=float) - coupling * (plane_rhs / plane[j])
    if single:
        return out[0], float(new_rhs.reshape(-1)[0])
    return out, new_rhs


def substitute_objective(obj, offset, plane, plane_rhs, j):
    """Replace x_j in ``offset + obj . x``; returns ``(new_obj, new_offset)``."""
    obj = np.asarray(obj, dtype=float)
    plane = np.asarray(plane, dtype=float)
    dj = obj[j]
    new = obj - dj * plane / plane[j]
    new[j] = 0.0
    return new, float(offset + dj * plane_rhs / plane[j])


def eliminate(problem: LpProblem, k: int, j: int, stage: int = 1, tol: Tolerances = DEFAULT_TOL):
    """Use row ``k`` as an equation to remove variable ``j``.

    Returns ``(reduced_problem, record)``.  Row k leaves the system and is kept
    in the record; rows that become vacuous are dropped (or raise
    InfeasibleDetected) and the survivors are renormalized.
    """
    plane = problem.rows[k].copy()
    plane_rhs = float(problem.rhs[k])
    if abs(plane[j]) < ZERO_ROW_NORM:
        raise ZeroRow(problem.row_ids[k], abs(plane[j]))
    rest = problem.delete_rows([k])
    rows, rhs = substitute_row(rest.rows.reshape(-1, problem.n_vars), rest.rhs, plane, plane_rhs, j)
    obj, offset = substitute_objective(problem.obj_dir, problem.obj_offset, plane, plane_rhs, j)
    live = problem.live_vars.copy()
    live[j] = False
    reduced = LpProblem(rows, rhs, obj, offset, live, rest.row_ids)
    reduced, dropped = drop_vacuous_rows(reduced, tol.feas)
    if dropped:
        log.debug("stage %d: vacuous rows dropped %s", stage, dropped)
    record = EliminationRecord(plane, plane_rhs, int(j), int(stage), problem.row_ids[k])
    return normalize_rows(reduced), record


# -- terminal solve and back-substitution -------------------------------------


@dataclass(frozen=True)
class OneDimResult:
    status: Status
    value: Optional[float] = None


def solve_1d(problem: LpProblem, tol: Tolerances = DEFAULT_TOL) -> OneDimResult:
    """Maximize over the single live variable by interval intersection."""
    live = problem.live_index
    if live.size != 1:
        raise ValueError(f"solve_1d needs exactly one live variable, got {live.size}")
    alpha = problem.rows[:, live[0]]
    r = problem.rhs
    for a, rr in zip(alpha, r):
        if a == 0.0 and rr < -tol.feas:
            return OneDimResult(Status.INFEASIBLE)
    pos, neg = alpha > 0, alpha < 0
    upper = float(np.min(r[pos] / alpha[pos])) if pos.any() else np.inf
    lower = float(np.max(r[neg] / alpha[neg])) if neg.any() else -np.inf
    if lower > upper + tol.feas:
        return OneDimResult(Status.INFEASIBLE)
    d = problem.obj_dir[live[0]]
    if d > tol.dir:
        return OneDimResult(Status.UNBOUNDED) if np.isinf(upper) else OneDimResult(Status.OPTIMAL, upper)
    if d < -tol.dir:
        return OneDimResult(Status.UNBOUNDED) if np.isinf(lower) else OneDimResult(Status.OPTIMAL, lower)
    for v in (upper, lower):
        if np.isfinite(v):
            return OneDimResult(Status.OPTIMAL, v)
    return OneDimResult(Status.OPTIMAL, 0.0)


def back_substitute(trace: Sequence[EliminationRecord], x_partial) -> np.ndarray:
    """Recover eliminated variables from the saved planes, last stage first.

    Unknown entries of ``x_partial`` are NaN.
    """
    x = np.array(x_partial, dtype=float)
    for rec in reversed(list(trace)):
        a = rec.plane_coeffs
        others = np.flatnonzero(a != 0.0)
        others = others[others != rec.pivot]
        if np.any(np.isnan(x[others])):
            raise IncompleteTrace(f"stage {rec.stage} depends on an unset variable")
        x[rec.pivot] = (rec.plane_rhs - a[others] @ x[others]) / a[rec.pivot]
    if np.any(np.isnan(x)):
        raise IncompleteTrace(f"variables {np.flatnonzero(np.isnan(x)).tolist()} were never determined")
    return x


# -- driver ------------------------------------------------------------------


class _Stop(Exception):
    def __init__(self, status, message):
        super().__init__(message)
        self.status = status
        self.message = message


def _strict_start(problem: LpProblem, seeds, tol_feas):
    cands = [np.mean(seeds, axis=0)] + list(seeds) if seeds else []
    for c in cands:
        if np.all(residual(problem, c) > tol_feas):
            return c
    raise NotInterior("no strictly feasible seed for sampling")


class _Driver:
    def __init__(self, problem: LpProblem, interior_point, config: SolveConfig):
        self.config = config
        self.tol = config.tol
        self.rng = np.random.default_rng(config.seed)
        self.work = problem
        mode = config.redundancy
        if mode == "auto":
            mode = "exact" if within_cap(problem, config.oracle_cap) else "mc"
        self.mode = mode
        self.seeds = None
        if mode == "mc":
            if interior_point is None:
                raise NotInterior("Monte Carlo redundancy mode needs an interior point")
            p = np.asarray(interior_point, dtype=float)
            if not np.all(residual(problem, p) > self.tol.feas):
                raise NotInterior("declared interior point is not strictly feasible")
            self.seeds = [p]
        self.trace: List[Stage] = []

    # stage helpers

    def _fallback_to_exact(self, why):
        if not within_cap(self.work, self.config.oracle_cap):
            raise _Stop(Status.STALLED, f"sampling failed ({why}) and exact fallback exceeds the cap")
        log.info("stage %d: %s; switching to exact redundancy tests", len(self.trace) + 1, why)
        self.mode = "exact"
        self.seeds = None

    def _sample(self, start):
        return redundancy.hit_and_run_sample(self.work, start, self.config.samples, self.rng, self.tol.feas)

    def _pick_plane(self, t):
        """Return (position, deleted_ids, witness_hits) for the accepted plane."""
        work = self.work
        rejected, deleted = set(), []
        pool = start = None
        if self.mode == "mc":
            try:
                start = _strict_start(work, self.seeds, self.tol.feas)
                pool = self._sample(start)
            except (NotInterior, UnboundedChord) as exc:
                self._fallback_to_exact(str(exc))
        direction = unit_objective(work, self.tol.dir)
        while True:
            try:
                k = select_flattest(t, rejected, work.row_ids, self.tol.dir)
            except UnboundedDirection:
                if deleted:
                    raise _Stop(Status.STALLED, f"all opposing planes rejected as redundant: {deleted}")
                raise _Stop(Status.UNBOUNDED, "no constraint opposes the objective direction")
            except NoCandidates:
                raise _Stop(Status.STALLED, f"all candidate planes rejected as redundant: {deleted}")

            if self.mode == "exact":
                try:
                    redundant = redundancy.is_redundant_exact(work, k, self.config.oracle_cap)
                except InfeasibleDetected as exc:
                    raise _Stop(Status.INFEASIBLE, str(exc))
                hits = None
            else:
                redundant, hits = self._mc_verdict(k, pool, start, direction)
            if redundant:
                rejected.add(k)
                deleted.append(work.row_ids[k])
                continue
            return k, rejected, tuple(deleted), hits

    def _mc_verdict(self, k, pool, start, direction):
        cfg = self.config
        verdict = redundancy.is_redundant_mc(self.work, k, pool, direction)
        if verdict.no_hit:
            raise _Stop(Status.UNBOUNDED, f"{verdict.no_hit} rays escaped along the objective direction")
        if verdict.redundant:
            return True, None
        hits = list(verdict.hits)
        retries = 0
        while len(hits) < cfg.min_hits and retries < cfg.retry_cap:
            retries += 1
            more = self._sample(start)
            hits += redundancy.is_redundant_mc(self.work, k, more, direction).hits
        if len(hits) < cfg.min_hits and within_cap(self.work, cfg.oracle_cap):
            try:
                if redundancy.is_redundant_exact(self.work, k, cfg.oracle_cap):
                    return True, None
            except InfeasibleDetected as exc:
                raise _Stop(Status.INFEASIBLE, str(exc))
        return False, hits

    def _stage(self, n_stage):
        work = self.work
        t = cosines(work, self.tol.dir)
        k, rejected, deleted, hits = self._pick_plane(t)
        cosine = float(t[k])
        row_id = work.row_ids[k]
        if rejected:
            work = work.delete_rows(rejected)
            k = work.position_of(row_id)
        j = select_pivot(work.rows[k], work.live_vars)
        try:
            self.work, record = eliminate(work, k, j, n_stage, self.tol)
        except InfeasibleDetected as exc:
            raise _Stop(Status.INFEASIBLE, f"stage {n_stage}: {exc}")
        witnesses = None
        if hits is not None:
            on_plane = [h for h in hits
                        if abs(record.plane_coeffs @ h.point - record.plane_rhs) <= redundancy.PLANE_TOL]
            self.seeds = redundancy.reduced_feasible_points(on_plane, record)
            witnesses = len(self.seeds)
        self.trace.append(Stage(record, cosine, deleted, witnesses, self.mode))

    def _any_feasible(self):
        """A feasible point of the current problem for a constant objective."""
        if self.seeds:
            return np.mean(self.seeds, axis=0)
        if not within_cap(self.work, self.config.oracle_cap):
            raise _Stop(Status.STALLED, "constant objective and no feasible point available")
        res = oracle_solve(pin_lineality(self.work), objective=np.zeros(self.work.n_vars),
                           cap=self.config.oracle_cap)
        if not res.optimal:
            raise _Stop(Status.INFEASIBLE, "no feasible vertex in the reduced problem")
        return res.x

    def _terminal(self):
        work = self.work
        x = np.full(work.n_vars, np.nan)
        live = work.live_index
        d_norm = np.linalg.norm(work.obj_dir)
        if work.n_rows == 0:
            if d_norm > self.tol.dir:
                raise _Stop(Status.UNBOUNDED, "no constraints left to oppose the objective")
            x[live] = 0.0
            return x
        if d_norm <= self.tol.dir:
            x[live] = self._any_feasible()[live]
            return x
        res = solve_1d(work, self.tol)
        if res.status is not Status.OPTIMAL:
            raise _Stop(res.status, f"one-dimensional problem is {res.status.value}")
        x[live[0]] = res.value
        return x

    def run(self):
        n_stage = 0
        while self.work.n_live > 1:
            if self.work.n_rows == 0 or np.linalg.norm(self.work.obj_dir) <= self.tol.dir:
                break
            n_stage += 1
            self._stage(n_stage)
        return self._terminal()


def solve(problem: LpProblem, interior_point=None, config: Optional[SolveConfig] = None) -> SolveOutcome:
    """Maximize ``problem``'s objective by recursive flattest-plane reduction.

    Rows are (re)normalized on entry.  The returned ``z`` is evaluated from
    the input objective at the back-substituted point.
    """
    config = config or SolveConfig()
    try:
        work = prepare(problem, config.tol.feas)
    except InfeasibleDetected as exc:
        return SolveOutcome(Status.INFEASIBLE, message=str(exc), config=config)
    driver = _Driver(work, interior_point, config)
    try:
        x_partial = driver.run()
    except _Stop as stop:
        return SolveOutcome(stop.status, trace=driver.trace, message=stop.message, config=config)
    x = back_substitute([s.record for s in driver.trace], x_partial)
    reduced_z = objective_value(driver.work, x)
    violated = np.flatnonzero(residual(work, x) < -config.tol.feas)
    if violated.size:
        # only reachable when a Monte Carlo verdict deleted a plane that does touch the region
        bad = [work.row_ids[i] for i in violated]
        deleted = [r for s in driver.trace for r in s.deleted]
        return SolveOutcome(Status.STALLED, trace=driver.trace, config=config,
                            message=f"final point violates rows {bad}; rows deleted as redundant: {deleted}")
    return SolveOutcome(
        Status.OPTIMAL,
        x=x,
        z=objective_value(problem, x),
        trace=driver.trace,
        config=config,
        reduced_z=reduced_z,
    )
