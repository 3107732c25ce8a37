"""LP problem representation: maximize d0 + d.x subject to A x <= r.

Variables are free; bounds must be supplied as explicit rows.  Eliminated
variables keep their column (filled with exact zeros) and are tracked by
``live_vars`` so indices never need remapping.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InfeasibleDetected, ZeroRow

ZERO_ROW_NORM = 1e-14


@dataclass(frozen=True)
class Tolerances:
    feas: float = 1e-7
    norm: float = 1e-12
    dir: float = 1e-10  # minimum objective-direction norm


DEFAULT_TOL = Tolerances()


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LpProblem:
    """Constraint system ``rows @ x <= rhs`` with objective ``obj_offset + obj_dir @ x``.

    Instances are immutable; every transformation returns a new problem.
    ``row_ids`` are the 1-based indices of the rows in the original input.
    """

    rows: np.ndarray
    rhs: np.ndarray
    obj_dir: np.ndarray
    obj_offset: float = 0.0
    live_vars: Optional[np.ndarray] = None
    row_ids: Optional[Sequence[int]] = None

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        obj = np.array(self.obj_dir, dtype=float).reshape(-1)
        n = obj.shape[0]
        if rows.size == 0:
            rows = rows.reshape(0, n)
        if rows.ndim != 2 or rows.shape[1] != n:
            raise DimensionMismatch(f"rows must be (m, {n}), got {rows.shape}")
        rhs = np.array(self.rhs, dtype=float).reshape(-1)
        if rhs.shape[0] != rows.shape[0]:
            raise DimensionMismatch(f"rhs has {rhs.shape[0]} entries for {rows.shape[0]} rows")
        live = np.ones(n, dtype=bool) if self.live_vars is None else np.array(self.live_vars, dtype=bool)
        if live.shape != (n,):
            raise DimensionMismatch(f"live_vars must have length {n}")
        ids = tuple(range(1, rows.shape[0] + 1)) if self.row_ids is None else tuple(int(i) for i in self.row_ids)
        if len(ids) != rows.shape[0]:
            raise DimensionMismatch("row_ids length differs from row count")
        if len(set(ids)) != len(ids):
            raise ValueError("row_ids must be unique")
        rows[:, ~live] = 0.0
        obj[~live] = 0.0
        object.__setattr__(self, "rows", _frozen(rows))
        object.__setattr__(self, "rhs", _frozen(rhs))
        object.__setattr__(self, "obj_dir", _frozen(obj))
        object.__setattr__(self, "obj_offset", float(self.obj_offset))
        object.__setattr__(self, "live_vars", _frozen(live, bool))
        object.__setattr__(self, "row_ids", ids)

    @property
    def n_vars(self) -> int:
        return self.obj_dir.shape[0]

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_live(self) -> int:
        return int(self.live_vars.sum())

    @property
    def live_index(self) -> np.ndarray:
        return np.flatnonzero(self.live_vars)

    def replace(self, **changes) -> "LpProblem":
        return dataclasses.replace(self, **changes)

    def delete_rows(self, positions: Iterable[int]) -> "LpProblem":
        """Return a copy without the rows at the given positions."""
        drop = set(int(p) for p in positions)
        keep = [p for p in range(self.n_rows) if p not in drop]
        return self.replace(
            rows=self.rows[keep],
            rhs=self.rhs[keep],
            row_ids=[self.row_ids[p] for p in keep],
        )

    def position_of(self, row_id: int) -> int:
        return self.row_ids.index(row_id)

    def __repr__(self):
        return f"LpProblem(n={self.n_vars}, live={self.n_live}, m={self.n_rows})"


def row_norms(problem: LpProblem) -> np.ndarray:
    # dead columns are exactly zero, so the full norm equals the live-column norm
    return np.linalg.norm(problem.rows, axis=1)


def normalize_rows(problem: LpProblem) -> LpProblem:
    """Scale every row (and its rhs) to unit Euclidean norm.

    Raises ZeroRow when a row is vacuous; apply :func:`drop_vacuous_rows` first.
    """
    norms = row_norms(problem)
    bad = np.flatnonzero(norms < ZERO_ROW_NORM)
    if bad.size:
        p = int(bad[0])
        raise ZeroRow(problem.row_ids[p], float(norms[p]))
    return problem.replace(rows=problem.rows / norms[:, None], rhs=problem.rhs / norms)


def drop_vacuous_rows(problem: LpProblem, tol_feas: float = DEFAULT_TOL.feas):
    """Remove rows whose live coefficients are all (numerically) zero.

    Such a row reads ``0 <= r``: it is dropped when ``r >= -tol_feas`` and
    certifies infeasibility otherwise.  Returns ``(problem, dropped_row_ids)``.
    """
    norms = row_norms(problem)
    vacuous = np.flatnonzero(norms < ZERO_ROW_NORM)
    if vacuous.size == 0:
        return problem, ()
    for p in vacuous:
        if problem.rhs[p] < -tol_feas:
            raise InfeasibleDetected(
                f"row {problem.row_ids[p]} reduced to 0 <= {problem.rhs[p]:.6g}"
            )
    dropped = tuple(problem.row_ids[p] for p in vacuous)
    return problem.delete_rows(vacuous), dropped


def prepare(problem: LpProblem, tol_feas: float = DEFAULT_TOL.feas) -> LpProblem:
    """Apply the vacuous-row rule, then normalize."""
    problem, _ = drop_vacuous_rows(problem, tol_feas)
    return normalize_rows(problem)


def _check_point(problem: LpProblem, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n_vars,):
        raise DimensionMismatch(f"point has shape {x.shape}, expected ({problem.n_vars},)")
    return x


def residual(problem: LpProblem, x) -> np.ndarray:
    """Slack ``r - A x`` of every row; negative entries are violations."""
    x = _check_point(problem, x)
    return problem.rhs - problem.rows @ x


def is_feasible(problem: LpProblem, x, tol: float = DEFAULT_TOL.feas) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    res = residual(problem, x)
    return bool(np.all(res >= -tol))


def objective_value(problem: LpProblem, x) -> float:
    x = _check_point(problem, x)
    return float(problem.obj_offset + problem.obj_dir @ x)
