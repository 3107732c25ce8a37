"""flatlp v1 problem files and solution JSON.

A problem file is plain text::

    n m
    d_1 ... d_n
    a_11 ... a_1n r_1      # m constraint lines
    ...
    point p_1 ... p_n      # optional strictly interior point

'#' starts a comment; blank lines are ignored.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotInterior, ParseError
from .model import DEFAULT_TOL, LpProblem, prepare, residual


def fmt(v: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    v = float(v)
    if v == 0.0:
        return "0"
    return format(v, ".17g")


@dataclass(frozen=True)
class ProblemFile:
    """Parsed file: the original values plus the normalized problem."""

    rows: np.ndarray
    rhs: np.ndarray
    objective: np.ndarray
    point: Optional[np.ndarray]
    problem: LpProblem

    @property
    def n(self):
        return self.objective.shape[0]

    @property
    def m(self):
        return self.rows.shape[0]

    def to_text(self) -> str:
        return format_problem_file(self.rows, self.rhs, self.objective, self.point)


def _reals(tokens, lineno):
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(lineno, f"not a real number ({exc})") from None


def parse_problem_file(text: str, tol_feas: float = DEFAULT_TOL.feas) -> ProblemFile:
    lines = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last = lineno
        body = raw.split("#", 1)[0].split()
        if body:
            lines.append((lineno, body))
    it = iter(lines)

    def take(what):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(last + 1, f"unexpected end of file, expected {what}") from None

    lineno, head = take("header 'n m'")
    if len(head) != 2:
        raise ParseError(lineno, "header must be two integers 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(lineno, "header must be two integers 'n m'") from None
    if n < 1 or m < 1:
        raise ParseError(lineno, "n and m must be positive")

    lineno, toks = take("objective line")
    if len(toks) != n:
        raise ParseError(lineno, f"objective needs {n} coefficients, got {len(toks)}")
    obj = _reals(toks, lineno)

    rows, rhs = [], []
    for u in range(m):
        lineno, toks = take(f"constraint {u + 1} of {m}")
        if toks[0] == "point":
            raise ParseError(lineno, f"expected constraint {u + 1} of {m}, found point line")
        if len(toks) != n + 1:
            raise ParseError(lineno, f"constraint needs {n + 1} numbers, got {len(toks)}")
        vals = _reals(toks, lineno)
        rows.append(vals[:n])
        rhs.append(vals[n])

    point = None
    rest = list(it)
    if rest:
        lineno, toks = rest[0]
        if toks[0] != "point":
            raise ParseError(lineno, f"header declares {m} constraints but more lines follow")
        if len(toks) != n + 1:
            raise ParseError(lineno, f"point needs {n} coordinates, got {len(toks) - 1}")
        point = np.array(_reals(toks[1:], lineno))
        if len(rest) > 1:
            raise ParseError(rest[1][0], "trailing content after point line")

    raw = LpProblem(rows, rhs, obj)
    problem = prepare(raw, tol_feas)
    if point is not None and not np.all(residual(problem, point) > tol_feas):
        raise NotInterior("declared point is not strictly feasible")
    return ProblemFile(rows=raw.rows, rhs=raw.rhs, objective=raw.obj_dir, point=point, problem=problem)


def format_problem_file(rows, rhs, objective, point=None, comment: Optional[str] = None) -> str:
    rows = np.asarray(rows, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    objective = np.asarray(objective, dtype=float)
    out = []
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    out.append(f"{objective.shape[0]} {rows.shape[0]}")
    out.append(" ".join(fmt(v) for v in objective))
    for a, r in zip(rows, rhs):
        out.append(" ".join(fmt(v) for v in a) + " " + fmt(r))
    if point is not None:
        out.append("point " + " ".join(fmt(v) for v in point))
    return "\n".join(out) + "\n"


def format_problem(problem: LpProblem, point=None, comment=None) -> str:
    return format_problem_file(problem.rows, problem.rhs, problem.obj_dir, point, comment)


# -- JSON ----------------------------------------------------------------------


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Minimal JSON writer that prints floats with 17 significant digits.

    Key order is the insertion order of the dicts passed in.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise ValueError("non-finite number in JSON output")
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def stage_dict(stage) -> dict:
    return {
        "k": stage.row_id,
        "j": stage.pivot + 1,
        "t_k": stage.cosine,
        "deleted": list(stage.deleted),
    }


def solution_dict(outcome) -> dict:
    cfg = outcome.config
    out = {"status": outcome.status.value}
    if outcome.x is not None:
        out["x"] = [float(v) for v in outcome.x]
        out["z"] = float(outcome.z)
    out["stages"] = [stage_dict(s) for s in outcome.trace]
    out["seed"] = cfg.seed
    out["redundancy"] = cfg.redundancy
    out["tolerances"] = {"feas": cfg.tol.feas, "norm": cfg.tol.norm, "dir": cfg.tol.dir}
    if outcome.message:
        out["message"] = outcome.message
    return out


def write_solution_json(outcome) -> str:
    return dumps(solution_dict(outcome)) + "\n"
