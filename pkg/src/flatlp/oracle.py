"""Exact brute-force LP solver by vertex enumeration.

Every n-subset of rows is solved as an equality system; feasible solutions
are the vertices of the polytope and the best one is the optimum.  The
oracle assumes a bounded feasible region and does not detect unboundedness.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import OracleTooLarge, Singular
from .model import LpProblem

ENUMERATION_CAP = 2_000_000
PIVOT_TOL = 1e-10
VERTEX_FEAS_TOL = 1e-8
_CHUNK = 65536


def solve_linear_systems(A: np.ndarray, b: np.ndarray, pivot_tol: float = PIVOT_TOL):
    """Batched Gaussian elimination with partial pivoting.

    ``A`` has shape (B, n, n) and ``b`` shape (B, n).  Rows are scaled to unit
    max-abs before elimination.  Returns ``(x, singular)`` where ``singular``
    flags systems with a pivot below ``pivot_tol``; their ``x`` is garbage.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    nb, n, _ = A.shape
    scale = np.abs(A).max(axis=2)
    singular = np.any(scale == 0.0, axis=1)
    scale[scale == 0.0] = 1.0
    A /= scale[:, :, None]
    b /= scale
    batch = np.arange(nb)
    for c in range(n):
        p = c + np.argmax(np.abs(A[:, c:, c]), axis=1)
        row_c, row_p = A[batch, c].copy(), A[batch, p].copy()
        A[batch, c], A[batch, p] = row_p, row_c
        b_c, b_p = b[batch, c].copy(), b[batch, p].copy()
        b[batch, c], b[batch, p] = b_p, b_c
        piv = A[:, c, c]
        singular |= np.abs(piv) < pivot_tol
        piv = np.where(singular, 1.0, piv)
        f = A[:, c + 1:, c] / piv[:, None]
        A[:, c + 1:, c:] -= f[:, :, None] * A[:, None, c, c:]
        b[:, c + 1:] -= f * b[:, c, None]
    x = np.zeros((nb, n))
    for c in range(n - 1, -1, -1):
        piv = np.where(singular, 1.0, A[:, c, c])
        x[:, c] = (b[:, c] - np.einsum("bi,bi->b", A[:, c, c + 1:], x[:, c + 1:])) / piv
    return x, singular


def solve_linear_system(A, b) -> np.ndarray:
    """Solve a single square system; raises Singular on a vanishing pivot."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
        raise ValueError("expected a square system")
    x, singular = solve_linear_systems(A[None], b[None])
    if singular[0]:
        raise Singular("matrix is singular to working precision")
    return x[0]


@dataclass(frozen=True)
class VertexCandidate:
    active_set: tuple  # row ids
    x: np.ndarray
    feasible: bool
    z: float


@dataclass(frozen=True)
class OracleResult:
    status: str  # "optimal" or "no_feasible_vertex"
    x: Optional[np.ndarray] = None
    z: Optional[float] = None
    active_set: Optional[tuple] = None
    n_candidates: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def pin_lineality(problem: LpProblem, tol: float = 1e-10) -> LpProblem:
    """Add rows ``v.x <= 0`` and ``-v.x <= 0`` for a basis of the null space of the live rows.

    A polyhedron with a lineality space has no vertices; pinning the
    orthogonal complement leaves a pointed polyhedron that is non-empty
    exactly when the original is, on which every row-space objective attains
    the same maximum.
    """
    live = problem.live_index
    A = problem.rows[:, live]
    if A.shape[0]:
        _, sv, vt = np.linalg.svd(A)
        rank = int(np.sum(sv > tol * max(1.0, sv[0])))
        basis = vt[rank:]
    else:
        basis = np.eye(live.size)
    if basis.shape[0] == 0:
        return problem
    extra = np.zeros((2 * basis.shape[0], problem.n_vars))
    extra[0::2, live] = basis
    extra[1::2, live] = -basis
    top = max(problem.row_ids, default=0)
    return problem.replace(
        rows=np.vstack([problem.rows, extra]),
        rhs=np.concatenate([problem.rhs, np.zeros(extra.shape[0])]),
        row_ids=list(problem.row_ids) + list(range(top + 1, top + 1 + extra.shape[0])),
    )


def subset_count(problem: LpProblem) -> int:
    return math.comb(problem.n_rows, problem.n_live)


def within_cap(problem: LpProblem, cap: int = ENUMERATION_CAP) -> bool:
    return subset_count(problem) <= cap


def _subset_chunks(m, k, size=_CHUNK):
    combos = itertools.combinations(range(m), k)
    while True:
        flat = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, size)), dtype=np.intp)
        if flat.size == 0:
            return
        yield flat.reshape(-1, k)


def _evaluate(problem: LpProblem, objective, offset, chunk):
    live = problem.live_index
    A = problem.rows[:, live]
    xs, singular = solve_linear_systems(A[chunk], problem.rhs[chunk])
    slack = problem.rhs[None, :] - xs @ A.T
    feasible = ~singular & np.all(slack >= -VERTEX_FEAS_TOL, axis=1)
    z = offset + xs @ objective[live]
    return xs, feasible, z, singular


def vertex_candidates(problem: LpProblem, objective=None, cap: int = ENUMERATION_CAP):
    """List every non-singular n-subset solution (feasible or not)."""
    if subset_count(problem) > cap:
        raise OracleTooLarge(f"C({problem.n_rows}, {problem.n_live}) exceeds cap {cap}")
    if objective is None:
        objective, offset = problem.obj_dir, problem.obj_offset
    else:
        objective, offset = np.asarray(objective, dtype=float), 0.0
    out = []
    for chunk in _subset_chunks(problem.n_rows, problem.n_live):
        xs, feasible, z, singular = _evaluate(problem, objective, offset, chunk)
        for idx, x, f, zz, s in zip(chunk, xs, feasible, z, singular):
            if s:
                continue
            full = np.zeros(problem.n_vars)
            full[problem.live_index] = x
            out.append(VertexCandidate(tuple(sorted(problem.row_ids[i] for i in idx)), full, bool(f), float(zz)))
    return out


def oracle_solve(problem: LpProblem, objective=None, cap: int = ENUMERATION_CAP) -> OracleResult:
    """Maximize over all feasible vertices.

    ``objective`` overrides the problem's objective direction (the offset is
    then taken as zero).  Ties within 1e-9 relative resolve to the
    lexicographically smallest sorted tuple of row ids.
    """
    n_live = problem.n_live
    if subset_count(problem) > cap:
        raise OracleTooLarge(f"C({problem.n_rows}, {n_live}) = {subset_count(problem)} exceeds cap {cap}")
    if objective is None:
        objective, offset = problem.obj_dir, problem.obj_offset
    else:
        objective, offset = np.asarray(objective, dtype=float), 0.0
    if n_live == 0 or problem.n_rows < n_live:
        return OracleResult("no_feasible_vertex")

    ids = np.asarray(problem.row_ids)
    kept_x, kept_z, kept_sets = [], [], []
    best = -np.inf
    n_feasible = 0
    for chunk in _subset_chunks(problem.n_rows, n_live):
        xs, feasible, z, _ = _evaluate(problem, objective, offset, chunk)
        if not feasible.any():
            continue
        n_feasible += int(feasible.sum())
        xs, z, chunk = xs[feasible], z[feasible], chunk[feasible]
        best = max(best, float(z.max()))
        near = z >= best - 1e-9 * max(1.0, abs(best))
        kept_x.append(xs[near])
        kept_z.append(z[near])
        kept_sets.append(np.sort(ids[chunk[near]], axis=1))
    if n_feasible == 0:
        return OracleResult("no_feasible_vertex")

    xs = np.concatenate(kept_x)
    z = np.concatenate(kept_z)
    sets = np.concatenate(kept_sets)
    tied = np.flatnonzero(z >= best - 1e-9 * max(1.0, abs(best)))
    order = np.lexsort(sets[tied].T[::-1])
    pick = tied[order[0]]
    x = np.zeros(problem.n_vars)
    x[problem.live_index] = xs[pick]
    return OracleResult(
        "optimal",
        x=x,
        z=float(z[pick]),
        active_set=tuple(int(i) for i in sets[pick]),
        n_candidates=n_feasible,
    )
