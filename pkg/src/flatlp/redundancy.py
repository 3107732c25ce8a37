"""Redundancy tests for the current flattest plane.

A plane is redundant when it lies entirely outside the feasible region.  The
Monte Carlo test casts rays from random feasible points along the objective
direction: a plane that is never the first one struck is flagged as likely
redundant.  The rays that do strike it first end on the plane and become the
feasible seeds of the next, lower-dimensional problem.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, Optional

import numpy as np

from .errors import EmptySample, InfeasibleDetected, NotInterior, NotOnPlane, UnboundedChord
from .model import DEFAULT_TOL, LpProblem, residual
from .oracle import ENUMERATION_CAP, oracle_solve, pin_lineality

if TYPE_CHECKING:
    from .reduce import EliminationRecord

log = logging.getLogger(__name__)

DIRECTIONAL_EPS = 1e-12
MIN_CHORD = 1e-12
PLANE_TOL = 1e-9


@dataclass(frozen=True)
class RayHit:
    row: int  # position of the struck row in the problem
    row_id: int
    lam: float
    point: np.ndarray


@dataclass
class McVerdict:
    redundant: bool
    hits: List[RayHit] = field(default_factory=list)
    no_hit: int = 0  # rays that escaped: evidence of unboundedness
    n_rays: int = 0

    @property
    def label(self) -> str:
        return "LikelyRedundant" if self.redundant else "NonRedundant"


def random_direction(live: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    u = np.zeros(live.shape[0])
    idx = np.flatnonzero(live)
    while True:
        g = rng.standard_normal(idx.size)
        norm = np.linalg.norm(g)
        if norm > 1e-12:
            u[idx] = g / norm
            return u


def hit_and_run_sample(problem: LpProblem, interior_point, count: int, rng: np.random.Generator,
                       tol_feas: float = DEFAULT_TOL.feas) -> List[np.ndarray]:
    """Random walk inside the polytope by jumps to uniform points on chords.

    Each step draws a uniform direction over the live variables, computes the
    feasible chord through the current point and moves to a uniform point on
    it.  Chords shorter than 1e-12 leave the point where it is.
    """
    x = np.array(interior_point, dtype=float)
    if np.any(residual(problem, x) <= tol_feas):
        raise NotInterior("hit-and-run start point is not strictly feasible")
    A, r = problem.rows, problem.rhs
    points = []
    for _ in range(count):
        u = random_direction(problem.live_vars, rng)
        au = A @ u
        slack = np.maximum(r - A @ x, 0.0)
        up, down = au > DIRECTIONAL_EPS, au < -DIRECTIONAL_EPS
        if not up.any() or not down.any():
            raise UnboundedChord("chord through the sample is unbounded")
        hi = np.min(slack[up] / au[up])
        lo = np.max(slack[down] / au[down])
        if hi - lo < MIN_CHORD:
            log.debug("degenerate chord of length %.3g; point kept", hi - lo)
        else:
            x = x + rng.uniform(lo, hi) * u
        points.append(x.copy())
    return points


def ray_first_hit(problem: LpProblem, point, direction) -> Optional[RayHit]:
    """First plane struck by ``point + lam * direction`` for ``lam >= 0``.

    Returns None when no row has a positive directional component.  Points
    sitting marginally beyond a plane (within tolerance) hit it at ``lam = 0``.
    """
    p = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    ad = problem.rows @ d
    cand = np.flatnonzero(ad > DIRECTIONAL_EPS)
    if cand.size == 0:
        return None
    lam = np.maximum((problem.rhs[cand] - problem.rows[cand] @ p) / ad[cand], 0.0)
    best = lam.min()
    ties = cand[lam == best]
    pos = min(ties, key=lambda i: problem.row_ids[i])
    return RayHit(int(pos), problem.row_ids[pos], float(best), p + best * d)


def _cast_rays(problem: LpProblem, points: np.ndarray, direction: np.ndarray):
    """Vectorized ray_first_hit; returns (positions, lambdas) with -1 for no hit."""
    ad = problem.rows @ direction
    cand = np.flatnonzero(ad > DIRECTIONAL_EPS)
    if cand.size == 0:
        return np.full(len(points), -1), np.full(len(points), np.inf)
    cand = cand[np.argsort([problem.row_ids[i] for i in cand], kind="stable")]
    slack = problem.rhs[cand][None, :] - points @ problem.rows[cand].T
    lam = np.maximum(slack / ad[cand][None, :], 0.0)
    first = np.argmin(lam, axis=1)  # argmin keeps the lowest row id on ties
    return cand[first], lam[np.arange(len(points)), first]


def is_redundant_mc(problem: LpProblem, k: int, points, direction) -> McVerdict:
    """Monte Carlo redundancy verdict for the row at position ``k``.

    Witness hits are returned in sample order.
    """
    if len(points) == 0:
        raise EmptySample("no sample points to cast rays from")
    P = np.asarray(points, dtype=float)
    d = np.asarray(direction, dtype=float)
    pos, lam = _cast_rays(problem, P, d)
    no_hit = int(np.sum(pos < 0))
    struck = np.flatnonzero(pos == k)
    hits = [RayHit(k, problem.row_ids[k], float(lam[i]), P[i] + lam[i] * d) for i in struck]
    return McVerdict(redundant=not hits, hits=hits, no_hit=no_hit, n_rays=len(P))


def is_redundant_exact(problem: LpProblem, k: int, cap: int = ENUMERATION_CAP) -> bool:
    """True when plane ``k`` does not touch the feasible region.

    Maximizes ``a_k . x`` by vertex enumeration over the region of all rows
    (row ``k`` included, which bounds the objective).  For a non-empty region
    this maximum is below ``r_k`` exactly when the maximum over the other rows
    is.  An empty region raises InfeasibleDetected.
    """
    res = oracle_solve(pin_lineality(problem), objective=problem.rows[k], cap=cap)
    if not res.optimal:
        raise InfeasibleDetected("no feasible vertex in the current polytope")
    return bool(res.z < problem.rhs[k] - PLANE_TOL)


def reduced_feasible_points(hits, record: "EliminationRecord") -> List[np.ndarray]:
    """Project hit points on the eliminated plane into the reduced space.

    The pivot coordinate is dead after elimination and is zeroed; its value is
    recovered from the plane equation during back-substitution.
    """
    out = []
    for h in hits:
        p = np.asarray(h.point if isinstance(h, RayHit) else h, dtype=float)
        gap = abs(record.plane_coeffs @ p - record.plane_rhs)
        if gap > PLANE_TOL:
            raise NotOnPlane(f"hit point is {gap:.3g} off the eliminated plane")
        q = p.copy()
        q[record.pivot] = 0.0
        out.append(q)
    return out
