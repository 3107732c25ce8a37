import numpy as np
import pytest

from flatlp.errors import EmptySample, NotInterior, NotOnPlane
from flatlp.harness import generate_instance
from flatlp.model import LpProblem, normalize_rows, residual
from flatlp.reduce import EliminationRecord, cosines, eliminate, select_flattest
from flatlp.redundancy import (
    RayHit,
    hit_and_run_sample,
    is_redundant_exact,
    is_redundant_mc,
    ray_first_hit,
    reduced_feasible_points,
)

from conftest import FIGURE3_INTERIOR, S2, figure3, hypercube, unit_square

UP = np.array([0.0, 1.0])


def test_hit_and_run_stays_feasible(square):
    pts = hit_and_run_sample(square, [0.5, 0.5], 100, np.random.default_rng(7))
    assert len(pts) == 100
    assert all(np.all(residual(square, p) >= -1e-7) for p in pts)
    # the walk actually moves around the square
    assert np.ptp(np.array(pts), axis=0).min() > 0.5


def test_hit_and_run_edge_cases(square):
    assert hit_and_run_sample(square, [0.5, 0.5], 0, np.random.default_rng(0)) == []
    with pytest.raises(NotInterior):
        hit_and_run_sample(square, [2, 2], 10, np.random.default_rng(0))


def test_hit_and_run_deterministic(square):
    a = hit_and_run_sample(square, [0.5, 0.5], 50, np.random.default_rng(3))
    b = hit_and_run_sample(square, [0.5, 0.5], 50, np.random.default_rng(3))
    np.testing.assert_array_equal(a, b)


def test_hit_and_run_roughly_uniform():
    # mean of uniform samples in the unit square is (1/2, 1/2)
    pts = np.array(hit_and_run_sample(unit_square(), [0.2, 0.7], 20000, np.random.default_rng(1)))
    np.testing.assert_allclose(pts.mean(axis=0), [0.5, 0.5], atol=0.02)


def test_ray_first_hit_examples():
    p = LpProblem([[0, 1], [1, 0]], [1, 1], [0, 1])
    hit = ray_first_hit(p, [0, 0], UP)
    assert (hit.row_id, hit.lam) == (1, 1.0)
    np.testing.assert_allclose(hit.point, [0, 1])

    p = LpProblem([[0, 1], [0.6, 0.8]], [2, 0.8], [0, 1])
    hit = ray_first_hit(p, [0, 0], UP)
    assert hit.row_id == 2 and hit.lam == pytest.approx(1.0)
    np.testing.assert_allclose(hit.point, [0, 1])

    assert ray_first_hit(LpProblem([[0, -1]], [0], [0, 1]), [0, 0], UP) is None


def test_ray_hits_are_on_plane_and_feasible(rng):
    p, origin = generate_instance(3, 8, seed=2)
    d = p.obj_dir / np.linalg.norm(p.obj_dir)
    for x in hit_and_run_sample(p, origin, 200, rng):
        hit = ray_first_hit(p, x, d)
        assert abs(p.rows[hit.row] @ hit.point - p.rhs[hit.row]) <= 1e-9
        assert np.all(residual(p, hit.point) >= -1e-7)


def test_mc_flags_floating_plane(fig3):
    pts = hit_and_run_sample(fig3, FIGURE3_INTERIOR, 1000, np.random.default_rng(0))
    k = select_flattest(cosines(fig3), row_ids=fig3.row_ids)
    assert fig3.row_ids[k] == 1
    verdict = is_redundant_mc(fig3, k, pts, UP)
    assert verdict.redundant and verdict.label == "LikelyRedundant"
    assert verdict.no_hit == 0


def test_mc_roof_plane_nonredundant(square):
    pts = hit_and_run_sample(square, [0.5, 0.5], 200, np.random.default_rng(4))
    verdict = is_redundant_mc(square, 1, pts, UP)
    assert not verdict.redundant
    assert len(verdict.hits) == 200
    assert all(abs(h.point[1] - 1) < 1e-12 for h in verdict.hits)


def test_mc_empty_sample(square):
    with pytest.raises(EmptySample):
        is_redundant_mc(square, 1, [], UP)


def test_exact_examples(fig3, square):
    assert is_redundant_exact(fig3, 0) is True
    assert is_redundant_exact(square, 1) is False
    dup = LpProblem([[0, 1], [0, 1], [1, 0], [-1, 0], [0, -1]], [1, 1, 1, 1, 1], [0, 1])
    assert is_redundant_exact(dup, 0) is False


def test_exact_handles_region_without_vertices():
    # a strip has no vertices but is certainly not empty
    strip = LpProblem([[0, 1], [0, -1]], [1, 1], [1, 1])
    assert is_redundant_exact(strip, 0) is False
    floating = LpProblem([[0, 1], [0, 1], [0, -1]], [5, 1, 1], [0, 1])
    assert is_redundant_exact(floating, 0) is True


def test_reduced_points_examples():
    rec = EliminationRecord(np.array([0.0, 1.0]), 1.0, 1, 1, 1)
    hit = RayHit(0, 1, 0.5, np.array([0.3, 1.0]))
    (q,) = reduced_feasible_points([hit], rec)
    assert q[0] == 0.3
    assert reduced_feasible_points([], rec) == []
    with pytest.raises(NotOnPlane):
        reduced_feasible_points([RayHit(0, 1, 0.5, np.array([0.3, 0.9]))], rec)


def test_reduced_points_feasible_after_elimination():
    p = LpProblem([[0, 1], [S2, S2]], [1, np.sqrt(2)], [S2, S2])
    hit = ray_first_hit(p, [0, 0], UP)
    assert hit.row_id == 1
    reduced, rec = eliminate(p, hit.row, 1)
    (q,) = reduced_feasible_points([hit], rec)
    assert np.all(residual(reduced, q) >= -1e-7)


def _witness_fixtures():
    sq = unit_square()
    tilted = normalize_rows(LpProblem([[1, 0], [0, 1], [-1, 0], [0, -1], [1, 1]], [1, 1, 0, 0, 1.5], [0.3, 1]))
    cube = hypercube(3, [0.2, 0.3, 0.9])
    return [(sq, [0.5, 0.5]), (tilted, [0.4, 0.4]), (cube, [0.5, 0.5, 0.5])]


@pytest.mark.parametrize("fixture", range(3))
def test_mc_never_rejects_exact_nonredundant(fixture):
    """Over 100 seeds, MC flags no row that the exact test keeps (>= 99% required)."""
    problem, start = _witness_fixtures()[fixture]
    d = problem.obj_dir / np.linalg.norm(problem.obj_dir)
    keep = [k for k in range(problem.n_rows)
            if problem.rows[k] @ d > 1e-12 and not is_redundant_exact(problem, k)]
    assert keep
    misses = 0
    for seed in range(100):
        pts = hit_and_run_sample(problem, start, 1000, np.random.default_rng(seed))
        misses += any(is_redundant_mc(problem, k, pts, d).redundant for k in keep)
    assert misses <= 1
