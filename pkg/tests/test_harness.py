import csv
import io

import numpy as np
import pytest

from flatlp.harness import (
    CSV_COLUMNS,
    BatchConfig,
    ComparisonReport,
    agreement,
    compare,
    generate_instance,
    m_for,
    render_csv,
    run_batch,
)
from flatlp.model import LpProblem, residual
from flatlp.reduce import SolveConfig, Status

from conftest import FIGURE3_INTERIOR, figure3, unit_square


def test_generate_instance_structure():
    p, origin = generate_instance(2, 5, seed=42)
    assert p.n_rows == 9
    assert np.all(residual(p, origin) >= 0.1 - 1e-12)
    np.testing.assert_allclose(np.linalg.norm(p.rows, axis=1), 1.0, atol=1e-12)
    assert np.linalg.norm(p.obj_dir) == pytest.approx(1.0)


def test_generate_instance_small():
    p, _ = generate_instance(1, 1, seed=0)
    assert p.n_rows == 3
    assert p.rhs[1] == 10 and p.rhs[2] == 10


def test_generate_instance_deterministic():
    a, _ = generate_instance(3, 6, seed=9)
    b, _ = generate_instance(3, 6, seed=9)
    np.testing.assert_array_equal(a.rows, b.rows)
    np.testing.assert_array_equal(a.rhs, b.rhs)
    np.testing.assert_array_equal(a.obj_dir, b.obj_dir)


def test_compare_unit_square():
    rep = compare(unit_square(), [0.5, 0.5])
    assert rep.agree and rep.abs_gap <= 1e-12
    assert rep.solver_feasible


def test_compare_figure3_lists_deleted_row():
    rep = compare(figure3(), FIGURE3_INTERIOR, SolveConfig(redundancy="exact"))
    assert rep.agree
    assert rep.stages[0][3] == (1,)
    assert rep.z_solver == pytest.approx(1.0)


def test_compare_infeasible_fixture():
    p = LpProblem([[1, 0], [-1, 0], [0, 1], [0, -1]], [0, -1, 1, 0], [1, 0])
    rep = compare(p)
    assert rep.solver_status is Status.INFEASIBLE
    assert rep.oracle_status is Status.INFEASIBLE
    assert rep.agree and rep.z_solver is None


@pytest.mark.parametrize("a, b, za, zb, expected", [
    (Status.OPTIMAL, Status.OPTIMAL, 1.0, 1.0 + 5e-7, True),
    (Status.OPTIMAL, Status.OPTIMAL, 1.0, 1.0 + 2e-6, False),
    (Status.OPTIMAL, Status.OPTIMAL, 1000.0, 1000.0005, True),
    (Status.STALLED, Status.OPTIMAL, None, 1.0, False),
    (Status.INFEASIBLE, Status.INFEASIBLE, None, None, True),
])
def test_agreement_rule(a, b, za, zb, expected):
    assert agreement(a, b, za, zb) is expected


@pytest.mark.parametrize("rule, n, expected", [("3n", 2, 6), ("n", 4, 4), ("7", 3, 7), ("5:5", 2, 5)])
def test_m_rule(rule, n, expected):
    assert m_for(rule, n, np.random.default_rng(0)) == expected


def test_m_rule_range_and_errors():
    rng = np.random.default_rng(0)
    assert {m_for("3:12", 2, rng) for _ in range(200)} == set(range(3, 13))
    with pytest.raises(ValueError):
        m_for("lots", 2, rng)


def test_batch_two_dimensional_agreement():
    res = run_batch(BatchConfig(n_list=[2], m_rule="3n", trials=30, seed=42, mode="exact"))
    assert res.agreement_rate == 1.0
    assert res.exit_code == 0


def test_batch_zero_trials():
    res = run_batch(BatchConfig(trials=0))
    assert res.csv == ",".join(CSV_COLUMNS) + "\n"
    assert res.exit_code == 0


def test_batch_deterministic():
    cfg = BatchConfig(n_list=[2, 3], m_rule="2:6", trials=5, seed=3, mode="mc", samples=200)
    assert run_batch(cfg).csv == run_batch(cfg).csv


def test_csv_schema():
    res = run_batch(BatchConfig(n_list=[3], trials=4, seed=1))
    rows = list(csv.DictReader(io.StringIO(res.csv)))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert [int(r["instance_id"]) for r in rows] == [1, 2, 3, 4]
    for r in rows:
        assert r["agree"] in ("true", "false")
        assert float(r["z_solver"]) <= float(r["z_oracle"]) + 1e-7
        assert r["wall_solver_ms"] == ""  # timing off keeps the CSV reproducible


def test_csv_float_precision():
    rep = ComparisonReport(1, 2, 3, 4, Status.OPTIMAL, Status.OPTIMAL, 0.1, 0.1, 0.0, True)
    line = render_csv([rep]).splitlines()[1]
    assert "0.10000000000000001" in line


def test_disagreement_forces_exit_code():
    # search a small family for a counterexample to the flattest-plane rule
    res = run_batch(BatchConfig(n_list=[3], m_rule="3n", trials=20, seed=7, mode="exact"))
    bad = [r for r in res.reports if not r.agree]
    assert bad, "expected at least one n=3 disagreement in this family"
    assert res.exit_code == 2
    assert set(res.counterexamples) == {r.instance_id for r in bad}
    rows = list(csv.DictReader(io.StringIO(res.csv)))
    assert {int(r["instance_id"]) for r in rows if r["agree"] == "false"} == set(res.counterexamples)
