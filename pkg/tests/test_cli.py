import json

import pytest

from flatlp.cli import main

SQUARE = "2 4\n0.70710678118654757 0.70710678118654757\n1 0 1\n0 1 1\n-1 0 0\n0 -1 0\npoint 0.5 0.5\n"
HALF_PLANE = "2 1\n0 1\n0 -1 0\n"


@pytest.fixture
def square_file(tmp_path):
    path = tmp_path / "square.flatlp"
    path.write_text(SQUARE)
    return str(path)


def test_solve_json(square_file, capsys):
    assert main(["solve", "--input", square_file, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "optimal"
    assert doc["x"] == [1, 1]


@pytest.mark.parametrize("mode", ["mc", "exact"])
def test_solve_modes(square_file, capsys, mode):
    assert main(["solve", "--input", square_file, "--redundancy", mode, "--samples", "200", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "optimal"


def test_solve_text(square_file, capsys):
    assert main(["solve", "--input", square_file]) == 0
    out = capsys.readouterr().out
    assert out.startswith("status: optimal")
    assert "stage 1: plane 1 eliminates x1" in out


def test_expect_optimal(tmp_path, capsys):
    path = tmp_path / "half.flatlp"
    path.write_text(HALF_PLANE)
    assert main(["solve", "--input", str(path)]) == 0
    assert main(["solve", "--input", str(path), "--expect-optimal"]) == 3


def test_oracle_and_compare(square_file, capsys):
    assert main(["oracle", "--input", square_file]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["active_set"] == [1, 2]
    assert main(["compare", "--input", square_file]) == 0
    assert json.loads(capsys.readouterr().out)["agree"] is True


def test_gen_then_solve(tmp_path, capsys):
    out = tmp_path / "g.flatlp"
    assert main(["gen", "--n", "3", "--m", "5", "--seed", "4", "--out", str(out)]) == 0
    assert main(["solve", "--input", str(out), "--json", "--redundancy", "mc", "--samples", "300"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] in ("optimal", "stalled")


def test_bench_outputs(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code = main(["bench", "--n-list", "2", "--trials", "4", "--seed", "1", "--out", str(out)])
    assert code == 0
    assert out.read_text().startswith("instance_id,n,m,seed")
    assert (tmp_path / "b_summary.txt").read_text().startswith("# summary")


def test_bench_disagreement_exit_code(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code = main(["bench", "--n-list", "3", "--trials", "20", "--seed", "7", "--out", str(out)])
    assert code == 2
    assert list((tmp_path / "b_counterexamples").glob("*.flatlp"))


def test_usage_errors(square_file, capsys):
    assert main(["solve", "--input", square_file, "--bogus"]) == 1
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and "error" in err
    assert main([]) == 1


def test_parse_error_exit(tmp_path, capsys):
    path = tmp_path / "bad.flatlp"
    path.write_text("2 3\n1 1\n1 0 1\n")
    assert main(["solve", "--input", str(path)]) == 1
    err = capsys.readouterr().err
    assert "line 4" in err and err.count("\n") == 1


def test_missing_file(capsys):
    assert main(["solve", "--input", "/nonexistent/x.flatlp"]) == 1


def test_bench_creates_output_directory(tmp_path, capsys):
    out = tmp_path / "runs" / "nested" / "b.csv"
    assert main(["bench", "--n-list", "2", "--trials", "2", "--seed", "1", "--out", str(out)]) == 0
    assert out.exists() and (out.parent / "b_summary.txt").exists()
