import json
import subprocess
import sys

import pytest

from hyperell import cli
from hyperell.qpoly import parse_qrat


@pytest.fixture
def warm_cache(engine):
    # reuse the session engine's genus-1 table so the CLI does not rebuild it
    engine.genus1_table
    engine.save()
    return str(engine.cache_dir)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_decompose_plain(capsys):
    code, out, _ = run(capsys, "decompose", "a2^2", "--cache", "none")
    assert code == 0
    assert out.strip() == "a2^2 = (2^1,2^1) + 2*(2^1,1^2) + 2*(2^2) + (1^2,1^2) + (1^2)"


def test_decompose_bc_json(capsys):
    code, out, _ = run(capsys, "decompose", "b1^2 c2", "--format", "json", "--cache", "none")
    assert code == 0
    rec = json.loads(out)
    assert rec["expr"] == "b1^2 c2"
    assert ["(2^2,1^2)", 1, 4] in rec["terms"]


def test_count_genus_range_json(capsys):
    code, out, _ = run(capsys, "count", "a0", "--genus", "1..3", "--format", "json", "--q", "3", "--cache", "none")
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert [r["genus"] for r in recs] == [1, 2, 3]
    assert recs[2]["poly"] == [[5, 1, 1]]
    assert recs[2]["at"] == {"3": "243"}
    assert parse_qrat(recs[1]["value"]) == parse_qrat("q^3")


def test_count_tuple_both_parities(capsys):
    code, out, _ = run(capsys, "count", "(1^2,1^2,1^2)", "--genus", "0", "--char", "both", "--cache", "none")
    assert code == 0
    assert "[odd]" in out and "[even]" in out


def test_json_output_is_deterministic(capsys):
    argv = ["count", "a1^2 a2", "--genus", "1..4", "--format", "json", "--cache", "none"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_closed_form(capsys):
    code, out, _ = run(capsys, "count", "(6^1)", "--closed", "--format", "json", "--cache", "none")
    assert code == 0
    rec = json.loads(out)
    assert rec["period"] == 6 and rec["g_min"] == -1


def test_latex_output(capsys):
    code, out, _ = run(capsys, "count", "a2", "--genus", "2", "--format", "latex", "--cache", "none")
    assert code == 0 and "\\mathrm{odd}" in out


def test_fix_with_schur(capsys, warm_cache):
    code, out, _ = run(capsys, "fix", "--n", "3", "--genus", "2", "--schur", "--format", "json", "--cache", warm_cache)
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert {r["kind"] for r in recs} == {"fixed", "schur"}
    assert len(recs) == 6


def test_fix_rejects_low_genus(capsys):
    code, _, err = run(capsys, "fix", "--n", "2", "--genus", "1", "--cache", "none")
    assert code == cli.EXIT_USAGE and "genus" in err


def test_bc_command(capsys):
    code, out, _ = run(capsys, "bc", "b1^2", "--genus", "2", "--cache", "none")
    assert code == 0 and "b1^2 g=2" in out


def test_weight_limit_is_unsupported(capsys):
    code, _, err = run(capsys, "count", "a8", "--genus", "2", "--cache", "none")
    assert code == cli.EXIT_UNSUPPORTED
    assert "unsupported" in err


@pytest.mark.parametrize("argv", [["count", "a1^^2"], ["count", "a0", "--genus", "x"], ["count", "a0", "--genus", "3..1"],
                                  ["nosuch"], ["count", "a0", "--jobs", "0"]])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv, "--cache", "none")
    assert code == cli.EXIT_USAGE


def test_budget_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "oracle-odd", "--budget-curves", "10", "--cache", "none")
    assert code == cli.EXIT_BUDGET
    assert "BudgetExceeded" in out


def test_verify_suite(capsys, warm_cache):
    code, out, _ = run(capsys, "verify", "appendix", "--cache", warm_cache)
    assert code == 0
    assert out.count("PASS") >= 1 and "FAIL" not in out


def test_cache_written(tmp_path, capsys):
    run(capsys, "count", "(1^2)", "--genus", "4", "--cache", str(tmp_path))
    assert (tmp_path / "u_values.jsonl").exists()


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "hyperell.cli", "decompose", "a1^2", "--cache", "none"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("a1^2 = ")
