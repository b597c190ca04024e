import json

from finitude import arith
from finitude.cli import CommandConfig, build_parser, execute_payload, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_decide_adjacent_primes(capsys):
    code, out, _ = run_cli(
        capsys,
        "decide", "--predicate", "primes",
        "--formula", "P(x) & P(x+1)", "--output", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "Finite"
    assert payload["solutions"] == [-3, 2]
    assert payload["witness_k"] == 2
    assert payload["branches"] == 1
    assert payload["chi"] == [False]


def test_normalize_command(capsys):
    code, out, _ = run_cli(capsys, "normalize", "--formula", "P_2(x)", "--output", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["branch_count"] == 2
    assert [b["subst"] for b in payload["branches"]] == ["4x", "4x+2"]
    assert [b["psi"] for b in payload["branches"]] == ["P(2x)", "P(2x+1)"]


def test_decide_inconsistent_exits_zero(capsys):
    code, out, _ = run_cli(capsys, "decide", "--formula", "P(x) & !P(x)")
    assert code == 0
    assert "Inconsistent" in out


def test_parse_error_exits_one(capsys):
    code, _, err = run_cli(capsys, "decide", "--formula", "P(x &")
    assert code == 1
    assert "parse error" in err


def test_usage_error_exits_one(capsys):
    code, _, err = run_cli(capsys, "decide")
    assert code == 1


def test_mixed_formula_redirected(capsys):
    code, _, err = run_cli(capsys, "decide", "--formula", "Pr(x) & SF(x)")
    assert code == 1
    assert "mixed" in err


def test_branch_cap_exits_three(capsys):
    code, _, err = run_cli(
        capsys,
        "normalize", "--formula", "!P_100(x) & !P_99(x) & !P_98(x)",
        "--branch-cap", "100",
    )
    assert code == 3
    assert "resource cap" in err


def test_memory_cap_exits_three(capsys):
    code, _, err = run_cli(
        capsys,
        "verify", "--formula", "P(x)", "--bounds", "1000",
        "--max-sieve", "100",
    )
    assert code == 3


def test_chi_command(capsys):
    code, out, _ = run_cli(
        capsys,
        "chi", "--predicate", "squarefree", "--formula", "P(4x)", "--output", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["boundary"] == [4, 9, 25]
    assert payload["chi"] is False
    assert payload["witness_k"] == 4


def test_verify_command_json_stable(capsys):
    args = [
        "verify", "--predicate", "primes", "--formula", "P(x) & P(x+2)",
        "--bounds", "100", "1000", "--output", "json",
    ]
    code1, out1, _ = run_cli(capsys, *args, "--workers", "1")
    code2, out2, _ = run_cli(capsys, *args, "--workers", "4")
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["status"] == "confirmed"
    assert "elapsed_ms" not in payload


def test_verify_timings_flag(capsys):
    code, out, _ = run_cli(
        capsys,
        "verify", "--formula", "P(x)", "--bounds", "100",
        "--output", "json", "--timings",
    )
    assert code == 0
    assert "elapsed_ms" in json.loads(out)


def test_axioms_command(capsys):
    code, out, _ = run_cli(
        capsys,
        "axioms", "--predicate", "squarefree", "--samples", "20",
        "--bounds", "10000", "--output", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["status"] == "pass"
    assert payload["failures"] == []


def test_mixed_command(capsys):
    code, out, _ = run_cli(
        capsys,
        "mixed", "--formula", "Pr(x) & !SF(x)", "--bounds", "100",
        "--output", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["counts"] == [[100, 0]]


def test_report_dir_writes_csv_and_figure(tmp_path, capsys):
    code, _, _ = run_cli(
        capsys,
        "verify", "--predicate", "primes", "--formula", "P(x) & P(x+2)",
        "--bounds", "100", "1000", "--report-dir", str(tmp_path),
    )
    assert code == 0
    csv_path = tmp_path / "verify_counts.csv"
    png_path = tmp_path / "verify_growth.png"
    assert csv_path.exists() and png_path.exists()
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "bound,count"
    assert len(lines) == 3
    assert png_path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_report_dir_axioms(tmp_path, capsys):
    code, _, _ = run_cli(
        capsys,
        "axioms", "--samples", "10", "--bounds", "1000",
        "--report-dir", str(tmp_path),
    )
    assert code == 0
    assert (tmp_path / "axioms_summary.csv").exists()
    assert (tmp_path / "axioms_summary.png").exists()


def test_execute_payload_reusable():
    payload, code = execute_payload(
        CommandConfig(command="decide", formula="P(x)", predicate="primes")
    )
    assert code == 0
    assert payload["verdict"] == "Infinite"
    assert payload["conditionality"] == "dickson-conditional"


def test_selftest_subset(capsys):
    code, out, _ = run_cli(
        capsys, "selftest", "--quick", "--criteria", "5", "6", "--workers", "2"
    )
    assert code == 0
    assert "PASS criterion 5" in out
    assert "PASS criterion 6" in out


def test_selftest_detects_sabotaged_crt(capsys, monkeypatch):
    from finitude.arith import CongruenceClass

    # pretend every congruence system is all of Z
    monkeypatch.setattr(arith, "crt", lambda classes: CongruenceClass(1, 0))
    code, out, _ = run_cli(capsys, "selftest", "--quick", "--criteria", "6")
    assert code == 2
    assert "FAIL criterion 6" in out


def test_parser_defaults():
    parser = build_parser()
    args = parser.parse_args(["decide", "--formula", "P(x)"])
    assert args.predicate == "squarefree"
    assert args.seed == 0
    assert args.density == 0.5
    args = parser.parse_args(["verify", "--formula", "P(x)"])
    assert args.bounds == [100_000]
    assert args.output == "text"
