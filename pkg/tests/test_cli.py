"""Command line: payloads, determinism and exit codes (run as subprocesses)."""

import json

import pytest

from rankedtrees import cli


def test_count_totals(run_cli):
    assert run_cli("count", "--model", "strong", "--n", 7).stdout == "2520\n"
    assert run_cli("count", "--model", "weak", "--n", 6).stdout == "541\n"
    big = run_cli("count", "--model", "weak", "--n", 60).stdout.strip()
    assert big.isdigit() and len(big) > 70


def test_count_row_csv_and_json(run_cli):
    res = run_cli("count", "--model", "strong", "--n", 5, "--param", "internal-nodes")
    assert res.returncode == 0
    assert res.stdout == "5,0,0\n5,1,1\n5,2,9\n5,3,26\n5,4,24\n"
    doc = json.loads(run_cli("count", "--model", "weak", "--n", 7, "--param", "steps",
                             "--format", "json").stdout)
    assert doc["coeffs"] == ["0", "1", "62", "540", "1560", "1800", "720"]


def test_count_unknown_param_is_usage_error(run_cli):
    res = run_cli("count", "--model", "weak", "--n", 5, "--param", "root-arity")
    assert res.returncode == 2
    assert res.stdout == ""
    assert "not available" in res.stderr
    assert run_cli("count", "--model", "weak", "--n", 5, "--param", "height").returncode == 2
    assert run_cli("count", "--model", "weak", "--n", 0).returncode == 2


def test_sample_examples(run_cli):
    assert run_cli("sample", "--model", "strong", "--n", 2, "--count", 1, "--seed", 0).stdout == "(x,x)1;\n"
    a = run_cli("sample", "--model", "weak", "--n", 5, "--count", 3, "--seed", 42)
    b = run_cli("sample", "--model", "weak", "--n", 5, "--count", 3, "--seed", 42)
    assert a.returncode == 0 and a.stdout == b.stdout
    assert len(a.stdout.splitlines()) == 3


def test_sampled_trees_validate(run_cli):
    for model in ("strong", "weak"):
        out = run_cli("sample", "--model", model, "--n", 40, "--count", 20, "--seed", 3).stdout
        res = run_cli("validate", "--model", model, "--input", "-", stdin=out)
        assert res.returncode == 0
        assert res.stdout == "valid\n" * 20


def test_sample_json_and_verbose(run_cli):
    res = run_cli("sample", "--model", "strong", "--n", 6, "--count", 2, "--format", "json", "--verbose")
    docs = json.loads(res.stdout)
    assert len(docs) == 2 and all("root" in d for d in docs)
    assert "random bits used" in res.stderr


def test_unrank_and_rank(run_cli):
    assert run_cli("unrank", "--n", 1, "--rank", 0).stdout == "x;\n"
    tree = run_cli("unrank", "--n", 6, "--rank", 123).stdout.strip()
    assert run_cli("rank", "--tree", tree).stdout == "123\n"
    big = "98765432109876543210987654321"
    tree = run_cli("unrank", "--n", 40, "--rank", big).stdout.strip()
    assert run_cli("rank", "--tree", tree).stdout.strip() == big


def test_unrank_out_of_range(run_cli):
    res = run_cli("unrank", "--n", 6, "--rank", 541)
    assert res.returncode == 3
    assert "541" in res.stderr and res.stdout == ""
    assert run_cli("unrank", "--n", 6, "--rank", -1).returncode == 3
    assert run_cli("unrank", "--n", 6, "--rank", "1e3").returncode == 2


def test_rank_rejects_invalid_tree(run_cli):
    res = run_cli("rank", "--tree", "((x,x)3,x)1;")
    assert res.returncode == 5
    assert "label-gap" in res.stderr


def test_bij_examples(run_cli):
    assert run_cli("bij", "perm-to-tree", "--perm", "1,2").stdout == "(x,x)1;\n"
    assert run_cli("bij", "partition-to-tree", "--partition", "1,2").stdout == "(x,x,x)1;\n"
    res = run_cli("bij", "perm-to-tree", "--perm", "2,1")
    assert res.returncode == 4
    assert "1 before 2" in res.stderr


def test_bij_inverse_directions(run_cli):
    out = run_cli("bij", "tree-to-perm", "--tree", "((x,x)2,x,(x,x,(x,x)4,x)3)1;").stdout
    assert out == "4,1,2,5,3,8,6,7\n"
    out = run_cli("bij", "tree-to-partition", "--tree", "((x,(x,x)3)2,x,(x,(x,x)3,x)2)1;").stdout
    assert out == "3,4|1,5,7|2,6\n"
    assert run_cli("bij", "tree-to-perm", "--tree", "((x,x)2,(x,x)2)1;").returncode == 4
    assert run_cli("bij", "perm-to-tree").returncode == 2


def test_enumerate(run_cli):
    res = run_cli("enumerate", "--model", "strong", "--n", 3)
    assert sorted(res.stdout.split()) == ["((x,x)2,x)1;", "(x,(x,x)2)1;", "(x,x,x)1;"]
    assert len(run_cli("enumerate", "--model", "weak", "--n", 5).stdout.splitlines()) == 75
    res = run_cli("enumerate", "--model", "weak", "--n", 8)
    assert res.returncode == 6
    assert "bound" in res.stderr


def test_validate_reports_on_stderr(run_cli):
    res = run_cli("validate", "--model", "strong", "--input", "-",
                  stdin="((x,x)2,x)1;\n((x,x)2,(x,x)2)1;\n")
    assert res.returncode == 5
    assert res.stdout == "valid\ninvalid (2 violations)\n"
    assert "duplicate-label" in res.stderr and "label-set" in res.stderr
    res = run_cli("validate", "--model", "weak", "--tree", "((x,x)3,x)1;")
    assert res.stdout == "invalid (1 violation)\n"


def test_malformed_input_is_usage_error(run_cli):
    res = run_cli("validate", "--model", "weak", "--tree", "(x,x")
    assert res.returncode == 2
    assert "position" in res.stderr
    res = run_cli("validate", "--model", "weak", "--tree", '{"root": 3}')
    assert res.returncode == 2
    assert "$.root" in res.stderr
    assert run_cli("validate", "--model", "weak", "--input", "/nonexistent/file").returncode == 2


def test_stats_report(run_cli):
    res = run_cli("stats", "--model", "strong", "--n", 300, "--param", "binary-nodes",
                  "--samples", 3000, "--seed", 2)
    doc = json.loads(res.stdout)
    assert doc["samples"] == 3000
    assert "/" in doc["theory"]["exact_mean"]
    again = run_cli("stats", "--model", "strong", "--n", 300, "--param", "binary-nodes",
                    "--samples", 3000, "--seed", 2, "--workers", 2)
    assert again.stdout == res.stdout
    csv = run_cli("stats", "--model", "strong", "--n", 30, "--param", "root-arity",
                  "--samples", 100, "--format", "csv").stdout
    assert csv.startswith("value,count\n")
    assert run_cli("stats", "--model", "weak", "--n", 30, "--param", "root-arity").returncode == 2


def test_stats_normality_skips_small_cohorts(run_cli):
    res = run_cli("stats", "--model", "strong", "--n", 600, "--param", "internal-nodes",
                  "--samples", 500, "--normality")
    assert res.returncode == 0
    assert "normality" not in json.loads(res.stdout)
    assert "skipped" in res.stderr


def test_output_flag(run_cli, tmp_path):
    path = tmp_path / "out.txt"
    res = run_cli("--output", path, "count", "--model", "strong", "--n", 4)
    assert res.stdout == "" and path.read_text() == "12\n"


def test_in_process_main(capsys):
    assert cli.main(["count", "--model", "strong", "--n", "3"]) == 0
    assert capsys.readouterr().out == "3\n"
    with pytest.raises(SystemExit) as err:
        cli.main(["count", "--model", "medium", "--n", "3"])
    assert err.value.code == 2
