import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from pvpatch.cli import main

INPUTS = Path(__file__).resolve().parents[1] / "scripts" / "inputs"


def invoke(*args):
    res = CliRunner().invoke(main, [str(a) for a in args])
    return res, (json.loads(res.output) if res.output.lstrip().startswith("{") else None)


def test_factorize_identity():
    res, rep = invoke("factorize", INPUTS / "identity_matrix.json")
    assert res.exit_code == 0, res.output
    assert rep["schema"] == "pvpatch/1" and rep["status"] == "pass"
    assert rep["certificates"]["Lambda"] == [0, 0]


def test_factorize_F_matrix_has_trivial_A2():
    res, rep = invoke("factorize", INPUTS / "f_matrix.json")
    assert res.exit_code == 0, res.output
    A2 = rep["certificates"]["A2"]
    assert A2[0][1]["rows"] == [] and A2[1][0]["rows"] == []
    assert A2[0][0]["rows"] == [{"t_exp": 0, "x_lo": 0, "coeffs": ["1"]}]


def test_factorize_random_is_seeded():
    a, ra = invoke("--seed", 7, "factorize", "--random", 2)
    b, rb = invoke("--seed", 7, "factorize", "--random", 2)
    c, rc = invoke("--seed", 8, "factorize", "--random", 2)
    assert a.exit_code == 0 and a.output == b.output
    assert ra["certificates"]["A1"] != rc["certificates"]["A1"]


def test_factorize_without_input_is_input_error():
    res, rep = invoke("factorize")
    assert res.exit_code == 2 and rep["status"] == "error"


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    res, rep = invoke("patch", p)
    assert res.exit_code == 2
    assert rep["error"]["type"] == "SchemaError"


def test_wrong_schema_tag(tmp_path):
    p = tmp_path / "old.json"
    p.write_text(json.dumps({"schema": "pvpatch/0", "kind": "patching-problem", "preset": "sl2"}))
    res, _ = invoke("patch", p)
    assert res.exit_code == 2


def test_missing_file():
    res, rep = invoke("patch", "/nonexistent/problem.json")
    assert res.exit_code == 2 and "cannot read" in rep["error"]["message"]


def test_patch_sl2_passes():
    res, rep = invoke("patch", INPUTS / "sl2_problem.json")
    assert res.exit_code == 0, res.output
    assert rep["certificates"]["trace_zero"] is True
    assert all(c["verdict"] == "pass" for c in rep["checks"])


def test_verify_rejects_zero_A():
    res, rep = invoke("verify", INPUTS / "verify_zero_A.json")
    assert res.exit_code == 1
    assert rep["status"] == "fail"


def test_non_split_ebp_is_input_error():
    res, rep = invoke("solve-ebp", INPUTS / "non_split.json")
    assert res.exit_code == 2 and rep["error"]["type"] == "NonSplitEBP"


def test_solve_borel_ebp():
    res, rep = invoke("solve-ebp", INPUTS / "borel_ebp.json")
    assert res.exit_code == 0, res.output


@pytest.mark.parametrize("name,code", [("quotient_borel.json", 0), ("quotient_non_normal.json", 2),
                                       ("induce_torus.json", 0), ("sl2_invariants.json", 0),
                                       ("ind_identities.json", 0)])
def test_invariants_verbs(name, code):
    res, _ = invoke("invariants", INPUTS / name)
    assert res.exit_code == code, res.output


def test_sl2_invariants_are_constants():
    _, rep = invoke("invariants", INPUTS / "sl2_invariants.json")
    assert rep["certificates"]["only_constants"] is True


def test_demo_exit_codes():
    assert invoke("demo", "sl2")[0].exit_code == 0
    assert invoke("demo", "sl2-literal")[0].exit_code == 1


def test_reports_are_deterministic():
    a, _ = invoke("demo", "borel-ebp")
    b, _ = invoke("demo", "borel-ebp")
    assert a.exit_code == 0 and a.output == b.output


def test_text_format():
    res = CliRunner().invoke(main, ["--text", "demo", "sl2"])
    assert res.exit_code == 0
    assert res.output.startswith("pvpatch demo sl2")
    assert "[PASS]" in res.output and res.output.rstrip().endswith("status: pass (exit 0)")


def test_degree_cap_zero_records_vacuous_bounds():
    res, rep = invoke("--degree-cap", 0, "suite", "--only", 5)
    crit = rep["certificates"]["criteria"][0]
    assert rep["config"]["degree_cap"] == 0
    assert crit["bounds"]["deg"] == 0 and crit["bounds"]["vacuous_above"] == 0


def test_suite_only_subset():
    res, rep = invoke("suite", "--only", 6, "--only", 11)
    assert res.exit_code == 0, res.output
    assert [c["criterion"] for c in rep["certificates"]["criteria"]] == [6, 11]


@pytest.mark.parametrize("args", [("--seed", "abc", "demo", "sl2"), ("--bounds", "1,2", "demo", "sl2"),
                                  ("--x-window", "3", "demo", "sl2"), ("demo", "nope")])
def test_usage_errors(args):
    res = CliRunner().invoke(main, list(args))
    assert res.exit_code == 2


def test_invalid_config_is_input_error():
    res, rep = invoke("--t-prec", 0, "demo", "sl2")
    assert res.exit_code == 2 and rep["config"] is None
