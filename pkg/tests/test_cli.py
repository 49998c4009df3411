from __future__ import annotations

import json
import subprocess
import sys

import pytest
from click.testing import CliRunner

from catalan_frobenius.cli import main, run


def invoke(*args: str, **kw):
    return CliRunner().invoke(main, list(args), catch_exceptions=False, **kw)


def test_catalan_count():
    res = invoke("catalan", "--genus", "0", "--profile", "6")
    assert res.exit_code == 0
    assert res.output.strip() == "5"


@pytest.mark.parametrize("args", [
    ["catalan", "--genus", "0", "--profile", "0,2"],
    ["frobenius", "--point", "1,-4"],
    ["frobenius", "--point", "2,1"],
    ["periods", "--level", "0", "--rep", "u1", "--label", "1,0", "--order", "-3"],
])
def test_domain_errors_exit_2(args):
    assert invoke(*args).exit_code == 2


def test_usage_error_exit_code():
    assert invoke("catalan", "--genus", "0").exit_code == 2


def test_s_matrix_symbolic_output():
    data = json.loads(invoke("s-matrix", "--order", "2", "--psi", "symbolic").output)
    assert data["data"]["S"][1] == [["0", "psi"], ["1", "0"]]


def test_deterministic_reports(tmp_path):
    a = invoke("--seed", "7", "descendent", "--genus-max", "1", "--n-max", "2", "--index-max", "1").output
    b = invoke("--seed", "7", "descendent", "--genus-max", "1", "--n-max", "2", "--index-max", "1").output
    assert a == b
    assert json.loads(a)["config"]["seed"] == 7


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"descendent": {"genus_max": 0, "n_max": 2, "index_max": 1, "fmt": "csv"}}))
    res = invoke("--config", str(cfg), "descendent")
    assert res.exit_code == 0
    assert res.output.splitlines()[0].count(",") >= 2


def test_output_file(tmp_path):
    out = tmp_path / "r.json"
    assert invoke("-o", str(out), "r-matrix", "--order", "3").exit_code == 0
    assert json.loads(out.read_text())["command"] == "r-matrix"


def test_cache_env(tmp_path):
    env = {"CATALAN_FROBENIUS_CACHE": str(tmp_path)}
    first = invoke("verify-theorem", "--genus-max", "1", "--n-max", "2", "--k-max", "3", "--chi-max", "2", env=env)
    second = invoke("verify-theorem", "--genus-max", "1", "--n-max", "2", "--k-max", "3", "--chi-max", "2", env=env)
    assert first.exit_code == second.exit_code == 0
    assert first.output == second.output
    assert any(tmp_path.iterdir())


def test_verify_lax_and_nls_small():
    common = ["--degree-max", "1", "--eps-window", "-2,1", "--depth", "3", "--psi", "0"]
    assert invoke("verify-lax", "--flows", "1:0,2:0", *common).exit_code == 0
    assert invoke("verify-nls", "--flows", "1:0", *common).exit_code == 0


def test_verify_hirota_small():
    res = invoke("verify-hirota", "--n-max", "1", "--k", "0", "--degree-max", "1", "--eps-window", "-2,1")
    assert res.exit_code == 0, res.output


def test_periods_report_names_residue_convention():
    data = json.loads(invoke("periods", "--level", "1", "--order", "4").output)
    assert "residue_convention" in data


def test_run_returns_code():
    assert run(["catalan", "--genus", "1", "--profile", "4"]) == 0
    assert run(["catalan", "--genus", "1", "--profile", "x"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "catalan_frobenius", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "catalan-frobenius" in proc.stdout
