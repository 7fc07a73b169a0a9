import json
from pathlib import Path

import pytest

from qtwistor import cli
from qtwistor.suites import Sample, Task, run_task

GOLDEN = Path(__file__).parent / "golden"
FIELDS = {"check_id", "paper_ref", "status", "residual_term_count", "elapsed", "notes"}


def verify(tmp_path, *args):
    code = cli.main(["verify", *args, "--out", str(tmp_path)])
    reports = json.loads((tmp_path / "report.json").read_text()) if (tmp_path / "report.json").exists() else None
    return code, reports


def test_rmatrix_suite_passes(tmp_path, capsys):
    code, reports = verify(tmp_path, "--suite", "rmatrix")
    assert code == 0
    assert all(set(r) == FIELDS for r in reports)
    assert all(r["status"] in ("pass", "reported") for r in reports)
    assert all((r["status"] == "pass") == (r["residual_term_count"] == 0) for r in reports if r["status"] != "reported")
    assert "status" in (tmp_path / "report.txt").read_text()
    assert "started" in json.loads((tmp_path / "timing.json").read_text())


def test_failure_visible_in_json_and_exit_code(tmp_path, capsys):
    code, reports = verify(tmp_path, "--suite", "reality")
    failing = [r["check_id"] for r in reports if r["status"] == "fail"]
    assert code == 1
    assert failing == ["eq2.31/residual"]


def test_reports_are_byte_stable(tmp_path, capsys):
    verify(tmp_path / "a", "--suite", "rmatrix,reality")
    verify(tmp_path / "b", "--suite", "rmatrix,reality")
    a = (tmp_path / "a" / "report.stable.json").read_bytes()
    assert a == (tmp_path / "b" / "report.stable.json").read_bytes()


def test_parallel_run_keeps_order(tmp_path, capsys):
    verify(tmp_path / "a", "--suite", "rmatrix")
    verify(tmp_path / "b", "--suite", "rmatrix", "--workers", "2")
    assert (tmp_path / "a" / "report.stable.json").read_bytes() == (tmp_path / "b" / "report.stable.json").read_bytes()


def test_both_mode_adds_agreement_checks(tmp_path, capsys):
    code, reports = verify(tmp_path, "--suite", "rmatrix", "--mode", "both", "--s", "3/2")
    ids = [r["check_id"] for r in reports]
    assert "eq2.1/ybe-N2@s=3/2" in ids
    assert "modes/eq2.1/ybe-N2" in ids
    assert code == 0


@pytest.mark.parametrize("args", [
    ["--suite", "thooft", "--degree-cap", "3"],
    ["--suite", "nope"],
    ["--suite", "rmatrix", "--mode", "numeric"],
    ["--suite", "rmatrix", "--mode", "numeric", "--s", "abc"],
    ["--suite", "rmatrix", "--mode", "numeric", "--s", "3/2", "--r", "1,1=2"],
    ["--suite", "rmatrix", "--mode", "numeric", "--s", "3/2", "--r", "1,2=0"],
    ["--suite", "thooft", "--P", "2"],
    ["--suite", "rmatrix", "--N", "0"],
])
def test_config_errors_exit_2(tmp_path, args, capsys):
    assert cli.main(["verify", *args]) == 2
    assert "config error" in capsys.readouterr().err


def test_config_file_and_flag_override(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"suites": ["rmatrix"], "mode": "numeric", "s": ["3/2"], "degree_cap": 8}))
    args = cli._parser().parse_args(["verify", "--config", str(cfg_path), "--degree-cap", "9", "--r", "2,1=3"])
    cfg = cli.build_config(args)
    assert cfg.degree_cap == 9
    assert cfg.mode == "numeric"
    assert cfg.samples[0].r == (((1, 2), 1 / cli._fraction(3)),)


def test_config_file_rejects_unknown_keys(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"suite": "rmatrix"}))
    with pytest.raises(cli.ConfigInvalid):
        cli.build_config(cli._parser().parse_args(["verify", "--config", str(cfg_path)]))


def test_engine_errors_are_captured_per_check():
    res = run_task(Task("thooft", "self-dual", Sample(), degree_cap=3))
    (check,) = res.checks
    assert check.status == "fail"
    assert "DegreeCapExceeded" in check.notes


def test_dump_unknown_name(tmp_path, capsys):
    assert cli.main(["dump", "--name", "nope", "--out", str(tmp_path)]) == 2
    with pytest.raises(cli.UnknownName):
        cli.dump("nope", tmp_path)


@pytest.mark.parametrize("name", cli.DUMP_NAMES)
def test_dumps_match_golden(tmp_path, name, capsys):
    assert cli.main(["dump", "--name", name, "--out", str(tmp_path)]) == 0
    for suffix in (".tensor", ".json"):
        assert (tmp_path / (name + suffix)).read_bytes() == (GOLDEN / (name + suffix)).read_bytes()


@pytest.mark.parametrize("name,nnz", [("glq4_rmatrix", 22), ("epsilon_q", 24)])
def test_dump_counts(tmp_path, name, nnz):
    _, manifest = cli.dump(name, tmp_path)
    assert json.loads(manifest.read_text())["nnz"] == nnz
