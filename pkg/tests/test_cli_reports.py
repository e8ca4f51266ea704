import json

import numpy as np
import pytest

from preqind import cli_reports as cli
from preqind.report import check, parallel_map


def test_list_suites_is_stable_and_complete():
    text = cli.list_suites()
    assert text == cli.list_suites()
    lines = text.splitlines()
    assert len(lines) == 8
    assert "stages" in text
    assert [ln.split()[0] for ln in lines] == list(cli.REGISTRY)


def test_list_flag(capsys):
    assert cli.main(["--list"]) == 0
    assert "frobenius-prequantum" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [["--suite", "unknown"], [], ["--suite", "cardinal", "--format", "xml"]])
def test_usage_errors_exit_2(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("flag,value", [("--samples", "0"), ("--tol", "-1"), ("--fd-step", "0"), ("--seed", "-3")])
def test_invalid_config_exits_2(flag, value, capsys):
    assert cli.main(["--suite", "cardinal", flag, value]) == 2
    assert "error" in capsys.readouterr().err


def test_run_suite_rejects_unknown():
    with pytest.raises(cli.UnknownSuite):
        cli.run_suite(cli.SuiteConfig("nope"))


def test_failing_check_exits_1_and_still_reports(monkeypatch, capsys):
    reg = dict(cli.REGISTRY)
    reg["cardinal"] = (lambda cfg: [check("always fails", False, 1.0, "< 0", 1.0)], "stub")
    monkeypatch.setattr(cli, "REGISTRY", reg)
    assert cli.main(["--suite", "cardinal"]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["checks"][0]["status"] == "fail"


def test_json_schema_and_exit_0(capsys):
    assert cli.main(["--suite", "contact-reeb", "--samples", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"suite", "config", "checks", "wall_time_ms"}
    assert report["config"] == {"suite": "contact-reeb", "seed": 42, "samples": 3, "tol": 1e-6, "fd_step": 1e-5,
                                "n_max": 8}
    for c in report["checks"]:
        assert set(c) == {"name", "status", "residual_max", "expected", "observed"}
        assert c["status"] in ("pass", "fail", "skip")
    names = [c["name"] for c in report["checks"]]
    assert len(names) == len(set(names))


def test_text_format(capsys):
    assert cli.main(["--suite", "contact-reeb", "--samples", "2", "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("suite contact-reeb: PASS")


@pytest.mark.parametrize("x", [0.1, 1 / 3, 1e-300, -2.5e17, 123456789.123456789, 5e-324])
def test_floats_round_trip_with_17_digits(x):
    s = cli.dumps(x)
    assert float(json.loads(s)) == x
    assert json.loads(cli.dumps({"v": np.float64(x)}))["v"] == x


def test_nonfinite_and_numpy_values():
    assert cli.dumps(float("nan")) == '"nan"'
    assert cli.dumps(float("inf")) == '"inf"'
    assert cli.dumps(np.array([1, 2])) == "[1, 2]"
    assert cli.dumps(np.bool_(True)) == "true"
    assert cli.dumps(None) == "null"
    assert cli.dumps(1.0) == "1.0"


def test_wall_time_only_with_timing():
    cfg = cli.SuiteConfig("contact-reeb", samples=2)
    assert cli.run_suite(cfg).wall_time_ms == 0.0
    timed = cli.run_suite(cli.SuiteConfig("contact-reeb", samples=2, timing=True))
    assert timed.wall_time_ms > 0.0


def test_report_independent_of_thread_count(monkeypatch):
    cfg = cli.SuiteConfig("contact-reeb", samples=6)
    monkeypatch.setenv("THREADS", "1")
    one = cli.run_suite(cfg).to_json()
    monkeypatch.setenv("THREADS", "3")
    three = cli.run_suite(cfg).to_json()
    assert one == three


def test_parallel_map_preserves_order(monkeypatch):
    monkeypatch.setenv("THREADS", "4")
    assert parallel_map(lambda i: i * i, range(50)) == [i * i for i in range(50)]
