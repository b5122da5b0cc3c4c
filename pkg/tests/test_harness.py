import math
import subprocess
import sys

import pytest

from nevkit import cli, harness
from nevkit.harness import ConfigError, Row, SuiteResult, load_config, make_config, read_csv


def run_cli(tmp_path, *args):
    return cli.main(["run", *args])


def test_config_sections_and_overrides():
    text = """
suite = "jensen"
seed = 7

[one]
cases = 3

[two]
suite = valiron
r_start = 10
r_stop = 20
r_count = 3
"""
    cfgs = load_config(text, {"seed": "9"})
    assert [c.name for c in cfgs] == ["one", "two"]
    assert cfgs[0].suite == "jensen" and cfgs[0].cases == 3 and cfgs[0].seed == 9
    assert cfgs[1].grid(1, 2) == pytest.approx([10, 20 ** 0.5 * 10 ** 0.5, 20])


def test_config_without_sections():
    (cfg,) = load_config("suite = borel\nc = 1, i\nalpha = 1.5,2\nr_log = false\n")
    assert cfg.c == (1, 1j) and cfg.alpha == (1.5, 2.0) and cfg.r_log is False


@pytest.mark.parametrize("values", [
    {"suite": "nope"}, {"suite": "jensen", "r_start": "0.01"}, {"suite": "jensen", "r_count": "1"},
    {"suite": "bound-grid", "delta": "1.5"}, {"suite": "bound-grid", "alpha": "1"},
    {"suite": "jensen", "sede": "1"}, {"suite": "jensen", "seed": "x"}, {},
    {"suite": "clunie", "function": "gama"}, {"suite": "clunie", "P": "f(z)^1.5"},
    {"suite": "jensen", "r_log": "maybe"},
])
def test_config_errors(values):
    with pytest.raises(ConfigError):
        make_config(values)


def test_cli_config_typo_exit_2(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("suite = jensen\nrcount = 3\n")
    assert run_cli(tmp_path, str(cfg)) == 2
    assert run_cli(tmp_path, str(tmp_path / "missing.ini")) == 2
    assert run_cli(tmp_path, "--suite", "jensen", "--r-start", "0.01") == 2


def test_jensen_suite_csv(tmp_path, capsys):
    out = tmp_path / "j.csv"
    assert run_cli(tmp_path, "--suite", "jensen", "--out", str(out)) == 0
    rows = read_csv(out)
    assert len(rows) == 80
    assert list(rows[0]) == harness.HEADER
    assert all(r["pass"] == "true" for r in rows)
    first = out.read_text().splitlines()[0]
    assert first.startswith("#") and "seed=42" in first
    assert "80 rows" in capsys.readouterr().out


def test_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run_cli(tmp_path, "--suite", "poisson-jensen", "--seed", "5", "--out", str(p)) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    run_cli(tmp_path, "--suite", "poisson-jensen", "--seed", "6", "--out", str(c))
    assert c.read_bytes() != a.read_bytes()


def test_every_suite_same_header(tmp_path):
    for suite, extra in [("expexp-ratio", ["--r-count", "2"]), ("valiron", ["--r-count", "2"]),
                         ("borel", ["--r-start", "10", "--r-count", "3"]),
                         ("custom", ["--function", "exppoly[1,0]", "--r-count", "2"])]:
        out = tmp_path / f"{suite}.csv"
        code = run_cli(tmp_path, "--suite", suite, "--out", str(out), *extra)
        assert code == 0, suite
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == ",".join(harness.HEADER)
        rows = read_csv(out)
        assert {r["suite"] for r in rows} == {suite}
        float(rows[0]["r"])


def test_forced_failure_exit_1(tmp_path, monkeypatch):
    def fake(cfg):
        return SuiteResult([Row("jensen", "x", 1.0, 1.0, 0.5, 2.0, passed=True),
                            Row("jensen", "x", 2.0, 1.0, 0.5, 2.0, passed=False)])

    monkeypatch.setitem(harness.SUITE_FUNCS, "jensen", fake)
    assert run_cli(tmp_path, "--suite", "jensen", "--out", str(tmp_path / "f.csv")) == 1


def test_flagged_failures_do_not_fail(tmp_path, monkeypatch):
    def fake(cfg):
        return SuiteResult([Row("jensen", "x", 1.0, 1.0, 0.5, 2.0, flagged=True, passed=False)])

    monkeypatch.setitem(harness.SUITE_FUNCS, "jensen", fake)
    assert run_cli(tmp_path, "--suite", "jensen", "--out", str(tmp_path / "f.csv")) == 0


def test_numerical_error_exit_3(tmp_path, monkeypatch, capsys):
    from nevkit.quadrature import QuadratureError

    def broken(cfg):
        harness._guard("jensen case r=2", lambda: (_ for _ in ()).throw(QuadratureError("boom")))

    monkeypatch.setitem(harness.SUITE_FUNCS, "jensen", broken)
    assert run_cli(tmp_path, "--suite", "jensen", "--out", str(tmp_path / "f.csv")) == 3
    assert "jensen case r=2" in capsys.readouterr().err


def test_check_gate_exit_2(tmp_path):
    code = run_cli(tmp_path, "--suite", "clunie", "--r-count", "3", "--out", str(tmp_path / "g.csv"))
    assert code == 0
    cfg = tmp_path / "gate.ini"
    cfg.write_text("suite = mohonko\ntarget = const[i]\nr_count = 3\n")
    assert run_cli(tmp_path, str(cfg), "--out", str(tmp_path / "g2.csv")) == 2


def test_row_formatting():
    row = Row("s", "f", 1 / 3, 2.0, math.pi, 0.1, c=1j)
    cells = row.cells()
    assert cells[2] == "0.333333333333" and cells[3] == "2" and cells[4] == "3.14159265359"
    assert cells[6] == "" and cells[8] == "i" and cells[-2:] == ["false", "true"]


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run([sys.executable, "-m", "nevkit.cli", "run", "--suite", "expexp-ratio",
                           "--r-count", "2", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
