import json
from pathlib import Path

import numpy as np
import pytest

from nonclass import cli

DEMOS = Path(__file__).resolve().parents[1] / "demos" / "configs"


def _write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


FOCK = """
[state]
kind = fock
n = 1

[settings]
etas = 0.5, 1.0
"""

COHERENT = """
[state]
kind = coherent
amplitude_sq = 0.7

[settings]
uniform = 3
eta_c = 0.9

[tests]
run = all
"""


@pytest.mark.parametrize("text,code", [(FOCK, 2), (COHERENT, 0)])
def test_certify_exit_codes(tmp_path, text, code, capsys):
    assert cli.main(["certify", "--config", _write(tmp_path, text)]) == code
    assert "verdict" in capsys.readouterr().out


def test_json_report_round_trip(tmp_path):
    out = tmp_path / "report.json"
    code = cli.main(["certify", "--config", _write(tmp_path, COHERENT), "--format", "json",
                     "--out", str(out)])
    assert code == 0
    d = json.loads(out.read_text())
    assert d["verdict"] == "classical-compatible"
    assert d["oracle"]["feasible"] is True and d["moments"]["classical"] is True
    assert json.loads(json.dumps(d)) == d


def test_measured_data_with_trials(tmp_path, capsys):
    text = "[state]\nkind = data\np = 0.5, 0.0\ntrials = 1000\n[settings]\netas = 0.5, 1.0\n"
    assert cli.main(["certify", "--config", _write(tmp_path, text), "--format", "json"]) == 2
    d = json.loads(capsys.readouterr().out)
    assert d["epsilon"] > 0


def test_oracle_command(tmp_path, capsys):
    assert cli.main(["oracle", "--config", _write(tmp_path, FOCK), "--format", "json"]) == 2
    d = json.loads(capsys.readouterr().out)
    assert d["feasible"] is False and d["residual"] == pytest.approx(0.25, abs=1e-6)


@pytest.mark.parametrize("start,stop,step,rows", [(0.1, 0.3, 0.1, 3), (0.0, 0.25, 0.1, 3),
                                                  (0.5, 0.5, 0.1, 1), (0.0, 1.0, 0.25, 5)])
def test_sweep_row_count(tmp_path, capsys, start, stop, step, rows):
    text = (f"[state]\nkind = squeezed\nr = 0.5\nalpha0 = 0\n[settings]\nuniform = 3\neta_c = 0.8\n"
            f"[sweep]\nparam = alpha0\nstart = {start}\nstop = {stop}\nstep = {step}\n")
    assert cli.main(["sweep", "--config", _write(tmp_path, text)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "param,V,epsilon,verdict"
    assert len(lines) == rows + 1
    for line in lines[1:]:
        p, V, eps, verdict = line.split(",")
        assert float(repr(float(V))) == float(V)
        assert verdict in cli.EXIT_CODES


def test_sweep_csv_full_precision():
    rows = [(0.1, 1 / 3, None, "nonclassical")]
    line = cli.format_sweep(rows).splitlines()[1]
    assert float(line.split(",")[1]) == 1 / 3


def test_sweep_threads_preserve_order(tmp_path, monkeypatch, capsys):
    text = ("[state]\nkind = coherent\namplitude_sq = 1\n[settings]\nuniform = 2\n"
            "[sweep]\nparam = amplitude_sq\nstart = 0.5\nstop = 2.5\nstep = 0.5\n")
    path = _write(tmp_path, text)
    cli.main(["sweep", "--config", path])
    serial = capsys.readouterr().out
    monkeypatch.setenv("NONCLASS_THREADS", "3")
    cli.main(["sweep", "--config", path])
    assert capsys.readouterr().out == serial
    params = [float(line.split(",")[0]) for line in serial.splitlines()[1:]]
    assert params == sorted(params)


def test_simulate_reproducible(tmp_path, capsys):
    text = "[state]\nkind = squeezed\nr = 0.5\nalpha0 = 0.1\n[settings]\nuniform = 3\neta_c = 0.8\n"
    path = _write(tmp_path, text)
    args = ["simulate", "--config", path, "--trials", "100000", "--seed", "5", "--format", "json"]
    cli.main(args)
    first = json.loads(capsys.readouterr().out)
    cli.main(args)
    second = json.loads(capsys.readouterr().out)
    first.pop("timings"), second.pop("timings")
    assert first == second
    assert first["seed"] == 5 and len(first["p_hat"]) == 3


@pytest.mark.parametrize("text,line,fragment", [
    ("[state]\nkind = coherent\namplitude_sq = 1\n\n[settings]\netas = 0.9, 0.5\n", 6, "increasing"),
    ("[state]\nkind = laser\n[settings]\nuniform = 2\n", 2, "unknown state kind"),
    ("[state]\nkind = fock\nn = two\n[settings]\nuniform = 2\n", 3, "cannot parse"),
    ("[state]\nkind = data\np = 0.5\n[settings]\nuniform = 2\n", 3, "expected 2"),
    ("[state]\nkind = coherent\namplitude_sq = 1\n[settings]\nuniform = 2\n"
     "[uncertainty]\ndelta = 0.6\n", 7, "delta"),
    ("[state]\nkind = coherent\namplitude_sq = 1\n[settings]\nuniform = 2\n"
     "[sweep]\nparam = alpha0\nstart = 0\nstop = 1\nstep = 0.1\n", 7, "not a parameter"),
])
def test_config_errors_are_line_anchored(tmp_path, capsys, text, line, fragment):
    path = _write(tmp_path, text)
    assert cli.main(["certify", "--config", path]) == 1
    err = capsys.readouterr().err
    assert f"{path}:{line}:" in err and fragment in err


def test_empty_sweep_range(tmp_path, capsys):
    text = ("[state]\nkind = coherent\namplitude_sq = 1\n[settings]\nuniform = 2\n"
            "[sweep]\nparam = amplitude_sq\nstart = 1\nstop = 0\nstep = 0.1\n")
    assert cli.main(["sweep", "--config", _write(tmp_path, text)]) == 1
    assert "empty sweep range" in capsys.readouterr().err


def test_simulate_needs_seed(tmp_path, capsys):
    assert cli.main(["simulate", "--config", _write(tmp_path, FOCK), "--trials", "10"]) == 1
    assert "seed" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["certify"], ["bogus"], ["certify", "--config", "x.ini",
                                                           "--format", "xml"]])
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == 1


def test_missing_file(capsys):
    assert cli.main(["certify", "--config", "/nonexistent/run.ini"]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_sweep_values():
    np.testing.assert_allclose(cli.sweep_values(0.0, 3.0, 0.05), np.arange(61) * 0.05)
    with pytest.raises(ValueError):
        cli.sweep_values(0.0, 1.0, 0.0)


@pytest.mark.parametrize("name", sorted(p.name for p in DEMOS.glob("*.ini")))
def test_demo_configs_load(name):
    cfg = cli.load_config(str(DEMOS / name))
    assert cfg.settings.N >= 2
