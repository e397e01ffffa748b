import json
import os
import subprocess
import sys

import pytest

from quenchlab import cli, ed
from quenchlab.errors import DegeneracyError
from quenchlab.tables import parse_csv, render_csv


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_default_passes(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4 * 4 * 4
    assert all(line.startswith("PASS") for line in lines)


def test_verify_unattainable_tolerance_fails(capsys):
    code, out, _ = run(["verify", "--n", "4,6", "--lambdas", "0.9", "--tolerance", "1e-20"], capsys)
    assert code == 1
    assert "FAIL" in out


def test_verify_zero_field_passes(capsys):
    # degenerate at lam=0, but the partner state does not couple through H1
    code, out, _ = run(["verify", "--n", "4,6", "--lambdas", "0"], capsys)
    assert code == 0 and out.count("PASS") == 8


def test_verify_reports_degenerate_cell_without_aborting(capsys, tmp_path, monkeypatch):
    real = ed.identity_check

    def flaky(n, lam, **kw):
        if lam == 0.25:
            raise DegeneracyError("forced", 0.0)
        return real(n, lam, **kw)

    monkeypatch.setattr(ed, "identity_check", flaky)
    path = tmp_path / "v.csv"
    code, out, _ = run(["verify", "--n", "4", "--lambdas", "0.25,0.5", "--out", str(path)], capsys)
    assert code == 1
    assert "ERROR" in out and "PASS" in out
    _, columns, rows, _ = parse_csv(path.read_text())
    assert columns[-1] == "status"
    assert [r[-1] for r in rows].count("ERROR") == 1


def test_verify_jacobi_solver(capsys):
    code, _, _ = run(["verify", "--n", "4", "--lambdas", "1.0", "--solver", "jacobi"], capsys)
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["verify", "--n", "3"],
    ["verify", "--n", "14"],
    ["verify", "--lambdas", "a,b"],
    ["verify", "--lambdas", "-1"],
    ["sweep", "--n", "x"],
    ["sweep", "--lambda-count", "0"],
    ["sweep", "--lambda-min", "1.2", "--lambda-max", "0.8"],
    ["sweep", "--observable", "riw", "--method", "elliptic", "--lambda-min", "1", "--lambda-max", "1", "--lambda-count", "1"],
    ["sweep", "--observable", "chi-f", "--method", "elliptic"],
    ["peaks", "--observable", "energy"],
    ["collapse", "--nu", "0"],
    ["sweep", "--workers", "0"],
])
def test_configuration_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "configuration error" in err


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["sweep", "--bogus"])
    assert info.value.code == 2


def test_unwritable_output_exits_3(capsys, tmp_path):
    target = tmp_path / "missing-dir" / "out.csv"
    code, _, err = run(["sweep", "--n", "4", "--lambda-count", "3", "--out", str(target)], capsys)
    assert code == 3
    assert "cannot write" in err


def test_sweep_hand_value(capsys):
    code, out, _ = run(["sweep", "--n", "4", "--lambda-min", "0", "--lambda-max", "0", "--lambda-count", "1"], capsys)
    assert code == 0
    config, columns, rows, footer = parse_csv(out)
    assert columns == ["observable", "method", "N", "lambda", "value", "rescaled_value"]
    assert rows == [["fidelity_susceptibility", "mode_sum", 4, 0, 0.25, 0.25 * 3.141592653589793]]
    assert config["command"] == "sweep" and footer is None


def test_sweep_rows_sorted_and_riw_peaks_ordered(capsys):
    code, out, _ = run(["sweep", "--observable", "riw", "--n", "400,100,200",
                        "--lambda-min", "0.9", "--lambda-max", "1.05", "--lambda-count", "151"], capsys)
    assert code == 0
    _, _, rows, _ = parse_csv(out)
    keys = [(r[2], r[3]) for r in rows]
    assert keys == sorted(keys)
    peak = {n: max(r[4] for r in rows if r[2] == n) for n in (100, 200, 400)}
    assert peak[100] < peak[200] < peak[400]


@pytest.mark.parametrize("method", ["integral", "elliptic", "asymptotic"])
def test_sweep_other_methods(method, capsys):
    obs = "chi-f" if method == "asymptotic" else "riw"
    code, out, _ = run(["sweep", "--observable", obs, "--method", method, "--n", "64",
                        "--lambda-min", "0.2", "--lambda-max", "0.6", "--lambda-count", "3"], capsys)
    assert code == 0
    assert len(parse_csv(out)[2]) == 3


def test_sweep_json(capsys):
    code, out, _ = run(["sweep", "--n", "4,6", "--lambda-count", "3", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"][0] == "observable" and len(doc["rows"]) == 6
    assert doc["config"]["format"] == "json"


def test_sweep_byte_identical_across_runs_and_workers(tmp_path, capsys):
    texts = []
    for i, workers in enumerate(["1", "1", "4"]):
        path = tmp_path / f"s{i}.csv"
        code, _, _ = run(["sweep", "--observable", "riw", "--workers", workers, "--out", str(path)], capsys)
        assert code == 0
        texts.append(path.read_bytes())
    assert texts[0] == texts[1] == texts[2]
    assert b"workers" not in texts[0]


def test_worker_count_from_environment(tmp_path, capsys, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("QUENCHLAB_WORKERS", "3")
    assert cli.main(["sweep", "--n", "8,16", "--lambda-count", "5", "--out", str(a)]) == 0
    monkeypatch.setenv("QUENCHLAB_WORKERS", "1")
    assert cli.main(["sweep", "--n", "8,16", "--lambda-count", "5", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_csv_round_trip_is_idempotent(capsys):
    _, out, _ = run(["sweep", "--observable", "energy", "--n", "8,10", "--lambda-count", "7"], capsys)
    config, columns, rows, footer = parse_csv(out)
    assert render_csv(columns, rows, config, footer) == out
    _, out, _ = run(["peaks", "--n", "16,32,64,128"], capsys)
    assert render_csv(*[parse_csv(out)[i] for i in (1, 2, 0, 3)]) == out


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep settings\nobservable = riw\nn = 8\nlambda-count = 4\nlambda_min = 0.5\nlambda_max = 1.5\n")
    code, out, _ = run(["sweep", "--config", str(cfg), "--n", "6"], capsys)
    assert code == 0
    config, _, rows, _ = parse_csv(out)
    assert {r[2] for r in rows} == {6}
    assert len(rows) == 4 and rows[0][0] == "rescaled_irreversible_work"
    assert config["n"] == "6" and "config" not in config


@pytest.mark.parametrize("body", ["nonsense line\n", "colour = red\n", "format = xml\n", "lambda_count = many\n"])
def test_bad_config_file_exits_2(tmp_path, capsys, body):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(body)
    assert run(["sweep", "--config", str(cfg)], capsys)[0] == 2


def test_missing_config_file_exits_2(tmp_path, capsys):
    assert run(["sweep", "--config", str(tmp_path / "nope.cfg")], capsys)[0] == 2


def test_peaks_footer(capsys):
    code, out, _ = run(["peaks"], capsys)
    assert code == 0
    _, columns, rows, footer = parse_csv(out)
    assert columns == ["observable", "N", "lambda_m", "peak_value", "one_minus_lambda_m"]
    chi, riw = footer["fidelity_susceptibility"], footer["rescaled_irreversible_work"]
    assert chi["power"]["slope"] == pytest.approx(2.0, abs=0.05)
    assert riw["n_log_n"]["r_squared"] >= 0.999
    lm = {(r[0], r[1]): r[2] for r in rows}
    assert lm["fidelity_susceptibility", 256] > lm["rescaled_irreversible_work", 256]
    assert all(r[4] == pytest.approx(1 - r[2], abs=1e-15) for r in rows)


def test_peaks_all_failing_exits_1(capsys):
    # N=2 has no interior maximum in the default bracket
    code, out, err = run(["peaks", "--observable", "chi-f", "--n", "2"], capsys)
    assert code == 1
    assert "failed" in err
    assert parse_csv(out)[3]["failures"]


def test_collapse_footer_and_zero_at_peak(capsys):
    code, out, _ = run(["collapse"], capsys)
    assert code == 0
    _, columns, rows, footer = parse_csv(out)
    assert columns == ["observable", "ansatz", "N", "x", "y"]
    for kind in ("fidelity_susceptibility", "rescaled_irreversible_work"):
        assert footer[kind]["quality"] <= 1e-3
    at_peak = [r for r in rows if r[0] == "rescaled_irreversible_work" and r[3] == 0]
    assert {r[2] for r in at_peak} == {128, 256, 512, 1024}
    assert all(r[4] == 0 for r in at_peak)


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "quenchlab.cli", "sweep", "--n", "4", "--lambda-count", "2", "--out", str(out)],
        capture_output=True, text=True, env={**os.environ, "PYTHONHASHSEED": "1"},
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().count("\n") > 2
