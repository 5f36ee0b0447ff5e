import json
import shutil
import subprocess
import sys

import mpmath
import pytest

from trievar.cli import main
from trievar.serialize import from_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exact_csv(capsys):
    code, out, _ = run(capsys, "exact", "--stat", "size", "--n-max", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,mean,second_moment,variance,variance_over_n"
    assert lines[4].split(",")[1].startswith("3.33333333")
    assert len(lines) == 6


def test_exact_json_round_trip(capsys):
    code, out, _ = run(capsys, "exact", "--stat", "epl", "--p", "1/3", "--n-max", "10", "--format", "json")
    assert code == 0
    tab = from_json(out)
    assert tab.n_max == 10
    # two keys separate after a geometric number of levels with success 4/9
    assert abs(tab.mp("mean", 2) - mpmath.mpf(9) / 2) < 1e-25
    code, out2, _ = run(capsys, "exact", "--stat", "epl", "--p", "1/3", "--n-max", "10", "--format", "json")
    assert out == out2


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--stat", "size", "--n", "64", "--trials", "2000", "--seed", "7")
    assert code == 0
    header, row = out.splitlines()
    assert header == "n,trials,mean,variance,se_mean,se_var,seed"
    assert row.startswith("64,2000,") and row.endswith(",7")


def test_asympt_rows(capsys):
    code, out, _ = run(capsys, "asympt", "--stat", "size", "--p", "0.5", "--k", "3")
    assert code == 0
    rows = [line for line in out.splitlines() if not line.startswith("#")]
    assert rows[0] == "k,re,im"
    ks = [int(r.split(",")[0]) for r in rows[1:]]
    assert ks == [-3, -2, -1, 0, 1, 2, 3]
    zero = [r for r in rows[1:] if r.startswith("0,")][0]
    assert zero.split(",")[1].startswith("0.845858623076001")


def test_asympt_log_level_for_ipl(capsys):
    code, out, _ = run(capsys, "asympt", "--stat", "ipl", "--level", "log2", "--k", "1")
    assert code == 0
    assert "c_log2=0.845858623076001" in out


def test_asympt_json(capsys):
    code, out, _ = run(capsys, "asympt", "--stat", "epl", "--probs", "0.3,0.7", "--format", "json")
    assert code == 0
    e = from_json(out)
    assert abs(e.c_log - mpmath.mpf("0.661389")) < 1e-6


def test_compare_tolerance_exit(capsys):
    code, out, _ = run(capsys, "compare", "--stat", "size", "--n", "64,128", "--tol", "1e-30")
    assert code == 2
    assert out.splitlines()[0] == "n,exact,predicted,gap"
    code, _, _ = run(capsys, "compare", "--stat", "size", "--n", "64,128", "--tol", "1e-3")
    assert code == 0


def test_identities(capsys):
    code, out, _ = run(capsys, "identities")
    assert code == 0
    rows = [r.split(",") for r in out.splitlines()[1:] if not r.startswith("#")]
    assert all(r[2] == "1" for r in rows)
    code, _, _ = run(capsys, "identities", "--tol", "1e-80")
    assert code == 2


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--b", "2,10", "--print-digits", "12")
    assert code == 0
    assert out.splitlines()[1:] == ["2,4.35290669895", "10,0.509260838726"]


def test_plot_data(capsys):
    code, out, _ = run(capsys, "plot-data", "--stat", "size", "--n-min", "16", "--n-max", "64",
                       "--points", "5", "--source", "exact")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,exact,predicted,fluctuation"
    assert lines[1].startswith("16,")


@pytest.mark.parametrize("argv", [
    ["exact", "--stat", "size"],
    ["exact", "--stat", "size", "--n-max", "4", "--p", "1.5"],
    ["exact", "--stat", "leader", "--p", "0.3", "--n-max", "4"],
    ["exact", "--stat", "size", "--p", "0.5", "--b", "3", "--n-max", "4"],
    ["asympt", "--stat", "peripheral", "--p", "0.3"],
    ["exact", "--stat", "size", "--n-max", "4", "--digits", "8"],
    ["table", "--b", "1..3"],
    ["nonsense"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as ei:
        code = main(argv)
        raise SystemExit(code)
    assert ei.value.code == 1


def test_budget_exit(capsys):
    code, _, err = run(capsys, "exact", "--stat", "multiaccess", "--b", "10", "--n-max", "20000")
    assert code == 3
    assert "budget" in err


def test_truncation_exit(capsys):
    code, _, _ = run(capsys, "asympt", "--stat", "size", "--p", "0.3", "--j", "2")
    assert code == 2


def test_digits_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("TRIEVAR_DIGITS", "20")
    code, out, _ = run(capsys, "asympt", "--stat", "size", "--k", "1")
    assert code == 0 and "digits=20" in out
    monkeypatch.setenv("TRIEVAR_DIGITS", "many")
    code, _, _ = run(capsys, "asympt", "--stat", "size", "--k", "1")
    assert code == 1


def test_out_file(tmp_path, capsys):
    target = tmp_path / "t.csv"
    code, out, _ = run(capsys, "table", "--b", "2..3", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("b,constant\n2,")


@pytest.mark.skipif(shutil.which("trievar") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["trievar", "table", "--b", "2"], capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.startswith("b,constant\n2,4.3529066989454006")


def test_module_entry():
    res = subprocess.run([sys.executable, "-m", "trievar.cli", "simulate", "--stat", "leader", "--n", "8",
                          "--trials", "100", "--format", "json"], capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["type"] == "SimResult"
