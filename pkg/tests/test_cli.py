import csv
import io

from click.testing import CliRunner

from angsync.cli import main


def _run(*args):
    return CliRunner().invoke(main, list(args))


def test_solve_pretty_and_csv():
    res = _run("solve", "--d", "12", "--delta", "3", "--alpha", "4")
    assert res.exit_code == 0, res.output
    assert "thm31_lsp" in res.output
    res = _run("solve", "--d", "12", "--delta", "3", "--scheme", "squared", "--csv")
    assert res.exit_code == 0
    rows = dict(csv.reader(io.StringIO(res.output)))
    assert rows["cor34_lsp"] != ""
    assert rows["thm22"] == ""


def test_noise_sweep_to_file(tmp_path):
    out = tmp_path / "noise.csv"
    res = _run("noise-sweep", "--d", "10", "--delta", "3", "--trials", "2", "--alphas", "0,3", "--out", str(out))
    assert res.exit_code == 0, res.output
    lines = out.read_text().splitlines()
    assert lines[0].startswith("alpha_deg,err_er,err_lsp,err_sdp")
    assert len(lines) == 3


def test_dim_and_delta_sweeps_stdout():
    res = _run("dim-sweep", "--dims", "8,12", "--delta", "3", "--trials", "1", "--reps", "1", "--methods", "er")
    assert res.exit_code == 0, res.output
    assert "time_er_median" in res.output.splitlines()[0]
    res = _run("delta-sweep", "--d", "12", "--deltas", "2,4", "--alphas", "1", "--trials", "1")
    assert res.exit_code == 0, res.output
    header = res.output.splitlines()[0].split(",")
    assert header[:2] == ["delta", "alpha_deg"]
    assert "cor33_lsp" in header


def test_bad_configuration_exits_nonzero():
    res = _run("solve", "--d", "6", "--delta", "9")
    assert res.exit_code != 0
    assert "delta" in res.output
    res = _run("noise-sweep", "--alphas", "a,b")
    assert res.exit_code != 0
    res = _run("delta-sweep", "--d", "10", "--deltas", "2,30", "--trials", "1")
    assert res.exit_code != 0
    assert "invalid" in res.output
