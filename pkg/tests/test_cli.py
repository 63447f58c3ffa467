import csv
import io
import json
import subprocess
import sys

import pytest

from s4q.cli import MIN_TWO_L, ConfigError, make_config, main
from s4q.report import RECORD_FIELDS


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_relations_pass_json(capsys):
    code, out, err = run_cli(capsys, "relations", "--cutoff", "5/2", "--q", "0.3")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    recs = doc["records"]
    assert recs and all(r["pass"] for r in recs)
    assert set(recs[0]) == set(RECORD_FIELDS)
    assert all(r["suite"] == "relations" and r["q"] == 0.3 for r in recs)
    assert f"{len(recs)}/{len(recs)} checks passed" in err


def test_csv_output(capsys, tmp_path):
    path = tmp_path / "r.csv"
    code, out, _ = run_cli(capsys, "--suite", "zeta", "--cutoff", "5/2", "--format", "csv", "--output", str(path))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert rows and list(rows[0]) == list(RECORD_FIELDS)
    assert {r["pass"] for r in rows} == {"True"}


def test_details_adds_extras(capsys):
    _, plain, _ = run_cli(capsys, "approx", "--cutoff", "5/2")
    _, rich, _ = run_cli(capsys, "approx", "--cutoff", "5/2", "--details")
    assert len(rich) > len(plain)
    assert not any("details" in r for r in json.loads(plain)["records"])
    detailed = [r for r in json.loads(rich)["records"] if "details" in r]
    assert detailed and all(set(r) - {"details"} == set(RECORD_FIELDS) for r in detailed)


def test_failure_exit_code(capsys):
    # at the smallest admissible cutoff the smoothing norms have not settled and the published f form fails
    code, out, err = run_cli(capsys, "real", "--cutoff", "13/2")
    assert code == 2
    recs = json.loads(out)["records"]
    assert any(not r["pass"] for r in recs)
    assert "[FAIL]" in err


@pytest.mark.parametrize("argv, message", [
    (["bogus"], "unknown suite"),
    (["relations", "--cutoff", "3/2"], "below the minimum"),
    (["relations", "--cutoff", "abc"], "not a half-integer"),
    (["relations", "--q", "1.2"], "q must lie"),
    (["relations", "--tol", "-1"], "positive"),
    (["real", "--cutoff", "11/2"], "real suite needs"),
    (["all", "--q", "0.97", "--cutoff", "5/2"], "tail bounds exceed the budget"),
    (["relations", "--suite", "zeta"], "conflicting suites"),
])
def test_configuration_errors(capsys, argv, message):
    code, out, err = run_cli(capsys, *argv)
    assert code == 1
    assert out == ""
    assert message in err


def test_cutoff_parsing():
    assert make_config("zeta", [0.5], "25/2").two_L == 25
    assert make_config("zeta", [0.5], "12.5").two_L == 25
    # integer cutoffs round down to the spinor level below
    cfg = make_config("zeta", [0.5], "6")
    assert cfg.two_L == 11 and cfg.spinor_cutoff == "11/2" and cfg.scalar_cutoff == 5
    assert make_config("all", None, "25/2").qs == (0.5,)
    with pytest.raises(ConfigError):
        make_config("zeta", [0.5], str(MIN_TWO_L - 2) + "/2")


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "s4q.cli", "zeta", "--cutoff", "5/2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["records"]
