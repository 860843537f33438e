import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from z4doe.cli import main
from z4doe.designio import DesignFormatError, design_from_csv, read_design, sidecar_path, write_design
from z4doe.z4core import build_design, half_fraction


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_construct_stdout(capsys, golden_design):
    rc, out, _ = run(capsys, "construct", "--v", "112")
    assert rc == 0
    assert np.array_equal(design_from_csv(out), golden_design)


def test_csv_round_trip(tmp_path):
    D = half_fraction(build_design("1120"), 4)
    path = tmp_path / "h.csv"
    write_design(D, path)
    assert sidecar_path(path).exists()
    back = read_design(path)
    assert back == D
    assert back.v == D.v and back.branches == D.branches
    sidecar_path(path).unlink()
    bare = read_design(path)
    assert bare.v is None and np.array_equal(bare.matrix, D.matrix)


@pytest.mark.parametrize("text", ["", "c1,c2\n", "a,b\n1,1\n", "c1,c2\n1\n", "c1,c2\n1,0\n"])
def test_malformed_csv(text):
    with pytest.raises(DesignFormatError):
        design_from_csv(text)


def test_analyze_json(capsys):
    rc, out, _ = run(capsys, "analyze", "--v", "112", "--json")
    d = json.loads(out)
    assert rc == 0
    assert d["resolution"] == {"exact": "11/2", "decimal": "5.5"}
    assert d["wlp"] == {"5": "2", "6": "1"}
    assert d["projectivity"] == 5


def test_analyze_file_and_text(capsys, tmp_path):
    path = tmp_path / "d.csv"
    assert main(["construct", "--v", "12", "--out", str(path)]) == 0
    rc, out, _ = run(capsys, "analyze", "--in", str(path), "--words")
    assert rc == 0
    assert "A4 = 3" in out
    rc, out, _ = run(capsys, "analyze", "--in", str(path), "--no-projectivity", "--json")
    assert json.loads(out)["projectivity"] is None


def test_half(capsys, tmp_path):
    out_path = tmp_path / "h.csv"
    rc, out, _ = run(capsys, "half", "--v", "112", "--col", "7", "--out", str(out_path), "--json")
    assert rc == 0
    assert json.loads(out)["wlp"] == {"4": "2", "6": "1"}
    assert read_design(out_path).n_runs == 32
    # a design that was already branched is refused
    rc, _, err = run(capsys, "half", "--in", str(out_path), "--col", "1")
    assert rc == 1 and "error" in err


def test_half_degenerate(capsys):
    rc, _, err = run(capsys, "half", "--v", "00", "--col", "1")
    assert rc == 1


def test_predict(capsys):
    rc, out, _ = run(capsys, "predict", "--profile", "0,2,1,0", "--branch", "1", "--json")
    d = json.loads(out)
    assert rc == 0
    assert d["source"] == "theory"
    assert d["wlp"] == {"4": "1", "5": "2"}
    assert d["projectivity"] == 4
    rc, out, _ = run(capsys, "predict", "--v", "00")
    assert rc == 0 and "NotCovered" in out
    rc, _, _ = run(capsys, "predict", "--v", "00", "--branch", "2")
    assert rc == 1
    rc, _, _ = run(capsys, "predict")
    assert rc == 1


def test_search(capsys):
    rc, out, _ = run(capsys, "search", "--n", "3", "--criterion", "aberration", "--json")
    assert rc == 0
    assert json.loads(out)[0]["v"] == "[112]"
    rc, out, _ = run(capsys, "search", "--n", "3", "--criterion", "projectivity", "--half", "--verify")
    assert rc == 0 and "[112] f" in out and "verified" in out
    rc, _, _ = run(capsys, "search", "--n", "7", "--criterion", "resolution", "--verify")
    assert rc == 3


def test_table2_csv(capsys):
    rc, out, _ = run(capsys, "table2", "--m", "9", "--format", "csv")
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["criterion"], r["v"], r["branch"]) for r in rows] == [("r, a", "[1122]", "l"),
                                                                     ("p", "[1112]", "f")]
    assert all(r["verified"] == "ok" for r in rows)
    assert rows[0]["reg_resolution"] == "6"


def test_table2_text(capsys):
    rc, out, _ = run(capsys, "table2", "--m", "8", "--no-verify")
    assert rc == 0 and "[112]" in out and "unverified" in out
    rc, _, _ = run(capsys, "table2", "--m", "5")
    assert rc == 1


def test_verify(capsys):
    rc, out, _ = run(capsys, "verify", "--max-n", "2", "--all-columns")
    assert rc == 0 and "mismatches: 0" in out
    rc, _, _ = run(capsys, "verify", "--max-n", "7")
    assert rc == 3


@pytest.mark.parametrize("argv", [["construct", "--v", "15"], ["bogus"], ["construct"],
                                  ["analyze", "--v", "1", "--in", "x.csv"], ["analyze", "--in", "/nonexistent.csv"]])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 1


def test_deterministic_output(capsys):
    outs = [run(capsys, "table2", "--m", "11", "--format", "csv")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "z4doe", "predict", "--v", "112"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert "wlp: A5 = 2, A6 = 1" in res.stdout
