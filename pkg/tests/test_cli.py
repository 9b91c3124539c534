import csv
import io
import json
import subprocess
import sys

import pytest

from nilmalle import catalog
from nilmalle.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def report(capsys, *argv):
    code, out = run(capsys, *argv)
    assert code == 0, out
    return json.loads(out)


def test_group_info_q8(capsys):
    doc = report(capsys, "group", "info", "Q8", "--d", "1")
    r = doc["report"]
    assert (r["order"], r["num_I"], r["a"], r["b"]) == (8, 1, "1/4", "1")
    assert doc["version"] and doc["catalog_hash"] == catalog.catalog_hash()


def test_group_list(capsys):
    code, out = run(capsys, "group", "list")
    assert code == 0
    assert {"C2", "Q8", "D4", "G64", "Heis27"} <= set(out.split())


def test_json_keys_sorted(capsys):
    code, out = run(capsys, "group", "info", "D4")
    doc = json.loads(out)
    assert out == json.dumps(doc, sort_keys=True, indent=2) + "\n"


def test_common_flags_either_side(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--report", str(a), "group", "info", "C4"]) == 0
    assert main(["group", "info", "C4", "--report", str(b)]) == 0
    capsys.readouterr()
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    assert da["config"].pop("report") == str(a)
    assert db["config"].pop("report") == str(b)
    assert da == db


def _disc_column(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][0] == "disc"
    return [int(r[0]) for r in rows[1:]]


def test_count_matches_oracle_csv(capsys, tmp_path):
    ours, theirs = tmp_path / "count.csv", tmp_path / "oracle.csv"
    common = ["--group", "C2", "--X", "10000", "--two-unramified"]
    report(capsys, "count", "--mode", "exact", *common, "--emit-discs", str(ours))
    doc = report(capsys, "oracle", *common, "--emit-discs", str(theirs))
    a, b = _disc_column(ours.read_text()), _disc_column(theirs.read_text())
    assert a == b and len(a) == doc["report"]["epis"]


def test_invalid_catalog_names_triple(capsys, tmp_path):
    records = json.loads(catalog._catalog_text())
    for rec in records:
        if rec["name"] == "Q8":
            rec["cocycles"][2][1] ^= 1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(records))
    code, out = run(capsys, "--catalog", str(path), "group", "info", "Q8")
    assert code == 2
    err = json.loads(out)
    assert err["error"] == "CocycleViolation"
    assert err["step"] == 3 and len(err["triple"]) == 3


def test_unknown_group_and_bad_args(capsys):
    assert run(capsys, "count", "--group", "S3", "--mode", "upper", "--X", "10")[0] == 2
    assert run(capsys, "count", "--group", "C2", "--mode", "upper", "--X", "-1")[0] == 2
    assert run(capsys, "count", "--group", "C2", "--mode", "upper", "--X", "10", "--shards", "2", "--shard", "2")[0] == 2


def test_sharded_count_sums(capsys):
    base = ["count", "--group", "C4", "--mode", "exact", "--X", "100000"]
    whole = report(capsys, *base)["report"]
    parts = [report(capsys, *base, "--shards", "4", "--shard", str(i))["report"] for i in range(4)]
    assert sum(p["lower"] for p in parts) == whole["lower"]
    assert sum(p["upper"] for p in parts) == whole["upper"]
    pooled = report(capsys, *base, "--shards", "4", "--workers", "2")["report"]
    assert pooled["lower"] == whole["lower"]


def test_heuristic_carries_note(capsys):
    r = report(capsys, "count", "--group", "D4", "--mode", "heuristic", "--X", "100000")["report"]
    assert r["heuristic"] > 0 and r["notes"]


@pytest.mark.parametrize("argv", [
    ["count", "--group", "V4", "--mode", "exact", "--X", "50000", "--emit-discs", "-"],
    ["analytic", "filter", "--l", "2", "--k", "2", "--n", "5", "--a", "1", "0"],
    ["analytic", "shape", "--x", "100000", "--modulus", "4", "--residues", "1", "--z", "2"],
])
def test_output_byte_identical(argv):
    cmd = [sys.executable, "-m", "nilmalle.cli", *argv]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first


def test_analytic_filter_csv(capsys):
    code, out = run(capsys, "analytic", "filter", "--l", "3", "--k", "2", "--n", "4", "--a", "1", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["abs_error"]) < 1e-10


def test_selftest(capsys):
    code, out = run(capsys, "selftest")
    assert code == 0
    assert out.count("PASS") == 4 and "FAIL" not in out
