"""Smoke runs of the experiment scripts on tiny grids."""
import csv
import json
import pathlib
import subprocess
import sys

import pytest

SCRIPTS = pathlib.Path(__file__).resolve().parents[1] / "scripts"

CASES = [
    ("tmsv_scan.py", ["--lam", "-0.5", "0.5", "3", "--product", "-1", "1", "3"], 9),
    ("cat_lobes.py", ["--orders", "1,1", "--alpha", "0.5", "1", "2", "--gamma", "0", "1", "3"], 6),
    ("cat_lobes.py", ["--fock", "--orders", "1,1", "--alpha", "0.5", "1", "2", "--gamma", "0", "1", "2"], 4),
    ("hg_criteria.py", ["--sigma", "0.5", "2", "3"], 9),
    ("noon_scan.py", ["--max-n", "2", "--product", "-1", "1", "5"], 10),
]


@pytest.mark.parametrize("script,args,nrows", CASES, ids=[c[0] for c in CASES])
def test_script_writes_table(tmp_path, script, args, nrows):
    out = tmp_path / "out.csv"
    subprocess.run([sys.executable, str(SCRIPTS / script), *args, "--output", str(out)],
                   check=True, capture_output=True, text=True)
    with out.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == nrows


def test_loss_dephasing_tables(tmp_path):
    prefix = tmp_path / "lossy"
    subprocess.run([sys.executable, str(SCRIPTS / "loss_dephasing.py"), "--points", "3", "--orders", "1,1",
                    "--prefix", str(prefix)], check=True, capture_output=True)
    for suffix, n in (("noon", 9), ("cat_loss", 9), ("cat_dephasing", 9)):
        with open(f"{prefix}_{suffix}.csv") as fh:
            assert len(list(csv.DictReader(fh))) == n


def test_shot_budget_json(tmp_path):
    out = tmp_path / "budget.json"
    subprocess.run([sys.executable, str(SCRIPTS / "shot_budget.py"), "--alpha", "0.5", "1.0", "2",
                    "--max-n", "2", "--output", str(out)], check=True, capture_output=True)
    payload = json.loads(out.read_text())
    assert [r["panel"] for r in payload["rows"]] == ["cat"] * 2 + ["noon"] * 4
    assert payload["rows"][2]["m0"] == 577
