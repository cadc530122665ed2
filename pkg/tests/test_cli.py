import csv
import json

import numpy as np
import pytest

from mrbp.cli import main, parse_snrs
from mrbp.data import read_dataset

from conftest import CODES_DIR

HAMMING = str(CODES_DIR / "hamming_7_4.alist")


def test_parse_snrs():
    assert parse_snrs("1.0:4.0:0.5") == (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
    assert parse_snrs("2.5,3.0") == (2.5, 3.0)
    assert parse_snrs("3") == (3.0,)


def test_info(capsys):
    assert main(["info", "--code", HAMMING]) == 0
    out = capsys.readouterr().out
    assert "n=7 m=3 k=4" in out


def test_simulate_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    rc = main(["simulate", "--code", HAMMING, "--decoder", "mrbp", "--rule",
               "chmag", "--T", "3", "--l0", "10", "--l1", "10",
               "--snr", "2.0", "--target-errors", "5", "--max-frames", "2048",
               "--seed", "3", "--workers", "2", "--batch", "512",
               "--out", str(out)])
    assert rc == 0
    with open(out) as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 1 and int(rows[0]["frames"]) > 0
    assert "fer=" in capsys.readouterr().out


def test_simulate_json_echo(tmp_path):
    out = tmp_path / "r.json"
    main(["simulate", "--code", HAMMING, "--decoder", "bp", "--snr", "2.0,3.0",
          "--target-errors", "3", "--max-frames", "1024", "--seed", "1",
          "--out", str(out), "--format", "json"])
    doc = json.loads(out.read_text())
    assert doc["config"]["code"] == HAMMING
    assert len(doc["points"]) == 2


def test_gen_dataset_roundtrip(tmp_path, capsys):
    out = tmp_path / "d.ds"
    rc = main(["gen-dataset", "--code", HAMMING, "--snr-db", "2.0",
               "--count", "25", "--l0", "10", "--l1", "10", "--kind", "d2",
               "--seed", "4", "--workers", "2", "--out", str(out)])
    assert rc == 0
    header, records = read_dataset(out)
    assert header.count == 25 and len(records) == 25
    assert header.l0 == 10 and header.all_zero
    assert "wrote 25 records" in capsys.readouterr().out
