#!/usr/bin/env python3
"""Fetch the UCI benchmark tables and convert them to the canonical CSVs
used by the experiment configs and the acceptance suite.

Produces, under data/:
  ionosphere.csv  351 rows, 34 real features, label in {g, b}; positive = b (126)
  yeast.csv       1484 rows, 8 real features, 10 protein-site labels;
                  positive = ME3 (163) or MIT (244) depending on the experiment
  vowel.csv       990 rows, 13 features (3 integer context + 10 real),
                  label in {0..10}; positive = 0 (90)

Needs network access to archive.ics.uci.edu. The conversion is purely
mechanical: no rows are dropped, no values are altered; multi-class
sources are binarized at load time by the configured positive label, not
here.
"""

import csv
import io
import sys
import urllib.request
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"
DATA_DIR = Path(__file__).resolve().parent.parent / "data"

SOURCES = {
    "ionosphere": f"{BASE}/ionosphere/ionosphere.data",
    "yeast": f"{BASE}/yeast/yeast.data",
    "vowel": f"{BASE}/undocumented/connectionist-bench/vowel/vowel-context.data",
}


def fetch(url: str) -> str:
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read().decode("utf-8")


def convert_ionosphere(raw: str) -> list[list[str]]:
    rows = [["f%d" % i for i in range(34)] + ["label"]]
    for line in raw.splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        assert len(parts) == 35, f"unexpected ionosphere row: {line!r}"
        rows.append(parts)
    return rows


def convert_yeast(raw: str) -> list[list[str]]:
    # Whitespace-separated: sequence name, 8 measurements, localization site.
    # The sequence name is an identifier, not a feature; it is dropped.
    header = ["mcg", "gvh", "alm", "mit", "erl", "pox", "vac", "nuc", "label"]
    rows = [header]
    for line in raw.splitlines():
        parts = line.split()
        if not parts:
            continue
        assert len(parts) == 10, f"unexpected yeast row: {line!r}"
        rows.append(parts[1:])
    return rows


def convert_vowel(raw: str) -> list[list[str]]:
    # Columns: train/test flag, speaker, sex, 10 LPC features, class 0..10.
    # The three context columns are kept as integer features (13 total).
    header = ["tt", "speaker", "sex"] + ["f%d" % i for i in range(10)] + ["label"]
    rows = [header]
    for line in raw.splitlines():
        parts = line.split()
        if not parts:
            continue
        assert len(parts) == 14, f"unexpected vowel row: {line!r}"
        rows.append(parts)
    return rows


def write_csv(name: str, rows: list[list[str]]) -> Path:
    path = DATA_DIR / f"{name}.csv"
    with open(path, "w", newline="") as f:
        csv.writer(f, lineterminator="\n").writerows(rows)
    return path


def check(name: str, rows: list[list[str]], total: int, checks: dict[str, int]) -> None:
    body = rows[1:]
    assert len(body) == total, f"{name}: expected {total} rows, got {len(body)}"
    label_idx = len(rows[0]) - 1
    for label, count in checks.items():
        got = sum(1 for r in body if r[label_idx] == label)
        assert got == count, f"{name}: expected {count} rows labeled {label!r}, got {got}"
    print(f"  {name}: {total} rows, " + ", ".join(f"{v} x {k!r}" for k, v in checks.items()))


def main() -> int:
    DATA_DIR.mkdir(exist_ok=True)
    converters = {
        "ionosphere": (convert_ionosphere, 351, {"b": 126, "g": 225}),
        "yeast": (convert_yeast, 1484, {"ME3": 163, "MIT": 244}),
        "vowel": (convert_vowel, 990, {"0": 90}),
    }
    for name, (convert, total, checks) in converters.items():
        try:
            raw = fetch(SOURCES[name])
        except Exception as e:  # noqa: BLE001
            print(f"error: could not fetch {name}: {e}", file=sys.stderr)
            return 1
        rows = convert(raw)
        check(name, rows, total, checks)
        path = write_csv(name, rows)
        print(f"  wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
