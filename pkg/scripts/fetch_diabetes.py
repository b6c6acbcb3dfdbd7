#!/usr/bin/env python3
"""Fetch the diabetes dataset (n=442, p=10) and write tests/data/diabetes.csv.

The file is not bundled with the repository; this script obtains it from
the public source (or from scikit-learn's copy of the same data when the
network is unavailable) and converts it to the canonical CSV layout used
by the tests and the README examples:

    age,sex,bmi,map,tc,ldl,hdl,tch,ltg,glu,prog

Column names follow the naming convention common in the variable-selection
literature (map = blood pressure, tc..glu = the six serum measurements,
prog = disease progression one year after baseline).  The canonical CSV is
integrity-checked against a pinned SHA-256.
"""

from __future__ import annotations

import hashlib
import io
import pathlib
import sys
import urllib.request

URL = "https://web.stanford.edu/~hastie/Papers/LARS/diabetes.data"
NAMES = ["age", "sex", "bmi", "map", "tc", "ldl", "hdl", "tch", "ltg", "glu"]
CSV_SHA256 = "11c024c62abee49c81cbdf24b7dce85fd2d01e61d6c0cbea408369a721a96aff"
OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "diabetes.csv"


def rows_from_url() -> list[list[float]]:
    with urllib.request.urlopen(URL, timeout=30) as response:
        text = io.TextIOWrapper(response, encoding="utf-8").read()
    lines = [line for line in text.splitlines() if line.strip()]
    return [[float(cell) for cell in line.split()] for line in lines[1:]]


def rows_from_sklearn() -> list[list[float]]:
    from sklearn.datasets import load_diabetes

    bunch = load_diabetes(scaled=False)
    return [list(x) + [y] for x, y in zip(bunch.data, bunch.target)]


def to_csv(rows: list[list[float]]) -> str:
    lines = [",".join(NAMES + ["prog"])]
    for row in rows:
        lines.append(",".join("%.10g" % value for value in row))
    return "\n".join(lines) + "\n"


def main() -> int:
    try:
        rows = rows_from_url()
        source = URL
    except Exception as exc:
        print(f"download failed ({exc}); falling back to scikit-learn's copy")
        rows = rows_from_sklearn()
        source = "sklearn.datasets.load_diabetes"
    text = to_csv(rows)
    digest = hashlib.sha256(text.encode()).hexdigest()
    if digest != CSV_SHA256:
        print(f"integrity check FAILED: sha256 {digest} (expected {CSV_SHA256})")
        return 1
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(text)
    print(f"wrote {OUT} from {source} (sha256 verified)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
