#!/usr/bin/env python3
"""Regenerate the frozen coefficient file for the large-p scenario.

The scenario fixes 120 regression coefficients once and for all: the first
60 are drawn from N(3, variance 0.5), the rest are zero.  This script
re-creates src/st2e/data/largep120_coefficients.txt bit for bit from a
hard-coded seed.  It only needs to be run if the file is lost; the shipped
copy is the source of truth and its SHA-256 is pinned in the test suite.
"""

from __future__ import annotations

import hashlib
import math
import pathlib

import numpy as np

SEED = 31226
OUT = (
    pathlib.Path(__file__).resolve().parents[1]
    / "src"
    / "st2e"
    / "data"
    / "largep120_coefficients.txt"
)


def main() -> None:
    rng = np.random.default_rng(SEED)
    beta = np.zeros(120)
    beta[:60] = 3.0 + math.sqrt(0.5) * rng.standard_normal(60)
    text = "".join(f"{value:.17g}\n" for value in beta)
    OUT.write_text(text)
    digest = hashlib.sha256(text.encode()).hexdigest()
    print(f"wrote {OUT} (sha256 {digest})")


if __name__ == "__main__":
    main()
