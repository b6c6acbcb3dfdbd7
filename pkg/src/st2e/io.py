"""CSV ingestion for user-supplied datasets."""

from __future__ import annotations

import csv
import math
import warnings

import numpy as np

from .linear_model import Dataset


class ParseError(Exception):
    """A cell or row of the input file could not be parsed."""


class MissingResponse(Exception):
    """The named response column is absent from the header."""


class ConstantColumnWarning(UserWarning):
    """A predictor column is constant; it is kept but flagged."""


def ingest_csv(path: str, response: str, standardize: bool = False) -> Dataset:
    """Load a headered, all-numeric CSV file into a Dataset.

    Every non-response column becomes a predictor, in file order.  With
    ``standardize`` the predictors are centered and scaled to unit sample
    variance and the response is centered (constant columns are left on
    their original scale).  Parse failures report the offending row and
    column; constant predictors raise ConstantColumnWarning but load.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = [cell.strip() for cell in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: file is empty") from None
        if response not in header:
            raise MissingResponse(
                f"{path}: no column named {response!r} (header: {', '.join(header)})"
            )
        rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}:{line_no}: expected {len(header)} fields, found {len(row)}"
                )
            values = []
            for name, cell in zip(header, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}:{line_no}: column {name!r}: "
                        f"{cell.strip()!r} is not a number"
                    ) from None
                if not math.isfinite(value):
                    raise ParseError(
                        f"{path}:{line_no}: column {name!r}: non-finite value {cell.strip()!r}"
                    )
                values.append(value)
            rows.append(values)
    if not rows:
        raise ParseError(f"{path}: no data rows after the header")
    table = np.array(rows, dtype=np.float64)
    response_index = header.index(response)
    y = table[:, response_index]
    x = np.delete(table, response_index, axis=1)
    names = tuple(name for j, name in enumerate(header) if j != response_index)
    constant = np.all(x == x[0, :], axis=0)
    for name in (n for n, flag in zip(names, constant) if flag):
        warnings.warn(f"predictor column {name!r} is constant", ConstantColumnWarning)
    if standardize:
        x = x - x.mean(axis=0)
        scale = x.std(axis=0, ddof=1)
        scale[scale == 0.0] = 1.0
        x = x / scale
        y = y - y.mean()
    return Dataset(predictors=x, response=y, names=names)
