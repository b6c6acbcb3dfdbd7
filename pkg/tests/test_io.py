"""CSV ingestion: happy paths, error reporting, standardization."""

from __future__ import annotations

import numpy as np
import pytest

from st2e.io import ConstantColumnWarning, MissingResponse, ParseError, ingest_csv
from st2e.linear_model import TooManyVariables, fit_ols


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestIngestCsv:
    def test_small_file(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,3\n4,5,6\n7,8,10\n")
        ds = ingest_csv(path, "y")
        assert (ds.n, ds.p) == (3, 2)
        assert ds.names == ("a", "b")
        np.testing.assert_array_equal(ds.response, [3.0, 6.0, 10.0])
        np.testing.assert_array_equal(ds.predictors[:, 1], [2.0, 5.0, 8.0])

    def test_response_position_irrelevant(self, tmp_path):
        path = write(tmp_path, "y,a,b\n3,1,2\n6,4,5\n")
        ds = ingest_csv(path, "y")
        assert ds.names == ("a", "b")
        np.testing.assert_array_equal(ds.response, [3.0, 6.0])

    def test_diabetes_shape(self, diabetes_csv):
        ds = ingest_csv(str(diabetes_csv), "prog")
        assert (ds.n, ds.p) == (442, 10)
        assert "bmi" in ds.names and "prog" not in ds.names

    def test_two_rows_load_then_model_core_rejects_fit(self, tmp_path):
        path = write(tmp_path, "a,b,c,y\n1,2,3,4\n5,6,7,8\n")
        ds = ingest_csv(path, "y")
        assert ds.n == 2
        with pytest.raises(TooManyVariables):
            fit_ols(ds, [0, 1, 2])

    def test_non_numeric_cell_named(self, tmp_path):
        path = write(tmp_path, "a,y\n1,2\nx7,3\n")
        with pytest.raises(ParseError, match=r"column 'a'.*'x7'"):
            ingest_csv(path, "y")

    def test_non_finite_cell_rejected(self, tmp_path):
        path = write(tmp_path, "a,y\n1,2\nnan,3\n")
        with pytest.raises(ParseError, match="non-finite"):
            ingest_csv(path, "y")

    def test_ragged_row_rejected(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,3\n4,5\n")
        with pytest.raises(ParseError, match="expected 3 fields"):
            ingest_csv(path, "y")

    def test_missing_response(self, tmp_path):
        path = write(tmp_path, "a,b\n1,2\n3,4\n")
        with pytest.raises(MissingResponse, match="'target'"):
            ingest_csv(path, "target")

    def test_empty_file(self, tmp_path):
        with pytest.raises(ParseError, match="empty"):
            ingest_csv(write(tmp_path, ""), "y")

    def test_header_only(self, tmp_path):
        with pytest.raises(ParseError, match="no data rows"):
            ingest_csv(write(tmp_path, "a,y\n"), "y")

    def test_constant_column_warns_but_loads(self, tmp_path):
        path = write(tmp_path, "a,b,y\n5,1,2\n5,2,3\n5,3,4\n")
        with pytest.warns(ConstantColumnWarning, match="'a'"):
            ds = ingest_csv(path, "y")
        assert ds.p == 2

    def test_standardize(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,10,5\n2,20,6\n3,60,10\n")
        ds = ingest_csv(path, "y", standardize=True)
        np.testing.assert_allclose(ds.predictors.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(ds.predictors.std(axis=0, ddof=1), 1.0, rtol=1e-12)
        assert abs(float(ds.response.mean())) < 1e-12

    def test_standardize_keeps_constant_column_centered_only(self, tmp_path):
        path = write(tmp_path, "a,b,y\n5,1,2\n5,2,3\n5,3,4\n")
        with pytest.warns(ConstantColumnWarning):
            ds = ingest_csv(path, "y", standardize=True)
        np.testing.assert_array_equal(ds.predictors[:, 0], [0.0, 0.0, 0.0])
