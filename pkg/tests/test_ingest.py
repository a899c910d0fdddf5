import pytest

from energy_econometrics.errors import GapInYears, IoFailure, SchemaError
from energy_econometrics.ingest import file_sha256, ingest_csv

from .conftest import SNAPSHOT, SNAPSHOT_SHA256

COLUMNS = {"E": "energy_pc", "Y": "gdp_pc", "I": "industry", "P": "oil_price"}


def _csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_snapshot_ingests_with_checksum():
    data = ingest_csv(SNAPSHOT, COLUMNS)
    assert data.sha256 == SNAPSHOT_SHA256
    assert file_sha256(SNAPSHOT) == SNAPSHOT_SHA256
    assert (data.start_year, data.end_year) == (1970, 2015)
    assert sorted(data) == ["E", "I", "P", "Y"]
    assert data["E"].nobs == 46
    assert data["E"].value_at(1970) == 209.0
    assert data["P"].value_at(2015) == 52.39
    assert data["P"].value_at(2009) == 61.67
    assert all(data["P"].values > 0)


def test_without_schema_every_column_is_a_series(tmp_path):
    path = _csv(tmp_path, "year,a,b\n2000,1,2\n2001,3,4\n")
    data = ingest_csv(path)
    assert sorted(data) == ["a", "b"]
    assert list(data["b"].values) == [2.0, 4.0]


def test_gap_in_years(tmp_path):
    path = _csv(tmp_path, "year,a\n1997,1\n1998,2\n2000,3\n")
    with pytest.raises(GapInYears) as info:
        ingest_csv(path)
    assert info.value.year == 1999


def test_duplicate_year_names_both_lines(tmp_path):
    path = _csv(tmp_path, "year,a\n1997,1\n1998,2\n1998,2\n")
    with pytest.raises(SchemaError) as info:
        ingest_csv(path)
    assert info.value.row == 4
    assert "line 3" in str(info.value)


def test_non_numeric_cell_reports_row_and_column(tmp_path):
    path = _csv(tmp_path, "year,a,b\n2000,1,2\n2001,x,4\n")
    with pytest.raises(SchemaError) as info:
        ingest_csv(path)
    assert info.value.row == 3
    assert info.value.column == "a"


def test_empty_cell_is_rejected(tmp_path):
    path = _csv(tmp_path, "year,a\n2000,1\n2001,\n")
    with pytest.raises(SchemaError) as info:
        ingest_csv(path)
    assert info.value.row == 3


def test_decreasing_years(tmp_path):
    path = _csv(tmp_path, "year,a\n2001,1\n2000,2\n")
    with pytest.raises(SchemaError):
        ingest_csv(path)


def test_missing_columns_and_files(tmp_path):
    path = _csv(tmp_path, "year,a\n2000,1\n")
    with pytest.raises(SchemaError) as info:
        ingest_csv(path, {"E": "energy_pc"})
    assert info.value.row == 1
    with pytest.raises(SchemaError):
        ingest_csv(_csv(tmp_path, "a,b\n1,2\n", "noyear.csv"))
    with pytest.raises(IoFailure):
        ingest_csv(tmp_path / "absent.csv")
