import json
import math

import pandas as pd
import pytest

from energy_econometrics.errors import SchemaMismatch
from energy_econometrics.reports import (
    TABLES,
    AnalysisReport,
    ReportProvenance,
    StageError,
    TextTable,
    emit_report,
    finite,
    load_report,
    render_text,
    report_json,
)


def _report(**overrides) -> AnalysisReport:
    fields = dict(
        name="demo",
        provenance=ReportProvenance(
            data_sha256="a" * 64,
            config_sha256="b" * 64,
            seed=1,
            version="2026.10.18",
            data_file="data.csv",
            matches_published_vintage=False,
        ),
        dataset={"start_year": 1970, "end_year": 2015, "nobs": 46, "series": ["lnE"], "log": True},
        unit_root=[
            {
                "test": "adf",
                "series": "lnE",
                "spec_key": "c",
                "statistic": -1.25,
                "chosen_lags": 1,
                "nobs": 44,
                "breaks": [],
                "critical_values": {"0.90": -2.6, "0.95": -2.93, "0.99": -3.58},
                "cv_source": "Dickey-Fuller response surface",
                "decision": "accept_unit_root",
                "bandwidth": None,
            }
        ],
        dols=[
            {
                "fit": {
                    "model": "model-1",
                    "response": "lnE",
                    "sample": [1972, 2015],
                    "coefficients": [
                        {"name": "lnY", "role": "long_run", "coefficient": 0.61, "standard_error": 0.05, "stars": "***"},
                        {"name": "D.lnY", "role": "nuisance", "coefficient": 0.1, "standard_error": 0.2, "stars": ""},
                    ],
                    "r2": 0.99,
                    "r2_adjusted": 0.98,
                    "regression_se": 0.02,
                    "long_run_variance": 0.0003,
                    "bandwidth": 3,
                    "jarque_bera": 1.2,
                    "jarque_bera_p_value": 0.55,
                },
                "elasticities": [
                    {"label": "income", "classification": "inelastic", "direction": "direct", "coefficient": 0.61}
                ],
            }
        ],
        errors=[StageError(stage="dols", target="model-2", error="RankDeficient", message="collinear")],
    )
    fields.update(overrides)
    return AnalysisReport(**fields)


def test_finite_replaces_nan_and_infinity():
    assert finite({"a": [1.0, math.nan], "b": (math.inf, "x")}) == {"a": [1.0, None], "b": [None, "x"]}


def test_json_round_trip(tmp_path):
    report = _report()
    (path,) = emit_report(report, "json", tmp_path)
    assert path.name == "report.json"
    assert load_report(path) == report
    assert path.read_text() == report_json(report)
    assert json.loads(path.read_text())["schema_version"] == 1


def test_json_writes_null_for_nan(tmp_path):
    report = _report(dataset={"start_year": 1970, "value": math.nan})
    doc = json.loads(report_json(report))
    assert doc["dataset"]["value"] is None


def test_json_floats_carry_seventeen_significant_digits():
    report = _report(dataset={"start_year": 1970, "share": 0.1, "scale": 2.0, "drift": -0.25})
    text = report_json(report)
    assert '"share": 0.10000000000000001' in text
    assert '"scale": 2.0' in text
    assert '"drift": -0.25' in text
    assert '"start_year": 1970,' in text
    doc = json.loads(text)
    assert doc["dataset"]["share"] == 0.1
    assert isinstance(doc["dataset"]["scale"], float)


def test_csv_bundle_writes_one_file_per_table(tmp_path):
    written = emit_report(_report(), "csv_bundle", tmp_path)
    assert [p.name for p in written] == [f"{name}.csv" for name in TABLES]
    unit_root = pd.read_csv(tmp_path / "unit_root.csv")
    assert unit_root.loc[0, "cv_95"] == -2.93
    assert unit_root.loc[0, "decision"] == "accept_unit_root"
    errors = pd.read_csv(tmp_path / "errors.csv")
    assert errors.loc[0, "target"] == "model-2"
    assert (tmp_path / "johansen.csv").is_file()


def test_text_rendering():
    text = render_text(_report())
    assert "Analysis demo" in text
    assert "reconstruction" in text
    assert "0.6100***" in text
    assert "[0.050000]" in text
    assert "D.lnY" not in text
    assert "income: inelastic, direct" in text
    assert "Stage failures" in text


def test_table_lookup():
    report = _report()
    assert report.table("dols")[1]["name"] == "D.lnY"
    with pytest.raises(KeyError):
        report.table("forecasts")
    assert report.failed("dols")[0].error == "RankDeficient"
    assert report.failed("unit_root") == []


def test_text_table_alignment():
    text = TextTable("T").add_header("Name", "Value").add_row("a", 1.5).add_row("long", None).add_note("n").build()
    lines = text.splitlines()
    assert lines[:2] == ["T", "="]
    assert lines[2] == "Name   Value"
    assert lines[4] == "a     1.5000"
    assert lines[5] == "long       -"
    assert lines[-1] == "n"


def test_load_rejects_other_documents(tmp_path):
    path = tmp_path / "report.json"
    path.write_text('{"schema_version": 2}')
    with pytest.raises(SchemaMismatch):
        load_report(path)
    path.write_text("not json")
    with pytest.raises(SchemaMismatch):
        load_report(path)


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        emit_report(_report(), "xlsx", tmp_path)
