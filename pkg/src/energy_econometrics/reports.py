"""Analysis reports: the versioned JSON model and its text and CSV renderings.

Identical reports render to identical bytes in every format; nothing here
reads the clock.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, Literal

import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from .errors import IoFailure, SchemaMismatch

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

ReportFormat = Literal["text", "json", "csv_bundle"]

TABLES = ("unit_root", "breaks", "lag_selection", "johansen", "dols", "errors")


class ReportProvenance(BaseModel):
    data_sha256: str
    config_sha256: str
    seed: int
    version: str
    data_file: str
    matches_published_vintage: bool | None = None


class StageError(BaseModel):
    stage: str
    target: str
    error: str
    message: str


class AnalysisReport(BaseModel):
    """Everything one pipeline run produced, in configuration order."""

    schema_version: int = SCHEMA_VERSION
    name: str
    provenance: ReportProvenance
    dataset: dict[str, Any]
    unit_root: list[dict[str, Any]] = Field(default_factory=list)
    breaks: list[dict[str, Any]] = Field(default_factory=list)
    lag_selection: list[dict[str, Any]] = Field(default_factory=list)
    johansen: list[dict[str, Any]] = Field(default_factory=list)
    dols: list[dict[str, Any]] = Field(default_factory=list)
    errors: list[StageError] = Field(default_factory=list)

    def failed(self, stage: str | None = None) -> list[StageError]:
        return [e for e in self.errors if stage is None or e.stage == stage]

    def table(self, name: str) -> list[dict[str, Any]]:
        """Flat rows of one table, as written to the CSV bundle."""
        if name not in TABLES:
            raise KeyError(f"unknown table {name!r}; have {TABLES}")
        return _FLATTENERS[name](self)


def finite(value: Any) -> Any:
    """Recursively replace NaN and infinities with ``None``."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [finite(v) for v in value]
    return value


# ============== Flat tables ==============


def _unit_root_rows(report: AnalysisReport) -> list[dict[str, Any]]:
    rows = []
    for entry in report.unit_root:
        cv = entry.get("critical_values", {})
        rows.append(
            {
                "test": entry["test"],
                "series": entry["series"],
                "spec": entry["spec_key"],
                "statistic": entry["statistic"],
                "lags": entry["chosen_lags"],
                "bandwidth": entry.get("bandwidth"),
                "nobs": entry["nobs"],
                "breaks": " ".join(str(b["year"]) for b in entry.get("breaks", [])),
                "cv_90": cv.get("0.90"),
                "cv_95": cv.get("0.95"),
                "cv_99": cv.get("0.99"),
                "cv_source": entry.get("cv_source"),
                "decision": entry["decision"],
            }
        )
    return rows


def _break_rows(report: AnalysisReport) -> list[dict[str, Any]]:
    return [dict(entry) | {"breaks": " ".join(str(y) for y in entry["breaks"])} for entry in report.breaks]


def _lag_rows(report: AnalysisReport) -> list[dict[str, Any]]:
    rows = []
    for entry in report.lag_selection:
        for row in entry["rows"]:
            rows.append({"configuration": entry["configuration"], **row, "chosen": entry["used"] == row["lag_order"]})
    return rows


def _johansen_rows(report: AnalysisReport) -> list[dict[str, Any]]:
    rows = []
    for entry in report.johansen:
        outcome = entry["outcome"]
        for r, eigenvalue in enumerate(outcome["eigenvalues"]):
            trace_cv = outcome["trace_critical_values"][r]
            rows.append(
                {
                    "configuration": entry["configuration"],
                    "hypothesis": f"r<={r}",
                    "eigenvalue": eigenvalue,
                    "trace": outcome["trace_stats"][r],
                    "trace_cv_90": trace_cv.get("0.90"),
                    "trace_cv_95": trace_cv.get("0.95"),
                    "trace_cv_99": trace_cv.get("0.99"),
                    "trace_decision": outcome["trace_decisions"][r],
                    "max_eigen": outcome["max_eigen_stats"][r],
                    "max_eigen_decision": outcome["max_eigen_decisions"][r],
                    "lags": outcome["lag_order"],
                    "decided_rank": outcome["decided_rank"],
                }
            )
    return rows


def _dols_rows(report: AnalysisReport) -> list[dict[str, Any]]:
    rows = []
    for entry in report.dols:
        for coefficient in entry["fit"]["coefficients"]:
            rows.append({"model": entry["fit"]["model"], **coefficient})
    return rows


def _error_rows(report: AnalysisReport) -> list[dict[str, Any]]:
    return [e.model_dump() for e in report.errors]


_FLATTENERS = {
    "unit_root": _unit_root_rows,
    "breaks": _break_rows,
    "lag_selection": _lag_rows,
    "johansen": _johansen_rows,
    "dols": _dols_rows,
    "errors": _error_rows,
}


# ============== Text rendering ==============


def _cell(value: Any, digits: int = 4) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    return str(value)


class TextTable:
    """Fixed-width table builder."""

    def __init__(self, title: str):
        self.title = title
        self._header: list[str] = []
        self._rows: list[list[str]] = []
        self._notes: list[str] = []

    def add_header(self, *names: str) -> TextTable:
        """Set the column headings."""
        self._header = list(names)
        return self

    def add_row(self, *cells: Any, digits: int = 4) -> TextTable:
        self._rows.append([_cell(c, digits) for c in cells])
        return self

    def add_note(self, note: str) -> TextTable:
        self._notes.append(note)
        return self

    def build(self) -> str:
        """Build the table text."""
        lines = [self.title, "=" * len(self.title)]
        grid = [self._header, *self._rows] if self._header else self._rows
        if grid:
            widths = [max(len(row[i]) for row in grid if i < len(row)) for i in range(max(len(r) for r in grid))]

            def fmt(row: Sequence[str]) -> str:
                first = row[0].ljust(widths[0])
                rest = [cell.rjust(widths[i + 1]) for i, cell in enumerate(row[1:])]
                return "  ".join([first, *rest]).rstrip()

            if self._header:
                lines.append(fmt(self._header))
                lines.append("-" * sum(widths[i] + (2 if i else 0) for i in range(len(widths))))
            lines.extend(fmt(row) for row in self._rows)
        lines.extend(self._notes)
        return "\n".join(lines) + "\n"


def _unit_root_table(report: AnalysisReport) -> TextTable:
    table = TextTable("Unit root tests").add_header(
        "Series", "Test", "Spec", "Stat", "Lags", "Breaks", "CV 90%", "CV 95%", "CV 99%", "Decision"
    )
    for row in _unit_root_rows(report):
        table.add_row(
            row["series"],
            row["test"],
            row["spec"],
            row["statistic"],
            row["lags"] if row["bandwidth"] is None else f"bw {row['bandwidth']}",
            row["breaks"] or None,
            row["cv_90"],
            row["cv_95"],
            row["cv_99"],
            row["decision"],
            digits=3,
        )
    return table


def _break_table(report: AnalysisReport) -> TextTable:
    table = TextTable("Structural breaks").add_header("Series", "Test", "Breaks", "t", "Dummy", "Coef", "t(dummy)")
    for entry in report.breaks:
        dummies = entry.get("dummies") or [None]
        for i, dummy in enumerate(dummies):
            if i == 0:
                head = (entry["series"], entry["test"], " ".join(map(str, entry["breaks"])), entry["statistic"])
            else:
                head = ("", "", "", None)
            if dummy is None:
                table.add_row(*head, None, None, None, digits=3)
            else:
                t_stat = f"{dummy['t_stat']:.3f}{dummy['stars']}"
                table.add_row(*head, dummy["name"], dummy["coefficient"], t_stat, digits=3)
    return table


def _lag_table(report: AnalysisReport) -> list[TextTable]:
    tables = []
    for entry in report.lag_selection:
        table = TextTable(f"VAR lag selection: {entry['configuration']}")
        table.add_header("Lags", "log|S|", "AIC", "SIC", "HQ")
        for row in entry["rows"]:
            table.add_row(str(row["lag_order"]), row["log_det"], row["aic"], row["sic"], row["hq"])
        chosen = ", ".join(f"{k.upper()} {v}" for k, v in entry["chosen"].items())
        table.add_note(f"Chosen: {chosen}; used {entry['used']}")
        tables.append(table)
    return tables


def _johansen_table(report: AnalysisReport) -> list[TextTable]:
    tables = []
    for entry in report.johansen:
        outcome = entry["outcome"]
        breaks = ", ".join(map(str, outcome["break_years"])) or "none"
        table = TextTable(f"Johansen cointegration: {entry['configuration']} (breaks {breaks})").add_header(
            "Hypothesis", "Eigenvalue", "Trace", "CV 90%", "CV 95%", "CV 99%", "Conclusion", "Max-eigen"
        )
        for r, eigenvalue in enumerate(outcome["eigenvalues"]):
            cv = outcome["trace_critical_values"][r]
            table.add_row(
                f"r<={r}",
                eigenvalue,
                outcome["trace_stats"][r],
                cv.get("0.90"),
                cv.get("0.95"),
                cv.get("0.99"),
                outcome["trace_decisions"][r],
                outcome["max_eigen_stats"][r],
                digits=2,
            )
        rank = outcome["decided_rank"]
        table.add_note(
            f"Lags {outcome['lag_order']}, T={outcome['nobs']}, rank at {outcome['level']:.0%}: "
            f"{'undecided' if rank is None else rank}"
        )
        tables.append(table)
    return tables


def _dols_table(report: AnalysisReport) -> list[TextTable]:
    tables = []
    for entry in report.dols:
        fit = entry["fit"]
        table = TextTable(f"DOLS {fit['model']}: {fit['response']} {fit['sample'][0]}-{fit['sample'][1]}").add_header(
            "Variable", "Coefficient"
        )
        for coefficient in fit["coefficients"]:
            if coefficient["role"] == "nuisance":
                continue
            table.add_row(coefficient["name"], f"{_cell(coefficient['coefficient'])}{coefficient['stars']}")
            se = coefficient["standard_error"]
            table.add_row("", "[-]" if se is None else f"[{se:.6f}]")
        table.add_note(
            f"R2 {_cell(fit['r2'])}, adj. R2 {_cell(fit['r2_adjusted'])}, S.E. {_cell(fit['regression_se'])}, "
            f"long-run variance {_cell(fit['long_run_variance'], 6)} (bandwidth {fit['bandwidth']}), "
            f"Jarque-Bera {_cell(fit['jarque_bera'], 3)} (p {_cell(fit['jarque_bera_p_value'], 3)})"
        )
        table.add_note("Standard errors in brackets. * p<0.10, ** p<0.05, *** p<0.01")
        for elasticity in entry["elasticities"]:
            table.add_note(
                f"  {elasticity['label']}: {elasticity['classification']}, {elasticity['direction']} "
                f"({_cell(elasticity['coefficient'])})"
            )
        tables.append(table)
    return tables


def render_text(report: AnalysisReport) -> str:
    provenance = report.provenance
    dataset = report.dataset
    header = (
        TextTable(f"Analysis {report.name}")
        .add_note(f"Data: {provenance.data_file} sha256 {provenance.data_sha256}")
        .add_note(f"Config sha256 {provenance.config_sha256}, seed {provenance.seed}, version {provenance.version}")
        .add_note(
            f"Sample {dataset['start_year']}-{dataset['end_year']} ({dataset['nobs']} years), "
            f"series {', '.join(dataset['series'])}"
        )
    )
    if provenance.matches_published_vintage is False:
        header.add_note("Snapshot is a reconstruction; figures may drift from the published vintage.")
    tables: list[TextTable] = [header]
    if report.unit_root:
        tables.append(_unit_root_table(report))
    if report.breaks:
        tables.append(_break_table(report))
    tables += _lag_table(report) + _johansen_table(report) + _dols_table(report)
    if report.errors:
        errors = TextTable("Stage failures").add_header("Stage", "Target", "Error", "Message")
        for e in report.errors:
            errors.add_row(e.stage, e.target, e.error, e.message)
        tables.append(errors)
    return "\n".join(t.build() for t in tables)


# ============== Emitting and loading ==============


def _float_text(value: float) -> str:
    """17 significant digits, always written as a JSON float."""
    if not math.isfinite(value):
        raise ValueError(f"out of range float value {value!r}")
    text = format(value, ".17g")
    return text if any(c in text for c in ".en") else f"{text}.0"


class _ReportEncoder(json.JSONEncoder):
    """Standard encoder with every float written through :func:`_float_text`."""

    def iterencode(self, o: Any, _one_shot: bool = False):
        indent = " " * self.indent if isinstance(self.indent, int) else self.indent
        encode_string = json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring
        iterencode = json.encoder._make_iterencode(
            {} if self.check_circular else None,
            self.default,
            encode_string,
            indent,
            _float_text,
            self.key_separator,
            self.item_separator,
            self.sort_keys,
            self.skipkeys,
            _one_shot,
        )
        return iterencode(o, 0)


def report_json(report: AnalysisReport) -> str:
    return json.dumps(finite(report.model_dump(mode="json")), indent=2, cls=_ReportEncoder) + "\n"


def _write(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    logger.info("Wrote %s", path)
    return path


def _write_csv(path: Path, rows: Iterable[dict[str, Any]]) -> Path:
    rows = list(rows)
    frame = pd.DataFrame(rows) if rows else pd.DataFrame()
    return _write(path, frame.to_csv(index=False, lineterminator="\n", float_format=None))


def emit_report(report: AnalysisReport, fmt: ReportFormat, out_dir: Path | str) -> list[Path]:
    """Write ``report`` under ``out_dir`` in one format and return the files."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out_dir}: {exc}") from exc
    if fmt == "json":
        return [_write(out_dir / "report.json", report_json(report))]
    if fmt == "text":
        return [_write(out_dir / "report.txt", render_text(report))]
    if fmt == "csv_bundle":
        return [_write_csv(out_dir / f"{name}.csv", report.table(name)) for name in TABLES]
    raise ValueError(f"unknown report format {fmt!r}")


def load_report(path: Path | str) -> AnalysisReport:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path} is not JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(f"{path} is not a version {SCHEMA_VERSION} report")
    try:
        return AnalysisReport.model_validate(doc)
    except ValidationError as exc:
        raise SchemaMismatch(f"{path}: {exc}") from exc
