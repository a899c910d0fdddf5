"""Analysis router: run the configured pipeline and inspect its data."""

import logging
from pathlib import Path

from fastapi import APIRouter, HTTPException
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..config import AnalysisConfig, Settings, bundled_config_path, load_analysis_config
from ..dependencies import AppSettings, validate_report_name
from ..ingest import ingest_csv
from ..pipeline import run_analysis, write_report
from ..reports import ReportFormat

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/analysis", tags=["analysis"])


class RunRequest(BaseModel):
    # Stored under reports-dir/<name>; defaults to the config's name
    name: str | None = None
    formats: list[ReportFormat] | None = None


def _config(settings: Settings) -> AnalysisConfig:
    return load_analysis_config(settings.analysis_config or bundled_config_path())


def _run(settings: Settings, request: RunRequest) -> dict:
    config = _config(settings)
    name = request.name or config.name
    if not validate_report_name(name):
        raise HTTPException(status_code=400, detail="Invalid report name format")
    report = run_analysis(config, cache_dir=settings.cache_dir, workers=settings.workers)
    formats = request.formats or sorted({"json", *config.output.formats})
    written = write_report(report, formats, settings.reports_dir / name)
    logger.info("Stored report %s (%d files)", name, len(written))
    return {
        "name": name,
        "files": [p.name for p in written],
        "errors": [e.model_dump() for e in report.errors],
        "provenance": report.provenance.model_dump(),
    }


@router.post("/run")
async def run(settings: AppSettings, request: RunRequest | None = None) -> JSONResponse:
    """Run the configured analysis and store its report."""
    result = await run_in_threadpool(_run, settings, request or RunRequest())
    return JSONResponse(result, status_code=201)


@router.get("/dataset")
async def dataset(settings: AppSettings) -> JSONResponse:
    """Summary of the configured data file."""
    config = _config(settings)
    data = ingest_csv(config.data.path, config.data.columns)
    return JSONResponse({
        "file": Path(data.source).name,
        "sha256": data.sha256,
        "start_year": data.start_year,
        "end_year": data.end_year,
        "series": [
            {"name": name, "column": config.data.columns[name], "nobs": data[name].nobs}
            for name in data
        ],
    })
