"""Reports API router: read-only access to stored analysis reports."""

from datetime import datetime
from pathlib import Path

from fastapi import APIRouter, HTTPException, Query
from fastapi.responses import FileResponse, JSONResponse

from ..dependencies import AppSettings, ReportDir
from ..errors import EconometricsError
from ..reports import TABLES, finite, load_report

router = APIRouter(prefix="/reports", tags=["reports-api"])

DOWNLOADS = {"report.json", "report.txt", *(f"{table}.csv" for table in TABLES)}


def get_file_info(path: Path) -> dict:
    """Get file metadata."""
    stat = path.stat()
    return {
        "size": stat.st_size,
        "modified": datetime.fromtimestamp(stat.st_mtime).isoformat(),
    }


def _load(directory: Path):
    try:
        return load_report(directory / "report.json")
    except EconometricsError as e:
        raise HTTPException(status_code=500, detail=f"Error reading report: {e}")


@router.get("")
async def list_reports(settings: AppSettings) -> JSONResponse:
    """List stored reports with their provenance."""
    reports = []
    reports_dir = settings.reports_dir
    if reports_dir.is_dir():
        for report_file in sorted(reports_dir.glob("*/report.json")):
            try:
                report = load_report(report_file)
            except EconometricsError:
                # Not ours or from another schema version
                continue
            reports.append({
                "name": report_file.parent.name,
                "analysis": report.name,
                "data_sha256": report.provenance.data_sha256,
                "version": report.provenance.version,
                "errors": len(report.errors),
                "files": sorted(p.name for p in report_file.parent.iterdir() if p.name in DOWNLOADS),
                **get_file_info(report_file),
            })

    return JSONResponse({
        "count": len(reports),
        "reports": reports,
    })


@router.get("/{name}")
async def get_report(name: str, directory: ReportDir) -> JSONResponse:
    """The full JSON report."""
    report = _load(directory)
    return JSONResponse(finite(report.model_dump(mode="json")))


@router.get("/{name}/tables/{table}")
async def get_table(
    name: str,
    table: str,
    directory: ReportDir,
    limit: int = Query(default=500, ge=1, le=5000),
    offset: int = Query(default=0, ge=0),
) -> JSONResponse:
    """One flat table of a report, as in its CSV bundle."""
    if table not in TABLES:
        raise HTTPException(status_code=404, detail=f"Unknown table {table}; have {', '.join(TABLES)}")
    rows = _load(directory).table(table)
    return JSONResponse({
        "report": name,
        "table": table,
        "total": len(rows),
        "offset": offset,
        "limit": limit,
        "rows": finite(rows[offset:offset + limit]),
    })


@router.get("/{name}/files/{filename}")
async def download_report_file(name: str, filename: str, directory: ReportDir) -> FileResponse:
    """Download one emitted file (text report, JSON or a CSV table)."""
    if filename not in DOWNLOADS:
        raise HTTPException(status_code=400, detail="Invalid filename format")
    path = directory / filename
    if not path.is_file():
        raise HTTPException(status_code=404, detail=f"{name} has no {filename}")
    media_type = {".json": "application/json", ".txt": "text/plain", ".csv": "text/csv"}[path.suffix]
    return FileResponse(path=path, filename=f"{name}-{filename}", media_type=media_type)
