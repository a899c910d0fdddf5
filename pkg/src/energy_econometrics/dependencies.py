"""FastAPI dependencies for configuration and stored reports."""

import re
from pathlib import Path
from typing import Annotated

from fastapi import Depends, HTTPException

from .config import Settings, get_settings

REPORT_NAME = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]{0,63}$")


def validate_report_name(name: str) -> bool:
    """Report names are single path components: letters, digits, ``_.-``."""
    return bool(REPORT_NAME.match(name)) and ".." not in name


def report_dir(name: str, settings: Annotated[Settings, Depends(get_settings)]) -> Path:
    """Directory of a stored report, 404 when it holds no JSON report."""
    if not validate_report_name(name):
        raise HTTPException(status_code=400, detail="Invalid report name format")
    path = settings.reports_dir / name
    if not (path / "report.json").is_file():
        raise HTTPException(status_code=404, detail=f"No report named {name}")
    return path


# Type aliases for dependency injection
AppSettings = Annotated[Settings, Depends(get_settings)]
ReportDir = Annotated[Path, Depends(report_dir)]
