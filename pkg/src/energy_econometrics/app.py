"""FastAPI application factory."""

import logging
from contextlib import asynccontextmanager
from html import escape

from fastapi import FastAPI, Request, Response
from fastapi.responses import HTMLResponse, JSONResponse

from . import __version__
from .config import get_settings
from .errors import ConfigError, DataError, EconometricsError
from .routers import analysis, reports_api

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan with startup/shutdown hooks."""
    settings = get_settings()
    # Ensure reports directory exists (ignore permission errors for read-only mounts)
    try:
        settings.reports_dir.mkdir(parents=True, exist_ok=True)
    except PermissionError:
        logger.warning("cannot create reports directory %s", settings.reports_dir)
    yield


def error_status(exc: EconometricsError) -> int:
    """400 for configuration and data problems, 422 for numerical failures."""
    return 400 if isinstance(exc, (ConfigError, DataError)) else 422


ENDPOINTS = (
    ("/reports", "Stored reports"),
    ("/analysis/dataset", "Configured dataset"),
    ("/docs", "API documentation"),
)


def create_app() -> FastAPI:
    """Create and configure the FastAPI application."""
    app = FastAPI(
        title="Energy Econometrics",
        description="Unit-root, cointegration and DOLS reports for energy demand data",
        version=__version__,
        lifespan=lifespan,
    )

    # Register routers
    app.include_router(reports_api.router)
    app.include_router(analysis.router)

    @app.get("/", include_in_schema=False)
    async def index():
        """Landing page."""
        links = "\n".join(
            f'        <a href="{href}">{escape(label)} <code>{href}</code></a>' for href, label in ENDPOINTS
        )
        html = f"""<!DOCTYPE html>
<html lang="en">
<head>
    <meta charset="UTF-8">
    <title>Energy Econometrics</title>
    <style>
        body {{ font-family: -apple-system, BlinkMacSystemFont, 'Segoe UI', Roboto, sans-serif; margin: 3rem; }}
        .version {{ color: #64748b; }}
        a {{ display: block; padding: 0.25rem 0; color: #3b82f6; text-decoration: none; }}
    </style>
</head>
<body>
    <h1>Energy Econometrics</h1>
    <p class="version">v{__version__}</p>
    <div class="endpoints">
{links}
    </div>
</body>
</html>"""
        return HTMLResponse(content=html)

    @app.exception_handler(EconometricsError)
    async def econometrics_exception_handler(request: Request, exc: EconometricsError):
        """Library errors become 400/422 with the error class and field."""
        return JSONResponse(
            status_code=error_status(exc),
            content={
                "detail": str(exc),
                "error": type(exc).__name__,
                "field": getattr(exc, "field", None),
            },
        )

    @app.exception_handler(Exception)
    async def global_exception_handler(request: Request, exc: Exception):
        """Global exception handler."""
        logger.exception("unhandled error on %s", request.url.path)
        return Response(content=str(exc), media_type="text/plain", status_code=500)

    return app


# Application instance for uvicorn
app = create_app()
