"""FastAPI routers for stored reports and analysis runs."""
