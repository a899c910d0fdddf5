"""Critical values: bundled tables, Monte Carlo simulation and the surface cache."""

from .cache import cached_surfaces, surface_cache_load, surface_cache_store
from .simulation import NullDgpSpec, monte_carlo_cv
from .tables import (
    LEVELS,
    CriticalValueSurface,
    Provenance,
    TestFamily,
    critical_values_for,
    lookup,
    lookup_surface,
    missing_levels,
)

__all__ = [
    "LEVELS",
    "CriticalValueSurface",
    "NullDgpSpec",
    "Provenance",
    "TestFamily",
    "cached_surfaces",
    "critical_values_for",
    "lookup",
    "lookup_surface",
    "missing_levels",
    "monte_carlo_cv",
    "surface_cache_load",
    "surface_cache_store",
]
