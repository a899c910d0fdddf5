"""Critical-value surfaces and the bundled lookup tables."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path

import yaml

from ..errors import NotTabulated

logger = logging.getLogger(__name__)

LEVELS = (0.90, 0.95, 0.99)

# Asymptotic tables serve samples of at least this size, with a warning below
# SHORT_SAMPLE_WARNING.
MIN_ASYMPTOTIC_NOBS = 30
SHORT_SAMPLE_WARNING = 50

# Largest per-break distance between a requested and a tabulated fraction.
FRACTION_TOLERANCE = 0.05

# Largest relative distance between a requested and a simulated sample size.
SAMPLE_SIZE_TOLERANCE = 0.2


class TestFamily(str, Enum):
    ADF = "adf"
    PP = "pp"
    PERRON_AO = "perron_ao"
    PERRON_IO = "perron_io"
    ZIVOT_ANDREWS = "zivot_andrews"
    LUMSDAINE_PAPELL = "lumsdaine_papell"
    CLEMENTE_IO = "clemente_io"
    CLEMENTE_AO = "clemente_ao"
    JOHANSEN_TRACE = "johansen_trace"
    JOHANSEN_MAX = "johansen_max"

    @property
    def right_tailed(self) -> bool:
        return self in (TestFamily.JOHANSEN_TRACE, TestFamily.JOHANSEN_MAX)


@dataclass(frozen=True)
class Provenance:
    kind: str
    source: str = ""
    seed: int | None = None
    replications: int | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "source": self.source, "seed": self.seed, "replications": self.replications}


@dataclass(frozen=True)
class CriticalValueSurface:
    test_family: TestFamily
    spec_key: str
    sample_size: int | None
    break_fractions: tuple[float, ...]
    quantiles: Mapping[float, float]
    provenance: Provenance
    standard_errors: Mapping[float, float] = field(default_factory=dict)

    def quantile(self, level: float) -> float:
        for tabulated, value in self.quantiles.items():
            if abs(tabulated - level) < 1e-9:
                return value
        raise NotTabulated(
            f"{self.test_family.value} {self.spec_key!r} has no value at level {level}"
        )

    def is_monotone(self) -> bool:
        ordered = [self.quantiles[level] for level in sorted(self.quantiles)]
        if self.test_family.right_tailed:
            return all(a <= b for a, b in zip(ordered, ordered[1:], strict=False))
        return all(abs(a) <= abs(b) and a >= b for a, b in zip(ordered, ordered[1:], strict=False))

    def to_dict(self) -> dict:
        return {
            "test_family": self.test_family.value,
            "spec_key": self.spec_key,
            "sample_size": self.sample_size,
            "break_fractions": list(self.break_fractions),
            "quantiles": {repr(k): v for k, v in sorted(self.quantiles.items())},
            "standard_errors": {repr(k): v for k, v in sorted(self.standard_errors.items())},
            "provenance": self.provenance.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> CriticalValueSurface:
        return cls(
            test_family=TestFamily(doc["test_family"]),
            spec_key=str(doc["spec_key"]),
            sample_size=doc.get("sample_size"),
            break_fractions=tuple(float(f) for f in doc.get("break_fractions", ())),
            quantiles={float(k): float(v) for k, v in doc["quantiles"].items()},
            provenance=Provenance(**doc["provenance"]),
            standard_errors={float(k): float(v) for k, v in doc.get("standard_errors", {}).items()},
        )


@dataclass(frozen=True)
class BundledTables:
    surfaces: tuple[CriticalValueSurface, ...]
    response_surfaces: Mapping[str, Mapping[float, tuple[float, ...]]]


@lru_cache
def bundled_tables() -> BundledTables:
    """Parse ``data/critical_values.yml`` once."""
    text = resources.files("energy_econometrics.data").joinpath("critical_values.yml").read_text(encoding="utf-8")
    doc = yaml.safe_load(text)
    surfaces = tuple(
        CriticalValueSurface(
            test_family=TestFamily(entry["family"]),
            spec_key=str(entry["spec_key"]),
            sample_size=entry.get("sample_size"),
            break_fractions=tuple(float(f) for f in entry.get("break_fractions", ())),
            quantiles={float(k): float(v) for k, v in entry["quantiles"].items()},
            provenance=Provenance(kind="bundled_table", source=entry.get("source", "")),
        )
        for entry in doc["surfaces"]
    )
    response = {
        key: {float(level): tuple(float(c) for c in coefs) for level, coefs in rows.items()}
        for key, rows in doc["response_surfaces"].items()
    }
    return BundledTables(surfaces=surfaces, response_surfaces=response)


def response_surface(
    spec_key: str, nobs: int, test_family: TestFamily = TestFamily.ADF
) -> CriticalValueSurface:
    """Finite-sample Dickey-Fuller tau critical values at ``nobs``."""
    rows = bundled_tables().response_surfaces.get(spec_key)
    if rows is None:
        raise NotTabulated(f"no response surface for deterministic spec {spec_key!r}")
    quantiles = {
        level: b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3 for level, (b0, b1, b2, b3) in rows.items()
    }
    return CriticalValueSurface(
        test_family=test_family,
        spec_key=spec_key,
        sample_size=nobs,
        break_fractions=(),
        quantiles=quantiles,
        provenance=Provenance(kind="bundled_table", source="Dickey-Fuller response surface"),
    )


def _fractions_match(tabulated: Sequence[float], requested: Sequence[float]) -> float | None:
    """Distance between fraction tuples, or None when they are incompatible."""
    if not tabulated:
        return 0.0
    if len(tabulated) != len(requested):
        return None
    distance = max(abs(a - b) for a, b in zip(tabulated, requested, strict=True))
    return distance if distance <= FRACTION_TOLERANCE else None


def _sample_size_match(tabulated: int | None, requested: int | None) -> float | None:
    if tabulated is None:
        if requested is not None and requested < MIN_ASYMPTOTIC_NOBS:
            return None
        return 0.0
    if requested is None:
        return None
    distance = abs(tabulated - requested) / requested
    return distance if distance <= SAMPLE_SIZE_TOLERANCE else None


def find_surface(
    candidates: Iterable[CriticalValueSurface],
    test_family: TestFamily | str,
    spec_key: str,
    nobs: int | None = None,
    break_fractions: Sequence[float] = (),
) -> CriticalValueSurface | None:
    family = TestFamily(test_family)
    best: tuple[float, float, CriticalValueSurface] | None = None
    for surface in candidates:
        if surface.test_family is not family or surface.spec_key != spec_key:
            continue
        fraction_gap = _fractions_match(surface.break_fractions, break_fractions)
        size_gap = _sample_size_match(surface.sample_size, nobs)
        if fraction_gap is None or size_gap is None:
            continue
        # Fraction-specific surfaces beat fraction-free ones.
        specificity = -len(surface.break_fractions)
        rank = (specificity + fraction_gap, size_gap)
        if best is None or rank < best[:2]:
            best = (*rank, surface)
    return best[2] if best else None


def missing_levels(quantiles: Mapping[float, float]) -> tuple[float, ...]:
    """Standard levels absent from ``quantiles``."""
    return tuple(level for level in LEVELS if not any(abs(level - q) < 1e-9 for q in quantiles))


def _complete_levels(
    surface: CriticalValueSurface,
    cache_dir: Path | None,
    nobs: int | None,
    break_fractions: Sequence[float],
) -> CriticalValueSurface:
    """Fill levels a bundled table leaves out from a cached simulation of the same test."""
    missing = missing_levels(surface.quantiles)
    if not missing or cache_dir is None or surface.provenance.kind != "bundled_table":
        return surface
    from .cache import cached_surfaces

    simulated = find_surface(cached_surfaces(cache_dir), surface.test_family, surface.spec_key, nobs, break_fractions)
    if simulated is None:
        return surface
    quantiles = dict(surface.quantiles)
    errors = dict(surface.standard_errors)
    for level in missing:
        for tabulated, value in simulated.quantiles.items():
            if abs(tabulated - level) < 1e-9:
                quantiles[level] = value
                if tabulated in simulated.standard_errors:
                    errors[level] = simulated.standard_errors[tabulated]
    merged = replace(
        surface,
        quantiles=dict(sorted(quantiles.items())),
        standard_errors=errors,
        provenance=Provenance(
            kind="bundled_table",
            source=f"{surface.provenance.source}; other levels from {simulated.provenance.source}",
            seed=simulated.provenance.seed,
            replications=simulated.provenance.replications,
        ),
    )
    if not merged.is_monotone():
        logger.warning(
            "Cached %s %r levels disagree with the bundled table; keeping the table alone",
            surface.test_family.value,
            surface.spec_key,
        )
        return surface
    return merged


def lookup_surface(
    test_family: TestFamily | str,
    spec_key: str,
    nobs: int | None = None,
    break_fractions: Sequence[float] = (),
    cache_dir: Path | None = None,
) -> CriticalValueSurface:
    """Bundled table first, then any cached Monte Carlo surface.

    Levels missing from a bundled table are taken from a cached simulation
    when one covers the request.
    """
    family = TestFamily(test_family)
    if family in (TestFamily.ADF, TestFamily.PP) and nobs is not None:
        return response_surface(spec_key, nobs, family)

    surface = find_surface(bundled_tables().surfaces, family, spec_key, nobs, break_fractions)
    if surface is None and cache_dir is not None:
        from .cache import cached_surfaces

        surface = find_surface(cached_surfaces(cache_dir), family, spec_key, nobs, break_fractions)
    if surface is None:
        raise NotTabulated(
            f"no critical values for {family.value} {spec_key!r} "
            f"(T={nobs}, break fractions {tuple(round(f, 3) for f in break_fractions)})"
        )
    surface = _complete_levels(surface, cache_dir, nobs, break_fractions)
    if surface.sample_size is None and nobs is not None and nobs < SHORT_SAMPLE_WARNING:
        logger.warning(
            "Applying asymptotic %s critical values to a sample of %d observations",
            family.value,
            nobs,
        )
    return surface


def lookup(
    test_family: TestFamily | str,
    spec_key: str,
    nobs: int | None = None,
    break_fractions: Sequence[float] = (),
    level: float = 0.95,
    cache_dir: Path | None = None,
) -> float:
    return lookup_surface(test_family, spec_key, nobs, break_fractions, cache_dir).quantile(level)


def critical_values_for(
    test_family: TestFamily | str,
    spec_key: str,
    nobs: int | None = None,
    break_fractions: Sequence[float] = (),
    cache_dir: Path | None = None,
) -> tuple[dict[float, float], Provenance | None]:
    """All tabulated levels for a request; empty when nothing covers it."""
    try:
        surface = lookup_surface(test_family, spec_key, nobs, break_fractions, cache_dir)
    except NotTabulated as exc:
        logger.info("%s", exc)
        return {}, None
    return dict(surface.quantiles), surface.provenance
