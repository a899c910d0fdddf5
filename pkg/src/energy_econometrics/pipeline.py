"""Config-driven analysis: ingest, unit roots, cointegration, DOLS.

Each stage catches :class:`EconometricsError` per target, records it and
moves on; later stages simply skip targets whose inputs failed.
"""

from __future__ import annotations

import logging
from collections.abc import Collection
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import __version__
from .cointegration import VarSpec, johansen_test, var_lag_select
from .critical_values import (
    NullDgpSpec,
    TestFamily,
    critical_values_for,
    missing_levels,
    monte_carlo_cv,
    surface_cache_store,
)
from .config import AnalysisConfig, CointegrationConfig, DolsConfig, UnitRootTestConfig
from .dols import DolsBreak, DolsSpec, dols_fit, elasticity_report
from .errors import ConfigError, EconometricsError
from .ingest import Dataset, ingest_csv
from .reports import AnalysisReport, ReportProvenance, StageError, emit_report, finite
from .series import BreakKind, Deterministic, Series, log_transform
from .unit_root import (
    BreakStyle,
    Decision,
    LagSelection,
    UnitRootModelSpec,
    UnitRootOutcome,
    adf,
    clemente,
    lumsdaine_papell,
    perron_known_break,
    phillips_perron,
    select_deterministic,
    zivot_andrews,
)

logger = logging.getLogger(__name__)

STAGES = ("unit_root", "cointegration", "dols")

DEFAULT_TRIM = {"zivot-andrews": 0.15, "lumsdaine-papell": 0.10, "clemente": 0.05}


class SeriesUnavailable(EconometricsError):
    """A stage needs a series whose preparation failed earlier."""

    def __init__(self, name: str, cause: EconometricsError):
        self.cause = cause
        self.exit_code = cause.exit_code
        super().__init__(f"series {name!r} unavailable: {cause}")


@dataclass
class RunState:
    config: AnalysisConfig
    dataset: Dataset
    cache_dir: Path | None = None
    workers: int = 1
    series: dict[str, Series] = field(default_factory=dict)
    unavailable: dict[str, EconometricsError] = field(default_factory=dict)
    errors: list[StageError] = field(default_factory=list)

    def record(self, stage: str, target: str, exc: EconometricsError) -> None:
        error = type(exc.cause if isinstance(exc, SeriesUnavailable) else exc).__name__
        logger.warning("%s failed for %s: %s", stage, target, exc)
        self.errors.append(StageError(stage=stage, target=target, error=error, message=str(exc)))

    def get(self, name: str) -> Series:
        if name in self.unavailable:
            raise SeriesUnavailable(name, self.unavailable[name])
        return self.series[name]


def _metadata_vintage(path: Path | None) -> bool | None:
    if path is None:
        return None
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as exc:
        logger.warning("cannot read snapshot metadata %s: %s", path, exc)
        return None
    value = doc.get("matches-published-vintage")
    return None if value is None else bool(value)


# ============== Stages ==============


def load_dataset(config: AnalysisConfig) -> Dataset:
    """Ingest the configured CSV and check configured years against it."""
    dataset = ingest_csv(config.data.path, config.data.columns)
    config.check_years(dataset.start_year, dataset.end_year)
    return dataset


def prepare_series(state: RunState) -> None:
    config = state.config
    for variable in config.data.columns:
        name = config.series_name(variable)
        raw = state.dataset[variable]
        try:
            state.series[name] = log_transform(raw).renamed(name) if config.data.log else raw.renamed(name)
        except EconometricsError as exc:
            state.unavailable[name] = exc
            state.record("transform", name, exc)


def _unit_root_once(state: RunState, test: UnitRootTestConfig, s: Series) -> UnitRootOutcome:
    level = state.config.level
    cache = state.cache_dir
    selection = LagSelection.parse(test.selection)
    trim = test.trim if test.trim is not None else DEFAULT_TRIM.get(test.test)
    if test.test in ("adf", "pp") and test.deterministic == "auto":
        _, outcome = select_deterministic(s, test.max_lag, selection, level, cache_dir=cache)
        if test.test == "adf":
            return outcome
        det = outcome.spec_key
    else:
        det = "c" if test.deterministic == "auto" else test.deterministic
    if test.test == "adf":
        return adf(s, det, test.max_lag, selection, level=level, cache_dir=cache)
    if test.test == "pp":
        return phillips_perron(
            s, det, test.bandwidth, bandwidth_rule=test.bandwidth_rule, level=level, cache_dir=cache
        )
    if test.test == "lumsdaine-papell":
        kind = BreakKind(test.kind or "both")
        return lumsdaine_papell(s, trim, test.max_lag, selection, kind=kind, level=level, cache_dir=cache)
    if test.test == "clemente":
        return clemente(s, test.style or "IO", trim, test.max_lag, selection, level=level, cache_dir=cache)

    kind = BreakKind(test.kind)
    style = test.style or ("AO" if kind is BreakKind.TREND else "IO")
    spec = UnitRootModelSpec(
        deterministic=Deterministic.from_string(det),
        break_style=BreakStyle.from_string(style),
        break_kind=kind,
        lag_selection=selection,
        max_lag=test.max_lag,
    )
    if test.test == "perron":
        return perron_known_break(s, spec, test.break_year, level=level, cache_dir=cache)
    return zivot_andrews(s, spec, trim, level=level, cache_dir=cache)


def _two_break_family(test: UnitRootTestConfig) -> tuple[TestFamily, str] | None:
    if test.test == "clemente":
        return (TestFamily.CLEMENTE_AO if test.style == "AO" else TestFamily.CLEMENTE_IO), "c:intercept"
    if test.test == "lumsdaine-papell":
        return TestFamily.LUMSDAINE_PAPELL, f"ct:{test.kind or 'both'}"
    return None


def fill_critical_values(state: RunState, test: UnitRootTestConfig, s: Series) -> None:
    """Simulate and cache the levels a two-break table lacks for this sample size."""
    settings = state.config.critical_values
    target = _two_break_family(test)
    if not settings.simulate_missing or state.cache_dir is None or target is None:
        return
    family, spec_key = target
    quantiles, _ = critical_values_for(family, spec_key, s.nobs, (), state.cache_dir)
    if not missing_levels(quantiles):
        return
    options = {
        "max_lag": test.max_lag,
        "selection": test.selection,
        "trim": test.trim if test.trim is not None else DEFAULT_TRIM[test.test],
    }
    surface = monte_carlo_cv(
        family,
        spec_key,
        NullDgpSpec(nobs=s.nobs),
        settings.replications,
        state.config.seed,
        workers=state.workers,
        options=options,
    )
    surface_cache_store(surface, state.cache_dir)


def _resolved(outcomes: list[UnitRootOutcome], name: str) -> bool:
    """True when the latest earlier test of ``name`` rejected the unit root."""
    for outcome in reversed(outcomes):
        if outcome.series == name:
            return outcome.decision is Decision.REJECT
    return False


def run_unit_roots(state: RunState) -> list[UnitRootOutcome]:
    outcomes: list[UnitRootOutcome] = []
    for test in state.config.unit_root:
        for name in test.series:
            if test.unresolved_only and _resolved(outcomes, name):
                logger.info("%s: %s already resolved as stationary, skipping", test.test, name)
                continue
            target = f"{test.test}:{name}"
            try:
                s = state.get(name)
                fill_critical_values(state, test, s)
                outcomes.append(_unit_root_once(state, test, s))
            except EconometricsError as exc:
                state.record("unit_root", target, exc)
    return outcomes


def break_summary(outcomes: list[UnitRootOutcome]) -> list[dict]:
    return [
        {
            "series": o.series,
            "test": o.test.value,
            "breaks": list(o.break_years),
            "statistic": o.statistic,
            "decision": o.decision.value,
            "dummies": [d.to_dict() for d in o.dummy_report],
        }
        for o in outcomes
        if o.breaks
    ]


def _var_variables(config: AnalysisConfig, coint: CointegrationConfig) -> list[str]:
    if coint.variables:
        return list(coint.variables)
    return [config.series_name(v) for v in (config.variables.response, *config.variables.regressors)]


def run_cointegration(state: RunState, coint: CointegrationConfig) -> tuple[list[dict], list[dict]]:
    lag_tables: list[dict] = []
    johansen: list[dict] = []
    names = _var_variables(state.config, coint)
    for configuration in coint.configurations:
        target = configuration.name
        try:
            endogenous = [state.get(name) for name in names]
            spec = VarSpec.build(
                endogenous,
                lag_order=1,
                deterministic=coint.deterministic,
                break_years=configuration.breaks,
                dummies=configuration.dummies,
                interactions=configuration.interactions,
                trend=configuration.trend,
                interaction_form=coint.interaction_form,
            )
            selection = var_lag_select(spec, coint.max_lag)
        except EconometricsError as exc:
            state.record("lag_selection", target, exc)
            continue
        used = configuration.lag_order or selection.chosen[coint.lag_criterion]
        lag_tables.append({"configuration": target, **selection.to_dict(), "used": used})
        try:
            outcome = johansen_test(spec.with_lag_order(used), level=coint.level, cache_dir=state.cache_dir)
        except EconometricsError as exc:
            state.record("johansen", target, exc)
            continue
        johansen.append({"configuration": target, "variables": names, "outcome": outcome.to_dict()})
    return lag_tables, johansen


def run_dols(state: RunState, dols: DolsConfig) -> list[dict]:
    config = state.config
    response_name = config.series_name(config.variables.response)
    regressor_names = [config.series_name(v) for v in config.variables.regressors]
    labels = {config.series_name(k): v for k, v in config.variables.labels.items()}
    entries = []
    for model in dols.models:
        try:
            spec = DolsSpec(
                response=state.get(response_name),
                regressors=tuple(state.get(name) for name in regressor_names),
                constant=model.constant,
                trend=model.trend,
                breaks=tuple(DolsBreak(b.year, b.intercept_dummy, b.trend_interaction) for b in model.breaks),
                leads=model.leads,
                lags=model.lags,
                interaction_form=model.interaction_form,
                long_run_variance=model.long_run_variance,
                bandwidth=model.bandwidth,
                name=model.name,
            )
            fit = dols_fit(spec)
        except EconometricsError as exc:
            state.record("dols", model.name, exc)
            continue
        elasticities = elasticity_report(fit, dols.level, labels, dols.unitary_band)
        entries.append({"fit": fit.to_dict(), "elasticities": [e.to_dict() for e in elasticities]})
    return entries


def run_analysis(
    config: AnalysisConfig,
    *,
    cache_dir: Path | None = None,
    stages: Collection[str] = STAGES,
    workers: int = 1,
) -> AnalysisReport:
    """Run the configured stages in order and assemble the report.

    Data and configuration problems found before the first stage raise;
    failures inside a stage are recorded in ``report.errors``. ``stages``
    restricts the run to a subset of ``unit_root``, ``cointegration`` and
    ``dols``; naming one whose section is missing is a configuration error.
    """
    unknown = set(stages) - set(STAGES)
    if unknown:
        raise ConfigError(f"unknown stages {sorted(unknown)}", "stages")
    if stages is not STAGES:
        for stage in stages:
            if stage != "unit_root" and getattr(config, stage) is None:
                raise ConfigError(f"the analysis config has no {stage} section", stage)
    dataset = load_dataset(config)
    state = RunState(config=config, dataset=dataset, cache_dir=cache_dir, workers=workers)
    logger.info("Analysis %r on %s (%d-%d)", config.name, dataset.source.name, dataset.start_year, dataset.end_year)

    prepare_series(state)
    outcomes = run_unit_roots(state) if "unit_root" in stages else []
    lag_tables: list[dict] = []
    johansen: list[dict] = []
    if "cointegration" in stages and config.cointegration:
        lag_tables, johansen = run_cointegration(state, config.cointegration)
    dols = run_dols(state, config.dols) if "dols" in stages and config.dols else []

    first = next(iter(dataset.series.values()))
    report = AnalysisReport(
        name=config.name,
        provenance=ReportProvenance(
            data_sha256=dataset.sha256,
            config_sha256=config.sha256,
            seed=config.seed,
            version=__version__,
            data_file=dataset.source.name,
            matches_published_vintage=_metadata_vintage(config.data.metadata),
        ),
        dataset={
            "start_year": dataset.start_year,
            "end_year": dataset.end_year,
            "nobs": first.nobs,
            "series": sorted(state.series),
            "log": config.data.log,
        },
        unit_root=finite([o.to_dict() for o in outcomes]),
        breaks=finite(break_summary(outcomes)),
        lag_selection=finite(lag_tables),
        johansen=finite(johansen),
        dols=finite(dols),
        errors=state.errors,
    )
    logger.info(
        "Analysis %r finished: %d unit-root outcomes, %d Johansen tables, %d DOLS fits, %d failures",
        config.name,
        len(outcomes),
        len(johansen),
        len(dols),
        len(state.errors),
    )
    return report


def write_report(report: AnalysisReport, formats: list[str], out_dir: Path) -> list[Path]:
    written: list[Path] = []
    for fmt in formats:
        written += emit_report(report, fmt, out_dir)
    return written

