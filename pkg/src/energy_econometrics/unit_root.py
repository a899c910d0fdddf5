"""Unit-root battery: Dickey-Fuller, Phillips-Perron and break-robust tests.

Every test regresses ``dy_t`` on ``y_{t-1}`` plus deterministic terms, break
dummies and lagged differences, and reports the t-ratio on ``y_{t-1}``.
Break tests that search over dates evaluate the same regression at every
admissible candidate and keep the minimum t-ratio; the earliest candidate
wins exact ties.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import stats

from .critical_values.tables import TestFamily, critical_values_for
from .errors import (
    ConfigError,
    InfeasibleSpec,
    InvalidModelCombination,
    RankDeficient,
    SeriesTooShort,
    TrimTooLarge,
)
from .regression import (
    DesignMatrix,
    OlsFit,
    check_rank,
    newey_west_bandwidth,
    newey_west_lrv,
    ols,
    significance_stars,
)
from .series import (
    BreakDate,
    BreakKind,
    Deterministic,
    Series,
    check_break_position,
    level_shift,
    pulse,
    trend_column,
    trend_shift,
)

logger = logging.getLogger(__name__)

UNIT_ROOT_TERM = "y.L1"

# Observations the shortest test regression keeps beyond its lag window.
MIN_EXTRA_OBS = 10


class LagCriterion(str, Enum):
    FIXED = "fixed"
    AIC = "aic"
    SIC = "sic"
    HQ = "hq"
    GENERAL_TO_SPECIFIC = "gts"


@dataclass(frozen=True)
class LagSelection:
    """How the number of lagged differences is chosen.

    Parsed from ``fixed:k``, ``aic``, ``sic`` (alias ``bic``), ``hq`` or
    ``gts:alpha``. ``alpha`` is the two-sided significance level used to
    keep the longest lag in the general-to-specific search.
    """

    criterion: LagCriterion
    lags: int | None = None
    alpha: float = 0.10

    def __post_init__(self) -> None:
        if self.criterion is LagCriterion.FIXED and (self.lags is None or self.lags < 0):
            raise ConfigError("fixed lag selection needs a non-negative lag count", "lag_selection")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"significance level {self.alpha} outside (0, 1)", "lag_selection")

    @classmethod
    def parse(cls, value: str | int | LagSelection) -> LagSelection:
        if isinstance(value, LagSelection):
            return value
        if isinstance(value, int):
            return cls(LagCriterion.FIXED, lags=value)
        name, _, argument = str(value).strip().lower().partition(":")
        if name == "bic":
            name = "sic"
        try:
            criterion = LagCriterion(name)
        except ValueError:
            raise ConfigError(f"unknown lag selection {value!r}", "lag_selection") from None
        try:
            if criterion is LagCriterion.FIXED:
                return cls(criterion, lags=int(argument))
            if criterion is LagCriterion.GENERAL_TO_SPECIFIC:
                return cls(criterion, alpha=float(argument) if argument else 0.10)
        except ValueError:
            raise ConfigError(f"malformed lag selection {value!r}", "lag_selection") from None
        return cls(criterion)

    @classmethod
    def fixed(cls, lags: int) -> LagSelection:
        return cls(LagCriterion.FIXED, lags=lags)

    def __str__(self) -> str:
        if self.criterion is LagCriterion.FIXED:
            return f"fixed:{self.lags}"
        if self.criterion is LagCriterion.GENERAL_TO_SPECIFIC:
            return f"gts:{self.alpha:g}"
        return self.criterion.value


class BreakStyle(str, Enum):
    NONE = "none"
    ADDITIVE = "AO"
    INNOVATIONAL = "IO"

    @classmethod
    def from_string(cls, value: str | BreakStyle) -> BreakStyle:
        if isinstance(value, BreakStyle):
            return value
        try:
            return {"none": cls.NONE, "ao": cls.ADDITIVE, "io": cls.INNOVATIONAL}[value.strip().lower()]
        except KeyError:
            raise ConfigError(f"unknown break style {value!r}", "break_style") from None


class Decision(str, Enum):
    REJECT = "reject_unit_root"
    ACCEPT = "accept_unit_root"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class UnitRootModelSpec:
    """Deterministic terms, break model and lag policy of a test regression.

    Single-break models follow the usual numbering: AO models 1 to 4 are
    ``c:intercept``, ``ct:intercept``, ``ct:trend`` and ``ct:both``; IO models
    1 to 3 are the same without ``ct:trend``.
    """

    deterministic: Deterministic = Deterministic.CONSTANT
    break_style: BreakStyle = BreakStyle.NONE
    break_kind: BreakKind | None = None
    lag_selection: LagSelection = field(default_factory=lambda: LagSelection(LagCriterion.AIC))
    max_lag: int = 4

    def __post_init__(self) -> None:
        if self.max_lag < 0:
            raise ConfigError("max_lag must be non-negative", "max_lag")
        if (self.break_kind is None) != (self.break_style is BreakStyle.NONE):
            raise InvalidModelCombination("a break kind is required exactly when the break style is AO or IO")
        if self.break_kind is None:
            return
        if not self.deterministic.has_constant:
            raise InvalidModelCombination("break models need at least a constant")
        if self.break_kind.shifts_slope and not self.deterministic.has_trend:
            raise InvalidModelCombination(f"a {self.break_kind.value} break needs a trend in the regression")
        if self.break_style is BreakStyle.INNOVATIONAL and self.break_kind is BreakKind.TREND:
            raise InvalidModelCombination(
                "innovational outlier models do not cover a trend specification with a break in trend only"
            )

    @property
    def spec_key(self) -> str:
        if self.break_kind is None:
            return self.deterministic.value
        return f"{self.deterministic.value}:{self.break_kind.value}"


@dataclass(frozen=True)
class DummyCoefficient:
    name: str
    coefficient: float
    standard_error: float
    t_stat: float
    p_value: float

    @property
    def stars(self) -> str:
        return significance_stars(self.p_value)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "coefficient": self.coefficient,
            "standard_error": self.standard_error,
            "t_stat": self.t_stat,
            "p_value": self.p_value,
            "stars": self.stars,
        }


@dataclass(frozen=True)
class UnitRootOutcome:
    test: TestFamily
    series: str
    spec_key: str
    statistic: float
    alpha_minus_one: float
    chosen_lags: int
    nobs: int
    breaks: tuple[BreakDate, ...] = ()
    critical_values: Mapping[float, float] = field(default_factory=dict)
    cv_source: str | None = None
    level: float = 0.95
    decision: Decision = Decision.INCONCLUSIVE
    dummy_report: tuple[DummyCoefficient, ...] = ()
    bandwidth: int | None = None
    candidates_evaluated: int = 1
    candidates_skipped: int = 0

    @property
    def break_years(self) -> tuple[int, ...]:
        return tuple(d.year for d in self.breaks)

    def decision_at(self, level: float) -> Decision:
        return _decide(self.statistic, self.critical_values, level)

    def dummy(self, name_prefix: str) -> DummyCoefficient:
        for entry in self.dummy_report:
            if entry.name.startswith(name_prefix):
                return entry
        raise KeyError(f"no dummy starting with {name_prefix!r}")

    def to_dict(self) -> dict:
        return {
            "test": self.test.value,
            "series": self.series,
            "spec_key": self.spec_key,
            "statistic": self.statistic,
            "alpha_minus_one": self.alpha_minus_one,
            "chosen_lags": self.chosen_lags,
            "nobs": self.nobs,
            "breaks": [d.to_dict() for d in self.breaks],
            "critical_values": {f"{k:.2f}": v for k, v in sorted(self.critical_values.items())},
            "cv_source": self.cv_source,
            "level": self.level,
            "decision": self.decision.value,
            "dummy_report": [d.to_dict() for d in self.dummy_report],
            "bandwidth": self.bandwidth,
            "candidates_evaluated": self.candidates_evaluated,
            "candidates_skipped": self.candidates_skipped,
        }


def _decide(statistic: float, critical_values: Mapping[float, float], level: float) -> Decision:
    for tabulated, value in critical_values.items():
        if abs(tabulated - level) < 1e-9:
            return Decision.REJECT if statistic < value else Decision.ACCEPT
    return Decision.INCONCLUSIVE


# ============== Test regressions ==============


@dataclass(frozen=True)
class _Fit:
    """One evaluated test regression."""

    ols: OlsFit
    lags: int
    positions: tuple[int, ...] = ()
    stage_one: OlsFit | None = None

    @property
    def statistic(self) -> float:
        return self.ols.t_stat(UNIT_ROOT_TERM)

    @property
    def alpha_minus_one(self) -> float:
        return self.ols.coefficient(UNIT_ROOT_TERM)


def _df_design(
    y: np.ndarray,
    deterministic: Deterministic,
    lags: int,
    first: int,
    extra: Mapping[str, np.ndarray],
    pulse_positions: Sequence[int] = (),
) -> tuple[np.ndarray, DesignMatrix]:
    """Rows ``t = first..T-1`` of the Dickey-Fuller regression.

    ``extra`` columns are full-length arrays indexed like ``y``. Every pulse
    position contributes ``DTB_{t-j}`` for ``j = 0..lags``; lags of a pulse
    that fall outside the sample are dropped.
    """
    nobs = y.size
    rows = np.arange(first, nobs)
    dy = np.diff(y, prepend=np.nan)
    columns: dict[str, np.ndarray] = {UNIT_ROOT_TERM: y[rows - 1]}
    if deterministic.has_constant:
        columns["const"] = np.ones(rows.size)
    if deterministic.has_trend:
        columns["trend"] = trend_column(nobs)[rows]
    for name, values in extra.items():
        columns[name] = np.asarray(values, dtype=float)[rows]
    seen: set[int] = set()
    for number, position in enumerate(pulse_positions, start=1):
        for j in range(lags + 1):
            # a lagged pulse equals the other break's pulse when the gap is j
            if position + j in seen or not first <= position + j < nobs:
                continue
            seen.add(position + j)
            columns[f"DTB{number}.L{j}"] = ((rows - j) == position).astype(float)
    for j in range(1, lags + 1):
        columns[f"dy.L{j}"] = dy[rows - j]
    return dy[rows], DesignMatrix.from_columns(columns)


def _fit_lags(
    y: np.ndarray,
    deterministic: Deterministic,
    lags: int,
    first: int,
    extra: Mapping[str, np.ndarray],
    pulse_positions: Sequence[int] = (),
) -> OlsFit:
    response, design = _df_design(y, deterministic, lags, first, extra, pulse_positions)
    return ols(response, design)


def _lag_cap(
    y: np.ndarray,
    deterministic: Deterministic,
    max_lag: int,
    extra: Mapping[str, np.ndarray],
    pulse_positions: Sequence[int],
) -> int:
    """Largest lag order whose own estimation rows keep the design full rank."""
    for k in range(max_lag, 0, -1):
        _, design = _df_design(y, deterministic, k, k + 1, extra, pulse_positions)
        try:
            check_rank(design)
        except RankDeficient:
            continue
        return k
    _, design = _df_design(y, deterministic, 0, 1, extra, pulse_positions)
    check_rank(design)
    return 0


def _select_lags(
    y: np.ndarray,
    deterministic: Deterministic,
    max_lag: int,
    selection: LagSelection,
    extra: Mapping[str, np.ndarray] | None = None,
    pulse_positions: Sequence[int] = (),
) -> tuple[int, OlsFit]:
    """Choose the lag order on the common sample, then refit on the maximal one.

    Early break dummies are constant over the rows of a long lag order; the
    search is then capped at the longest order whose rows still identify them.
    """
    extra = extra or {}
    if selection.criterion is LagCriterion.FIXED:
        chosen = int(selection.lags)
    else:
        cap = _lag_cap(y, deterministic, max_lag, extra, pulse_positions) if extra or pulse_positions else max_lag
        if cap < max_lag:
            logger.debug("lag search capped at %d of %d", cap, max_lag)
        common = cap + 1
        if selection.criterion is LagCriterion.GENERAL_TO_SPECIFIC:
            critical = stats.norm.ppf(1.0 - selection.alpha / 2.0)
            chosen = 0
            for k in range(cap, 0, -1):
                fit = _fit_lags(y, deterministic, k, common, extra, pulse_positions)
                if abs(fit.t_stat(f"dy.L{k}")) >= critical:
                    chosen = k
                    break
        else:
            scores = [
                _fit_lags(y, deterministic, k, common, extra, pulse_positions).ic.get(selection.criterion.value)
                for k in range(cap + 1)
            ]
            chosen = int(np.argmin(scores))
    return chosen, _fit_lags(y, deterministic, chosen, chosen + 1, extra, pulse_positions)


def _check_length(s: Series, max_lag: int) -> None:
    needed = max_lag + MIN_EXTRA_OBS
    if s.nobs < needed:
        raise SeriesTooShort(needed, s.nobs, f"unit-root test on {s.name!r}")


def _dummy_report(fit: OlsFit, prefixes: Sequence[str]) -> tuple[DummyCoefficient, ...]:
    return tuple(
        DummyCoefficient(
            name=name,
            coefficient=fit.coefficient(name),
            standard_error=fit.standard_error(name),
            t_stat=fit.t_stat(name),
            p_value=fit.p_value(name),
        )
        for name in fit.names
        if name.startswith(tuple(prefixes))
    )


def _outcome(
    family: TestFamily,
    s: Series,
    spec_key: str,
    fit: _Fit,
    level: float,
    cache_dir: Path | None,
    cv_nobs: int | None,
    *,
    dummy_prefixes: Sequence[str] = (),
    bandwidth: int | None = None,
    statistic: float | None = None,
    evaluated: int = 1,
    skipped: int = 0,
) -> UnitRootOutcome:
    breaks = tuple(BreakDate.from_position(p, s.start_year, s.nobs) for p in fit.positions)
    critical, provenance = critical_values_for(
        family, spec_key, cv_nobs, tuple(d.fraction for d in breaks), cache_dir
    )
    statistic = fit.statistic if statistic is None else statistic
    report_fit = fit.stage_one if fit.stage_one is not None else fit.ols
    return UnitRootOutcome(
        test=family,
        series=s.name,
        spec_key=spec_key,
        statistic=statistic,
        alpha_minus_one=fit.alpha_minus_one,
        chosen_lags=fit.lags,
        nobs=fit.ols.nobs,
        breaks=breaks,
        critical_values=critical,
        cv_source=provenance.source if provenance else None,
        level=level,
        decision=_decide(statistic, critical, level),
        dummy_report=_dummy_report(report_fit, dummy_prefixes),
        bandwidth=bandwidth,
        candidates_evaluated=evaluated,
        candidates_skipped=skipped,
    )


# ============== No-break tests ==============


def adf(
    s: Series,
    det: Deterministic | str = Deterministic.CONSTANT,
    max_lag: int = 4,
    selection: LagSelection | str = "aic",
    *,
    level: float = 0.95,
    cache_dir: Path | None = None,
) -> UnitRootOutcome:
    """Augmented Dickey-Fuller test with criterion-selected lag order."""
    det = Deterministic.from_string(det)
    selection = LagSelection.parse(selection)
    if selection.criterion is LagCriterion.FIXED:
        max_lag = max(max_lag, int(selection.lags))
    _check_length(s, max_lag)
    lags, fit = _select_lags(s.values, det, max_lag, selection)
    logger.debug("ADF %s [%s]: %d lags, t=%.4f", s.name, det.value, lags, fit.t_stat(UNIT_ROOT_TERM))
    return _outcome(TestFamily.ADF, s, det.value, _Fit(fit, lags), level, cache_dir, fit.nobs)


def phillips_perron(
    s: Series,
    det: Deterministic | str = Deterministic.CONSTANT,
    bandwidth: int | None = None,
    *,
    bandwidth_rule: str = "fixed",
    level: float = 0.95,
    cache_dir: Path | None = None,
) -> UnitRootOutcome:
    """Phillips-Perron Z_t with a Bartlett-kernel long-run variance.

    ``Z_t = sqrt(g0 / l2) t - (l2 - g0) / (2 sqrt(l2)) * n se(b) / s`` with
    ``g0`` the residual variance over ``n``, ``l2`` the long-run variance and
    ``s`` the regression standard error.
    """
    det = Deterministic.from_string(det)
    _check_length(s, 0)
    fit = _fit_lags(s.values, det, 0, 1, {})
    residuals = fit.residuals
    if bandwidth is None:
        bandwidth = newey_west_bandwidth(residuals, bandwidth_rule)
    long_run = newey_west_lrv(residuals, bandwidth)
    gamma0 = fit.rss / fit.nobs
    lambda2 = long_run.value
    if lambda2 <= 0.0:
        raise InfeasibleSpec(f"non-positive long-run variance for {s.name!r}")
    t_ratio = fit.t_stat(UNIT_ROOT_TERM)
    coef_se = fit.standard_error(UNIT_ROOT_TERM)
    z_t = math.sqrt(gamma0 / lambda2) * t_ratio - 0.5 * (lambda2 - gamma0) / math.sqrt(lambda2) * (
        fit.nobs * coef_se / fit.regression_se
    )
    logger.debug("PP %s [%s]: bandwidth %d, Z_t=%.4f", s.name, det.value, long_run.bandwidth, z_t)
    return _outcome(
        TestFamily.PP,
        s,
        det.value,
        _Fit(fit, 0),
        level,
        cache_dir,
        fit.nobs,
        bandwidth=long_run.bandwidth,
        statistic=z_t,
    )


def select_deterministic(
    s: Series,
    max_lag: int = 4,
    selection: LagSelection | str = "aic",
    level: float = 0.95,
    *,
    cache_dir: Path | None = None,
) -> tuple[Deterministic, UnitRootOutcome]:
    """Drop the trend, then the constant, while its t-test is insignificant."""
    threshold = 1.0 - level
    outcome = None
    for det, term in ((Deterministic.CONSTANT_TREND, "trend"), (Deterministic.CONSTANT, "const")):
        outcome = adf(s, det, max_lag, selection, level=level, cache_dir=cache_dir)
        fit = _select_lags(s.values, det, max_lag, LagSelection.fixed(outcome.chosen_lags))[1]
        if fit.p_value(term) < threshold:
            return det, outcome
        logger.info("%s: %s insignificant (p=%.3f), dropping it", s.name, term, fit.p_value(term))
    det = Deterministic.NONE
    return det, adf(s, det, max_lag, selection, level=level, cache_dir=cache_dir)


# ============== Single break ==============


def _break_columns(nobs: int, kind: BreakKind, positions: Sequence[int]) -> dict[str, np.ndarray]:
    columns: dict[str, np.ndarray] = {}
    for number, position in enumerate(positions, start=1):
        if kind.shifts_level:
            columns[f"DU{number}"] = level_shift(nobs, position)
        if kind.shifts_slope:
            columns[f"DT{number}"] = trend_shift(nobs, position)
    return columns


def _evaluate_additive(
    y: np.ndarray,
    deterministic: Deterministic,
    kind: BreakKind,
    positions: Sequence[int],
    max_lag: int,
    selection: LagSelection,
    pulses: bool = True,
) -> _Fit:
    """Two-stage additive-outlier regression at fixed break positions."""
    nobs = y.size
    columns: dict[str, np.ndarray] = {"const": np.ones(nobs)}
    if deterministic.has_trend:
        columns["trend"] = trend_column(nobs)
    columns.update(_break_columns(nobs, kind, positions))
    stage_one = ols(y, DesignMatrix.from_columns(columns))
    pulse_positions = tuple(positions) if pulses and kind.shifts_level else ()
    lags, fit = _select_lags(
        stage_one.residuals, Deterministic.NONE, max_lag, selection, pulse_positions=pulse_positions
    )
    return _Fit(fit, lags, tuple(positions), stage_one)


def _evaluate_innovational(
    y: np.ndarray,
    deterministic: Deterministic,
    kind: BreakKind,
    positions: Sequence[int],
    max_lag: int,
    selection: LagSelection,
    pulses: bool = True,
) -> _Fit:
    """One-stage innovational-outlier regression at fixed break positions."""
    extra = _break_columns(y.size, kind, positions)
    if pulses and kind.shifts_level:
        for number, position in enumerate(positions, start=1):
            extra[f"DTB{number}"] = pulse(y.size, position)
    lags, fit = _select_lags(y, deterministic, max_lag, selection, extra)
    return _Fit(fit, lags, tuple(positions))


def _as_break(s: Series, date: BreakDate | int) -> BreakDate:
    year = date.year if isinstance(date, BreakDate) else int(date)
    return s.break_at(year)


def perron_known_break(
    s: Series,
    spec: UnitRootModelSpec,
    break_date: BreakDate | int,
    *,
    level: float = 0.95,
    cache_dir: Path | None = None,
) -> UnitRootOutcome:
    """Perron test with an exogenously dated break, AO or IO form."""
    if spec.break_kind is None:
        raise InvalidModelCombination("a known-break test needs a break kind and style")
    _check_length(s, spec.max_lag)
    date = _as_break(s, break_date)
    position = date.position
    check_break_position(position, s.nobs, date.year)
    if spec.break_style is BreakStyle.ADDITIVE:
        family = TestFamily.PERRON_AO
        fit = _evaluate_additive(
            s.values, spec.deterministic, spec.break_kind, (position,), spec.max_lag, spec.lag_selection
        )
    else:
        family = TestFamily.PERRON_IO
        fit = _evaluate_innovational(
            s.values, spec.deterministic, spec.break_kind, (position,), spec.max_lag, spec.lag_selection
        )
    return _outcome(family, s, spec.spec_key, fit, level, cache_dir, s.nobs, dummy_prefixes=("DU", "DT"))


def _candidate_range(nobs: int, trim: float) -> range:
    if not 0.0 < trim < 0.5:
        raise TrimTooLarge(trim, nobs)
    if trim * nobs < 2:
        raise SeriesTooShort(math.ceil(2.0 / trim), nobs, f"break search with trimming {trim}")
    low = max(2, math.ceil(trim * nobs))
    high = min(nobs - 2, math.floor((1.0 - trim) * nobs))
    if high < low:
        raise TrimTooLarge(trim, nobs)
    return range(low, high + 1)


def _evaluator(spec: UnitRootModelSpec, pulses: bool) -> Callable[[np.ndarray, Sequence[int]], _Fit]:
    """Regression at fixed positions; ``pulses`` only affects IO models."""
    if spec.break_kind is None:
        raise InvalidModelCombination("a break search needs a break kind")
    pulses = pulses or spec.break_style is BreakStyle.ADDITIVE
    evaluate = _evaluate_additive if spec.break_style is BreakStyle.ADDITIVE else _evaluate_innovational

    def run(y: np.ndarray, positions: Sequence[int]) -> _Fit:
        return evaluate(y, spec.deterministic, spec.break_kind, positions, spec.max_lag, spec.lag_selection, pulses)

    return run


def _search(
    y: np.ndarray,
    candidates: Sequence[tuple[int, ...]],
    evaluate: Callable[[np.ndarray, Sequence[int]], _Fit],
    label: str,
) -> tuple[_Fit, int, int]:
    """Exact grid argmin of the unit-root t-ratio; earliest candidate wins ties."""
    best: _Fit | None = None
    skipped = 0
    for positions in candidates:
        try:
            fit = evaluate(y, positions)
        except RankDeficient:
            skipped += 1
            continue
        logger.debug("%s at %s: t=%.4f (%d lags)", label, positions, fit.statistic, fit.lags)
        if best is None or fit.statistic < best.statistic:
            best = fit
    if best is None:
        raise InfeasibleSpec(f"{label}: every break candidate is degenerate")
    if skipped:
        logger.warning("%s: skipped %d degenerate break candidates", label, skipped)
    return best, len(candidates) - skipped, skipped


def zivot_andrews(
    s: Series,
    spec: UnitRootModelSpec,
    trim: float = 0.15,
    *,
    level: float = 0.95,
    cache_dir: Path | None = None,
) -> UnitRootOutcome:
    """Endogenous single break: minimum t-ratio over all admissible dates.

    IO specifications use the innovational regression without the break
    pulse; AO specifications run the two-stage regression at each date.
    """
    _check_length(s, spec.max_lag)
    candidates = [(p,) for p in _candidate_range(s.nobs, trim)]
    best, evaluated, skipped = _search(s.values, candidates, _evaluator(spec, pulses=False), f"ZA {s.name}")
    logger.info("ZA %s [%s]: break %d, t=%.4f", s.name, spec.spec_key, s.year_at(best.positions[0] - 1), best.statistic)
    return _outcome(
        TestFamily.ZIVOT_ANDREWS,
        s,
        spec.spec_key,
        best,
        level,
        cache_dir,
        s.nobs,
        dummy_prefixes=("DU", "DT"),
        evaluated=evaluated,
        skipped=skipped,
    )


def zivot_andrews_at(s: Series, spec: UnitRootModelSpec, break_year: int) -> UnitRootOutcome:
    """The Zivot-Andrews regression evaluated at one break year."""
    _check_length(s, spec.max_lag)
    fit = _evaluator(spec, pulses=False)(s.values, (s.position_of(break_year),))
    return _outcome(TestFamily.ZIVOT_ANDREWS, s, spec.spec_key, fit, 0.95, None, s.nobs, dummy_prefixes=("DU", "DT"))


# ============== Two breaks ==============


def _pair_candidates(nobs: int, trim: float, min_gap: int = 2) -> list[tuple[int, int]]:
    positions = _candidate_range(nobs, trim)
    pairs = [(a, b) for a in positions for b in positions if b - a >= min_gap]
    if not pairs:
        raise TrimTooLarge(trim, nobs)
    return pairs


def _lp_spec(kind: BreakKind, max_lag: int, selection: LagSelection | str) -> UnitRootModelSpec:
    return UnitRootModelSpec(
        deterministic=Deterministic.CONSTANT_TREND,
        break_style=BreakStyle.INNOVATIONAL,
        break_kind=kind,
        lag_selection=LagSelection.parse(selection),
        max_lag=max_lag,
    )


def lumsdaine_papell(
    s: Series,
    trim: float = 0.10,
    max_lag: int = 8,
    selection: LagSelection | str = "gts:0.10",
    *,
    kind: BreakKind = BreakKind.BOTH,
    level: float = 0.95,
    cache_dir: Path | None = None,
) -> UnitRootOutcome:
    """Two endogenous breaks in level and trend.

    ``dy_t = mu + beta t + theta DU1 + gamma DT1 + phi DU2 + Phi DT2 + alpha y_{t-1} + lags``
    evaluated over every pair of admissible dates at least two years apart.
    """
    spec = _lp_spec(kind, max_lag, selection)
    _check_length(s, max_lag)
    pairs = _pair_candidates(s.nobs, trim)
    best, evaluated, skipped = _search(s.values, pairs, _evaluator(spec, pulses=False), f"LP {s.name}")
    logger.info("LP %s: breaks %s, t=%.4f", s.name, [s.year_at(p - 1) for p in best.positions], best.statistic)
    return _outcome(
        TestFamily.LUMSDAINE_PAPELL,
        s,
        spec.spec_key,
        best,
        level,
        cache_dir,
        s.nobs,
        dummy_prefixes=("DU", "DT"),
        evaluated=evaluated,
        skipped=skipped,
    )


def lumsdaine_papell_at(
    s: Series,
    break_years: tuple[int, int],
    max_lag: int = 8,
    selection: LagSelection | str = "gts:0.10",
    *,
    kind: BreakKind = BreakKind.BOTH,
) -> UnitRootOutcome:
    spec = _lp_spec(kind, max_lag, selection)
    _check_length(s, max_lag)
    positions = tuple(s.position_of(year) for year in break_years)
    fit = _evaluator(spec, pulses=False)(s.values, positions)
    return _outcome(TestFamily.LUMSDAINE_PAPELL, s, spec.spec_key, fit, 0.95, None, s.nobs, dummy_prefixes=("DU", "DT"))


def _clemente_evaluator(variant: BreakStyle, max_lag: int, selection: LagSelection) -> Callable:
    def run(y: np.ndarray, positions: Sequence[int]) -> _Fit:
        if variant is BreakStyle.ADDITIVE:
            return _evaluate_additive(y, Deterministic.CONSTANT, BreakKind.INTERCEPT, positions, max_lag, selection)
        return _evaluate_innovational(y, Deterministic.CONSTANT, BreakKind.INTERCEPT, positions, max_lag, selection)

    return run


def _clemente_family(variant: BreakStyle) -> TestFamily:
    if variant is BreakStyle.NONE:
        raise InvalidModelCombination("the double mean shift test is either IO or AO")
    return TestFamily.CLEMENTE_AO if variant is BreakStyle.ADDITIVE else TestFamily.CLEMENTE_IO


def clemente(
    s: Series,
    variant: BreakStyle | str = BreakStyle.INNOVATIONAL,
    trim: float = 0.05,
    max_lag: int = 4,
    selection: LagSelection | str = "gts:0.10",
    *,
    level: float = 0.95,
    cache_dir: Path | None = None,
) -> UnitRootOutcome:
    """Double mean shift test.

    IO: ``dy_t = mu + (rho - 1) y_{t-1} + d1 DTB1 + d2 DTB2 + d3 DU1 + d4 DU2 + lags``
    with both dummies active after their break. AO: ``y`` is first regressed
    on a constant and the two shifts, then the residual is tested with pulse
    lags and no deterministic terms.
    """
    variant = BreakStyle.from_string(variant)
    family = _clemente_family(variant)
    selection = LagSelection.parse(selection)
    _check_length(s, max_lag)
    pairs = _pair_candidates(s.nobs, trim)
    best, evaluated, skipped = _search(
        s.values, pairs, _clemente_evaluator(variant, max_lag, selection), f"Clemente-{variant.value} {s.name}"
    )
    logger.info(
        "Clemente-%s %s: breaks %s, t=%.4f",
        variant.value,
        s.name,
        [s.year_at(p - 1) for p in best.positions],
        best.statistic,
    )
    return _outcome(
        family,
        s,
        "c:intercept",
        best,
        level,
        cache_dir,
        s.nobs,
        dummy_prefixes=("DU",),
        evaluated=evaluated,
        skipped=skipped,
    )


def clemente_at(
    s: Series,
    variant: BreakStyle | str,
    break_years: tuple[int, int],
    max_lag: int = 4,
    selection: LagSelection | str = "gts:0.10",
) -> UnitRootOutcome:
    variant = BreakStyle.from_string(variant)
    family = _clemente_family(variant)
    _check_length(s, max_lag)
    positions = tuple(s.position_of(year) for year in break_years)
    fit = _clemente_evaluator(variant, max_lag, LagSelection.parse(selection))(s.values, positions)
    return _outcome(family, s, "c:intercept", fit, 0.95, None, s.nobs, dummy_prefixes=("DU",))
