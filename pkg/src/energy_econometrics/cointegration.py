"""VAR lag selection and Johansen cointegration tests with break regressors.

Deterministic terms, break dummies and their trend interactions enter the
VAR unrestricted and are concentrated out together with the lagged
differences before the reduced-rank eigenproblem is solved.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import linalg
from statsmodels.tsa.api import VAR

from .critical_values.tables import TestFamily, critical_values_for
from .errors import ConfigError, DimensionMismatch, MissingCriticalValues, SampleTooSmall
from .regression import DesignMatrix, check_rank
from .series import Deterministic, Series, align, break_interaction, level_shift, trend_column

logger = logging.getLogger(__name__)

# Eigenvalues are kept strictly below one.
EIGENVALUE_CEILING = 1.0 - 1e-12

CRITERIA = ("aic", "sic", "hq")


def exogenous_set(
    start_year: int,
    nobs: int,
    break_years: Sequence[int] = (),
    *,
    dummies: bool = True,
    interactions: bool = True,
    trend: bool = False,
    interaction_form: str = "ramp",
) -> dict[str, np.ndarray]:
    """Break dummies ``B_i``, interactions ``T(B_i)`` and the trend ``T``."""
    columns: dict[str, np.ndarray] = {}
    if trend:
        columns["T"] = trend_column(nobs)
    for year in break_years:
        position = year - start_year + 1
        if dummies:
            columns[f"B_{year}"] = level_shift(nobs, position)
        if interactions:
            columns[f"T(B_{year})"] = break_interaction(nobs, position, interaction_form)
    return columns


@dataclass(frozen=True)
class VarSpec:
    endogenous: tuple[Series, ...]
    lag_order: int = 1
    deterministic: Deterministic = Deterministic.CONSTANT
    exogenous: Mapping[str, np.ndarray] = field(default_factory=dict)
    break_years: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if len(self.endogenous) < 2:
            raise DimensionMismatch("a VAR needs at least two endogenous series")
        names = [s.name for s in self.endogenous]
        if len(set(names)) != len(names):
            raise DimensionMismatch(f"duplicate endogenous series in {names}")
        first = self.endogenous[0]
        if any(s.start_year != first.start_year or s.nobs != first.nobs for s in self.endogenous):
            raise DimensionMismatch("endogenous series must cover identical years; align them first")
        for name, values in self.exogenous.items():
            if np.asarray(values).size != first.nobs:
                raise DimensionMismatch(f"exogenous column {name!r} does not match the {first.nobs}-year sample")
        if self.lag_order < 1:
            raise ConfigError("VAR lag order must be at least 1", "lag_order")
        if 2 * self.n * self.lag_order >= self.nobs:
            raise SampleTooSmall(2 * self.n * self.lag_order + 1, self.nobs, f"VAR({self.lag_order}) in {self.n} variables")

    @classmethod
    def build(
        cls,
        endogenous: Sequence[Series],
        lag_order: int = 1,
        deterministic: Deterministic | str = Deterministic.CONSTANT,
        break_years: Sequence[int] = (),
        *,
        dummies: bool = True,
        interactions: bool = True,
        trend: bool = False,
        interaction_form: str = "ramp",
    ) -> VarSpec:
        """Align the series and attach the break exogenous set."""
        aligned = align(*endogenous)
        first = aligned[0]
        exogenous = exogenous_set(
            first.start_year,
            first.nobs,
            break_years,
            dummies=dummies,
            interactions=interactions,
            trend=trend,
            interaction_form=interaction_form,
        )
        return cls(
            endogenous=aligned,
            lag_order=lag_order,
            deterministic=Deterministic.from_string(deterministic),
            exogenous=exogenous,
            break_years=tuple(break_years),
        )

    @property
    def n(self) -> int:
        return len(self.endogenous)

    @property
    def nobs(self) -> int:
        return self.endogenous[0].nobs

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.endogenous)

    @property
    def levels(self) -> np.ndarray:
        return np.column_stack([s.values for s in self.endogenous])

    @property
    def break_fractions(self) -> tuple[float, ...]:
        start = self.endogenous[0].start_year
        return tuple((year - start + 1) / self.nobs for year in self.break_years)

    @property
    def exogenous_signature(self) -> str:
        if self.break_years:
            return "breaks"
        return "none" if not self.exogenous else "custom"

    def with_lag_order(self, lag_order: int) -> VarSpec:
        return VarSpec(self.endogenous, lag_order, self.deterministic, self.exogenous, self.break_years)


def _deterministic_columns(spec: VarSpec, rows: np.ndarray) -> dict[str, np.ndarray]:
    columns: dict[str, np.ndarray] = {}
    if spec.deterministic.has_constant:
        columns["const"] = np.ones(rows.size)
    if spec.deterministic.has_trend:
        columns["trend"] = trend_column(spec.nobs)[rows]
    for name, values in spec.exogenous.items():
        columns[name] = np.asarray(values, dtype=float)[rows]
    return columns


# ============== Lag selection ==============


@dataclass(frozen=True)
class LagCriteriaRow:
    lag_order: int
    log_det: float
    aic: float
    sic: float
    hq: float

    def to_dict(self) -> dict:
        return {"lag_order": self.lag_order, "log_det": self.log_det, "aic": self.aic, "sic": self.sic, "hq": self.hq}


@dataclass(frozen=True)
class VarLagSelection:
    rows: tuple[LagCriteriaRow, ...]
    chosen: Mapping[str, int]
    nobs: int

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "chosen": dict(self.chosen), "nobs": self.nobs}


def var_lag_select(spec: VarSpec, max_lag: int = 4) -> VarLagSelection:
    """Fit VAR(1)..VAR(max_lag) on a common sample and rank by each criterion.

    The criteria are ``log|Sigma| + penalty`` with ``Sigma = E'E / T`` and
    ``n (n p + d)`` estimated coefficients, ``d`` counting deterministic and
    exogenous columns. A VAR(0) is never a candidate.
    """
    if max_lag < 1:
        raise ConfigError("max_lag must be at least 1", "max_lag")
    levels = spec.levels
    rows = np.arange(max_lag, spec.nobs)
    n_eff = rows.size
    n = spec.n
    columns = _deterministic_columns(spec, rows)
    for j in range(1, max_lag + 1):
        for i, name in enumerate(spec.names):
            columns[f"{name}.L{j}"] = levels[rows - j, i]
    widest = DesignMatrix.from_columns(columns)
    if widest.ncols >= n_eff:
        raise SampleTooSmall(widest.ncols + 1, n_eff, f"VAR({max_lag}) lag selection")
    check_rank(widest)

    exog = None
    if spec.exogenous:
        exog = np.column_stack([np.asarray(v, dtype=float) for v in spec.exogenous.values()])
    order = VAR(levels, exog=exog).select_order(maxlags=max_lag, trend=spec.deterministic.value)
    # statsmodels starts at VAR(0) whenever there is a deterministic or exogenous term
    first = 0 if exog is not None or spec.deterministic is not Deterministic.NONE else 1
    d = widest.ncols - n * max_lag
    table = []
    for p in range(1, max_lag + 1):
        sic = float(order.ics["bic"][p - first])
        params = n * (n * p + d)
        table.append(
            LagCriteriaRow(
                lag_order=p,
                log_det=sic - params * math.log(n_eff) / n_eff,
                aic=float(order.ics["aic"][p - first]),
                sic=sic,
                hq=float(order.ics["hqic"][p - first]),
            )
        )
    chosen = {c: table[int(np.argmin([getattr(row, c) for row in table]))].lag_order for c in CRITERIA}
    logger.info("VAR lag selection for %s: %s", ",".join(spec.names), chosen)
    return VarLagSelection(rows=tuple(table), chosen=chosen, nobs=n_eff)


# ============== Johansen ==============


@dataclass(frozen=True)
class JohansenOutcome:
    names: tuple[str, ...]
    eigenvalues: np.ndarray
    trace_stats: np.ndarray
    max_eigen_stats: np.ndarray
    trace_critical_values: tuple[Mapping[float, float], ...]
    max_critical_values: tuple[Mapping[float, float], ...]
    eigenvectors: np.ndarray
    nobs: int
    lag_order: int
    level: float
    break_years: tuple[int, ...] = ()
    decided_rank: int | None = None

    @property
    def n(self) -> int:
        return len(self.names)

    def trace_decisions(self, level: float | None = None) -> tuple[str, ...]:
        return _labels(self.trace_stats, self.trace_critical_values, self.level if level is None else level)

    def max_eigen_decisions(self, level: float | None = None) -> tuple[str, ...]:
        return _labels(self.max_eigen_stats, self.max_critical_values, self.level if level is None else level)

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "eigenvalues": self.eigenvalues.tolist(),
            "trace_stats": self.trace_stats.tolist(),
            "max_eigen_stats": self.max_eigen_stats.tolist(),
            "trace_critical_values": [{f"{k:.2f}": v for k, v in sorted(cv.items())} for cv in self.trace_critical_values],
            "max_critical_values": [{f"{k:.2f}": v for k, v in sorted(cv.items())} for cv in self.max_critical_values],
            "trace_decisions": list(self.trace_decisions()),
            "max_eigen_decisions": list(self.max_eigen_decisions()),
            "cointegrating_vectors": self.eigenvectors.T.tolist(),
            "nobs": self.nobs,
            "lag_order": self.lag_order,
            "level": self.level,
            "break_years": list(self.break_years),
            "decided_rank": self.decided_rank,
        }


def _critical_value(table: Mapping[float, float], level: float) -> float | None:
    for tabulated, value in table.items():
        if abs(tabulated - level) < 1e-9:
            return value
    return None


def _labels(stats_: np.ndarray, tables: Sequence[Mapping[float, float]], level: float) -> tuple[str, ...]:
    labels = []
    for statistic, table in zip(stats_, tables, strict=True):
        critical = _critical_value(table, level)
        if critical is None:
            labels.append("no critical value")
        else:
            labels.append("rejection" if statistic > critical else "acceptance")
    return tuple(labels)


def _concentrate(target: np.ndarray, regressors: DesignMatrix | None) -> np.ndarray:
    if regressors is None:
        return target
    coefficients, *_ = linalg.lstsq(regressors.data, target)
    return target - regressors.data @ coefficients


def _reduced_rank(r0: np.ndarray, r1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and vectors of ``S10 S00^-1 S01 v = lambda S11 v``, descending."""
    nobs = r0.shape[0]
    s00 = r0.T @ r0 / nobs
    s11 = r1.T @ r1 / nobs
    s01 = r0.T @ r1 / nobs
    lower = linalg.cholesky(s11, lower=True)
    # whitened form W = L^-1 S10 S00^-1 S01 L^-T is symmetric
    middle = s01.T @ linalg.solve(s00, s01, assume_a="pos")
    left = linalg.solve_triangular(lower, middle, lower=True)
    whitened = linalg.solve_triangular(lower, left.T, lower=True).T
    whitened = 0.5 * (whitened + whitened.T)
    values, vectors = linalg.eigh(whitened)
    order = np.argsort(values)[::-1]
    values = np.clip(values[order], 0.0, EIGENVALUE_CEILING)
    vectors = linalg.solve_triangular(lower.T, vectors[:, order], lower=False)
    return values, vectors


def _normalise(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for j in range(out.shape[1]):
        if out[0, j] != 0.0:
            out[:, j] /= out[0, j]
    return out


def johansen_test(
    spec: VarSpec,
    *,
    level: float = 0.90,
    cache_dir: Path | None = None,
) -> JohansenOutcome:
    """Trace and maximum-eigenvalue statistics for ranks ``0..n-1``.

    ``trace(r) = -T sum_{i>r} log(1 - lambda_i)``, ``max(r) = -T log(1 - lambda_{r+1})``
    with ``T`` the effective sample after ``lag_order`` initial observations.
    """
    levels = spec.levels
    p = spec.lag_order
    rows = np.arange(p, spec.nobs)
    n_eff = rows.size
    diffs = np.diff(levels, axis=0, prepend=np.nan)

    columns = _deterministic_columns(spec, rows)
    for j in range(1, p):
        for i, name in enumerate(spec.names):
            columns[f"D.{name}.L{j}"] = diffs[rows - j, i]
    regressors = DesignMatrix.from_columns(columns) if columns else None
    needed = (regressors.ncols if regressors else 0) + spec.n + 1
    if n_eff <= needed:
        raise SampleTooSmall(needed + 1, n_eff, "Johansen concentration regressions")
    if regressors is not None:
        check_rank(regressors)

    r0 = _concentrate(diffs[rows], regressors)
    r1 = _concentrate(levels[rows - 1], regressors)
    eigenvalues, vectors = _reduced_rank(r0, r1)

    max_eigen = -n_eff * np.log1p(-eigenvalues)
    trace = np.cumsum(max_eigen[::-1])[::-1]

    trace_cv = []
    max_cv = []
    for r in range(spec.n):
        key = f"{spec.deterministic.value}:{spec.exogenous_signature}:{spec.n - r}"
        trace_cv.append(critical_values_for(TestFamily.JOHANSEN_TRACE, key, spec.nobs, spec.break_fractions, cache_dir)[0])
        max_cv.append(critical_values_for(TestFamily.JOHANSEN_MAX, key, spec.nobs, spec.break_fractions, cache_dir)[0])

    outcome = JohansenOutcome(
        names=spec.names,
        eigenvalues=eigenvalues,
        trace_stats=trace,
        max_eigen_stats=max_eigen,
        trace_critical_values=tuple(trace_cv),
        max_critical_values=tuple(max_cv),
        eigenvectors=_normalise(vectors),
        nobs=n_eff,
        lag_order=p,
        level=level,
        break_years=spec.break_years,
    )
    try:
        rank = decide_rank(outcome, level)
    except MissingCriticalValues as exc:
        logger.warning("Johansen %s: %s", ",".join(spec.names), exc)
        return outcome
    logger.info("Johansen %s (breaks %s): rank %d at %.0f%%", ",".join(spec.names), list(spec.break_years), rank, 100 * level)
    return replace(outcome, decided_rank=rank)


def decide_rank(outcome: JohansenOutcome, level: float = 0.90, statistic: str = "trace") -> int:
    """Sequential test of ``r = 0, 1, ...``; stops at the first acceptance."""
    if statistic == "trace":
        stats_, tables = outcome.trace_stats, outcome.trace_critical_values
    elif statistic == "max":
        stats_, tables = outcome.max_eigen_stats, outcome.max_critical_values
    else:
        raise ValueError(f"unknown statistic {statistic!r}")
    for r, (value, table) in enumerate(zip(stats_, tables, strict=True)):
        critical = _critical_value(table, level)
        if critical is None:
            raise MissingCriticalValues(f"no {statistic} critical value at {level:.0%} for r <= {r}")
        if value <= critical:
            return r
    return outcome.n
