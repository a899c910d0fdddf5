"""Dynamic OLS estimation of long-run elasticities.

The levels equation is augmented with ``dx_{t-i}`` for ``i = -leads..lags``
and fitted by OLS; with no leads and no lags it is the plain levels regression
on the full sample. Every standard error is then rescaled by
``sqrt(omega / sigma2)`` where ``omega`` is the Bartlett long-run variance
of the residuals and ``sigma2`` the classical residual variance.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import ConfigError, SampleTooSmall
from .regression import (
    DesignMatrix,
    JarqueBera,
    LongRunVariance,
    jarque_bera,
    newey_west_lrv,
    ols,
    significance_stars,
)
from .series import Series, align, break_interaction, level_shift, trend_column

logger = logging.getLogger(__name__)

DEFAULT_UNITARY_BAND = 0.25


@dataclass(frozen=True)
class DolsBreak:
    year: int
    intercept_dummy: bool = True
    trend_interaction: bool = True


@dataclass(frozen=True)
class DolsSpec:
    response: Series
    regressors: tuple[Series, ...]
    constant: bool = True
    trend: bool = True
    breaks: tuple[DolsBreak, ...] = ()
    leads: int = 0
    lags: int = 1
    interaction_form: str = "ramp"
    long_run_variance: str = "bartlett"
    bandwidth: int | None = None
    name: str = "model"

    def __post_init__(self) -> None:
        if not self.regressors:
            raise ConfigError("DOLS needs at least one regressor", "regressors")
        if self.leads < 0 or self.lags < 0:
            raise ConfigError("leads and lags must be non-negative", "leads")
        if self.long_run_variance not in ("bartlett", "iid"):
            raise ConfigError(f"unknown long-run variance {self.long_run_variance!r}", "long_run_variance")
        if self.interaction_form not in ("ramp", "product"):
            raise ConfigError(f"unknown interaction form {self.interaction_form!r}", "interaction_form")
        years = [b.year for b in self.breaks]
        if len(set(years)) != len(years):
            raise ConfigError(f"duplicate break years {years}", "breaks")


@dataclass(frozen=True)
class DolsFit:
    model: str
    response: str
    names: tuple[str, ...]
    roles: Mapping[str, str]
    coefficients: np.ndarray
    classical_standard_errors: np.ndarray
    hac_standard_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    nobs: int
    first_year: int
    last_year: int
    r2: float
    r2_adjusted: float
    regression_se: float
    long_run_variance: LongRunVariance
    jarque_bera: JarqueBera
    residuals: np.ndarray = field(repr=False)

    def _index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no coefficient named {name!r}; have {self.names}") from None

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self._index(name)])

    def standard_error(self, name: str) -> float:
        return float(self.hac_standard_errors[self._index(name)])

    def t_stat(self, name: str) -> float:
        return float(self.t_stats[self._index(name)])

    def p_value(self, name: str) -> float:
        return float(self.p_values[self._index(name)])

    def stars(self, name: str) -> str:
        return significance_stars(self.p_value(name))

    def _by_role(self, role: str) -> dict[str, float]:
        return {n: self.coefficient(n) for n in self.names if self.roles[n] == role}

    @property
    def long_run_coefficients(self) -> dict[str, float]:
        return self._by_role("long_run")

    @property
    def deterministic_coefficients(self) -> dict[str, float]:
        return self._by_role("deterministic")

    @property
    def nuisance_coefficients(self) -> dict[str, float]:
        """Lead and lag terms; not interpretable on their own."""
        return self._by_role("nuisance")

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "response": self.response,
            "nobs": self.nobs,
            "sample": [self.first_year, self.last_year],
            "coefficients": [
                {
                    "name": n,
                    "role": self.roles[n],
                    "coefficient": self.coefficient(n),
                    "standard_error": self.standard_error(n),
                    "classical_standard_error": float(self.classical_standard_errors[i]),
                    "t_stat": self.t_stat(n),
                    "p_value": self.p_value(n),
                    "stars": self.stars(n),
                }
                for i, n in enumerate(self.names)
            ],
            "r2": self.r2,
            "r2_adjusted": self.r2_adjusted,
            "regression_se": self.regression_se,
            "long_run_variance": self.long_run_variance.value,
            "bandwidth": self.long_run_variance.bandwidth,
            "jarque_bera": self.jarque_bera.statistic,
            "jarque_bera_p_value": self.jarque_bera.p_value,
        }


def _difference_name(name: str, offset: int) -> str:
    if offset == 0:
        return f"D.{name}"
    return f"D.{name}.L{offset}" if offset > 0 else f"D.{name}.F{-offset}"


def dols_fit(spec: DolsSpec) -> DolsFit:
    aligned = align(spec.response, *spec.regressors)
    response, regressors = aligned[0], aligned[1:]
    nobs = response.nobs
    dynamic = spec.leads + spec.lags > 0
    first = spec.lags + 1 if dynamic else 0
    last = nobs - 1 - spec.leads
    rows = np.arange(first, last + 1)

    columns: dict[str, np.ndarray] = {}
    roles: dict[str, str] = {}
    for s in regressors:
        columns[s.name] = s.values[rows]
        roles[s.name] = "long_run"
    if spec.constant:
        columns["C"] = np.ones(rows.size)
        roles["C"] = "deterministic"
    if spec.trend:
        columns["T"] = trend_column(nobs)[rows]
        roles["T"] = "deterministic"
    for brk in spec.breaks:
        position = response.position_of(brk.year)
        if brk.intercept_dummy:
            columns[f"B_{brk.year}"] = level_shift(nobs, position)[rows]
            roles[f"B_{brk.year}"] = "deterministic"
        if brk.trend_interaction:
            columns[f"T(B_{brk.year})"] = break_interaction(nobs, position, spec.interaction_form)[rows]
            roles[f"T(B_{brk.year})"] = "deterministic"
    for s in regressors if dynamic else ():
        diffs = np.diff(s.values, prepend=np.nan)
        for offset in range(-spec.leads, spec.lags + 1):
            name = _difference_name(s.name, offset)
            columns[name] = diffs[rows - offset]
            roles[name] = "nuisance"

    usable = rows.size
    if usable <= len(columns):
        raise SampleTooSmall(len(columns) + 1, usable, f"DOLS {spec.name!r}")

    fit = ols(response.values[rows], DesignMatrix.from_columns(columns))
    if spec.long_run_variance == "iid":
        long_run = LongRunVariance(value=fit.sigma2, bandwidth=0, kernel="iid")
    else:
        long_run = newey_west_lrv(fit.residuals, spec.bandwidth)
    scale = math.sqrt(long_run.value / fit.sigma2) if fit.sigma2 > 0 else float("nan")
    hac = fit.standard_errors * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = fit.coefficients / hac
    p_values = 2.0 * stats.t.sf(np.abs(t_stats), fit.df_resid)

    logger.info(
        "DOLS %s: %d observations (%d-%d), bandwidth %d, omega/sigma2 %.4f",
        spec.name,
        usable,
        response.year_at(first),
        response.year_at(last),
        long_run.bandwidth,
        scale**2,
    )
    return DolsFit(
        model=spec.name,
        response=response.name,
        names=fit.names,
        roles=roles,
        coefficients=fit.coefficients,
        classical_standard_errors=fit.standard_errors,
        hac_standard_errors=hac,
        t_stats=t_stats,
        p_values=p_values,
        nobs=usable,
        first_year=response.year_at(first),
        last_year=response.year_at(last),
        r2=fit.r2,
        r2_adjusted=fit.r2_adjusted,
        regression_se=fit.regression_se,
        long_run_variance=long_run,
        jarque_bera=jarque_bera(fit.residuals),
        residuals=fit.residuals,
    )


# ============== Elasticities ==============


@dataclass(frozen=True)
class Elasticity:
    regressor: str
    label: str
    coefficient: float
    standard_error: float
    p_value: float
    significant: bool
    classification: str
    direction: str

    def to_dict(self) -> dict:
        return {
            "regressor": self.regressor,
            "label": self.label,
            "coefficient": self.coefficient,
            "standard_error": self.standard_error,
            "p_value": self.p_value,
            "significant": self.significant,
            "classification": self.classification,
            "direction": self.direction,
        }


def classify_elasticity(coefficient: float, significant: bool, unitary_band: float = DEFAULT_UNITARY_BAND) -> str:
    if not significant:
        return "none"
    magnitude = abs(coefficient)
    if abs(magnitude - 1.0) <= unitary_band:
        return "unitary"
    return "elastic" if magnitude > 1.0 else "inelastic"


def elasticity_report(
    fit: DolsFit,
    level: float = 0.95,
    labels: Mapping[str, str] | None = None,
    unitary_band: float = DEFAULT_UNITARY_BAND,
) -> tuple[Elasticity, ...]:
    """Label each long-run coefficient as elastic, unitary, inelastic or none."""
    labels = labels or {}
    report = []
    for name, coefficient in fit.long_run_coefficients.items():
        p_value = fit.p_value(name)
        significant = bool(math.isfinite(p_value) and p_value < 1.0 - level)
        if coefficient > 0:
            direction = "direct"
        elif coefficient < 0:
            direction = "inverse"
        else:
            direction = "none"
        report.append(
            Elasticity(
                regressor=name,
                label=labels.get(name, name),
                coefficient=coefficient,
                standard_error=fit.standard_error(name),
                p_value=p_value,
                significant=significant,
                classification=classify_elasticity(coefficient, significant, unitary_band),
                direction=direction,
            )
        )
    return tuple(report)
