"""OLS engine with classical and Bartlett/Newey-West long-run variance."""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
import statsmodels.api as sm
from scipy import linalg, stats
from statsmodels.stats.stattools import jarque_bera as _jarque_bera

from .errors import DimensionMismatch, RankDeficient, SeriesTooShort

logger = logging.getLogger(__name__)

# Relative singular-value threshold below which a design is rank deficient.
RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class DesignMatrix:
    """Named regressor columns of equal length."""

    names: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[1] != len(self.names):
            raise DimensionMismatch(
                f"{len(self.names)} column names for a design of shape {data.shape}"
            )
        if len(set(self.names)) != len(self.names):
            raise DimensionMismatch(f"duplicate column names in {self.names}")
        object.__setattr__(self, "data", data)

    @classmethod
    def from_columns(cls, columns: Mapping[str, np.ndarray]) -> DesignMatrix:
        if not columns:
            raise DimensionMismatch("a design needs at least one column")
        arrays = [np.asarray(v, dtype=float).reshape(-1) for v in columns.values()]
        lengths = {a.size for a in arrays}
        if len(lengths) != 1:
            raise DimensionMismatch(f"columns have unequal lengths {sorted(lengths)}")
        return cls(tuple(columns), np.column_stack(arrays))

    def extend(self, columns: Mapping[str, np.ndarray]) -> DesignMatrix:
        if not columns:
            return self
        extra = DesignMatrix.from_columns(columns)
        if extra.nobs != self.nobs:
            raise DimensionMismatch(f"cannot extend {self.nobs} rows with {extra.nobs}")
        return DesignMatrix(self.names + extra.names, np.column_stack([self.data, extra.data]))

    @property
    def nobs(self) -> int:
        return self.data.shape[0]

    @property
    def ncols(self) -> int:
        return self.data.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.names.index(name)]


@dataclass(frozen=True)
class InfoCriteria:
    aic: float
    sic: float
    hq: float

    def get(self, criterion: str) -> float:
        return {"aic": self.aic, "sic": self.sic, "bic": self.sic, "hq": self.hq}[criterion]


@dataclass(frozen=True)
class OlsFit:
    names: tuple[str, ...]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    t_stats: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    nobs: int
    rss: float
    sigma2: float
    r2: float
    r2_adjusted: float
    ic: InfoCriteria
    cov_unscaled: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.names)

    @property
    def df_resid(self) -> int:
        return self.nobs - self.k

    @property
    def regression_se(self) -> float:
        return math.sqrt(self.sigma2)

    def _index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no regressor named {name!r}; have {self.names}") from None

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self._index(name)])

    def standard_error(self, name: str) -> float:
        return float(self.standard_errors[self._index(name)])

    def t_stat(self, name: str) -> float:
        return float(self.t_stats[self._index(name)])

    def p_value(self, name: str) -> float:
        return float(2.0 * stats.t.sf(abs(self.t_stat(name)), self.df_resid))


@dataclass(frozen=True)
class LongRunVariance:
    value: float
    bandwidth: int
    kernel: str = "bartlett"


def _collinear_columns(design: DesignMatrix, vt: np.ndarray, singular: np.ndarray) -> list[str]:
    padded = np.zeros(design.ncols)
    padded[: singular.size] = singular
    null_rows = vt[padded <= RANK_TOLERANCE * padded[0]]
    involved = np.any(np.abs(null_rows) > 1e-8, axis=0)
    return [name for name, hit in zip(design.names, involved, strict=True) if hit]


def check_rank(design: DesignMatrix) -> None:
    """Raise :class:`RankDeficient` when a singular value is negligible."""
    scale = np.sqrt(np.sum(design.data**2, axis=0))
    scale[scale == 0.0] = 1.0
    _, singular, vt = linalg.svd(design.data / scale, full_matrices=True)
    zero_column = np.all(design.data == 0.0, axis=0)
    if zero_column.any():
        raise RankDeficient([n for n, z in zip(design.names, zero_column, strict=True) if z])
    if singular.size < design.ncols or singular[-1] <= RANK_TOLERANCE * singular[0]:
        raise RankDeficient(_collinear_columns(design, vt, singular))


def info_criteria(rss: float, nobs: int, k: int) -> InfoCriteria:
    """Log-variance information criteria with sigma^2 = RSS / T."""
    log_sigma2 = math.log(rss / nobs) if rss > 0 else -math.inf
    return InfoCriteria(
        aic=log_sigma2 + 2.0 * k / nobs,
        sic=log_sigma2 + k * math.log(nobs) / nobs,
        hq=log_sigma2 + 2.0 * k * math.log(math.log(nobs)) / nobs,
    )


def ols(y: np.ndarray, design: DesignMatrix) -> OlsFit:
    """Least squares through statsmodels' QR path.

    R-squared is always measured about the mean, constant or not.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size != design.nobs:
        raise DimensionMismatch(f"response has {y.size} rows, design has {design.nobs}")
    nobs, k = design.nobs, design.ncols
    if nobs <= k:
        raise DimensionMismatch(f"{nobs} observations cannot identify {k} coefficients")
    check_rank(design)

    result = sm.OLS(y, design.data).fit(method="qr")
    rss = float(result.ssr)
    centered = y - y.mean()
    tss = float(centered @ centered)
    r2 = 1.0 - rss / tss if tss > 0 else float("nan")
    r2_adjusted = 1.0 - (1.0 - r2) * (nobs - 1) / (nobs - k) if tss > 0 else float("nan")

    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = np.asarray(result.tvalues, dtype=float)
    return OlsFit(
        names=design.names,
        coefficients=np.asarray(result.params, dtype=float),
        standard_errors=np.asarray(result.bse, dtype=float),
        t_stats=t_stats,
        residuals=np.asarray(result.resid, dtype=float),
        fitted=np.asarray(result.fittedvalues, dtype=float),
        nobs=nobs,
        rss=rss,
        sigma2=float(result.scale),
        r2=r2,
        r2_adjusted=r2_adjusted,
        ic=info_criteria(rss, nobs, k),
        cov_unscaled=np.asarray(result.normalized_cov_params, dtype=float),
    )


# ============== Long-run variance ==============


def autocovariances(residuals: np.ndarray, max_lag: int, demean: bool = False) -> np.ndarray:
    """Autocovariances gamma_0..gamma_max_lag with divisor T."""
    e = np.asarray(residuals, dtype=float).reshape(-1)
    if demean:
        e = e - e.mean()
    nobs = e.size
    return np.array([e[j:] @ e[: nobs - j] / nobs for j in range(max_lag + 1)])


def fixed_bandwidth(nobs: int) -> int:
    return int(math.floor(4.0 * (nobs / 100.0) ** (2.0 / 9.0)))


def newey_west_bandwidth(residuals: np.ndarray, rule: str = "fixed") -> int:
    """Bartlett bandwidth from the fixed rule or the Newey-West automatic plug-in."""
    e = np.asarray(residuals, dtype=float).reshape(-1)
    nobs = e.size
    initial = fixed_bandwidth(nobs)
    if rule == "fixed":
        return min(initial, nobs - 1)
    if rule != "automatic":
        raise ValueError(f"unknown bandwidth rule {rule!r}")
    gamma = autocovariances(e, min(initial, nobs - 1))
    s0 = gamma[0] + 2.0 * gamma[1:].sum()
    s1 = 2.0 * np.sum(np.arange(1, gamma.size) * gamma[1:])
    if s0 <= 0:
        return 0
    scale = 1.1447 * ((s1 / s0) ** 2) ** (1.0 / 3.0)
    bandwidth = int(math.floor(scale * nobs ** (1.0 / 3.0)))
    return max(0, min(bandwidth, nobs - 1))


def newey_west_lrv(
    residuals: np.ndarray,
    bandwidth: int | None = None,
    demean: bool = False,
) -> LongRunVariance:
    """Bartlett-kernel long-run variance ``g0 + 2 sum (1 - j/(m+1)) g_j``."""
    e = np.asarray(residuals, dtype=float).reshape(-1)
    if e.size < 2:
        raise SeriesTooShort(2, e.size, "long-run variance")
    if bandwidth is None:
        bandwidth = fixed_bandwidth(e.size)
    if bandwidth < 0:
        raise ValueError("bandwidth must be non-negative")
    bandwidth = min(bandwidth, e.size - 1)
    gamma = autocovariances(e, bandwidth, demean=demean)
    weights = 1.0 - np.arange(1, bandwidth + 1) / (bandwidth + 1.0)
    value = float(gamma[0] + 2.0 * np.sum(weights * gamma[1:]))
    return LongRunVariance(value=max(value, 0.0), bandwidth=bandwidth)


# ============== Normality ==============


@dataclass(frozen=True)
class JarqueBera:
    statistic: float
    p_value: float
    skewness: float
    kurtosis: float


def jarque_bera(residuals: np.ndarray) -> JarqueBera:
    e = np.asarray(residuals, dtype=float).reshape(-1)
    nobs = e.size
    if nobs < 4:
        raise SeriesTooShort(4, nobs, "Jarque-Bera test")
    if np.ptp(e) == 0.0:
        return JarqueBera(statistic=float("nan"), p_value=float("nan"), skewness=0.0, kurtosis=float("nan"))
    statistic, p_value, skewness, kurtosis = _jarque_bera(e)
    return JarqueBera(
        statistic=float(statistic),
        p_value=float(p_value),
        skewness=float(skewness),
        kurtosis=float(kurtosis),
    )


def significance_stars(p_value: float) -> str:
    """``***``, ``**`` or ``*`` for significance at 1%, 5% or 10%."""
    if not math.isfinite(p_value):
        return ""
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.10:
        return "*"
    return ""
