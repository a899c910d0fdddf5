"""Monte Carlo null distributions for every test family.

Replicate ``i`` draws from ``SeedSequence(seed, spawn_key=(i,))``, so the
simulated statistics depend only on ``(seed, replications, dgp)`` and not on
how replicates are spread over worker processes.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import signal, stats

from ..errors import ConfigError, InfeasibleSpec, NumericalError
from .tables import LEVELS, CriticalValueSurface, Provenance, TestFamily

logger = logging.getLogger(__name__)

MIN_REPLICATIONS = 1000

PROCESSES = ("random_walk", "random_walk_with_drift", "var_unit_root")


@dataclass(frozen=True)
class NullDgpSpec:
    """Data-generating process under the null.

    ``(1 - L) y_t = drift + C(L) e_t`` with ``C(L) = (1 + ma(L)) / (1 - ar(L))``
    and ``e_t`` i.i.d. standard normal. ``var_unit_root`` stacks ``n - rank``
    independent random walks and ``rank`` stationary series, so the system has
    exactly ``rank`` cointegrating relations.
    """

    process: str = "random_walk"
    nobs: int = 100
    n: int = 1
    rank: int = 0
    drift: float = 0.0
    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    break_fractions: tuple[float, ...] = ()
    burn_in: int = 50

    def __post_init__(self) -> None:
        if self.process not in PROCESSES:
            raise ConfigError(f"unknown null process {self.process!r}", "process")
        if self.nobs < 20:
            raise ConfigError("simulated samples need at least 20 observations", "nobs")
        if self.process == "var_unit_root" and not 0 <= self.rank < self.n:
            raise ConfigError(f"rank {self.rank} outside [0, {self.n})", "rank")
        if self.process != "var_unit_root" and self.n != 1:
            raise ConfigError("univariate processes have n = 1", "n")
        for fraction in self.break_fractions:
            if not 0.0 < fraction < 1.0:
                raise InfeasibleSpec(f"break fraction {fraction} outside (0, 1)")

    def innovations(self, rng: np.random.Generator, columns: int = 1) -> np.ndarray:
        shocks = rng.standard_normal((self.nobs + self.burn_in, columns))
        if self.ar or self.ma:
            numerator = np.r_[1.0, self.ma]
            denominator = np.r_[1.0, -np.asarray(self.ar, dtype=float)]
            shocks = signal.lfilter(numerator, denominator, shocks, axis=0)
        return shocks[self.burn_in :]

    def simulate(self, rng: np.random.Generator) -> np.ndarray:
        """One sample, shape ``(nobs,)`` or ``(nobs, n)`` for systems."""
        if self.process == "var_unit_root":
            u = self.innovations(rng, self.n)
            trends = self.n - self.rank
            return np.column_stack([np.cumsum(u[:, :trends], axis=0), u[:, trends:]])
        u = self.innovations(rng)[:, 0]
        drift = self.drift if self.process == "random_walk_with_drift" else 0.0
        return np.cumsum(drift + u)

    def break_years(self) -> tuple[int, ...]:
        """Break years of a simulated sample that starts in year 1."""
        return tuple(int(math.floor(f * self.nobs + 0.5)) for f in self.break_fractions)


@dataclass(frozen=True)
class SimulationRequest:
    test_family: TestFamily
    spec_key: str
    dgp: NullDgpSpec
    options: Mapping[str, object] = field(default_factory=dict)


def _unit_root_statistic(request: SimulationRequest, y: np.ndarray) -> float:
    from .. import unit_root
    from ..series import BreakKind, Deterministic, Series

    family = request.test_family
    options = request.options
    series = Series("sim", 1, y)
    deterministic, _, kind = request.spec_key.partition(":")
    det = Deterministic.from_string(deterministic)
    max_lag = int(options.get("max_lag", 0))
    selection = str(options.get("selection", f"fixed:{max_lag}"))
    if family is TestFamily.ADF:
        return unit_root.adf(series, det, max_lag, selection).statistic
    if family is TestFamily.PP:
        bandwidth = options.get("bandwidth")
        return unit_root.phillips_perron(series, det, None if bandwidth is None else int(bandwidth)).statistic
    if family in (TestFamily.CLEMENTE_IO, TestFamily.CLEMENTE_AO):
        variant = "AO" if family is TestFamily.CLEMENTE_AO else "IO"
        trim = float(options.get("trim", 0.05))
        return unit_root.clemente(series, variant, trim, max_lag, selection).statistic
    if family is TestFamily.LUMSDAINE_PAPELL:
        trim = float(options.get("trim", 0.10))
        return unit_root.lumsdaine_papell(series, trim, max_lag, selection, kind=BreakKind(kind or "both")).statistic

    default_style = "AO" if family is TestFamily.PERRON_AO or kind == "trend" else "IO"
    style = str(options.get("break_style", default_style))
    spec = unit_root.UnitRootModelSpec(
        deterministic=det,
        break_style=unit_root.BreakStyle.from_string(style),
        break_kind=BreakKind(kind),
        lag_selection=unit_root.LagSelection.parse(selection),
        max_lag=max_lag,
    )
    if family is TestFamily.ZIVOT_ANDREWS:
        return unit_root.zivot_andrews(series, spec, float(options.get("trim", 0.15))).statistic
    years = request.dgp.break_years()
    if len(years) != 1:
        raise InfeasibleSpec(f"{family.value} needs exactly one break fraction")
    return unit_root.perron_known_break(series, spec, years[0]).statistic


def _johansen_statistic(request: SimulationRequest, x: np.ndarray) -> float:
    from ..cointegration import VarSpec, johansen_test
    from ..series import Series

    deterministic, signature, _ = request.spec_key.split(":")
    endogenous = [Series(f"x{i}", 1, x[:, i]) for i in range(x.shape[1])]
    spec = VarSpec.build(
        endogenous,
        lag_order=int(request.options.get("lag_order", 1)),
        deterministic=deterministic,
        break_years=request.dgp.break_years() if signature == "breaks" else (),
        trend=bool(request.options.get("trend", False)),
    )
    outcome = johansen_test(spec)
    rank = request.dgp.rank
    if request.test_family is TestFamily.JOHANSEN_TRACE:
        return float(outcome.trace_stats[rank])
    return float(outcome.max_eigen_stats[rank])


def _statistic(request: SimulationRequest, data: np.ndarray) -> float:
    if request.test_family in (TestFamily.JOHANSEN_TRACE, TestFamily.JOHANSEN_MAX):
        return _johansen_statistic(request, data)
    return _unit_root_statistic(request, data)


def _replicate_batch(args: tuple[SimulationRequest, int, int, int]) -> np.ndarray:
    """Picklable entry point for the process pool."""
    request, seed, start, stop = args
    out = np.empty(stop - start)
    for offset, index in enumerate(range(start, stop)):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
        out[offset] = _statistic(request, request.dgp.simulate(rng))
    return out


def _batches(replications: int, workers: int) -> Iterable[tuple[int, int]]:
    size = max(1, math.ceil(replications / (workers * 4)))
    for start in range(0, replications, size):
        yield start, min(start + size, replications)


def simulate_statistics(request: SimulationRequest, replications: int, seed: int, workers: int = 1) -> np.ndarray:
    """Statistics for replicates ``0..replications-1`` in replicate order."""
    jobs = [(request, seed, start, stop) for start, stop in _batches(replications, max(1, workers))]
    if workers <= 1:
        return np.concatenate([_replicate_batch(job) for job in jobs])
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return np.concatenate(list(executor.map(_replicate_batch, jobs)))


def quantile_standard_error(draws: np.ndarray, probability: float, quantile: float) -> float:
    """``sqrt(p (1 - p) / R) / f(q)`` with a Gaussian kernel density for ``f``."""
    density = float(stats.gaussian_kde(draws)(quantile)[0])
    if density <= 0.0:
        return float("inf")
    return math.sqrt(probability * (1.0 - probability) / draws.size) / density


def monte_carlo_cv(
    test_family: TestFamily | str,
    spec_key: str,
    dgp: NullDgpSpec,
    replications: int,
    seed: int,
    *,
    workers: int = 1,
    options: Mapping[str, object] | None = None,
) -> CriticalValueSurface:
    family = TestFamily(test_family)
    if replications < MIN_REPLICATIONS:
        raise ConfigError(f"at least {MIN_REPLICATIONS} replications are required", "replications")
    if family.right_tailed != (dgp.process == "var_unit_root"):
        raise InfeasibleSpec(f"{dgp.process} does not generate data for {family.value}")
    request = SimulationRequest(family, spec_key, dgp, dict(options or {}))
    logger.info(
        "Simulating %s %r: T=%d, %d replications, seed %d, %d workers",
        family.value,
        spec_key,
        dgp.nobs,
        replications,
        seed,
        workers,
    )
    draws = simulate_statistics(request, replications, seed, workers)

    quantiles: dict[float, float] = {}
    errors: dict[float, float] = {}
    for level in LEVELS:
        probability = level if family.right_tailed else 1.0 - level
        value = float(np.quantile(draws, probability))
        quantiles[level] = value
        errors[level] = quantile_standard_error(draws, probability, value)

    surface = CriticalValueSurface(
        test_family=family,
        spec_key=spec_key,
        sample_size=dgp.nobs,
        break_fractions=tuple(dgp.break_fractions),
        quantiles=quantiles,
        provenance=Provenance(
            kind="monte_carlo",
            source=f"{dgp.process} null, T={dgp.nobs}",
            seed=seed,
            replications=replications,
        ),
        standard_errors=errors,
    )
    if not surface.is_monotone():
        raise NumericalError(f"simulated {family.value} quantiles are not monotone: {quantiles}")
    return surface
