import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from energy_econometrics.critical_values import CriticalValueSurface, Provenance, TestFamily, surface_cache_store
from energy_econometrics.errors import (
    ConfigError,
    InvalidModelCombination,
    RankDeficient,
    SeriesTooShort,
    TrimTooLarge,
)
from energy_econometrics.regression import fixed_bandwidth
from energy_econometrics.series import BreakKind, Deterministic, Series, level_shift, trend_shift
from energy_econometrics.unit_root import (
    BreakStyle,
    Decision,
    LagCriterion,
    LagSelection,
    UnitRootModelSpec,
    adf,
    clemente,
    clemente_at,
    lumsdaine_papell,
    lumsdaine_papell_at,
    perron_known_break,
    phillips_perron,
    select_deterministic,
    zivot_andrews,
    zivot_andrews_at,
)

from .conftest import random_walk, stationary_ar


def _shifted(nobs: int, shifts: dict[int, float], seed: int = 5) -> Series:
    base = stationary_ar(nobs, rho=0.0, seed=seed)
    values = base.values.copy()
    for position, size in shifts.items():
        values += size * level_shift(nobs, position)
    return Series("y", base.start_year, values)


def test_lag_selection_parsing():
    assert LagSelection.parse("bic").criterion is LagCriterion.SIC
    assert LagSelection.parse("fixed:3").lags == 3
    assert LagSelection.parse(2) == LagSelection.fixed(2)
    gts = LagSelection.parse("gts:0.05")
    assert gts.alpha == 0.05
    assert str(gts) == "gts:0.05"
    assert str(LagSelection.parse("AIC")) == "aic"
    with pytest.raises(ConfigError):
        LagSelection.parse("bayes")
    with pytest.raises(ConfigError):
        LagSelection.parse("fixed:x")


def test_model_spec_combinations():
    with pytest.raises(InvalidModelCombination):
        UnitRootModelSpec(Deterministic.CONSTANT_TREND, BreakStyle.INNOVATIONAL, BreakKind.TREND)
    with pytest.raises(InvalidModelCombination):
        UnitRootModelSpec(Deterministic.CONSTANT, BreakStyle.ADDITIVE, BreakKind.TREND)
    with pytest.raises(InvalidModelCombination):
        UnitRootModelSpec(Deterministic.CONSTANT, BreakStyle.ADDITIVE, None)
    spec = UnitRootModelSpec(Deterministic.CONSTANT_TREND, BreakStyle.ADDITIVE, BreakKind.TREND)
    assert spec.spec_key == "ct:trend"


def test_adf_without_lags_equals_pp_with_zero_bandwidth(walk):
    a = adf(walk, "c", 0, "fixed:0")
    p = phillips_perron(walk, "c", bandwidth=0)
    assert p.statistic == pytest.approx(a.statistic, rel=1e-10)
    assert p.bandwidth == 0
    assert a.nobs == walk.nobs - 1


def test_adf_selected_lag_matches_fixed_refit(walk):
    chosen = adf(walk, "c", 4, "aic")
    assert 0 <= chosen.chosen_lags <= 4
    fixed = adf(walk, "c", 4, f"fixed:{chosen.chosen_lags}")
    assert fixed.statistic == chosen.statistic
    assert fixed.nobs == walk.nobs - chosen.chosen_lags - 1


def test_adf_separates_stationary_from_random_walk(walk):
    stationary = adf(stationary_ar(200, rho=0.3, seed=2), "c", 4, "sic")
    assert stationary.decision is Decision.REJECT
    assert adf(walk, "c", 4, "sic").statistic > stationary.statistic


def test_adf_attaches_response_surface_values(walk):
    outcome = adf(walk, "ct", 2, "fixed:2")
    assert sorted(outcome.critical_values) == [0.90, 0.95, 0.99]
    assert outcome.critical_values[0.99] < outcome.critical_values[0.95] < outcome.critical_values[0.90]
    assert "response surface" in outcome.cv_source
    assert outcome.decision_at(0.95) is outcome.decision
    assert outcome.to_dict()["critical_values"].keys() == {"0.90", "0.95", "0.99"}


def test_adf_rejects_short_series():
    with pytest.raises(SeriesTooShort):
        adf(Series("x", 2000, np.arange(8.0)), "c", 4)


def test_pp_default_bandwidth_is_fixed_rule():
    s = random_walk(46, seed=5, start=1970)
    outcome = phillips_perron(s, "c")
    assert outcome.nobs == 45
    assert outcome.bandwidth == fixed_bandwidth(45) == 3


def test_pp_automatic_bandwidth(walk):
    outcome = phillips_perron(walk, "c", bandwidth_rule="automatic")
    assert outcome.test is TestFamily.PP
    assert 0 <= outcome.bandwidth < walk.nobs


def test_select_deterministic_keeps_significant_trend():
    noise = stationary_ar(120, rho=0.2, seed=4)
    trending = Series("y", noise.start_year, noise.values + 0.5 * np.arange(120.0))
    det, outcome = select_deterministic(trending, 2, "aic")
    assert det is Deterministic.CONSTANT_TREND
    assert outcome.spec_key == "ct"


def test_zivot_andrews_is_grid_argmin():
    s = _shifted(60, {30: 4.0})
    spec = UnitRootModelSpec(
        Deterministic.CONSTANT, BreakStyle.INNOVATIONAL, BreakKind.INTERCEPT, LagSelection.fixed(1), max_lag=1
    )
    outcome = zivot_andrews(s, spec, trim=0.15)
    statistics = {}
    for year in s.years[1:-1]:
        position = s.position_of(int(year))
        if not 9 <= position <= 51:
            continue
        statistics[int(year)] = zivot_andrews_at(s, spec, int(year)).statistic
    best_year = min(statistics, key=lambda y: (statistics[y], y))
    assert outcome.statistic == statistics[best_year]
    assert outcome.break_years == (best_year,)
    assert outcome.candidates_evaluated == len(statistics)


def test_zivot_andrews_finds_additive_level_shift():
    s = _shifted(80, {40: 8.0})
    spec = UnitRootModelSpec(
        Deterministic.CONSTANT, BreakStyle.ADDITIVE, BreakKind.INTERCEPT, LagSelection.fixed(0), max_lag=0
    )
    outcome = zivot_andrews(s, spec, trim=0.15)
    assert abs(outcome.break_years[0] - s.year_at(39)) <= 1
    assert outcome.decision is Decision.REJECT
    assert outcome.dummy("DU").p_value < 0.01


def test_zivot_andrews_trim_limits():
    spec = UnitRootModelSpec(Deterministic.CONSTANT, BreakStyle.INNOVATIONAL, BreakKind.INTERCEPT)
    with pytest.raises(TrimTooLarge):
        zivot_andrews(random_walk(60), spec, trim=0.5)


def test_perron_known_trend_break_reports_dummy():
    nobs = 70
    noise = stationary_ar(nobs, rho=0.3, seed=9)
    values = noise.values + 0.2 * np.arange(nobs) + 0.8 * trend_shift(nobs, 35)
    s = Series("y", 1950, values)
    spec = UnitRootModelSpec(
        Deterministic.CONSTANT_TREND, BreakStyle.ADDITIVE, BreakKind.TREND, LagSelection.fixed(1), max_lag=1
    )
    outcome = perron_known_break(s, spec, 1984)
    assert outcome.test is TestFamily.PERRON_AO
    assert outcome.break_years == (1984,)
    assert outcome.dummy("DT").coefficient == pytest.approx(0.8, abs=0.1)


def test_lumsdaine_papell_is_pair_argmin():
    s = random_walk(40, seed=12, start=1970)
    outcome = lumsdaine_papell(s, trim=0.15, max_lag=1, selection="fixed:1")
    best = None
    for first in range(6, 35):
        for second in range(first + 2, 35):
            years = (s.year_at(first - 1), s.year_at(second - 1))
            try:
                statistic = lumsdaine_papell_at(s, years, max_lag=1, selection="fixed:1").statistic
            except RankDeficient:
                continue
            if best is None or statistic < best[0]:
                best = (statistic, years)
    assert outcome.statistic == best[0]
    assert outcome.break_years == best[1]
    assert outcome.spec_key == "ct:both"


def test_clemente_io_finds_two_mean_shifts():
    s = _shifted(80, {25: 6.0, 55: -6.0}, seed=21)
    outcome = clemente(s, "IO", trim=0.05, max_lag=0, selection="fixed:0")
    first, second = outcome.break_years
    assert abs(first - s.year_at(24)) <= 2
    assert abs(second - s.year_at(54)) <= 2
    assert outcome.test is TestFamily.CLEMENTE_IO
    assert [d.name for d in outcome.dummy_report] == ["DU1", "DU2"]
    assert outcome.decision is Decision.REJECT


def test_long_lag_search_keeps_early_break_pairs():
    s = random_walk(46, seed=12, start=1970)
    outcome = lumsdaine_papell(s, trim=0.10, max_lag=8, selection="gts:0.10")
    assert outcome.candidates_skipped == 0
    assert outcome.candidates_evaluated == 630


def test_early_break_caps_the_lag_search():
    s = random_walk(46, seed=12, start=1970)
    long = lumsdaine_papell_at(s, (1976, 1990), max_lag=8, selection="aic")
    assert long.break_years == (1976, 1990)
    assert long.chosen_lags <= 5
    capped = lumsdaine_papell_at(s, (1976, 1990), max_lag=5, selection="aic")
    assert long.statistic == capped.statistic
    assert long.chosen_lags == capped.chosen_lags


def test_clemente_io_evaluates_breaks_near_the_start():
    s = _shifted(46, {3: 5.0, 25: -5.0}, seed=3)
    early = clemente_at(s, "IO", (s.year_at(2), s.year_at(24)), max_lag=4)
    assert early.break_years == (s.year_at(2), s.year_at(24))
    assert early.chosen_lags <= 1
    outcome = clemente(s, "IO", trim=0.05, max_lag=4, selection="gts:0.10")
    assert outcome.candidates_skipped == 0


def test_adf_size_on_random_walks():
    rejections = sum(
        adf(random_walk(100, seed=seed), "c", 1, "fixed:1").decision is Decision.REJECT for seed in range(400)
    )
    assert 0.02 <= rejections / 400 <= 0.09


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**31 - 1),
    st.floats(min_value=-100.0, max_value=100.0),
    st.floats(min_value=0.01, max_value=100.0),
)
def test_adf_invariant_to_location_and_scale(seed, shift, factor):
    s = random_walk(80, seed=seed)
    base = adf(s, "c", 2, "aic")
    moved = adf(s.scaled(factor).shifted(shift), "c", 2, "aic")
    assert moved.chosen_lags == base.chosen_lags
    assert moved.statistic == pytest.approx(base.statistic, rel=1e-7, abs=1e-9)


def test_break_search_invariant_to_location():
    s = _shifted(60, {30: 4.0})
    spec = UnitRootModelSpec(
        Deterministic.CONSTANT, BreakStyle.INNOVATIONAL, BreakKind.INTERCEPT, LagSelection.fixed(1), max_lag=1
    )
    base = zivot_andrews(s, spec)
    moved = zivot_andrews(s.shifted(50.0), spec)
    assert moved.break_years == base.break_years
    assert moved.statistic == pytest.approx(base.statistic, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1), st.floats(min_value=0.0, max_value=1.0))
def test_rejection_is_monotone_in_level(seed, rho):
    outcome = adf(stationary_ar(60, rho=rho, seed=seed), "c", 1, "fixed:1")
    rejected = [outcome.decision_at(level) is Decision.REJECT for level in (0.90, 0.95, 0.99)]
    assert rejected == sorted(rejected, reverse=True)


@pytest.mark.slow
def test_adf_size_on_long_random_walks():
    rejections = sum(
        adf(random_walk(500, seed=seed), "c", 1, "fixed:1").decision is Decision.REJECT for seed in range(1000)
    )
    assert 0.03 <= rejections / 1000 <= 0.07


def test_clemente_decisions_are_monotone_once_levels_are_complete(tmp_path):
    simulated = CriticalValueSurface(
        test_family=TestFamily.CLEMENTE_IO,
        spec_key="c:intercept",
        sample_size=46,
        break_fractions=(),
        quantiles={0.90: -5.21, 0.95: -5.55, 0.99: -6.18},
        provenance=Provenance(kind="monte_carlo", source="random_walk null, T=46", seed=9, replications=2000),
    )
    surface_cache_store(simulated, tmp_path)
    s = _shifted(46, {12: 5.0, 30: -5.0}, seed=8)
    outcome = clemente(s, "IO", trim=0.05, max_lag=0, selection="fixed:0", cache_dir=tmp_path)
    assert sorted(outcome.critical_values) == [0.90, 0.95, 0.99]
    decisions = [outcome.decision_at(level) for level in (0.90, 0.95, 0.99)]
    assert Decision.INCONCLUSIVE not in decisions
    rejected = [d is Decision.REJECT for d in decisions]
    assert rejected == sorted(rejected, reverse=True)
