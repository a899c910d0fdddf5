import numpy as np
import pytest
from numpy.testing import assert_allclose

from energy_econometrics.cointegration import (
    VarSpec,
    decide_rank,
    exogenous_set,
    johansen_test,
    var_lag_select,
)
from energy_econometrics.errors import DimensionMismatch, MissingCriticalValues, SampleTooSmall
from energy_econometrics.ingest import ingest_csv
from energy_econometrics.series import Series, log_transform

from .conftest import SNAPSHOT, random_walk, stationary_ar


def _cointegrated_pair(nobs=200, seed=3):
    rng = np.random.default_rng(seed)
    x = np.cumsum(rng.standard_normal(nobs))
    y = 0.5 + x + rng.standard_normal(nobs) * 0.5
    return Series("y", 1800, y), Series("x", 1800, x)


@pytest.fixture(scope="module")
def snapshot_logs():
    data = ingest_csv(SNAPSHOT, {"E": "energy_pc", "Y": "gdp_pc", "P": "oil_price", "I": "industry"})
    return [log_transform(data[name]) for name in ("E", "Y", "P", "I")]


def test_exogenous_set_columns():
    columns = exogenous_set(1970, 46, (1983, 2000), trend=True)
    assert list(columns) == ["T", "B_1983", "T(B_1983)", "B_2000", "T(B_2000)"]
    assert columns["B_1983"][13] == 0.0 and columns["B_1983"][14] == 1.0
    assert columns["T(B_2000)"][-1] == 46 - 31
    assert list(exogenous_set(1970, 46, (1983,), interactions=False)) == ["B_1983"]


def test_var_spec_validation():
    with pytest.raises(DimensionMismatch):
        VarSpec((random_walk(50),))
    with pytest.raises(DimensionMismatch):
        VarSpec((random_walk(50, name="a"), random_walk(40, name="b")))
    short = (random_walk(10, name="a"), random_walk(10, name="b", seed=1))
    with pytest.raises(SampleTooSmall):
        VarSpec(short, lag_order=3)


def test_build_aligns_and_reports_break_fractions():
    a = random_walk(50, name="a", start=1960)
    b = random_walk(46, name="b", seed=1, start=1970)
    spec = VarSpec.build([a, b], break_years=(1983,))
    assert spec.nobs == 40
    assert spec.endogenous[0].start_year == 1970
    assert spec.break_fractions == pytest.approx((14 / 40,))
    assert spec.exogenous_signature == "breaks"


def test_var_lag_select_uses_common_sample():
    y, x = _cointegrated_pair()
    selection = var_lag_select(VarSpec.build([y, x]), max_lag=4)
    assert selection.nobs == 196
    assert [row.lag_order for row in selection.rows] == [1, 2, 3, 4]
    sic = [row.sic for row in selection.rows]
    assert selection.chosen["sic"] == int(np.argmin(sic)) + 1
    assert set(selection.chosen) == {"aic", "sic", "hq"}


def test_lag_criteria_match_least_squares_on_common_sample():
    y, x = _cointegrated_pair(nobs=80)
    spec = VarSpec.build([y, x], break_years=(1830,))
    selection = var_lag_select(spec, max_lag=3)
    levels = spec.levels
    rows = np.arange(3, spec.nobs)
    n_eff = rows.size
    for p, row in zip((1, 2, 3), selection.rows, strict=True):
        lagged = [levels[rows - j] for j in range(1, p + 1)]
        exog = [np.asarray(v)[rows, None] for v in spec.exogenous.values()]
        design = np.hstack([np.ones((n_eff, 1)), *exog, *lagged])
        coefficients, *_ = np.linalg.lstsq(design, levels[rows], rcond=None)
        residuals = levels[rows] - design @ coefficients
        _, log_det = np.linalg.slogdet(residuals.T @ residuals / n_eff)
        params = 2 * design.shape[1]
        assert row.log_det == pytest.approx(log_det, abs=1e-8)
        assert row.sic == pytest.approx(log_det + params * np.log(n_eff) / n_eff, abs=1e-8)
        assert row.aic == pytest.approx(log_det + 2.0 * params / n_eff, abs=1e-8)


def test_trace_telescopes_from_max_eigenvalue():
    y, x = _cointegrated_pair()
    z = random_walk(200, seed=8, name="z", start=1800)
    outcome = johansen_test(VarSpec.build([y, x, z], lag_order=2))
    assert np.all(outcome.eigenvalues >= 0.0)
    assert np.all(outcome.eigenvalues < 1.0)
    assert np.all(np.diff(outcome.eigenvalues) <= 0.0)
    assert_allclose(outcome.trace_stats, np.cumsum(outcome.max_eigen_stats[::-1])[::-1])
    assert_allclose(outcome.max_eigen_stats, -outcome.nobs * np.log(1.0 - outcome.eigenvalues))
    assert outcome.nobs == 198


def test_eigenvalues_invariant_to_rescaling():
    y, x = _cointegrated_pair()
    base = johansen_test(VarSpec.build([y, x], lag_order=2))
    moved = johansen_test(VarSpec.build([y.scaled(100.0).shifted(3.0), x.scaled(0.01)], lag_order=2))
    assert_allclose(moved.eigenvalues, base.eigenvalues, rtol=1e-6, atol=1e-9)


def test_cointegrated_pair_has_rank_one_or_more():
    y, x = _cointegrated_pair()
    outcome = johansen_test(VarSpec.build([y, x], lag_order=1), level=0.95)
    assert outcome.trace_decisions()[0] == "rejection"
    assert outcome.decided_rank >= 1
    assert outcome.eigenvectors[0, 0] == 1.0
    vector = outcome.eigenvectors[:, 0]
    assert vector[1] == pytest.approx(-1.0, abs=0.1)


def test_break_configuration_uses_bundled_trace_table(snapshot_logs):
    spec = VarSpec.build(snapshot_logs, lag_order=1, break_years=(1983,))
    outcome = johansen_test(spec, level=0.90)
    assert outcome.trace_critical_values[0][0.90] == 78.38
    assert outcome.trace_critical_values[3][0.95] == 18.24
    assert outcome.max_eigen_decisions() == ("no critical value",) * 4
    assert outcome.decided_rank is not None
    with pytest.raises(MissingCriticalValues):
        decide_rank(outcome, 0.90, statistic="max")
    doc = outcome.to_dict()
    assert doc["break_years"] == [1983]
    assert len(doc["cointegrating_vectors"]) == 4


def test_trivariate_system_with_one_relation_has_rank_one():
    rng = np.random.default_rng(21)
    nobs = 250
    x1 = np.cumsum(rng.standard_normal(nobs))
    x2 = np.cumsum(rng.standard_normal(nobs))
    y = 1.0 + 0.5 * x1 - 0.8 * x2 + 0.5 * rng.standard_normal(nobs)
    series = [Series(name, 1800, values) for name, values in (("y", y), ("x1", x1), ("x2", x2))]
    outcome = johansen_test(VarSpec.build(series, lag_order=1), level=0.99)
    assert decide_rank(outcome, 0.99) == 1
    assert outcome.decided_rank == 1


def test_stationary_system_has_full_rank():
    series = [stationary_ar(200, rho=0.3, seed=seed, name=name, start=1800) for seed, name in ((1, "a"), (2, "b"))]
    outcome = johansen_test(VarSpec.build(series, lag_order=1), level=0.95)
    assert decide_rank(outcome, 0.95) == outcome.n == 2
    assert outcome.trace_decisions() == ("rejection", "rejection")


@pytest.mark.slow
def test_rank_one_detection_rate():
    correct = 0
    for seed in range(200):
        rng = np.random.default_rng(seed)
        x1 = np.cumsum(rng.standard_normal(400))
        x2 = np.cumsum(rng.standard_normal(400))
        y = 0.5 * x1 - 0.8 * x2 + rng.standard_normal(400)
        series = [Series(name, 1600, values) for name, values in (("y", y), ("x1", x1), ("x2", x2))]
        outcome = johansen_test(VarSpec.build(series, lag_order=1), level=0.95)
        correct += outcome.decided_rank == 1
    assert correct / 200 >= 0.85
