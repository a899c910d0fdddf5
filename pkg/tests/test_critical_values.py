import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from energy_econometrics.critical_values import (
    CriticalValueSurface,
    NullDgpSpec,
    Provenance,
    TestFamily,
    cached_surfaces,
    critical_values_for,
    lookup,
    lookup_surface,
    monte_carlo_cv,
    surface_cache_load,
    surface_cache_store,
)
from energy_econometrics.critical_values.simulation import SimulationRequest, simulate_statistics
from energy_econometrics.critical_values.tables import bundled_tables, response_surface
from energy_econometrics.errors import ConfigError, InfeasibleSpec, NotTabulated, SchemaMismatch


def _surface(**overrides) -> CriticalValueSurface:
    fields = dict(
        test_family=TestFamily.JOHANSEN_MAX,
        spec_key="c:breaks:4",
        sample_size=46,
        break_fractions=(14 / 46,),
        quantiles={0.90: 30.1, 0.95: 33.2, 0.99: 39.9},
        provenance=Provenance(kind="monte_carlo", source="var_unit_root null, T=46", seed=3, replications=5000),
        standard_errors={0.90: 0.2, 0.95: 0.3, 0.99: 0.6},
    )
    fields.update(overrides)
    return CriticalValueSurface(**fields)


def test_response_surface_evaluates_polynomial():
    surface = response_surface("c", 100)
    expected = -2.86154 - 2.8903 / 100 - 4.234 / 100**2 - 40.040 / 100**3
    assert surface.quantile(0.95) == pytest.approx(expected)
    assert surface.sample_size == 100
    assert surface.is_monotone()


def test_bundled_break_tables():
    assert lookup("zivot_andrews", "ct:trend", 46, level=0.95) == -4.52
    assert lookup(TestFamily.LUMSDAINE_PAPELL, "ct:both", 46, level=0.90) == -6.49
    assert lookup("johansen_trace", "c:none:2", 46, level=0.95) == 15.4943
    surface = lookup_surface("johansen_trace", "c:breaks:3", 46, (0.31,))
    assert surface.quantile(0.90) == 53.85
    assert surface.provenance.kind == "bundled_table"


def test_missing_tables():
    with pytest.raises(NotTabulated):
        lookup_surface("johansen_max", "c:breaks:4", 46, (14 / 46,))
    with pytest.raises(NotTabulated):
        lookup("clemente_io", "c:intercept", 46, level=0.90)
    assert critical_values_for("johansen_max", "c:breaks:4", 46, (14 / 46,)) == ({}, None)


def test_bundled_surfaces_are_monotone():
    assert all(surface.is_monotone() for surface in bundled_tables().surfaces)


def test_short_samples_need_finite_sample_tables():
    with pytest.raises(NotTabulated):
        lookup_surface("zivot_andrews", "ct:trend", 20)


def test_cache_round_trip_and_lookup(tmp_path):
    surface = _surface()
    path = surface_cache_store(surface, tmp_path)
    assert path.parent == tmp_path
    assert surface_cache_load(path) == surface
    assert cached_surfaces(tmp_path) == (surface,)
    found = lookup_surface("johansen_max", "c:breaks:4", 46, (0.31,), cache_dir=tmp_path)
    assert found == surface
    critical, provenance = critical_values_for("johansen_max", "c:breaks:4", 46, (14 / 46,), tmp_path)
    assert critical[0.95] == 33.2
    assert provenance.seed == 3


def _double_mean_shift(quantiles):
    return _surface(
        test_family=TestFamily.CLEMENTE_IO,
        spec_key="c:intercept",
        break_fractions=(),
        quantiles=quantiles,
        provenance=Provenance(kind="monte_carlo", source="random_walk null, T=46", seed=9, replications=2000),
    )


def test_cached_simulation_completes_printed_levels(tmp_path):
    surface_cache_store(_double_mean_shift({0.90: -5.21, 0.95: -5.55, 0.99: -6.18}), tmp_path)
    critical, provenance = critical_values_for("clemente_io", "c:intercept", 46, (0.11, 0.74), tmp_path)
    assert critical == {0.90: -5.21, 0.95: -5.490, 0.99: -6.18}
    assert provenance.kind == "bundled_table"
    assert provenance.replications == 2000
    assert "random_walk null" in provenance.source
    assert lookup("clemente_io", "c:intercept", 46, level=0.99, cache_dir=tmp_path) == -6.18
    assert critical_values_for("clemente_io", "c:intercept", 46, (0.11, 0.74))[0] == {0.95: -5.490}


def test_inconsistent_simulation_leaves_table_alone(tmp_path):
    surface_cache_store(_double_mean_shift({0.90: -5.80, 0.95: -6.00, 0.99: -6.60}), tmp_path)
    critical, provenance = critical_values_for("clemente_io", "c:intercept", 46, (), tmp_path)
    assert critical == {0.95: -5.490}
    assert provenance.replications is None


def test_cache_key_depends_on_provenance(tmp_path):
    first = surface_cache_store(_surface(), tmp_path)
    second = surface_cache_store(
        _surface(provenance=Provenance(kind="monte_carlo", source="x", seed=4, replications=5000)), tmp_path
    )
    assert first != second


def test_tampered_cache_record_is_rejected(tmp_path):
    path = surface_cache_store(_surface(), tmp_path)
    record = json.loads(path.read_text())
    record["surface"]["quantiles"]["0.95"] = 1.0
    path.write_text(json.dumps(record))
    with pytest.raises(SchemaMismatch):
        surface_cache_load(path)
    assert cached_surfaces(tmp_path) == ()


def test_cache_version_mismatch(tmp_path):
    path = surface_cache_store(_surface(), tmp_path)
    record = json.loads(path.read_text())
    record["version"] = 99
    path.write_text(json.dumps(record))
    with pytest.raises(SchemaMismatch):
        surface_cache_load(path)


def test_null_dgp_validation():
    with pytest.raises(ConfigError):
        NullDgpSpec(nobs=10)
    with pytest.raises(ConfigError):
        NullDgpSpec(process="var_unit_root", n=2, rank=2)
    with pytest.raises(ConfigError):
        NullDgpSpec(process="white_noise")
    with pytest.raises(InfeasibleSpec):
        NullDgpSpec(break_fractions=(1.2,))


def test_null_dgp_shapes():
    rng = np.random.default_rng(0)
    assert NullDgpSpec(nobs=50).simulate(rng).shape == (50,)
    system = NullDgpSpec(process="var_unit_root", nobs=60, n=3, rank=1).simulate(rng)
    assert system.shape == (60, 3)
    assert NullDgpSpec(nobs=46, break_fractions=(14 / 46,)).break_years() == (14,)


def test_monte_carlo_needs_enough_replications():
    with pytest.raises(ConfigError):
        monte_carlo_cv("adf", "c", NullDgpSpec(nobs=50), replications=999, seed=1)


def test_monte_carlo_rejects_mismatched_process():
    with pytest.raises(InfeasibleSpec):
        monte_carlo_cv("johansen_trace", "c:none:2", NullDgpSpec(nobs=50), replications=1000, seed=1)


def test_simulated_draws_do_not_depend_on_workers():
    request = SimulationRequest(TestFamily.ADF, "c", NullDgpSpec(nobs=40), {"max_lag": 0})
    serial = simulate_statistics(request, 24, seed=42, workers=1)
    parallel = simulate_statistics(request, 24, seed=42, workers=2)
    assert_array_equal(serial, parallel)
    assert not np.array_equal(serial, simulate_statistics(request, 24, seed=43, workers=1))


@pytest.mark.slow
def test_simulated_adf_quantiles_match_response_surface():
    surface = monte_carlo_cv("adf", "c", NullDgpSpec(nobs=100), replications=4000, seed=2016, workers=2)
    expected = response_surface("c", 99)
    assert surface.quantile(0.95) == pytest.approx(expected.quantile(0.95), abs=0.08)
    assert surface.quantile(0.99) == pytest.approx(expected.quantile(0.99), abs=0.15)
    assert surface.provenance.replications == 4000
    assert all(se > 0 for se in surface.standard_errors.values())


@pytest.mark.slow
def test_simulated_trace_quantiles_match_table():
    dgp = NullDgpSpec(process="var_unit_root", nobs=200, n=2, rank=0)
    surface = monte_carlo_cv("johansen_trace", "c:none:2", dgp, replications=2000, seed=7, workers=2)
    assert surface.quantile(0.90) == pytest.approx(13.4294, abs=0.8)
