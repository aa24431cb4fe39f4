"""Ensemble-level behaviour of the Exact Cover sweeps (shares the acceptance ensembles)."""
import numpy as np

from entscale import stats

N10 = (10, 3, 100)


def test_min_gap_comes_after_entropy_peak(ensemble):
    agg = stats.aggregate(ensemble(*N10)[1])
    assert agg.mean_s_max_entropy < agg.mean_s_min_gap


def test_typical_instance_gap_minimum_near_critical_point(ensemble):
    profiles = ensemble(*N10)[1]
    s_gap = np.array([p.s_min_gap for p in profiles])
    assert 0.6 <= np.median(s_gap) <= 0.8
    assert np.mean((s_gap >= 0.6) & (s_gap <= 0.8)) >= 0.8


def test_peak_entropy_well_below_random_state(ensemble):
    agg = stats.aggregate(ensemble(*N10)[1])
    assert agg.mean_max_entropy < stats.page_entropy(10)
    assert agg.mean_max_entropy < 0.3 * stats.page_entropy(10)


def test_adiabatic_ratio_is_finite(ensemble):
    for p in ensemble(*N10)[1]:
        assert np.isfinite(p.adiabatic_ratio()) and p.adiabatic_ratio() > 0


def test_critical_exponent_at_fourteen_qubits(ensemble):
    profiles = ensemble(14, 3, 16)[1]
    curve = stats.mean_curve(profiles, "entropy")
    grid = profiles[0].s_grid
    s_c = float(grid[int(np.argmax(curve))])
    crit = stats.fit_critical_region(grid, curve, s_c)
    assert 1.5 <= crit.alpha <= 3.5
    assert crit.growth.slope > 0
