"""Closed-form SINR/SE evaluation and its Monte Carlo counterpart."""

import dataclasses

import numpy as np
import pytest

from lsfp.se import (
    PrecodingWeights,
    monte_carlo_estimates,
    monte_carlo_sinr,
    product_sinr,
    sample_realization,
    sinr_closed_form,
    sinr_closed_form_all,
    spectral_efficiency,
)
from lsfp.stats import compute_statistics

from conftest import toy_config


def _random_weights(L, K, rng, scale=1e4):
    a = scale * (rng.standard_normal((L, K, L)) + 1j * rng.standard_normal((L, K, L)))
    return PrecodingWeights(a)


def test_spectral_efficiency_values():
    assert spectral_efficiency(1.0, 6, 200) == pytest.approx(0.97)
    assert spectral_efficiency(3.0, 50, 200) == pytest.approx(1.5)
    assert spectral_efficiency(0.0, 6, 200) == 0.0


def test_spectral_efficiency_validation():
    with pytest.raises(ValueError):
        spectral_efficiency(1.0, 200, 200)
    with pytest.raises(ValueError):
        spectral_efficiency(-0.5, 6, 200)


def test_weights_must_be_finite():
    a = np.zeros((1, 1, 1), dtype=complex)
    a[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        PrecodingWeights(a)


def test_scalar_and_vectorized_sinr_agree(toy_stats, rng):
    w = _random_weights(toy_stats.L, toy_stats.K, rng)
    allv = sinr_closed_form_all(toy_stats, w)
    for l in range(toy_stats.L):
        for k in range(toy_stats.K):
            assert allv[l, k] == pytest.approx(
                sinr_closed_form(toy_stats, w, l, k), rel=1e-12
            )


def test_zero_weights_give_zero_sinr(toy_stats):
    w = PrecodingWeights(np.zeros((toy_stats.L, toy_stats.K, toy_stats.L)))
    np.testing.assert_array_equal(sinr_closed_form_all(toy_stats, w), 0.0)


def test_per_user_phase_invariance(toy_stats, rng):
    # rotating one user's weight vector by a unit scalar leaves all SINRs fixed
    w = _random_weights(toy_stats.L, toy_stats.K, rng)
    base = sinr_closed_form_all(toy_stats, w)
    a2 = w.a.copy()
    a2[1, 0] *= np.exp(1j * 2.1)
    rotated = sinr_closed_form_all(toy_stats, PrecodingWeights(a2))
    np.testing.assert_allclose(rotated, base, rtol=1e-12)


def test_sinr_decreases_with_noise(toy_scenario, toy_stats, rng):
    w = _random_weights(toy_stats.L, toy_stats.K, rng)
    noisier = compute_statistics(
        dataclasses.replace(
            toy_scenario,
            config=dataclasses.replace(toy_scenario.config, sigma2=10.0
                                       * toy_scenario.config.sigma2),
        )
    )
    assert np.all(
        sinr_closed_form_all(noisier, w) < sinr_closed_form_all(toy_stats, w)
    )


def test_product_sinr_with_active_mask(toy_stats, rng):
    w = _random_weights(toy_stats.L, toy_stats.K, rng)
    s = sinr_closed_form_all(toy_stats, w)
    assert product_sinr(toy_stats, w) == pytest.approx(float(np.prod(s)))
    mask = np.zeros_like(s, dtype=bool)
    mask[0, 0] = True
    assert product_sinr(toy_stats, w, active=mask) == pytest.approx(s[0, 0])


def test_sample_realization_shapes(toy_scenario, rng):
    cr = sample_realization(toy_scenario, rng)
    cfg = toy_scenario.config
    assert cr.g.shape == (cfg.L, cfg.K, cfg.L, cfg.M)
    assert cr.z.shape == (cfg.L, cfg.K, cfg.M)


def test_los_only_pilot_is_deterministic_up_to_phase():
    # with kappa -> inf and negligible noise, |z| is the same in every
    # realization: only the LOS phase varies
    cfg = toy_config(L=1, K=1, M=4, rician_slope_db_per_m=0.0,
                     rician_offset_db=80.0, sigma2=1e-30)
    from lsfp.scenario import generate_scenario

    sc = generate_scenario(cfg, 0)
    r1 = sample_realization(sc, np.random.default_rng(1))
    r2 = sample_realization(sc, np.random.default_rng(2))
    np.testing.assert_allclose(np.abs(r1.z), np.abs(r2.z), rtol=1e-3)


def test_monte_carlo_matches_closed_form(toy_scenario, toy_stats, rng):
    w = _random_weights(toy_stats.L, toy_stats.K, rng, scale=3e4)
    mc, terms = monte_carlo_sinr(toy_scenario, w, 0, 1, 100_000, rng)
    cf = sinr_closed_form(toy_stats, w, 0, 1)
    assert mc == pytest.approx(cf, rel=0.05)
    # term decomposition: DS mean matches a^H b, and all terms are nonnegative
    expected_ds = np.vdot(w.a[0, 1], toy_stats.b[0, 1])
    assert abs(terms["ds"] - expected_ds) < 0.02 * abs(expected_ds)
    for key in ("ds2", "bu", "pc", "ni"):
        assert terms[key] >= 0.0


def test_monte_carlo_ni_scales_with_weight_power(toy_scenario, rng):
    # doubling the interfering user's weights quadruples the non-coherent term
    L, K = toy_scenario.L, toy_scenario.K
    a = np.zeros((L, K, L), dtype=complex)
    a[0, 0, 0] = 1e4
    a[0, 1, 0] = 1e4
    w1 = PrecodingWeights(a)
    a2 = a.copy()
    a2[0, 1, 0] *= 2.0
    w2 = PrecodingWeights(a2)
    est = monte_carlo_estimates(
        toy_scenario, 50_000, np.random.default_rng(7), weights=[w1, w2],
        want_moments=False,
    )
    ni1 = est.sinr_terms(0)[3][0, 0]
    ni2 = est.sinr_terms(1)[3][0, 0]
    assert ni2 == pytest.approx(4.0 * ni1, rel=1e-9)


def test_monte_carlo_estimates_validation(toy_scenario, rng):
    with pytest.raises(ValueError):
        monte_carlo_estimates(toy_scenario, 0, rng)


def test_estimates_deterministic_and_batch_consistent(toy_scenario):
    w = PrecodingWeights(
        1e4 * np.ones((toy_scenario.L, toy_scenario.K, toy_scenario.L))
    )
    e1 = monte_carlo_estimates(toy_scenario, 2_000, np.random.default_rng(3),
                               weights=[w], batch_size=2_000)
    e2 = monte_carlo_estimates(toy_scenario, 2_000, np.random.default_rng(3),
                               weights=[w], batch_size=2_000)
    np.testing.assert_array_equal(e1.sinr(0), e2.sinr(0))
    # a different batch split reorders the draws, so only the statistics
    # agree; a normalization bug would show up far outside this tolerance
    e3 = monte_carlo_estimates(toy_scenario, 50_000, np.random.default_rng(3),
                               weights=[w], batch_size=7_000)
    e4 = monte_carlo_estimates(toy_scenario, 50_000, np.random.default_rng(4),
                               weights=[w], batch_size=50_000)
    np.testing.assert_allclose(e3.sinr(0), e4.sinr(0), rtol=0.1)
