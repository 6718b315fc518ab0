import numpy as np
import pytest
from scipy.special import logsumexp
from scipy.stats import binom

from rslab.config import settings
from rslab.schemas.params import ReducedSetSpec
from rslab.schemas.reports import parse_report
from rslab.services.enumeration import all_configurations
from rslab.services.reduced_partition import (
    concentration_bound,
    conditional_first_moment,
    conditional_moments,
    conditional_second_moment,
    p_free_measure,
    reduced_set_mass,
    _mc_estimate,
    log_pair_sum,
    restricted_members,
)
from rslab.utils.validators import CapabilityError, InvalidArgumentError

def test_pfree_mean_is_the_magnetization(small_state):
    measure = p_free_measure(small_state)
    np.testing.assert_allclose(measure.mean(), small_state.magnetization)
    configs = all_configurations(small_state.N)
    assert logsumexp(measure.log_prob(configs)) == pytest.approx(0.0, abs=1e-12)

def test_pfree_sampling_mean(small_state):
    measure = p_free_measure(small_state)
    draws = measure.sample(np.random.default_rng(0), 20000)
    assert draws.shape == (20000, small_state.N)
    np.testing.assert_allclose(draws.mean(axis=0), measure.mean(), atol=0.04)

def test_concentration_bound_formula():
    spec = ReducedSetSpec(epsilon=0.6, k=2)
    assert concentration_bound(12, spec) == pytest.approx(1.0 - 4.0 * np.exp(-12 * 0.36 / 8.0))

def test_exact_mass(small_state, small_spec):
    report = reduced_set_mass(small_state, small_spec)
    members = restricted_members(small_state, small_spec)
    assert report.exact
    assert report.members == members.size
    assert report.mass == pytest.approx(np.exp(logsumexp(members.log_p)), rel=1e-10)
    assert report.mass >= report.bound

def test_sampled_mass_agrees_with_enumeration(small_state, monkeypatch):
    spec = ReducedSetSpec(epsilon=0.3, k=2)
    exact = reduced_set_mass(small_state, spec)
    monkeypatch.setattr(settings, "max_enumeration_size", 8)
    sampled = reduced_set_mass(small_state, spec, samples=4000, seed=5)
    assert not sampled.exact
    assert sampled.stderr > 0
    assert abs(sampled.mass - exact.mass) <= 4 * sampled.stderr

def test_sampling_disabled_above_cap(small_state, small_spec, monkeypatch):
    monkeypatch.setattr(settings, "max_enumeration_size", 8)
    with pytest.raises(CapabilityError):
        reduced_set_mass(small_state, small_spec, mc=False)

def test_depth_mismatch(small_state):
    with pytest.raises(InvalidArgumentError):
        reduced_set_mass(small_state, ReducedSetSpec(epsilon=0.6, k=3))

def test_first_moment_formula(small_state, small_spec):
    report = conditional_first_moment(small_state, small_spec)
    members = restricted_members(small_state, small_spec)
    N, beta = small_state.N, small_state.params.beta
    exponent = beta ** 2 * N / 4.0 * (1.0 - np.sum(members.proj ** 2, axis=1)) ** 2
    assert report.log_first_moment_per_N == pytest.approx(
        logsumexp(members.log_p + exponent) / N, rel=1e-10)
    gap = abs(report.log_first_moment_per_N - report.finite_center)
    assert gap <= report.eps_correction + report.mass_correction + 1e-9

def test_first_moment_against_conditional_monte_carlo(small_state, small_spec):
    report = conditional_first_moment(small_state, small_spec, mc_samples=20000, seed=1)
    estimate = report.mc_estimate
    assert estimate.samples == 20000
    assert abs(estimate.mean_ratio - 1.0) <= 3 * estimate.stderr_ratio

def test_second_moment_against_conditional_monte_carlo(small_state, small_spec):
    report = conditional_second_moment(small_state, small_spec, mc_samples=20000, seed=2)
    estimate = report.mc_second_estimate
    assert abs(estimate.mean_ratio - 1.0) <= 3 * estimate.stderr_ratio
    assert estimate.passed

def test_jensen_and_report_round_trip(small_state, small_spec):
    report = conditional_moments(small_state, small_spec)
    assert report.log_second_moment_per_N >= 2 * report.log_first_moment_per_N - 1e-12
    assert report.predicted_second == pytest.approx(
        small_state.params.beta ** 2 / 2.0 * (1.0 - small_state.q) ** 2)
    assert parse_report(report.model_dump_json()) == report

def test_pair_sum_above_cap(state_factory, small_spec):
    state = state_factory(0.5, 0.4, 16, 2, seed=1)
    with pytest.raises(CapabilityError):
        conditional_second_moment(state, small_spec)
    # The single sum still runs by Gray-code enumeration
    assert np.isfinite(conditional_first_moment(state, small_spec).log_first_moment_per_N)

@pytest.fixture(scope="module")
def field_only_state(state_factory):
    """beta = 0: the couplings drop out and S is a window on the mean spin"""
    return state_factory(0.0, 0.7, 10, 1, seed=3)

def test_mass_without_temperature_is_a_binomial_window(field_only_state):
    spec = ReducedSetSpec(epsilon=0.3, k=1)
    N, h = field_only_state.N, 0.7
    ups = np.arange(N + 1)
    inside = np.abs((2 * ups - N) / N - np.tanh(h)) <= spec.radius
    oracle = binom.pmf(ups[inside], N, 0.5 * (1.0 + np.tanh(h))).sum()
    assert reduced_set_mass(field_only_state, spec).mass == pytest.approx(oracle, rel=1e-12)

def test_moments_without_temperature_reduce_to_the_mass(field_only_state):
    spec = ReducedSetSpec(epsilon=0.3, k=1)
    N = field_only_state.N
    log_mass = np.log(reduced_set_mass(field_only_state, spec).mass)
    report = conditional_moments(field_only_state, spec)
    assert report.log_first_moment_per_N * N == pytest.approx(log_mass, abs=1e-12)
    assert report.log_second_moment_per_N * N == pytest.approx(2.0 * log_mass, abs=1e-12)

def test_wide_window_holds_every_configuration(small_state):
    # |<sigma, phi> - center| <= 2 always, so eps / k >= 2 admits all of {-1, 1}^N
    spec = ReducedSetSpec(epsilon=4.0, k=2)
    report = reduced_set_mass(small_state, spec)
    assert report.members == 2 ** small_state.N
    assert report.mass == pytest.approx(1.0, abs=1e-12)

def test_mass_and_moments_grow_with_the_window(small_state):
    reports = [conditional_moments(small_state, ReducedSetSpec(epsilon=eps, k=2))
               for eps in (0.2, 0.4, 0.6, 1.0, 4.0)]
    for smaller, larger in zip(reports[:-1], reports[1:]):
        assert larger.pfree_mass >= smaller.pfree_mass - 1e-12
        assert larger.log_first_moment_per_N >= smaller.log_first_moment_per_N - 1e-12
        assert larger.log_second_moment_per_N >= smaller.log_second_moment_per_N - 1e-12

def test_complement_norm_identity(small_state):
    configs = all_configurations(small_state.N)
    projected = configs @ small_state.complement().T
    proj = small_state.ip.inner(configs, small_state.phi)
    norms = np.sum(projected ** 2, axis=1) / small_state.N
    np.testing.assert_allclose(norms, 1.0 - np.sum(proj ** 2, axis=1), atol=1e-12)

def test_log_space_sums_match_direct_sums(state_factory, small_spec):
    state = state_factory(0.5, 0.4, 10, 2, seed=11)
    members = restricted_members(state, small_spec)
    N, beta = state.N, state.params.beta
    exponent = beta ** 2 * N / 4.0 * (1.0 - np.sum(members.proj ** 2, axis=1)) ** 2
    direct_first = np.sum(np.exp(members.log_p) * np.exp(exponent))
    report = conditional_first_moment(state, small_spec)
    assert report.log_first_moment_per_N * N == pytest.approx(np.log(direct_first), rel=1e-10, abs=1e-12)

    overlap = members.sigma @ members.sigma.T / N - members.proj @ members.proj.T
    weight = np.exp(members.log_p) * np.exp(exponent)
    direct_second = np.sum(np.outer(weight, weight) * np.exp(beta ** 2 * N / 2.0 * overlap ** 2))
    assert log_pair_sum(state, members) == pytest.approx(np.log(direct_second), rel=1e-10, abs=1e-12)

def test_empty_window_skips_the_monte_carlo(small_state):
    report = conditional_first_moment(small_state, ReducedSetSpec(epsilon=1e-6, k=2), mc_samples=200)
    assert report.pfree_mass == 0.0
    assert report.mc_estimate is None

def test_non_finite_ratios_never_pass():
    estimate = _mc_estimate(np.array([np.nan, 1.0, 1.0]), 0.0, 4)
    assert not estimate.passed
    assert np.isnan(estimate.z_score)

def test_identical_ratios_pass():
    estimate = _mc_estimate(np.ones(5), 0.0, 4)
    assert estimate.stderr_ratio == 0.0
    assert estimate.z_score == 0.0
    assert estimate.passed
