import numpy as np
import pytest

from rslab.schemas.params import ModelParams
from rslab.services.scalar_theory import solve_q
from rslab.services.tap_construction import (
    cavity_statistics,
    conditional_resample,
    conditional_resample_batch,
    disorder_for_draw,
    load_tap_state,
    phi_zeta_variance,
    sample_disorder,
    save_tap_state,
    structure_errors,
    tap_iterate,
    verify_concentration,
)
from rslab.utils.rng import SeedRecord
from rslab.utils.validators import DegeneracyError, InvalidArgumentError

def test_disorder_is_seeded():
    first = disorder_for_draw(30, 7, 0)
    again = disorder_for_draw(30, 7, 0)
    other = disorder_for_draw(30, 7, 1)
    np.testing.assert_array_equal(first.g, again.g)
    assert not np.array_equal(first.g, other.g)
    assert np.all(np.diagonal(first.g) == 0.0)
    assert first.seed == SeedRecord(seed=7, stream=(0, 0))

def test_disorder_is_read_only():
    d = sample_disorder(5, 1)
    with pytest.raises(ValueError):
        d.g[0, 1] = 1.0
    np.testing.assert_allclose(d.gbar, d.gbar.T)

def test_structure_identities(state_factory):
    state = state_factory(0.5, 0.4, 300, 4, seed=3)
    errors = structure_errors(state)
    for name in ("orthonormality", "annihilation", "reconstruction", "zeta"):
        assert errors[name] < 1e-9, name

@pytest.mark.slow
def test_structure_identities_large(state_factory):
    state = state_factory(0.5, 0.4, 2000, 4, seed=3)
    errors = structure_errors(state)
    assert max(errors["orthonormality"], errors["annihilation"], errors["reconstruction"]) < 1e-9

def test_state_shapes_and_immutability(medium_state):
    N, k = medium_state.N, medium_state.k
    assert medium_state.phi.shape == (k, N)
    assert medium_state.m.shape == (k + 1, N)
    assert medium_state.zeta.shape == (k, N)
    np.testing.assert_allclose(medium_state.m[0], np.sqrt(medium_state.q))
    np.testing.assert_allclose(medium_state.magnetization, np.tanh(medium_state.hfield))
    with pytest.raises(ValueError):
        medium_state.gmod[0, 0] = 1.0

def test_reconstruction_helpers(medium_state):
    state = medium_state
    np.testing.assert_allclose(state.modified_matrix(1), state.disorder.g)
    P = state.projector()
    np.testing.assert_allclose(P @ P, P, atol=1e-12)
    np.testing.assert_allclose(state.complement() + P, np.eye(state.N), atol=1e-12)
    for s in range(1, state.k + 1):
        g_s = state.modified_matrix(s)
        np.testing.assert_allclose(
            state.rho_bar(s), (state.rho(s) + state.rho(s).T) / np.sqrt(2.0), atol=1e-12
        )
        np.testing.assert_allclose(state.rho(s) @ state.phi[s - 1], g_s @ state.phi[s - 1], atol=1e-12)
    np.testing.assert_allclose(state.centers(), state.phi @ state.magnetization / state.N)

def test_cavity_field_is_the_zeta_combination(medium_state):
    state = medium_state
    beta, h = state.params.beta, state.params.h
    expected = h + beta * state.gamma_used @ state.zeta
    np.testing.assert_allclose(state.hfield, expected, atol=1e-12)

def test_degenerate_iteration_raises():
    # h = 0 in the high-temperature phase: q = 0 and m^(2) vanishes
    params = ModelParams(beta=0.5, h=0.0)
    d = disorder_for_draw(10, 0, 0)
    with pytest.raises(DegeneracyError) as excinfo:
        tap_iterate(d, params, 0.0, 2)
    assert excinfo.value.step == 2

def test_depth_must_be_below_size(params):
    q = solve_q(params).q
    with pytest.raises(InvalidArgumentError):
        tap_iterate(disorder_for_draw(5, 0, 0), params, q, 5)

def test_depth_one_without_temperature():
    params = ModelParams(beta=0.0, h=0.6)
    q = solve_q(params).q
    state = tap_iterate(disorder_for_draw(20, 1, 0), params, q, 1)
    np.testing.assert_allclose(state.magnetization, np.tanh(0.6))

def test_concentration_report(medium_state):
    report = verify_concentration(medium_state)
    assert len(report.phi_deviation) == medium_state.k
    assert report.max_deviation == max(report.phi_deviation + report.overlap_deviation
                                       + [report.self_overlap_deviation])
    assert report.max_deviation < 0.5
    assert report.provenance.N == medium_state.N

def _pooled_phi_deviation(state_factory, N, seeds):
    deviations = []
    for seed in seeds:
        state = state_factory(0.5, 0.4, N, 4, seed=seed)
        deviations.extend(verify_concentration(state).phi_deviation)
    return float(np.median(deviations))

def test_concentration_improves_with_size(state_factory):
    small = _pooled_phi_deviation(state_factory, 50, range(10))
    large = _pooled_phi_deviation(state_factory, 800, range(10))
    assert large < small
    assert large < 0.1

@pytest.mark.slow
def test_concentration_at_two_thousand_spins(state_factory):
    small = _pooled_phi_deviation(state_factory, 200, range(20))
    large = _pooled_phi_deviation(state_factory, 2000, range(20))
    assert large <= 0.05
    assert large < small

def test_cavity_statistics(state_factory):
    state = state_factory(0.5, 0.4, 1000, 3, seed=2)
    report = cavity_statistics(state)
    assert set(report.empirical) == {"tanh", "tanh2", "log_cosh", "sech2"}
    assert report.gaps["log_cosh"] < 0.02
    assert max(report.gaps.values()) < 0.05
    assert report.phi_zeta_reference_variance == pytest.approx(2.0 / 1000)
    assert len(report.zeta_norms) == 3

def test_phi_zeta_variance():
    estimate = phi_zeta_variance(200, 2000, 17)
    assert 0.85 <= estimate.ratio <= 1.15

@pytest.mark.slow
def test_phi_zeta_variance_many_draws():
    estimate = phi_zeta_variance(200, 10_000, 17)
    assert 0.9 <= estimate.ratio <= 1.1

def test_conditional_resample_annihilates_phi(medium_state):
    G = conditional_resample(medium_state, 4)
    np.testing.assert_allclose(G @ medium_state.phi.T, 0.0, atol=1e-12)
    np.testing.assert_allclose(medium_state.phi @ G, 0.0, atol=1e-12)
    np.testing.assert_array_equal(G, conditional_resample(medium_state, 4))
    unconditioned = conditional_resample(medium_state, 4, depth=0)
    assert not np.allclose(unconditioned @ medium_state.phi[0], 0.0)

def test_unconditioned_resample_matches_the_disorder_law(state_factory):
    state = state_factory(0.5, 0.4, 50, 2, seed=4)
    N = state.N
    off = ~np.eye(N, dtype=bool)
    draws = conditional_resample_batch(state, SeedRecord(seed=31, stream=(0,)), 200, depth=0)
    couplings = np.stack([sample_disorder(N, SeedRecord(seed=32, stream=(i,))).g for i in range(200)])

    for sample in (draws[:, off], couplings[:, off]):
        assert abs(sample.mean()) * np.sqrt(N) < 0.01
        assert 0.98 <= sample.var() * N <= 1.02
    # The resampled law keeps its diagonal; the disorder zeroes it
    assert 0.93 <= draws[:, ~off].var() * N <= 1.07
    assert np.all(couplings[:, ~off] == 0.0)

def test_conditional_resample_covariance(state_factory):
    state = state_factory(0.5, 0.4, 60, 2, seed=9)
    N, batches, per_batch = state.N, 8, 500
    rng = np.random.default_rng(3)
    quads = rng.integers(0, N, size=(50, 4))

    x = np.empty((batches * per_batch, len(quads)))
    y = np.empty_like(x)
    for batch in range(batches):
        draws = conditional_resample_batch(state, SeedRecord(seed=99, stream=(batch,)), per_batch)
        rows = slice(batch * per_batch, (batch + 1) * per_batch)
        x[rows] = draws[:, quads[:, 0], quads[:, 1]]
        y[rows] = draws[:, quads[:, 2], quads[:, 3]]

    Q = state.complement()
    expected = Q[quads[:, 0], quads[:, 2]] * Q[quads[:, 1], quads[:, 3]] / N
    xc, yc = x - x.mean(axis=0), y - y.mean(axis=0)
    covariance = np.mean(xc * yc, axis=0)
    stderr = np.std(xc * yc, axis=0, ddof=1) / np.sqrt(x.shape[0])
    assert np.all(np.abs(covariance - expected) <= 5 * stderr + 1e-12)

def test_binary_dump_round_trip(tmp_path, small_state):
    path = save_tap_state(small_state, tmp_path / "state.bin")
    loaded = load_tap_state(path)
    for name in ("phi", "m", "zeta", "hfield", "gmod"):
        np.testing.assert_array_equal(getattr(loaded, name), getattr(small_state, name))
    np.testing.assert_array_equal(loaded.disorder.g, small_state.disorder.g)
    np.testing.assert_array_equal(loaded.factors.c, small_state.factors.c)
    assert loaded.disorder.seed == small_state.disorder.seed
    assert loaded.params == small_state.params
    assert loaded.se == small_state.se

def test_dump_rejects_foreign_file(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"\0" * 256)
    with pytest.raises(InvalidArgumentError):
        load_tap_state(path)
