"""test_detection.py

Admixture, Noise Projection, Closed-Form and Monte Carlo Detection Probabilities

"""
import itertools

import numpy as np
import pytest
from scipy.stats import norm

from latent_witness.detection import (
    DetectionConfig,
    alpha_half_maximum,
    classical_saturator,
    detect,
    detection_curve,
    heatmap,
    mix_alpha,
    observe,
    p_det_closed,
    p_det_mc,
    project_blocks,
    witness_sigma,
)
from latent_witness.exceptions import ValidationError
from latent_witness.phase_space import QuantumLatentModel, ideal_statistics
from latent_witness.witness import optimal_witness, witness_value

KAPPA = 2.0
FALSE_ALARM = norm.sf(KAPPA)


def simplex_projection_by_enumeration(point):
    """Closest Simplex Point Found by Trying Every Support"""
    best, best_distance = None, np.inf
    for size in range(1, point.size + 1):
        for support in itertools.combinations(range(point.size), size):
            chosen = point[list(support)]
            candidate = np.zeros(point.size)
            candidate[list(support)] = chosen - (chosen.sum() - 1.0) / size
            if candidate.min() < 0:
                continue
            distance = np.linalg.norm(candidate - point)
            if distance < best_distance:
                best, best_distance = candidate, distance
    return best


@pytest.fixture
def toy_witness(toy_forward, toy_anticorrelated):
    return optimal_witness(toy_anticorrelated, toy_forward)


@pytest.fixture
def interior_witness(toy_forward, toy_interior):
    return optimal_witness(toy_interior, toy_forward)


def test_simplex_projection_examples():
    np.testing.assert_allclose(project_blocks([2.0, 0.0, 0.6, 0.6], 2), [1.0, 0.0, 0.5, 0.5])
    np.testing.assert_allclose(project_blocks([0.2, 0.3, 0.5], 3), [0.2, 0.3, 0.5])


def test_simplex_projection_of_noisy_rows():
    rng = np.random.default_rng(2)
    noisy = rng.normal(0.1, 0.3, size=(40, 30))
    projected = project_blocks(noisy, 10)
    assert projected.shape == noisy.shape
    assert np.all(projected >= 0.0)
    np.testing.assert_allclose(projected.reshape(-1, 10).sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(project_blocks(projected, 10), projected, atol=1e-12)


def test_closed_form_endpoints(toy_witness, toy_anticorrelated):
    c, bound = toy_witness.c, toy_witness.s_cl
    at_one = p_det_closed(1.0, KAPPA, 0.1, c, toy_anticorrelated, bound)
    assert at_one == pytest.approx(FALSE_ALARM, abs=1e-12)
    sigma_s = witness_sigma(0.1, c)
    half = alpha_half_maximum(toy_witness.gap, sigma_s, KAPPA)
    assert half == pytest.approx(0.8)
    assert p_det_closed(half, KAPPA, 0.1, c, toy_anticorrelated, bound) == pytest.approx(0.5, abs=1e-12)


def test_closed_form_is_non_increasing_in_alpha(toy_witness, toy_anticorrelated):
    alphas = np.linspace(0.0, 1.0, 21)
    curve = p_det_closed(alphas, KAPPA, 0.2, toy_witness.c, toy_anticorrelated, toy_witness.s_cl)
    assert curve.shape == alphas.shape
    assert np.all(np.diff(curve) <= 0.0)
    assert curve[0] > 0.99


def test_noise_free_detection_is_a_step(toy_witness, toy_anticorrelated):
    curve = p_det_closed([0.0, 0.5, 1.0], KAPPA, 0.0, toy_witness.c, toy_anticorrelated, 0.0)
    np.testing.assert_array_equal(curve, [1.0, 1.0, 0.0])


def test_decision_rule_is_strict():
    assert not detect(1.0, 0.0, 2.0, 0.5)
    assert detect(1.0 + 1e-12, 0.0, 2.0, 0.5)
    with pytest.raises(ValidationError):
        detect(1.0, 0.0, 2.0, -0.1)


def test_saturator_attains_the_bound(toy_forward, interior_witness):
    p_cl = classical_saturator(toy_forward, interior_witness.c)
    assert p_cl.metadata["column"] == 0
    np.testing.assert_array_equal(p_cl.values, [1.0, 0.0, 1.0, 0.0])
    assert interior_witness.c @ p_cl.values == pytest.approx(interior_witness.s_cl)


def test_mixing_and_observation(toy_forward, toy_interior, interior_witness):
    p_cl = classical_saturator(toy_forward, interior_witness.c)
    mixed = mix_alpha(toy_interior, p_cl, 0.25)
    np.testing.assert_allclose(mixed.values, [0.85, 0.15, 0.4, 0.6])
    assert observe(mixed, 0.0, 0) is mixed
    noisy = observe(mixed, 0.05, np.random.default_rng(1))
    assert noisy.dimension == 4
    with pytest.raises(ValidationError):
        mix_alpha(toy_interior, p_cl, 1.5)
    with pytest.raises(ValidationError):
        DetectionConfig(kappa=0.0)
    with pytest.raises(ValidationError):
        DetectionConfig(sigma=-0.01)


def test_monte_carlo_endpoints(toy_forward, toy_interior, interior_witness):
    p_cl = classical_saturator(toy_forward, interior_witness.c)
    certain = p_det_mc(DetectionConfig(alpha=0.0, sigma=0.01, n_mc=2500, seed=1), interior_witness, toy_interior, p_cl)
    assert certain.frequency == 1.0
    assert certain.stderr == 0.0
    vertex = p_det_mc(DetectionConfig(alpha=1.0, sigma=0.01, n_mc=2500, seed=1), interior_witness, toy_interior, p_cl)
    assert vertex.frequency < 0.02


def test_monte_carlo_ignores_worker_count(toy_forward, toy_interior, interior_witness):
    p_cl = classical_saturator(toy_forward, interior_witness.c)
    config = DetectionConfig(alpha=0.5, sigma=0.2, n_mc=2500, seed=42)
    serial = p_det_mc(config, interior_witness, toy_interior, p_cl, workers=1)
    parallel = p_det_mc(config, interior_witness, toy_interior, p_cl, workers=2)
    assert serial == parallel
    assert serial == p_det_mc(config, interior_witness, toy_interior, p_cl, forward=toy_forward)


def test_detection_curve_columns(toy_forward, toy_interior, interior_witness):
    p_cl = classical_saturator(toy_forward, interior_witness.c)
    curve = detection_curve([0.0, 0.5, 1.0], 0.05, interior_witness, toy_interior, p_cl)
    assert list(curve.columns) == ["alpha", "p_closed", "p_mc", "mc_stderr"]
    assert curve["p_mc"].isna().all()
    sampled = detection_curve([0.0, 1.0], 0.05, interior_witness, toy_interior, p_cl, n_mc=300, seed=9)
    assert sampled["p_mc"].between(0.0, 1.0).all()


@pytest.mark.parametrize("freeze", [False, True])
def test_small_heatmap(small_setup, freeze):
    grid, contexts, binning, forward = small_setup
    result = heatmap(
        [0.0, 0.5, 1.0], [0.0, 0.8], 0.01, grid, contexts, binning, forward,
        freeze_witness=freeze, tol=1e-6,
    )
    assert result.probabilities.shape == (2, 3)
    assert np.all((result.probabilities >= 0.0) & (result.probabilities <= 1.0))
    assert result.metadata["witness_mode"] == ("frozen" if freeze else "reoptimized")
    frame = result.to_frame()
    assert list(frame.columns) == ["beta", "0.0", "0.5", "1.0"]
    if not freeze:
        # MIX(0.8) has a non-negative Wigner function
        assert np.all(result.probabilities[1] <= FALSE_ALARM + 1e-3)


def test_simplex_projection_matches_enumeration():
    rows = np.random.default_rng(13).normal(0.3, 0.8, size=(200, 3))
    for row, projected in zip(rows, project_blocks(rows, 3)):
        np.testing.assert_allclose(projected, simplex_projection_by_enumeration(row), atol=1e-12)


def test_observation_noise_has_the_witness_scale(toy_interior, interior_witness):
    sigma = 0.01
    rng = np.random.default_rng(29)
    values = [
        witness_value(interior_witness.c, observe(toy_interior, sigma, rng)) for _ in range(20_000)
    ]
    assert np.std(values) == pytest.approx(witness_sigma(sigma, interior_witness.c), rel=0.03)


def test_closed_form_is_monotone_in_kappa_and_gap(toy_witness, toy_anticorrelated):
    c, bound = toy_witness.c, toy_witness.s_cl
    by_kappa = [
        p_det_closed(0.3, kappa, 0.3, c, toy_anticorrelated, bound)
        for kappa in np.linspace(0.5, 4.0, 8)
    ]
    assert np.all(np.diff(by_kappa) < 0)
    # a lower bound is a larger gap
    by_gap = [
        p_det_closed(0.3, KAPPA, 0.3, c, toy_anticorrelated, lowered)
        for lowered in bound + np.linspace(0.5, -0.5, 8)
    ]
    assert np.all(np.diff(by_gap) > 0)


@pytest.mark.slow
@pytest.mark.parametrize("sigma", [0.005, 0.01, 0.02])
def test_full_size_detection_curves(full_setup, sigma):
    grid, contexts, binning, forward = full_setup
    p_q = ideal_statistics(QuantumLatentModel.fock1(), grid, contexts, binning, forward)
    witness = optimal_witness(p_q, forward)
    p_cl = classical_saturator(forward, witness.c)
    curve = detection_curve(
        np.linspace(0.0, 1.0, 11), sigma, witness, p_q, p_cl, n_mc=10_000, seed=2024
    )
    assert np.all(np.diff(curve["p_closed"]) <= 0.0)
    assert curve["p_closed"].iloc[-1] == pytest.approx(FALSE_ALARM, abs=1e-12)
    allowed = np.maximum(0.03, 3.0 * curve["mc_stderr"])
    assert np.all(np.abs(curve["p_mc"] - curve["p_closed"]) <= allowed)


@pytest.mark.slow
def test_full_size_heatmap_boundary(full_setup):
    grid, contexts, binning, forward = full_setup
    result = heatmap([0.0, 0.5, 1.0], [0.0, 0.75, 0.9], 0.01, grid, contexts, binning, forward)
    assert np.all(result.probabilities[1:] <= FALSE_ALARM + 1e-3)
