"""test_witness.py

Nearest-Point Solvers, Classical Bounds and the Optimal Witness

"""
import logging

import numpy as np
import pytest
from scipy import sparse
from scipy.optimize import nnls

from latent_witness.exceptions import NonConvergence, ValidationError
from latent_witness.phase_space import (
    ContextSet,
    LatentGrid,
    OutcomeBinning,
    QuantumLatentModel,
    StatVector,
    build_forward_matrix,
    ideal_statistics,
)
from latent_witness.witness import (
    ClassicalWeights,
    SolverVariant,
    WitnessResult,
    classical_membership,
    converged,
    frank_wolfe,
    maximizing_column,
    min_norm_point,
    nearest_point,
    optimal_witness,
    s_cl,
    uniform_witness,
    witness_gap,
    witness_value,
)

PENALTY = 1e5


def simplex_distance_oracle(matrix, target):
    """Dense Reference: Nonnegative Least Squares With a Heavily Weighted Sum Row"""
    dense = matrix.toarray()
    augmented = np.vstack([dense, PENALTY * np.ones((1, dense.shape[1]))])
    weights, _ = nnls(augmented, np.append(target, PENALTY))
    return float(np.linalg.norm(target - dense @ weights))


def augmented_least_squares_distance(matrix, target):
    """Dense Reference: nnls on the Columns (a_i - p, 1) Against the Last Unit Vector"""
    dense = matrix.toarray()
    extended = np.vstack([dense - target[:, None], np.ones((1, dense.shape[1]))])
    scaled, _ = nnls(extended, np.append(np.zeros(target.size), 1.0))
    return float(np.linalg.norm(target - dense @ (scaled / scaled.sum())))


def random_statistics(rng, n_contexts, n_outcomes):
    values = rng.dirichlet(np.ones(n_outcomes), size=n_contexts).ravel()
    return StatVector(values, n_contexts, n_outcomes)


@pytest.fixture
def tiny_forward():
    grid = LatentGrid(4.0, 6)
    return build_forward_matrix(grid, ContextSet(3), OutcomeBinning.for_grid(grid, 4))


@pytest.mark.parametrize("variant", ["MIN_NORM_POINT", "AWAY_STEP", "PAIRWISE"])
def test_toy_polytope_witness(toy_forward, toy_anticorrelated, variant):
    result = optimal_witness(toy_anticorrelated, toy_forward, variant=variant)
    np.testing.assert_allclose(result.c, [0.5, -0.5, -0.5, 0.5], atol=1e-12)
    assert result.gap == pytest.approx(1.0, abs=1e-12)
    assert result.distance == pytest.approx(1.0, abs=1e-12)
    assert result.s_cl == pytest.approx(0.0, abs=1e-12)
    assert result.certificate_residual < 1e-12
    assert not result.classical
    np.testing.assert_allclose(result.q_star.values, 0.5)
    assert result.metadata["variant"] == variant


def test_simplex_nearest_point_of_the_origin():
    identity = sparse.identity(3, format="csc")
    for variant in SolverVariant:
        result = nearest_point(identity, np.zeros(3), variant=variant)
        assert result.distance == pytest.approx(np.sqrt(1.0 / 3.0), abs=1e-8)
        np.testing.assert_allclose(result.weights, 1.0 / 3.0, atol=1e-6)
        assert result.weights.sum() == pytest.approx(1.0)


def test_iteration_cap_raises_non_convergence():
    with pytest.raises(NonConvergence) as info:
        frank_wolfe(sparse.identity(3, format="csc"), np.zeros(3), max_iterations=1)
    assert info.value.iterations == 1
    assert info.value.duality_gap == pytest.approx(0.5)
    assert info.value.exit_code == 3


def test_solver_argument_checks(toy_forward):
    with pytest.raises(ValidationError):
        frank_wolfe(toy_forward.matrix, np.zeros(4), tol=0.0)
    with pytest.raises(ValidationError):
        frank_wolfe(toy_forward.matrix, np.zeros(3))
    with pytest.raises(ValidationError):
        SolverVariant.parse("NEWTON")
    assert SolverVariant.parse("pairwise") is SolverVariant.PAIRWISE
    with pytest.raises(ValidationError):
        frank_wolfe(toy_forward.matrix, np.zeros(4), variant=SolverVariant.MIN_NORM_POINT)
    with pytest.raises(ValidationError):
        min_norm_point(toy_forward.matrix, np.zeros(4), max_iterations=0)


def test_distance_matches_dense_oracle(tiny_forward):
    rng = np.random.default_rng(7)
    for _ in range(20):
        p = random_statistics(rng, tiny_forward.n_contexts, tiny_forward.n_outcomes)
        result = optimal_witness(p, tiny_forward)
        expected = simplex_distance_oracle(tiny_forward.matrix, p.values)
        assert result.distance == pytest.approx(expected, abs=1e-6)
        assert result.certificate_residual <= 1e-6


def test_step_rules_agree(tiny_forward):
    p = random_statistics(np.random.default_rng(11), tiny_forward.n_contexts, tiny_forward.n_outcomes)
    away = optimal_witness(p, tiny_forward, variant=SolverVariant.AWAY_STEP)
    pairwise = optimal_witness(p, tiny_forward, variant=SolverVariant.PAIRWISE)
    assert away.distance == pytest.approx(pairwise.distance, abs=1e-7)


def test_classical_mixture_gets_the_uniform_witness(tiny_forward, caplog):
    weights = np.random.default_rng(3).dirichlet(np.ones(tiny_forward.num_columns))
    p = StatVector(tiny_forward.apply(weights), tiny_forward.n_contexts, tiny_forward.n_outcomes)
    with caplog.at_level(logging.WARNING, logger="latent_witness"):
        result = optimal_witness(p, tiny_forward)
    assert result.classical
    np.testing.assert_array_equal(result.c, uniform_witness(3, 4))
    assert abs(result.gap) <= 1e-12
    assert "uniform witness" in caplog.text
    assert classical_membership(p, tiny_forward)


def test_no_classical_mixture_beats_the_bound(toy_forward, toy_anticorrelated):
    result = optimal_witness(toy_anticorrelated, toy_forward)
    rng = np.random.default_rng(0)
    for weights in rng.dirichlet(np.ones(toy_forward.num_columns), size=50):
        assert witness_value(result.c, toy_forward.apply(weights)) <= result.s_cl + 1e-12
    assert witness_gap(result.c, toy_anticorrelated, toy_forward) == pytest.approx(1.0)
    assert not classical_membership(toy_anticorrelated, toy_forward)


def test_blocked_scan_matches_full_scan(small_setup):
    forward = small_setup[3]
    c = np.random.default_rng(5).normal(size=forward.dimension)
    assert maximizing_column(c, forward, block_size=7) == maximizing_column(c, forward)
    assert s_cl(c, forward, block_size=7) == s_cl(c, forward)


def test_witness_value_checks_dimensions():
    with pytest.raises(ValidationError):
        witness_value(np.ones(3), np.ones(4))


def test_optimal_witness_checks_its_inputs(toy_forward):
    with pytest.raises(ValidationError):
        optimal_witness(np.array([1.0, 0.0, 0.0, 1.0]), toy_forward)
    with pytest.raises(ValidationError):
        optimal_witness(StatVector(np.full(12, 0.25), 3, 4), toy_forward)
    with pytest.raises(ValidationError):
        WitnessResult(
            c=np.ones(12),
            s_cl=0.0,
            s=0.0,
            gap=0.0,
            w_star=ClassicalWeights([1.0]),
            q_star=StatVector(np.full(12, 0.25), 3, 4),
            iterations=0,
            certificate_residual=0.0,
            distance=0.0,
        )


def test_result_dictionary_keeps_full_precision(toy_forward, toy_interior):
    result = optimal_witness(toy_interior, toy_forward)
    restored = WitnessResult.from_dict(result.to_dict())
    np.testing.assert_array_equal(restored.c, result.c)
    np.testing.assert_array_equal(restored.w_star.w, result.w_star.w)
    assert restored.gap == result.gap
    assert restored.metadata == result.metadata


def test_thermal_statistics_are_classical(small_setup):
    grid, contexts, binning, forward = small_setup
    p = ideal_statistics(QuantumLatentModel.thermal1(), grid, contexts, binning, forward)
    result = optimal_witness(p, forward)
    assert result.classical
    assert result.gap <= 1e-6


@pytest.mark.slow
def test_full_size_fock_state_is_detected(full_setup):
    grid, contexts, binning, forward = full_setup
    p = ideal_statistics(QuantumLatentModel.fock1(), grid, contexts, binning, forward)
    result = optimal_witness(p, forward)
    assert result.gap > 0.0
    assert not result.classical
    assert result.certificate_residual <= 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("beta", [0.75, 0.8, 0.9, 1.0])
def test_full_size_mixtures_beyond_the_boundary_are_classical(full_setup, beta):
    grid, contexts, binning, forward = full_setup
    p = ideal_statistics(QuantumLatentModel.mix(beta), grid, contexts, binning, forward)
    result = optimal_witness(p, forward, tol=1e-6)
    assert result.classical
    assert result.gap <= 1e-6


def test_min_norm_point_on_the_toy_polytope(toy_forward, toy_anticorrelated, toy_interior):
    outside = min_norm_point(toy_forward.matrix, toy_anticorrelated.values)
    np.testing.assert_allclose(outside.weights, [0.5, 0.5], atol=1e-12)
    assert outside.distance == pytest.approx(1.0, abs=1e-12)
    assert outside.iterations == 1
    assert outside.variant is SolverVariant.MIN_NORM_POINT

    interior = min_norm_point(toy_forward.matrix, toy_interior.values)
    np.testing.assert_allclose(interior.point, 0.5, atol=1e-12)
    assert interior.distance == pytest.approx(0.6, abs=1e-12)


def test_min_norm_point_iteration_cap():
    with pytest.raises(NonConvergence) as info:
        min_norm_point(sparse.identity(3, format="csc"), np.zeros(3), max_iterations=1)
    assert info.value.iterations == 1
    assert info.value.duality_gap == pytest.approx(0.5)


def test_min_norm_point_matches_augmented_least_squares(tiny_forward):
    rng = np.random.default_rng(19)
    for _ in range(20):
        p = random_statistics(rng, tiny_forward.n_contexts, tiny_forward.n_outcomes)
        result = min_norm_point(tiny_forward.matrix, p.values)
        assert result.distance == pytest.approx(
            augmented_least_squares_distance(tiny_forward.matrix, p.values), abs=1e-9
        )
        assert result.weights.min() >= 0.0
        assert result.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_stopping_rule():
    assert converged(0.5, 1.0, 0.0, 0.5, tol=0.5)
    assert not converged(0.5, 1.0, 0.0, 0.5, tol=0.4)
    assert converged(0.5, 1e-9, 0.0, 0.5, tol=1e-8)
    assert converged(1e-17, 1.0, 1.0, 1.0, tol=1e-12)


@pytest.mark.parametrize("variant", ["AWAY_STEP", "PAIRWISE"])
def test_loose_tolerance_still_bounds_the_certificate(tiny_forward, variant):
    rng = np.random.default_rng(23)
    for _ in range(10):
        p = random_statistics(rng, tiny_forward.n_contexts, tiny_forward.n_outcomes)
        result = optimal_witness(p, tiny_forward, tol=1e-3, variant=variant)
        if not result.classical:
            assert result.certificate_residual <= 1e-3 + 1e-12


def test_proportional_fit_certifies_classical_statistics(toy_forward):
    p = StatVector(np.array([0.7, 0.3, 0.7, 0.3]), 2, 2)
    result = optimal_witness(p, toy_forward)
    assert result.classical
    assert result.iterations == 0
    assert result.metadata["fit_cycles"] == 1
    np.testing.assert_allclose(result.w_star.w, [0.7, 0.3], atol=1e-15)


def test_mixture_beyond_the_boundary_is_classical_on_a_small_grid(small_setup):
    grid, contexts, binning, forward = small_setup
    p = ideal_statistics(QuantumLatentModel.mix(0.9), grid, contexts, binning, forward)
    result = optimal_witness(p, forward, tol=1e-6)
    assert result.classical
    assert result.distance <= 1e-6
    assert classical_membership(p, forward, tol=1e-6)
