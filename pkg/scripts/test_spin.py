"""test_spin.py

Spin Operators, Activation Readouts, Sphere Models and the Spin Classicality Test

"""
import numpy as np
import pytest
from scipy.linalg import expm
from scipy.spatial.transform import Rotation

from latent_witness.exceptions import ValidationError
from latent_witness.spin import (
    DirectionSet,
    SpinState,
    activation_povm,
    activation_prob,
    check_spin,
    classical_sphere_matrix,
    direction_basis,
    direction_operator,
    fibonacci_sphere,
    magnetic_numbers,
    rotation_operator,
    run_spin_test,
    spin_operators,
    spin_statistics,
)

Z_AXIS = np.array([0.0, 0.0, 1.0])


@pytest.mark.parametrize("j", [0.5, 1.0, 1.5, 3.0])
def test_spin_operators_satisfy_the_commutation_relations(j):
    jx, jy, jz = spin_operators(j)
    np.testing.assert_allclose(jx @ jy - jy @ jx, 1j * jz, atol=1e-12)
    np.testing.assert_allclose(jy @ jz - jz @ jy, 1j * jx, atol=1e-12)
    casimir = jx @ jx + jy @ jy + jz @ jz
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(int(2 * j) + 1), atol=1e-12)


def test_check_spin():
    assert check_spin(1.5) == 1.5
    assert check_spin(2) == 2.0
    for bad in [0, 0.3, -1, np.nan]:
        with pytest.raises(ValidationError):
            check_spin(bad)
    np.testing.assert_array_equal(magnetic_numbers(1), [1.0, 0.0, -1.0])


@pytest.mark.parametrize("j", [0.5, 1.0, 2.5])
def test_rotation_operator_is_the_euler_product(j):
    _, jy, jz = spin_operators(j)
    alpha, beta, gamma = 0.3, 1.1, -0.7
    expected = expm(-1j * alpha * jz) @ expm(-1j * beta * jy) @ expm(-1j * gamma * jz)
    operator = rotation_operator(j, alpha, beta, gamma)
    np.testing.assert_allclose(operator, expected, atol=1e-12)
    np.testing.assert_allclose(operator @ operator.conj().T, np.eye(operator.shape[0]), atol=1e-12)


@pytest.mark.parametrize("j", [0.5, 2.0])
def test_direction_basis_diagonalizes_the_direction_operator(j):
    direction = np.array([1.0, -2.0, 0.5])
    direction /= np.linalg.norm(direction)
    basis = direction_basis(j, direction)
    operator = direction_operator(j, direction)
    np.testing.assert_allclose(
        operator @ basis, basis * magnetic_numbers(j)[None, :], atol=1e-12
    )


@pytest.mark.parametrize("j, threshold", [(0.5, 0.0), (1.0, 0.0), (1.5, -0.5), (2.0, 1.5)])
def test_activation_povm_is_complete(j, threshold):
    direction = np.array([0.6, 0.0, 0.8])
    e_high, e_low = activation_povm(j, direction, threshold)
    np.testing.assert_allclose(e_high + e_low, np.eye(int(2 * j) + 1), atol=1e-10)
    np.testing.assert_allclose(e_high @ e_high, e_high, atol=1e-10)
    rank = int(np.sum(magnetic_numbers(j) > threshold))
    assert np.trace(e_high).real == pytest.approx(rank)


def test_threshold_range_is_checked():
    with pytest.raises(ValidationError):
        activation_povm(1.0, Z_AXIS, threshold=1.0)
    with pytest.raises(ValidationError):
        activation_povm(1.0, Z_AXIS, threshold=-1.5)
    with pytest.raises(ValidationError):
        activation_povm(1.0, [0.0, 0.0, 2.0])


@pytest.mark.parametrize("angle", np.linspace(0.0, np.pi, 7))
def test_spin_half_activation_follows_the_half_angle_law(angle):
    state = SpinState.basis(0.5, 0.5)
    direction = np.array([np.sin(angle), 0.0, np.cos(angle)])
    assert activation_prob(state, direction) == pytest.approx(np.cos(angle / 2) ** 2, abs=1e-10)


def test_activation_is_rotation_covariant():
    angles = [0.4, 2.2, -1.3]
    rotation = Rotation.from_euler("ZYZ", angles)
    for j in [0.5, 1.0, 1.5]:
        state = SpinState.haar_random(j, np.random.default_rng(3))
        rotated = state.rotated(rotation_operator(j, *angles))
        directions = DirectionSet.fibonacci(12, threshold=-0.5 if j > 0.5 else 0.0)
        original = spin_statistics(state, directions)
        moved = spin_statistics(rotated, directions.rotated(rotation))
        np.testing.assert_allclose(moved.values, original.values, atol=1e-10)


def test_spin_state_validation():
    with pytest.raises(ValidationError):
        SpinState(0.5, np.eye(3) / 3)
    with pytest.raises(ValidationError):
        SpinState(0.5, np.eye(2))
    with pytest.raises(ValidationError):
        SpinState(0.5, np.diag([1.5, -0.5]))
    with pytest.raises(ValidationError):
        SpinState(0.5, np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(ValidationError):
        SpinState.basis(1.0, 0.5)


def test_spin_state_constructors():
    up = SpinState.basis(1.0, 1.0)
    coherent = SpinState.coherent(1.0, 0.0, 0.0)
    np.testing.assert_allclose(coherent.rho, up.rho, atol=1e-12)
    mixed = SpinState.maximally_mixed(1.5)
    np.testing.assert_allclose(mixed.rho, np.eye(4) / 4)
    first = SpinState.haar_random(1.0, 11)
    second = SpinState.haar_random(1.0, 11)
    np.testing.assert_array_equal(first.rho, second.rho)
    assert np.trace(first.rho @ first.rho).real == pytest.approx(1.0)


def test_coherent_state_points_along_its_direction():
    polar, azimuth = 1.0, 2.5
    state = SpinState.coherent(2.0, polar, azimuth)
    direction = np.array(
        [np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar)]
    )
    assert activation_prob(state, direction, threshold=1.5) == pytest.approx(1.0, abs=1e-10)


def test_maximally_mixed_statistics_count_levels():
    state = SpinState.maximally_mixed(1.0)
    directions = DirectionSet.fibonacci(5)
    np.testing.assert_allclose(spin_statistics(state, directions).blocks()[:, 0], 1.0 / 3.0)
    lowered = directions.with_threshold(-1.0)
    np.testing.assert_allclose(spin_statistics(state, lowered).blocks()[:, 0], 2.0 / 3.0)


def test_fibonacci_sphere():
    points = fibonacci_sphere(50)
    np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)
    assert abs(points.mean(axis=0)).max() < 0.1
    antipodal = fibonacci_sphere(10, antipodal=True)
    np.testing.assert_array_equal(antipodal[5:], -antipodal[:5])
    with pytest.raises(ValidationError):
        fibonacci_sphere(7, antipodal=True)
    with pytest.raises(ValidationError):
        fibonacci_sphere(0)


def test_direction_set():
    rings = DirectionSet.rings(4, [np.pi / 2])
    np.testing.assert_allclose(rings.vectors[:, 2], 0.0, atol=1e-12)
    polar, azimuth = rings.angles()
    np.testing.assert_allclose(polar, np.pi / 2)
    np.testing.assert_allclose(azimuth, [0.0, np.pi / 2, np.pi, -np.pi / 2], atol=1e-12)
    np.testing.assert_array_equal(rings.with_threshold(0.5).thresholds, 0.5)
    with pytest.raises(ValidationError):
        DirectionSet([[1.0, 1.0, 0.0]], 0.0)


def test_classical_sphere_matrix_blocks():
    points = np.array([Z_AXIS, -Z_AXIS])
    directions = DirectionSet([Z_AXIS, [1.0, 0.0, 0.0]], 0.0)
    forward = classical_sphere_matrix(points, directions, 0.5)
    assert forward.shape == (4, 2)
    np.testing.assert_array_equal(forward.column(0)[:2], [1.0, 0.0])
    np.testing.assert_array_equal(forward.column(1)[:2], [0.0, 1.0])
    # boundary points answer L
    np.testing.assert_array_equal(forward.column(0)[2:], [0.0, 1.0])
    np.testing.assert_array_equal(forward.column_block_sums(), np.ones((2, 2)))
    with pytest.raises(ValidationError):
        classical_sphere_matrix(points, directions.with_threshold(0.5), 0.5)


@pytest.mark.parametrize("j", [0.5, 1.5])
def test_maximally_mixed_half_integer_spin_is_classical(j):
    state = SpinState.maximally_mixed(j)
    result = run_spin_test(state, DirectionSet.fibonacci(10), sphere_points=200, tol=1e-6)
    assert result.classical
    assert result.distance <= 1e-6
    assert result.metadata["sphere_points"] == 200


def test_zero_projection_state_is_nonclassical():
    state = SpinState.basis(1.0, 0.0)
    directions = DirectionSet.from_angles(
        [0.0, np.pi, np.pi / 4, 3 * np.pi / 4], [0.0, 0.0, 0.0, np.pi]
    )
    result = run_spin_test(state, directions, threshold=0.0, sphere_points=200, tol=1e-6)
    assert not result.classical
    assert result.gap > 0.01
    assert result.s_cl < float(result.c @ spin_statistics(state, directions).values)
    assert result.metadata["directions"] == 4


@pytest.mark.parametrize("j", [0.5, 1.5, 2.5])
def test_antipodal_readouts_swap_high_and_low(j):
    state = SpinState.haar_random(j, np.random.default_rng(int(2 * j)))
    for direction in fibonacci_sphere(6):
        high = activation_prob(state, direction)
        assert activation_prob(state, -direction) == pytest.approx(1.0 - high, abs=1e-12)


def test_antipodal_latent_points_swap_high_and_low():
    points = fibonacci_sphere(40, antipodal=True)
    dense = classical_sphere_matrix(points, DirectionSet.fibonacci(7), 1.5).matrix.toarray()
    np.testing.assert_array_equal(dense[0::2, :20], dense[1::2, 20:])
    np.testing.assert_array_equal(dense[1::2, :20], dense[0::2, 20:])


def test_zero_projection_state_never_activates_along_its_axis():
    state = SpinState.basis(1.0, 0.0)
    assert activation_prob(state, Z_AXIS) == pytest.approx(0.0, abs=1e-12)
    assert activation_prob(state, -Z_AXIS) == pytest.approx(0.0, abs=1e-12)
    assert activation_prob(state, Z_AXIS, threshold=-1.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.slow
def test_random_spin_half_states_are_classical():
    rng = np.random.default_rng(2024)
    directions = DirectionSet.fibonacci(20)
    for _ in range(20):
        state = SpinState.haar_random(0.5, rng)
        result = run_spin_test(state, directions, sphere_points=10_000, tol=1e-6)
        assert result.gap <= 1e-2
