from .operators import (
    SpinState,
    check_spin,
    magnetic_numbers,
    spin_operators,
    direction_operator,
    wigner_small_d,
    rotation_operator,
    direction_basis,
    activation_povm,
    activation_prob,
)
from .sphere import DirectionSet, fibonacci_sphere, unit_vectors, classical_sphere_matrix
from .classicality import spin_statistics, run_spin_test
