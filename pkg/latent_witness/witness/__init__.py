from .solver import SolverVariant, SolverResult, converged, frank_wolfe, min_norm_point, nearest_point
from .witness import (
    ClassicalWeights,
    WitnessResult,
    witness_value,
    maximizing_column,
    s_cl,
    witness_gap,
    uniform_witness,
    optimal_witness,
    classical_membership,
)
