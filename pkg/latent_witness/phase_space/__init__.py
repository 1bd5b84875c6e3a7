from .grid import LatentGrid, ContextSet, OutcomeBinning, check_coverage
from .statistics import StatVector, renormalize_blocks
from .wigner import (
    ModelVariant,
    QuantumLatentModel,
    wigner_fock1,
    wigner_thermal1,
    wigner_mix,
    marginal_fock1,
    marginal_thermal1,
    thermal_populations,
)
from .forward import (
    ForwardMatrix,
    build_forward_matrix,
    ProportionalFit,
    latent_weights,
    negativity_boundary,
    proportional_fit,
    consistent_weights,
    binned_statistics,
    ideal_statistics,
    discretization_error,
    sampling_error,
)
