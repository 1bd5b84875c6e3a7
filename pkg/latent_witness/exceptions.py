"""exceptions.py

Error Types Raised by the Library, Each Carrying the CLI Exit Code it Maps to

"""

EXIT_SUCCESS = 0
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4


class LatentWitnessError(Exception):
    """Base Class for All Library Errors"""

    exit_code = EXIT_VALIDATION


class ValidationError(LatentWitnessError, ValueError):
    """Raised When an Input Violates a Documented Range or Shape Invariant"""

    exit_code = EXIT_VALIDATION


class ProjectionOutOfRange(ValidationError):
    """Raised When a Grid Projection Falls Outside [-y_max, y_max]"""


class NegativeMarginal(LatentWitnessError):
    """Raised When a Binned Marginal is Below the Clipping Tolerance

    A homodyne marginal is a true probability density, so a strongly negative
    strip sum means the grid is too coarse for the chosen binning.
    """

    exit_code = EXIT_VALIDATION

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(
            f"Binned marginal at entry {index} is {value:.3e}, below the "
            f"clipping tolerance; refine the latent grid"
        )


class NonConvergence(LatentWitnessError, RuntimeError):
    """Raised When the Nearest-Point Stopping Rule is Not Met Within the Iteration Cap"""

    exit_code = EXIT_CONVERGENCE

    def __init__(self, iterations, duality_gap, distance):
        self.iterations = iterations
        self.duality_gap = duality_gap
        self.distance = distance
        super().__init__(
            f"No convergence after {iterations} iterations "
            f"(duality gap {duality_gap:.3e}, distance {distance:.3e})"
        )


class EmptyContext(ValidationError):
    """Raised When a Readout Context Has No Trials"""

    def __init__(self, context):
        self.context = context
        super().__init__(f"Context {context} has no trials")


class EmptyCell(ValidationError):
    """Raised When a (Region, Context) Cell Has No Held-Out Trials"""

    def __init__(self, region, context):
        self.region = region
        self.context = context
        super().__init__(
            f"No held-out trials for region {region} under context {context}"
        )


class StorageError(LatentWitnessError, OSError):
    """Raised When Reading or Writing a Data File Fails"""

    exit_code = EXIT_IO
