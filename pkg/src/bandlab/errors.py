"""Exception types shared across bandlab modules."""


class BandlabError(Exception):
    """Base class for all bandlab errors."""


class DimensionMismatchError(BandlabError):
    """Profile dimensions are incompatible (e.g. bandwidth does not divide n)."""


class DegenerateProfileError(BandlabError):
    """A profile function put no mass on the sampled lattice."""


class SingularOperatorError(BandlabError):
    """A matrix inversion failed or its condition estimate exceeded the cap."""


class SpectrumProximityError(BandlabError):
    """A resolvent parameter landed too close to the circulant spectrum."""


class BranchAmbiguityError(BandlabError):
    """Root continuation could not identify the positive-imaginary branch."""


class DecompositionError(BandlabError):
    """A dense eigen/singular decomposition did not converge."""


class HypothesisCompatibilityError(BandlabError):
    """An experiment was configured with an entry distribution its target
    statement does not cover (e.g. no bounded density where one is required)."""


class EmptyInputError(BandlabError):
    """A distance functional received an empty sample."""
