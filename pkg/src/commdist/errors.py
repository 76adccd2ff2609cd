"""Exception types shared across the package."""


class CommdistError(Exception):
    """Base class for all library-specific failures."""


class InputNotFinite(CommdistError):
    """A matrix or vector argument contains NaN or infinity."""


class NotSymmetric(CommdistError):
    """A full 3x3 array is not symmetric within tolerance."""


class NonConvergence(CommdistError):
    """An iterative solver exhausted its sweep budget."""


class NotARotation(CommdistError):
    """A matrix violates orthogonality or det = +1 beyond tolerance."""


class SchemaError(CommdistError):
    """A data file does not match the expected schema."""


class NonMonotoneFrequency(SchemaError):
    """Signature frequencies are not strictly increasing."""


class InsufficientSamples(CommdistError):
    """Too few samples in the requested frequency window."""


class MissingFrequency(CommdistError):
    """A requested frequency is absent from the signature grid."""


class ExcludedFrequency(CommdistError):
    """A requested frequency has a repeated spectrum and carries no angle data."""


class DegenerateData(CommdistError):
    """A feature matrix is identically zero; no usable singular values."""


class DimensionMismatch(CommdistError):
    """Vector length does not match the model or basis."""


class TooFewSamples(CommdistError):
    """A class has too few samples for the requested split."""


class NonFinite(CommdistError):
    """Training diverged to a non-finite loss or non-finite parameters."""


class MissingLaplace(CommdistError):
    """Posterior sampling requested on a model without a Laplace factor."""
