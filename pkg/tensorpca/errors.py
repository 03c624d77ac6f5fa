"""Exception types shared across the package."""


class TensorPCAError(Exception):
    """Base class for domain errors in the package."""


class DimensionCapError(TensorPCAError):
    """A dense, explicit or simulator size cap was exceeded."""


class DegenerateInputError(TensorPCAError):
    """Input leaves nothing to compute (zero contraction, empty spectral window)."""
